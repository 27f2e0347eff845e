//! Local improvement of partitions.

pub mod balance;
pub mod flow;
pub mod fm;
pub mod label_prop;
pub mod maxflow;

pub use balance::{enforce_balance, rebalance};
pub use flow::{build_corridor, flow_refine_pair, max_flow_min_cut, refine_all_pairs, FlowCorridor};
pub use fm::{fm_refine, multi_try_fm, FmConfig, GainTable, MoveLog, MoveRecord, StopRule};
pub use label_prop::label_prop_refine;
