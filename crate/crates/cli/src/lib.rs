//! Command-line front ends of the partitioner.
//!
//! Each program is a function taking its argument list and an output
//! stream and returning the process exit code, so the binaries stay thin
//! and the programs can be driven in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use gpart::coarsening::label_propagation_clustering;
use gpart::evolutionary::{evolve, EvolveOptions, Objective};
use gpart::io::{
    default_partition_filename, parse_raw_graph, read_graph_file, read_partition_file, write_clustering_file,
    write_partition_file, write_separator_file, DEFAULT_CLUSTERING_FILENAME, DEFAULT_SEPARATOR_FILENAME,
};
use gpart::multilevel::iterated_cycles;
use gpart::refinement::enforce_balance;
use gpart::rng::seeded;
use gpart::separator::kway_separator;
use gpart::{check_balance, BalanceSpec, Graph, Partition, Preconfiguration};

/// Environment variable holding the log filter, e.g. `GPART_LOG=debug`.
pub const LOG_ENV: &str = "GPART_LOG";

pub fn init_logging() {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().filter(LOG_ENV))
        .format_timestamp(None)
        .try_init();
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Strong,
    Eco,
    Fast,
    Fastsocial,
    Ecosocial,
    Strongsocial,
}

impl From<Variant> for Preconfiguration {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Strong => Preconfiguration::Strong,
            Variant::Eco => Preconfiguration::Eco,
            Variant::Fast => Preconfiguration::Fast,
            Variant::Fastsocial => Preconfiguration::FastSocial,
            Variant::Ecosocial => Preconfiguration::EcoSocial,
            Variant::Strongsocial => Preconfiguration::StrongSocial,
        }
    }
}

/// Multilevel graph partitioning.
#[derive(Debug, Parser)]
#[command(name = "kaffpa", rename_all = "snake_case")]
pub struct KaffpaArgs {
    /// Path to the graph file to partition
    pub file: PathBuf,
    /// Number of blocks to partition the graph into
    #[arg(long)]
    pub k: usize,
    /// Seed for the random number generator
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Preconfiguration to use
    #[arg(long, value_enum, default_value = "eco")]
    pub preconfiguration: Variant,
    /// Allowed imbalance in percent
    #[arg(long, default_value_t = 3.0)]
    pub imbalance: f64,
    /// Time limit in seconds; 0 makes a single partitioner call
    #[arg(long, default_value_t = 0.0)]
    pub time_limit: f64,
    /// Guarantee a feasible output (graphs without node weights only)
    #[arg(long)]
    pub enforce_balance: bool,
    /// Partition to improve
    #[arg(long)]
    pub input_partition: Option<PathBuf>,
    /// Balance node weight plus incident edge weight
    #[arg(long)]
    pub balance_edges: bool,
    /// Output file [default: tmppartition<k>]
    #[arg(long)]
    pub output_filename: Option<PathBuf>,
}

/// Evolutionary graph partitioning.
#[derive(Debug, Parser)]
#[command(name = "kaffpae", rename_all = "snake_case")]
pub struct KaffpaeArgs {
    /// Path to the graph file to partition
    pub file: PathBuf,
    /// Number of blocks to partition the graph into
    #[arg(long)]
    pub k: usize,
    /// Seed for the random number generator
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Preconfiguration to use
    #[arg(long, value_enum, default_value = "strong")]
    pub preconfiguration: Variant,
    /// Allowed imbalance in percent
    #[arg(long, default_value_t = 3.0)]
    pub imbalance: f64,
    /// Time limit in seconds; 0 only creates the initial population
    #[arg(long, default_value_t = 0.0)]
    pub time_limit: f64,
    /// Workers create a few partitions each and share them
    #[arg(long)]
    pub mh_enable_quickstart: bool,
    /// Optimize the maximum communication volume instead of the cut
    #[arg(long)]
    pub mh_optimize_communication_volume: bool,
    /// Not supported
    #[arg(long = "mh_enable_kabapE")]
    pub mh_enable_kabap_e: bool,
    /// Not supported
    #[arg(long)]
    pub mh_enable_tabu_search: bool,
    /// Extra imbalance allowed inside mutation
    #[arg(long = "kabaE_internal_bal", default_value_t = 0.01)]
    pub kabae_internal_bal: f64,
    /// Partition to improve
    #[arg(long)]
    pub input_partition: Option<PathBuf>,
    /// Balance node weight plus incident edge weight
    #[arg(long)]
    pub balance_edges: bool,
    /// Output file [default: tmppartition<k>]
    #[arg(long)]
    pub output_filename: Option<PathBuf>,
    /// Number of worker threads
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

/// Computes a k-way node separator from a k-way partition.
#[derive(Debug, Parser)]
#[command(name = "partition_to_vertex_separator", rename_all = "snake_case")]
pub struct SeparatorArgs {
    /// Path to the graph file
    pub file: PathBuf,
    /// Number of blocks of the input partition
    #[arg(long)]
    pub k: usize,
    /// Partition to derive the separator from
    #[arg(long)]
    pub input_partition: PathBuf,
    /// Seed for the random number generator
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file
    #[arg(long, default_value = DEFAULT_SEPARATOR_FILENAME)]
    pub output_filename: PathBuf,
}

/// Size-constrained label propagation clustering.
#[derive(Debug, Parser)]
#[command(name = "label_propagation", rename_all = "snake_case")]
pub struct LabelPropagationArgs {
    /// Path to the graph file
    pub file: PathBuf,
    /// Maximum weight of a cluster [default: unbounded]
    #[arg(long)]
    pub cluster_upperbound: Option<u64>,
    /// Number of label propagation sweeps
    #[arg(long, default_value_t = 10)]
    pub label_propagation_iterations: usize,
    /// Seed for the random number generator
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file
    #[arg(long, default_value = DEFAULT_CLUSTERING_FILENAME)]
    pub output_filename: PathBuf,
}

/// Checks whether a graph file is valid.
#[derive(Debug, Parser)]
#[command(name = "graphchecker")]
pub struct GraphcheckerArgs {
    /// Path to the graph file
    pub file: PathBuf,
}

/// Parses arguments; on `--help` or a usage error returns the exit code.
fn parse<P: Parser>(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write) -> Result<P, i32> {
    P::try_parse_from(args).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = write!(out, "{}", e.render());
            0
        }
        _ => {
            eprint!("{}", e.render());
            2
        }
    })
}

fn fail(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    1
}

fn check_k(k: usize) -> Result<(), i32> {
    if k == 0 {
        Err(fail("--k must be at least 1"))
    } else {
        Ok(())
    }
}

fn metrics_line(out: &mut dyn Write, g: &Graph, p: &Partition, spec: &BalanceSpec, start: Instant) -> i32 {
    let report = check_balance(g, p, spec);
    let _ = writeln!(
        out,
        "cut={} balance={:.6} time={:.3}",
        report.edge_cut,
        report.balance,
        start.elapsed().as_secs_f64()
    );
    0
}

fn load_input(path: &Option<PathBuf>, g: &Graph, k: usize) -> Result<Option<Partition>, i32> {
    match path {
        Some(path) => read_partition_file(path, g, k)
            .map(Some)
            .map_err(|e| fail(format!("{}: {e}", path.display()))),
        None => Ok(None),
    }
}

fn load_graph(path: &PathBuf) -> Result<Graph, i32> {
    read_graph_file(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

pub fn kaffpa_main(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write) -> i32 {
    let args: KaffpaArgs = match parse(args, out) {
        Ok(a) => a,
        Err(code) => return code,
    };
    match run_kaffpa(&args, out) {
        Ok(code) | Err(code) => code,
    }
}

fn run_kaffpa(args: &KaffpaArgs, out: &mut dyn Write) -> Result<i32, i32> {
    let start = Instant::now();
    check_k(args.k)?;
    let g = load_graph(&args.file)?;
    if args.enforce_balance && g.node_weights().windows(2).any(|w| w[0] != w[1]) {
        return Err(fail(
            "--enforce_balance is only supported on graphs without node weights",
        ));
    }
    let spec = BalanceSpec::new(&g, args.k, args.imbalance / 100.0, args.balance_edges);
    let input = load_input(&args.input_partition, &g, args.k)?;
    let mut rng = seeded(args.seed);
    let mut p = iterated_cycles(
        &g,
        &spec,
        args.preconfiguration.into(),
        &mut rng,
        args.time_limit,
        input.as_ref(),
    )
    .map_err(fail)?;
    if args.enforce_balance {
        p = enforced(&g, p, &spec).map_err(fail)?;
    }
    let path = args
        .output_filename
        .clone()
        .unwrap_or_else(|| default_partition_filename(args.k).into());
    write_partition_file(&p, &path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    Ok(metrics_line(out, &g, &p, &spec, start))
}

/// Applies the balance guarantee under the weight model of `spec`.
fn enforced(g: &Graph, p: Partition, spec: &BalanceSpec) -> gpart::Result<Partition> {
    let k = p.k();
    let (work, work_spec) = if spec.balance_edges {
        let work = g.with_edge_balanced_weights();
        let work_spec = BalanceSpec::from_total(work.total_node_weight(), spec.k, spec.epsilon);
        (work, work_spec)
    } else {
        (g.clone(), *spec)
    };
    let mut q = Partition::new(&work, k, p.into_assignment())?;
    enforce_balance(&work, &mut q, &work_spec)?;
    Partition::new(g, k, q.into_assignment())
}

pub fn kaffpae_main(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write) -> i32 {
    let args: KaffpaeArgs = match parse(args, out) {
        Ok(a) => a,
        Err(code) => return code,
    };
    match run_kaffpae(&args, out) {
        Ok(code) | Err(code) => code,
    }
}

fn run_kaffpae(args: &KaffpaeArgs, out: &mut dyn Write) -> Result<i32, i32> {
    let start = Instant::now();
    if args.mh_enable_kabap_e {
        return Err(fail(
            "--mh_enable_kabapE is not supported (see README, Unsupported options)",
        ));
    }
    if args.mh_enable_tabu_search {
        return Err(fail(
            "--mh_enable_tabu_search is not supported (see README, Unsupported options)",
        ));
    }
    check_k(args.k)?;
    if args.workers == 0 {
        return Err(fail("--workers must be at least 1"));
    }
    let g = load_graph(&args.file)?;
    let spec = BalanceSpec::new(&g, args.k, args.imbalance / 100.0, args.balance_edges);
    let input = load_input(&args.input_partition, &g, args.k)?;
    let opts = EvolveOptions {
        workers: args.workers,
        time_limit: args.time_limit,
        quickstart: args.mh_enable_quickstart,
        objective: if args.mh_optimize_communication_volume {
            Objective::CommVolume
        } else {
            Objective::Cut
        },
        internal_bal: args.kabae_internal_bal,
        ..EvolveOptions::default()
    };
    let mut rng = seeded(args.seed);
    let report = evolve(&g, &spec, args.preconfiguration.into(), &opts, input.as_ref(), &mut rng).map_err(fail)?;
    let p = report.best.partition;
    let path = args
        .output_filename
        .clone()
        .unwrap_or_else(|| default_partition_filename(args.k).into());
    write_partition_file(&p, &path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    Ok(metrics_line(out, &g, &p, &spec, start))
}

pub fn separator_main(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write) -> i32 {
    let args: SeparatorArgs = match parse(args, out) {
        Ok(a) => a,
        Err(code) => return code,
    };
    let mut run = || -> Result<i32, i32> {
        check_k(args.k)?;
        let g = load_graph(&args.file)?;
        let p = read_partition_file(&args.input_partition, &g, args.k)
            .map_err(|e| fail(format!("{}: {e}", args.input_partition.display())))?;
        let s = kway_separator(&g, &p);
        write_separator_file(p.assignment(), &s.separator, args.k, &args.output_filename)
            .map_err(|e| fail(format!("{}: {e}", args.output_filename.display())))?;
        let _ = writeln!(out, "separator_size={}", s.size());
        Ok(0)
    };
    match run() {
        Ok(code) | Err(code) => code,
    }
}

pub fn label_propagation_main(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write) -> i32 {
    let args: LabelPropagationArgs = match parse(args, out) {
        Ok(a) => a,
        Err(code) => return code,
    };
    let mut run = || -> Result<i32, i32> {
        let g = load_graph(&args.file)?;
        let mut rng = seeded(args.seed);
        let c = label_propagation_clustering(&g, args.cluster_upperbound, args.label_propagation_iterations, &mut rng);
        write_clustering_file(&c.cluster_of, &args.output_filename)
            .map_err(|e| fail(format!("{}: {e}", args.output_filename.display())))?;
        let _ = writeln!(out, "clusters={}", c.num_clusters());
        Ok(0)
    };
    match run() {
        Ok(code) | Err(code) => code,
    }
}

pub fn graphchecker_main(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write) -> i32 {
    let args: GraphcheckerArgs = match parse(args, out) {
        Ok(a) => a,
        Err(code) => return code,
    };
    let file = match std::fs::File::open(&args.file) {
        Ok(f) => f,
        Err(e) => return fail(format!("{}: {e}", args.file.display())),
    };
    let (header, raw) = match parse_raw_graph(file) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(out, "{e}");
            return 1;
        }
    };
    let verdict = raw.validate(Some(header.n), Some(header.m));
    let _ = writeln!(out, "{verdict}");
    if verdict.is_ok() {
        0
    } else {
        1
    }
}
