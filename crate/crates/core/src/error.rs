use std::io;

use thiserror::Error;

use crate::graph::StructuralError;

/// Errors produced by the partitioning library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    Structural(#[from] StructuralError),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("value {value} on line {line} is outside the block range 0..{k}")]
    Range { line: usize, value: u64, k: usize },

    #[error("expected {expected} entries but found {found}")]
    Length { expected: usize, found: usize },

    #[error("node {node} is assigned to block {block}, but k = {k}")]
    BlockOutOfRange { node: usize, block: usize, k: usize },

    #[error("invalid clustering: {0}")]
    InvalidClustering(String),

    #[error("node {node} has weight {weight}, which exceeds the block limit {l_max}")]
    InfeasibleInstance { node: usize, weight: u64, l_max: u64 },

    #[error("blocks {a} and {b} share no cut edge")]
    EmptyBoundary { a: usize, b: usize },

    #[error("balance enforcement requires uniform node weights")]
    WeightedGraphUnsupported,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
