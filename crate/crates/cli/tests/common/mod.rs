#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn bin(name: &str) -> PathBuf {
    match name {
        "kaffpa" => env!("CARGO_BIN_EXE_kaffpa").into(),
        "kaffpae" => env!("CARGO_BIN_EXE_kaffpae").into(),
        "partition_to_vertex_separator" => env!("CARGO_BIN_EXE_partition_to_vertex_separator").into(),
        "label_propagation" => env!("CARGO_BIN_EXE_label_propagation").into(),
        "graphchecker" => env!("CARGO_BIN_EXE_graphchecker").into(),
        other => panic!("unknown program {other}"),
    }
}

/// Runs a program with `dir` as working directory.
pub fn run_in(dir: &Path, program: &str, args: &[&str]) -> Output {
    Command::new(bin(program))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("program starts")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Value of `key=` in a metrics line.
pub fn metric(line: &str, key: &str) -> String {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {line:?}"))
        .to_string()
}

/// Invalid fixtures and the diagnostic each must produce.
pub const INVALID_CORPUS: [(&str, &str); 10] = [
    ("self_loop.graph", "self-loop"),
    ("self_loop_weighted.graph", "self-loop"),
    ("parallel_edge.graph", "parallel edge"),
    ("missing_backward_edge.graph", "backward edge is missing"),
    ("weight_mismatch.graph", "different weights"),
    ("edge_count_mismatch.graph", "edge count mismatch"),
    ("too_few_vertices.graph", "node count mismatch"),
    ("too_many_vertices.graph", "node count mismatch"),
    ("neighbor_out_of_range.graph", "out of range"),
    ("zero_edge_weight.graph", "non-positive weight"),
];

pub const VALID_CORPUS: [&str; 4] = [
    "five_nodes.graph",
    "weighted_path.graph",
    "isolated_node.graph",
    "commented.graph",
];
