//! Text formats: the METIS-style graph format and the one-integer-per-line
//! partition, separator and clustering files.
//!
//! Graph files start with a header `n m [f]` followed by one line per vertex.
//! Vertex ids in the file are 1-based; lines starting with `%` are comments
//! and may appear anywhere. The format code `f` selects the line layout:
//!
//! | f        | vertex line                 |
//! |----------|-----------------------------|
//! | absent/0 | `v1 v2 ...`                 |
//! | 1        | `v1 w1 v2 w2 ...`           |
//! | 10       | `c v1 v2 ...`               |
//! | 11       | `c v1 w1 v2 w2 ...`         |

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Partition, RawGraph, StructuralError, Weight};

pub const DEFAULT_SEPARATOR_FILENAME: &str = "tmpseparator";
pub const DEFAULT_CLUSTERING_FILENAME: &str = "tmpclustering";

/// `tmppartition<k>`.
pub fn default_partition_filename(k: usize) -> String {
    format!("tmppartition{k}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphFileHeader {
    pub n: usize,
    pub m: usize,
    /// Format code as written; `None` when omitted.
    pub format: Option<u32>,
}

impl GraphFileHeader {
    pub fn has_node_weights(&self) -> bool {
        matches!(self.format, Some(10) | Some(11))
    }

    pub fn has_edge_weights(&self) -> bool {
        matches!(self.format, Some(1) | Some(11))
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

fn is_comment(line: &str) -> bool {
    line.trim_start().starts_with('%')
}

/// Parses a graph file without structural validation.
///
/// The returned raw graph has one node per vertex line actually present, so
/// a file with too few or too many lines yields a node count that differs
/// from the header. Neighbor ids beyond `n` are kept (shifted to 0-based) and
/// reported later by validation.
pub fn parse_raw_graph<R: Read>(reader: R) -> Result<(GraphFileHeader, RawGraph)> {
    let reader = BufReader::new(reader);
    let mut header: Option<GraphFileHeader> = None;
    let mut raw = RawGraph {
        xadj: vec![0],
        ..RawGraph::default()
    };
    let mut pending_blank = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if is_comment(&line) {
            continue;
        }
        let Some(h) = header else {
            if line.trim().is_empty() {
                continue;
            }
            header = Some(parse_header(&line, lineno)?);
            continue;
        };

        if line.trim().is_empty() {
            // Blank lines are isolated vertices unless they trail the file.
            pending_blank += 1;
            continue;
        }
        for _ in 0..pending_blank {
            push_vertex_line(&mut raw, &h, "", lineno)?;
        }
        pending_blank = 0;
        push_vertex_line(&mut raw, &h, &line, lineno)?;
    }

    let Some(h) = header else {
        return Err(parse_err(0, "missing header line"));
    };
    // Trailing blank lines only count as vertices while vertices are missing.
    while pending_blank > 0 && raw.n() < h.n {
        push_vertex_line(&mut raw, &h, "", 0)?;
        pending_blank -= 1;
    }
    Ok((h, raw))
}

fn parse_header(line: &str, lineno: usize) -> Result<GraphFileHeader> {
    let toks: Vec<&str> = line.split_ascii_whitespace().collect();
    if toks.len() < 2 || toks.len() > 3 {
        return Err(parse_err(
            lineno,
            format!("header must be 'n m [f]', found {} fields", toks.len()),
        ));
    }
    let n = parse_num(toks[0], lineno, "node count")?;
    let m = parse_num(toks[1], lineno, "edge count")?;
    let format = match toks.get(2) {
        None => None,
        Some(t) => {
            let f: u32 = parse_num(t, lineno, "format code")?;
            if !matches!(f, 0 | 1 | 10 | 11) {
                return Err(parse_err(lineno, format!("unsupported format code {f}")));
            }
            Some(f)
        }
    };
    Ok(GraphFileHeader { n, m, format })
}

fn push_vertex_line(raw: &mut RawGraph, h: &GraphFileHeader, line: &str, lineno: usize) -> Result<()> {
    let mut toks = line.split_ascii_whitespace();
    let node_weight = if h.has_node_weights() {
        let t = toks.next().ok_or_else(|| parse_err(lineno, "missing node weight"))?;
        parse_num::<Weight>(t, lineno, "node weight")?
    } else {
        1
    };
    raw.node_weight.push(node_weight);
    let with_weights = h.has_edge_weights();
    while let Some(t) = toks.next() {
        let target: usize = parse_num(t, lineno, "vertex id")?;
        if target == 0 {
            return Err(parse_err(lineno, "vertex ids start at 1"));
        }
        let w = if with_weights {
            let wt = toks
                .next()
                .ok_or_else(|| parse_err(lineno, format!("missing weight for edge to {target}")))?;
            parse_num::<Weight>(wt, lineno, "edge weight")?
        } else {
            1
        };
        raw.adjncy.push(target - 1);
        raw.edge_weight.push(w);
    }
    raw.xadj.push(raw.adjncy.len());
    Ok(())
}

/// Parses and validates a graph, including the declared node and edge counts.
pub fn parse_graph<R: Read>(reader: R) -> Result<Graph> {
    let (header, raw) = parse_raw_graph(reader)?;
    if raw.n() != header.n {
        return Err(StructuralError::NodeCountMismatch {
            declared: header.n,
            found: raw.n(),
        }
        .into());
    }
    let g = raw.into_graph()?;
    if g.m() != header.m {
        return Err(StructuralError::EdgeCountMismatch {
            declared: header.m,
            found: g.m(),
        }
        .into());
    }
    Ok(g)
}

pub fn read_graph_file(path: impl AsRef<Path>) -> Result<Graph> {
    parse_graph(File::open(path)?)
}

/// Renders `g` in the graph format; weights are written only when not unit.
pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    let nw = !g.has_unit_node_weights();
    let ew = !g.has_unit_edge_weights();
    match (nw, ew) {
        (false, false) => writeln!(out, "{} {}", g.n(), g.m())?,
        (false, true) => writeln!(out, "{} {} 1", g.n(), g.m())?,
        (true, false) => writeln!(out, "{} {} 10", g.n(), g.m())?,
        (true, true) => writeln!(out, "{} {} 11", g.n(), g.m())?,
    }
    for v in 0..g.n() {
        let mut fields: Vec<String> = Vec::new();
        if nw {
            fields.push(g.node_weight(v).to_string());
        }
        for (u, w) in g.neighbors(v) {
            fields.push((u + 1).to_string());
            if ew {
                fields.push(w.to_string());
            }
        }
        writeln!(out, "{}", fields.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

fn write_ids<W: Write>(ids: impl Iterator<Item = usize>, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    for id in ids {
        writeln!(out, "{id}")?;
    }
    out.flush()?;
    Ok(())
}

/// One block id per line.
pub fn write_partition<W: Write>(p: &Partition, out: W) -> Result<()> {
    write_ids(p.assignment().iter().copied(), out)
}

pub fn write_partition_file(p: &Partition, path: impl AsRef<Path>) -> Result<()> {
    write_partition(p, File::create(path)?)
}

/// Reads `n` block ids in `0..k`. Blank lines are ignored.
pub fn read_assignment<R: Read>(reader: R, n: usize, k: usize) -> Result<Vec<usize>> {
    let reader = BufReader::new(reader);
    let mut out = Vec::with_capacity(n);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let value: u64 = parse_num(t, idx + 1, "block id")?;
        if value >= k as u64 {
            return Err(Error::Range {
                line: idx + 1,
                value,
                k,
            });
        }
        out.push(value as usize);
    }
    if out.len() != n {
        return Err(Error::Length {
            expected: n,
            found: out.len(),
        });
    }
    Ok(out)
}

pub fn read_partition<R: Read>(reader: R, g: &Graph, k: usize) -> Result<Partition> {
    let assignment = read_assignment(reader, g.n(), k)?;
    Partition::new(g, k, assignment)
}

pub fn read_partition_file(path: impl AsRef<Path>, g: &Graph, k: usize) -> Result<Partition> {
    read_partition(File::open(path)?, g, k)
}

/// Partition format where separator nodes carry block id `k`.
pub fn write_separator<W: Write>(blocks: &[usize], separator: &[NodeId], k: usize, out: W) -> Result<()> {
    let mut ids = blocks.to_vec();
    for &v in separator {
        ids[v] = k;
    }
    write_ids(ids.into_iter(), out)
}

pub fn write_separator_file(blocks: &[usize], separator: &[NodeId], k: usize, path: impl AsRef<Path>) -> Result<()> {
    write_separator(blocks, separator, k, File::create(path)?)
}

pub fn write_clustering<W: Write>(cluster_of: &[usize], out: W) -> Result<()> {
    write_ids(cluster_of.iter().copied(), out)
}

pub fn write_clustering_file(cluster_of: &[usize], path: impl AsRef<Path>) -> Result<()> {
    write_clustering(cluster_of, File::create(path)?)
}
