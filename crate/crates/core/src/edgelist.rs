//! Plain edge-list files: one `source<TAB>target` line per directed edge,
//! 0-based ids, no header.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

/// Writes edges in adjacency order (sorted if the graph's adjacency is sorted).
pub fn write_edges<W: Write>(graph: &DirectedGraph, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::with_capacity(1 << 16, out);
    for (u, v) in graph.edges() {
        writeln!(out, "{u}\t{v}")?;
    }
    out.flush()
}

pub fn write_edge_list(graph: &DirectedGraph, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_edges(graph, file).map_err(|e| Error::io(path, e))
}

/// Reads an edge list. Tokens may be separated by any whitespace. The node
/// count is one more than the largest id, or `min_nodes` if that is larger.
pub fn read_edges<R: BufRead>(input: R, path: &Path, min_nodes: usize) -> Result<DirectedGraph> {
    let mut edges = Vec::new();
    let mut seen = FxHashSet::default();
    let mut max_id: Option<NodeId> = None;
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let fail = |reason: String| Error::EdgeList {
            path: path.to_path_buf(),
            line: line_no,
            reason,
        };
        let mut tokens = line.split_whitespace();
        let (u, v) = match (tokens.next(), tokens.next(), tokens.next()) {
            (None, _, _) => continue,
            (Some(a), Some(b), None) => (parse_id(a).map_err(&fail)?, parse_id(b).map_err(&fail)?),
            _ => return Err(fail(format!("expected two node ids, got {line:?}"))),
        };
        if u == v {
            return Err(fail(format!("self-loop on node {u}")));
        }
        if !seen.insert((u64::from(u) << 32) | u64::from(v)) {
            return Err(fail(format!("duplicate edge {u} -> {v}")));
        }
        max_id = max_id.max(Some(u.max(v)));
        edges.push((u, v));
    }
    let n = max_id.map_or(0, |m| m as usize + 1).max(min_nodes);
    Ok(DirectedGraph::from_edges(n, edges))
}

pub fn read_edge_list(path: &Path) -> Result<DirectedGraph> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_edges(BufReader::new(file), path, 0)
}

fn parse_id(token: &str) -> std::result::Result<NodeId, String> {
    token
        .parse::<NodeId>()
        .map_err(|_| format!("{token:?} is not a node id"))
}
