//! Topological summary of a directed graph: size, density, largest components,
//! path lengths, clustering and degree rank correlations.

mod clustering;
mod components;
mod paths;
mod spearman;

use std::time::Duration;

pub use clustering::{average_clustering, local_clustering, triangles_per_node, undirected_neighbors};
pub use components::{largest_scc, largest_wcc, scc_labels, wcc_labels};
pub use paths::{
    aspl, diameter, path_stats, path_stats_induced, Csr, InducedSubgraph, PathMode, PathOptions,
    PathStats, DEFAULT_EXACT_THRESHOLD, DEFAULT_SAMPLE_SOURCES,
};
pub use spearman::{average_ranks, spearman};

use serde::Serialize;

use crate::graph::{DirectedGraph, NodeId};
use crate::wiring::WiringStats;

/// Directed density `edges / (nodes (nodes - 1))`; 0 for fewer than two nodes.
pub fn density(nodes: usize, edges: usize) -> f64 {
    if nodes < 2 {
        return 0.0;
    }
    edges as f64 / (nodes as f64 * (nodes as f64 - 1.0))
}

/// Realized degrees of one node, with mutual pairs merged into reciprocal edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DegreeTriple {
    pub recip: u32,
    pub inn: u32,
    pub out: u32,
}

/// Reciprocal degree counts mutual neighbors; `inn`/`out` count only the
/// remaining one-directional edges.
pub fn realized_degrees(graph: &DirectedGraph) -> Vec<DegreeTriple> {
    let in_deg = graph.in_degrees();
    (0..graph.node_count() as NodeId)
        .map(|v| {
            let out = graph.out_neighbors(v);
            let recip = out.iter().filter(|&&u| graph.has_edge(u, v)).count() as u32;
            DegreeTriple {
                recip,
                inn: in_deg[v as usize] - recip,
                out: out.len() as u32 - recip,
            }
        })
        .collect()
}

/// Spearman correlations (reciprocal, in), (reciprocal, out), (in, out).
pub fn rank_correlations(triples: &[DegreeTriple]) -> [Option<f64>; 3] {
    let recip: Vec<u32> = triples.iter().map(|t| t.recip).collect();
    let inn: Vec<u32> = triples.iter().map(|t| t.inn).collect();
    let out: Vec<u32> = triples.iter().map(|t| t.out).collect();
    [spearman(&recip, &inn), spearman(&recip, &out), spearman(&inn, &out)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub paths: PathOptions,
    /// Also measure path lengths on the undirected projection.
    pub undirected_paths: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            paths: PathOptions::default(),
            undirected_paths: true,
        }
    }
}

/// Every quantity reported for one graph. Starred quantities are measured on
/// the largest weakly connected component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub lscc_size: usize,
    pub lwcc_size: usize,
    pub density_lwcc: f64,
    pub aspl_lwcc: f64,
    pub diameter_lwcc: u32,
    pub aspl_lwcc_undirected: Option<f64>,
    pub diameter_lwcc_undirected: Option<u32>,
    pub avg_cc_lwcc: f64,
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
    pub rho3: Option<f64>,
    pub generation_seconds: Option<f64>,
    pub path_mode: PathMode,
    pub paths_exact: bool,
    pub path_sources: usize,
    pub wiring: Option<WiringStats>,
}

/// Computes the full report. `stats` and `generation_time` come from the
/// generator and are simply carried along when present.
pub fn full_report(
    graph: &DirectedGraph,
    stats: Option<&WiringStats>,
    generation_time: Option<Duration>,
    opts: &AnalysisOptions,
) -> MetricsReport {
    let nodes = graph.node_count();
    let edges = graph.edge_count();
    let lscc = largest_scc(graph);
    let lwcc = largest_wcc(graph);
    // a weak component is closed under adjacency, so its edges are exactly
    // the out-edges of its nodes
    let lwcc_edges: usize = lwcc.iter().map(|&v| graph.out_degree(v)).sum();
    let paths = path_stats(graph, &lwcc, &opts.paths);
    let undirected = opts.undirected_paths.then(|| {
        let o = PathOptions {
            mode: PathMode::Undirected,
            ..opts.paths
        };
        path_stats(graph, &lwcc, &o)
    });
    let [rho1, rho2, rho3] = rank_correlations(&realized_degrees(graph));
    MetricsReport {
        nodes,
        edges,
        density: density(nodes, edges),
        lscc_size: lscc.len(),
        lwcc_size: lwcc.len(),
        density_lwcc: density(lwcc.len(), lwcc_edges),
        aspl_lwcc: paths.aspl,
        diameter_lwcc: paths.diameter,
        aspl_lwcc_undirected: undirected.map(|p| p.aspl),
        diameter_lwcc_undirected: undirected.map(|p| p.diameter),
        avg_cc_lwcc: average_clustering(graph, &lwcc),
        rho1,
        rho2,
        rho3,
        generation_seconds: generation_time.map(|t| t.as_secs_f64()),
        path_mode: opts.paths.mode,
        paths_exact: paths.exact,
        path_sources: paths.sources,
        wiring: stats.copied(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_examples() {
        assert!((density(459, 5_349) - 0.0254).abs() < 1e-4);
        assert!((density(100_000, 27_429_367) - 0.0027).abs() < 5e-5);
        assert_eq!(density(3, 6), 1.0);
    }

    #[test]
    fn empty_two_node_graph() {
        let g = DirectedGraph::new(2);
        let r = full_report(&g, None, None, &AnalysisOptions::default());
        assert_eq!(r.density, 0.0);
        assert_eq!(r.lscc_size, 1);
        assert_eq!(r.lwcc_size, 1);
        assert_eq!(r.avg_cc_lwcc, 0.0);
        assert_eq!(r.aspl_lwcc, 0.0);
        assert_eq!(r.rho1, None);
    }

    #[test]
    fn reciprocal_pair_report() {
        let g = DirectedGraph::from_edges(2, [(0, 1), (1, 0)]);
        let r = full_report(&g, None, None, &AnalysisOptions::default());
        assert_eq!(r.density, 1.0);
        assert_eq!(r.lscc_size, 2);
        assert_eq!(r.aspl_lwcc, 1.0);
        assert_eq!(r.diameter_lwcc, 1);
        assert_eq!(r.diameter_lwcc_undirected, Some(1));
    }

    #[test]
    fn realized_degrees_merge_mutual_pairs() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 0), (0, 2), (2, 1)]);
        let t = realized_degrees(&g);
        assert_eq!(t[0], DegreeTriple { recip: 1, inn: 0, out: 1 });
        assert_eq!(t[1], DegreeTriple { recip: 1, inn: 1, out: 0 });
        assert_eq!(t[2], DegreeTriple { recip: 0, inn: 1, out: 1 });
    }
}
