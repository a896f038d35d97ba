//! Shortest-path statistics (ASPL, diameter) inside a node set.
//!
//! Distances are computed with a bit-parallel BFS that advances 64 sources at
//! once: each node keeps a 64-bit mask of the sources that have reached it,
//! and a level is one pass over the reverse adjacency.

use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use crate::graph::{DirectedGraph, NodeId};

/// Compressed adjacency over local ids `0..len`.
#[derive(Debug, Clone)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    fn from_lists(n: usize, mut lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        offsets.push(0);
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }
}

/// How distances inside the node set are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathMode {
    /// Follow edge directions; unreachable ordered pairs are skipped.
    #[default]
    Directed,
    /// Ignore edge directions.
    Undirected,
}

/// Forward and reverse adjacency of the subgraph induced by `nodes`, relabelled
/// to local ids in the order of `nodes`.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub forward: Csr,
    pub reverse: Csr,
}

impl InducedSubgraph {
    pub fn new(graph: &DirectedGraph, nodes: &[NodeId], mode: PathMode) -> Self {
        let mut local = vec![u32::MAX; graph.node_count()];
        for (i, &v) in nodes.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let k = nodes.len();
        let mut fwd = vec![Vec::new(); k];
        let mut rev = vec![Vec::new(); k];
        for (i, &u) in nodes.iter().enumerate() {
            for &v in graph.out_neighbors(u) {
                let j = local[v as usize];
                if j == u32::MAX {
                    continue;
                }
                fwd[i].push(j);
                rev[j as usize].push(i as u32);
                if mode == PathMode::Undirected {
                    fwd[j as usize].push(i as u32);
                    rev[i].push(j);
                }
            }
        }
        Self {
            forward: Csr::from_lists(k, fwd),
            reverse: Csr::from_lists(k, rev),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct BatchTotals {
    distance_sum: u64,
    pairs: u64,
    max_distance: u32,
}

impl BatchTotals {
    fn merge(self, other: Self) -> Self {
        Self {
            distance_sum: self.distance_sum + other.distance_sum,
            pairs: self.pairs + other.pairs,
            max_distance: self.max_distance.max(other.max_distance),
        }
    }
}

/// BFS from up to 64 sources at once, pulling frontiers along reverse edges.
fn bfs_batch(sub: &InducedSubgraph, sources: &[u32]) -> BatchTotals {
    debug_assert!(!sources.is_empty() && sources.len() <= 64);
    let n = sub.len();
    let full: u64 = if sources.len() == 64 {
        u64::MAX
    } else {
        (1u64 << sources.len()) - 1
    };
    let mut visited = vec![0u64; n];
    let mut frontier = vec![0u64; n];
    let mut next = vec![0u64; n];
    for (bit, &s) in sources.iter().enumerate() {
        visited[s as usize] |= 1 << bit;
        frontier[s as usize] |= 1 << bit;
    }
    let mut totals = BatchTotals::default();
    let mut level = 0u32;
    loop {
        level += 1;
        let mut advanced = false;
        for v in 0..n {
            let seen = visited[v];
            if seen == full {
                next[v] = 0;
                continue;
            }
            let mut acc = 0u64;
            for &u in sub.reverse.neighbors(v) {
                acc |= frontier[u as usize];
            }
            let fresh = acc & !seen;
            next[v] = fresh;
            if fresh != 0 {
                visited[v] = seen | fresh;
                let c = u64::from(fresh.count_ones());
                totals.pairs += c;
                totals.distance_sum += c * u64::from(level);
                advanced = true;
            }
        }
        if !advanced {
            break;
        }
        totals.max_distance = level;
        std::mem::swap(&mut frontier, &mut next);
    }
    totals
}

/// Plain BFS over one adjacency; returns (farthest node, its distance).
fn farthest(adj: &Csr, source: usize) -> (usize, u32) {
    let mut dist = vec![u32::MAX; adj.len()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    let mut best = (source, 0);
    while let Some(u) = queue.pop_front() {
        let d = dist[u];
        if d > best.1 {
            best = (u, d);
        }
        for &w in adj.neighbors(u) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = d + 1;
                queue.push_back(w as usize);
            }
        }
    }
    best
}

/// Knobs for [`path_stats`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOptions {
    pub mode: PathMode,
    /// Node sets up to this size use every node as a BFS source.
    pub exact_threshold: usize,
    /// Number of sampled sources above the threshold.
    pub sample_sources: usize,
    /// Extra double sweeps used to tighten the sampled diameter bound.
    pub double_sweeps: usize,
    pub force_exact: bool,
    pub seed: u64,
}

pub const DEFAULT_EXACT_THRESHOLD: usize = 20_000;
pub const DEFAULT_SAMPLE_SOURCES: usize = 4_000;

impl Default for PathOptions {
    fn default() -> Self {
        Self {
            mode: PathMode::Directed,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            sample_sources: DEFAULT_SAMPLE_SOURCES,
            double_sweeps: 16,
            force_exact: false,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStats {
    /// Mean distance over reachable ordered pairs (0 if there are none).
    pub aspl: f64,
    /// Exact diameter, or a lower bound when `exact` is false.
    pub diameter: u32,
    pub reachable_pairs: u64,
    pub sources: usize,
    pub exact: bool,
}

/// Average shortest path length and diameter over reachable ordered pairs of
/// distinct nodes inside `nodes`. Paths may only pass through `nodes`; for a
/// weakly connected component that is no restriction.
pub fn path_stats(graph: &DirectedGraph, nodes: &[NodeId], opts: &PathOptions) -> PathStats {
    let sub = InducedSubgraph::new(graph, nodes, opts.mode);
    path_stats_induced(&sub, opts)
}

pub fn path_stats_induced(sub: &InducedSubgraph, opts: &PathOptions) -> PathStats {
    let n = sub.len();
    let exact = opts.force_exact || n <= opts.exact_threshold || opts.sample_sources >= n;
    let mut rng = crate::seeded_rng(opts.seed);
    let sources: Vec<u32> = if exact {
        (0..n as u32).collect()
    } else {
        let mut s: Vec<u32> = sample(&mut rng, n, opts.sample_sources)
            .into_iter()
            .map(|i| i as u32)
            .collect();
        s.sort_unstable();
        s
    };
    let totals = sources
        .par_chunks(64)
        .map(|batch| bfs_batch(sub, batch))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(BatchTotals::default(), BatchTotals::merge);

    let mut diameter = totals.max_distance;
    if !exact && n > 0 {
        for _ in 0..opts.double_sweeps {
            let start = rng.random_range(0..n);
            let (a, d1) = farthest(&sub.forward, start);
            let (b, d2) = farthest(&sub.reverse, a);
            let (_, d3) = farthest(&sub.forward, b);
            diameter = diameter.max(d1).max(d2).max(d3);
        }
    }
    let aspl = if totals.pairs == 0 {
        0.0
    } else {
        totals.distance_sum as f64 / totals.pairs as f64
    };
    PathStats {
        aspl,
        diameter,
        reachable_pairs: totals.pairs,
        sources: sources.len(),
        exact,
    }
}

/// Exact directed ASPL over reachable pairs inside `nodes`.
pub fn aspl(graph: &DirectedGraph, nodes: &[NodeId]) -> f64 {
    let opts = PathOptions {
        force_exact: true,
        ..PathOptions::default()
    };
    path_stats(graph, nodes, &opts).aspl
}

/// Exact directed diameter over reachable pairs inside `nodes`.
pub fn diameter(graph: &DirectedGraph, nodes: &[NodeId]) -> u32 {
    let opts = PathOptions {
        force_exact: true,
        ..PathOptions::default()
    };
    path_stats(graph, nodes, &opts).diameter
}
