//! Simple directed graph with constant-time edge membership.

use rustc_hash::FxHashSet;

/// Node identifier. Nodes are dense integers `0..n`.
pub type NodeId = u32;

#[inline]
fn key(u: NodeId, v: NodeId) -> u64 {
    (u64::from(u) << 32) | u64::from(v)
}

/// A directed graph without self-loops or parallel edges.
///
/// Reciprocal (mutual) connections are stored as two opposite directed edges.
#[derive(Debug, Clone, Default)]
pub struct DirectedGraph {
    out: Vec<Vec<NodeId>>,
    index: FxHashSet<u64>,
}

impl DirectedGraph {
    pub fn new(n: usize) -> Self {
        assert!(n <= NodeId::MAX as usize, "node count {n} exceeds u32 ids");
        Self {
            out: vec![Vec::new(); n],
            index: FxHashSet::default(),
        }
    }

    pub fn with_edge_capacity(n: usize, edges: usize) -> Self {
        let mut g = Self::new(n);
        g.index.reserve(edges);
        g
    }

    /// Builds a graph from an edge iterator, silently skipping self-loops and duplicates.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g.sort_adjacency();
        g
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.index.len()
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.index.contains(&key(u, v))
    }

    /// Inserts `u -> v`. Returns `false` (and leaves the graph untouched) for
    /// self-loops and edges that already exist.
    #[inline]
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        if u == v || !self.index.insert(key(u, v)) {
            return false;
        }
        self.out[u as usize].push(v);
        true
    }

    /// Inserts both `u -> v` and `v -> u`. Only succeeds if neither exists.
    pub fn add_reciprocal(&mut self, u: NodeId, v: NodeId) -> bool {
        if u == v || self.has_edge(u, v) || self.has_edge(v, u) {
            return false;
        }
        self.add_edge(u, v);
        self.add_edge(v, u);
        true
    }

    #[inline]
    pub fn out_neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.out[u as usize]
    }

    #[inline]
    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out[u as usize].len()
    }

    pub fn in_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.node_count()];
        for targets in &self.out {
            for &v in targets {
                deg[v as usize] += 1;
            }
        }
        deg
    }

    /// Sorts every out-neighbor list so that iteration order depends only on the edge set.
    pub fn sort_adjacency(&mut self) {
        for targets in &mut self.out {
            targets.sort_unstable();
        }
    }

    /// All edges, grouped by source in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, targets)| targets.iter().map(move |&v| (u as NodeId, v)))
    }

    /// Returns the graph with every node `u` renamed to `perm[u]`.
    pub fn relabel(&self, perm: &[NodeId]) -> Self {
        assert_eq!(perm.len(), self.node_count());
        Self::from_edges(
            self.node_count(),
            self.edges().map(|(u, v)| (perm[u as usize], perm[v as usize])),
        )
    }
}

impl PartialEq for DirectedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.node_count() == other.node_count() && self.index == other.index
    }
}

impl Eq for DirectedGraph {}
