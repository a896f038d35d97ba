//! Local clustering on the undirected projection.

use crate::graph::{DirectedGraph, NodeId};

/// Sorted, deduplicated undirected neighbor lists (union of in- and out-neighbors).
pub fn undirected_neighbors(graph: &DirectedGraph) -> Vec<Vec<NodeId>> {
    let mut adj: Vec<Vec<NodeId>> = (0..graph.node_count() as NodeId)
        .map(|u| graph.out_neighbors(u).to_vec())
        .collect();
    for (u, v) in graph.edges() {
        if !graph.has_edge(v, u) {
            adj[v as usize].push(u);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Number of triangles through every node, by the forward algorithm: edges are
/// oriented from lower to higher (degree, id) rank and each triangle is found
/// exactly once from its lowest-ranked corner.
pub fn triangles_per_node(adj: &[Vec<NodeId>]) -> Vec<u64> {
    let n = adj.len();
    let rank_key = |v: usize| (adj[v].len(), v);
    let forward: Vec<Vec<NodeId>> = (0..n)
        .map(|u| {
            adj[u]
                .iter()
                .copied()
                .filter(|&v| rank_key(v as usize) > rank_key(u))
                .collect()
        })
        .collect();
    let mut triangles = vec![0u64; n];
    let mut mark = vec![u32::MAX; n];
    for u in 0..n {
        for &v in &forward[u] {
            mark[v as usize] = u as u32;
        }
        for &v in &forward[u] {
            for &w in &forward[v as usize] {
                if mark[w as usize] == u as u32 {
                    triangles[u] += 1;
                    triangles[v as usize] += 1;
                    triangles[w as usize] += 1;
                }
            }
        }
    }
    triangles
}

/// Local clustering coefficient of every node; degree below two gives 0.
pub fn local_clustering(graph: &DirectedGraph) -> Vec<f64> {
    let adj = undirected_neighbors(graph);
    let triangles = triangles_per_node(&adj);
    adj.iter()
        .zip(&triangles)
        .map(|(nbrs, &t)| {
            let d = nbrs.len() as f64;
            if nbrs.len() < 2 {
                0.0
            } else {
                2.0 * t as f64 / (d * (d - 1.0))
            }
        })
        .collect()
}

/// Mean local clustering coefficient over `nodes` (0 for an empty set).
pub fn average_clustering(graph: &DirectedGraph, nodes: &[NodeId]) -> f64 {
    if nodes.is_empty() {
        return 0.0;
    }
    let local = local_clustering(graph);
    nodes.iter().map(|&v| local[v as usize]).sum::<f64>() / nodes.len() as f64
}
