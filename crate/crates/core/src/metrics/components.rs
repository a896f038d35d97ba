//! Strongly and weakly connected components.

use crate::graph::{DirectedGraph, NodeId};

const UNVISITED: u32 = u32::MAX;

/// Component label per node (iterative Tarjan). Labels are dense, in the
/// order components are completed.
pub fn scc_labels(graph: &DirectedGraph) -> (Vec<u32>, usize) {
    let n = graph.node_count();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut label = vec![UNVISITED; n];
    let mut stack: Vec<NodeId> = Vec::new();
    // (node, next out-neighbor position)
    let mut call: Vec<(NodeId, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut components = 0usize;

    for root in 0..n as NodeId {
        if index[root as usize] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let neighbors = graph.out_neighbors(v);
            if *pos < neighbors.len() {
                let w = neighbors[*pos];
                *pos += 1;
                let wi = w as usize;
                if index[wi] == UNVISITED {
                    index[wi] = next_index;
                    low[wi] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    call.push((w, 0));
                } else if on_stack[wi] {
                    low[v as usize] = low[v as usize].min(index[wi]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    label[w as usize] = components as u32;
                    if w == v {
                        break;
                    }
                }
                components += 1;
            }
        }
    }
    (label, components)
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Component label per node of the underlying undirected graph.
pub fn wcc_labels(graph: &DirectedGraph) -> (Vec<u32>, usize) {
    let n = graph.node_count();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for (u, v) in graph.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b) as usize] = a.min(b);
        }
    }
    let mut label = vec![UNVISITED; n];
    let mut components = 0usize;
    for v in 0..n as u32 {
        let root = find(&mut parent, v) as usize;
        if label[root] == UNVISITED {
            label[root] = components as u32;
            components += 1;
        }
        label[v as usize] = label[root];
    }
    (label, components)
}

/// Nodes of the largest component, ascending. Among equally large components
/// the one with the smallest label wins.
fn largest(labels: &[u32], components: usize) -> Vec<NodeId> {
    if components == 0 {
        return Vec::new();
    }
    let mut sizes = vec![0usize; components];
    for &l in labels {
        sizes[l as usize] += 1;
    }
    let best = (0..components).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap_or(0);
    labels
        .iter()
        .enumerate()
        .filter(|&(_, &l)| l as usize == best)
        .map(|(v, _)| v as NodeId)
        .collect()
}

pub fn largest_scc(graph: &DirectedGraph) -> Vec<NodeId> {
    let (labels, count) = scc_labels(graph);
    largest(&labels, count)
}

pub fn largest_wcc(graph: &DirectedGraph) -> Vec<NodeId> {
    let (labels, count) = wcc_labels(graph);
    largest(&labels, count)
}
