//! Two-step stub wiring.
//!
//! Each iteration picks the node with the most remaining stubs (the hub),
//! connects it to uniformly chosen partners that still hold stubs, and then
//! randomly interconnects those new neighbors, favoring pairs with many
//! remaining stubs. The reciprocal phase creates mutual pairs; the
//! directed phase then joins out-stubs to in-stubs the same way.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::Rng;

use crate::degree_sampler::{sample_degree_sequences_with, DegreeSequences, GenConfig};
use crate::error::Result;
use crate::graph::{DirectedGraph, NodeId};

/// Consecutive rejected partner draws before the hub step switches to an
/// explicit eligible list.
const MAX_CONSECUTIVE_MISSES: usize = 20;

const NOT_LIVE: u32 = u32::MAX;

/// Remaining stubs per node for one side of a wiring phase.
///
/// Keeps the set of nodes with stubs left (for O(1) uniform sampling) and,
/// optionally, a degree-keyed bucket index for max-degree lookup.
#[derive(Debug, Clone)]
pub struct StubState {
    remaining: Vec<u32>,
    live: Vec<NodeId>,
    live_pos: Vec<u32>,
    buckets: Option<BTreeMap<u32, BTreeSet<NodeId>>>,
}

impl StubState {
    pub fn new(degrees: &[u32], track_max: bool) -> Self {
        let mut live = Vec::new();
        let mut live_pos = vec![NOT_LIVE; degrees.len()];
        let mut buckets = track_max.then(BTreeMap::<u32, BTreeSet<NodeId>>::new);
        for (i, &d) in degrees.iter().enumerate() {
            if d > 0 {
                live_pos[i] = live.len() as u32;
                live.push(i as NodeId);
                if let Some(b) = buckets.as_mut() {
                    b.entry(d).or_default().insert(i as NodeId);
                }
            }
        }
        Self {
            remaining: degrees.to_vec(),
            live,
            live_pos,
            buckets,
        }
    }

    #[inline]
    pub fn remaining(&self, node: NodeId) -> u32 {
        self.remaining[node as usize]
    }

    #[inline]
    pub fn live_count(&self) -> usize {
        self.live.len()
    }

    pub fn live(&self) -> &[NodeId] {
        &self.live
    }

    pub fn total_remaining(&self) -> u64 {
        self.remaining.iter().map(|&d| u64::from(d)).sum()
    }

    /// Lowest-index node among those with the most remaining stubs.
    pub fn max_node(&self) -> Option<NodeId> {
        match &self.buckets {
            Some(b) => b.last_key_value().and_then(|(_, nodes)| nodes.first().copied()),
            None => {
                let (best, d) = self
                    .remaining
                    .iter()
                    .enumerate()
                    .fold((0, 0), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
                (d > 0).then_some(best as NodeId)
            }
        }
    }

    #[inline]
    fn sample_live<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        self.live[rng.random_range(0..self.live.len())]
    }

    fn set_remaining(&mut self, node: NodeId, value: u32) {
        let i = node as usize;
        let old = self.remaining[i];
        if old == value {
            return;
        }
        self.remaining[i] = value;
        if let Some(b) = self.buckets.as_mut() {
            if let Some(set) = b.get_mut(&old) {
                set.remove(&node);
                if set.is_empty() {
                    b.remove(&old);
                }
            }
            if value > 0 {
                b.entry(value).or_default().insert(node);
            }
        }
        if value == 0 {
            let pos = self.live_pos[i] as usize;
            let last = *self.live.last().expect("node was live");
            self.live.swap_remove(pos);
            if last != node {
                self.live_pos[last as usize] = pos as u32;
            }
            self.live_pos[i] = NOT_LIVE;
        }
    }

    #[inline]
    pub fn decrement(&mut self, node: NodeId) {
        let d = self.remaining[node as usize];
        debug_assert!(d > 0);
        self.set_remaining(node, d - 1);
    }

    /// Drops every remaining stub of `node`, returning how many were dropped.
    pub fn abandon(&mut self, node: NodeId) -> u32 {
        let d = self.remaining[node as usize];
        self.set_remaining(node, 0);
        d
    }
}

/// Which kind of edge a phase creates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WiringMode {
    Reciprocal,
    Directed,
}

/// Stub bookkeeping for one phase. The reciprocal phase draws both endpoints
/// from the same pool; the directed phase joins out-stubs to in-stubs.
#[derive(Debug, Clone)]
pub enum PhaseStubs {
    Reciprocal(StubState),
    Directed { out: StubState, inn: StubState },
}

impl PhaseStubs {
    pub fn reciprocal(recip: &[u32]) -> Self {
        PhaseStubs::Reciprocal(StubState::new(recip, true))
    }

    pub fn directed(out: &[u32], inn: &[u32]) -> Self {
        PhaseStubs::Directed {
            out: StubState::new(out, true),
            inn: StubState::new(inn, false),
        }
    }

    pub fn mode(&self) -> WiringMode {
        match self {
            PhaseStubs::Reciprocal(_) => WiringMode::Reciprocal,
            PhaseStubs::Directed { .. } => WiringMode::Directed,
        }
    }

    fn sources(&self) -> &StubState {
        match self {
            PhaseStubs::Reciprocal(s) => s,
            PhaseStubs::Directed { out, .. } => out,
        }
    }

    fn targets(&self) -> &StubState {
        match self {
            PhaseStubs::Reciprocal(s) => s,
            PhaseStubs::Directed { inn, .. } => inn,
        }
    }

    /// Whether another iteration can possibly create an edge.
    pub fn has_work(&self) -> bool {
        match self {
            PhaseStubs::Reciprocal(s) => s.live_count() >= 2,
            PhaseStubs::Directed { out, inn } => out.live_count() > 0 && inn.live_count() > 0,
        }
    }

    /// Whether `u -> v` (or the mutual pair, in reciprocal mode) may be added now.
    #[inline]
    fn can_connect(&self, graph: &DirectedGraph, u: NodeId, v: NodeId) -> bool {
        if u == v || self.sources().remaining(u) == 0 || self.targets().remaining(v) == 0 {
            return false;
        }
        match self {
            PhaseStubs::Reciprocal(_) => !graph.has_edge(u, v) && !graph.has_edge(v, u),
            PhaseStubs::Directed { .. } => !graph.has_edge(u, v),
        }
    }

    fn connect(&mut self, graph: &mut DirectedGraph, u: NodeId, v: NodeId) {
        match self {
            PhaseStubs::Reciprocal(s) => {
                let added = graph.add_reciprocal(u, v);
                debug_assert!(added);
                s.decrement(u);
                s.decrement(v);
            }
            PhaseStubs::Directed { out, inn } => {
                let added = graph.add_edge(u, v);
                debug_assert!(added);
                out.decrement(u);
                inn.decrement(v);
            }
        }
    }

    fn abandon_source(&mut self, node: NodeId) -> u32 {
        match self {
            PhaseStubs::Reciprocal(s) => s.abandon(node),
            PhaseStubs::Directed { out, .. } => out.abandon(node),
        }
    }
}

/// Step one: connects the current hub to as many uniformly chosen eligible
/// partners as it has stubs, then retires the hub. Returns the partners.
///
/// Eligibility is re-evaluated after every connection. Hub stubs that find
/// no partner are dropped.
pub fn hub_step<R: Rng + ?Sized>(
    stubs: &mut PhaseStubs,
    graph: &mut DirectedGraph,
    rng: &mut R,
) -> Vec<NodeId> {
    let Some(hub) = stubs.sources().max_node() else {
        return Vec::new();
    };
    let mut partners = Vec::with_capacity(stubs.sources().remaining(hub) as usize);
    let mut misses = 0;
    let mut fallback: Option<Vec<NodeId>> = None;

    while stubs.sources().remaining(hub) > 0 {
        let partner = match fallback.as_mut() {
            Some(pool) => {
                if pool.is_empty() {
                    break;
                }
                let i = rng.random_range(0..pool.len());
                pool.swap_remove(i)
            }
            None => {
                if stubs.targets().live_count() == 0 {
                    break;
                }
                let x = stubs.targets().sample_live(rng);
                if !stubs.can_connect(graph, hub, x) {
                    misses += 1;
                    if misses >= MAX_CONSECUTIVE_MISSES {
                        let pool = stubs
                            .targets()
                            .live()
                            .iter()
                            .copied()
                            .filter(|&y| stubs.can_connect(graph, hub, y))
                            .collect();
                        fallback = Some(pool);
                    }
                    continue;
                }
                misses = 0;
                x
            }
        };
        debug_assert!(stubs.can_connect(graph, hub, partner));
        stubs.connect(graph, hub, partner);
        partners.push(partner);
    }
    stubs.abandon_source(hub);
    partners
}

/// Step two: interconnects the new neighbors of the hub.
///
/// Every unordered pair is visited exactly once. The visiting order is a
/// weighted random permutation (weighted sampling without replacement, keys
/// `ln(U) / w`) with pair weight equal to the product of remaining stubs at
/// the start of the step, so well-connected pairs tend to be tried first.
/// A visited pair is connected whenever it is still feasible. Returns the
/// number of edges created.
///
/// In directed mode a pair `{a, b}` has weight `out(a) in(b) + out(b) in(a)`
/// and gets at most one edge, oriented proportionally to the two terms as
/// they stand when the pair is visited.
pub fn neighbor_step<R: Rng + ?Sized>(
    new_neighbors: &[NodeId],
    stubs: &mut PhaseStubs,
    graph: &mut DirectedGraph,
    rng: &mut R,
) -> usize {
    let candidates: Vec<NodeId> = match &*stubs {
        PhaseStubs::Reciprocal(s) => new_neighbors
            .iter()
            .copied()
            .filter(|&v| s.remaining(v) > 0)
            .collect(),
        PhaseStubs::Directed { out, inn } => new_neighbors
            .iter()
            .copied()
            .filter(|&v| out.remaining(v) > 0 || inn.remaining(v) > 0)
            .collect(),
    };
    if candidates.len() < 2 {
        return 0;
    }

    let k = candidates.len();
    let mut keyed: Vec<(f64, NodeId, NodeId)> = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (candidates[i], candidates[j]);
            let weight = pair_weight(stubs, graph, a, b);
            if weight > 0.0 {
                let u: f64 = rng.random();
                keyed.push((u.ln() / weight, a, b));
            }
        }
    }
    keyed.sort_unstable_by(|x, y| y.0.total_cmp(&x.0));

    let mut created = 0;
    for (_, a, b) in keyed {
        let edge = match &*stubs {
            PhaseStubs::Reciprocal(_) => stubs.can_connect(graph, a, b).then_some((a, b)),
            PhaseStubs::Directed { out, inn } => {
                let weight_of = |u: NodeId, v: NodeId| {
                    if stubs.can_connect(graph, u, v) {
                        f64::from(out.remaining(u)) * f64::from(inn.remaining(v))
                    } else {
                        0.0
                    }
                };
                let forward = weight_of(a, b);
                let backward = weight_of(b, a);
                let total = forward + backward;
                if total == 0.0 {
                    None
                } else if rng.random::<f64>() * total < forward {
                    Some((a, b))
                } else {
                    Some((b, a))
                }
            }
        };
        if let Some((u, v)) = edge {
            stubs.connect(graph, u, v);
            created += 1;
        }
    }
    created
}

/// Weight of an unordered pair in the neighbor step; zero if no edge between
/// them is currently possible.
fn pair_weight(stubs: &PhaseStubs, graph: &DirectedGraph, a: NodeId, b: NodeId) -> f64 {
    match stubs {
        PhaseStubs::Reciprocal(s) => {
            if stubs.can_connect(graph, a, b) {
                f64::from(s.remaining(a)) * f64::from(s.remaining(b))
            } else {
                0.0
            }
        }
        PhaseStubs::Directed { out, inn } => {
            let mut w = 0.0;
            if stubs.can_connect(graph, a, b) {
                w += f64::from(out.remaining(a)) * f64::from(inn.remaining(b));
            }
            if stubs.can_connect(graph, b, a) {
                w += f64::from(out.remaining(b)) * f64::from(inn.remaining(a));
            }
            w
        }
    }
}

/// Counters for one wiring phase. In the reciprocal phase an "edge" is a
/// mutual pair (two directed edges); in the directed phase it is one directed edge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct PhaseStats {
    pub iterations: usize,
    pub hub_edges: usize,
    pub neighbor_edges: usize,
    /// Stubs (counting both endpoints) never connected.
    pub leftover_stubs: u64,
}

impl PhaseStats {
    pub fn edges(&self) -> usize {
        self.hub_edges + self.neighbor_edges
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct WiringStats {
    pub reciprocal: PhaseStats,
    pub directed: PhaseStats,
}

fn run_phase<R: Rng + ?Sized>(
    stubs: &mut PhaseStubs,
    graph: &mut DirectedGraph,
    rng: &mut R,
) -> PhaseStats {
    let mut stats = PhaseStats::default();
    let initial = stubs.sources().total_remaining()
        + match stubs.mode() {
            WiringMode::Reciprocal => 0,
            WiringMode::Directed => stubs.targets().total_remaining(),
        };
    while stubs.has_work() {
        let partners = hub_step(stubs, graph, rng);
        stats.iterations += 1;
        stats.hub_edges += partners.len();
        stats.neighbor_edges += neighbor_step(&partners, stubs, graph, rng);
    }
    stats.leftover_stubs = initial - 2 * stats.edges() as u64;
    stats
}

/// Builds the mutual-pair skeleton from the reciprocal degree sequence.
pub fn wire_reciprocal<R: Rng + ?Sized>(
    seqs: &DegreeSequences,
    rng: &mut R,
) -> (DirectedGraph, PhaseStats) {
    let capacity = seqs.recip_sum() + seqs.out_sum();
    let mut graph = DirectedGraph::with_edge_capacity(seqs.len(), capacity as usize);
    let mut stubs = PhaseStubs::reciprocal(&seqs.recip);
    let stats = run_phase(&mut stubs, &mut graph, rng);
    (graph, stats)
}

/// Adds directed edges from out-stubs to in-stubs on top of an existing graph.
/// Only an existing edge in the same direction blocks a connection.
pub fn wire_directed<R: Rng + ?Sized>(
    graph: &mut DirectedGraph,
    seqs: &DegreeSequences,
    rng: &mut R,
) -> PhaseStats {
    let mut stubs = PhaseStubs::directed(&seqs.out, &seqs.inn);
    run_phase(&mut stubs, graph, rng)
}

/// Wall-clock time of each generation stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GenerationTimings {
    pub sampling: Duration,
    pub reciprocal: Duration,
    pub directed: Duration,
}

impl GenerationTimings {
    pub fn total(&self) -> Duration {
        self.sampling + self.reciprocal + self.directed
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedGraph {
    pub graph: DirectedGraph,
    pub sequences: DegreeSequences,
    pub stats: WiringStats,
    pub timings: GenerationTimings,
    pub resample_attempts: usize,
}

/// Samples degree sequences and wires them into a graph, all from `config.seed`.
pub fn generate_graph(config: &GenConfig) -> Result<GeneratedGraph> {
    let mut rng = config.rng();
    let start = Instant::now();
    let sampled = sample_degree_sequences_with(config, &mut rng)?;
    let sampling = start.elapsed();
    let mut generated = wire_sequences(sampled.sequences, &mut rng);
    generated.timings.sampling = sampling;
    generated.resample_attempts = sampled.attempts;
    Ok(generated)
}

/// Runs both wiring phases on already finalized sequences.
pub fn wire_sequences<R: Rng + ?Sized>(sequences: DegreeSequences, rng: &mut R) -> GeneratedGraph {
    let start = Instant::now();
    let (mut graph, reciprocal) = wire_reciprocal(&sequences, rng);
    let t_recip = start.elapsed();
    let start = Instant::now();
    let directed = wire_directed(&mut graph, &sequences, rng);
    graph.sort_adjacency();
    let t_directed = start.elapsed();
    GeneratedGraph {
        graph,
        sequences,
        stats: WiringStats {
            reciprocal,
            directed,
        },
        timings: GenerationTimings {
            sampling: Duration::ZERO,
            reciprocal: t_recip,
            directed: t_directed,
        },
        resample_attempts: 0,
    }
}
