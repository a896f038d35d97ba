//! Discrete-time SIR epidemic on the largest weakly connected component.
//!
//! Every infected node gets one chance per out-edge to infect a susceptible
//! neighbor with probability `p`, then recovers for good. Updates are
//! synchronous: nodes infected during a step start transmitting in the next one.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::metrics::largest_wcc;
use crate::SimRng;

pub const DEFAULT_INITIAL_INFECTED_FRACTION: f64 = 0.05;
pub const DEFAULT_RUNS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirConfig {
    /// Per-edge, per-step transmission probability.
    pub p: f64,
    pub initial_infected_fraction: f64,
    pub runs: usize,
    pub seed: u64,
}

impl SirConfig {
    pub fn new(p: f64, seed: u64) -> Self {
        Self {
            p,
            initial_infected_fraction: DEFAULT_INITIAL_INFECTED_FRACTION,
            runs: DEFAULT_RUNS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::config("sir_p", format!("must lie in [0, 1], got {}", self.p)));
        }
        let f = self.initial_infected_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::config(
                "sir_initial_fraction",
                format!("must lie in (0, 1], got {f}"),
            ));
        }
        if self.runs == 0 {
            return Err(Error::config("sir_runs", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SirOutcome {
    /// Recovered nodes at the end, as a fraction of the component size.
    pub recovered_fraction: f64,
    /// Completed update rounds until no infected node remained.
    pub steps: u32,
}

/// Compartment sizes after one update round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepCounts {
    pub step: u32,
    pub susceptible: usize,
    pub infected: usize,
    pub recovered: usize,
}

/// Seed-set size: `fraction * size` rounded half-up, at least one.
pub fn initial_infected_count(fraction: f64, size: usize) -> usize {
    ((fraction * size as f64 + 0.5).floor() as usize).clamp(1, size.max(1))
}

const SUSCEPTIBLE: u8 = 0;
const INFECTED: u8 = 1;
const RECOVERED: u8 = 2;

/// One simulation restricted to `component` (which must be closed under
/// out-edges, as a weakly connected component is).
pub fn run_sir<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    component: &[NodeId],
    config: &SirConfig,
    rng: &mut R,
) -> SirOutcome {
    run_sir_traced(graph, component, config, rng, |_| {})
}

/// Like [`run_sir`], reporting compartment sizes after every round.
pub fn run_sir_traced<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    component: &[NodeId],
    config: &SirConfig,
    rng: &mut R,
    observe: impl FnMut(StepCounts),
) -> SirOutcome {
    assert!(!component.is_empty(), "SIR needs a nonempty component");
    let count = initial_infected_count(config.initial_infected_fraction, component.len());
    let seeds: Vec<NodeId> = rand::seq::index::sample(rng, component.len(), count)
        .into_iter()
        .map(|i| component[i])
        .collect();
    run_sir_from(graph, component.len(), &seeds, config.p, rng, observe)
}

/// Simulation from a given set of initially infected nodes inside a
/// component of `size` nodes.
pub fn run_sir_from<R: Rng + ?Sized>(
    graph: &DirectedGraph,
    size: usize,
    seeds: &[NodeId],
    p: f64,
    rng: &mut R,
    mut observe: impl FnMut(StepCounts),
) -> SirOutcome {
    let mut state = vec![SUSCEPTIBLE; graph.node_count()];
    let mut infected = seeds.to_vec();
    for &v in &infected {
        state[v as usize] = INFECTED;
    }

    let log_q = (1.0 - p).ln();
    let mut recovered = 0usize;
    let mut steps = 0u32;
    let mut next = Vec::new();
    while !infected.is_empty() {
        for &u in infected.iter().filter(|_| p > 0.0) {
            let targets = graph.out_neighbors(u);
            let mut i = 0usize;
            loop {
                if p < 1.0 {
                    // failed trials before the next success
                    let skip = ((1.0 - rng.random::<f64>()).ln() / log_q).floor();
                    if skip >= (targets.len() - i) as f64 {
                        break;
                    }
                    i += skip as usize;
                }
                let Some(&v) = targets.get(i) else { break };
                if state[v as usize] == SUSCEPTIBLE {
                    state[v as usize] = INFECTED;
                    next.push(v);
                }
                i += 1;
            }
        }
        for &u in &infected {
            debug_assert_eq!(state[u as usize], INFECTED);
            state[u as usize] = RECOVERED;
        }
        recovered += infected.len();
        steps += 1;
        std::mem::swap(&mut infected, &mut next);
        next.clear();
        observe(StepCounts {
            step: steps,
            susceptible: size - recovered - infected.len(),
            infected: infected.len(),
            recovered,
        });
    }
    SirOutcome {
        recovered_fraction: recovered as f64 / size as f64,
        steps,
    }
}

/// Random source of run `run` in a batch seeded with `seed`.
pub fn run_rng(seed: u64, run: usize) -> SimRng {
    let mut rng = crate::seeded_rng(seed);
    rng.set_stream(run as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SirBatch {
    pub p: f64,
    pub component_size: usize,
    pub runs: Vec<SirOutcome>,
}

impl SirBatch {
    pub fn mean_recovered_fraction(&self) -> f64 {
        mean(self.runs.iter().map(|r| r.recovered_fraction))
    }

    pub fn mean_steps(&self) -> f64 {
        mean(self.runs.iter().map(|r| f64::from(r.steps)))
    }

    /// Sample standard deviation of the recovered fraction.
    pub fn recovered_std(&self) -> f64 {
        let n = self.runs.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean_recovered_fraction();
        let ss: f64 = self.runs.iter().map(|r| (r.recovered_fraction - m).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    /// Standard error of the mean recovered fraction.
    pub fn recovered_sem(&self) -> f64 {
        self.recovered_std() / (self.runs.len() as f64).sqrt()
    }
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = xs.len();
    if n == 0 {
        0.0
    } else {
        xs.sum::<f64>() / n as f64
    }
}

/// `config.runs` independent simulations on the largest weakly connected component.
pub fn run_sir_batch(graph: &DirectedGraph, config: &SirConfig) -> Result<SirBatch> {
    let component = largest_wcc(graph);
    run_sir_batch_on(graph, &component, config)
}

/// Batch on a precomputed component. Runs may execute in parallel; each uses
/// its own stream derived from `config.seed`, so results do not depend on
/// scheduling.
pub fn run_sir_batch_on(
    graph: &DirectedGraph,
    component: &[NodeId],
    config: &SirConfig,
) -> Result<SirBatch> {
    config.validate()?;
    if component.is_empty() {
        return Err(Error::config("graph", "SIR needs a nonempty component"));
    }
    let runs = (0..config.runs)
        .into_par_iter()
        .map(|i| run_sir(graph, component, config, &mut run_rng(config.seed, i)))
        .collect();
    Ok(SirBatch {
        p: config.p,
        component_size: component.len(),
        runs,
    })
}
