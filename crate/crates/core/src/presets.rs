//! Generation recipes at the sizes of fourteen crawled follower graphs and of
//! the 100,000-node scaling run.
//!
//! Each preset fixes the node count, the target edge count and the target rank
//! correlations. The chi-squared shapes and the share of reciprocal stubs were
//! tuned by hand; scales follow from matching the rounded marginal means to
//! the edge count.

use crate::config::RunConfig;
use crate::degree_sampler::{CorrelationTargets, GenConfig, MarginalSpec, Marginals};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub nodes: usize,
    /// Directed edges to aim for; a mutual pair counts twice.
    pub edges: usize,
    pub rho: [f64; 3],
    /// Fraction of the mean total degree carried by reciprocal edges.
    pub recip_share: f64,
    /// Chi-squared shapes of the reciprocal, in and out marginals.
    pub shapes: [f64; 3],
}

impl Preset {
    pub fn mean_degree(&self) -> f64 {
        self.edges as f64 / self.nodes as f64
    }

    /// Marginals whose rounded means reproduce the target edge count:
    /// reciprocal mean `share * m`, in and out means `(1 - share) * m`.
    pub fn marginals(&self) -> Result<Marginals> {
        let m = self.mean_degree();
        let [sr, si, so] = self.shapes;
        Ok(Marginals {
            recip: MarginalSpec::with_rounded_mean(sr, self.recip_share * m)?,
            inn: MarginalSpec::with_rounded_mean(si, (1.0 - self.recip_share) * m)?,
            out: MarginalSpec::with_rounded_mean(so, (1.0 - self.recip_share) * m)?,
        })
    }

    pub fn gen_config(&self, seed: u64) -> Result<GenConfig> {
        let [r1, r2, r3] = self.rho;
        Ok(GenConfig::new(
            self.nodes,
            self.marginals()?,
            CorrelationTargets::new(r1, r2, r3)?,
            seed,
        ))
    }

    pub fn run_config(&self, seed: u64) -> Result<RunConfig> {
        Ok(RunConfig::new(self.gen_config(seed)?))
    }
}

const fn preset(
    name: &'static str,
    nodes: usize,
    edges: usize,
    rho: [f64; 3],
    recip_share: f64,
    shapes: [f64; 3],
) -> Preset {
    Preset {
        name,
        nodes,
        edges,
        rho,
        recip_share,
        shapes,
    }
}

/// The fourteen graph sizes, in table order.
pub const REPLICATION: [Preset; 14] = [
    preset("G1", 11_015, 388_626, [0.540, 0.612, 0.284], 0.5, [1.0, 1.0, 2.0]),
    preset("G2", 21_291, 2_391_103, [0.630, 0.697, 0.395], 0.5, [1.0, 1.0, 2.0]),
    preset("G3", 50_133, 4_962_837, [0.616, 0.753, 0.397], 0.5, [1.0, 1.0, 2.0]),
    preset("G4", 459, 5_349, [0.465, 0.606, 0.240], 0.5, [2.0, 2.0, 3.0]),
    preset("G5", 3_580, 51_708, [0.407, 0.547, 0.250], 0.5, [1.0, 1.0, 2.0]),
    preset("G6", 8_277, 750_358, [0.619, 0.707, 0.424], 0.5, [1.5, 1.5, 3.0]),
    preset("G7", 21_464, 547_170, [0.420, 0.605, 0.349], 0.5, [1.0, 1.0, 2.0]),
    preset("G8", 13_646, 525_738, [0.489, 0.664, 0.297], 0.5, [1.0, 1.0, 2.0]),
    preset("G9", 2_013, 17_726, [0.262, 0.253, -0.001], 0.5, [0.5, 0.5, 1.0]),
    preset("G10", 15_299, 694_396, [0.586, 0.584, 0.400], 0.5, [1.0, 1.0, 2.0]),
    preset("G11", 6_003, 213_554, [0.658, 0.564, 0.242], 0.5, [1.0, 1.0, 2.0]),
    preset("G12", 2_464, 41_486, [0.592, 0.577, 0.258], 0.5, [1.0, 1.0, 2.0]),
    preset("G13", 1_239, 30_922, [0.656, 0.611, 0.267], 0.5, [2.0, 2.0, 3.0]),
    preset("G14", 2_932, 41_932, [0.419, 0.315, 0.148], 0.5, [1.0, 1.0, 2.0]),
];

/// 100,000 nodes with targets (0.6, 0.6, 0.5).
pub const SCALE_100K: Preset = preset(
    "100k",
    100_000,
    27_429_367,
    [0.6, 0.6, 0.5],
    0.5,
    [1.0, 1.0, 2.0],
);

pub fn all() -> impl Iterator<Item = &'static Preset> {
    REPLICATION.iter().chain(std::iter::once(&SCALE_100K))
}

/// Case-insensitive lookup by name.
pub fn find(name: &str) -> Result<&'static Preset> {
    all()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            let names: Vec<&str> = all().map(|p| p.name).collect();
            Error::config("preset", format!("unknown preset {name:?}; known: {}", names.join(", ")))
        })
}

/// Same recipe at a different node count, keeping the mean degree.
pub fn rescaled(base: &Preset, nodes: usize) -> Preset {
    Preset {
        nodes,
        edges: (base.mean_degree() * nodes as f64).round() as usize,
        ..*base
    }
}
