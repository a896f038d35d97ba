//! Correlated reciprocal / in / out degree sampling.
//!
//! Degrees are drawn through a Gaussian copula: a standard normal vector with
//! latent Pearson matrix `r = 2 sin(pi * rho / 6)` is pushed through the normal
//! CDF and then through the inverse CDF of a scaled chi-squared marginal,
//! rounded half-up. The Spearman correlation of the continuous draws equals the
//! requested targets exactly; integer rounding only adds ties.
//!
//! After sampling, the reciprocal sum is made even and the in/out sums are
//! equalised so that every stub can, in principle, be connected.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::SimRng;

pub const DEFAULT_BALANCE_FRACTION: f64 = 0.1;
pub const DEFAULT_MAX_RESAMPLE_ATTEMPTS: usize = 50;

/// Scaled chi-squared marginal: `round_half_up(scale * X)` with `X ~ chi2(shape)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MarginalSpec {
    pub shape: f64,
    pub scale: f64,
}

impl MarginalSpec {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        let spec = Self { shape, scale };
        spec.validate("marginal")?;
        Ok(spec)
    }

    /// Mean of the continuous (unrounded) scaled draw.
    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    /// Mean of the rounded draw, `sum_k P(scale * X >= k - 1/2)`.
    pub fn rounded_mean(&self) -> f64 {
        let dist = self.distribution();
        let mut total = 0.0;
        for k in 1u64.. {
            let tail = dist.sf((k as f64 - 0.5) / self.scale);
            total += tail;
            if tail < 1e-13 {
                break;
            }
        }
        total
    }

    /// Marginal with the given shape whose rounded draws average `mean`.
    pub fn with_rounded_mean(shape: f64, mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::config("mean", format!("must be a positive number, got {mean}")));
        }
        let guess = Self::new(shape, mean / shape)?;
        // rounding shifts the mean by well under one unit, so this brackets
        let (mut lo, mut hi) = ((mean - 1.0).max(0.0) / shape, (mean + 1.0) / shape);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (Self { shape, scale: mid }).rounded_mean() < mean {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Self {
            scale: 0.5 * (lo + hi),
            ..guess
        })
    }

    fn validate(&self, prefix: &str) -> Result<()> {
        if !(self.shape.is_finite() && self.shape > 0.0) {
            return Err(Error::config(
                format!("{prefix}_shape"),
                format!("must be a positive number, got {}", self.shape),
            ));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::config(
                format!("{prefix}_scale"),
                format!("must be a positive number, got {}", self.scale),
            ));
        }
        Ok(())
    }

    fn distribution(&self) -> ChiSquared {
        ChiSquared::new(self.shape).expect("shape validated as positive")
    }
}

/// The three marginals, in reciprocal / in / out order.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Marginals {
    pub recip: MarginalSpec,
    pub inn: MarginalSpec,
    pub out: MarginalSpec,
}

/// Target Spearman correlations: `rho1` (reciprocal, in), `rho2` (reciprocal, out),
/// `rho3` (in, out).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CorrelationTargets {
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
}

impl Default for CorrelationTargets {
    fn default() -> Self {
        Self::independent()
    }
}

impl CorrelationTargets {
    pub fn new(rho1: f64, rho2: f64, rho3: f64) -> Result<Self> {
        let targets = Self { rho1, rho2, rho3 };
        targets.validate()?;
        Ok(targets)
    }

    pub fn independent() -> Self {
        Self {
            rho1: 0.0,
            rho2: 0.0,
            rho3: 0.0,
        }
    }

    /// Latent Pearson correlation of the Gaussian copula for a target Spearman `rho`.
    pub fn latent_pearson(rho: f64) -> f64 {
        2.0 * (std::f64::consts::PI * rho / 6.0).sin()
    }

    pub fn latent_matrix(&self) -> Matrix3<f64> {
        let r1 = Self::latent_pearson(self.rho1);
        let r2 = Self::latent_pearson(self.rho2);
        let r3 = Self::latent_pearson(self.rho3);
        Matrix3::new(1.0, r1, r2, r1, 1.0, r3, r2, r3, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (key, value) in [("rho1", self.rho1), ("rho2", self.rho2), ("rho3", self.rho3)] {
            if !(value.is_finite() && (-1.0..=1.0).contains(&value)) {
                return Err(Error::config(key, format!("must lie in [-1, 1], got {value}")));
            }
        }
        self.factor().map(|_| ())
    }

    /// Returns `L` with `L L^T` equal to the latent matrix. Works for singular
    /// (but positive semi-definite) matrices, e.g. all targets equal to one.
    fn factor(&self) -> Result<Matrix3<f64>> {
        let eigen = SymmetricEigen::new(self.latent_matrix());
        let min_eigenvalue = eigen.eigenvalues.min();
        if min_eigenvalue < -1e-10 {
            return Err(Error::NotPositiveSemidefinite {
                rho1: self.rho1,
                rho2: self.rho2,
                rho3: self.rho3,
                min_eigenvalue,
            });
        }
        let roots = eigen.eigenvalues.map(|l| l.max(0.0).sqrt());
        Ok(eigen.eigenvectors * Matrix3::from_diagonal(&roots))
    }
}

/// Full generation recipe.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GenConfig {
    pub n: usize,
    pub marginals: Marginals,
    pub targets: CorrelationTargets,
    pub balance_fraction: f64,
    pub seed: u64,
    pub max_resample_attempts: usize,
}

impl GenConfig {
    pub fn new(n: usize, marginals: Marginals, targets: CorrelationTargets, seed: u64) -> Self {
        Self {
            n,
            marginals,
            targets,
            balance_fraction: DEFAULT_BALANCE_FRACTION,
            seed,
            max_resample_attempts: DEFAULT_MAX_RESAMPLE_ATTEMPTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config("n", format!("must be at least 2, got {}", self.n)));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::config("n", "exceeds the 32-bit node id range"));
        }
        self.marginals.recip.validate("recip")?;
        self.marginals.inn.validate("in")?;
        self.marginals.out.validate("out")?;
        self.targets.validate()?;
        if !(self.balance_fraction > 0.0 && self.balance_fraction <= 1.0) {
            return Err(Error::config(
                "balance_fraction",
                format!("must lie in (0, 1], got {}", self.balance_fraction),
            ));
        }
        if self.max_resample_attempts == 0 {
            return Err(Error::config("max_resample_attempts", "must be positive"));
        }
        Ok(())
    }

    /// Deterministic random source for this configuration.
    pub fn rng(&self) -> SimRng {
        crate::seeded_rng(self.seed)
    }

    /// Largest in/out sum difference accepted before resampling.
    pub fn balance_threshold(&self) -> f64 {
        self.balance_fraction * self.n as f64
    }
}

/// Aligned reciprocal / in / out degree sequences.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeSequences {
    pub recip: Vec<u32>,
    pub inn: Vec<u32>,
    pub out: Vec<u32>,
}

impl DegreeSequences {
    pub fn new(recip: Vec<u32>, inn: Vec<u32>, out: Vec<u32>) -> Self {
        assert!(recip.len() == inn.len() && inn.len() == out.len());
        Self { recip, inn, out }
    }

    pub fn len(&self) -> usize {
        self.recip.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recip.is_empty()
    }

    pub fn recip_sum(&self) -> u64 {
        sum(&self.recip)
    }

    pub fn in_sum(&self) -> u64 {
        sum(&self.inn)
    }

    pub fn out_sum(&self) -> u64 {
        sum(&self.out)
    }

    /// `|sum(in) - sum(out)|`.
    pub fn tau(&self) -> u64 {
        self.in_sum().abs_diff(self.out_sum())
    }

    /// Both wiring preconditions hold: even reciprocal sum and equal in/out sums.
    pub fn is_finalized(&self) -> bool {
        self.recip_sum().is_multiple_of(2) && self.in_sum() == self.out_sum()
    }
}

fn sum(xs: &[u32]) -> u64 {
    xs.iter().map(|&x| u64::from(x)).sum()
}

fn round_half_up(x: f64) -> u32 {
    let r = (x + 0.5).floor();
    if r <= 0.0 {
        0
    } else if r >= u32::MAX as f64 {
        u32::MAX
    } else {
        r as u32
    }
}

/// Draws one raw set of correlated degree sequences, without any repair.
pub fn sample_raw_degrees<R: Rng + ?Sized>(
    config: &GenConfig,
    rng: &mut R,
) -> Result<DegreeSequences> {
    config.validate()?;
    let factor = config.targets.factor()?;
    let normal = Normal::standard();
    let specs = [config.marginals.recip, config.marginals.inn, config.marginals.out];
    let dists = specs.map(|s| s.distribution());
    // Phi(z) rounds to exactly 1 for z above ~8.3; the chi2 quantile at 1 is infinite.
    let upper = 1.0 - f64::EPSILON;

    let mut seqs = [
        Vec::with_capacity(config.n),
        Vec::with_capacity(config.n),
        Vec::with_capacity(config.n),
    ];
    for _ in 0..config.n {
        let g = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let z = factor * g;
        for k in 0..3 {
            let u = normal.cdf(z[k]).min(upper);
            let x = dists[k].inverse_cdf(u);
            seqs[k].push(round_half_up(specs[k].scale * x));
        }
    }
    let [recip, inn, out] = seqs;
    Ok(DegreeSequences::new(recip, inn, out))
}

/// Makes the reciprocal sum even by adding one stub to the first node with the
/// largest reciprocal degree. Returns the index that changed, if any.
pub fn fix_reciprocal_parity(seqs: &mut DegreeSequences) -> Option<usize> {
    if seqs.recip_sum().is_multiple_of(2) {
        return None;
    }
    // An odd sum implies a nonempty sequence with a positive maximum.
    let max = *seqs.recip.iter().max()?;
    let idx = seqs.recip.iter().position(|&d| d == max)?;
    seqs.recip[idx] += 1;
    Some(idx)
}

/// Equalises the in/out sums by incrementing `tau` distinct, uniformly chosen
/// entries of the sequence with the smaller sum. Returns the incremented indices.
pub fn balance_in_out<R: Rng + ?Sized>(
    seqs: &mut DegreeSequences,
    balance_fraction: f64,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = seqs.len();
    let tau = seqs.tau();
    let threshold = balance_fraction * n as f64;
    if tau == 0 {
        return Ok(Vec::new());
    }
    if tau as f64 >= threshold || tau as usize > n {
        return Err(Error::BalancePrecondition { tau, threshold });
    }
    let deficient = if seqs.in_sum() < seqs.out_sum() {
        &mut seqs.inn
    } else {
        &mut seqs.out
    };
    let mut chosen = rand::seq::index::sample(rng, n, tau as usize).into_vec();
    for &i in &chosen {
        deficient[i] += 1;
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Finalized sequences together with the repair trail that produced them.
#[derive(Debug, Clone)]
pub struct SampledDegrees {
    pub sequences: DegreeSequences,
    /// The accepted raw draw, before parity and balance repair.
    pub raw: DegreeSequences,
    /// Number of raw draws taken, including the accepted one.
    pub attempts: usize,
    pub tau: u64,
    pub parity_fix: Option<usize>,
    pub balanced: Vec<usize>,
}

/// Draws raw sequences until the in/out sum gap falls below the balance
/// threshold, then repairs parity and balance.
pub fn sample_degree_sequences_with<R: Rng + ?Sized>(
    config: &GenConfig,
    rng: &mut R,
) -> Result<SampledDegrees> {
    config.validate()?;
    let threshold = config.balance_threshold();
    let mut last_tau = 0;
    for attempt in 1..=config.max_resample_attempts {
        let raw = sample_raw_degrees(config, rng)?;
        last_tau = raw.tau();
        if (last_tau as f64) >= threshold {
            continue;
        }
        let mut sequences = raw.clone();
        let parity_fix = fix_reciprocal_parity(&mut sequences);
        let balanced = balance_in_out(&mut sequences, config.balance_fraction, rng)?;
        debug_assert!(sequences.is_finalized());
        return Ok(SampledDegrees {
            sequences,
            raw,
            attempts: attempt,
            tau: last_tau,
            parity_fix,
            balanced,
        });
    }
    Err(Error::ResamplingExhausted {
        attempts: config.max_resample_attempts,
        last_tau,
        threshold,
    })
}

/// Samples finalized degree sequences using the configuration's own seed.
pub fn sample_degree_sequences(config: &GenConfig) -> Result<DegreeSequences> {
    let mut rng = config.rng();
    sample_degree_sequences_with(config, &mut rng).map(|s| s.sequences)
}
