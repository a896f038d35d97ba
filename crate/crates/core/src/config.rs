//! Flat TOML run documents.
//!
//! ```toml
//! n = 100000
//! seed = 7
//! recip_shape = 1.0
//! recip_scale = 137.0
//! in_shape = 1.0
//! in_scale = 137.0
//! out_shape = 2.0
//! out_scale = 68.6
//! rho1 = 0.6
//! rho2 = 0.6
//! rho3 = 0.5
//! sir_p = [0.01, 0.05, 0.1]
//! ```
//!
//! Only `n` and the six marginal keys are required.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use toml::{Table, Value};

use crate::degree_sampler::{
    CorrelationTargets, GenConfig, MarginalSpec, Marginals, DEFAULT_BALANCE_FRACTION,
    DEFAULT_MAX_RESAMPLE_ATTEMPTS,
};
use crate::error::{Error, Result};
use crate::sir::{SirConfig, DEFAULT_INITIAL_INFECTED_FRACTION, DEFAULT_RUNS};

pub const DEFAULT_SIR_P: [f64; 3] = [0.01, 0.05, 0.1];

const KEYS: &[&str] = &[
    "n",
    "seed",
    "recip_shape",
    "recip_scale",
    "in_shape",
    "in_scale",
    "out_shape",
    "out_scale",
    "rho1",
    "rho2",
    "rho3",
    "balance_fraction",
    "max_resample_attempts",
    "sir_p",
    "sir_initial_fraction",
    "sir_runs",
    "sir_seed",
];

/// Epidemic protocol shared by every transmission probability of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SirSettings {
    pub p_values: Vec<f64>,
    pub initial_infected_fraction: f64,
    pub runs: usize,
    /// Falls back to the generation seed when unset.
    pub seed: Option<u64>,
}

impl Default for SirSettings {
    fn default() -> Self {
        Self {
            p_values: DEFAULT_SIR_P.to_vec(),
            initial_infected_fraction: DEFAULT_INITIAL_INFECTED_FRACTION,
            runs: DEFAULT_RUNS,
            seed: None,
        }
    }
}

impl SirSettings {
    pub fn config(&self, p: f64, fallback_seed: u64) -> SirConfig {
        SirConfig {
            p,
            initial_infected_fraction: self.initial_infected_fraction,
            runs: self.runs,
            seed: self.seed.unwrap_or(fallback_seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_values.is_empty() {
            return Err(Error::config("sir_p", "needs at least one probability"));
        }
        for &p in &self.p_values {
            self.config(p, 0).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub generation: GenConfig,
    pub sir: SirSettings,
}

impl RunConfig {
    pub fn new(generation: GenConfig) -> Self {
        Self {
            generation,
            sir: SirSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.generation.validate()?;
        self.sir.validate()
    }

    pub fn sir_config(&self, p: f64) -> SirConfig {
        self.sir.config(p, self.generation.seed)
    }

    /// Canonical document that parses back to `self`.
    pub fn to_toml(&self) -> String {
        let g = &self.generation;
        let m = &g.marginals;
        let t = &g.targets;
        let mut s = String::new();
        let _ = writeln!(s, "n = {}", g.n);
        let _ = writeln!(s, "seed = {}", g.seed);
        for (name, spec) in [("recip", m.recip), ("in", m.inn), ("out", m.out)] {
            let _ = writeln!(s, "{name}_shape = {:?}", spec.shape);
            let _ = writeln!(s, "{name}_scale = {:?}", spec.scale);
        }
        let _ = writeln!(s, "rho1 = {:?}", t.rho1);
        let _ = writeln!(s, "rho2 = {:?}", t.rho2);
        let _ = writeln!(s, "rho3 = {:?}", t.rho3);
        let _ = writeln!(s, "balance_fraction = {:?}", g.balance_fraction);
        let _ = writeln!(s, "max_resample_attempts = {}", g.max_resample_attempts);
        let ps: Vec<String> = self.sir.p_values.iter().map(|p| format!("{p:?}")).collect();
        let _ = writeln!(s, "sir_p = [{}]", ps.join(", "));
        let _ = writeln!(s, "sir_initial_fraction = {:?}", self.sir.initial_infected_fraction);
        let _ = writeln!(s, "sir_runs = {}", self.sir.runs);
        if let Some(seed) = self.sir.seed {
            let _ = writeln!(s, "sir_seed = {seed}");
        }
        s
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Parses and validates a run document, filling defaults for optional keys.
pub fn parse_config(document: &str) -> Result<RunConfig> {
    let table: Table = document
        .parse()
        .map_err(|e: toml::de::Error| Error::config("document", e.message().to_string()))?;
    if let Some(key) = table.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::config(key.clone(), "unknown key"));
    }

    let n = required(&table, "n", as_count)?;
    let seed = optional(&table, "seed", as_seed)?.unwrap_or(0);
    let marginal = |name: &str| -> Result<MarginalSpec> {
        Ok(MarginalSpec {
            shape: required(&table, &format!("{name}_shape"), as_real)?,
            scale: required(&table, &format!("{name}_scale"), as_real)?,
        })
    };
    let marginals = Marginals {
        recip: marginal("recip")?,
        inn: marginal("in")?,
        out: marginal("out")?,
    };
    let rho = |key: &str| optional(&table, key, as_real).map(|v| v.unwrap_or(0.0));
    let targets = CorrelationTargets {
        rho1: rho("rho1")?,
        rho2: rho("rho2")?,
        rho3: rho("rho3")?,
    };
    let generation = GenConfig {
        n,
        marginals,
        targets,
        balance_fraction: optional(&table, "balance_fraction", as_real)?
            .unwrap_or(DEFAULT_BALANCE_FRACTION),
        seed,
        max_resample_attempts: optional(&table, "max_resample_attempts", as_count)?
            .unwrap_or(DEFAULT_MAX_RESAMPLE_ATTEMPTS),
    };

    let defaults = SirSettings::default();
    let sir = SirSettings {
        p_values: optional(&table, "sir_p", as_real_list)?.unwrap_or(defaults.p_values),
        initial_infected_fraction: optional(&table, "sir_initial_fraction", as_real)?
            .unwrap_or(defaults.initial_infected_fraction),
        runs: optional(&table, "sir_runs", as_count)?.unwrap_or(defaults.runs),
        seed: optional(&table, "sir_seed", as_seed)?,
    };

    let config = RunConfig { generation, sir };
    config.validate()?;
    Ok(config)
}

type Convert<T> = fn(&Value) -> std::result::Result<T, String>;

fn required<T>(table: &Table, key: &str, convert: Convert<T>) -> Result<T> {
    optional(table, key, convert)?.ok_or_else(|| Error::config(key, "missing required key"))
}

fn optional<T>(table: &Table, key: &str, convert: Convert<T>) -> Result<Option<T>> {
    table
        .get(key)
        .map(|v| convert(v).map_err(|reason| Error::config(key, reason)))
        .transpose()
}

fn as_real(v: &Value) -> std::result::Result<f64, String> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(format!("expected a number, got {}", other.type_str())),
    }
}

fn as_count(v: &Value) -> std::result::Result<usize, String> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        Value::Integer(i) => Err(format!("must be nonnegative, got {i}")),
        other => Err(format!("expected an integer, got {}", other.type_str())),
    }
}

fn as_seed(v: &Value) -> std::result::Result<u64, String> {
    as_count(v).map(|c| c as u64)
}

fn as_real_list(v: &Value) -> std::result::Result<Vec<f64>, String> {
    match v {
        Value::Array(items) => items.iter().map(as_real).collect(),
        other => as_real(other).map(|x| vec![x]),
    }
}
