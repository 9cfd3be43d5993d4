//! Experiment configuration: TOML-loadable, echoed verbatim into every
//! report so a run is reproducible from the report alone.

use serde::{Deserialize, Serialize};

use crate::polyring::{admissible_sequence, is_admissible, parse_coeff_list, PolyFp};
use crate::sl2::{GenSet, Mat2};

use super::SieveError;

/// Hard resource caps; every driver refuses work beyond them.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetCaps {
    /// Max vertices for dense spectral work.
    pub dense: usize,
    /// Max group order for full enumeration.
    pub enumeration: u64,
    /// Max walk length per row.
    pub walk_len: usize,
    /// Max Monte-Carlo trials per row.
    pub trials_cap: u64,
}

impl Default for BudgetCaps {
    fn default() -> Self {
        BudgetCaps {
            dense: 4000,
            enumeration: 10_000_000,
            walk_len: 1000,
            trials_cap: 10_000_000,
        }
    }
}

/// How the modulus degrees are produced.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModulusStrategy {
    /// n_i = N*i + 1 with N the product of primes <= M: every such
    /// degree is admissible by construction.
    Progression { count: u64 },
    /// Prime degrees greater than M, in increasing order.
    PrimesAbove { count: u64 },
    /// An explicit degree list; each entry must be admissible for M.
    ExplicitDegrees { degrees: Vec<u64> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Coefficient prime.
    pub p: u64,
    /// "nagao", or explicit matrices "a;b;c;d|a;b;c;d" with polynomial
    /// entries as comma-separated coefficient lists (constant first).
    #[serde(default = "default_generators")]
    pub generators: String,
    /// Search the generator ball for a relation-free pair and walk with
    /// that pair instead of the raw generators.
    #[serde(default = "default_true")]
    pub certify_free_pair: bool,
    #[serde(default = "default_radius")]
    pub free_pair_radius: usize,
    #[serde(default = "default_depth")]
    pub free_pair_depth: usize,
    pub modulus_strategy: ModulusStrategy,
    /// Admissibility threshold M.
    #[serde(default = "default_m")]
    pub m_threshold: u64,
    /// Walk lengths, strictly increasing.
    pub l_schedule: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budget: BudgetCaps,
    /// Modulus pairing: target degree = pairing_constant * l.
    #[serde(default = "default_pairing")]
    pub pairing_constant: f64,
    /// Factor-count schedule: i = ceil(schedule_constant * sqrt(l / log l)).
    #[serde(default = "default_one")]
    pub schedule_constant: f64,
    /// First factor degree for product moduli; default = the first
    /// prime exceeding M (a free parameter of the sieve, noted in
    /// reports as unresolved).
    #[serde(default)]
    pub i2: Option<u64>,
    /// Target-set name: all | zero-entry | trace-N | torsion | square
    /// | reducible-chi | ad-fixed-point.
    pub predicate: String,
}

fn default_generators() -> String {
    "nagao".into()
}
fn default_true() -> bool {
    true
}
fn default_radius() -> usize {
    2
}
fn default_depth() -> usize {
    12
}
fn default_m() -> u64 {
    2
}
fn default_trials() -> u64 {
    1_000_000
}
fn default_pairing() -> f64 {
    1.0 / 15.0
}
fn default_one() -> f64 {
    1.0
}

pub fn first_prime_above(m: u64) -> u64 {
    let mut n = m + 1;
    while !is_prime(n) {
        n += 1;
    }
    n
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, SieveError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| SieveError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SieveError> {
        if !is_prime(self.p) {
            return Err(SieveError::Config(format!("p = {} is not prime", self.p)));
        }
        if self.l_schedule.is_empty() {
            return Err(SieveError::Config("empty l schedule".into()));
        }
        if !self.l_schedule.windows(2).all(|w| w[0] < w[1]) {
            return Err(SieveError::Config(
                "l schedule must be strictly increasing".into(),
            ));
        }
        if let Some(&l) = self.l_schedule.last() {
            if l > self.budget.walk_len {
                return Err(SieveError::Config(format!(
                    "walk length {l} exceeds budget {}",
                    self.budget.walk_len
                )));
            }
        }
        if self.trials > self.budget.trials_cap {
            return Err(SieveError::Config(format!(
                "trials {} exceed budget {}",
                self.trials, self.budget.trials_cap
            )));
        }
        if self.m_threshold < 2 {
            return Err(SieveError::Config("m_threshold must be >= 2".into()));
        }
        if !(self.pairing_constant > 0.0) || !(self.schedule_constant > 0.0) {
            return Err(SieveError::Config(
                "pairing and schedule constants must be positive".into(),
            ));
        }
        // every degree the strategy produces must be admissible
        for d in self.degrees()? {
            if !is_admissible(d, self.m_threshold).map_err(SieveError::Poly)? {
                return Err(SieveError::Config(format!(
                    "degree {d} is not admissible for M = {}",
                    self.m_threshold
                )));
            }
        }
        Ok(())
    }

    /// The degree list the modulus strategy produces, in increasing order.
    pub fn degrees(&self) -> Result<Vec<u64>, SieveError> {
        match &self.modulus_strategy {
            ModulusStrategy::Progression { count } => {
                admissible_sequence(self.m_threshold, *count).map_err(SieveError::Poly)
            }
            ModulusStrategy::PrimesAbove { count } => {
                let mut out = Vec::new();
                let mut d = first_prime_above(self.m_threshold);
                for _ in 0..*count {
                    out.push(d);
                    d = first_prime_above(d);
                }
                Ok(out)
            }
            ModulusStrategy::ExplicitDegrees { degrees } => {
                let mut out = degrees.clone();
                out.sort_unstable();
                out.dedup();
                if out.iter().any(|&d| d < 2) {
                    return Err(SieveError::Config("degrees must be >= 2".into()));
                }
                Ok(out)
            }
        }
    }

    pub fn build_generators(&self) -> Result<GenSet<PolyFp>, SieveError> {
        parse_generators(&self.generators, self.p)
    }
}

/// Parse a generator description: the named preset "nagao", or
/// matrices "a;b;c;d|a;b;c;d" with comma-separated coefficient lists.
pub fn parse_generators(desc: &str, p: u64) -> Result<GenSet<PolyFp>, SieveError> {
    if desc.trim() == "nagao" {
        return Ok(GenSet::nagao(p));
    }
    let mut mats = Vec::new();
    for chunk in desc.split('|') {
        let entries: Vec<&str> = chunk.split(';').map(str::trim).collect();
        if entries.len() != 4 {
            return Err(SieveError::Config(format!(
                "matrix {chunk:?} needs exactly four ';'-separated entries"
            )));
        }
        let coeffs: Vec<PolyFp> = entries
            .iter()
            .map(|e| parse_coeff_list(e, p))
            .collect::<Result<_, _>>()
            .map_err(SieveError::Poly)?;
        let [a, b, c, d]: [PolyFp; 4] = coeffs.try_into().expect("length checked");
        mats.push(Mat2::new_sl2(a, b, c, d).map_err(SieveError::Mat)?);
    }
    GenSet::new(mats).map_err(SieveError::Mat)
}
