//! Decidable operator equality with a randomized numeric cross-check.

use std::f64::consts::FRAC_PI_2;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::operator::DiffOperator;
use super::ring::TrigPoint;
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5EED;

static ORACLE_SEED: AtomicU64 = AtomicU64::new(DEFAULT_SEED);

/// Seed picked up by [`NumericOracle::default`]; meant to be set once at startup.
pub fn set_oracle_seed(seed: u64) {
    ORACLE_SEED.store(seed, Ordering::Relaxed);
}

pub fn oracle_seed() -> u64 {
    ORACLE_SEED.load(Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionPath {
    /// Canonical forms compared directly.
    Symbolic,
    /// k-dependent exponents were present; the numeric oracle agreed.
    SymbolicAndNumeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Equality {
    pub equal: bool,
    pub path: DecisionPath,
    pub residual_terms: usize,
}

/// Randomized evaluation oracle: every coefficient of the residual must
/// cancel to within `rel_tol` of its own term magnitudes at each point.
#[derive(Clone, Debug)]
pub struct NumericOracle {
    pub seed: u64,
    pub points: usize,
    pub param_samples: usize,
    pub rel_tol: f64,
}

impl Default for NumericOracle {
    fn default() -> Self {
        Self { seed: oracle_seed(), points: 20, param_samples: 3, rel_tol: 1e-9 }
    }
}

impl NumericOracle {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    /// Random rational `(q, k)` samples in `[1/2, 2] x [1/2, 3]`.
    fn param_samples(&self, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
        (0..self.param_samples)
            .map(|_| {
                let q = rng.gen_range(4..=16) as f64 / 8.0;
                let k = rng.gen_range(4..=24) as f64 / 8.0;
                (q, k)
            })
            .collect()
    }

    /// True when `op` vanishes at every sampled point.
    pub fn is_zero(&self, op: &DiffOperator) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for (q, k) in self.param_samples(&mut rng) {
            let compiled: Vec<_> = op.terms().map(|(_, f)| f.compile(q, k)).collect();
            let y_max = FRAC_PI_2 / q - 0.1;
            for _ in 0..self.points {
                let x = rng.gen_range(0.1..2.0);
                let y = rng.gen_range(-y_max..y_max);
                let pt = TrigPoint::from_xy(x, y, q);
                for c in &compiled {
                    let v = c.eval(&pt);
                    let scale = c.magnitude(&pt).max(f64::MIN_POSITIVE);
                    if !(v.abs() <= self.rel_tol * scale) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Decides `a == b`. The canonical form is unique, so the symbolic verdict
/// stands on its own when no exponent depends on `k`; otherwise the numeric
/// oracle runs as well and a disagreement is reported as an error.
pub fn op_equals(a: &DiffOperator, b: &DiffOperator, oracle: &NumericOracle) -> Result<Equality> {
    let residual = a - b;
    let symbolic = residual.is_zero();
    let residual_terms = residual.term_count();
    if !(a.has_k_exponents() || b.has_k_exponents()) {
        return Ok(Equality { equal: symbolic, path: DecisionPath::Symbolic, residual_terms });
    }
    let numeric = oracle.is_zero(&residual);
    if numeric != symbolic {
        return Err(Error::OracleInconclusive { symbolic, numeric });
    }
    Ok(Equality { equal: symbolic, path: DecisionPath::SymbolicAndNumeric, residual_terms })
}
