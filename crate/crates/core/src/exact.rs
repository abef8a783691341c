//! Brute-force ground truth for small ground sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::ValueOracle;
use crate::subset::Subset;

/// Default cap on `m` for exhaustive optimisation.
pub const DEFAULT_MAX_BRUTE_M: usize = 24;
/// Environment variable overriding [`DEFAULT_MAX_BRUTE_M`].
pub const MAX_BRUTE_M_ENV: &str = "SUBMAX_MAX_BRUTE_M";
pub const MAX_LOCAL_MAXIMA_M: usize = 20;

/// The brute-force cap in effect (env override, clamped to 63).
pub fn max_brute_m() -> usize {
    std::env::var(MAX_BRUTE_M_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(DEFAULT_MAX_BRUTE_M)
        .min(63)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub opt_set: Subset,
    pub opt_value: f64,
    pub evaluations: u64,
}

pub fn brute_force_opt(oracle: &ValueOracle) -> Result<ExactResult> {
    brute_force_opt_capped(oracle, max_brute_m())
}

/// Enumerates all `2^m` subsets in increasing bitmask order; the first
/// maximiser wins ties.
pub fn brute_force_opt_capped(oracle: &ValueOracle, cap: usize) -> Result<ExactResult> {
    let m = oracle.ground_size();
    if m > cap.min(63) {
        return Err(Error::validation(format!("brute force needs m <= {cap}, got {m}")));
    }
    let mut best_mask = 0u64;
    let mut best = f64::NEG_INFINITY;
    for mask in 0..1u64 << m {
        let v = oracle.evaluate(&Subset::from_mask(m, mask))?;
        if v > best {
            best = v;
            best_mask = mask;
        }
    }
    Ok(ExactResult {
        opt_set: Subset::from_mask(m, best_mask),
        opt_value: best,
        evaluations: 1 << m,
    })
}

/// All values `f(S)` indexed by bitmask.
pub fn value_table(oracle: &ValueOracle) -> Result<Vec<f64>> {
    let m = oracle.ground_size();
    if m > max_brute_m() {
        return Err(Error::validation(format!(
            "value table needs m <= {}, got {m}",
            max_brute_m()
        )));
    }
    (0..1u64 << m)
        .map(|mask| oracle.evaluate(&Subset::from_mask(m, mask)))
        .collect()
}

/// Every `S` that no single addition or removal strictly improves, in
/// increasing bitmask order.
pub fn enumerate_exact_local_maxima(oracle: &ValueOracle) -> Result<Vec<Subset>> {
    let m = oracle.ground_size();
    if m > MAX_LOCAL_MAXIMA_M {
        return Err(Error::validation(format!(
            "local-maxima enumeration needs m <= {MAX_LOCAL_MAXIMA_M}, got {m}"
        )));
    }
    let values = value_table(oracle)?;
    Ok((0..values.len())
        .filter(|&mask| (0..m).all(|j| values[mask ^ 1 << j] <= values[mask]))
        .map(|mask| Subset::from_mask(m, mask as u64))
        .collect())
}

/// `value / opt`, with `0/0 = 1`.
pub fn ratio(value: f64, exact: &ExactResult) -> Result<f64> {
    let opt = exact.opt_value;
    if opt < 0.0 {
        return Err(Error::validation(format!(
            "ratio needs a non-negative optimum, got {opt}"
        )));
    }
    if opt == 0.0 {
        return if value == 0.0 {
            Ok(1.0)
        } else {
            Err(Error::validation(format!("value {value} against a zero optimum")))
        };
    }
    Ok(value / opt)
}
