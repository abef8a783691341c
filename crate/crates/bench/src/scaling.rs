//! Query-count scaling: fit `ln(queries) = slope * ln(m) + intercept`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use submax_core::{alg, random_instance, AlgConfig, InstanceKind, RandomParams, Rng, ValueOracle};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RandomCut,
    RandomCoverage,
    /// The constant-zero function.
    Zero,
}

impl Family {
    /// The family member of size `m`; random families draw from `seed` and `m`.
    pub fn oracle(self, m: usize, seed: u64) -> Result<ValueOracle> {
        let kind = match self {
            Family::Zero => return Ok(ValueOracle::from_fn(m, |_| 0.0)),
            Family::RandomCut => InstanceKind::RandomCut,
            Family::RandomCoverage => InstanceKind::RandomCoverage,
        };
        let inst = random_instance(kind, m, Rng::derive_seed(seed, m as u64), &RandomParams::default())?;
        Ok(inst.oracle())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::RandomCut => "random-cut",
            Family::RandomCoverage => "random-coverage",
            Family::Zero => "zero",
        })
    }
}

impl FromStr for Family {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-cut" => Ok(Family::RandomCut),
            "random-coverage" => Ok(Family::RandomCoverage),
            "zero" => Ok(Family::Zero),
            other => Err(BenchError::config(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub m: usize,
    pub queries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub family: Family,
    pub epsilon: f64,
    pub depth: usize,
    pub seed: u64,
    pub points: Vec<ScalingPoint>,
    pub slope: f64,
    pub intercept: f64,
    /// `ln(queries) - fitted`, per point.
    pub residuals: Vec<f64>,
}

pub const DEFAULT_SCALING_DEPTH: usize = 2;
pub const DEFAULT_SCALING_SEED: u64 = 0;

pub fn scaling_experiment(family: Family, sizes: &[usize], epsilon: f64) -> Result<ScalingFit> {
    scaling_experiment_with(family, sizes, epsilon, DEFAULT_SCALING_DEPTH, DEFAULT_SCALING_SEED)
}

pub fn scaling_experiment_with(
    family: Family,
    sizes: &[usize],
    epsilon: f64,
    depth: usize,
    seed: u64,
) -> Result<ScalingFit> {
    if sizes.len() < 3 {
        return Err(
            submax_core::Error::Validation(format!("scaling fit needs at least 3 sizes, got {}", sizes.len())).into(),
        );
    }
    if sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(submax_core::Error::Validation(format!(
            "sizes must be positive and strictly ascending, got {sizes:?}"
        ))
        .into());
    }
    let cfg = AlgConfig::new(epsilon, depth)?;
    let mut points = Vec::with_capacity(sizes.len());
    for &m in sizes {
        let oracle = family.oracle(m, seed)?;
        alg(&oracle, &cfg)?;
        points.push(ScalingPoint {
            m,
            queries: oracle.ledger().count(),
        });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((p.m as f64).ln(), (p.queries as f64).ln()))
        .collect();
    let (slope, intercept) = least_squares(&logs);
    let residuals = logs.iter().map(|&(x, y)| y - (slope * x + intercept)).collect();
    Ok(ScalingFit {
        family,
        epsilon,
        depth,
        seed,
        points,
        slope,
        intercept,
        residuals,
    })
}

/// Ordinary least squares `(slope, intercept)`. Needs two distinct `x`.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
