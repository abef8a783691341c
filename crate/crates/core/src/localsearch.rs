//! Local search to a `(1+ε)`-approximate local maximum, warm-started from the
//! deterministic double greedy, plus the randomized double greedy baseline.
//!
//! A set `S` is a `(1+ε)`-approximate local maximum of `f` when
//! `(1+ε) f(S) >= f(S ∪ T)` and `(1+ε) f(S) >= f(S ∩ T)` for every `T`.
//! Local search only looks at single-element moves with the per-move
//! threshold `δ = ε/m`; under submodularity (and `f(S) >= 0`) the marginals
//! telescope, so single-element stability at `δ` gives the all-`T` property
//! at `ε`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::ValueOracle;
use crate::rng::Rng;
use crate::subset::Subset;
use crate::tolerance::approx_le;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsConfig {
    pub epsilon: f64,
    #[serde(default)]
    pub max_moves: Option<usize>,
}

impl LsConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        let cfg = LsConfig {
            epsilon,
            max_moves: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::validation(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Per-move improvement threshold `δ = ε/m`.
    pub fn move_threshold(&self, m: usize) -> f64 {
        self.epsilon / m.max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsResult {
    pub set: Subset,
    pub value: f64,
    pub moves: usize,
    pub warm_start_value: f64,
}

/// Deterministic double greedy. Returns the final set and its value; makes
/// exactly `2m + 2` queries. The result satisfies
/// `3 f(X) >= f(OPT) + f(∅) + f(M)` for submodular `f`.
pub fn double_greedy_det(oracle: &ValueOracle) -> Result<(Subset, f64)> {
    double_greedy(oracle, |a, b| a >= b)
}

/// Randomized double greedy: element `i` joins with probability
/// `a⁺ / (a⁺ + b⁺)`; when both clipped marginals vanish it joins iff `a >= b`.
pub fn double_greedy_rand(oracle: &ValueOracle, rng: &mut Rng) -> Result<(Subset, f64)> {
    double_greedy(oracle, |a, b| {
        let (ap, bp) = (a.max(0.0), b.max(0.0));
        if ap + bp == 0.0 {
            a >= b
        } else {
            rng.next_f64() < ap / (ap + bp)
        }
    })
}

fn double_greedy(oracle: &ValueOracle, add: impl FnMut(f64, f64) -> bool) -> Result<(Subset, f64)> {
    let ends = Endpoints::query(oracle)?;
    double_greedy_from(oracle, ends, false, add)
}

/// With `reuse`, the last step (where `X + i = Y` and `Y - i = X`) uses the
/// values already held instead of querying them.
fn double_greedy_from(
    oracle: &ValueOracle,
    ends: Endpoints,
    reuse: bool,
    mut add: impl FnMut(f64, f64) -> bool,
) -> Result<(Subset, f64)> {
    let m = oracle.ground_size();
    let mut x = oracle.empty_set();
    let mut y = oracle.full_set();
    let mut fx = ends.empty;
    let mut fy = ends.full;
    for i in 0..m {
        let xi = x.with(i);
        let yi = y.without(i);
        let (fxi, fyi) = if reuse && i + 1 == m {
            (fy, fx)
        } else {
            (oracle.evaluate(&xi)?, oracle.evaluate(&yi)?)
        };
        if add(fxi - fx, fyi - fy) {
            x = xi;
            fx = fxi;
        } else {
            y = yi;
            fy = fyi;
        }
    }
    debug_assert_eq!(x, y);
    Ok((x, fx))
}

/// `f(∅)` and `f(M)` of an oracle, when the caller already has them (e.g.
/// from [`ValueOracle::shift_with_endpoints`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoints {
    pub empty: f64,
    pub full: f64,
}

impl Endpoints {
    pub fn query(oracle: &ValueOracle) -> Result<Self> {
        Ok(Endpoints {
            empty: oracle.evaluate(&oracle.empty_set())?,
            full: oracle.evaluate(&oracle.full_set())?,
        })
    }

    /// `f(s)`, answered without a query when `s` is `∅` or `M`.
    pub fn lookup(&self, oracle: &ValueOracle, s: &Subset) -> Result<f64> {
        if s.ground_size() == oracle.ground_size() {
            if s.is_empty() {
                return Ok(self.empty);
            }
            if s.is_full() {
                return Ok(self.full);
            }
        }
        oracle.evaluate(s)
    }
}

/// Local search from the double-greedy set. Expects a shifted oracle
/// (`min(f(∅), f(M)) = 0`) but is total on any oracle.
pub fn ls_approx_local_max(oracle: &ValueOracle, cfg: &LsConfig) -> Result<LsResult> {
    let ends = Endpoints::query(oracle)?;
    ls_approx_local_max_from(oracle, cfg, ends)
}

/// As [`ls_approx_local_max`], reusing known endpoint values instead of
/// querying them again. `ends` must be the oracle's exact values.
pub fn ls_approx_local_max_from(oracle: &ValueOracle, cfg: &LsConfig, ends: Endpoints) -> Result<LsResult> {
    cfg.validate()?;
    let m = oracle.ground_size();
    let delta = cfg.move_threshold(m);
    let (mut set, mut value) = double_greedy_from(oracle, ends, true, |a, b| a >= b)?;
    let warm_start_value = value;
    let mut moves = 0;

    'search: loop {
        let bar = (1.0 + delta) * value.max(0.0);
        for j in 0..m {
            let cand = set.toggled(j);
            let v = ends.lookup(oracle, &cand)?;
            if v > bar {
                set = cand;
                value = v;
                moves += 1;
                if cfg.max_moves.is_some_and(|cap| moves > cap) {
                    return Err(Error::MoveLimit {
                        max_moves: cfg.max_moves.unwrap_or_default(),
                        partial: Box::new(LsResult {
                            set,
                            value,
                            moves,
                            warm_start_value,
                        }),
                    });
                }
                continue 'search;
            }
        }
        break;
    }

    if warm_start_value == 0.0 && moves == 0 {
        // Zero optimum: every set is worth at most 0, pick the better endpoint.
        if ends.full > ends.empty {
            set = oracle.full_set();
            value = ends.full;
        } else {
            set = oracle.empty_set();
            value = ends.empty;
        }
    }

    Ok(LsResult {
        set,
        value,
        moves,
        warm_start_value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalMaxMode {
    /// Single-element moves against `(1 + ε/m) · max(f(S), 0)`.
    Single,
    /// Every `T ⊆ M` against `(1+ε) f(S)`; needs `m <= 16`.
    Exhaustive,
}

pub const MAX_EXHAUSTIVE_LOCAL_MAX_M: usize = 16;

pub fn is_approx_local_max(oracle: &ValueOracle, s: &Subset, epsilon: f64, mode: LocalMaxMode) -> Result<bool> {
    let m = oracle.ground_size();
    let fs = oracle.evaluate(s)?;
    match mode {
        LocalMaxMode::Single => {
            let bar = (1.0 + epsilon / m.max(1) as f64) * fs.max(0.0);
            for j in 0..m {
                if !approx_le(oracle.evaluate(&s.toggled(j))?, bar) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        LocalMaxMode::Exhaustive => {
            if m > MAX_EXHAUSTIVE_LOCAL_MAX_M {
                return Err(Error::validation(format!(
                    "exhaustive local-maximum check needs m <= {MAX_EXHAUSTIVE_LOCAL_MAX_M}, got {m}"
                )));
            }
            let bar = (1.0 + epsilon) * fs;
            // {S ∪ T} ranges over the supersets of S and {S ∩ T} over its subsets.
            let inside = s.members();
            let outside = s.complement().members();
            for (base, free) in [(s, &outside), (&oracle.empty_set(), &inside)] {
                for bits in 0..1u64 << free.len() {
                    let mut t = base.clone();
                    for (b, &e) in free.iter().enumerate() {
                        if bits >> b & 1 == 1 {
                            t.insert(e);
                        }
                    }
                    if !approx_le(oracle.evaluate(&t)?, bar) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}
