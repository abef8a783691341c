//! Concrete non-negative submodular functions: weighted cuts (undirected and
//! directed) and weighted coverage, seeded random generators for both, the
//! JSON instance format, and a submodularity / non-negativity checker.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{SetFunction, ValueOracle};
use crate::rng::Rng;
use crate::subset::Subset;
use crate::tolerance::approx_ge;

pub type Edge = (usize, usize, f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Cut,
    DirectedCut,
    Coverage,
    RandomCoverage,
    RandomCut,
}

impl InstanceKind {
    pub fn is_cut_like(self) -> bool {
        matches!(
            self,
            InstanceKind::Cut | InstanceKind::DirectedCut | InstanceKind::RandomCut
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Cut => "cut",
            InstanceKind::DirectedCut => "directed-cut",
            InstanceKind::Coverage => "coverage",
            InstanceKind::RandomCoverage => "random-coverage",
            InstanceKind::RandomCut => "random-cut",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cut" => InstanceKind::Cut,
            "directed-cut" => InstanceKind::DirectedCut,
            "coverage" => InstanceKind::Coverage,
            "random-coverage" => InstanceKind::RandomCoverage,
            "random-cut" => InstanceKind::RandomCut,
            other => return Err(Error::validation(format!("unknown instance kind {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Edges(Vec<Edge>),
    Coverage {
        universe: usize,
        weights: Vec<f64>,
        sets: Vec<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub kind: InstanceKind,
    pub m: usize,
    pub payload: Payload,
    pub seed: Option<u64>,
}

impl Instance {
    pub fn cut(m: usize, edges: Vec<Edge>) -> Result<Self> {
        Instance::checked(InstanceKind::Cut, m, Payload::Edges(edges), None)
    }

    pub fn directed_cut(m: usize, arcs: Vec<Edge>) -> Result<Self> {
        Instance::checked(InstanceKind::DirectedCut, m, Payload::Edges(arcs), None)
    }

    pub fn coverage(m: usize, universe: usize, weights: Vec<f64>, sets: Vec<Vec<usize>>) -> Result<Self> {
        Instance::checked(
            InstanceKind::Coverage,
            m,
            Payload::Coverage {
                universe,
                weights,
                sets,
            },
            None,
        )
    }

    fn checked(kind: InstanceKind, m: usize, payload: Payload, seed: Option<u64>) -> Result<Self> {
        let inst = Instance { kind, m, payload, seed };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        match (&self.payload, self.kind.is_cut_like()) {
            (Payload::Edges(edges), true) => {
                for (i, &(u, v, w)) in edges.iter().enumerate() {
                    if u >= m || v >= m {
                        return Err(Error::validation(format!(
                            "edges[{i}]: endpoint {} out of range for m={m}",
                            u.max(v)
                        )));
                    }
                    check_weight(w, || format!("edges[{i}]"))?;
                }
            }
            (
                Payload::Coverage {
                    universe,
                    weights,
                    sets,
                },
                false,
            ) => {
                if weights.len() != *universe {
                    return Err(Error::validation(format!(
                        "weights has {} entries for a universe of {universe}",
                        weights.len()
                    )));
                }
                for (i, &w) in weights.iter().enumerate() {
                    check_weight(w, || format!("weights[{i}]"))?;
                }
                if sets.len() != m {
                    return Err(Error::validation(format!("sets has {} entries for m={m}", sets.len())));
                }
                for (i, set) in sets.iter().enumerate() {
                    if let Some(&u) = set.iter().find(|&&u| u >= *universe) {
                        return Err(Error::validation(format!(
                            "sets[{i}]: item {u} out of range for universe={universe}"
                        )));
                    }
                }
            }
            _ => {
                return Err(Error::validation(format!(
                    "payload does not match instance kind {}",
                    self.kind
                )))
            }
        }
        Ok(())
    }

    pub fn set_function(&self) -> Arc<dyn SetFunction> {
        match (&self.payload, self.kind) {
            (Payload::Edges(edges), InstanceKind::DirectedCut) => Arc::new(DirectedCutFunction {
                m: self.m,
                arcs: edges.clone(),
            }),
            (Payload::Edges(edges), _) => Arc::new(CutFunction {
                m: self.m,
                edges: edges.clone(),
            }),
            (
                Payload::Coverage {
                    universe,
                    weights,
                    sets,
                },
                _,
            ) => Arc::new(CoverageFunction {
                universe: *universe,
                weights: weights.clone(),
                sets: sets.clone(),
            }),
        }
    }

    /// A fresh oracle with its own ledger.
    pub fn oracle(&self) -> ValueOracle {
        ValueOracle::new(self.set_function())
    }
}

fn check_weight(w: f64, at: impl Fn() -> String) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::validation(format!(
            "{}: weight {w} must be finite and non-negative",
            at()
        )));
    }
    Ok(())
}

/// Convenience for [`Instance::oracle`].
pub fn build_oracle(inst: &Instance) -> Result<ValueOracle> {
    inst.validate()?;
    Ok(inst.oracle())
}

#[derive(Debug, Clone)]
pub struct CutFunction {
    m: usize,
    edges: Vec<Edge>,
}

impl SetFunction for CutFunction {
    fn ground_size(&self) -> usize {
        self.m
    }

    fn value(&self, s: &Subset) -> f64 {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| s.contains(u) != s.contains(v))
            .map(|e| e.2)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct DirectedCutFunction {
    m: usize,
    arcs: Vec<Edge>,
}

impl SetFunction for DirectedCutFunction {
    fn ground_size(&self) -> usize {
        self.m
    }

    fn value(&self, s: &Subset) -> f64 {
        self.arcs
            .iter()
            .filter(|&&(u, v, _)| s.contains(u) && !s.contains(v))
            .map(|e| e.2)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct CoverageFunction {
    universe: usize,
    weights: Vec<f64>,
    sets: Vec<Vec<usize>>,
}

impl SetFunction for CoverageFunction {
    fn ground_size(&self) -> usize {
        self.sets.len()
    }

    fn value(&self, s: &Subset) -> f64 {
        let mut covered = Subset::empty(self.universe);
        for i in s.iter() {
            for &u in &self.sets[i] {
                covered.insert(u);
            }
        }
        // summed in item order so equal covers give bit-identical values
        covered.iter().map(|u| self.weights[u]).sum()
    }
}

/// Parameters for [`random_instance`]. Cut kinds read `edge_probability` and
/// `weight_range`; coverage reads `universe`, `density`, and `weight_range`
/// (for the item weights).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomParams {
    pub edge_probability: f64,
    pub weight_range: (f64, f64),
    pub universe: usize,
    pub density: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            edge_probability: 0.5,
            weight_range: (0.0, 1.0),
            universe: 8,
            density: 0.4,
        }
    }
}

impl RandomParams {
    fn validate(&self, kind: InstanceKind) -> Result<()> {
        let (lo, hi) = self.weight_range;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return Err(Error::validation(format!(
                "weight range [{lo}, {hi}] must satisfy 0 <= lo <= hi"
            )));
        }
        match kind {
            InstanceKind::RandomCut if !(0.0..=1.0).contains(&self.edge_probability) => Err(Error::validation(
                format!("edge probability {} not in [0, 1]", self.edge_probability),
            )),
            InstanceKind::RandomCoverage if !(0.0..=1.0).contains(&self.density) => {
                Err(Error::validation(format!("set density {} not in [0, 1]", self.density)))
            }
            _ => Ok(()),
        }
    }
}

/// Deterministic in `(kind, m, seed, params)`.
///
/// random-cut: for each pair `i < j` in lexicographic order draw `u`; the edge
/// is present iff `u < p`, and then gets weight `lo + (hi - lo) * r`.
/// random-coverage: item weights are drawn first (item order), then for each
/// set and each item, membership iff a fresh draw is `< density`.
pub fn random_instance(kind: InstanceKind, m: usize, seed: u64, params: &RandomParams) -> Result<Instance> {
    if m == 0 {
        return Err(Error::validation("random instances need m >= 1"));
    }
    params.validate(kind)?;
    let mut rng = Rng::new(seed);
    let (lo, hi) = params.weight_range;
    let payload = match kind {
        InstanceKind::RandomCut => {
            let mut edges = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    if rng.next_f64() < params.edge_probability {
                        edges.push((i, j, lo + (hi - lo) * rng.next_f64()));
                    }
                }
            }
            Payload::Edges(edges)
        }
        InstanceKind::RandomCoverage => {
            let universe = params.universe;
            let weights = (0..universe).map(|_| lo + (hi - lo) * rng.next_f64()).collect();
            let sets = (0..m)
                .map(|_| (0..universe).filter(|_| rng.next_f64() < params.density).collect())
                .collect();
            Payload::Coverage {
                universe,
                weights,
                sets,
            }
        }
        other => {
            return Err(Error::validation(format!("{other} is not a random instance kind")));
        }
    };
    Instance::checked(kind, m, payload, Some(seed))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    kind: InstanceKind,
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<Edge>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    universe: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sets: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

pub fn serialize(inst: &Instance) -> String {
    let mut file = InstanceFile {
        kind: inst.kind,
        m: inst.m,
        edges: None,
        universe: None,
        weights: None,
        sets: None,
        seed: inst.seed,
    };
    match &inst.payload {
        Payload::Edges(edges) => file.edges = Some(edges.clone()),
        Payload::Coverage {
            universe,
            weights,
            sets,
        } => {
            file.universe = Some(*universe);
            file.weights = Some(weights.clone());
            file.sets = Some(sets.clone());
        }
    }
    serde_json::to_string(&file).expect("instance serialization cannot fail")
}

pub fn parse(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let payload = if file.kind.is_cut_like() {
        if file.universe.is_some() || file.weights.is_some() || file.sets.is_some() {
            return Err(Error::validation(format!(
                "{} instances take only \"edges\"",
                file.kind
            )));
        }
        Payload::Edges(file.edges.ok_or_else(|| Error::validation("missing field \"edges\""))?)
    } else {
        if file.edges.is_some() {
            return Err(Error::validation(format!(
                "{} instances do not take \"edges\"",
                file.kind
            )));
        }
        Payload::Coverage {
            universe: file
                .universe
                .ok_or_else(|| Error::validation("missing field \"universe\""))?,
            weights: file
                .weights
                .ok_or_else(|| Error::validation("missing field \"weights\""))?,
            sets: file.sets.ok_or_else(|| Error::validation("missing field \"sets\""))?,
        }
    };
    Instance::checked(file.kind, file.m, payload, file.seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// All `S` and all pairs `j < k` outside `S`; needs `m <= 14`.
    Exhaustive,
    /// Random `(S, j, k)` triples.
    Sampled,
}

pub const MAX_EXHAUSTIVE_CHECK_M: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// `f(S+j) + f(S+k) < f(S+j+k) + f(S)`.
    Submodularity {
        set: Subset,
        j: usize,
        k: usize,
        lhs: f64,
        rhs: f64,
    },
    Negative {
        set: Subset,
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass { triples_checked: u64 },
    Fail(Witness),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

/// Checks the pairwise-element form of submodularity,
/// `f(S+j) + f(S+k) >= f(S+j+k) + f(S)` for `j != k` outside `S`, and `f >= 0`
/// at every evaluated set. `trials` and `rng` are only used in sampled mode.
pub fn check_submodular(oracle: &ValueOracle, mode: CheckMode, trials: u64, rng: &mut Rng) -> Result<Verdict> {
    let m = oracle.ground_size();
    match mode {
        CheckMode::Exhaustive => {
            if m > MAX_EXHAUSTIVE_CHECK_M {
                return Err(Error::validation(format!(
                    "exhaustive submodularity check needs m <= {MAX_EXHAUSTIVE_CHECK_M}, got {m}"
                )));
            }
            let values = (0..1u64 << m)
                .map(|mask| oracle.evaluate(&Subset::from_mask(m, mask)))
                .collect::<Result<Vec<_>>>()?;
            let mut triples = 0;
            for (mask, &fs) in values.iter().enumerate() {
                if fs < 0.0 {
                    return Ok(Verdict::Fail(Witness::Negative {
                        set: Subset::from_mask(m, mask as u64),
                        value: fs,
                    }));
                }
                for j in (0..m).filter(|j| mask >> j & 1 == 0) {
                    for k in (j + 1..m).filter(|k| mask >> k & 1 == 0) {
                        triples += 1;
                        let lhs = values[mask | 1 << j] + values[mask | 1 << k];
                        let rhs = values[mask | 1 << j | 1 << k] + fs;
                        if !approx_ge(lhs, rhs) {
                            return Ok(Verdict::Fail(Witness::Submodularity {
                                set: Subset::from_mask(m, mask as u64),
                                j,
                                k,
                                lhs,
                                rhs,
                            }));
                        }
                    }
                }
            }
            Ok(Verdict::Pass {
                triples_checked: triples,
            })
        }
        CheckMode::Sampled => {
            let mut triples = 0;
            if m < 2 {
                // no pairs exist; only non-negativity can fail
                for s in [Subset::empty(m), Subset::full(m)] {
                    let v = oracle.evaluate(&s)?;
                    if v < 0.0 {
                        return Ok(Verdict::Fail(Witness::Negative { set: s, value: v }));
                    }
                }
                return Ok(Verdict::Pass { triples_checked: 0 });
            }
            for _ in 0..trials {
                let j = rng.below(m as u64) as usize;
                let mut k = rng.below(m as u64 - 1) as usize;
                if k >= j {
                    k += 1;
                }
                let mut s = Subset::empty(m);
                for i in 0..m {
                    if i != j && i != k && rng.next_bool() {
                        s.insert(i);
                    }
                }
                let sj = s.with(j);
                let sk = s.with(k);
                let sjk = sj.with(k);
                let vals = [
                    (oracle.evaluate(&s)?, &s),
                    (oracle.evaluate(&sj)?, &sj),
                    (oracle.evaluate(&sk)?, &sk),
                    (oracle.evaluate(&sjk)?, &sjk),
                ];
                if let Some((v, set)) = vals.iter().find(|(v, _)| *v < 0.0) {
                    return Ok(Verdict::Fail(Witness::Negative {
                        set: (*set).clone(),
                        value: *v,
                    }));
                }
                triples += 1;
                let lhs = vals[1].0 + vals[2].0;
                let rhs = vals[3].0 + vals[0].0;
                if !approx_ge(lhs, rhs) {
                    let (j, k) = (j.min(k), j.max(k));
                    return Ok(Verdict::Fail(Witness::Submodularity { set: s, j, k, lhs, rhs }));
                }
            }
            Ok(Verdict::Pass {
                triples_checked: triples,
            })
        }
    }
}
