//! The recursive composition algorithm: find an approximate local maximum
//! `S` of the shifted function, recurse on the restriction to `S^c` and on
//! the pinned function `T -> f'(S^c ∪ T)` over `S`, and return the best of
//! `S`, `S^c`, `T1 ∪ T2`, `M`, `∅`.
//!
//! Every call records a [`TraceNode`]; [`verify_trace`] checks the
//! inequalities the ratio analysis relies on against brute-force optima.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::brute_force_opt;
use crate::localsearch::{ls_approx_local_max_from, Endpoints, LsConfig};
use crate::oracle::{lift, QueryLedger, ValueOracle};
use crate::subset::Subset;
use crate::tolerance::slack_scale;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgConfig {
    pub epsilon: f64,
    pub nrounds: usize,
}

impl AlgConfig {
    pub fn new(epsilon: f64, nrounds: usize) -> Result<Self> {
        let cfg = AlgConfig { epsilon, nrounds };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::validation(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Which candidate the final argmax picked. Declaration order is the
/// tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Candidate {
    S,
    SComplement,
    T1UnionT2,
    Full,
    Empty,
}

/// One call of the algorithm. Values named `*_value` are under the node's
/// shifted oracle `f' = f - shift`; `value` is the returned set's value under
/// the node's input oracle `f`. Set fields are member lists in the node's
/// local indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceNode {
    pub depth: usize,
    /// Recursion rounds still available at this node.
    pub rounds: usize,
    pub ground_size: usize,
    pub shift: f64,
    pub s: Vec<usize>,
    pub s_value: f64,
    pub s_comp_value: f64,
    pub empty_value: f64,
    pub full_value: f64,
    pub t1_value: Option<f64>,
    pub t2_value: Option<f64>,
    pub t1_union_t2_value: Option<f64>,
    pub chosen: Candidate,
    pub result: Vec<usize>,
    pub value: f64,
    pub ls_moves: usize,
    pub warm_start_value: f64,
    /// Queries spent inside local search at this node.
    pub ls_queries: u64,
    /// Queries at this node excluding its children.
    pub local_queries: u64,
    /// Queries of the whole subtree.
    pub queries: u64,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    pub fn recursed(&self) -> bool {
        !self.children.is_empty()
    }

    /// The largest recorded candidate value.
    pub fn best_candidate_value(&self) -> f64 {
        [
            Some(self.s_value),
            Some(self.s_comp_value),
            self.t1_union_t2_value,
            Some(self.full_value),
            Some(self.empty_value),
        ]
        .into_iter()
        .flatten()
        .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn chosen_value(&self) -> Option<f64> {
        match self.chosen {
            Candidate::S => Some(self.s_value),
            Candidate::SComplement => Some(self.s_comp_value),
            Candidate::T1UnionT2 => self.t1_union_t2_value,
            Candidate::Full => Some(self.full_value),
            Candidate::Empty => Some(self.empty_value),
        }
    }

    /// Pre-order walk with dotted paths (`r`, `r.1`, `r.2`, `r.1.2`, ...).
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&str, &'a TraceNode)) {
        fn go<'a>(node: &'a TraceNode, path: String, visit: &mut dyn FnMut(&str, &'a TraceNode)) {
            visit(&path, node);
            for (i, c) in node.children.iter().enumerate() {
                go(c, format!("{path}.{}", i + 1), visit);
            }
        }
        go(self, "r".to_string(), visit);
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(TraceNode::node_count).sum::<usize>()
    }

    pub fn total_moves(&self) -> usize {
        self.ls_moves + self.children.iter().map(TraceNode::total_moves).sum::<usize>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization cannot fail")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgOutcome {
    pub set: Subset,
    pub value: f64,
    pub trace: TraceNode,
}

pub fn alg(oracle: &ValueOracle, cfg: &AlgConfig) -> Result<AlgOutcome> {
    cfg.validate()?;
    let ls_cfg = LsConfig::new(cfg.epsilon)?;
    solve(oracle, &ls_cfg, cfg.nrounds, 0)
}

fn solve(oracle: &ValueOracle, ls_cfg: &LsConfig, rounds: usize, depth: usize) -> Result<AlgOutcome> {
    let ledger = oracle.ledger().clone();
    let start = ledger.count();
    let m = oracle.ground_size();

    let shifted = oracle.shift_with_endpoints()?;
    let fp = &shifted.oracle;
    let before_ls = ledger.count();
    let ends = Endpoints {
        empty: shifted.empty_value,
        full: shifted.full_value,
    };
    let ls = ls_approx_local_max_from(fp, ls_cfg, ends)?;
    let ls_queries = ledger.count() - before_ls;

    let s = ls.set.clone();
    let s_comp = s.complement();
    let s_comp_value = ends.lookup(fp, &s_comp)?;

    let mut children = Vec::new();
    let mut union = None;
    let (mut t1_value, mut t2_value, mut union_value) = (None, None, None);
    if rounds > 0 && !s.is_empty() && !s.is_full() {
        let child_level = oracle.level() + 1;
        let f1 = fp.restrict(&s_comp)?.at_level(child_level);
        let t1 = solve(&f1, ls_cfg, rounds - 1, depth + 1)?;
        let f2 = fp.pin_union(&s_comp, &s)?.at_level(child_level);
        let t2 = solve(&f2, ls_cfg, rounds - 1, depth + 1)?;

        let t1_global = lift(&t1.set, &s_comp.members(), m)?;
        let t2_global = lift(&t2.set, &s.members(), m)?;
        let u = t1_global.union(&t2_global)?;
        union_value = Some(ends.lookup(fp, &u)?);
        t1_value = Some(t1.value);
        t2_value = Some(t2.value);
        union = Some(u);
        children.push(t1.trace);
        children.push(t2.trace);
    }

    // tie-break: first maximal value in declaration order
    let mut candidates = vec![
        (Candidate::S, s.clone(), ls.value),
        (Candidate::SComplement, s_comp, s_comp_value),
    ];
    if let (Some(u), Some(uv)) = (union, union_value) {
        candidates.push((Candidate::T1UnionT2, u, uv));
    }
    candidates.push((Candidate::Full, oracle.full_set(), shifted.full_value));
    candidates.push((Candidate::Empty, oracle.empty_set(), shifted.empty_value));
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        if c.2 > candidates[best].2 {
            best = i;
        }
    }
    let (chosen, set, _) = candidates.swap_remove(best);
    let value = oracle.evaluate(&set)?;

    let queries = ledger.count() - start;
    let child_queries: u64 = children.iter().map(|c: &TraceNode| c.queries).sum();
    let trace = TraceNode {
        depth,
        rounds,
        ground_size: m,
        shift: shifted.constant,
        s: s.members(),
        s_value: ls.value,
        s_comp_value,
        empty_value: shifted.empty_value,
        full_value: shifted.full_value,
        t1_value,
        t2_value,
        t1_union_t2_value: union_value,
        chosen,
        result: set.members(),
        value,
        ls_moves: ls.moves,
        warm_start_value: ls.warm_start_value,
        ls_queries,
        local_queries: queries - child_queries,
        queries,
        children,
    };
    Ok(AlgOutcome { set, value, trace })
}

/// Re-derives every node's shifted oracle from the root oracle and the `S`
/// recorded in the trace, calling `visit(path, node, shifted_oracle)`
/// pre-order. Queries go to a private ledger.
pub fn replay_node_oracles(
    oracle: &ValueOracle,
    trace: &TraceNode,
    visit: &mut dyn FnMut(&str, &TraceNode, &ValueOracle) -> Result<()>,
) -> Result<()> {
    fn go(
        input: &ValueOracle,
        node: &TraceNode,
        path: &str,
        visit: &mut dyn FnMut(&str, &TraceNode, &ValueOracle) -> Result<()>,
    ) -> Result<()> {
        if input.ground_size() != node.ground_size {
            return Err(Error::validation(format!(
                "trace node {path} has ground size {}, oracle has {}",
                node.ground_size,
                input.ground_size()
            )));
        }
        let shifted = input.shift()?;
        visit(path, node, &shifted)?;
        if node.recursed() {
            if node.children.len() != 2 {
                return Err(Error::validation(format!(
                    "trace node {path} has {} children",
                    node.children.len()
                )));
            }
            let s = Subset::from_indices(node.ground_size, node.s.iter().copied())?;
            let sc = s.complement();
            go(&shifted.restrict(&sc)?, &node.children[0], &format!("{path}.1"), visit)?;
            go(
                &shifted.pin_union(&sc, &s)?,
                &node.children[1],
                &format!("{path}.2"),
                visit,
            )?;
        }
        Ok(())
    }
    go(&oracle.rebind(QueryLedger::new()), trace, "r", visit)
}

/// Brute-force optimum of each node's shifted oracle, mirroring the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeOptima {
    pub opt: f64,
    pub children: Vec<NodeOptima>,
}

pub fn node_optima(oracle: &ValueOracle, trace: &TraceNode) -> Result<NodeOptima> {
    let mut flat = Vec::new();
    replay_node_oracles(oracle, trace, &mut |_, _, shifted| {
        flat.push(brute_force_opt(shifted)?.opt_value);
        Ok(())
    })?;
    // rebuild the tree from the pre-order sequence
    fn build(node: &TraceNode, flat: &mut std::slice::Iter<'_, f64>) -> NodeOptima {
        let opt = *flat.next().expect("one optimum per node");
        NodeOptima {
            opt,
            children: node.children.iter().map(|c| build(c, flat)).collect(),
        }
    }
    Ok(build(trace, &mut flat.iter()))
}

/// Arguments of the `α_i` lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBound {
    pub x_opt: f64,
    pub x_0: f64,
    pub x_m: f64,
    pub epsilon: f64,
}

impl AlphaBound {
    pub fn new(x_opt: f64, x_0: f64, x_m: f64, epsilon: f64) -> Self {
        AlphaBound {
            x_opt,
            x_0,
            x_m,
            epsilon,
        }
    }

    fn check_non_negative(&self) -> Result<()> {
        if self.x_opt < 0.0 || self.x_0 < 0.0 || self.x_m < 0.0 {
            return Err(Error::validation(format!(
                "alpha bound arguments must be non-negative: ({}, {}, {})",
                self.x_opt, self.x_0, self.x_m
            )));
        }
        Ok(())
    }

    fn clamped(self) -> Self {
        AlphaBound {
            x_opt: self.x_opt.max(0.0),
            x_0: self.x_0.max(0.0),
            x_m: self.x_m.max(0.0),
            ..self
        }
    }
}

/// Depth-0 bound: `max((x_opt + x_0 + x_m) / 3, x_m, x_0)`.
pub fn alpha0_bound(b: &AlphaBound) -> Result<f64> {
    b.check_non_negative()?;
    Ok(((b.x_opt + b.x_0 + b.x_m) / 3.0).max(b.x_m).max(b.x_0))
}

/// Depth-1 bound for the two covered cases (`x_0 = 0` or `x_m = 0`):
/// `max((1-ε)/3 · x_opt + (1-ε)/2 · max(x_0, x_m), x_0, x_m)`.
pub fn alpha1_bound(b: &AlphaBound) -> Result<f64> {
    b.check_non_negative()?;
    if b.x_0 > 0.0 && b.x_m > 0.0 {
        return Err(Error::validation(format!(
            "depth-1 bound needs x_0 = 0 or x_m = 0, got x_0 = {}, x_m = {}",
            b.x_0, b.x_m
        )));
    }
    let e = b.epsilon;
    let linear = (1.0 - e) / 3.0 * b.x_opt + (1.0 - e) / 2.0 * b.x_0.max(b.x_m);
    Ok(linear.max(b.x_0).max(b.x_m))
}

/// Best closed-form lower bound on `α_rounds` at (clamped) arguments.
fn alpha_lower(rounds: usize, b: AlphaBound) -> f64 {
    let b = b.clamped();
    let trivial = b.x_0.max(b.x_m);
    match rounds {
        0 => alpha0_bound(&b).expect("clamped"),
        1 if b.x_0 > 0.0 && b.x_m > 0.0 => {
            // α is monotone in each argument, so either case is a lower bound.
            let with_m = alpha1_bound(&AlphaBound { x_0: 0.0, ..b }).expect("clamped");
            let with_0 = alpha1_bound(&AlphaBound { x_m: 0.0, ..b }).expect("clamped");
            with_m.max(with_0)
        }
        1 => alpha1_bound(&b).expect("clamped"),
        2 if b.x_0 == 0.0 && b.x_m == 0.0 => ((0.4 - b.epsilon) * b.x_opt).max(0.0),
        _ => trivial,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `2(1+ε) f(S) + f(S^c) >= f(OPT) + f(M) + f(∅)`.
    LocalMaxThird,
    /// `f(T1 ∪ T2) >= f1(T1) + f2(T2) - f(S^c)`.
    SubmodularGlue,
    /// Composition inequality with `α_{i-1}` replaced by its closed-form bound.
    Composition,
    /// Root of a two-round run: `value >= (2/5 - ε) f(OPT)`.
    RootRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub path: String,
    pub kind: CheckKind,
    pub status: CheckStatus,
    /// `lhs - rhs`; negative means violated.
    pub slack: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl TraceReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| o.status == CheckStatus::Fail)
    }

    pub fn count(&self, kind: CheckKind, status: CheckStatus) -> usize {
        self.outcomes
            .iter()
            .filter(|o| o.kind == kind && o.status == status)
            .count()
    }
}

fn outcome(path: &str, kind: CheckKind, lhs: f64, rhs: f64) -> CheckOutcome {
    let slack = lhs - rhs;
    let status = if slack >= -slack_scale(lhs, rhs) {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    CheckOutcome {
        path: path.to_string(),
        kind,
        status,
        slack,
    }
}

/// Checks a trace against per-node optima (from [`node_optima`]).
///
/// LocalMaxThird is checked at every node; SubmodularGlue and Composition at
/// every node that recursed. Composition arguments are clamped at zero before
/// the bounds are applied. RootRatio is emitted for two-round roots and is
/// `Inapplicable` when a recorded value exceeds its node's optimum (the trace
/// cannot come from a real run).
pub fn verify_trace(trace: &TraceNode, exact: &NodeOptima, epsilon: f64) -> Result<TraceReport> {
    let mut report = TraceReport::default();
    let mut consistent = true;
    check_node(trace, exact, epsilon, "r", &mut report, &mut consistent)?;
    if trace.rounds == 2 {
        let opt = exact.opt + trace.shift;
        let rhs = (0.4 - epsilon) * opt;
        let mut o = outcome("r", CheckKind::RootRatio, trace.value, rhs);
        if !consistent {
            o.status = CheckStatus::Inapplicable;
        }
        report.outcomes.push(o);
    }
    Ok(report)
}

fn check_node(
    node: &TraceNode,
    exact: &NodeOptima,
    eps: f64,
    path: &str,
    report: &mut TraceReport,
    consistent: &mut bool,
) -> Result<()> {
    if exact.children.len() != node.children.len() {
        return Err(Error::validation(format!(
            "exact values at {path} cover {} children, trace has {}",
            exact.children.len(),
            node.children.len()
        )));
    }
    let opt = exact.opt;
    if node.best_candidate_value() > opt + slack_scale(node.best_candidate_value(), opt) {
        *consistent = false;
    }

    let (fs, fsc, f0, fm) = (node.s_value, node.s_comp_value, node.empty_value, node.full_value);
    report.outcomes.push(outcome(
        path,
        CheckKind::LocalMaxThird,
        2.0 * (1.0 + eps) * fs + fsc,
        opt + fm + f0,
    ));

    if node.recursed() {
        let (Some(t1), Some(t2), Some(u)) = (node.t1_value, node.t2_value, node.t1_union_t2_value) else {
            return Err(Error::validation(format!(
                "trace node {path} recursed without T1/T2 values"
            )));
        };
        report
            .outcomes
            .push(outcome(path, CheckKind::SubmodularGlue, u, t1 + t2 - fsc));

        let child_rounds = node.rounds.saturating_sub(1);
        let first = alpha_lower(child_rounds, AlphaBound::new(opt + f0 - (1.0 + eps) * fs, f0, fsc, eps));
        let second = alpha_lower(child_rounds, AlphaBound::new(opt + fm - (1.0 + eps) * fs, fsc, fm, eps));
        report
            .outcomes
            .push(outcome(path, CheckKind::Composition, u, first + second - fsc));

        for (i, (c, e)) in node.children.iter().zip(&exact.children).enumerate() {
            check_node(c, e, eps, &format!("{path}.{}", i + 1), report, consistent)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub depth: usize,
    pub epsilon: f64,
    pub value: f64,
    pub queries: u64,
}

/// Runs the algorithm at every `(depth, ε)` pair, each on a fresh ledger.
pub fn depth_sweep(oracle: &ValueOracle, epsilons: &[f64], depths: &[usize]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(epsilons.len() * depths.len());
    for &depth in depths {
        for &epsilon in epsilons {
            let ledger = QueryLedger::new();
            let out = alg(&oracle.rebind(ledger.clone()), &AlgConfig::new(epsilon, depth)?)?;
            rows.push(SweepRow {
                depth,
                epsilon,
                value: out.value,
                queries: ledger.count(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;

    fn p3() -> ValueOracle {
        Instance::cut(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap().oracle()
    }

    #[test]
    fn alpha0_examples() {
        assert_eq!(alpha0_bound(&AlphaBound::new(3.0, 0.0, 0.0, 0.0)).unwrap(), 1.0);
        assert_eq!(alpha0_bound(&AlphaBound::new(0.0, 0.0, 5.0, 0.0)).unwrap(), 5.0);
        assert_eq!(alpha0_bound(&AlphaBound::new(3.0, 3.0, 3.0, 0.0)).unwrap(), 3.0);
        assert!(alpha0_bound(&AlphaBound::new(-1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn alpha1_examples() {
        assert_eq!(alpha1_bound(&AlphaBound::new(3.0, 0.0, 0.0, 0.0)).unwrap(), 1.0);
        assert_eq!(alpha1_bound(&AlphaBound::new(0.0, 0.0, 4.0, 0.1)).unwrap(), 4.0);
        assert_eq!(alpha1_bound(&AlphaBound::new(6.0, 0.0, 2.0, 0.0)).unwrap(), 3.0);
        // symmetric case
        assert_eq!(alpha1_bound(&AlphaBound::new(6.0, 2.0, 0.0, 0.0)).unwrap(), 3.0);
        assert!(alpha1_bound(&AlphaBound::new(6.0, 1.0, 2.0, 0.0)).is_err());
        assert!(alpha1_bound(&AlphaBound::new(6.0, 0.0, -2.0, 0.0)).is_err());
    }

    #[test]
    fn alpha_bounds_are_monotone_on_a_grid() {
        let grid = [0.0, 0.5, 1.0, 2.5, 4.0];
        for &e in &[0.0, 0.05, 0.3] {
            for &x in &grid {
                for &a in &grid {
                    for &d in &grid[1..] {
                        let b = AlphaBound::new(x, 0.0, a, e);
                        let a0 = alpha0_bound(&b).unwrap();
                        let a1 = alpha1_bound(&b).unwrap();
                        assert!(alpha0_bound(&AlphaBound { x_opt: x + d, ..b }).unwrap() >= a0);
                        assert!(alpha0_bound(&AlphaBound { x_m: a + d, ..b }).unwrap() >= a0);
                        assert!(alpha0_bound(&AlphaBound { x_0: d, ..b }).unwrap() >= a0);
                        assert!(alpha1_bound(&AlphaBound { x_opt: x + d, ..b }).unwrap() >= a1);
                        assert!(alpha1_bound(&AlphaBound { x_m: a + d, ..b }).unwrap() >= a1);
                        let b0 = AlphaBound::new(x, a, 0.0, e);
                        let a10 = alpha1_bound(&b0).unwrap();
                        assert!(alpha1_bound(&AlphaBound { x_0: a + d, ..b0 }).unwrap() >= a10);
                    }
                }
            }
        }
    }

    #[test]
    fn p3_two_rounds_reaches_opt() {
        let out = alg(&p3(), &AlgConfig::new(0.05, 2).unwrap()).unwrap();
        assert_eq!(out.value, 2.0);
        assert_eq!(out.trace.chosen_value().unwrap(), out.trace.best_candidate_value());
    }

    #[test]
    fn modular_returns_full_set() {
        let w = [1.0, 2.0, 0.5, 0.25];
        for rounds in 0..4 {
            let f = ValueOracle::from_fn(4, move |s| s.iter().map(|i| w[i]).sum());
            let out = alg(&f, &AlgConfig::new(0.1, rounds).unwrap()).unwrap();
            assert_eq!(out.set, Subset::full(4));
            assert_eq!(out.value, 3.75);
            assert!(!out.trace.recursed());
        }
    }

    #[test]
    fn trace_query_bookkeeping() {
        let inst = Instance::cut(
            6,
            vec![
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (5, 0, 1.0),
                (0, 3, 0.5),
            ],
        )
        .unwrap();
        let f = inst.oracle();
        let out = alg(&f, &AlgConfig::new(0.05, 2).unwrap()).unwrap();
        assert_eq!(out.trace.queries, f.ledger().count());
        let per_level = f.ledger().per_level();
        let mut by_depth = vec![0u64; per_level.len()];
        out.trace.walk(&mut |_, n| {
            by_depth[n.depth] += n.local_queries;
            assert!(n.ls_queries < n.local_queries);
            assert_eq!(
                n.queries,
                n.local_queries + n.children.iter().map(|c| c.queries).sum::<u64>()
            );
        });
        assert_eq!(by_depth, per_level);
    }

    #[test]
    fn returned_value_is_fresh_and_dominates_candidates() {
        let inst = Instance::coverage(
            4,
            5,
            vec![1.0, 0.5, 2.0, 0.25, 1.5],
            vec![vec![0, 1], vec![1, 2], vec![3], vec![0, 4]],
        )
        .unwrap();
        let f = inst.oracle();
        let out = alg(&f, &AlgConfig::new(0.05, 2).unwrap()).unwrap();
        let fresh = inst.oracle();
        assert_eq!(out.value, fresh.evaluate(&out.set).unwrap());
        let t = &out.trace;
        for c in [t.s_value, t.s_comp_value, t.empty_value, t.full_value] {
            assert!(out.value >= c + t.shift - 1e-12);
        }
    }

    #[test]
    fn zero_function_trace_is_tight() {
        let f = ValueOracle::from_fn(5, |_| 0.0);
        let out = alg(&f, &AlgConfig::new(0.05, 2).unwrap()).unwrap();
        let exact = node_optima(&f, &out.trace).unwrap();
        let report = verify_trace(&out.trace, &exact, 0.05).unwrap();
        assert!(report.passed());
        assert!(report.outcomes.iter().all(|o| o.slack == 0.0), "{report:?}");
    }

    #[test]
    fn inflated_trace_flags_root_inapplicable() {
        let leaf = TraceNode {
            depth: 0,
            rounds: 2,
            ground_size: 3,
            shift: 0.0,
            s: vec![],
            s_value: 10.0,
            s_comp_value: 0.0,
            empty_value: 0.0,
            full_value: 0.0,
            t1_value: None,
            t2_value: None,
            t1_union_t2_value: None,
            chosen: Candidate::S,
            result: vec![],
            value: 0.0,
            ls_moves: 0,
            warm_start_value: 0.0,
            ls_queries: 0,
            local_queries: 0,
            queries: 0,
            children: vec![],
        };
        let exact = NodeOptima {
            opt: 2.0,
            children: vec![],
        };
        let report = verify_trace(&leaf, &exact, 0.05).unwrap();
        assert_eq!(report.count(CheckKind::LocalMaxThird, CheckStatus::Pass), 1);
        assert_eq!(report.count(CheckKind::RootRatio, CheckStatus::Inapplicable), 1);
        assert!(report.passed());
    }

    #[test]
    fn verify_trace_needs_matching_exact_tree() {
        let f = Instance::cut(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 2, 0.3)])
            .unwrap()
            .oracle();
        let out = alg(&f, &AlgConfig::new(0.05, 2).unwrap()).unwrap();
        let exact = NodeOptima {
            opt: 3.0,
            children: vec![],
        };
        if out.trace.recursed() {
            assert!(verify_trace(&out.trace, &exact, 0.05).is_err());
        }
        let good = node_optima(&f, &out.trace).unwrap();
        assert!(verify_trace(&out.trace, &good, 0.05).unwrap().passed());
    }

    #[test]
    fn depth_sweep_examples() {
        let rows = depth_sweep(&p3(), &[0.05], &[0, 1, 2]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.value == 2.0 && r.queries > 0));

        let zero = ValueOracle::from_fn(4, |_| 0.0);
        let rows = depth_sweep(&zero, &[0.05, 0.2], &[0, 3]).unwrap();
        assert!(rows.iter().all(|r| r.value == 0.0));
    }

    #[test]
    fn invalid_config() {
        assert!(AlgConfig::new(0.0, 2).is_err());
        assert!(alg(
            &p3(),
            &AlgConfig {
                epsilon: -1.0,
                nrounds: 1
            }
        )
        .is_err());
    }

    #[test]
    fn trace_json_roundtrip() {
        let out = alg(&p3(), &AlgConfig::new(0.05, 2).unwrap()).unwrap();
        let back: TraceNode = serde_json::from_str(&out.trace.to_json()).unwrap();
        assert_eq!(back, out.trace);
    }
}
