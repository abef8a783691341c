//! Value oracles, query accounting, and the combinators the recursive
//! algorithm composes: shift (`f - c`), restriction to a subset of the ground
//! set, and pinning (`T -> f(P ∪ T)`).
//!
//! Derived oracles are flattened onto the base function: every oracle is a
//! view `T -> f(pinned ∪ map(T)) - c_1 - c_2 - ...` over one shared
//! [`SetFunction`], so a chain of combinators costs one base evaluation.

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::subset::Subset;

/// A raw set function `f: 2^M -> R`. Implementations must be pure.
pub trait SetFunction: Send + Sync + fmt::Debug {
    fn ground_size(&self) -> usize;
    fn value(&self, s: &Subset) -> f64;
}

/// Adapts a closure into a [`SetFunction`].
pub struct FnSetFunction<F> {
    m: usize,
    f: F,
}

impl<F> FnSetFunction<F>
where
    F: Fn(&Subset) -> f64 + Send + Sync,
{
    pub fn new(m: usize, f: F) -> Self {
        FnSetFunction { m, f }
    }
}

impl<F> fmt::Debug for FnSetFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSetFunction").field("m", &self.m).finish()
    }
}

impl<F> SetFunction for FnSetFunction<F>
where
    F: Fn(&Subset) -> f64 + Send + Sync,
{
    fn ground_size(&self) -> usize {
        self.m
    }

    fn value(&self, s: &Subset) -> f64 {
        (self.f)(s)
    }
}

/// Counts value queries, bucketed by recursion depth.
///
/// The total is always the sum of the per-level buckets.
#[derive(Debug, Default)]
pub struct QueryLedger {
    levels: Mutex<Vec<u64>>,
}

impl QueryLedger {
    pub fn new() -> Arc<Self> {
        Arc::new(QueryLedger::default())
    }

    pub fn record(&self, level: usize) {
        let mut levels = self.levels.lock().expect("ledger poisoned");
        if levels.len() <= level {
            levels.resize(level + 1, 0);
        }
        levels[level] += 1;
    }

    pub fn count(&self) -> u64 {
        self.levels.lock().expect("ledger poisoned").iter().sum()
    }

    pub fn per_level(&self) -> Vec<u64> {
        self.levels.lock().expect("ledger poisoned").clone()
    }

    /// Folds another ledger's counts into this one (used when merging
    /// independently counted shards).
    pub fn absorb(&self, other: &QueryLedger) {
        let theirs = other.per_level();
        let mut levels = self.levels.lock().expect("ledger poisoned");
        if levels.len() < theirs.len() {
            levels.resize(theirs.len(), 0);
        }
        for (mine, t) in levels.iter_mut().zip(theirs) {
            *mine += t;
        }
    }
}

#[derive(Debug, Clone)]
struct View {
    /// local index -> base index
    map: Vec<usize>,
    /// base elements always present
    pinned: Subset,
    /// subtracted in order after the base evaluation
    shifts: Vec<f64>,
    identity: bool,
}

/// A counted, queryable set function. Cheap to clone; clones share the
/// base function and the ledger.
#[derive(Clone)]
pub struct ValueOracle {
    base: Arc<dyn SetFunction>,
    view: Arc<View>,
    ledger: Arc<QueryLedger>,
    level: usize,
}

impl fmt::Debug for ValueOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValueOracle")
            .field("base", &self.base)
            .field("ground_size", &self.ground_size())
            .field("pinned", &self.view.pinned)
            .field("shifts", &self.view.shifts)
            .field("level", &self.level)
            .finish()
    }
}

/// Result of [`ValueOracle::shift_with_endpoints`]: the shifted oracle plus
/// the values it takes at `∅` and `M`, already known from computing the
/// constant.
#[derive(Debug, Clone)]
pub struct Shifted {
    pub oracle: ValueOracle,
    pub constant: f64,
    pub empty_value: f64,
    pub full_value: f64,
}

impl ValueOracle {
    pub fn new(base: Arc<dyn SetFunction>) -> Self {
        ValueOracle::with_ledger(base, QueryLedger::new())
    }

    pub fn with_ledger(base: Arc<dyn SetFunction>, ledger: Arc<QueryLedger>) -> Self {
        let m = base.ground_size();
        ValueOracle {
            view: Arc::new(View {
                map: (0..m).collect(),
                pinned: Subset::empty(m),
                shifts: Vec::new(),
                identity: true,
            }),
            base,
            ledger,
            level: 0,
        }
    }

    pub fn from_fn<F>(m: usize, f: F) -> Self
    where
        F: Fn(&Subset) -> f64 + Send + Sync + 'static,
    {
        ValueOracle::new(Arc::new(FnSetFunction::new(m, f)))
    }

    pub fn ground_size(&self) -> usize {
        self.view.map.len()
    }

    pub fn ledger(&self) -> &Arc<QueryLedger> {
        &self.ledger
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Same function, counted against `ledger` instead.
    pub fn rebind(&self, ledger: Arc<QueryLedger>) -> ValueOracle {
        ValueOracle { ledger, ..self.clone() }
    }

    /// Same function and ledger; subsequent queries are booked at `level`.
    pub fn at_level(&self, level: usize) -> ValueOracle {
        ValueOracle { level, ..self.clone() }
    }

    pub fn empty_set(&self) -> Subset {
        Subset::empty(self.ground_size())
    }

    pub fn full_set(&self) -> Subset {
        Subset::full(self.ground_size())
    }

    pub fn evaluate(&self, s: &Subset) -> Result<f64> {
        if s.ground_size() != self.ground_size() {
            return Err(Error::contract(format!(
                "subset over {} elements queried on an oracle over {}",
                s.ground_size(),
                self.ground_size()
            )));
        }
        let v = self.raw(s);
        self.ledger.record(self.level);
        Ok(v)
    }

    fn raw(&self, s: &Subset) -> f64 {
        let view = &self.view;
        let mut v = if view.identity {
            self.base.value(s)
        } else {
            let mut full = view.pinned.clone();
            for i in s.iter() {
                full.insert(view.map[i]);
            }
            self.base.value(&full)
        };
        for c in &view.shifts {
            v -= c;
        }
        v
    }

    /// `T -> f(T) - min(f(∅), f(M))`. Costs exactly two queries.
    pub fn shift(&self) -> Result<ValueOracle> {
        Ok(self.shift_with_endpoints()?.oracle)
    }

    pub fn shift_with_endpoints(&self) -> Result<Shifted> {
        let e = self.evaluate(&self.empty_set())?;
        let f = self.evaluate(&self.full_set())?;
        let c = e.min(f);
        let mut view = (*self.view).clone();
        view.shifts.push(c);
        Ok(Shifted {
            oracle: ValueOracle {
                view: Arc::new(view),
                ..self.clone()
            },
            constant: c,
            empty_value: e - c,
            full_value: f - c,
        })
    }

    /// The oracle on `m1` (re-indexed to `0..|m1|` in ascending order).
    pub fn restrict(&self, m1: &Subset) -> Result<ValueOracle> {
        if m1.ground_size() != self.ground_size() {
            return Err(Error::contract(format!(
                "restriction set over {} elements for an oracle over {}",
                m1.ground_size(),
                self.ground_size()
            )));
        }
        let view = &self.view;
        let map: Vec<usize> = m1.iter().map(|i| view.map[i]).collect();
        let identity = view.identity && map.len() == view.map.len();
        Ok(ValueOracle {
            view: Arc::new(View {
                map,
                pinned: view.pinned.clone(),
                shifts: view.shifts.clone(),
                identity,
            }),
            ..self.clone()
        })
    }

    /// `T -> f(pinned ∪ T)` for `T ⊆ m2`, re-indexed to `0..|m2|`.
    pub fn pin_union(&self, pinned: &Subset, m2: &Subset) -> Result<ValueOracle> {
        let n = self.ground_size();
        if pinned.ground_size() != n || m2.ground_size() != n {
            return Err(Error::contract(format!(
                "pin sets over {}/{} elements for an oracle over {n}",
                pinned.ground_size(),
                m2.ground_size()
            )));
        }
        if !pinned.is_disjoint(m2)? {
            return Err(Error::contract(format!(
                "pinned set {pinned:?} overlaps free set {m2:?}"
            )));
        }
        let view = &self.view;
        let mut base_pinned = view.pinned.clone();
        for i in pinned.iter() {
            base_pinned.insert(view.map[i]);
        }
        let map: Vec<usize> = m2.iter().map(|i| view.map[i]).collect();
        let identity = view.identity && pinned.is_empty() && map.len() == view.map.len();
        Ok(ValueOracle {
            view: Arc::new(View {
                map,
                pinned: base_pinned,
                shifts: view.shifts.clone(),
                identity,
            }),
            ..self.clone()
        })
    }
}

/// Maps a subset of a restricted/pinned ground set back into its parent's
/// indices. `members` lists the parent elements in the child's index order.
pub fn lift(local: &Subset, members: &[usize], parent_size: usize) -> Result<Subset> {
    if local.ground_size() != members.len() {
        return Err(Error::contract(format!(
            "cannot lift a subset over {} elements through a map of {}",
            local.ground_size(),
            members.len()
        )));
    }
    Subset::from_indices(parent_size, local.iter().map(|i| members[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;

    fn p3() -> ValueOracle {
        Instance::cut(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap().oracle()
    }

    fn set(m: usize, items: &[usize]) -> Subset {
        Subset::from_indices(m, items.iter().copied()).unwrap()
    }

    fn all_subsets(m: usize) -> impl Iterator<Item = Subset> {
        (0..1u64 << m).map(move |mask| Subset::from_mask(m, mask))
    }

    #[test]
    fn evaluate_examples() {
        let f = p3();
        assert_eq!(f.evaluate(&set(3, &[1])).unwrap(), 2.0);
        assert_eq!(f.evaluate(&Subset::empty(3)).unwrap(), 0.0);
        assert_eq!(f.ledger().count(), 2);
        let cov = Instance::coverage(2, 2, vec![1.0, 1.0], vec![vec![0], vec![0, 1]])
            .unwrap()
            .oracle();
        assert_eq!(cov.evaluate(&set(2, &[0, 1])).unwrap(), 2.0);
    }

    #[test]
    fn evaluate_dimension_mismatch() {
        let err = p3().evaluate(&Subset::empty(4)).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn shift_examples() {
        let zero_ends = p3();
        let shifted = zero_ends.shift().unwrap();
        for s in all_subsets(3) {
            assert_eq!(shifted.evaluate(&s).unwrap(), zero_ends.evaluate(&s).unwrap());
        }

        // f(∅)=2, f(M)=5
        let f = ValueOracle::from_fn(2, |s| match s.to_mask().unwrap() {
            0 => 2.0,
            0b11 => 5.0,
            _ => 4.0,
        });
        let sh = f.shift_with_endpoints().unwrap();
        assert_eq!(sh.constant, 2.0);
        assert_eq!(sh.empty_value, 0.0);
        assert_eq!(sh.full_value, 3.0);
        for s in all_subsets(2) {
            assert_eq!(sh.oracle.evaluate(&s).unwrap(), f.evaluate(&s).unwrap() - 2.0);
        }

        let seven = ValueOracle::from_fn(3, |_| 7.0).shift().unwrap();
        assert!(all_subsets(3).all(|s| seven.evaluate(&s).unwrap() == 0.0));
    }

    #[test]
    fn shift_costs_two_queries() {
        let f = p3();
        let _ = f.shift().unwrap();
        assert_eq!(f.ledger().count(), 2);
    }

    #[test]
    fn restrict_examples() {
        let f = p3();
        let same = f.restrict(&Subset::full(3)).unwrap();
        for s in all_subsets(3) {
            assert_eq!(same.evaluate(&s).unwrap(), f.evaluate(&s).unwrap());
        }
        let none = f.restrict(&Subset::empty(3)).unwrap();
        assert_eq!(none.ground_size(), 0);
        assert_eq!(none.evaluate(&Subset::empty(0)).unwrap(), 0.0);

        let ends = f.restrict(&set(3, &[0, 2])).unwrap();
        assert_eq!(ends.ground_size(), 2);
        assert_eq!(ends.evaluate(&Subset::full(2)).unwrap(), 2.0);
        assert!(matches!(f.restrict(&Subset::full(5)), Err(Error::Contract(_))));
    }

    #[test]
    fn pin_union_examples() {
        let f = p3();
        let same = f.pin_union(&Subset::empty(3), &Subset::full(3)).unwrap();
        for s in all_subsets(3) {
            assert_eq!(same.evaluate(&s).unwrap(), f.evaluate(&s).unwrap());
        }
        let constant = f.pin_union(&Subset::full(3), &Subset::empty(3)).unwrap();
        assert_eq!(constant.ground_size(), 0);
        assert_eq!(constant.evaluate(&Subset::empty(0)).unwrap(), 0.0);

        let pinned = f.pin_union(&set(3, &[1]), &set(3, &[0, 2])).unwrap();
        // local 0 is global 0: f({0,1}) = 1
        assert_eq!(pinned.evaluate(&set(2, &[0])).unwrap(), 1.0);
        assert_eq!(pinned.evaluate(&Subset::empty(2)).unwrap(), 2.0);

        let err = f.pin_union(&set(3, &[0, 1]), &set(3, &[1, 2])).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn nested_views_compose() {
        // restrict then pin then restrict: indices must route to the base.
        let f = Instance::cut(5, vec![(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (3, 4, 4.0), (0, 4, 5.0)])
            .unwrap()
            .oracle();
        let a = f.restrict(&set(5, &[1, 2, 3, 4])).unwrap(); // local i -> global i+1
        let b = a.pin_union(&set(4, &[0]), &set(4, &[2, 3])).unwrap(); // pinned {1}, local {0,1} -> {3,4}
        let c = b.restrict(&set(2, &[1])).unwrap(); // local 0 -> global 4
        assert_eq!(
            c.evaluate(&set(1, &[0])).unwrap(),
            f.evaluate(&set(5, &[1, 4])).unwrap()
        );
        assert_eq!(
            c.evaluate(&Subset::empty(1)).unwrap(),
            f.evaluate(&set(5, &[1])).unwrap()
        );
    }

    #[test]
    fn derived_oracles_share_the_ledger_and_book_levels() {
        let f = p3();
        let sh = f.shift().unwrap(); // 2 at level 0
        let child = sh.restrict(&set(3, &[0, 2])).unwrap().at_level(1);
        child.evaluate(&Subset::full(2)).unwrap();
        child.evaluate(&Subset::empty(2)).unwrap();
        sh.evaluate(&Subset::full(3)).unwrap();
        assert_eq!(f.ledger().count(), 5);
        assert_eq!(f.ledger().per_level(), vec![3, 2]);

        let fresh = QueryLedger::new();
        let other = child.rebind(fresh.clone());
        other.evaluate(&Subset::full(2)).unwrap();
        assert_eq!(fresh.per_level(), vec![0, 1]);
        assert_eq!(f.ledger().count(), 5);

        f.ledger().absorb(&fresh);
        assert_eq!(f.ledger().per_level(), vec![3, 3]);
    }

    #[test]
    fn lift_maps_back() {
        let local = set(2, &[1]);
        assert_eq!(lift(&local, &[3, 5], 6).unwrap(), set(6, &[5]));
        assert!(lift(&local, &[3], 6).is_err());
    }
}
