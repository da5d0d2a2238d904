//! The modified Hungarian method.
//!
//! Starting from zero prices and an empty matching, each unassigned bidder
//! in turn grows a maximal alternating tree in the feasible first-choice
//! graph. While the tree has no augmenting path, every item that is a first
//! choice of some tree bidder gets its price raised by the smallest step
//! that changes the graph: a new item becomes a first choice (`out`), a
//! reserve price is reached (`res`), or a maximum price is reached (`max`).
//! The result has pointwise minimal stable prices and is bidder optimal.
//!
//! Two engines implement it. [`solve_simple`] rebuilds everything each
//! iteration and reads like the method's pseudocode. [`solve_fast`] keeps
//! the tree and three offset heaps incrementally, rebuilding only after an
//! augmentation or a reserve/maximum event. Both produce the same trace.

mod fast;
mod heap;
mod simple;
mod trace;

pub use heap::OffsetHeap;
pub use simple::{compute_delta, PriceUpdate, SimpleState};
pub use trace::{audit_trace, DropReason, TraceAudit, TraceEvent};

use std::fmt;

use crate::error::Result;
use crate::market::{Ceiling, MarketInstance, Outcome};
use crate::scalar::Scalar;

/// Which of the three step bounds a price increment came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeltaKind {
    Out,
    Res,
    Max,
}

impl fmt::Display for DeltaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeltaKind::Out => "out",
            DeltaKind::Res => "res",
            DeltaKind::Max => "max",
        })
    }
}

/// The three candidate increments and their minimum. An empty candidate set
/// gives `+inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaBreakdown<S> {
    pub delta_out: Ceiling<S>,
    pub delta_res: Ceiling<S>,
    pub delta_max: Ceiling<S>,
    pub delta: Ceiling<S>,
    pub argmin_out: Vec<(usize, usize)>,
    pub argmin_res: Vec<(usize, usize)>,
    pub argmin_max: Vec<(usize, usize)>,
}

impl<S: Scalar> DeltaBreakdown<S> {
    /// Kinds whose value equals `delta`; empty if `delta` is infinite.
    pub fn attained(&self) -> Vec<DeltaKind> {
        attained_kinds(&self.delta_out, &self.delta_res, &self.delta_max)
    }
}

pub(crate) fn attained_kinds<S: Scalar>(out: &Ceiling<S>, res: &Ceiling<S>, max: &Ceiling<S>) -> Vec<DeltaKind> {
    let delta = out.clone().min(res.clone()).min(max.clone());
    if !delta.is_finite() {
        return Vec::new();
    }
    [(DeltaKind::Out, out), (DeltaKind::Res, res), (DeltaKind::Max, max)]
        .into_iter()
        .filter(|(_, v)| **v == delta)
        .map(|(k, _)| k)
        .collect()
}

/// Run statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Augmentations, one per pass of the outer loop.
    pub outer_iterations: usize,
    /// Price updates.
    pub inner_iterations: usize,
    /// Inner iterations that begin right after an augmentation or after a
    /// reserve/maximum event.
    pub special_executions: usize,
    /// Entries removed from the three step heaps because they attained the
    /// increment. Always 0 for the simple engine.
    pub heap_removals: usize,
    pub max_removals_between_specials: usize,
}

/// `|J| = k + 1`: item count with the dummy.
fn item_slots(inst_items: usize) -> usize {
    inst_items + 1
}

/// `n * |J|`: the outer-loop bound argued from each bidder losing each item
/// at most once. Holders outside the tree can also lose an item that stops
/// being a first choice, so this is a yardstick for the counters rather than
/// a guarantee.
pub fn outer_iteration_bound(bidders: usize, items: usize) -> usize {
    bidders * item_slots(items)
}

/// `3 * n * |J|`: the matching yardstick for special executions.
pub fn special_execution_bound(bidders: usize, items: usize) -> usize {
    3 * bidders * item_slots(items)
}

/// Bound on heap removals between consecutive special executions:
/// each pair `(i, j)` with `i` in the tree leaves each heap at most once.
pub fn heap_removal_bound(items: usize) -> usize {
    3 * item_slots(items) * item_slots(items)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Engine {
    #[default]
    Simple,
    Fast,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Simple => "simple",
            Engine::Fast => "fast",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "simple" => Ok(Engine::Simple),
            "fast" => Ok(Engine::Fast),
            other => Err(format!("unknown engine `{other}` (expected simple|fast)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution<S> {
    pub outcome: Outcome<S>,
    pub counters: Counters,
    /// Present when tracing was requested.
    pub trace: Option<Vec<TraceEvent<S>>>,
}

pub fn solve<S: Scalar>(inst: &MarketInstance<S>, engine: Engine, trace: bool) -> Result<Solution<S>> {
    match engine {
        Engine::Simple => simple::run(inst, trace),
        Engine::Fast => fast::run(inst, trace),
    }
}

/// Reference engine.
pub fn solve_simple<S: Scalar>(inst: &MarketInstance<S>) -> Result<Outcome<S>> {
    simple::run(inst, false).map(|s| s.outcome)
}

/// Heap-based engine; same prices, utilities and matching as [`solve_simple`].
pub fn solve_fast<S: Scalar>(inst: &MarketInstance<S>) -> Result<Outcome<S>> {
    fast::run(inst, false).map(|s| s.outcome)
}

/// Event log of a reference-engine run.
pub fn solver_trace<S: Scalar>(inst: &MarketInstance<S>) -> Result<Vec<TraceEvent<S>>> {
    let sol = simple::run(inst, true)?;
    Ok(sol.trace.unwrap_or_default())
}

/// Run-time check that the price ascent stays bounded.
///
/// Every raised item is a first choice of a tree bidder whose utility is
/// positive, and no step exceeds that utility, so no price ever passes the
/// largest valuation. With `delta > 0` this bounds the run: for integer data
/// there are at most `k * max_valuation` raises.
pub(crate) struct PriceGuard<S> {
    ceiling: S,
}

impl<S: Scalar> PriceGuard<S> {
    pub(crate) fn new(inst: &MarketInstance<S>) -> Self {
        let ceiling = (0..inst.num_bidders())
            .flat_map(|i| inst.items().map(move |j| inst.valuation(i, j).clone()))
            .max()
            .unwrap_or_else(S::zero)
            .max(S::zero());
        PriceGuard { ceiling }
    }

    pub(crate) fn check(&self, prices: &[S], raised: &[usize]) -> Result<()> {
        match raised.iter().find(|&&j| prices[j] > self.ceiling) {
            Some(&j) => Err(crate::error::Error::internal(format!(
                "price of item {j} rose to {} above the largest valuation {}",
                prices[j], self.ceiling
            ))),
            None => Ok(()),
        }
    }
}

pub(crate) struct Tracer<S> {
    events: Option<Vec<TraceEvent<S>>>,
}

impl<S> Tracer<S> {
    pub(crate) fn new(enabled: bool) -> Self {
        Tracer {
            events: enabled.then(Vec::new),
        }
    }

    pub(crate) fn emit(&mut self, event: impl FnOnce() -> TraceEvent<S>) {
        if let Some(events) = &mut self.events {
            events.push(event());
        }
    }

    pub(crate) fn finish(self) -> Option<Vec<TraceEvent<S>>> {
        self.events
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example_one, example_two};
    use crate::market::{check_stable, ExtendedUtility};
    use crate::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn fin(n: i64) -> ExtendedUtility<Rat> {
        ExtendedUtility::Finite(r(n))
    }

    #[test]
    fn example_one_both_engines() {
        let ex1 = example_one();
        for engine in [Engine::Simple, Engine::Fast] {
            let out = solve(&ex1, engine, false).unwrap().outcome;
            assert_eq!(out.prices(), &[r(0), r(2), r(2)]);
            assert_eq!(out.assignment(), &[0, 1, 0]);
            assert_eq!(out.utilities(), &[fin(0), fin(2), fin(0)]);
        }
    }

    #[test]
    fn example_two_both_engines() {
        let ex2 = example_two();
        for engine in [Engine::Simple, Engine::Fast] {
            let out = solve(&ex2, engine, false).unwrap().outcome;
            assert_eq!(out.prices(), &[r(0), r(5)]);
            assert_eq!(out.assignment(), &[0, 0]);
            assert_eq!(out.utilities(), &[fin(0), fin(0)]);
        }
    }

    #[test]
    fn single_pair_pays_its_reserve() {
        let inst = MarketInstance::<Rat>::builder(1, 1)
            .valuation(0, 1, r(7))
            .reserve(0, 1, r(3))
            .build()
            .unwrap();
        let out = solve_simple(&inst).unwrap();
        assert_eq!(out.prices(), &[r(0), r(3)]);
        assert_eq!(out.assignment(), &[1]);
        assert_eq!(out.utilities(), &[fin(4)]);
        assert_eq!(solve_fast(&inst).unwrap(), out);
    }

    #[test]
    fn degenerate_markets() {
        let empty = MarketInstance::<i64>::builder(0, 3).build().unwrap();
        let out = solve_fast(&empty).unwrap();
        assert!(out.assignment().is_empty());
        assert_eq!(out.prices(), &[0, 0, 0, 0]);
        assert!(solver_trace(&empty).unwrap().is_empty());

        let dummy_only = MarketInstance::<i64>::builder(2, 0).build().unwrap();
        for engine in [Engine::Simple, Engine::Fast] {
            let sol = solve(&dummy_only, engine, false).unwrap();
            assert_eq!(sol.outcome.assignment(), &[0, 0]);
            assert!(sol.counters.outer_iterations <= outer_iteration_bound(2, 0));
        }
    }

    #[test]
    fn generalized_maximum_prices_are_respected() {
        // reserve above maximum: the pair can never trade
        let inst = MarketInstance::<i64>::builder(1, 1)
            .valuation(0, 1, 9)
            .reserve(0, 1, 5)
            .maximum(0, 1, 3)
            .build()
            .unwrap();
        for engine in [Engine::Simple, Engine::Fast] {
            let out = solve(&inst, engine, false).unwrap().outcome;
            assert_eq!(out.assignment(), &[0]);
            assert!(check_stable(&inst, &out).unwrap().is_clean());
        }
    }

    #[test]
    fn attained_kinds_report_ties() {
        let kinds = attained_kinds::<i64>(&Ceiling::Finite(2), &Ceiling::Finite(2), &Ceiling::Infinite);
        assert_eq!(kinds, vec![DeltaKind::Out, DeltaKind::Res]);
        let none = attained_kinds::<i64>(&Ceiling::Infinite, &Ceiling::Infinite, &Ceiling::Infinite);
        assert!(none.is_empty());
    }

    #[test]
    fn engine_parses() {
        assert_eq!("fast".parse::<Engine>(), Ok(Engine::Fast));
        assert!("hungarian".parse::<Engine>().is_err());
    }
}
