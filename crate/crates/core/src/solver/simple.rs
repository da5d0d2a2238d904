//! Reference engine: every iteration rebuilds the choice graphs and the tree.

use crate::choice::{
    build_choice_graphs, maximal_alternating_tree, AlternatingPath, AlternatingTree, ChoiceGraphs, Matching,
};
use crate::error::{Error, Result};
use crate::market::{Ceiling, MarketInstance, Outcome, DUMMY};
use crate::scalar::Scalar;

use super::{Counters, DeltaBreakdown, DeltaKind, DropReason, PriceGuard, Solution, TraceEvent, Tracer};

fn keep_min<S: Scalar>(best: &mut Ceiling<S>, argmin: &mut Vec<(usize, usize)>, value: S, pair: (usize, usize)) {
    let value = Ceiling::Finite(value);
    if value < *best {
        *best = value;
        argmin.clear();
        argmin.push(pair);
    } else if value == *best {
        argmin.push(pair);
    }
}

/// The three step bounds for tree bidders `bidders` at `prices`:
///
/// - `out = min (u_i + p_j - v_ij)` over `j` outside `F_p(i)` with finite utility,
/// - `res = min (r_ij - p_j)` over `j` in `F_p(i)` but not `F~_p(i)`,
/// - `max = min (m_ij - p_j)` over `j` in `F_p(i)` with finite `m_ij`.
///
/// Argmin pairs are listed in `(bidder, item)` order.
pub fn compute_delta<S: Scalar>(
    inst: &MarketInstance<S>,
    graphs: &ChoiceGraphs<S>,
    prices: &[S],
    bidders: &[usize],
) -> DeltaBreakdown<S> {
    let mut bidders = bidders.to_vec();
    bidders.sort_unstable();
    let (mut out, mut res, mut max) = (Ceiling::Infinite, Ceiling::Infinite, Ceiling::Infinite);
    let (mut arg_out, mut arg_res, mut arg_max) = (Vec::new(), Vec::new(), Vec::new());
    for &i in &bidders {
        let u = graphs.best_utility(i);
        for j in inst.items() {
            let p = &prices[j];
            if !graphs.is_first_choice(i, j) {
                if inst.maximum(i, j).admits(p) {
                    let gap = u.clone() + p.clone() - inst.valuation(i, j).clone();
                    keep_min(&mut out, &mut arg_out, gap, (i, j));
                }
                continue;
            }
            if !graphs.is_feasible(i, j) {
                keep_min(&mut res, &mut arg_res, inst.reserve(i, j).clone() - p.clone(), (i, j));
            }
            if let Ceiling::Finite(m) = inst.maximum(i, j) {
                keep_min(&mut max, &mut arg_max, m.clone() - p.clone(), (i, j));
            }
        }
    }
    let delta = out.clone().min(res.clone()).min(max.clone());
    DeltaBreakdown {
        delta_out: out,
        delta_res: res,
        delta_max: max,
        delta,
        argmin_out: arg_out,
        argmin_res: arg_res,
        argmin_max: arg_max,
    }
}

/// What one price update changed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceUpdate<S> {
    /// `F_p(T)` before the raise, ascending.
    pub raised: Vec<usize>,
    pub delta: S,
    /// Matched edges that left `F~_p`, by bidder.
    pub dropped: Vec<(usize, usize, DropReason)>,
}

/// Mutable state of the reference engine, exposed for step-by-step use.
#[derive(Debug, Clone)]
pub struct SimpleState<'a, S> {
    inst: &'a MarketInstance<S>,
    prices: Vec<S>,
    matching: Matching,
    graphs: ChoiceGraphs<S>,
    tree: Option<AlternatingTree>,
}

impl<'a, S: Scalar> SimpleState<'a, S> {
    /// Zero prices and nobody assigned.
    pub fn new(inst: &'a MarketInstance<S>) -> Result<Self> {
        let prices = vec![S::zero(); inst.num_items() + 1];
        let graphs = build_choice_graphs(inst, &prices)?;
        Ok(SimpleState {
            inst,
            prices,
            matching: Matching::empty(inst.num_bidders(), inst.num_items()),
            graphs,
            tree: None,
        })
    }

    pub fn prices(&self) -> &[S] {
        &self.prices
    }

    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    pub fn graphs(&self) -> &ChoiceGraphs<S> {
        &self.graphs
    }

    /// The tree from the last [`grow`](Self::grow), if still current.
    pub fn tree(&self) -> Option<&AlternatingTree> {
        self.tree.as_ref()
    }

    /// Grows the maximal alternating tree at `root` in the current `F~_p`.
    pub fn grow(&mut self, root: usize) -> Result<&AlternatingTree> {
        let tree = maximal_alternating_tree(&self.graphs, &self.matching, root)?;
        Ok(self.tree.insert(tree))
    }

    fn stuck_tree(&self) -> Result<&AlternatingTree> {
        match &self.tree {
            Some(t) if t.augmenting_path.is_none() => Ok(t),
            Some(_) => Err(Error::usage("the current tree has an augmenting path")),
            None => Err(Error::usage("no tree grown at the current prices")),
        }
    }

    /// Step bounds for the current tree, which must have no augmenting path.
    pub fn compute_delta(&self) -> Result<DeltaBreakdown<S>> {
        let tree = self.stuck_tree()?;
        Ok(compute_delta(self.inst, &self.graphs, &self.prices, &tree.bidders))
    }

    /// Raises `F_p(T)` by `d.delta`, recomputes utilities and intersects the
    /// matching with the new `F~_p`. Invalidates the tree.
    pub fn apply_price_update(&mut self, d: &DeltaBreakdown<S>) -> Result<PriceUpdate<S>> {
        let tree = self.stuck_tree()?;
        let Ceiling::Finite(delta) = &d.delta else {
            return Err(Error::internal("price step is unbounded"));
        };
        if *delta <= S::zero() {
            return Err(Error::internal(format!("nonpositive price step {delta}")));
        }
        let raised = self.graphs.first_choice_of_set(&tree.bidders);
        if raised.contains(&DUMMY) {
            return Err(Error::internal("the dummy item is a first choice of the tree"));
        }
        for &j in &raised {
            self.prices[j] = self.prices[j].clone() + delta.clone();
        }
        self.graphs = build_choice_graphs(self.inst, &self.prices)?;
        self.tree = None;
        let mut dropped = Vec::new();
        for b in 0..self.inst.num_bidders() {
            let Some(j) = self.matching.item_of(b) else { continue };
            if self.graphs.is_feasible(b, j) {
                continue;
            }
            let reason = if self.inst.maximum(b, j).admits(&self.prices[j]) {
                DropReason::LeftFirstChoice
            } else {
                DropReason::MaximumReached
            };
            self.matching.unassign(b);
            dropped.push((b, j, reason));
        }
        Ok(PriceUpdate {
            raised,
            delta: delta.clone(),
            dropped,
        })
    }

    /// Augments along the current tree's path.
    pub fn augment(&mut self) -> Result<AlternatingPath> {
        let path = self
            .tree
            .take()
            .and_then(|t| t.augmenting_path)
            .ok_or_else(|| Error::usage("the current tree has no augmenting path"))?;
        self.matching.augment_along(&path)?;
        Ok(path)
    }

    pub fn into_outcome(self) -> Result<Outcome<S>> {
        let assignment = self
            .matching
            .to_assignment()
            .ok_or_else(|| Error::internal("finished with an unassigned bidder"))?;
        Outcome::new(self.inst, assignment, self.prices)
    }
}

pub(super) fn run<S: Scalar>(inst: &MarketInstance<S>, trace: bool) -> Result<Solution<S>> {
    let guard = PriceGuard::new(inst);
    let mut state = SimpleState::new(inst)?;
    let mut counters = Counters::default();
    let mut tracer = Tracer::new(trace);

    while let Some(root) = state.matching.first_unassigned() {
        counters.outer_iterations += 1;
        let mut special = true;
        while state.grow(root)?.augmenting_path.is_none() {
            let tree = state.stuck_tree()?;
            tracer.emit(|| TraceEvent::TreeBuilt {
                root,
                bidders: tree.sorted_bidders(),
                items: tree.sorted_items(),
            });
            counters.inner_iterations += 1;
            if special {
                counters.special_executions += 1;
            }
            let d = state.compute_delta()?;
            let Ceiling::Finite(delta) = &d.delta else {
                return Err(Error::internal("price step is unbounded"));
            };
            let attained = d.attained();
            tracer.emit(|| TraceEvent::DeltaComputed {
                delta: delta.clone(),
                attained: attained.clone(),
            });
            let update = state.apply_price_update(&d)?;
            guard.check(&state.prices, &update.raised)?;
            tracer.emit(|| TraceEvent::PricesRaised {
                items: update.raised.clone(),
                delta: update.delta.clone(),
                prices: state.prices.clone(),
            });
            for &(bidder, item, reason) in &update.dropped {
                tracer.emit(|| TraceEvent::EdgeDropped { bidder, item, reason });
            }
            special = attained.contains(&DeltaKind::Res) || attained.contains(&DeltaKind::Max);
        }
        let path = state.augment()?;
        tracer.emit(|| TraceEvent::Augmented { path: path.hops });
    }
    Ok(Solution {
        outcome: state.into_outcome()?,
        counters,
        trace: tracer.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example_one, example_two};
    use crate::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn delta_example_two() {
        let ex2 = example_two();
        let mut st = SimpleState::new(&ex2).unwrap();
        st.grow(0).unwrap();
        st.augment().unwrap();
        let tree = st.grow(1).unwrap();
        assert_eq!(tree.sorted_bidders(), vec![0, 1]);
        let d = st.compute_delta().unwrap();
        assert_eq!(d.delta_out, Ceiling::Finite(r(10)));
        assert_eq!(d.delta_res, Ceiling::Infinite);
        assert_eq!(d.delta_max, Ceiling::Finite(r(5)));
        assert_eq!(d.delta, Ceiling::Finite(r(5)));
        assert_eq!(d.attained(), vec![DeltaKind::Max]);

        let upd = st.apply_price_update(&d).unwrap();
        assert_eq!(upd.raised, vec![1]);
        assert_eq!(st.prices(), &[r(0), r(5)]);
        assert_eq!(upd.dropped, vec![(0, 1, DropReason::MaximumReached)]);
        assert_eq!(st.graphs().best_utilities(), &[r(0), r(0)]);
    }

    #[test]
    fn delta_example_one() {
        let ex1 = example_one();
        let mut st = SimpleState::new(&ex1).unwrap();
        st.grow(0).unwrap();
        st.augment().unwrap();
        let tree = st.grow(1).unwrap();
        assert_eq!(tree.bidders, vec![1]);
        assert!(tree.items.is_empty());
        let d = st.compute_delta().unwrap();
        assert_eq!(d.delta_out, Ceiling::Finite(r(4)));
        assert_eq!(d.delta_res, Ceiling::Finite(r(2)));
        assert_eq!(d.delta_max, Ceiling::Infinite);
        assert_eq!(d.delta, Ceiling::Finite(r(2)));

        let upd = st.apply_price_update(&d).unwrap();
        assert_eq!(upd.raised, vec![1, 2]);
        assert_eq!(st.prices(), &[r(0), r(2), r(2)]);
        // bidder 1 took item 1 at price 0 and now prefers the dummy
        assert_eq!(upd.dropped, vec![(0, 1, DropReason::LeftFirstChoice)]);
    }

    #[test]
    fn delta_is_refused_while_a_path_exists() {
        let ex2 = example_two();
        let mut st = SimpleState::new(&ex2).unwrap();
        assert!(st.compute_delta().is_err());
        st.grow(0).unwrap();
        assert!(st.compute_delta().is_err());
    }

    #[test]
    fn trace_example_two() {
        let ex2 = example_two();
        let sol = run(&ex2, true).unwrap();
        let events = sol.trace.unwrap();
        let expected = vec![
            TraceEvent::Augmented { path: vec![(0, 1)] },
            TraceEvent::TreeBuilt {
                root: 1,
                bidders: vec![0, 1],
                items: vec![1],
            },
            TraceEvent::DeltaComputed {
                delta: r(5),
                attained: vec![DeltaKind::Max],
            },
            TraceEvent::PricesRaised {
                items: vec![1],
                delta: r(5),
                prices: vec![r(0), r(5)],
            },
            TraceEvent::EdgeDropped {
                bidder: 0,
                item: 1,
                reason: DropReason::MaximumReached,
            },
            TraceEvent::Augmented { path: vec![(1, DUMMY)] },
            TraceEvent::Augmented { path: vec![(0, DUMMY)] },
        ];
        assert_eq!(events, expected);
        assert_eq!(sol.counters.outer_iterations, 3);
        assert_eq!(sol.counters.special_executions, 1);
    }

    #[test]
    fn trace_dummy_only() {
        let inst = MarketInstance::<i64>::builder(1, 0).build().unwrap();
        let events = run(&inst, true).unwrap().trace.unwrap();
        assert_eq!(events, vec![TraceEvent::Augmented { path: vec![(0, DUMMY)] }]);
    }
}
