//! Heap-based engine.
//!
//! Between two special executions the tree only grows, so the engine keeps
//! `T`, `S` and `F_p(T)` as lists with bit vectors and finds each step from
//! offset heaps instead of rescanning. Pairs `(i, j)` with `i` in `T` live in:
//!
//! - `out_moving`: `j` outside `F_p(T)`. The gap `u_i + p_j - v_ij` shrinks
//!   by every step, so the heap offset tracks it.
//! - `out_fixed`: `j` in `F_p(T)` but not in `F_p(i)`. Both `u_i` and `p_j`
//!   move by the step, so the gap is constant and the entry is never popped
//!   by an event; it only bounds the step.
//! - `res` and `max`: `j` in `F_p(i)`, keyed `r_ij - p_j` and `m_ij - p_j`.
//!
//! Items of `F_p(T)` outside `S` may be held by a bidder outside `T`. Their
//! price rises while the holder's other options may not, so the holder can
//! lose the item, or reach its maximum price. Those pairs sit in a watch
//! heap keyed by a lower bound on the remaining slack and are verified
//! exactly when the bound runs out.
//!
//! After a reserve or maximum event everything is rebuilt from scratch.

use std::collections::VecDeque;

use crate::choice::{grow_tree, AlternatingPath, Matching};
use crate::error::{Error, Result};
use crate::market::{Ceiling, MarketInstance, Outcome};
use crate::scalar::Scalar;

use super::{attained_kinds, Counters, DeltaKind, DropReason, OffsetHeap, PriceGuard, Solution, TraceEvent, Tracer};

/// Watch entries: `Max` fires once `m - p` reaches 0, `Slack` once the
/// slack bound turns negative. `Max` sorts first so that ties at 0 fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Watch {
    Max,
    Slack,
}

type WatchEntry = (Watch, usize, usize, u64);

struct Fast<'a, S> {
    inst: &'a MarketInstance<S>,
    prices: Vec<S>,
    matching: Matching,
    root: usize,
    /// Valid for bidders in `T`.
    utility: Vec<S>,
    in_t: Vec<bool>,
    has_pairs: Vec<bool>,
    t_list: Vec<usize>,
    in_s: Vec<bool>,
    s_list: Vec<usize>,
    in_fpt: Vec<bool>,
    fpt_list: Vec<usize>,
    out_moving: OffsetHeap<S>,
    out_fixed: OffsetHeap<S>,
    res: OffsetHeap<S>,
    max: OffsetHeap<S>,
    watch: OffsetHeap<S, WatchEntry>,
    watch_version: Vec<u64>,
    queue: VecDeque<usize>,
    /// An augmenting path is known to exist.
    terminal: bool,
}

struct Step<S> {
    delta: S,
    attained: Vec<DeltaKind>,
    out_events: Vec<(usize, usize)>,
    max_events: Vec<(usize, usize)>,
    removals: usize,
}

impl<'a, S: Scalar> Fast<'a, S> {
    fn new(inst: &'a MarketInstance<S>) -> Self {
        let (n, k) = (inst.num_bidders(), inst.num_items());
        Fast {
            inst,
            prices: vec![S::zero(); k + 1],
            matching: Matching::empty(n, k),
            root: 0,
            utility: vec![S::zero(); n],
            in_t: vec![false; n],
            has_pairs: vec![false; n],
            t_list: Vec::new(),
            in_s: vec![false; k + 1],
            s_list: Vec::new(),
            in_fpt: vec![false; k + 1],
            fpt_list: Vec::new(),
            out_moving: OffsetHeap::new(),
            out_fixed: OffsetHeap::new(),
            res: OffsetHeap::new(),
            max: OffsetHeap::new(),
            watch: OffsetHeap::new(),
            watch_version: vec![0; k + 1],
            queue: VecDeque::new(),
            terminal: false,
        }
    }

    fn admits(&self, b: usize, j: usize) -> bool {
        self.inst.maximum(b, j).admits(&self.prices[j])
    }

    fn surplus(&self, b: usize, j: usize) -> S {
        self.inst.valuation(b, j).clone() - self.prices[j].clone()
    }

    fn best_utility(&self, b: usize) -> S {
        self.inst
            .items()
            .filter(|&j| self.admits(b, j))
            .map(|j| self.surplus(b, j))
            .max()
            .unwrap_or_else(S::zero)
    }

    fn is_first_choice(&self, b: usize, j: usize, u: &S) -> bool {
        self.admits(b, j) && self.surplus(b, j) == *u
    }

    fn feasible_fresh(&self, b: usize) -> Vec<usize> {
        let u = self.best_utility(b);
        self.inst
            .items()
            .filter(|&j| self.is_first_choice(b, j, &u) && self.prices[j] >= *self.inst.reserve(b, j))
            .collect()
    }

    fn canonical_tree(&self) -> crate::choice::AlternatingTree {
        grow_tree(self.root, &self.matching, |b| self.feasible_fresh(b))
    }

    fn clear(&mut self) {
        for &b in &self.t_list {
            self.in_t[b] = false;
            self.has_pairs[b] = false;
        }
        for &j in &self.s_list {
            self.in_s[j] = false;
        }
        for &j in &self.fpt_list {
            self.in_fpt[j] = false;
        }
        self.t_list.clear();
        self.s_list.clear();
        self.fpt_list.clear();
        self.out_moving.clear();
        self.out_fixed.clear();
        self.res.clear();
        self.max.clear();
        self.watch.clear();
        self.queue.clear();
        self.terminal = false;
    }

    /// Starts over from the maximal tree at the current prices. Returns the
    /// augmenting path if there is one.
    fn rebuild(&mut self) -> Option<AlternatingPath> {
        self.clear();
        let tree = self.canonical_tree();
        if tree.augmenting_path.is_some() {
            return tree.augmenting_path;
        }
        for &b in &tree.bidders {
            self.in_t[b] = true;
            self.t_list.push(b);
        }
        for &j in &tree.items {
            self.in_s[j] = true;
            self.s_list.push(j);
        }
        for &b in &tree.bidders {
            self.utility[b] = self.best_utility(b);
        }
        for &b in &tree.bidders {
            for j in self.inst.items() {
                if self.is_first_choice(b, j, &self.utility[b]) {
                    self.add_to_fpt(j);
                }
            }
        }
        for &b in &tree.bidders {
            self.insert_pairs(b);
        }
        None
    }

    fn add_to_fpt(&mut self, j: usize) {
        if self.in_fpt[j] {
            return;
        }
        self.in_fpt[j] = true;
        self.fpt_list.push(j);
        // pairs already in the heaps that now have a rising item
        for t in 0..self.t_list.len() {
            let i = self.t_list[t];
            if !self.has_pairs[i] || !self.admits(i, j) || self.is_first_choice(i, j, &self.utility[i]) {
                continue;
            }
            let gap = self.utility[i].clone() - self.surplus(i, j);
            self.out_fixed.push(gap, (i, j));
        }
        if !self.in_s[j] {
            if let Some(owner) = self.matching.owner_of(j) {
                if !self.in_t[owner] {
                    self.start_watch(owner, j);
                }
            }
        }
    }

    fn start_watch(&mut self, b: usize, j: usize) {
        self.watch_version[j] += 1;
        let version = self.watch_version[j];
        if let Ceiling::Finite(m) = self.inst.maximum(b, j) {
            self.watch
                .push(m.clone() - self.prices[j].clone(), (Watch::Max, b, j, version));
        }
        // items outside F_p(T) keep their price; items inside rise with j
        let rival = self
            .inst
            .items()
            .filter(|&x| x != j && !self.in_fpt[x] && self.admits(b, x))
            .map(|x| self.surplus(b, x))
            .max()
            .unwrap_or_else(S::zero);
        self.watch
            .push(self.surplus(b, j) - rival, (Watch::Slack, b, j, version));
    }

    fn insert_pairs(&mut self, b: usize) {
        self.has_pairs[b] = true;
        let u = self.utility[b].clone();
        for j in self.inst.items() {
            if !self.admits(b, j) {
                continue;
            }
            if self.is_first_choice(b, j, &u) {
                self.first_choice_edge(b, j);
            } else {
                let gap = u.clone() - self.surplus(b, j);
                if self.in_fpt[j] {
                    self.out_fixed.push(gap, (b, j));
                } else {
                    self.out_moving.push(gap, (b, j));
                }
            }
        }
    }

    /// Registers `j` in `F_p(b)` for a bidder `b` in `T`.
    fn first_choice_edge(&mut self, b: usize, j: usize) {
        if let Ceiling::Finite(m) = self.inst.maximum(b, j) {
            self.max.push(m.clone() - self.prices[j].clone(), (b, j));
        }
        let r = self.inst.reserve(b, j);
        if self.prices[j] < *r {
            self.res.push(r.clone() - self.prices[j].clone(), (b, j));
        } else {
            self.reach(j);
        }
    }

    /// Follows a feasible edge into `j`.
    fn reach(&mut self, j: usize) {
        if self.in_s[j] {
            return;
        }
        match self.matching.owner_of(j) {
            None => self.terminal = true,
            Some(owner) => {
                self.in_s[j] = true;
                self.s_list.push(j);
                self.watch_version[j] += 1;
                if !self.in_t[owner] {
                    self.in_t[owner] = true;
                    self.t_list.push(owner);
                    self.queue.push_back(owner);
                }
            }
        }
    }

    fn join_tree(&mut self, b: usize) {
        self.utility[b] = self.best_utility(b);
        for j in self.inst.items() {
            if self.is_first_choice(b, j, &self.utility[b]) {
                self.add_to_fpt(j);
            }
        }
        self.insert_pairs(b);
    }

    fn clean_tops(&mut self) {
        while let Some((_, &(_, j))) = self.out_moving.peek() {
            if !self.in_fpt[j] {
                break;
            }
            self.out_moving.pop();
        }
        while let Some((_, &(i, j))) = self.out_fixed.peek() {
            if self.admits(i, j) {
                break;
            }
            self.out_fixed.pop();
        }
    }

    fn step(&mut self) -> Result<Step<S>> {
        self.clean_tops();
        let top = |h: &OffsetHeap<S>| h.peek().map_or(Ceiling::Infinite, |(v, _)| Ceiling::Finite(v));
        let delta_out = top(&self.out_moving).min(top(&self.out_fixed));
        let delta_res = top(&self.res);
        let delta_max = top(&self.max);
        let attained = attained_kinds(&delta_out, &delta_res, &delta_max);
        let Ceiling::Finite(delta) = delta_out.min(delta_res).min(delta_max) else {
            return Err(Error::internal("price step is unbounded"));
        };
        if delta <= S::zero() {
            return Err(Error::internal(format!("nonpositive price step {delta}")));
        }

        let mut removals = 0;
        let mut out_events = Vec::new();
        loop {
            self.clean_tops();
            match self.out_moving.peek() {
                Some((v, _)) if v == delta => {
                    let (_, pair) = self.out_moving.pop().expect("peeked");
                    out_events.push(pair);
                    removals += 1;
                }
                _ => break,
            }
        }
        let pop_equal = |h: &mut OffsetHeap<S>| {
            let mut popped = Vec::new();
            while matches!(h.peek(), Some((v, _)) if v == delta) {
                popped.push(h.pop().expect("peeked").1);
            }
            popped
        };
        let res_events = pop_equal(&mut self.res);
        let max_events = pop_equal(&mut self.max);
        removals += res_events.len() + max_events.len();

        for &j in &self.fpt_list {
            self.prices[j] = self.prices[j].clone() + delta.clone();
        }
        for &b in &self.t_list {
            self.utility[b] = self.utility[b].clone() - delta.clone();
        }
        self.out_moving.advance(&delta);
        self.res.advance(&delta);
        self.max.advance(&delta);
        self.watch.advance(&delta);
        Ok(Step {
            delta,
            attained,
            out_events,
            max_events,
            removals,
        })
    }

    /// Matched edges that the last step pushed out of `F~_p`, by bidder.
    fn collect_drops(&mut self, max_events: &[(usize, usize)]) -> Vec<(usize, usize, DropReason)> {
        let mut drops: Vec<(usize, usize, DropReason)> = max_events
            .iter()
            .filter(|&&(b, j)| self.matching.item_of(b) == Some(j))
            .map(|&(b, j)| (b, j, DropReason::MaximumReached))
            .collect();
        loop {
            let fires = match self.watch.peek() {
                Some((v, (kind, _, _, _))) => v < S::zero() || (v.is_zero() && *kind == Watch::Max),
                None => false,
            };
            if !fires {
                break;
            }
            let (_, (_, b, j, version)) = self.watch.pop().expect("peeked");
            if version != self.watch_version[j] || self.matching.item_of(b) != Some(j) {
                continue;
            }
            if !self.admits(b, j) {
                drops.push((b, j, DropReason::MaximumReached));
            } else if self.surplus(b, j) != self.best_utility(b) {
                drops.push((b, j, DropReason::LeftFirstChoice));
            } else {
                self.start_watch(b, j);
                continue;
            }
            self.watch_version[j] += 1;
        }
        drops.sort_unstable_by_key(|&(b, j, _)| (b, j));
        drops
    }

    fn extend(&mut self, out_events: &[(usize, usize)]) {
        for &(i, j) in out_events {
            self.add_to_fpt(j);
            self.first_choice_edge(i, j);
        }
        while let Some(b) = self.queue.pop_front() {
            if self.terminal {
                break;
            }
            self.join_tree(b);
        }
    }
}

pub(super) fn run<S: Scalar>(inst: &MarketInstance<S>, trace: bool) -> Result<Solution<S>> {
    let guard = PriceGuard::new(inst);
    let mut st = Fast::new(inst);
    let mut counters = Counters::default();
    let mut tracer = Tracer::new(trace);
    let mut interval_removals = 0;

    while let Some(root) = st.matching.first_unassigned() {
        counters.outer_iterations += 1;
        st.root = root;
        let mut rebuild = true;
        let path = loop {
            if rebuild {
                if let Some(path) = st.rebuild() {
                    break path;
                }
                counters.special_executions += 1;
                interval_removals = 0;
            } else if st.terminal {
                break st
                    .canonical_tree()
                    .augmenting_path
                    .ok_or_else(|| Error::internal("incremental tree lost its augmenting path"))?;
            }
            tracer.emit(|| {
                let mut bidders = st.t_list.clone();
                let mut items = st.s_list.clone();
                bidders.sort_unstable();
                items.sort_unstable();
                TraceEvent::TreeBuilt { root, bidders, items }
            });
            counters.inner_iterations += 1;

            let step = st.step()?;
            guard.check(&st.prices, &st.fpt_list)?;
            interval_removals += step.removals;
            counters.heap_removals += step.removals;
            counters.max_removals_between_specials = counters.max_removals_between_specials.max(interval_removals);
            tracer.emit(|| TraceEvent::DeltaComputed {
                delta: step.delta.clone(),
                attained: step.attained.clone(),
            });
            tracer.emit(|| {
                let mut items = st.fpt_list.clone();
                items.sort_unstable();
                TraceEvent::PricesRaised {
                    items,
                    delta: step.delta.clone(),
                    prices: st.prices.clone(),
                }
            });
            for (bidder, item, reason) in st.collect_drops(&step.max_events) {
                st.matching.unassign(bidder);
                tracer.emit(|| TraceEvent::EdgeDropped { bidder, item, reason });
            }
            rebuild = step.attained.contains(&DeltaKind::Res) || step.attained.contains(&DeltaKind::Max);
            if !rebuild {
                st.extend(&step.out_events);
            }
        };
        st.matching.augment_along(&path)?;
        tracer.emit(|| TraceEvent::Augmented { path: path.hops });
    }
    let assignment = st
        .matching
        .to_assignment()
        .ok_or_else(|| Error::internal("finished with an unassigned bidder"))?;
    Ok(Solution {
        outcome: Outcome::new(inst, assignment, st.prices)?,
        counters,
        trace: tracer.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::simple;
    use super::*;

    #[test]
    fn fixed_out_gap_bounds_the_step() {
        // Bidder 1 holds item 1 and bidder 2 wants it below its reserve, so
        // item 1 is in F_p(T) but not in S. Bidder 2 also likes item 2 a bit
        // less; that gap stays constant while item 1 rises.
        let inst = MarketInstance::<i64>::builder(2, 2)
            .valuation(0, 1, 10)
            .valuation(1, 1, 10)
            .valuation(1, 2, 7)
            .reserve(1, 1, 5)
            .build()
            .unwrap();
        let a = run(&inst, true).unwrap();
        let b = simple::run(&inst, true).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.outcome, b.outcome);
    }

    #[test]
    fn watched_holder_loses_the_item() {
        // Bidder 1 (index 0) is indifferent between items 1 and 2; once item
        // 1 rises for bidder 2's sake, bidder 1 no longer wants it.
        let inst = MarketInstance::<i64>::builder(3, 2)
            .valuation(0, 1, 5)
            .valuation(0, 2, 5)
            .valuation(1, 1, 9)
            .reserve(1, 1, 3)
            .valuation(2, 2, 6)
            .build()
            .unwrap();
        let a = run(&inst, true).unwrap();
        let b = simple::run(&inst, true).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.outcome, b.outcome);
    }
}
