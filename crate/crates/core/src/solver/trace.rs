use std::collections::BTreeSet;
use std::fmt;

use crate::choice::{build_choice_graphs, AlternatingPath, Matching};
use crate::error::Result;
use crate::market::{MarketInstance, DUMMY};
use crate::scalar::Scalar;

use super::DeltaKind;

/// Why a matched edge left the matching after a price raise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DropReason {
    /// The item's price reached the bidder's maximum price.
    MaximumReached,
    /// The item is no longer among the bidder's first choices.
    LeftFirstChoice,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DropReason::MaximumReached => "maximum price reached",
            DropReason::LeftFirstChoice => "no longer a first choice",
        })
    }
}

/// One step of a solver run. Bidders and items are 0-based here; `Display`
/// prints bidders 1-based and the dummy as `j0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent<S> {
    /// A maximal alternating tree without augmenting path; sets ascending.
    TreeBuilt {
        root: usize,
        bidders: Vec<usize>,
        items: Vec<usize>,
    },
    DeltaComputed {
        delta: S,
        attained: Vec<DeltaKind>,
    },
    /// `items` (ascending) rose by `delta`; `prices` is the full vector after.
    PricesRaised {
        items: Vec<usize>,
        delta: S,
        prices: Vec<S>,
    },
    EdgeDropped {
        bidder: usize,
        item: usize,
        reason: DropReason,
    },
    Augmented {
        path: Vec<(usize, usize)>,
    },
}

struct Item(usize);

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == DUMMY {
            f.write_str("j0")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn join<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(",")
}

impl<S: fmt::Display> fmt::Display for TraceEvent<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::TreeBuilt { root, bidders, items } => write!(
                f,
                "tree root={} T={{{}}} S={{{}}}",
                root + 1,
                join(bidders, |b| (b + 1).to_string()),
                join(items, |j| Item(*j).to_string())
            ),
            TraceEvent::DeltaComputed { delta, attained } => {
                write!(f, "delta={delta} via {}", join(attained, |k| k.to_string()))
            }
            TraceEvent::PricesRaised { items, delta, prices } => write!(
                f,
                "raise {{{}}} by {delta} -> p=({})",
                join(items, |j| Item(*j).to_string()),
                join(&prices[1..], |p| p.to_string())
            ),
            TraceEvent::EdgeDropped { bidder, item, reason } => {
                write!(f, "drop ({}, {}): {reason}", bidder + 1, Item(*item))
            }
            TraceEvent::Augmented { path } => write!(
                f,
                "augment {}",
                join(path, |(b, j)| format!("({}, {})", b + 1, Item(*j)))
            ),
        }
    }
}

/// What [`audit_trace`] found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceAudit {
    pub augmentations: usize,
    pub price_raises: usize,
    pub drops: usize,
    /// Pairs dropped more than once, in order of the repeat.
    pub repeated_drops: Vec<(usize, usize)>,
    /// Broken invariants, human readable.
    pub problems: Vec<String>,
}

impl TraceAudit {
    pub fn is_clean(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Replays `events` against `inst` from zero prices and an empty matching.
///
/// Checks that prices never fall and the dummy stays at 0, that each raise
/// moves exactly the listed items by a positive `delta`, that integer
/// markets keep integer prices, that augmentations are valid alternating
/// paths, that every drop removes a matched edge which the last raise pushed
/// out of `F~_p` for the stated reason, and that no such edge is left
/// behind. Ends with every bidder assigned.
pub fn audit_trace<S: Scalar>(inst: &MarketInstance<S>, events: &[TraceEvent<S>]) -> Result<TraceAudit> {
    let n = inst.num_bidders();
    let k = inst.num_items();
    let integral = inst.is_integral();
    let mut audit = TraceAudit::default();
    let mut prices = vec![S::zero(); k + 1];
    let mut matching = Matching::empty(n, k);
    let mut dropped_once: BTreeSet<(usize, usize)> = BTreeSet::new();
    // edges that left F~_p at the latest raise and still await their drop
    let mut pending: Option<BTreeSet<(usize, usize, DropReason)>> = None;

    let settle = |pending: &mut Option<BTreeSet<(usize, usize, DropReason)>>, audit: &mut TraceAudit| {
        if let Some(left) = pending.take() {
            for (b, j, _) in left {
                audit
                    .problems
                    .push(format!("edge ({b}, {j}) left F~_p but was not dropped"));
            }
        }
    };

    for (t, event) in events.iter().enumerate() {
        if !matches!(event, TraceEvent::EdgeDropped { .. }) {
            settle(&mut pending, &mut audit);
        }
        match event {
            TraceEvent::TreeBuilt { root, .. } => {
                if *root >= n || matching.item_of(*root).is_some() {
                    audit
                        .problems
                        .push(format!("event {t}: tree root {root} is not unassigned"));
                }
            }
            TraceEvent::DeltaComputed { delta, attained } => {
                if *delta <= S::zero() {
                    audit.problems.push(format!("event {t}: nonpositive delta {delta}"));
                }
                if attained.is_empty() {
                    audit.problems.push(format!("event {t}: delta attained by no bound"));
                }
            }
            TraceEvent::PricesRaised {
                items,
                delta,
                prices: after,
            } => {
                audit.price_raises += 1;
                if after.len() != k + 1 {
                    audit
                        .problems
                        .push(format!("event {t}: price vector has the wrong length"));
                    continue;
                }
                if *delta <= S::zero() {
                    audit.problems.push(format!("event {t}: nonpositive raise {delta}"));
                }
                let raised: BTreeSet<usize> = items.iter().copied().collect();
                if raised.contains(&DUMMY) || !after[DUMMY].is_zero() {
                    audit.problems.push(format!("event {t}: dummy price moved"));
                }
                for j in 0..=k {
                    let expected = if raised.contains(&j) {
                        prices[j].clone() + delta.clone()
                    } else {
                        prices[j].clone()
                    };
                    if after[j] != expected {
                        audit
                            .problems
                            .push(format!("event {t}: item {j} price {} != {expected}", after[j]));
                    }
                    if after[j] < prices[j] {
                        audit.problems.push(format!("event {t}: item {j} price fell"));
                    }
                    if integral && !after[j].is_integral() {
                        audit
                            .problems
                            .push(format!("event {t}: non-integer price {}", after[j]));
                    }
                }
                prices = after.clone();
                let graphs = build_choice_graphs(inst, &prices)?;
                let mut left = BTreeSet::new();
                for b in 0..n {
                    if let Some(j) = matching.item_of(b) {
                        if !graphs.is_feasible(b, j) {
                            let reason = if inst.maximum(b, j).admits(&prices[j]) {
                                DropReason::LeftFirstChoice
                            } else {
                                DropReason::MaximumReached
                            };
                            left.insert((b, j, reason));
                        }
                    }
                }
                pending = Some(left);
            }
            TraceEvent::EdgeDropped { bidder, item, reason } => {
                audit.drops += 1;
                let expected = pending.as_mut().map(|p| p.remove(&(*bidder, *item, *reason)));
                if expected != Some(true) {
                    audit.problems.push(format!(
                        "event {t}: drop of ({bidder}, {item}) for `{reason}` does not follow a raise that caused it"
                    ));
                }
                if matching.item_of(*bidder) == Some(*item) {
                    matching.unassign(*bidder);
                }
                if !dropped_once.insert((*bidder, *item)) {
                    audit.repeated_drops.push((*bidder, *item));
                }
            }
            TraceEvent::Augmented { path } => {
                audit.augmentations += 1;
                let path = AlternatingPath { hops: path.clone() };
                let graphs = build_choice_graphs(inst, &prices)?;
                if path
                    .hops
                    .iter()
                    .any(|&(b, j)| b >= n || j > k || !graphs.is_feasible(b, j))
                {
                    audit
                        .problems
                        .push(format!("event {t}: path uses an edge outside F~_p"));
                } else if let Err(e) = matching.augment_along(&path) {
                    audit.problems.push(format!("event {t}: invalid augmentation: {e}"));
                }
            }
        }
    }
    settle(&mut pending, &mut audit);
    if matching.to_assignment().is_none() {
        audit.problems.push("trace ends with an unassigned bidder".into());
    }
    Ok(audit)
}
