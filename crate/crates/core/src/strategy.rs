//! Searching for profitable lies. A bidder misreports one valuation, the
//! market is solved on the report, and the bidder's true utility at the
//! resulting item and price is compared with the honest one.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market::{Ceiling, ExtendedUtility, MarketInstance};
use crate::scalar::Scalar;
use crate::solver::solve_simple;

/// A single-valuation misreport that pays off.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisreportResult<S> {
    /// The true market.
    pub market: MarketInstance<S>,
    pub bidder: usize,
    /// `(bidder, item)` whose valuation was misreported.
    pub coordinate: (usize, usize),
    pub reported_value: S,
    pub true_utility_honest: S,
    pub true_utility_lying: S,
}

impl<S: Scalar> MisreportResult<S> {
    pub fn gain(&self) -> S {
        self.true_utility_lying.clone() - self.true_utility_honest.clone()
    }
}

/// Bidder `bidder`'s true utility when the market is solved on `reported`.
pub fn utility_under_report<S: Scalar>(
    inst: &MarketInstance<S>,
    bidder: usize,
    reported: &MarketInstance<S>,
) -> Result<ExtendedUtility<S>> {
    if reported.num_bidders() != inst.num_bidders() || reported.num_items() != inst.num_items() {
        return Err(Error::shape("reported market has a different shape"));
    }
    if bidder >= inst.num_bidders() {
        return Err(Error::IndexOutOfRange {
            what: "bidder",
            index: bidder,
            limit: inst.num_bidders(),
        });
    }
    for i in (0..inst.num_bidders()).filter(|&i| i != bidder) {
        let same = inst.items().all(|j| {
            inst.valuation(i, j) == reported.valuation(i, j)
                && inst.reserve(i, j) == reported.reserve(i, j)
                && inst.maximum(i, j) == reported.maximum(i, j)
        });
        if !same {
            return Err(Error::usage(format!("report changes bidder {} as well", i + 1)));
        }
    }
    let out = solve_simple(reported)?;
    let j = out.item_of(bidder);
    Ok(inst.pair_utility(bidder, j, out.price(j)))
}

/// Checks the restricted setting: all reserves zero, each bidder's maximum
/// price the same for every real item, and no two bidders sharing one.
pub fn check_restricted<S: Scalar>(inst: &MarketInstance<S>) -> Result<()> {
    let k = inst.num_items();
    let mut seen: Vec<&Ceiling<S>> = Vec::new();
    for i in 0..inst.num_bidders() {
        if (1..=k).any(|j| !inst.reserve(i, j).is_zero()) {
            return Err(Error::usage(format!("bidder {} has a nonzero reserve", i + 1)));
        }
        if k == 0 {
            continue;
        }
        let m = inst.maximum(i, 1);
        if (2..=k).any(|j| inst.maximum(i, j) != m) {
            return Err(Error::usage(format!(
                "bidder {}'s maximum price differs between items",
                i + 1
            )));
        }
        if seen.contains(&m) {
            return Err(Error::usage(format!(
                "bidder {} repeats another bidder's maximum price {m}",
                i + 1
            )));
        }
        seen.push(m);
    }
    Ok(())
}

/// The first profitable misreport for `bidder`, trying items in order and
/// for each item the values of `grid` in order.
pub fn find_bidder_misreport<S: Scalar>(
    inst: &MarketInstance<S>,
    bidder: usize,
    grid: &[S],
) -> Result<Option<MisreportResult<S>>> {
    let honest = utility_under_report(inst, bidder, inst)?;
    let ExtendedUtility::Finite(honest) = honest else {
        return Err(Error::internal("honest outcome has infinite utility"));
    };
    for j in 1..=inst.num_items() {
        for x in grid.iter().filter(|x| *x != inst.valuation(bidder, j)) {
            let reported = inst.with_valuation(bidder, j, x.clone())?;
            if let ExtendedUtility::Finite(lying) = utility_under_report(inst, bidder, &reported)? {
                if lying > honest {
                    return Ok(Some(MisreportResult {
                        market: inst.clone(),
                        bidder,
                        coordinate: (bidder, j),
                        reported_value: x.clone(),
                        true_utility_honest: honest,
                        true_utility_lying: lying,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// The first profitable misreport in `family` order, bidders in index order
/// within each market. Every market must satisfy [`check_restricted`].
pub fn find_profitable_misreport<S: Scalar>(
    family: &[MarketInstance<S>],
    grid: &[S],
) -> Result<Option<MisreportResult<S>>> {
    for inst in family {
        check_restricted(inst)?;
    }
    family
        .par_iter()
        .map(|inst| -> Result<Option<MisreportResult<S>>> {
            for b in 0..inst.num_bidders() {
                if let Some(hit) = find_bidder_misreport(inst, b, grid)? {
                    return Ok(Some(hit));
                }
            }
            Ok(None)
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        })
        .transpose()
        .map(Option::flatten)
}

/// Every way to give the bidders pairwise distinct maxima from `options`.
fn distinct_maxima(bidders: usize, options: &[Ceiling<i64>]) -> Vec<Vec<Ceiling<i64>>> {
    let mut choices: Vec<Vec<Ceiling<i64>>> = vec![Vec::new()];
    for _ in 0..bidders {
        choices = choices
            .into_iter()
            .flat_map(|prefix| {
                options
                    .iter()
                    .filter(|m| !prefix.contains(m))
                    .map(|m| [prefix.clone(), vec![m.clone()]].concat())
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    choices
}

/// All vectors of length `len` over `options`, lexicographically.
fn tuples(len: usize, options: &[i64]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| options.iter().map(move |x| [p.clone(), vec![*x]].concat()))
            .collect();
    }
    out
}

fn restricted_market(items: usize, valuations: Vec<Vec<i64>>, maxima: &[Ceiling<i64>]) -> MarketInstance<i64> {
    let bidders = valuations.len();
    MarketInstance::new(
        items,
        valuations,
        vec![vec![0; items]; bidders],
        maxima.iter().map(|m| vec![m.clone(); items]).collect(),
    )
    .expect("family members are well formed")
}

/// Restricted markets: every valuation matrix over `value_options`, combined
/// with every assignment of pairwise distinct per-bidder maxima from
/// `max_options`. Ordered by maxima, then valuations lexicographically.
pub fn restricted_family(
    bidders: usize,
    items: usize,
    value_options: &[i64],
    max_options: &[Ceiling<i64>],
) -> Vec<MarketInstance<i64>> {
    let matrices = tuples(bidders * items, value_options);
    distinct_maxima(bidders, max_options)
        .iter()
        .flat_map(|maxima| {
            matrices.iter().map(move |flat| {
                let rows = (0..bidders)
                    .map(|i| flat[i * items..(i + 1) * items].to_vec())
                    .collect();
                restricted_market(items, rows, maxima)
            })
        })
        .collect()
}

/// Restricted markets whose valuations factor as `v_ij = w_i * a_j`, with
/// `w_i` and `a_j` drawn from `factors` and every product at most
/// `max_value`. Same maxima scheme and order as [`restricted_family`].
pub fn product_family(
    bidders: usize,
    items: usize,
    factors: &[i64],
    max_value: i64,
    max_options: &[Ceiling<i64>],
) -> Vec<MarketInstance<i64>> {
    let weights = tuples(bidders, factors);
    let qualities = tuples(items, factors);
    let mut family = Vec::new();
    for maxima in distinct_maxima(bidders, max_options) {
        for w in &weights {
            for a in &qualities {
                if w.iter().any(|x| a.iter().any(|y| x * y > max_value)) {
                    continue;
                }
                let rows = w.iter().map(|x| a.iter().map(|y| x * y).collect()).collect();
                family.push(restricted_market(items, rows, &maxima));
            }
        }
    }
    family
}
