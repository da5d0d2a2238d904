//! Exhaustive ground truth for small integer markets.
//!
//! Every price vector in `{0, ..., bound}^k` is tried, and for each one every
//! assignment that could possibly be stable is enumerated and confirmed with
//! [`check_stable`]. Integer data suffice: the solver keeps integer markets
//! integral, so the minimal stable prices lie on the grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market::{
    check_relaxed_stable, check_stable, compare_profiles, relaxed_utilities, Ceiling, Dominance, ExtendedUtility,
    MarketInstance, Outcome, Report, Violation, DUMMY,
};
use crate::scalar::Scalar;

pub const MAX_ORACLE_BIDDERS: usize = 5;
pub const MAX_ORACLE_ITEMS: usize = 3;

/// All stable outcomes with prices on the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableSet<S> {
    /// In grid order: price vectors lexicographically, then assignments.
    pub outcomes: Vec<Outcome<S>>,
    pub price_bound: i64,
    /// `max_outcomes u_i` for every bidder.
    pub per_bidder_max_utility: Vec<S>,
    /// The pointwise minimum of all stable price vectors, if that minimum is
    /// itself the price vector of a stable outcome.
    pub min_prices: Option<Vec<S>>,
}

/// Smallest admissible grid bound: the largest finite entry of `v`, `r`, `m`.
pub fn default_bound<S: Scalar>(inst: &MarketInstance<S>) -> Result<i64> {
    inst.max_finite_entry()
        .to_i64_exact()
        .ok_or_else(|| Error::usage("market entries are not 64-bit integers"))
}

fn check_capacity<S: Scalar>(inst: &MarketInstance<S>, bound: Option<i64>) -> Result<i64> {
    if inst.num_bidders() > MAX_ORACLE_BIDDERS || inst.num_items() > MAX_ORACLE_ITEMS {
        return Err(Error::usage(format!(
            "oracle handles at most {MAX_ORACLE_BIDDERS} bidders and {MAX_ORACLE_ITEMS} items, got {}x{}",
            inst.num_bidders(),
            inst.num_items()
        )));
    }
    if !inst.is_integral() {
        return Err(Error::usage("oracle requires integer valuations, reserves and maxima"));
    }
    let least = default_bound(inst)?;
    let bound = bound.unwrap_or(least);
    if bound < least {
        return Err(Error::usage(format!(
            "grid bound {bound} is below the largest finite entry {least}"
        )));
    }
    Ok(bound)
}

/// The `index`-th vector of `{0..=bound}^k`, first coordinate most significant.
fn grid_point<S: Scalar>(index: u64, items: usize, bound: i64) -> Vec<S> {
    let base = (bound + 1) as u64;
    let mut digits = vec![0i64; items];
    let mut rest = index;
    for d in digits.iter_mut().rev() {
        *d = (rest % base) as i64;
        rest /= base;
    }
    std::iter::once(S::zero())
        .chain(digits.into_iter().map(S::from_i64))
        .collect()
}

fn grid_size(items: usize, bound: i64) -> u64 {
    ((bound + 1) as u64).pow(items as u32)
}

/// Every assignment drawing bidder `i`'s item from `options[i]`, with real
/// items used at most once. Lexicographic in option order.
fn assignments(options: &[Vec<usize>], items: usize) -> Vec<Vec<usize>> {
    fn go(options: &[Vec<usize>], taken: &mut [bool], current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = current.len();
        if i == options.len() {
            out.push(current.clone());
            return;
        }
        for &j in &options[i] {
            if j != DUMMY && taken[j] {
                continue;
            }
            if j != DUMMY {
                taken[j] = true;
            }
            current.push(j);
            go(options, taken, current, out);
            current.pop();
            if j != DUMMY {
                taken[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(options, &mut vec![false; items + 1], &mut Vec::new(), &mut out);
    out
}

/// Items bidder `i` could hold in a stable outcome at `prices`: utility-maximal
/// (over items with `p < m`) and at or above the reserve.
fn stable_options<S: Scalar>(inst: &MarketInstance<S>, i: usize, prices: &[S]) -> Vec<usize> {
    let value = |j: usize| -> Option<S> {
        inst.maximum(i, j)
            .admits(&prices[j])
            .then(|| inst.valuation(i, j).clone() - prices[j].clone())
    };
    let best = inst.items().filter_map(value).max();
    inst.items()
        .filter(|&j| value(j).is_some() && value(j) == best && prices[j] >= *inst.reserve(i, j))
        .collect()
}

pub fn enumerate_stable<S: Scalar>(inst: &MarketInstance<S>, bound: Option<i64>) -> Result<StableSet<S>> {
    let bound = check_capacity(inst, bound)?;
    let (n, k) = (inst.num_bidders(), inst.num_items());
    let per_point: Vec<Result<Vec<Outcome<S>>>> = (0..grid_size(k, bound))
        .into_par_iter()
        .map(|index| {
            let prices: Vec<S> = grid_point(index, k, bound);
            let options: Vec<Vec<usize>> = (0..n).map(|i| stable_options(inst, i, &prices)).collect();
            let mut found = Vec::new();
            for a in assignments(&options, k) {
                let out = Outcome::new(inst, a, prices.clone())?;
                if check_stable(inst, &out)?.is_clean() {
                    found.push(out);
                }
            }
            Ok(found)
        })
        .collect();
    let mut outcomes = Vec::new();
    for chunk in per_point {
        outcomes.extend(chunk?);
    }
    if outcomes.is_empty() {
        return Err(Error::internal("no stable outcome on the price grid"));
    }

    let per_bidder_max_utility = (0..n)
        .map(|i| {
            outcomes
                .iter()
                .filter_map(|o| o.utility(i).finite().cloned())
                .max()
                .ok_or_else(|| Error::internal("stable outcome with infinite utility"))
        })
        .collect::<Result<Vec<S>>>()?;
    let pointwise_min: Vec<S> = (0..=k)
        .map(|j| {
            outcomes
                .iter()
                .map(|o| o.price(j).clone())
                .min()
                .expect("outcomes is nonempty")
        })
        .collect();
    let min_prices = outcomes
        .iter()
        .any(|o| o.prices() == pointwise_min.as_slice())
        .then_some(pointwise_min);
    Ok(StableSet {
        outcomes,
        price_bound: bound,
        per_bidder_max_utility,
        min_prices,
    })
}

/// Whether `out` is bidder optimal as far as the enumeration can tell: stable,
/// priced pointwise at or below every enumerated stable outcome, and giving
/// each bidder the best utility it gets in any of them.
pub fn assert_bidder_optimal<S: Scalar>(
    inst: &MarketInstance<S>,
    out: &Outcome<S>,
    set: &StableSet<S>,
) -> Result<Report> {
    let mut report = check_stable(inst, out)?;
    for j in 1..=inst.num_items() {
        if set.outcomes.iter().any(|o| o.price(j) < out.price(j)) {
            report.push(Violation::PriceNotMinimal { item: j });
        }
    }
    for (i, best) in set.per_bidder_max_utility.iter().enumerate() {
        if out.utility(i).finite() != Some(best) {
            report.push(Violation::UtilityNotOptimal { bidder: i });
        }
    }
    Ok(report)
}

/// A relaxed-stable outcome together with its relaxed utilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierPoint<S> {
    pub outcome: Outcome<S>,
    pub utilities: Vec<ExtendedUtility<S>>,
}

/// Items bidder `i` may hold under relaxed feasibility: `r <= p <= m` and a
/// nonnegative relaxed utility.
fn relaxed_options<S: Scalar>(inst: &MarketInstance<S>, i: usize, prices: &[S]) -> Vec<usize> {
    inst.items()
        .filter(|&j| {
            let p = &prices[j];
            let under_cap = match inst.maximum(i, j) {
                Ceiling::Finite(m) => p <= m,
                Ceiling::Infinite => true,
            };
            under_cap && p >= inst.reserve(i, j) && *inst.valuation(i, j) >= *p
        })
        .collect()
}

/// The relaxed-stable outcomes on the grid whose relaxed utility profile no
/// other one weakly dominates with a strict gain somewhere. One outcome per
/// distinct profile, the first in grid order.
pub fn relaxed_pareto_frontier<S: Scalar>(
    inst: &MarketInstance<S>,
    bound: Option<i64>,
) -> Result<Vec<FrontierPoint<S>>> {
    let bound = check_capacity(inst, bound)?;
    let (n, k) = (inst.num_bidders(), inst.num_items());
    let per_point: Vec<Result<Vec<FrontierPoint<S>>>> = (0..grid_size(k, bound))
        .into_par_iter()
        .map(|index| {
            let prices: Vec<S> = grid_point(index, k, bound);
            let options: Vec<Vec<usize>> = (0..n).map(|i| relaxed_options(inst, i, &prices)).collect();
            let mut found = Vec::new();
            for a in assignments(&options, k) {
                let outcome = Outcome::new(inst, a, prices.clone())?;
                if check_relaxed_stable(inst, &outcome)?.is_clean() {
                    let utilities = relaxed_utilities(inst, &outcome);
                    found.push(FrontierPoint { outcome, utilities });
                }
            }
            Ok(found)
        })
        .collect();
    let mut points: Vec<FrontierPoint<S>> = Vec::new();
    for chunk in per_point {
        for p in chunk? {
            if !points.iter().any(|q| q.utilities == p.utilities) {
                points.push(p);
            }
        }
    }
    let mut frontier = Vec::new();
    for p in &points {
        let mut dominated = false;
        for q in &points {
            if q.utilities != p.utilities && compare_profiles(&q.utilities, &p.utilities)? == Dominance::GreaterOrEqual
            {
                dominated = true;
                break;
            }
        }
        if !dominated {
            frontier.push(p.clone());
        }
    }
    Ok(frontier)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example_one, example_two};
    use crate::solver::solve_simple;
    use crate::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn example_two_stable_set() {
        let set = enumerate_stable(&example_two(), Some(10)).unwrap();
        assert_eq!(set.min_prices, Some(vec![r(0), r(5)]));
        assert_eq!(set.per_bidder_max_utility, vec![r(0), r(0)]);
    }

    #[test]
    fn example_one_stable_set() {
        let set = enumerate_stable(&example_one(), Some(4)).unwrap();
        assert_eq!(set.min_prices, Some(vec![r(0), r(2), r(2)]));
        assert_eq!(set.per_bidder_max_utility, vec![r(0), r(2), r(0)]);
    }

    #[test]
    fn single_pair_grid() {
        let inst = MarketInstance::<i64>::builder(1, 1).valuation(0, 1, 1).build().unwrap();
        let set = enumerate_stable(&inst, Some(1)).unwrap();
        let found: Vec<(Vec<usize>, Vec<i64>)> = set
            .outcomes
            .iter()
            .map(|o| (o.assignment().to_vec(), o.prices().to_vec()))
            .collect();
        assert!(found.contains(&(vec![1], vec![0, 0])));
        assert!(found.contains(&(vec![1], vec![0, 1])));
        assert!(found.contains(&(vec![0], vec![0, 1])));
        assert_eq!(set.min_prices, Some(vec![0, 0]));
    }

    #[test]
    fn capacity_and_integrality_are_enforced() {
        let big = MarketInstance::<i64>::builder(6, 1).build().unwrap();
        assert!(matches!(enumerate_stable(&big, None), Err(Error::Usage(_))));
        let frac = MarketInstance::<Rat>::builder(1, 1)
            .valuation(0, 1, Rat::new(1.into(), 2.into()))
            .build()
            .unwrap();
        assert!(matches!(enumerate_stable(&frac, None), Err(Error::Usage(_))));
        assert!(matches!(
            enumerate_stable(&example_one(), Some(3)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn bidder_optimality_examples() {
        let ex1 = example_one();
        let set = enumerate_stable(&ex1, Some(4)).unwrap();
        let solved = solve_simple(&ex1).unwrap();
        assert!(assert_bidder_optimal(&ex1, &solved, &set).unwrap().is_clean());

        let relaxed = Outcome::from_pairs(&ex1, &[(0, 1), (1, 2)], vec![r(0), r(2)]).unwrap();
        let report = assert_bidder_optimal(&ex1, &relaxed, &set).unwrap();
        assert!(report.contains(&Violation::BlockingPair { bidder: 1, item: 1 }));

        let inst = MarketInstance::<i64>::builder(2, 2)
            .valuation(0, 1, 3)
            .valuation(1, 1, 2)
            .valuation(1, 2, 4)
            .build()
            .unwrap();
        let set = enumerate_stable(&inst, None).unwrap();
        let own = set
            .outcomes
            .iter()
            .find(|o| Some(o.prices()) == set.min_prices.as_deref())
            .unwrap();
        assert!(assert_bidder_optimal(&inst, own, &set).unwrap().is_clean());
    }

    #[test]
    fn frontiers_of_the_examples() {
        let profiles = |inst: &MarketInstance<Rat>| -> Vec<Vec<ExtendedUtility<Rat>>> {
            relaxed_pareto_frontier(inst, None)
                .unwrap()
                .into_iter()
                .map(|p| p.utilities)
                .collect()
        };
        let fin = |xs: &[i64]| xs.iter().map(|&x| ExtendedUtility::Finite(r(x))).collect::<Vec<_>>();
        let f1 = profiles(&example_one());
        assert!(f1.contains(&fin(&[1, 2, 0])));
        assert!(f1.contains(&fin(&[0, 2, 1])));
        let f2 = profiles(&example_two());
        assert!(f2.contains(&fin(&[5, 0])));
        assert!(f2.contains(&fin(&[0, 5])));
    }
}
