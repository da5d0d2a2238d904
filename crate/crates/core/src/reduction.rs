//! Markets with utilities `v^_ij - c_i * c_j * p^_j` and their translation to
//! the standard `v - p` form: `v = v^/c_i`, `r = c_j * r^`, `m = c_j * m^`.
//! Prices map back as `p^_j = p_j / c_j` and utilities as `u^_i = c_i * u_i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::market::{ExtendedUtility, MarketInstance, Outcome, Report, Violation, DUMMY};
use crate::scalar::Field;
use crate::Rat;

/// A market in hatted quantities plus the positive scales `c_i` and `c_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedInstance<F> {
    base: MarketInstance<F>,
    bidder_scale: Vec<F>,
    /// `k + 1` entries; the dummy's scale is 1.
    item_scale: Vec<F>,
}

impl<F: Field> GeneralizedInstance<F> {
    /// `item_scale` lists the `k` real items; the dummy gets 1.
    pub fn new(base: MarketInstance<F>, bidder_scale: Vec<F>, item_scale: Vec<F>) -> Result<Self> {
        if bidder_scale.len() != base.num_bidders() {
            return Err(Error::shape(format!(
                "{} bidder scales for {} bidders",
                bidder_scale.len(),
                base.num_bidders()
            )));
        }
        if item_scale.len() != base.num_items() {
            return Err(Error::shape(format!(
                "{} item scales for {} items",
                item_scale.len(),
                base.num_items()
            )));
        }
        if let Some(c) = bidder_scale.iter().chain(&item_scale).find(|c| **c <= F::zero()) {
            return Err(Error::usage(format!("scale {c} is not positive")));
        }
        let item_scale = std::iter::once(F::one()).chain(item_scale).collect();
        Ok(GeneralizedInstance {
            base,
            bidder_scale,
            item_scale,
        })
    }

    pub fn base(&self) -> &MarketInstance<F> {
        &self.base
    }

    pub fn bidder_scale(&self) -> &[F] {
        &self.bidder_scale
    }

    /// Indexed like prices, dummy first.
    pub fn item_scale(&self) -> &[F] {
        &self.item_scale
    }

    /// `v^_ij - c_i c_j p^_j`, or `-inf` once `p^_j >= m^_ij`.
    pub fn utility(&self, bidder: usize, item: usize, price: &F) -> ExtendedUtility<F> {
        if self.base.maximum(bidder, item).admits(price) {
            ExtendedUtility::Finite(
                self.base.valuation(bidder, item).clone()
                    - self.bidder_scale[bidder].clone() * self.item_scale[item].clone() * price.clone(),
            )
        } else {
            ExtendedUtility::NegInfinity
        }
    }
}

/// The equivalent standard market.
pub fn reduce<F: Field>(g: &GeneralizedInstance<F>) -> MarketInstance<F> {
    let b = &g.base;
    let row = |f: &dyn Fn(usize) -> F| (1..=b.num_items()).map(f).collect::<Vec<F>>();
    let valuations = (0..b.num_bidders())
        .map(|i| row(&|j| b.valuation(i, j).clone() / g.bidder_scale[i].clone()))
        .collect();
    let reserves = (0..b.num_bidders())
        .map(|i| row(&|j| g.item_scale[j].clone() * b.reserve(i, j).clone()))
        .collect();
    let maxima = (0..b.num_bidders())
        .map(|i| {
            (1..=b.num_items())
                .map(|j| b.maximum(i, j).map(|m| g.item_scale[j].clone() * m.clone()))
                .collect()
        })
        .collect();
    MarketInstance::new(b.num_items(), valuations, reserves, maxima).expect("scaling keeps shapes and signs")
}

/// An outcome of a generalized market; utilities are evaluated directly
/// under the generalized utility function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedOutcome<F> {
    assignment: Vec<usize>,
    prices: Vec<F>,
    utilities: Vec<ExtendedUtility<F>>,
}

impl<F: Field> GeneralizedOutcome<F> {
    /// `prices` has `k + 1` entries, dummy first.
    pub fn new(g: &GeneralizedInstance<F>, assignment: Vec<usize>, prices: Vec<F>) -> Result<Self> {
        // reuse the shape and matching checks of a standard outcome
        let plain = Outcome::new(&g.base, assignment, prices)?;
        let utilities = plain
            .assignment()
            .iter()
            .enumerate()
            .map(|(i, &j)| g.utility(i, j, plain.price(j)))
            .collect();
        Ok(GeneralizedOutcome {
            assignment: plain.assignment().to_vec(),
            prices: plain.prices().to_vec(),
            utilities,
        })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn prices(&self) -> &[F] {
        &self.prices
    }

    pub fn utilities(&self) -> &[ExtendedUtility<F>] {
        &self.utilities
    }
}

/// Same matching, prices `p_j / c_j`.
pub fn lift_outcome<F: Field>(g: &GeneralizedInstance<F>, out: &Outcome<F>) -> Result<GeneralizedOutcome<F>> {
    let prices = out
        .prices()
        .iter()
        .zip(&g.item_scale)
        .map(|(p, c)| p.clone() / c.clone())
        .collect();
    GeneralizedOutcome::new(g, out.assignment().to_vec(), prices)
}

/// Feasibility and stability under the generalized utilities, with the
/// hatted reserves and maxima.
pub fn check_generalized_stable<F: Field>(g: &GeneralizedInstance<F>, out: &GeneralizedOutcome<F>) -> Result<Report> {
    let b = &g.base;
    if out.assignment.len() != b.num_bidders() || out.prices.len() != b.num_items() + 1 {
        return Err(Error::shape("outcome does not fit the generalized market"));
    }
    let mut report = Report::default();
    if !out.prices[DUMMY].is_zero() {
        report.push(Violation::NonzeroDummyPrice);
    }
    for (j, p) in out.prices.iter().enumerate().skip(1) {
        if *p < F::zero() {
            report.push(Violation::NegativePrice { item: j });
        }
    }
    for (i, &j) in out.assignment.iter().enumerate() {
        let own = &out.utilities[i];
        if *own < ExtendedUtility::Finite(F::zero()) {
            report.push(Violation::NegativeUtility { bidder: i });
        }
        if j != DUMMY {
            if out.prices[j] < *b.reserve(i, j) {
                report.push(Violation::BelowReserve { bidder: i, item: j });
            }
            if !b.maximum(i, j).admits(&out.prices[j]) {
                report.push(Violation::AtOrAboveMaximum { bidder: i, item: j });
            }
        }
        for other in b.items() {
            if g.utility(i, other, &out.prices[other]) > *own {
                report.push(Violation::BlockingPair { bidder: i, item: other });
            }
        }
    }
    Ok(report)
}

/// Multiplies every entry by the least common denominator, giving an integer
/// market with the same first choices and stable matchings. Prices and
/// utilities of the scaled market are the originals times the returned factor.
pub fn clear_denominators(inst: &MarketInstance<Rat>) -> (MarketInstance<Rat>, BigInt) {
    let lcd = inst.finite_entries().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let factor = Rat::from_integer(lcd.clone());
    (inst.map_scalar(|x| x * &factor), lcd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_one;
    use crate::market::{check_stable, Ceiling};
    use crate::solver::solve_simple;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn q(a: i64, b: i64) -> Rat {
        Rat::new(a.into(), b.into())
    }

    fn ones(g: &MarketInstance<Rat>) -> GeneralizedInstance<Rat> {
        GeneralizedInstance::new(g.clone(), vec![r(1); g.num_bidders()], vec![r(1); g.num_items()]).unwrap()
    }

    #[test]
    fn unit_scales_are_the_identity() {
        let base = example_one();
        let g = ones(&base);
        assert_eq!(reduce(&g), base);
        let out = solve_simple(&base).unwrap();
        let lifted = lift_outcome(&g, &out).unwrap();
        assert_eq!(lifted.prices(), out.prices());
        assert_eq!(lifted.utilities(), out.utilities());
        assert_eq!(
            check_generalized_stable(&g, &lifted).unwrap(),
            check_stable(&base, &out).unwrap()
        );
    }

    #[test]
    fn formulas_on_single_entries() {
        let base = MarketInstance::builder(1, 1)
            .valuation(0, 1, r(6))
            .reserve(0, 1, r(4))
            .build()
            .unwrap();
        let g = GeneralizedInstance::new(base, vec![r(2)], vec![q(1, 2)]).unwrap();
        let red = reduce(&g);
        assert_eq!(*red.valuation(0, 1), r(3));
        assert_eq!(*red.reserve(0, 1), r(2));
        assert_eq!(*red.maximum(0, 1), Ceiling::Infinite);
    }

    #[test]
    fn example_one_with_a_scaled_bidder() {
        let base = example_one();
        let g = GeneralizedInstance::new(base, vec![r(1), r(2), r(1)], vec![r(1), r(1)]).unwrap();
        let red = reduce(&g);
        assert_eq!(red.valuation(1, 1), &r(2));
        assert_eq!(red.valuation(1, 2), &r(2));
        assert_eq!(*red.reserve(1, 1), r(2));
        let lifted = lift_outcome(&g, &solve_simple(&red).unwrap()).unwrap();
        assert!(check_generalized_stable(&g, &lifted).unwrap().is_clean());
    }

    #[test]
    fn lift_formulas() {
        let base = MarketInstance::builder(1, 1).valuation(0, 1, r(5)).build().unwrap();
        let g = GeneralizedInstance::new(base, vec![q(1, 3)], vec![r(2)]).unwrap();
        let red = reduce(&g);
        assert_eq!(*red.valuation(0, 1), r(15));
        let out = Outcome::from_pairs(&red, &[(0, 1)], vec![r(4)]).unwrap();
        let lifted = lift_outcome(&g, &out).unwrap();
        assert_eq!(lifted.prices(), &[r(0), r(2)]);
        // u = 15 - 4 = 11, so u^ = 11/3 = 5 - (1/3)(2)(2)
        assert_eq!(lifted.utilities(), &[ExtendedUtility::Finite(q(11, 3))]);
    }

    #[test]
    fn lowered_price_is_caught() {
        let base = example_one();
        let g = GeneralizedInstance::new(base, vec![r(1), r(2), r(1)], vec![q(1, 2), r(3)]).unwrap();
        let out = solve_simple(&reduce(&g)).unwrap();
        let lifted = lift_outcome(&g, &out).unwrap();
        assert!(check_generalized_stable(&g, &lifted).unwrap().is_clean());
        let mut prices = lifted.prices().to_vec();
        let j = (1..prices.len()).find(|&j| prices[j] > r(0)).unwrap();
        prices[j] = r(0);
        let broken = GeneralizedOutcome::new(&g, lifted.assignment().to_vec(), prices).unwrap();
        assert!(!check_generalized_stable(&g, &broken).unwrap().is_clean());
    }

    #[test]
    fn scales_must_be_positive() {
        let base = example_one();
        let bad = GeneralizedInstance::new(base.clone(), vec![r(1), r(0), r(1)], vec![r(1), r(1)]);
        assert!(matches!(bad, Err(Error::Usage(_))));
        let bad = GeneralizedInstance::new(base, vec![r(1); 3], vec![r(-1), r(1)]);
        assert!(matches!(bad, Err(Error::Usage(_))));
    }

    #[test]
    fn denominators_clear() {
        let base = MarketInstance::builder(1, 2)
            .valuation(0, 1, q(1, 2))
            .valuation(0, 2, q(2, 3))
            .maximum(0, 2, q(5, 4))
            .build()
            .unwrap();
        let (scaled, lcd) = clear_denominators(&base);
        assert_eq!(lcd, BigInt::from(12));
        assert!(scaled.is_integral());
        assert_eq!(*scaled.valuation(0, 2), r(8));
        assert_eq!(*scaled.maximum(0, 2), Ceiling::Finite(r(15)));
    }
}
