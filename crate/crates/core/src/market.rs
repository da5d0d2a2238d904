//! Market data model: instances, outcomes, and the outcome predicates.
//!
//! Bidders are numbered `0..n`. Items are numbered `0..=k`, where item `0` is
//! the dummy item ([`DUMMY`]) that absorbs every bidder left without a real
//! item. It has valuation 0, reserve 0 and no maximum price for all bidders.
//!
//! Human-facing output ([`Violation`]'s `Display`, the CLI file formats)
//! numbers bidders from 1 instead.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Index of the dummy item.
pub const DUMMY: usize = 0;

/// A maximum price: finite, or absent (`+inf`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ceiling<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Ceiling<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Ceiling::Finite(v) => Some(v),
            Ceiling::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ceiling::Finite(_))
    }

    /// `true` iff `price` lies strictly below the ceiling.
    pub fn admits(&self, price: &S) -> bool {
        match self {
            Ceiling::Finite(m) => price < m,
            Ceiling::Infinite => true,
        }
    }

    /// `self - amount`, with `inf - x = inf`.
    pub fn minus(&self, amount: &S) -> Ceiling<S> {
        match self {
            Ceiling::Finite(m) => Ceiling::Finite(m.clone() - amount.clone()),
            Ceiling::Infinite => Ceiling::Infinite,
        }
    }

    pub fn map<T>(&self, f: impl FnOnce(&S) -> T) -> Ceiling<T> {
        match self {
            Ceiling::Finite(m) => Ceiling::Finite(f(m)),
            Ceiling::Infinite => Ceiling::Infinite,
        }
    }
}

impl<S: fmt::Display> fmt::Display for Ceiling<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ceiling::Finite(v) => write!(f, "{v}"),
            Ceiling::Infinite => f.write_str("inf"),
        }
    }
}

/// A utility value: finite, or `-inf` once the price reaches the bidder's
/// maximum price for the item.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedUtility<S> {
    NegInfinity,
    Finite(S),
}

impl<S> ExtendedUtility<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            ExtendedUtility::Finite(v) => Some(v),
            ExtendedUtility::NegInfinity => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedUtility::Finite(_))
    }

    pub fn map<T>(&self, f: impl FnOnce(&S) -> T) -> ExtendedUtility<T> {
        match self {
            ExtendedUtility::Finite(v) => ExtendedUtility::Finite(f(v)),
            ExtendedUtility::NegInfinity => ExtendedUtility::NegInfinity,
        }
    }
}

impl<S: fmt::Display> fmt::Display for ExtendedUtility<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedUtility::Finite(v) => write!(f, "{v}"),
            ExtendedUtility::NegInfinity => f.write_str("-inf"),
        }
    }
}

/// Valuations, reserve prices and maximum prices for every bidder-item pair.
///
/// Matrices are stored with the dummy column at index 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarketInstance<S> {
    bidders: usize,
    items: usize,
    valuations: Vec<Vec<S>>,
    reserves: Vec<Vec<S>>,
    maxima: Vec<Vec<Ceiling<S>>>,
}

impl<S: Scalar> MarketInstance<S> {
    /// Builds an instance from `bidders x items` matrices over the real items.
    /// The dummy column is added here.
    pub fn new(
        items: usize,
        valuations: Vec<Vec<S>>,
        reserves: Vec<Vec<S>>,
        maxima: Vec<Vec<Ceiling<S>>>,
    ) -> Result<Self> {
        let bidders = valuations.len();
        if reserves.len() != bidders || maxima.len() != bidders {
            return Err(Error::shape(format!(
                "expected {bidders} rows in every matrix, got reserves={} maxima={}",
                reserves.len(),
                maxima.len()
            )));
        }
        for (i, ((v, r), m)) in valuations.iter().zip(&reserves).zip(&maxima).enumerate() {
            if v.len() != items || r.len() != items || m.len() != items {
                return Err(Error::shape(format!(
                    "row {i}: expected {items} columns, got valuations={} reserves={} maxima={}",
                    v.len(),
                    r.len(),
                    m.len()
                )));
            }
        }
        let with_dummy = |rows: Vec<Vec<S>>| -> Vec<Vec<S>> {
            rows.into_iter()
                .map(|row| std::iter::once(S::zero()).chain(row).collect())
                .collect()
        };
        let valuations = with_dummy(valuations);
        let reserves = with_dummy(reserves);
        let maxima = maxima
            .into_iter()
            .map(|row| std::iter::once(Ceiling::Infinite).chain(row).collect())
            .collect();
        let inst = MarketInstance {
            bidders,
            items,
            valuations,
            reserves,
            maxima,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Starts an instance where every pair defaults to `v = 0, r = 0, m = inf`.
    pub fn builder(bidders: usize, items: usize) -> MarketBuilder<S> {
        MarketBuilder {
            inst: MarketInstance {
                bidders,
                items,
                valuations: vec![vec![S::zero(); items + 1]; bidders],
                reserves: vec![vec![S::zero(); items + 1]; bidders],
                maxima: vec![vec![Ceiling::Infinite; items + 1]; bidders],
            },
            error: None,
        }
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.bidders {
            if !self.valuations[i][DUMMY].is_zero()
                || !self.reserves[i][DUMMY].is_zero()
                || self.maxima[i][DUMMY] != Ceiling::Infinite
            {
                return Err(Error::usage(format!("bidder {i}: dummy column must be (0, 0, inf)")));
            }
            for j in 1..=self.items {
                if self.reserves[i][j] < S::zero() {
                    return Err(Error::usage(format!("negative reserve price for bidder {i}, item {j}")));
                }
            }
        }
        Ok(())
    }

    pub fn num_bidders(&self) -> usize {
        self.bidders
    }

    /// Number of real items (the dummy is not counted).
    pub fn num_items(&self) -> usize {
        self.items
    }

    /// Item indices including the dummy: `0..=k`.
    pub fn items(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.items
    }

    pub fn valuation(&self, bidder: usize, item: usize) -> &S {
        &self.valuations[bidder][item]
    }

    pub fn reserve(&self, bidder: usize, item: usize) -> &S {
        &self.reserves[bidder][item]
    }

    pub fn maximum(&self, bidder: usize, item: usize) -> &Ceiling<S> {
        &self.maxima[bidder][item]
    }

    pub fn check_pair(&self, bidder: usize, item: usize) -> Result<()> {
        if bidder >= self.bidders {
            return Err(Error::IndexOutOfRange {
                what: "bidder",
                index: bidder,
                limit: self.bidders,
            });
        }
        if item > self.items {
            return Err(Error::IndexOutOfRange {
                what: "item",
                index: item,
                limit: self.items + 1,
            });
        }
        Ok(())
    }

    /// `u_ij(p) = v_ij - p` if `p < m_ij`, else `-inf`.
    pub fn utility(&self, bidder: usize, item: usize, price: &S) -> Result<ExtendedUtility<S>> {
        self.check_pair(bidder, item)?;
        if *price < S::zero() {
            return Err(Error::usage("utility evaluated at a negative price"));
        }
        Ok(self.pair_utility(bidder, item, price))
    }

    /// Unchecked form of [`utility`](Self::utility).
    pub fn pair_utility(&self, bidder: usize, item: usize, price: &S) -> ExtendedUtility<S> {
        if self.maxima[bidder][item].admits(price) {
            ExtendedUtility::Finite(self.valuations[bidder][item].clone() - price.clone())
        } else {
            ExtendedUtility::NegInfinity
        }
    }

    /// Copy with one valuation replaced. Used to model misreports.
    pub fn with_valuation(&self, bidder: usize, item: usize, value: S) -> Result<Self> {
        self.check_pair(bidder, item)?;
        if item == DUMMY {
            return Err(Error::usage("the dummy valuation is fixed at 0"));
        }
        let mut out = self.clone();
        out.valuations[bidder][item] = value;
        Ok(out)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MarketInstance<T> {
        let map_rows =
            |rows: &Vec<Vec<S>>| -> Vec<Vec<T>> { rows.iter().map(|row| row.iter().map(&f).collect()).collect() };
        MarketInstance {
            bidders: self.bidders,
            items: self.items,
            valuations: map_rows(&self.valuations),
            reserves: map_rows(&self.reserves),
            maxima: self
                .maxima
                .iter()
                .map(|row| row.iter().map(|m| m.map(&f)).collect())
                .collect(),
        }
    }

    /// Every finite entry of `v`, `r` and `m`, dummy column included.
    pub fn finite_entries(&self) -> impl Iterator<Item = &S> + '_ {
        let v = self.valuations.iter().flatten();
        let r = self.reserves.iter().flatten();
        let m = self.maxima.iter().flatten().filter_map(Ceiling::finite);
        v.chain(r).chain(m)
    }

    /// Largest finite entry among `v`, `r`, `m` (0 for empty markets).
    pub fn max_finite_entry(&self) -> S {
        self.finite_entries()
            .max()
            .cloned()
            .unwrap_or_else(S::zero)
            .max(S::zero())
    }

    /// `true` iff every finite entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.finite_entries().all(Scalar::is_integral)
    }

    pub(crate) fn check_prices(&self, prices: &[S]) -> Result<()> {
        if prices.len() != self.items + 1 {
            return Err(Error::shape(format!(
                "expected {} prices (dummy included), got {}",
                self.items + 1,
                prices.len()
            )));
        }
        if !prices[DUMMY].is_zero() {
            return Err(Error::usage("the dummy price must be 0"));
        }
        if prices.iter().any(|p| *p < S::zero()) {
            return Err(Error::usage("prices must be nonnegative"));
        }
        Ok(())
    }
}

/// Sparse construction of a [`MarketInstance`]; see [`MarketInstance::builder`].
///
/// Items are addressed `1..=k`; setting the dummy column is an error.
#[derive(Debug, Clone)]
pub struct MarketBuilder<S> {
    inst: MarketInstance<S>,
    error: Option<Error>,
}

impl<S: Scalar> MarketBuilder<S> {
    fn set(&mut self, bidder: usize, item: usize, apply: impl FnOnce(&mut MarketInstance<S>)) {
        if self.error.is_some() {
            return;
        }
        if let Err(e) = self.inst.check_pair(bidder, item) {
            self.error = Some(e);
        } else if item == DUMMY {
            self.error = Some(Error::usage("the dummy column cannot be set"));
        } else {
            apply(&mut self.inst);
        }
    }

    pub fn valuation(mut self, bidder: usize, item: usize, value: S) -> Self {
        self.set(bidder, item, |inst| inst.valuations[bidder][item] = value);
        self
    }

    pub fn reserve(mut self, bidder: usize, item: usize, value: S) -> Self {
        self.set(bidder, item, |inst| inst.reserves[bidder][item] = value);
        self
    }

    pub fn maximum(mut self, bidder: usize, item: usize, value: S) -> Self {
        self.set(bidder, item, |inst| inst.maxima[bidder][item] = Ceiling::Finite(value));
        self
    }

    pub fn build(self) -> Result<MarketInstance<S>> {
        if let Some(e) = self.error {
            return Err(e);
        }
        self.inst.validate()?;
        Ok(self.inst)
    }
}

/// A matching with prices. Utilities are derived on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Outcome<S> {
    assignment: Vec<usize>,
    prices: Vec<S>,
    utilities: Vec<ExtendedUtility<S>>,
}

impl<S: Scalar> Outcome<S> {
    /// `assignment[i]` is bidder `i`'s item (0 for the dummy); `prices` has
    /// `k + 1` entries with the dummy's price first.
    pub fn new(inst: &MarketInstance<S>, assignment: Vec<usize>, prices: Vec<S>) -> Result<Self> {
        if assignment.len() != inst.num_bidders() {
            return Err(Error::shape(format!(
                "assignment covers {} bidders, market has {}",
                assignment.len(),
                inst.num_bidders()
            )));
        }
        if prices.len() != inst.num_items() + 1 {
            return Err(Error::shape(format!(
                "expected {} prices (dummy included), got {}",
                inst.num_items() + 1,
                prices.len()
            )));
        }
        if !prices[DUMMY].is_zero() {
            return Err(Error::usage("the dummy price must be 0"));
        }
        let mut taken = vec![false; inst.num_items() + 1];
        for (i, &j) in assignment.iter().enumerate() {
            inst.check_pair(i, j)?;
            if j != DUMMY {
                if taken[j] {
                    return Err(Error::usage(format!("item {j} assigned to two bidders")));
                }
                taken[j] = true;
            }
        }
        let utilities = assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| inst.pair_utility(i, j, &prices[j]))
            .collect();
        Ok(Outcome {
            assignment,
            prices,
            utilities,
        })
    }

    /// Convenience constructor: `pairs` lists `(bidder, item)` for matched
    /// bidders (everyone else gets the dummy) and `real_prices` holds the `k`
    /// prices of the real items.
    pub fn from_pairs(inst: &MarketInstance<S>, pairs: &[(usize, usize)], real_prices: Vec<S>) -> Result<Self> {
        let mut assignment = vec![DUMMY; inst.num_bidders()];
        for &(i, j) in pairs {
            inst.check_pair(i, j)?;
            assignment[i] = j;
        }
        let prices = std::iter::once(S::zero()).chain(real_prices).collect();
        Outcome::new(inst, assignment, prices)
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn item_of(&self, bidder: usize) -> usize {
        self.assignment[bidder]
    }

    /// All prices, dummy first.
    pub fn prices(&self) -> &[S] {
        &self.prices
    }

    pub fn price(&self, item: usize) -> &S {
        &self.prices[item]
    }

    pub fn utilities(&self) -> &[ExtendedUtility<S>] {
        &self.utilities
    }

    pub fn utility(&self, bidder: usize) -> &ExtendedUtility<S> {
        &self.utilities[bidder]
    }

    /// Matched pairs `(bidder, item)` over real items, ordered by bidder.
    pub fn matched_pairs(&self) -> Vec<(usize, usize)> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &j)| j != DUMMY)
            .map(|(i, &j)| (i, j))
            .collect()
    }

    fn check_shape(&self, inst: &MarketInstance<S>) -> Result<()> {
        if self.assignment.len() != inst.num_bidders() || self.prices.len() != inst.num_items() + 1 {
            return Err(Error::shape("outcome does not belong to this market"));
        }
        Ok(())
    }
}

/// One failed condition, naming the offending bidder and/or item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Violation {
    /// Feasibility (1): `u_i >= 0`.
    NegativeUtility { bidder: usize },
    /// Feasibility (2): `p_j0 = 0`.
    NonzeroDummyPrice,
    /// Feasibility (2): `p_j >= 0`.
    NegativePrice { item: usize },
    /// Feasibility (3): `r_ij <= p_j` for a matched pair.
    BelowReserve { bidder: usize, item: usize },
    /// Feasibility (3): `p_j < m_ij` for a matched pair.
    AtOrAboveMaximum { bidder: usize, item: usize },
    /// Relaxed feasibility: `p_j <= m_ij` for a matched pair.
    AboveMaximum { bidder: usize, item: usize },
    /// Stability: bidder strictly prefers `item` at its current price.
    BlockingPair { bidder: usize, item: usize },
    /// Relaxed stability: neither `u_i >= v_ij - max(p_j, r_ij)` nor `p_j >= m_ij`.
    RelaxedBlockingPair { bidder: usize, item: usize },
    /// Some stable outcome prices `item` strictly lower.
    PriceNotMinimal { item: usize },
    /// Some stable outcome gives `bidder` strictly more.
    UtilityNotOptimal { bidder: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NegativeUtility { bidder } => {
                write!(f, "feasibility (1): bidder {} has negative utility", bidder + 1)
            }
            Violation::NonzeroDummyPrice => f.write_str("feasibility (2): dummy price is not 0"),
            Violation::NegativePrice { item } => {
                write!(f, "feasibility (2): item {item} has a negative price")
            }
            Violation::BelowReserve { bidder, item } => write!(
                f,
                "feasibility (3): pair ({}, {item}) priced below its reserve",
                bidder + 1
            ),
            Violation::AtOrAboveMaximum { bidder, item } => write!(
                f,
                "feasibility (3): pair ({}, {item}) priced at or above its maximum",
                bidder + 1
            ),
            Violation::AboveMaximum { bidder, item } => write!(
                f,
                "relaxed feasibility: pair ({}, {item}) priced above its maximum",
                bidder + 1
            ),
            Violation::BlockingPair { bidder, item } => {
                write!(f, "stability: blocking pair ({}, {item})", bidder + 1)
            }
            Violation::RelaxedBlockingPair { bidder, item } => {
                write!(f, "relaxed stability: blocking pair ({}, {item})", bidder + 1)
            }
            Violation::PriceNotMinimal { item } => {
                write!(f, "optimality: item {item} is priced above a stable alternative")
            }
            Violation::UtilityNotOptimal { bidder } => write!(
                f,
                "optimality: bidder {} does better in another stable outcome",
                bidder + 1
            ),
        }
    }
}

/// The result of a predicate: the list of violations, empty on success.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, v: &Violation) -> bool {
        self.violations.contains(v)
    }

    pub(crate) fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return f.write_str("no violations");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_prices_nonnegative<S: Scalar>(out: &Outcome<S>, report: &mut Report) {
    if !out.prices[DUMMY].is_zero() {
        report.push(Violation::NonzeroDummyPrice);
    }
    for (j, p) in out.prices.iter().enumerate().skip(1) {
        if *p < S::zero() {
            report.push(Violation::NegativePrice { item: j });
        }
    }
}

/// Feasibility: nonnegative utilities, nonnegative prices with the dummy at
/// 0, and `r_ij <= p_j < m_ij` for every pair matched to a real item.
pub fn check_feasible<S: Scalar>(inst: &MarketInstance<S>, out: &Outcome<S>) -> Result<Report> {
    out.check_shape(inst)?;
    let mut report = Report::default();
    let zero = ExtendedUtility::Finite(S::zero());
    for (i, u) in out.utilities.iter().enumerate() {
        if *u < zero {
            report.push(Violation::NegativeUtility { bidder: i });
        }
    }
    check_prices_nonnegative(out, &mut report);
    for (i, j) in out.matched_pairs() {
        let p = &out.prices[j];
        if p < inst.reserve(i, j) {
            report.push(Violation::BelowReserve { bidder: i, item: j });
        }
        if !inst.maximum(i, j).admits(p) {
            report.push(Violation::AtOrAboveMaximum { bidder: i, item: j });
        }
    }
    Ok(report)
}

/// Stability: feasible, and `u_i >= u_ij(p_j)` for every pair.
pub fn check_stable<S: Scalar>(inst: &MarketInstance<S>, out: &Outcome<S>) -> Result<Report> {
    let mut report = check_feasible(inst, out)?;
    for i in 0..inst.num_bidders() {
        for j in inst.items() {
            if inst.pair_utility(i, j, &out.prices[j]) > out.utilities[i] {
                report.push(Violation::BlockingPair { bidder: i, item: j });
            }
        }
    }
    Ok(report)
}

/// Utilities under the maximum-price convention of the relaxed model, where a
/// matched bidder may pay exactly `m_ij`: `v_ij - p_j` if `p_j <= m_ij`.
pub fn relaxed_utilities<S: Scalar>(inst: &MarketInstance<S>, out: &Outcome<S>) -> Vec<ExtendedUtility<S>> {
    out.assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let p = &out.prices[j];
            match inst.maximum(i, j) {
                Ceiling::Finite(m) if p > m => ExtendedUtility::NegInfinity,
                _ => ExtendedUtility::Finite(inst.valuation(i, j).clone() - p.clone()),
            }
        })
        .collect()
}

/// Relaxed stability: for every pair, `u_i >= v_ij - max(p_j, r_ij)` or
/// `p_j >= m_ij`.
///
/// Feasibility is checked in the relaxed model's own form: matched pairs need
/// `r_ij <= p_j <= m_ij` and utilities come from [`relaxed_utilities`]. Every
/// stable outcome passes.
pub fn check_relaxed_stable<S: Scalar>(inst: &MarketInstance<S>, out: &Outcome<S>) -> Result<Report> {
    out.check_shape(inst)?;
    let mut report = Report::default();
    let utilities = relaxed_utilities(inst, out);
    let zero = ExtendedUtility::Finite(S::zero());
    for (i, u) in utilities.iter().enumerate() {
        if *u < zero {
            report.push(Violation::NegativeUtility { bidder: i });
        }
    }
    check_prices_nonnegative(out, &mut report);
    for (i, j) in out.matched_pairs() {
        let p = &out.prices[j];
        if p < inst.reserve(i, j) {
            report.push(Violation::BelowReserve { bidder: i, item: j });
        }
        if let Ceiling::Finite(m) = inst.maximum(i, j) {
            if p > m {
                report.push(Violation::AboveMaximum { bidder: i, item: j });
            }
        }
    }
    for (i, u) in utilities.iter().enumerate() {
        for j in inst.items() {
            let p = &out.prices[j];
            if !inst.maximum(i, j).admits(p) {
                continue;
            }
            let effective = p.clone().max(inst.reserve(i, j).clone());
            let bound = ExtendedUtility::Finite(inst.valuation(i, j).clone() - effective);
            if *u < bound {
                report.push(Violation::RelaxedBlockingPair { bidder: i, item: j });
            }
        }
    }
    Ok(report)
}

/// Pointwise comparison of two utility profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// Every bidder fares at least as well in the first profile. Equal
    /// profiles report this variant.
    GreaterOrEqual,
    /// Every bidder fares at least as well in the second profile.
    LessOrEqual,
    Incomparable,
}

pub fn compare_profiles<S: Ord>(a: &[ExtendedUtility<S>], b: &[ExtendedUtility<S>]) -> Result<Dominance> {
    if a.len() != b.len() {
        return Err(Error::shape("utility profiles of different lengths"));
    }
    let mut ge = true;
    let mut le = true;
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Less => ge = false,
            Ordering::Greater => le = false,
            Ordering::Equal => {}
        }
    }
    Ok(match (ge, le) {
        (true, _) => Dominance::GreaterOrEqual,
        (false, true) => Dominance::LessOrEqual,
        (false, false) => Dominance::Incomparable,
    })
}

/// Compares the utility vectors of two outcomes of the same market.
pub fn dominates<S: Scalar>(a: &Outcome<S>, b: &Outcome<S>) -> Result<Dominance> {
    compare_profiles(&a.utilities, &b.utilities)
}
