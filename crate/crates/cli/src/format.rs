//! JSON documents for markets and outcomes.
//!
//! Numbers are JSON integers or strings: `"7"`, `"-3/4"`, and `"inf"` for an
//! unbounded maximum price. Bidders and items are 1-based; the dummy column
//! is implicit.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use stable_market::reduction::GeneralizedInstance;
use stable_market::{Ceiling, Counters, Engine, ExtendedUtility, Market, MarketOutcome, Rat, DUMMY};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl From<&Rat> for Entry {
    fn from(r: &Rat) -> Entry {
        Entry::rational(r)
    }
}

impl Entry {
    fn rational(r: &Rat) -> Entry {
        match (r.is_integer(), r.numer().to_i64()) {
            (true, Some(n)) => Entry::Int(n),
            _ => Entry::Text(r.to_string()),
        }
    }

    fn ceiling(c: &Ceiling<Rat>) -> Entry {
        match c {
            Ceiling::Finite(r) => Entry::rational(r),
            Ceiling::Infinite => Entry::Text("inf".into()),
        }
    }

    fn utility(u: &ExtendedUtility<Rat>) -> Entry {
        match u {
            ExtendedUtility::Finite(r) => Entry::rational(r),
            ExtendedUtility::NegInfinity => Entry::Text("-inf".into()),
        }
    }

    fn to_rational(&self, field: &str) -> Result<Rat, CliError> {
        match self {
            Entry::Int(n) => Ok(Rat::from_integer(BigInt::from(*n))),
            Entry::Text(s) => {
                let r =
                    Rat::from_str(s.trim()).map_err(|_| CliError::Input(format!("{field}: `{s}` is not a number")))?;
                if r.denom().is_zero() {
                    return Err(CliError::Input(format!("{field}: `{s}` has a zero denominator")));
                }
                Ok(r)
            }
        }
    }

    fn to_ceiling(&self, field: &str) -> Result<Ceiling<Rat>, CliError> {
        match self {
            Entry::Text(s) if s.trim() == "inf" => Ok(Ceiling::Infinite),
            other => other.to_rational(field).map(Ceiling::Finite),
        }
    }

    fn to_utility(&self, field: &str) -> Result<ExtendedUtility<Rat>, CliError> {
        match self {
            Entry::Text(s) if s.trim() == "-inf" => Ok(ExtendedUtility::NegInfinity),
            other => other.to_rational(field).map(ExtendedUtility::Finite),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub bidders: usize,
    pub items: usize,
    pub valuations: Vec<Vec<Entry>>,
    pub reserves: Vec<Vec<Entry>>,
    pub maxima: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bidder_scale: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item_scale: Option<Vec<Entry>>,
}

/// A parsed market, with its scales when the file is a generalized one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedInstance {
    pub market: Market,
    pub scales: Option<(Vec<Rat>, Vec<Rat>)>,
}

impl LoadedInstance {
    pub fn plain(self) -> Result<Market, CliError> {
        match self.scales {
            None => Ok(self.market),
            Some(_) => Err(CliError::Input(
                "the file carries scales; run `reduce` on it first".into(),
            )),
        }
    }

    pub fn generalized(self) -> Result<GeneralizedInstance<Rat>, CliError> {
        let Some((bidder_scale, item_scale)) = self.scales else {
            return Err(CliError::Input("no bidder_scale or item_scale field".into()));
        };
        GeneralizedInstance::new(self.market, bidder_scale, item_scale).map_err(CliError::from)
    }
}

fn matrix<T>(
    rows: &[Vec<Entry>],
    field: &str,
    n: usize,
    k: usize,
    conv: impl Fn(&Entry, &str) -> Result<T, CliError>,
) -> Result<Vec<Vec<T>>, CliError> {
    if rows.len() != n {
        return Err(CliError::Input(format!("{field}: {} rows, expected {n}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != k {
                return Err(CliError::Input(format!(
                    "{field}: row {} has {} entries, expected {k}",
                    i + 1,
                    row.len()
                )));
            }
            row.iter()
                .enumerate()
                .map(|(j, e)| conv(e, &format!("{field}[{}][{}]", i + 1, j + 1)))
                .collect()
        })
        .collect()
}

fn vector(entries: &[Entry], field: &str, len: usize) -> Result<Vec<Rat>, CliError> {
    if entries.len() != len {
        return Err(CliError::Input(format!(
            "{field}: {} entries, expected {len}",
            entries.len()
        )));
    }
    entries
        .iter()
        .enumerate()
        .map(|(j, e)| e.to_rational(&format!("{field}[{}]", j + 1)))
        .collect()
}

pub fn parse_instance(text: &str) -> Result<LoadedInstance, CliError> {
    let doc: InstanceFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("instance: {e}")))?;
    let (n, k) = (doc.bidders, doc.items);
    let v = matrix(&doc.valuations, "valuations", n, k, Entry::to_rational)?;
    let r = matrix(&doc.reserves, "reserves", n, k, Entry::to_rational)?;
    let m = matrix(&doc.maxima, "maxima", n, k, Entry::to_ceiling)?;
    let market = Market::new(k, v, r, m)?;
    let scales = if doc.bidder_scale.is_some() || doc.item_scale.is_some() {
        let ones = |len| vec![Rat::from_integer(1.into()); len];
        let bidder = match &doc.bidder_scale {
            Some(e) => vector(e, "bidder_scale", n)?,
            None => ones(n),
        };
        let item = match &doc.item_scale {
            Some(e) => vector(e, "item_scale", k)?,
            None => ones(k),
        };
        Some((bidder, item))
    } else {
        None
    };
    Ok(LoadedInstance { market, scales })
}

pub fn instance_file(market: &Market, scales: Option<(&[Rat], &[Rat])>) -> InstanceFile {
    let (n, k) = (market.num_bidders(), market.num_items());
    let rows = |f: &dyn Fn(usize, usize) -> Entry| -> Vec<Vec<Entry>> {
        (0..n).map(|i| (1..=k).map(|j| f(i, j)).collect()).collect()
    };
    InstanceFile {
        bidders: n,
        items: k,
        valuations: rows(&|i, j| Entry::rational(market.valuation(i, j))),
        reserves: rows(&|i, j| Entry::rational(market.reserve(i, j))),
        maxima: rows(&|i, j| Entry::ceiling(market.maximum(i, j))),
        bidder_scale: scales.map(|(b, _)| b.iter().map(Entry::rational).collect()),
        item_scale: scales.map(|(_, c)| c.iter().map(Entry::rational).collect()),
    }
}

pub fn emit_instance(market: &Market, scales: Option<(&[Rat], &[Rat])>) -> String {
    serde_json::to_string_pretty(&instance_file(market, scales)).expect("documents serialize")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountersFile {
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub special_executions: usize,
    pub heap_removals: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeFile {
    /// `[bidder, item]`, bidders on the dummy omitted.
    pub matching: Vec<[usize; 2]>,
    pub prices: Vec<Entry>,
    /// Derived data; checked against the market when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utilities: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counters: Option<CountersFile>,
}

pub fn outcome_file(out: &MarketOutcome, engine: Option<Engine>, counters: Option<&Counters>) -> OutcomeFile {
    OutcomeFile {
        matching: out.matched_pairs().into_iter().map(|(i, j)| [i + 1, j]).collect(),
        prices: out.prices()[1..].iter().map(Entry::rational).collect(),
        utilities: Some(out.utilities().iter().map(Entry::utility).collect()),
        engine: engine.map(|e| e.name().to_string()),
        counters: counters.map(|c| CountersFile {
            outer_iterations: c.outer_iterations,
            inner_iterations: c.inner_iterations,
            special_executions: c.special_executions,
            heap_removals: c.heap_removals,
        }),
    }
}

pub fn emit_outcome(out: &MarketOutcome, engine: Option<Engine>, counters: Option<&Counters>) -> String {
    serde_json::to_string_pretty(&outcome_file(out, engine, counters)).expect("documents serialize")
}

pub fn parse_outcome(text: &str, market: &Market) -> Result<MarketOutcome, CliError> {
    let doc: OutcomeFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("outcome: {e}")))?;
    let prices = vector(&doc.prices, "prices", market.num_items())?;
    let mut pairs = Vec::with_capacity(doc.matching.len());
    for &[i, j] in &doc.matching {
        if i == 0 || i > market.num_bidders() || j == DUMMY || j > market.num_items() {
            return Err(CliError::Input(format!("matching: pair [{i}, {j}] is out of range")));
        }
        if pairs.iter().any(|&(b, _)| b == i - 1) {
            return Err(CliError::Input(format!("matching: bidder {i} appears twice")));
        }
        pairs.push((i - 1, j));
    }
    let out = MarketOutcome::from_pairs(market, &pairs, prices)?;
    if let Some(listed) = &doc.utilities {
        if listed.len() != market.num_bidders() {
            return Err(CliError::Input(format!(
                "utilities: {} entries, expected {}",
                listed.len(),
                market.num_bidders()
            )));
        }
        for (i, e) in listed.iter().enumerate() {
            let field = format!("utilities[{}]", i + 1);
            if e.to_utility(&field)? != *out.utility(i) {
                return Err(CliError::Input(format!(
                    "{field}: listed {e:?} but the market gives {}",
                    out.utility(i)
                )));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use stable_market::fixtures::{example_one, example_two};
    use stable_market::solve_simple;

    #[test]
    fn instance_round_trip() {
        for m in [example_one(), example_two()] {
            let text = emit_instance(&m, None);
            assert_eq!(parse_instance(&text).unwrap().market, m);
        }
        let m = example_two();
        let half = Rat::new(1.into(), 2.into());
        let scales = (vec![half.clone(), Rat::from_integer(3.into())], vec![half]);
        let text = emit_instance(&m, Some((&scales.0, &scales.1)));
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.scales, Some(scales));
    }

    #[test]
    fn outcome_round_trip() {
        let m = example_one();
        let out = solve_simple(&m).unwrap();
        let text = emit_outcome(&out, Some(Engine::Fast), Some(&Counters::default()));
        assert_eq!(parse_outcome(&text, &m).unwrap(), out);
    }

    #[test]
    fn entries_parse() {
        let e = Entry::Text("-3/6".into());
        assert_eq!(e.to_rational("x").unwrap(), Rat::new((-1).into(), 2.into()));
        assert!(Entry::Text("1/0".into()).to_rational("x").is_err());
        assert!(Entry::Text("abc".into()).to_rational("x").is_err());
        assert_eq!(Entry::Text("inf".into()).to_ceiling("x").unwrap(), Ceiling::Infinite);
        assert_eq!(Entry::rational(&Rat::new(4.into(), 2.into())), Entry::Int(2));
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = parse_instance(r#"{"bidders":1,"items":1,"valuations":[[1]],"maxima":[["inf"]]}"#).unwrap_err();
        assert!(err.to_string().contains("reserves"), "{err}");
        let err =
            parse_instance(r#"{"bidders":1,"items":2,"valuations":[[1]],"reserves":[[0,0]],"maxima":[["inf","inf"]]}"#)
                .unwrap_err();
        assert!(err.to_string().contains("valuations: row 1"), "{err}");
    }

    #[test]
    fn wrong_utilities_are_rejected() {
        let m = example_two();
        let text = r#"{"matching":[],"prices":[5],"utilities":[0,1]}"#;
        assert!(parse_outcome(text, &m).is_err());
    }
}
