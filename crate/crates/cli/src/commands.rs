use std::io::Read;
use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use stable_market::gen::random_sized_instance;
use stable_market::oracle::{assert_bidder_optimal, enumerate_stable, MAX_ORACLE_BIDDERS, MAX_ORACLE_ITEMS};
use stable_market::reduction::reduce as reduce_market;
use stable_market::solver::{outer_iteration_bound, special_execution_bound};
use stable_market::strategy::{check_restricted, find_bidder_misreport};
use stable_market::{
    audit_trace, check_feasible, check_relaxed_stable, check_stable, solve as solve_market, Engine, MarketInstance, Rat,
};

use crate::format::{emit_instance, emit_outcome, parse_instance, parse_outcome, Entry};
use crate::{CliError, Mode};

fn read(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    let result = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(text)
}

pub fn solve(path: &Path, engine: Engine, trace: bool) -> Result<(), CliError> {
    let market = parse_instance(&read(path)?)?.plain()?;
    let sol = solve_market(&market, engine, trace)?;
    if let Some(events) = &sol.trace {
        for e in events {
            eprintln!("{e}");
        }
    }
    println!("{}", emit_outcome(&sol.outcome, Some(engine), Some(&sol.counters)));
    Ok(())
}

pub fn check(instance: &Path, outcome: &Path, mode: Mode) -> Result<(), CliError> {
    let market = parse_instance(&read(instance)?)?.plain()?;
    let out = parse_outcome(&read(outcome)?, &market)?;
    let report = match mode {
        Mode::Feasible => check_feasible(&market, &out)?,
        Mode::Stable => check_stable(&market, &out)?,
        Mode::Relaxed => check_relaxed_stable(&market, &out)?,
    };
    println!("{report}");
    if report.is_clean() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} violation(s)", report.violations.len())))
    }
}

#[derive(Default)]
struct Observed {
    outer_over_bound: bool,
    special_over_bound: bool,
    repeated_drops: bool,
}

fn fuzz_one(inst: &MarketInstance<i64>, with_oracle: bool) -> Result<Observed, String> {
    let err = |e: stable_market::Error| e.to_string();
    let simple = solve_market(inst, Engine::Simple, true).map_err(err)?;
    let fast = solve_market(inst, Engine::Fast, true).map_err(err)?;
    if simple.outcome != fast.outcome {
        return Err(format!(
            "engines disagree: simple prices {:?}, fast prices {:?}",
            simple.outcome.prices(),
            fast.outcome.prices()
        ));
    }
    let report = check_stable(inst, &simple.outcome).map_err(err)?;
    if !report.is_clean() {
        return Err(format!("unstable outcome: {report}"));
    }
    let mut observed = Observed::default();
    for sol in [&simple, &fast] {
        let audit = audit_trace(inst, sol.trace.as_deref().unwrap_or_default()).map_err(err)?;
        if !audit.is_clean() {
            return Err(format!("trace audit: {}", audit.problems.join("; ")));
        }
        observed.repeated_drops |= !audit.repeated_drops.is_empty();
    }
    let (n, k) = (inst.num_bidders(), inst.num_items());
    observed.outer_over_bound = fast.counters.outer_iterations > outer_iteration_bound(n, k);
    observed.special_over_bound = fast.counters.special_executions > special_execution_bound(n, k);
    if with_oracle {
        let set = enumerate_stable(inst, None).map_err(err)?;
        if set.min_prices.is_none() {
            return Err("oracle found no pointwise-minimal stable prices".into());
        }
        let report = assert_bidder_optimal(inst, &simple.outcome, &set).map_err(err)?;
        if !report.is_clean() {
            return Err(format!("not bidder optimal: {report}"));
        }
    }
    Ok(observed)
}

pub fn fuzz(
    seed: u64,
    count: usize,
    bidders: usize,
    items: usize,
    max_value: i64,
    with_oracle: bool,
) -> Result<(), CliError> {
    if !(1..=1_000_000).contains(&max_value) {
        return Err(CliError::Input("--max-value must lie in 1..=1000000".into()));
    }
    if with_oracle && (bidders > MAX_ORACLE_BIDDERS || items > MAX_ORACLE_ITEMS) {
        return Err(CliError::Input(format!(
            "--with-oracle handles at most {MAX_ORACLE_BIDDERS} bidders and {MAX_ORACLE_ITEMS} items"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let markets: Vec<MarketInstance<i64>> = (0..count)
        .map(|_| random_sized_instance(&mut rng, bidders, items, max_value))
        .collect();
    let results: Vec<Result<Observed, String>> = markets.par_iter().map(|m| fuzz_one(m, with_oracle)).collect();

    let mut counts = [0usize; 3];
    for (index, r) in results.iter().enumerate() {
        match r {
            Ok(o) => {
                counts[0] += o.outer_over_bound as usize;
                counts[1] += o.special_over_bound as usize;
                counts[2] += o.repeated_drops as usize;
            }
            Err(msg) => {
                let market = markets[index].map_scalar(|x| Rat::from_integer((*x).into()));
                println!("instance {index} failed: {msg}");
                println!("{}", emit_instance(&market, None));
                return Err(CliError::Failed(format!("instance {index} failed")));
            }
        }
    }
    println!("instances: {count}");
    println!("oracle: {}", if with_oracle { "on" } else { "off" });
    println!("outer iterations above n(k+1): {}", counts[0]);
    println!("special executions above 3n(k+1): {}", counts[1]);
    println!("runs with a pair dropped twice: {}", counts[2]);
    println!("all checks passed");
    Ok(())
}

pub fn reduce(path: &Path) -> Result<(), CliError> {
    let g = parse_instance(&read(path)?)?.generalized()?;
    println!("{}", emit_instance(&reduce_market(&g), None));
    Ok(())
}

#[derive(Serialize)]
struct MisreportFile {
    bidder: usize,
    item: usize,
    true_value: Entry,
    reported_value: Entry,
    true_utility_honest: Entry,
    true_utility_lying: Entry,
}

pub fn misreport(path: &Path, bidder: Option<usize>, grid_max: i64, restricted: bool) -> Result<(), CliError> {
    let market = parse_instance(&read(path)?)?.plain()?;
    if restricted {
        check_restricted(&market)?;
    }
    if grid_max < 0 {
        return Err(CliError::Input("--grid-max must be nonnegative".into()));
    }
    let bidders: Vec<usize> = match bidder {
        Some(b) if b == 0 || b > market.num_bidders() => {
            return Err(CliError::Input(format!(
                "--bidder {b} is out of range 1..={}",
                market.num_bidders()
            )))
        }
        Some(b) => vec![b - 1],
        None => (0..market.num_bidders()).collect(),
    };
    let grid: Vec<Rat> = (0..=grid_max).map(|x| Rat::from_integer(x.into())).collect();
    for b in bidders {
        if let Some(hit) = find_bidder_misreport(&market, b, &grid)? {
            let (i, j) = hit.coordinate;
            let doc = MisreportFile {
                bidder: i + 1,
                item: j,
                true_value: Entry::from(market.valuation(i, j)),
                reported_value: Entry::from(&hit.reported_value),
                true_utility_honest: Entry::from(&hit.true_utility_honest),
                true_utility_lying: Entry::from(&hit.true_utility_lying),
            };
            println!("{}", serde_json::to_string_pretty(&doc).expect("documents serialize"));
            return Ok(());
        }
    }
    println!("none");
    Ok(())
}
