use stable_market::oracle::{assert_bidder_optimal, enumerate_stable};
use stable_market::solver::{outer_iteration_bound, special_execution_bound};
use stable_market::strategy::{check_restricted, find_profitable_misreport, product_family, utility_under_report};
use stable_market::{audit_trace, solve, Ceiling, DropReason, Engine, ExtendedUtility, MarketInstance, TraceEvent};

const INF: Ceiling<i64> = Ceiling::Infinite;

/// Holders outside the tree lose items that stop being first choices, so a
/// bidding war between two bidders can outlast `n * |J|` augmentations.
fn bidding_war() -> MarketInstance<i64> {
    MarketInstance::new(
        2,
        vec![vec![4, 5], vec![1, 9], vec![6, 8]],
        vec![vec![9, 0], vec![0, 5], vec![0, 9]],
        vec![
            vec![INF, INF],
            vec![Ceiling::Finite(6), Ceiling::Finite(2)],
            vec![INF, INF],
        ],
    )
    .unwrap()
}

#[test]
fn bidding_war_exceeds_the_outer_yardstick() {
    let inst = bidding_war();
    for engine in [Engine::Simple, Engine::Fast] {
        let sol = solve(&inst, engine, true).unwrap();
        assert_eq!(sol.counters.outer_iterations, 10);
        assert!(sol.counters.outer_iterations > outer_iteration_bound(3, 2));
        assert!(sol.counters.special_executions <= special_execution_bound(3, 2));

        let set = enumerate_stable(&inst, None).unwrap();
        assert!(assert_bidder_optimal(&inst, &sol.outcome, &set).unwrap().is_clean());

        let trace = sol.trace.unwrap();
        let audit = audit_trace(&inst, &trace).unwrap();
        assert!(audit.is_clean(), "{:?}", audit.problems);
        assert!(!audit.repeated_drops.is_empty());
        assert!(trace.iter().any(|e| matches!(
            e,
            TraceEvent::EdgeDropped {
                reason: DropReason::LeftFirstChoice,
                ..
            }
        )));
    }
}

#[test]
fn engines_trace_identically_on_the_bidding_war() {
    let inst = bidding_war();
    let a = solve(&inst, Engine::Simple, true).unwrap();
    let b = solve(&inst, Engine::Fast, true).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.outcome, b.outcome);
}

fn restricted(valuations: Vec<Vec<i64>>, maxima: [i64; 3]) -> MarketInstance<i64> {
    let items = valuations[0].len();
    let bidders = valuations.len();
    MarketInstance::new(
        items,
        valuations,
        vec![vec![0; items]; bidders],
        maxima.iter().map(|&m| vec![Ceiling::Finite(m); items]).collect(),
    )
    .unwrap()
}

/// Smallest witness seen in the exhaustive search. Three items; none was
/// found with two items.
#[test]
fn three_item_misreport_witness() {
    let inst = restricted(vec![vec![2, 1, 0], vec![0, 1, 3], vec![1, 0, 2]], [1, 2, 3]);
    check_restricted(&inst).unwrap();
    let grid: Vec<i64> = (0..=10).collect();
    let hit = find_profitable_misreport(std::slice::from_ref(&inst), &grid)
        .unwrap()
        .unwrap();
    assert_eq!(hit.bidder, 0);
    assert_eq!(hit.coordinate, (0, 1));
    assert_eq!(hit.reported_value, 0);
    assert_eq!((hit.true_utility_honest, hit.true_utility_lying), (0, 1));
    assert_eq!(hit.market, inst);

    let lie = inst.with_valuation(0, 1, 0).unwrap();
    assert_eq!(
        utility_under_report(&inst, 0, &lie).unwrap(),
        ExtendedUtility::Finite(1)
    );
}

/// Product valuations `v_ij = w_i * a_j` with small factors admit no
/// profitable lie under the restricted rules.
#[test]
fn product_valuations_have_no_misreport() {
    let maxima = [Ceiling::Finite(1), Ceiling::Finite(2), Ceiling::Finite(3), INF];
    let grid: Vec<i64> = (0..=10).collect();
    for (n, k) in [(2, 2), (3, 2), (2, 3)] {
        let family = product_family(n, k, &[1, 2, 3], 9, &maxima);
        assert!(!family.is_empty());
        let hit = find_profitable_misreport(&family, &grid).unwrap();
        assert!(
            hit.is_none(),
            "{:?}",
            hit.map(|h| (h.market, h.coordinate, h.reported_value))
        );
    }
}
