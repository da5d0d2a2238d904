use proptest::collection::vec;
use proptest::prelude::*;
use stable_market::oracle::{assert_bidder_optimal, enumerate_stable};
use stable_market::reduction::{
    check_generalized_stable, clear_denominators, lift_outcome, reduce, GeneralizedInstance,
};
use stable_market::{
    audit_trace, augment, build_choice_graphs, check_feasible, check_relaxed_stable, check_stable,
    is_strictly_overdemanded, maximal_alternating_tree, solve, AlternatingPath, Ceiling, Engine, ExtendedUtility,
    MarketInstance, Matching, Outcome, Rat, Scalar, DUMMY,
};

fn market(max_n: usize, max_k: usize, max_v: i64) -> impl Strategy<Value = MarketInstance<i64>> {
    (1..=max_n, 1..=max_k).prop_flat_map(move |(n, k)| {
        let cell_v = 0..=max_v;
        let cell_r = prop_oneof![Just(0i64), 0..=max_v];
        let cell_m = prop_oneof![3 => Just(None), 2 => (1..=max_v).prop_map(Some)];
        (vec(vec(cell_v, k), n), vec(vec(cell_r, k), n), vec(vec(cell_m, k), n)).prop_map(move |(v, r, m)| {
            let m = m
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|c| c.map_or(Ceiling::Infinite, Ceiling::Finite))
                        .collect()
                })
                .collect();
            MarketInstance::new(k, v, r, m).unwrap()
        })
    })
}

/// A market plus an arbitrary outcome on it.
fn market_and_outcome() -> impl Strategy<Value = (MarketInstance<i64>, Outcome<i64>)> {
    market(4, 3, 6).prop_flat_map(|inst| {
        let (n, k) = (inst.num_bidders(), inst.num_items());
        (vec(0..=k, n), vec(0..=7i64, k)).prop_map(move |(mut assignment, real)| {
            let mut taken = vec![false; k + 1];
            for j in assignment.iter_mut() {
                if *j != DUMMY && std::mem::replace(&mut taken[*j], true) {
                    *j = DUMMY;
                }
            }
            let prices = std::iter::once(0).chain(real).collect();
            let out = Outcome::new(&inst, assignment, prices).unwrap();
            (inst.clone(), out)
        })
    })
}

proptest! {
    #[test]
    fn solver_output_is_stable_and_engines_agree(inst in market(6, 4, 9)) {
        let simple = solve(&inst, Engine::Simple, true).unwrap();
        let fast = solve(&inst, Engine::Fast, true).unwrap();
        prop_assert_eq!(&simple.outcome, &fast.outcome);
        prop_assert_eq!(&simple.trace, &fast.trace);
        prop_assert!(check_stable(&inst, &simple.outcome).unwrap().is_clean());
        prop_assert!(check_relaxed_stable(&inst, &simple.outcome).unwrap().is_clean());
        let audit = audit_trace(&inst, simple.trace.as_deref().unwrap()).unwrap();
        prop_assert!(audit.is_clean(), "{:?}", audit.problems);
    }

    #[test]
    fn utility_falls_as_price_rises(inst in market(3, 3, 9), a in 0..12i64, b in 0..12i64) {
        let (lo, hi) = (a.min(b), a.max(b));
        for i in 0..inst.num_bidders() {
            for j in inst.items() {
                prop_assert!(inst.pair_utility(i, j, &lo) >= inst.pair_utility(i, j, &hi));
            }
        }
    }

    #[test]
    fn stable_implies_relaxed_stable((inst, out) in market_and_outcome()) {
        if check_stable(&inst, &out).unwrap().is_clean() {
            prop_assert!(check_relaxed_stable(&inst, &out).unwrap().is_clean());
        }
    }

    #[test]
    fn stability_is_feasibility_plus_feasible_first_choices((inst, out) in market_and_outcome()) {
        let graphs = build_choice_graphs(&inst, out.prices()).unwrap();
        let in_graph = (0..inst.num_bidders()).all(|i| graphs.is_feasible(i, out.item_of(i)));
        let expected = check_feasible(&inst, &out).unwrap().is_clean() && in_graph;
        prop_assert_eq!(check_stable(&inst, &out).unwrap().is_clean(), expected);
    }

    #[test]
    fn stuck_trees_are_strictly_overdemanded(inst in market(5, 3, 6), real in vec(0..=6i64, 3)) {
        let k = inst.num_items();
        let prices: Vec<i64> = std::iter::once(0).chain(real.into_iter().take(k)).collect();
        let graphs = build_choice_graphs(&inst, &prices).unwrap();
        // greedy matching on real items inside F~_p
        let mut assignment = vec![DUMMY; inst.num_bidders()];
        let mut taken = vec![false; k + 1];
        for (i, slot) in assignment.iter_mut().enumerate() {
            if let Some(&j) = graphs.feasible(i).iter().find(|&&j| j != DUMMY && !taken[j]) {
                taken[j] = true;
                *slot = j;
            }
        }
        let mut matching = Matching::empty(inst.num_bidders(), k);
        for (i, &j) in assignment.iter().enumerate().filter(|(_, &j)| j != DUMMY) {
            matching = augment(&matching, &AlternatingPath { hops: vec![(i, j)] }).unwrap();
        }
        for (i, &j) in assignment.iter().enumerate() {
            prop_assert_eq!(matching.item_of(i), (j != DUMMY).then_some(j));
        }
        for root in (0..inst.num_bidders()).filter(|&i| assignment[i] == DUMMY) {
            let tree = maximal_alternating_tree(&graphs, &matching, root).unwrap();
            match &tree.augmenting_path {
                None => {
                    prop_assert!(is_strictly_overdemanded(&graphs, &tree.items, &tree.bidders).unwrap());
                }
                Some(path) => {
                    let after = augment(&matching, path).unwrap();
                    prop_assert_eq!(after.assigned_count(), matching.assigned_count() + 1);
                    for i in 0..inst.num_bidders() {
                        if matching.item_of(i).is_some() {
                            prop_assert!(after.item_of(i).is_some());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rationals_are_exact(a in any::<i64>(), b in any::<i64>(), c in 1..1000i64, d in 1..1000i64) {
        let x = Rat::new(a.into(), c.into());
        let y = Rat::new(b.into(), d.into());
        prop_assert_eq!((x.clone() + y.clone()) - y, x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_agrees_with_the_oracle(inst in market(3, 2, 4)) {
        let out = solve(&inst, Engine::Fast, false).unwrap().outcome;
        let set = enumerate_stable(&inst, None).unwrap();
        prop_assert!(set.min_prices.is_some());
        prop_assert_eq!(Some(out.prices()), set.min_prices.as_deref());
        let report = assert_bidder_optimal(&inst, &out, &set).unwrap();
        prop_assert!(report.is_clean(), "{}", report);
    }

    #[test]
    fn enlarging_the_grid_keeps_the_minimum(inst in market(3, 2, 4), extra in 1..3i64) {
        let small = enumerate_stable(&inst, None).unwrap();
        let large = enumerate_stable(&inst, Some(small.price_bound + extra)).unwrap();
        prop_assert_eq!(&small.min_prices, &large.min_prices);
        prop_assert!(small.outcomes.iter().all(|o| large.outcomes.contains(o)));
    }

    #[test]
    fn reduction_round_trip(
        base in market(3, 2, 6),
        scales in vec((1..=4i64, 1..=4i64), 5),
    ) {
        let base = base.map_scalar(|x| Rat::from_i64(*x));
        let (n, k) = (base.num_bidders(), base.num_items());
        let q = |&(a, b): &(i64, i64)| Rat::new(a.into(), b.into());
        let bidder_scale: Vec<Rat> = scales[..n].iter().map(q).collect();
        let item_scale: Vec<Rat> = scales[n..n + k].iter().map(q).collect();
        let g = GeneralizedInstance::new(base, bidder_scale.clone(), item_scale).unwrap();
        let reduced = reduce(&g);
        let out = solve(&reduced, Engine::Simple, false).unwrap().outcome;
        let lifted = lift_outcome(&g, &out).unwrap();
        prop_assert!(check_generalized_stable(&g, &lifted).unwrap().is_clean());

        let (scaled, lcd) = clear_denominators(&reduced);
        let set = enumerate_stable(&scaled, None).unwrap();
        let lcd = Rat::from_integer(lcd);
        for (i, scale) in bidder_scale.iter().enumerate() {
            let best = set.per_bidder_max_utility[i].clone() / lcd.clone();
            prop_assert_eq!(&lifted.utilities()[i], &ExtendedUtility::Finite(scale.clone() * best));
        }
    }
}
