use chipsplit_core::analysis::{decision_ev, dcm_finish_distribution, DecisionScenario};
use chipsplit_core::oracle::{
    enumerate_states, oracle_equities, solve_iterative, OracleConfig, OracleMethod, Stop,
};
use chipsplit_core::wire::EquityResponse;
use chipsplit_core::*;
use num::{BigInt, BigRational};
use proptest::prelude::*;

fn stacks_strategy(max_players: usize, max_stack: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1..=max_stack, 1..=max_players)
}

fn prizes_for(n: usize) -> impl Strategy<Value = PrizeSchedule> {
    prop::collection::vec(0u32..=100, 1..=n).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        PrizeSchedule::new(v.into_iter().map(f64::from).collect()).unwrap()
    })
}

fn table() -> impl Strategy<Value = (StackVector, PrizeSchedule)> {
    stacks_strategy(5, 400).prop_flat_map(|s| {
        let n = s.len();
        (Just(StackVector::new(s).unwrap()), prizes_for(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hands_conserve_chips(stacks in prop::collection::vec(1u64..10_000, 2..=8), pick in any::<prop::sample::Index>()) {
        let winner = pick.index(stacks.len());
        let (after, busted) = redistribute_chips(&stacks, winner).unwrap();
        prop_assert_eq!(after.iter().sum::<u64>(), stacks.iter().sum::<u64>());
        let gain = after[winner] - stacks[winner];
        let losses: u64 = (0..stacks.len()).filter(|&i| i != winner).map(|i| stacks[i] - after[i]).sum();
        prop_assert_eq!(gain, losses);
        for i in busted {
            prop_assert!(stacks[i] <= stacks[winner]);
        }
    }

    #[test]
    fn bankruptcy_pays_the_whole_block(
        stacks in prop::collection::vec(1u64..5, 1..=6),
        prob in 0.0f64..=1.0,
        seed in prop::collection::vec(0u32..100, 6),
    ) {
        let busted: Vec<(usize, u64)> = stacks.iter().copied().enumerate().collect();
        let prizes: Vec<f64> = seed[..stacks.len()].iter().map(|&p| f64::from(p)).collect();
        let paid = resolve_bankruptcy(&busted, &prizes, prob).unwrap();
        let total: f64 = paid.iter().map(|(_, v)| v).sum();
        let expected = prob * prizes.iter().sum::<f64>();
        prop_assert!((total - expected).abs() <= 1e-12 * expected.max(1.0));
        for (a, b) in paid.iter().zip(paid.iter().skip(1)) {
            let (sa, sb) = (stacks[a.0], stacks[b.0]);
            prop_assert!(sa <= sb);
            if sa == sb {
                prop_assert_eq!(a.1, b.1);
            }
        }
    }

    #[test]
    fn forced_bankruptcy_conserves_under_any_pruning(
        (stacks, prizes) in table(),
        max_depth in 1u32..12,
        floor_exp in 1i32..16,
    ) {
        let config = DcmConfig {
            max_depth,
            min_prob: 10f64.powi(-floor_exp),
            ..DcmConfig::default()
        };
        let r = dcm_equities(&stacks, &prizes, &config).unwrap();
        let pool = prizes.total();
        prop_assert!((r.total_equity() - pool).abs() <= 1e-9 * pool.max(1.0));
        prop_assert!(r.explored_mass <= 1.0 + 1e-12);
        prop_assert!(r.explored_mass >= 0.0);
    }

    #[test]
    fn heads_up_powers_of_two_terminate(k in 1u32..20, pick in any::<prop::sample::Index>()) {
        let total = 1u64 << k;
        let a = 1 + pick.index((total - 1) as usize) as u64;
        let config = DcmConfig { max_depth: k + 2, min_prob: 1e-300, ..DcmConfig::default() };
        let r = dcm_equities(&StackVector::new(vec![a, total - a]).unwrap(), &PrizeSchedule::new(vec![1.0]).unwrap(), &config).unwrap();
        prop_assert_eq!(r.pruned_nodes, 0);
        prop_assert!((r.explored_mass - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn finish_matrix_is_doubly_stochastic(stacks in stacks_strategy(5, 300)) {
        let m = dcm_finish_distribution(&StackVector::new(stacks).unwrap(), &DcmConfig::default()).unwrap();
        for s in m.row_sums().into_iter().chain(m.column_sums()) {
            prop_assert!((s - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn recursion_stays_within_its_bound(a in 1u64..5000, b in 1u64..5000, depth in 1u32..80) {
        let closed = two_player_win_probability(a, b).unwrap();
        for term in [TruncationTerm::StackOrder, TruncationTerm::Proportional] {
            let r = two_player_win_probability_recursive(a, b, depth, term).unwrap();
            prop_assert!((r.probability - closed).abs() <= r.error_bound + 1e-12);
        }
    }

    #[test]
    fn shortcut_and_leaf_policies_agree((stacks, prizes) in table()) {
        let base = dcm_equities(&stacks, &prizes, &DcmConfig::default()).unwrap();
        for (policy, shortcut) in [
            (LeafPolicy::ForcedBankruptcy, true),
            (LeafPolicy::IcmTail, false),
            (LeafPolicy::AnalyticTwoPlayer, false),
        ] {
            let config = DcmConfig { leaf_policy: policy, two_player_shortcut: shortcut, ..DcmConfig::default() };
            let r = dcm_equities(&stacks, &prizes, &config).unwrap();
            for (a, b) in r.equity.iter().zip(&base.equity) {
                prop_assert!((a - b).abs() <= 1e-6, "{:?} {} vs {}", policy, a, b);
            }
        }
    }

    #[test]
    fn equity_json_round_trips((stacks, prizes) in table()) {
        let r = dcm_equities(&stacks, &prizes, &DcmConfig::default()).unwrap();
        let json = serde_json::to_string(&EquityResponse::from(&r)).unwrap();
        let back: EquityResponse = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }
}

fn scenario(hero_equity: f64) -> DecisionScenario {
    DecisionScenario {
        prizes: PrizeSchedule::new(vec![50.0, 30.0, 20.0]).unwrap(),
        hero: 1,
        fold_stacks: vec![1200, 800, 2000, 3000],
        win_stacks: vec![0, 2000, 2000, 3000],
        lose_stacks: vec![2000, 0, 2000, 3000],
        hero_equity,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn call_ev_is_linear_in_hand_equity(lambda in 0.0f64..=1.0) {
        for model in [Model::Icm, Model::Dcm] {
            let c = DcmConfig::default();
            let at = |e| decision_ev(&scenario(e), model, &c, Budget::default()).unwrap().ev_call;
            let mixed = lambda * at(1.0) + (1.0 - lambda) * at(0.0);
            prop_assert!((at(lambda) - mixed).abs() <= 1e-12);
        }
    }
}

#[test]
fn threshold_is_the_sign_change() {
    for model in [Model::Icm, Model::Dcm] {
        let c = DcmConfig::default();
        let t = decision_ev(&scenario(0.4), model, &c, Budget::default())
            .unwrap()
            .threshold
            .unwrap();
        let gap = |e: f64| {
            let r = decision_ev(&scenario(e), model, &c, Budget::default()).unwrap();
            r.ev_call - r.ev_fold
        };
        assert!(gap(t - 0.01) < 0.0 && gap(t + 0.01) > 0.0, "{model} at {t}");
    }
}

#[test]
fn exact_oracle_reproduces_chip_share() {
    let exact = OracleConfig {
        method: OracleMethod::Exact,
        ..OracleConfig::default()
    };
    let prize = PrizeSchedule::new(vec![1.0]).unwrap();
    for a in 1..=20u64 {
        for b in 1..=20u64 {
            let r = oracle_equities(&StackVector::new(vec![a, b]).unwrap(), &prize, &exact).unwrap();
            let expected = BigRational::new(BigInt::from(a), BigInt::from(a + b));
            assert_eq!(r.exact_win_prob.unwrap()[0], expected, "({a},{b})");
            assert_eq!(r.exact_equity.unwrap()[0], expected, "({a},{b})");
        }
    }
}

#[test]
fn doubling_sweeps_changes_less_than_tolerance() {
    let tol = 1e-12;
    for stacks in [vec![5u64, 3, 2, 1], vec![7, 4, 1], vec![9, 6, 5, 3]] {
        let graph = enumerate_states(&StackVector::new(stacks).unwrap(), 100_000).unwrap();
        let prizes = PrizeSchedule::new(vec![10.0, 6.0, 3.0])
            .unwrap()
            .padded_best_first(graph.players);
        let first = solve_iterative(&graph, &prizes, Stop::Tolerance { tol, max_iterations: 10_000 }).unwrap();
        let doubled = solve_iterative(&graph, &prizes, Stop::Iterations(2 * first.iterations)).unwrap();
        for (a, b) in first.values.iter().flatten().zip(doubled.values.iter().flatten()) {
            assert!((a - b).abs() < tol);
        }
    }
}
