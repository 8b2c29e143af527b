use matching_lattice::io::{market_from_json, market_to_json};
use matching_lattice::market::validate::{
    validate_all, validate_substitutable, validate_substitutable_pointwise, ValidationOptions,
};
use matching_lattice::market::ChoiceFunction;
use matching_lattice::matching::*;
use matching_lattice::oracle::{self, AgentKind, EnumerationBudget, RandomSpec};
use matching_lattice::tarski::{self, Optimality};
use matching_lattice::{AgentSet, Market, Matching, Side, Variant};
use proptest::prelude::*;

fn set_list() -> impl Strategy<Value = ChoiceFunction> {
    (1usize..=4).prop_flat_map(|n| {
        proptest::collection::vec(1u64..(1 << n), 0..6).prop_map(move |bits| {
            let mut list: Vec<AgentSet> = Vec::new();
            for s in bits.into_iter().map(AgentSet::from_bits) {
                if !list.contains(&s) {
                    list.push(s);
                }
            }
            ChoiceFunction::set_list(n, list).unwrap()
        })
    })
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![
        Just(Variant::ManyToOne),
        Just(Variant::ManyToManyResponsive),
        Just(Variant::ManyToManySub),
    ]
}

fn small_market() -> impl Strategy<Value = Market> {
    (variant(), 1usize..=3, 1usize..=3, any::<u64>(), 0usize..3).prop_map(|(v, nf, nw, seed, d)| {
        let mut spec = RandomSpec::new(v, nf, nw);
        spec.density = [0.6, 0.8, 1.0][d];
        oracle::random_market(seed, &spec).unwrap()
    })
}

fn ir_matchings(mk: &Market) -> Vec<Matching> {
    oracle::enumerate_individually_rational(mk, EnumerationBudget::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn choice_is_contained_and_idempotent(c in set_list()) {
        for s in c.ground().subsets() {
            let chosen = c.pick(s);
            prop_assert!(chosen.is_subset(s));
            prop_assert_eq!(c.pick(chosen), chosen);
        }
    }

    #[test]
    fn path_independence_is_substitutability_plus_consistency(c in set_list()) {
        let [sub, cons, pi] = validate_all(&c, ValidationOptions::default()).unwrap();
        prop_assert_eq!(pi.passed(), sub.passed() && cons.passed());
    }

    #[test]
    fn pointwise_substitutability_matches_set_form(c in set_list()) {
        let opts = ValidationOptions::default();
        prop_assert_eq!(
            validate_substitutable(&c, opts).unwrap().passed(),
            validate_substitutable_pointwise(&c, opts).unwrap().passed()
        );
    }

    #[test]
    fn quota_linear_passes_every_axiom(n in 1usize..=6, quota in 1usize..=6, perm in Just(()).prop_perturb(|_, mut rng| rng.next_u64())) {
        let mut order: Vec<usize> = (0..n).filter(|i| perm >> i & 1 == 1).collect();
        let k = (perm >> 8) as usize % order.len().max(1);
        order.rotate_left(k);
        let c = ChoiceFunction::quota_linear(n, order, quota.min(n)).unwrap();
        prop_assert!(validate_all(&c, ValidationOptions::default()).unwrap().iter().all(|r| r.passed()));
    }

    #[test]
    fn json_round_trip(mk in small_market()) {
        let text = market_to_json(&mk).unwrap().to_string();
        let back = market_from_json(&text).unwrap().market;
        prop_assert_eq!(back.variant(), mk.variant());
        for side in [Side::Firms, Side::Workers] {
            for a in 0..mk.size(side) {
                for s in AgentSet::full(mk.size(side.other())).subsets() {
                    prop_assert_eq!(back.choose(side, a, s), mk.choose(side, a, s));
                }
            }
        }
    }

    #[test]
    fn pruned_search_matches_raw_filter(mk in small_market()) {
        let budget = EnumerationBudget::default();
        let raw: Vec<Matching> = oracle::enumerate_matchings(&mk, budget)
            .unwrap()
            .filter(|m| is_individually_rational(&mk, m))
            .collect();
        prop_assert_eq!(ir_matchings(&mk), raw);
    }

    #[test]
    fn quasi_stability_forms_agree(mk in small_market()) {
        let exact = QuasiOptions::default();
        let shortcut = QuasiOptions { assume_substitutable: true, ..exact };
        for mu in ir_matchings(&mk) {
            for side in [Side::Firms, Side::Workers] {
                let direct = is_quasi_stable(&mk, &mu, side, exact).unwrap();
                prop_assert_eq!(direct, is_quasi_stable_general(&mk, &mu, side, exact).unwrap());
                prop_assert_eq!(direct, is_quasi_stable(&mk, &mu, side, shortcut).unwrap());
            }
        }
    }

    #[test]
    fn unanimous_and_blair_worker_orders_agree(seed in any::<u64>(), nf in 1usize..=3, nw in 1usize..=3) {
        let mk = oracle::random_market(seed, &RandomSpec::new(Variant::ManyToOne, nf, nw)).unwrap();
        let ir = ir_matchings(&mk);
        for a in &ir {
            for b in &ir {
                prop_assert_eq!(unanimous_geq_workers(&mk, a, b).unwrap(), blair_geq_workers(&mk, a, b));
            }
        }
    }

    #[test]
    fn blair_order_is_a_partial_order_on_stable_matchings(mk in small_market()) {
        let stable = oracle::enumerate_stable(&mk, EnumerationBudget::default()).unwrap();
        for side in [Side::Firms, Side::Workers] {
            for a in &stable {
                prop_assert!(blair_geq(&mk, side, a, a));
                for b in &stable {
                    if a != b && blair_geq(&mk, side, a, b) {
                        prop_assert!(!blair_geq(&mk, side, b, a));
                    }
                    // μ ≽_F μ' exactly when μ' ≽_W μ
                    prop_assert_eq!(blair_geq_firms(&mk, a, b), blair_geq_workers(&mk, b, a));
                    for c in &stable {
                        if blair_geq(&mk, side, a, b) && blair_geq(&mk, side, b, c) {
                            prop_assert!(blair_geq(&mk, side, a, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn candidates_are_joins_in_the_quasi_stable_set(mk in small_market()) {
        let budget = EnumerationBudget::default();
        let q = QuasiOptions::default();
        let stable = oracle::enumerate_stable(&mk, budget).unwrap();
        for side in [Side::Firms, Side::Workers] {
            let domain = oracle::enumerate_quasi_stable(&mk, side.other(), q, budget).unwrap();
            for a in &stable {
                for b in &stable {
                    let cand = tarski::join_candidate(&mk, side, a, b, Default::default()).unwrap();
                    prop_assert!(domain.contains(&cand));
                    prop_assert_eq!(Some(cand), oracle::brute_join(&mk, side, a, b, &domain));
                }
            }
        }
    }

    #[test]
    fn extremal_matchings_are_verified(mk in small_market()) {
        let budget = EnumerationBudget::default();
        let firm = tarski::extremal_stable(&mk, Side::Firms, budget).unwrap();
        let worker = tarski::extremal_stable(&mk, Side::Workers, budget).unwrap();
        prop_assert_eq!(firm.optimality, Optimality::Verified);
        prop_assert_eq!(worker.optimality, Optimality::Verified);
        prop_assert!(tarski::improvement_geq(&mk, Side::Workers, &worker.matching, &firm.matching));
    }

    #[test]
    fn lattice_report_passes(mk in small_market()) {
        let report = oracle::verify_lattice(&mk, EnumerationBudget::default()).unwrap();
        prop_assert!(report.passed(), "{:?}", report);
    }
}

#[test]
fn matching_counts_follow_the_closed_form() {
    let spec = |v, nf, nw| {
        let mut s = RandomSpec::new(v, nf, nw);
        s.firm_kind = AgentKind::QuotaLinear;
        s
    };
    let one = oracle::random_market(0, &spec(Variant::ManyToOne, 1, 1)).unwrap();
    assert_eq!(oracle::count_matchings(&one), Some(2));
    let two = oracle::random_market(0, &spec(Variant::ManyToOne, 2, 1)).unwrap();
    assert_eq!(oracle::count_matchings(&two), Some(3));
    for (nf, nw) in [(2, 3), (3, 2), (3, 4)] {
        let mo = oracle::random_market(1, &spec(Variant::ManyToOne, nf, nw)).unwrap();
        assert_eq!(
            oracle::count_matchings(&mo),
            Some((nf as u64 + 1).pow(nw as u32))
        );
        let sub = oracle::random_market(1, &spec(Variant::ManyToManySub, nf, nw)).unwrap();
        assert_eq!(oracle::count_matchings(&sub), Some(1 << (nf * nw)));
        for m in [&mo, &sub] {
            let n = oracle::enumerate_matchings(m, EnumerationBudget::default())
                .unwrap()
                .count();
            assert_eq!(Some(n as u64), oracle::count_matchings(m));
        }
    }
}

#[test]
fn enumeration_is_sorted_and_distinct() {
    let mk =
        oracle::random_market(3, &RandomSpec::new(Variant::ManyToManyResponsive, 3, 3)).unwrap();
    let all: Vec<Matching> = oracle::enumerate_matchings(&mk, EnumerationBudget::default())
        .unwrap()
        .collect();
    assert!(all.windows(2).all(|w| w[0].enumeration_cmp(&w[1]).is_lt()));
}

#[test]
fn budget_is_enforced() {
    let mk = oracle::random_market(0, &RandomSpec::new(Variant::ManyToManySub, 3, 3)).unwrap();
    let err = oracle::enumerate_stable(&mk, EnumerationBudget::with_max_matchings(1)).unwrap_err();
    assert_eq!(err.kind(), "BudgetExceeded");
}

#[test]
fn empty_preferences_give_only_the_empty_matching() {
    for v in [
        Variant::ManyToOne,
        Variant::ManyToManyResponsive,
        Variant::ManyToManySub,
    ] {
        let mut spec = RandomSpec::new(v, 3, 3);
        spec.density = 0.0;
        let mk = oracle::random_market(7, &spec).unwrap();
        let stable = oracle::enumerate_stable(&mk, EnumerationBudget::default()).unwrap();
        assert_eq!(stable, vec![Matching::empty_for(&mk)]);
        let ex = tarski::extremal_stable(&mk, Side::Firms, EnumerationBudget::default()).unwrap();
        assert_eq!(ex.trace.step_count(), 0);
    }
}
