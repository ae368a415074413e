mod common;

use common::oracle::Oracle;
use gamesmooth::game::PAYOFF_TOLERANCE;
use gamesmooth::scenario::perturbed_fan;
use gamesmooth::*;
use proptest::prelude::*;

fn powers(results: &[NashResult]) -> Vec<Vec<u32>> {
    results
        .iter()
        .map(|r| r.profile.powers().to_vec())
        .collect()
}

#[test]
fn fan5_equilibria_match_brute_force() {
    let mesh = generate_scenario("fan5", 0).unwrap();
    let cfg = GameConfig::with_max_power(2);
    let oracle = Oracle::new(&mesh, 2, &cfg.transform, false);
    assert_eq!(oracle.profiles().len(), 243);

    let found = exhaustive_nash(&mesh, &cfg).unwrap();
    assert_eq!(powers(&found), oracle.equilibria());
    for r in &found {
        assert!(verify_nash(&mesh, &r.profile, &cfg).unwrap().is_equilibrium);
        for (a, b) in r
            .outcome
            .utilities
            .iter()
            .zip(oracle.utilities(r.profile.powers()))
        {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn fixed_boundary_equilibria_match_brute_force() {
    let mesh = perturbed_fan(5, 4);
    let cfg = GameConfig {
        max_power: 2,
        fix_boundary: true,
        ..Default::default()
    };
    let oracle = Oracle::new(&mesh, 2, &cfg.transform, true);
    assert_eq!(
        powers(&exhaustive_nash(&mesh, &cfg).unwrap()),
        oracle.equilibria()
    );
}

#[test]
fn best_profile_matches_brute_force_argmax() {
    let mesh = generate_scenario("fan4", 0).unwrap();
    let cfg = GameConfig::with_max_power(3);
    let oracle = Oracle::new(&mesh, 3, &cfg.transform, false);
    let means: Vec<(Vec<u32>, f64)> = oracle
        .profiles()
        .into_iter()
        .map(|p| {
            let m = oracle.mean(&p);
            (p, m)
        })
        .collect();
    let top = means
        .iter()
        .map(|(_, m)| *m)
        .fold(f64::NEG_INFINITY, f64::max);
    let expected = &means.iter().find(|(_, m)| *m >= top - 1e-12).unwrap().0;

    let (best, outcome) = best_profile(&mesh, &cfg).unwrap();
    assert_eq!(best.powers(), expected.as_slice());
    assert!((outcome.mean_quality - top).abs() < 1e-12);
    for r in exhaustive_nash(&mesh, &cfg).unwrap() {
        assert!(outcome.mean_quality >= r.outcome.mean_quality - PAYOFF_TOLERANCE);
    }
}

/// Regression pins for the four-triangle fan: the equilibrium and the
/// mean-optimal profile disagree, and the optimum sacrifices element 0.
#[test]
fn fan4_nash_differs_from_best() {
    let mesh = generate_scenario("fan4", 0).unwrap();
    let cfg = GameConfig::with_max_power(3);
    let eq = exhaustive_nash(&mesh, &cfg).unwrap();
    assert_eq!(powers(&eq), vec![vec![1, 1, 1, 1]]);
    let (best, best_out) = best_profile(&mesh, &cfg).unwrap();
    assert_eq!(best.powers(), &[0, 1, 1, 1]);
    assert!(best_out.mean_quality > eq[0].outcome.mean_quality);
    assert!(best_out.min_quality < eq[0].outcome.min_quality);
    assert!(!verify_nash(&mesh, &best, &cfg).unwrap().is_equilibrium);
}

#[test]
fn best_response_lands_in_exhaustive_set() {
    for name in ["fan4", "fan5", "fan5_perturbed", "fan6"] {
        let mesh = generate_scenario(name, 3).unwrap();
        let cfg = GameConfig::with_max_power(2);
        let all = powers(&exhaustive_nash(&mesh, &cfg).unwrap());
        let start = StrategyProfile::uniform(mesh.element_count(), 0);
        let br = best_response_nash(&mesh, &cfg, &start, 100).unwrap();
        if br.is_equilibrium {
            assert!(all.contains(&br.profile.powers().to_vec()), "{name}");
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let mesh = generate_scenario("fan5_perturbed", 9).unwrap();
    let cfg = GameConfig::with_max_power(3);
    assert_eq!(
        exhaustive_nash(&mesh, &cfg).unwrap(),
        exhaustive_nash(&mesh, &cfg).unwrap()
    );
    assert_eq!(
        best_profile(&mesh, &cfg).unwrap(),
        best_profile(&mesh, &cfg).unwrap()
    );
    let start = StrategyProfile::uniform(5, 3);
    assert_eq!(
        best_response_nash(&mesh, &cfg, &start, 20).unwrap(),
        best_response_nash(&mesh, &cfg, &start, 20).unwrap()
    );
}

#[test]
fn mean_ratio_metric_drives_payoffs() {
    let mesh = generate_scenario("fan5", 0).unwrap();
    let cfg = GameConfig {
        metric: Metric::MeanRatio,
        ..Default::default()
    };
    let out = evaluate_profile(&mesh, &StrategyProfile::uniform(5, 1), &cfg).unwrap();
    for (e, u) in out.utilities.iter().enumerate() {
        assert_eq!(*u, mean_ratio_quality(&mesh, e, &out.coords));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solvers_agree_with_verifier(seed in 0u64..10_000, k in 1u32..=3) {
        let mesh = perturbed_fan(5, seed);
        let cfg = GameConfig::with_max_power(k);
        let found = exhaustive_nash(&mesh, &cfg).unwrap();
        let (_, best) = best_profile(&mesh, &cfg).unwrap();
        for r in &found {
            prop_assert!(verify_nash(&mesh, &r.profile, &cfg).unwrap().is_equilibrium);
            prop_assert!(best.mean_quality >= r.outcome.mean_quality - PAYOFF_TOLERANCE);
        }
        let br = best_response_nash(&mesh, &cfg, &StrategyProfile::uniform(5, 0), 50).unwrap();
        if br.is_equilibrium {
            prop_assert!(verify_nash(&mesh, &br.profile, &cfg).unwrap().is_equilibrium);
            prop_assert!(found.iter().any(|r| r.profile == br.profile));
        }
    }
}
