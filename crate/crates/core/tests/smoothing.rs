mod common;

use std::collections::BTreeSet;

use common::{max_abs_diff, one_bad_triangle};
use gamesmooth::quality::element_qualities;
use gamesmooth::smoothing::SmoothingError;
use gamesmooth::*;

fn equilateral_strip() -> Mesh {
    let h = 3f64.sqrt() / 2.0;
    Mesh::from_2d(
        &[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.5, h], [1.5, h]],
        vec![[0, 1, 3], [1, 4, 3], [1, 2, 4]],
    )
    .unwrap()
}

fn config(mode: Mode, k: u32, q: f64) -> SmoothingConfig {
    SmoothingConfig {
        game: GameConfig::with_max_power(k),
        mode,
        target_quality: q,
        max_iterations: 20,
        ..Default::default()
    }
}

fn assert_records_recompute(mesh: &Mesh, report: &SmoothingReport, metric: Metric) {
    for r in &report.iterations {
        let s = mesh_quality(mesh, &r.coords, metric);
        assert!((s.mean - r.mean_quality).abs() <= 1e-12);
        assert!((s.min - r.min_quality).abs() <= 1e-12);
    }
    if let Some(last) = report.iterations.last() {
        assert_eq!(last.coords, report.final_coords);
    }
}

#[test]
fn global_equilateral_is_a_fixpoint() {
    let mesh = equilateral_strip();
    let report = smooth_global(&mesh, &config(Mode::Global, 2, 0.9)).unwrap();
    assert_eq!(report.iterations.len(), 1);
    assert_eq!(report.iterations[0].profile.powers(), &[0, 0, 0]);
    assert!(max_abs_diff(&report.final_coords, &mesh.positions()) < 1e-12);
}

#[test]
fn global_single_triangle_never_gets_worse() {
    let mesh = Mesh::from_2d(&[[0.0, 0.0], [1.0, 0.0], [0.1, 0.1]], vec![[0, 1, 2]]).unwrap();
    let mut cfg = config(Mode::Global, 2, 1.0);
    cfg.max_iterations = 3;
    let report = smooth_global(&mesh, &cfg).unwrap();
    assert_eq!(report.iterations.len(), 3);
    let mut previous = report.initial.mean;
    for r in &report.iterations {
        assert!(r.mean_quality >= previous);
        previous = r.mean_quality;
    }
}

#[test]
fn global_fan_report_recomputes() {
    let mesh = generate_scenario("fan5", 0).unwrap();
    let report = smooth_global(&mesh, &config(Mode::Global, 2, 1.0)).unwrap();
    assert!(!report.iterations.is_empty());
    assert!(report.iterations.len() <= 20);
    assert_records_recompute(&mesh, &report, Metric::EdgeRatio);
}

#[test]
fn global_best_response_solver() {
    let mesh = generate_scenario("fan6", 0).unwrap();
    let mut cfg = config(Mode::Global, 2, 1.0);
    cfg.solver = SolveMethod::BestResponse;
    cfg.max_iterations = 4;
    let report = smooth(&mesh, &cfg).unwrap();
    assert!(report
        .iterations
        .iter()
        .all(|r| r.diagnostics.method == SolveMethod::BestResponse));
    assert_records_recompute(&mesh, &report, Metric::EdgeRatio);
}

#[test]
fn global_budget_refusal_carries_iteration() {
    let mesh = generate_scenario("fan6", 0).unwrap();
    let mut cfg = config(Mode::Global, 3, 1.0);
    cfg.game.budget = 100;
    match smooth_global(&mesh, &cfg) {
        Err(SmoothingError::Game {
            iteration: 0,
            source: GameError::BudgetExceeded { profiles: 4096, .. },
        }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn invalid_configs_rejected() {
    let mesh = generate_scenario("fan4", 0).unwrap();
    let mut cfg = config(Mode::Global, 2, 1.5);
    assert!(matches!(
        smooth(&mesh, &cfg),
        Err(SmoothingError::InvalidConfig(_))
    ));
    cfg.target_quality = 0.5;
    cfg.max_iterations = 0;
    assert!(matches!(
        smooth(&mesh, &cfg),
        Err(SmoothingError::InvalidConfig(_))
    ));
}

#[test]
fn local_already_good_mesh_untouched() {
    let mesh = equilateral_strip();
    let report = smooth_local_worst(&mesh, &config(Mode::LocalWorst, 2, 0.9)).unwrap();
    assert!(report.iterations.is_empty());
    assert_eq!(report.terminated_by, Termination::TargetReached);
    assert_eq!(report.final_coords, mesh.positions());
}

#[test]
fn local_one_bad_triangle_needs_one_game() {
    let mesh = one_bad_triangle();
    let before = element_qualities(&mesh, &mesh.positions(), Metric::EdgeRatio);
    assert!(before[0] < 0.6 && before[1..].iter().all(|&q| q > 0.99));

    let report = smooth_local_worst(&mesh, &config(Mode::LocalWorst, 2, 0.6)).unwrap();
    assert_eq!(report.terminated_by, Termination::TargetReached);
    assert_eq!(report.iterations.len(), 1);
    assert_eq!(report.iterations[0].worst_element, Some(0));
    assert_eq!(report.iterations[0].players, vec![0, 1, 2, 3]);
    assert!(report.final_stats().min >= 0.6);
    assert_records_recompute(&mesh, &report, Metric::EdgeRatio);
}

/// Fixed vertices (everything outside the active neighborhood and its rim)
/// are bitwise unchanged by every local game, and the next worst element is
/// the argmin of the recomputed qualities.
#[test]
fn local_games_respect_pins_and_order() {
    let mesh = generate_scenario("fan5_perturbed", 21).unwrap();
    let grid = two_ring_mesh();
    for mesh in [mesh, grid] {
        let mut cfg = config(Mode::LocalWorst, 2, 0.95);
        cfg.max_iterations = 6;
        let report = smooth_local_worst(&mesh, &cfg).unwrap();
        let mut previous = mesh.positions();
        let mut skipped_before: BTreeSet<usize> = BTreeSet::new();
        for r in &report.iterations {
            let q = element_qualities(&mesh, &previous, Metric::EdgeRatio);
            let worst = r.worst_element.unwrap();
            // skipped elements are only ever added, so the set at this point
            // is a subset of the final set
            let candidates: Vec<usize> = (0..mesh.element_count())
                .filter(|e| !report.skipped.contains(e) || !skipped_before.contains(e))
                .collect();
            let argmin = candidates
                .iter()
                .copied()
                .min_by(|&a, &b| q[a].total_cmp(&q[b]).then(a.cmp(&b)))
                .unwrap();
            if !report.skipped.contains(&argmin) {
                assert_eq!(worst, argmin);
            }

            let players: BTreeSet<usize> = r.players.iter().copied().collect();
            for (v, (now, before)) in r.coords.iter().zip(&previous).enumerate() {
                let star = mesh.elements_of(VertexId(v));
                if !star.iter().all(|e| players.contains(e)) {
                    assert_eq!(now, before, "vertex {v} moved");
                }
            }
            previous = r.coords.clone();
            skipped_before.extend(report.skipped.iter().copied());
        }
        assert_records_recompute(&mesh, &report, Metric::EdgeRatio);
    }
}

/// A hexagonal patch of a perturbed triangular lattice, two rings deep.
fn two_ring_mesh() -> Mesh {
    let h = 3f64.sqrt() / 2.0;
    let mut pts = Vec::new();
    let mut index = std::collections::HashMap::new();
    for j in -2i32..=2 {
        for i in -2i32..=2 {
            if (i + j).abs() > 2 {
                continue;
            }
            let wobble = 0.12 * (((i * 7 + j * 13) % 5) as f64 - 2.0) / 2.0;
            index.insert((i, j), pts.len());
            pts.push([
                i as f64 + 0.5 * j as f64 + wobble,
                h * j as f64 - 0.5 * wobble,
            ]);
        }
    }
    let mut tris = Vec::new();
    for (&(i, j), &a) in &index {
        if let (Some(&b), Some(&c)) = (index.get(&(i + 1, j)), index.get(&(i, j + 1))) {
            tris.push([a, b, c]);
        }
        if let (Some(&b), Some(&c)) = (index.get(&(i + 1, j)), index.get(&(i + 1, j - 1))) {
            tris.push([a, c, b]);
        }
    }
    tris.sort();
    Mesh::from_2d(&pts, tris).unwrap()
}

#[test]
fn local_stalls_when_every_bad_element_is_skipped() {
    let mesh = two_ring_mesh();
    let mut cfg = config(Mode::LocalWorst, 1, 1.0);
    cfg.max_iterations = 500;
    let report = smooth_local_worst(&mesh, &cfg).unwrap();
    assert_ne!(report.terminated_by, Termination::TargetReached);
    if report.terminated_by == Termination::Stalled {
        assert!(!report.skipped.is_empty());
    }
}
