//! Nash / best / uniform comparison sweeps and their on-disk record.
//!
//! For every `k` in the sweep, [`run_compare`] computes the lexicographically
//! first pure Nash equilibrium, the mean-quality optimal profile and the
//! uniform all-`k` profile, plus two quality-vs-iteration histories (the
//! iterated Nash game and the iterated uniform profile). With an output
//! directory it writes:
//!
//! - `compare.json`: the [`ComparisonRecord`]
//! - `curves.csv`: quality vs `k` and quality vs iteration, long format
//! - `initial.off`, `k{k}_{nash,best,uniform}.off`: meshes behind every number
//! - `k{k}.svg`: initial (black), Nash (blue) and best (red) overlay

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format::save_off;
use crate::game::{Game, GameConfig, GameError, ProfileOutcome, StrategyProfile};
use crate::geom::Point;
use crate::mesh::Mesh;
use crate::quality::{mesh_quality, QualityStats};
use crate::scenario::generate_scenario;
use crate::smoothing::{smooth_global, SmoothingConfig, SmoothingError};
use crate::svg::{emit_svg, Layer, Style};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MeshSource {
    File { path: PathBuf },
    Scenario { name: String, seed: u64 },
}

impl MeshSource {
    pub fn load(&self) -> Result<Mesh, Error> {
        match self {
            MeshSource::File { path } => Ok(crate::format::load_mesh(path)?),
            MeshSource::Scenario { name, seed } => Ok(generate_scenario(name, *seed)?),
        }
    }

    pub fn label(&self) -> String {
        match self {
            MeshSource::File { path } => path.display().to_string(),
            MeshSource::Scenario { name, .. } => name.clone(),
        }
    }
}

/// Everything a comparison run needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub source: MeshSource,
    /// Game settings; `max_power` is overridden per sweep point.
    pub game: GameConfig,
    pub sweep: Vec<u32>,
    /// Length of the quality-vs-iteration histories.
    pub history_iterations: usize,
    pub out_dir: Option<PathBuf>,
}

impl RunSpec {
    pub fn new(source: MeshSource, game: GameConfig, sweep: Vec<u32>) -> Self {
        RunSpec {
            source,
            game,
            sweep,
            history_iterations: 5,
            out_dir: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyResult {
    pub profile: StrategyProfile,
    pub mean_quality: f64,
    pub min_quality: f64,
    /// Mesh file name inside the output directory, when written.
    pub mesh_file: Option<String>,
    #[serde(skip)]
    pub coords: Vec<Point>,
}

impl FamilyResult {
    fn new(profile: StrategyProfile, outcome: ProfileOutcome) -> Self {
        FamilyResult {
            profile,
            mean_quality: outcome.mean_quality,
            min_quality: outcome.min_quality,
            mesh_file: None,
            coords: outcome.coords,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub k: u32,
    pub nash: Option<FamilyResult>,
    /// Number of pure equilibria found; `None` when the search was refused.
    pub equilibria: Option<usize>,
    pub best: Option<FamilyResult>,
    pub uniform: FamilyResult,
    /// Mean quality after each iteration of the iterated Nash game.
    pub nash_history: Vec<f64>,
    /// Mean quality after each repeated application of the uniform profile.
    pub uniform_history: Vec<f64>,
    /// Families or histories that could not be computed, with the reason.
    pub omitted: Vec<String>,
    pub figure: Option<String>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub source: MeshSource,
    pub scenario: String,
    pub config: GameConfig,
    pub history_iterations: usize,
    pub initial: QualityStats,
    pub initial_mesh_file: Option<String>,
    pub sweep: Vec<SweepPoint>,
}

impl ComparisonRecord {
    /// True when any family was dropped because the enumeration budget was
    /// exceeded.
    pub fn has_budget_omissions(&self) -> bool {
        self.sweep
            .iter()
            .any(|p| p.omitted.iter().any(|o| o.contains("budget")))
    }

    pub fn point(&self, k: u32) -> Option<&SweepPoint> {
        self.sweep.iter().find(|p| p.k == k)
    }
}

fn uniform_history(mesh: &Mesh, config: &GameConfig, steps: usize) -> Result<Vec<f64>, GameError> {
    let mut current = mesh.clone();
    let mut history = Vec::with_capacity(steps);
    for _ in 0..steps {
        let game = Game::new(&current, config)?;
        let out = game.evaluate(&StrategyProfile::uniform(
            mesh.element_count(),
            config.max_power,
        ))?;
        history.push(out.mean_quality);
        current = current.with_positions(&out.coords)?;
    }
    Ok(history)
}

fn sweep_point(mesh: &Mesh, spec: &RunSpec, k: u32) -> Result<SweepPoint, Error> {
    let start = Instant::now();
    let config = GameConfig {
        max_power: k,
        ..spec.game.clone()
    };
    config.validate()?;
    let game = Game::new(mesh, &config)?;
    let mut omitted = Vec::new();

    let uniform_profile = StrategyProfile::uniform(mesh.element_count(), k);
    let uniform = FamilyResult::new(uniform_profile.clone(), game.evaluate(&uniform_profile)?);

    let (nash, equilibria, best) = match game.enumerate() {
        Ok(table) => {
            let equilibria = table.equilibria();
            let count = equilibria.len();
            let nash = equilibria
                .into_iter()
                .next()
                .map(|r| FamilyResult::new(r.profile, r.outcome));
            if nash.is_none() {
                omitted.push("nash: no pure equilibrium exists".to_string());
            }
            let (bp, bo) = table.best();
            (nash, Some(count), Some(FamilyResult::new(bp, bo)))
        }
        Err(e @ GameError::BudgetExceeded { .. }) => {
            omitted.push(format!("nash, best: {e}"));
            (None, None, None)
        }
        Err(e) => return Err(e.into()),
    };

    let smoothing = SmoothingConfig {
        game: config.clone(),
        max_iterations: spec.history_iterations.max(1),
        ..Default::default()
    };
    let nash_history = if spec.history_iterations == 0 {
        Vec::new()
    } else {
        match smooth_global(mesh, &smoothing) {
            Ok(report) => report.iterations.iter().map(|r| r.mean_quality).collect(),
            Err(e) => {
                let budget = matches!(
                    e,
                    SmoothingError::Game {
                        source: GameError::BudgetExceeded { .. },
                        ..
                    }
                );
                let tag = if budget { " (budget)" } else { "" };
                omitted.push(format!("nash history{tag}: {e}"));
                Vec::new()
            }
        }
    };
    let uniform_history = uniform_history(mesh, &config, spec.history_iterations)?;

    Ok(SweepPoint {
        k,
        nash,
        equilibria,
        best,
        uniform,
        nash_history,
        uniform_history,
        omitted,
        figure: None,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs the sweep and, with an output directory, writes every artifact.
pub fn run_compare(spec: &RunSpec) -> Result<ComparisonRecord, Error> {
    let mesh = spec.source.load()?;
    let initial = mesh_quality(&mesh, &mesh.positions(), spec.game.metric);
    let mut sweep = spec
        .sweep
        .par_iter()
        .map(|&k| sweep_point(&mesh, spec, k))
        .collect::<Result<Vec<_>, _>>()?;

    let mut initial_mesh_file = None;
    if let Some(dir) = &spec.out_dir {
        std::fs::create_dir_all(dir)?;
        initial_mesh_file = Some(write_mesh(dir, "initial.off", &mesh, &mesh.positions())?);
        for point in &mut sweep {
            write_point(dir, &mesh, point)?;
        }
    }

    let record = ComparisonRecord {
        source: spec.source.clone(),
        scenario: spec.source.label(),
        config: spec.game.clone(),
        history_iterations: spec.history_iterations,
        initial,
        initial_mesh_file,
        sweep,
    };
    if let Some(dir) = &spec.out_dir {
        let json = serde_json::to_string_pretty(&record).expect("record serializes");
        std::fs::write(dir.join("compare.json"), json + "\n")?;
        std::fs::write(dir.join("curves.csv"), curves_csv(&record))?;
    }
    Ok(record)
}

fn write_mesh(dir: &Path, name: &str, mesh: &Mesh, coords: &[Point]) -> Result<String, Error> {
    save_off(&dir.join(name), mesh, coords)?;
    Ok(name.to_string())
}

fn write_point(dir: &Path, mesh: &Mesh, point: &mut SweepPoint) -> Result<(), Error> {
    let k = point.k;
    for (family, result) in [
        ("nash", point.nash.as_mut()),
        ("best", point.best.as_mut()),
        ("uniform", Some(&mut point.uniform)),
    ] {
        if let Some(r) = result {
            let name = format!("k{k}_{family}.off");
            r.mesh_file = Some(write_mesh(dir, &name, mesh, &r.coords)?);
        }
    }

    if mesh.is_planar() {
        let initial = mesh.positions();
        let mut layers = vec![Layer::new(mesh, &initial, Style::initial())];
        if let Some(n) = &point.nash {
            layers.push(Layer::new(mesh, &n.coords, Style::nash()));
        }
        if let Some(b) = &point.best {
            layers.push(Layer::new(mesh, &b.coords, Style::best()));
        }
        let name = format!("k{k}.svg");
        emit_svg(&layers, &dir.join(&name))?;
        point.figure = Some(name);
    }
    Ok(())
}

/// Long-format CSV: `series,k,iteration,mean_quality,min_quality`.
///
/// The `*_vs_k` series have an empty iteration column; the `*_history`
/// series have an empty min column.
pub fn curves_csv(record: &ComparisonRecord) -> String {
    let mut out = String::from("series,k,iteration,mean_quality,min_quality\n");
    for p in &record.sweep {
        let families = [
            ("nash_vs_k", p.nash.as_ref()),
            ("best_vs_k", p.best.as_ref()),
            ("uniform_vs_k", Some(&p.uniform)),
        ];
        for (series, r) in families {
            if let Some(r) = r {
                let _ = writeln!(
                    out,
                    "{series},{},,{},{}",
                    p.k, r.mean_quality, r.min_quality
                );
            }
        }
    }
    for p in &record.sweep {
        for (series, history) in [
            ("nash_history", &p.nash_history),
            ("uniform_history", &p.uniform_history),
        ] {
            for (i, q) in history.iter().enumerate() {
                let _ = writeln!(out, "{series},{},{},{q},", p.k, i + 1);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilateral_families_coincide() {
        let h = 3f64.sqrt() / 2.0;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eq.off");
        let m = Mesh::from_2d(
            &[[0.0, 0.0], [1.0, 0.0], [0.5, h], [1.5, h]],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .unwrap();
        save_off(&path, &m, &m.positions()).unwrap();
        let spec = RunSpec::new(MeshSource::File { path }, GameConfig::default(), vec![1]);
        let record = run_compare(&spec).unwrap();
        let p = record.point(1).unwrap();
        for q in [
            p.nash.as_ref().unwrap().mean_quality,
            p.best.as_ref().unwrap().mean_quality,
            p.uniform.mean_quality,
        ] {
            assert!((q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_refusal_gives_partial_record() {
        let game = GameConfig {
            budget: 10,
            ..Default::default()
        };
        let spec = RunSpec::new(
            MeshSource::Scenario {
                name: "fan4".into(),
                seed: 0,
            },
            game,
            vec![2],
        );
        let record = run_compare(&spec).unwrap();
        let p = record.point(2).unwrap();
        assert!(p.nash.is_none() && p.best.is_none());
        assert!(record.has_budget_omissions());
        assert!(p.omitted.iter().any(|o| o.contains("budget")));
    }
}
