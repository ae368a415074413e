//! Smoothing loops built on the single-step game.
//!
//! [`smooth_global`] re-plays the full-mesh game on the updated geometry
//! until the mesh stops changing, reaches the target minimum quality, or runs
//! out of iterations. [`smooth_local_worst`] repeatedly takes the worst
//! element, solves the game on its 1-level neighborhood with the rim pinned,
//! and commits the result.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Game, GameConfig, GameError, NashResult, SolveMethod, StrategyProfile};
use crate::geom::Point;
use crate::mesh::Mesh;
use crate::quality::{element_qualities, QualityStats};

/// Mean-quality change below which the global loop counts as stalled.
pub const STALL_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SmoothingError {
    #[error("invalid smoothing configuration: {0}")]
    InvalidConfig(String),
    #[error("iteration {iteration}: {source}")]
    Game {
        iteration: usize,
        #[source]
        source: GameError,
    },
    #[error("iteration {iteration}: the game has no pure Nash equilibrium")]
    NoEquilibrium { iteration: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Global,
    LocalWorst,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "global" => Ok(Mode::Global),
            "local-worst" | "local" => Ok(Mode::LocalWorst),
            other => Err(format!(
                "unknown mode `{other}` (expected global or local-worst)"
            )),
        }
    }
}

impl std::str::FromStr for SolveMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(SolveMethod::Exhaustive),
            "best-response" => Ok(SolveMethod::BestResponse),
            other => Err(format!(
                "unknown solver `{other}` (expected exhaustive or best-response)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    pub game: GameConfig,
    pub mode: Mode,
    /// Target minimum element quality `q`.
    pub target_quality: f64,
    pub max_iterations: usize,
    pub solver: SolveMethod,
    /// Round limit for best-response search.
    pub max_rounds: u32,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            game: GameConfig::default(),
            mode: Mode::default(),
            target_quality: 1.0,
            max_iterations: 20,
            solver: SolveMethod::Exhaustive,
            max_rounds: 100,
        }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<(), SmoothingError> {
        if self.max_iterations < 1 {
            return Err(SmoothingError::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.target_quality) {
            return Err(SmoothingError::InvalidConfig(format!(
                "target quality {} outside [0, 1]",
                self.target_quality
            )));
        }
        self.game.validate().map_err(|source| SmoothingError::Game {
            iteration: 0,
            source,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    TargetReached,
    MaxIterations,
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub method: SolveMethod,
    pub is_equilibrium: bool,
    /// Number of equilibria found (exhaustive only).
    pub equilibria: Option<usize>,
    /// Rounds (best response) or profiles enumerated (exhaustive).
    pub work: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Elements that played this round, in profile order.
    pub players: Vec<usize>,
    pub profile: StrategyProfile,
    /// The worst element that triggered a local game.
    pub worst_element: Option<usize>,
    pub mean_quality: f64,
    pub min_quality: f64,
    pub diagnostics: SolverDiagnostics,
    /// Whole-mesh coordinates after this iteration.
    pub coords: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub initial: QualityStats,
    pub iterations: Vec<IterationRecord>,
    pub final_coords: Vec<Point>,
    pub terminated_by: Termination,
    /// Elements whose neighborhood game had no usable equilibrium.
    pub skipped: Vec<usize>,
}

impl SmoothingReport {
    pub fn final_stats(&self) -> QualityStats {
        self.iterations
            .last()
            .map(|r| QualityStats {
                mean: r.mean_quality,
                min: r.min_quality,
            })
            .unwrap_or(self.initial)
    }
}

pub fn smooth(mesh: &Mesh, config: &SmoothingConfig) -> Result<SmoothingReport, SmoothingError> {
    match config.mode {
        Mode::Global => smooth_global(mesh, config),
        Mode::LocalWorst => smooth_local_worst(mesh, config),
    }
}

/// Solves `game` with the configured solver. `None` when no equilibrium was
/// found (exhaustive) or best response did not converge.
fn solve(
    game: &Game<'_>,
    config: &SmoothingConfig,
) -> Result<(Option<NashResult>, SolverDiagnostics), GameError> {
    match config.solver {
        SolveMethod::Exhaustive => {
            let table = game.enumerate()?;
            let mut equilibria = table.equilibria();
            let diagnostics = SolverDiagnostics {
                method: SolveMethod::Exhaustive,
                is_equilibrium: !equilibria.is_empty(),
                equilibria: Some(equilibria.len()),
                work: table.profile_count() as u64,
            };
            let first = (!equilibria.is_empty()).then(|| equilibria.swap_remove(0));
            Ok((first, diagnostics))
        }
        SolveMethod::BestResponse => {
            let start = StrategyProfile::uniform(game.player_count(), 0);
            let result = game.best_response(&start, config.max_rounds)?;
            let diagnostics = SolverDiagnostics {
                method: SolveMethod::BestResponse,
                is_equilibrium: result.is_equilibrium,
                equilibria: None,
                work: result.iterations,
            };
            Ok((Some(result), diagnostics))
        }
    }
}

fn stats(mesh: &Mesh, coords: &[Point], config: &SmoothingConfig) -> QualityStats {
    QualityStats::from_values(&element_qualities(mesh, coords, config.game.metric))
}

/// Iterated full-mesh game.
///
/// Each iteration solves the game at the current geometry and moves to the
/// chosen equilibrium's coordinates. A non-converged best-response profile
/// is still applied and flagged in the diagnostics; an exhaustive search
/// that finds no equilibrium is an error.
pub fn smooth_global(
    mesh: &Mesh,
    config: &SmoothingConfig,
) -> Result<SmoothingReport, SmoothingError> {
    config.validate()?;
    let mut coords = mesh.positions();
    let initial = stats(mesh, &coords, config);
    let mut previous_mean = initial.mean;
    let mut iterations = Vec::new();
    let fixed: Vec<bool> = mesh
        .vertices()
        .iter()
        .map(|v| config.game.fix_boundary && v.boundary)
        .collect();
    let players: Vec<usize> = (0..mesh.element_count()).collect();

    for iteration in 0..config.max_iterations {
        let wrap = |source| SmoothingError::Game { iteration, source };
        let game = Game::restricted(mesh, coords.clone(), &config.game, players.clone(), &fixed)
            .map_err(wrap)?;
        let (result, diagnostics) = solve(&game, config).map_err(wrap)?;
        let result = result.ok_or(SmoothingError::NoEquilibrium { iteration })?;

        coords = result.outcome.coords;
        let current = stats(mesh, &coords, config);
        iterations.push(IterationRecord {
            players: players.clone(),
            profile: result.profile,
            worst_element: None,
            mean_quality: current.mean,
            min_quality: current.min,
            diagnostics,
            coords: coords.clone(),
        });

        let terminated_by = if current.min >= config.target_quality {
            Some(Termination::TargetReached)
        } else if (current.mean - previous_mean).abs() < STALL_THRESHOLD {
            Some(Termination::Stalled)
        } else {
            None
        };
        if let Some(terminated_by) = terminated_by {
            return Ok(SmoothingReport {
                initial,
                iterations,
                final_coords: coords,
                terminated_by,
                skipped: Vec::new(),
            });
        }
        previous_mean = current.mean;
    }

    Ok(SmoothingReport {
        initial,
        iterations,
        final_coords: coords,
        terminated_by: Termination::MaxIterations,
        skipped: Vec::new(),
    })
}

/// Total order on qualities for the element queue.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Quality(f64);

impl Eq for Quality {}

impl PartialOrd for Quality {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Quality {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Worst-element local games.
///
/// Elements are kept in a queue ordered by quality, ties by index. While the
/// worst element is below the target, the game on its 1-level neighborhood is
/// solved with every vertex outside the neighborhood, every rim vertex and
/// (with `fix_boundary`) every mesh-boundary vertex pinned. The lexicographic
/// first equilibrium is applied to a working copy and the affected elements
/// are re-queued. Elements whose game has no equilibrium, or whose
/// equilibrium moves nothing, are skipped for the rest of the run; the run
/// stalls once every element below the target has been skipped.
pub fn smooth_local_worst(
    mesh: &Mesh,
    config: &SmoothingConfig,
) -> Result<SmoothingReport, SmoothingError> {
    config.validate()?;
    let metric = config.game.metric;
    let mut working = mesh.positions();
    let mut qualities = element_qualities(mesh, &working, metric);
    let initial = QualityStats::from_values(&qualities);
    let mut queue: BTreeSet<(Quality, usize)> = qualities
        .iter()
        .enumerate()
        .map(|(e, &q)| (Quality(q), e))
        .collect();
    let mut skipped = Vec::new();
    let mut iterations = Vec::new();

    let terminated_by = loop {
        let Some(&(Quality(worst_quality), worst)) = queue.first() else {
            break Termination::Stalled;
        };
        if worst_quality >= config.target_quality {
            let stuck = skipped
                .iter()
                .any(|&e: &usize| qualities[e] < config.target_quality);
            break if stuck {
                Termination::Stalled
            } else {
                Termination::TargetReached
            };
        }
        if iterations.len() >= config.max_iterations {
            break Termination::MaxIterations;
        }

        let iteration = iterations.len();
        let wrap = |source| SmoothingError::Game { iteration, source };
        let neighborhood = mesh.one_ring(worst);
        let mut inside = vec![false; mesh.element_count()];
        for &e in &neighborhood {
            inside[e] = true;
        }
        let fixed: Vec<bool> = mesh
            .vertices()
            .iter()
            .enumerate()
            .map(|(v, vertex)| {
                let star = mesh.elements_of(crate::mesh::VertexId(v));
                let rim_or_outside = star.iter().any(|&e| !inside[e]);
                rim_or_outside || (config.game.fix_boundary && vertex.boundary)
            })
            .collect();

        let game = Game::restricted(
            mesh,
            working.clone(),
            &config.game,
            neighborhood.clone(),
            &fixed,
        )
        .map_err(wrap)?;
        let (result, diagnostics) = solve(&game, config).map_err(wrap)?;
        let result = result.filter(|r| r.is_equilibrium && r.outcome.coords != working);
        let Some(result) = result else {
            queue.remove(&(Quality(worst_quality), worst));
            skipped.push(worst);
            continue;
        };

        // Save the new coordinates and adjust the queue positions of every
        // element touching a vertex that moved.
        let moved: BTreeSet<usize> = (0..mesh.vertex_count())
            .filter(|&v| result.outcome.coords[v] != working[v])
            .flat_map(|v| mesh.elements_of(crate::mesh::VertexId(v)).iter().copied())
            .collect();
        working = result.outcome.coords;
        for e in moved {
            let q = metric.of(&mesh.triangle(e, &working));
            if queue.remove(&(Quality(qualities[e]), e)) {
                queue.insert((Quality(q), e));
            }
            qualities[e] = q;
        }

        let current = QualityStats::from_values(&qualities);
        iterations.push(IterationRecord {
            players: neighborhood,
            profile: result.profile,
            worst_element: Some(worst),
            mean_quality: current.mean,
            min_quality: current.min,
            diagnostics,
            coords: working.clone(),
        });
    };

    Ok(SmoothingReport {
        initial,
        iterations,
        final_coords: working,
        terminated_by,
        skipped,
    })
}
