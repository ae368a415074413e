//! Triangle mesh smoothing as a finite game.
//!
//! Each triangle of a mesh is a player choosing how many times to apply a
//! regularizing element transformation to itself. Shared vertices move to
//! the average of the positions proposed by their triangles, and every
//! player is paid the quality of its own resulting triangle. The crate finds
//! pure Nash equilibria of that game (exhaustively or by best-response
//! dynamics), compares them with the mean-quality optimal profile and the
//! uniform profile used by conventional geometric smoothing, and iterates the
//! game into full smoothing loops.
//!
//! ```
//! use gamesmooth::{exhaustive_nash, generate_scenario, GameConfig};
//!
//! let mesh = generate_scenario("fan4", 0).unwrap();
//! let equilibria = exhaustive_nash(&mesh, &GameConfig::with_max_power(2)).unwrap();
//! assert!(equilibria.iter().all(|r| r.is_equilibrium));
//! ```

pub mod compare;
pub mod format;
pub mod game;
pub mod geom;
pub mod mesh;
pub mod quality;
pub mod scenario;
pub mod smoothing;
pub mod svg;
pub mod transform;

pub use compare::{run_compare, ComparisonRecord, MeshSource, RunSpec};
pub use game::{
    best_profile, best_response_nash, evaluate_profile, exhaustive_nash, uniform_profile_outcome,
    verify_nash, Game, GameConfig, GameError, NashResult, ProfileOutcome, SolveMethod,
    StrategyProfile, TieBreak,
};
pub use geom::Point;
pub use mesh::{Element, Mesh, MeshError, Vertex, VertexId};
pub use quality::{element_quality, mean_ratio_quality, mesh_quality, Metric, QualityStats};
pub use scenario::generate_scenario;
pub use smoothing::{
    smooth, smooth_global, smooth_local_worst, Mode, SmoothingConfig, SmoothingReport, Termination,
};
pub use transform::{transform_element, transform_power, TransformParams};

use thiserror::Error;

/// Any failure surfaced by the crate's top-level operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Smoothing(#[from] smoothing::SmoothingError),
    #[error(transparent)]
    Format(#[from] format::FormatError),
    #[error(transparent)]
    Svg(#[from] svg::SvgError),
    #[error(transparent)]
    Scenario(#[from] scenario::UnknownScenario),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when an exhaustive search was refused for exceeding its budget.
    pub fn is_budget_refusal(&self) -> bool {
        matches!(
            self,
            Error::Game(GameError::BudgetExceeded { .. })
                | Error::Smoothing(smoothing::SmoothingError::Game {
                    source: GameError::BudgetExceeded { .. },
                    ..
                })
        )
    }
}
