//! The finite smoothing game.
//!
//! Every player is a triangle whose strategy is a transform power in
//! `0..=k`. A profile assigns one power per player. Each player proposes
//! `T^power(e)` for its own vertices, every vertex moves to the arithmetic
//! mean of the proposals of the players containing it, and each player's
//! payoff is the quality of its triangle after that averaging.
//!
//! Profiles are enumerated in lexicographic order with player 0 as the most
//! significant digit, so a profile's enumeration index orders profiles the
//! same way as comparing their power lists.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Point, Triangle};
use crate::mesh::{Mesh, MeshError, VertexId};
use crate::quality::{Metric, QualityStats};
use crate::transform::{transform_power, TransformParams};

/// Payoff differences at or below this are treated as ties.
pub const PAYOFF_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("invalid game configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error(
        "exhaustive search over {profiles} profiles exceeds the budget of {budget}; \
         use best-response search instead"
    )]
    BudgetExceeded { profiles: u128, budget: u64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LexicographicSmallest,
    LexicographicLargest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    /// Largest transform power `k`; strategies are `0..=k`.
    pub max_power: u32,
    pub transform: TransformParams,
    pub metric: Metric,
    /// Keep mesh-boundary vertices at their positions.
    pub fix_boundary: bool,
    pub tie_break: TieBreak,
    /// Largest number of profiles an exhaustive search may enumerate.
    pub budget: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            max_power: 2,
            transform: TransformParams::default(),
            metric: Metric::default(),
            fix_boundary: false,
            tie_break: TieBreak::default(),
            budget: DEFAULT_BUDGET,
        }
    }
}

impl GameConfig {
    pub fn with_max_power(max_power: u32) -> Self {
        GameConfig {
            max_power,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), GameError> {
        if self.max_power < 1 {
            return Err(GameError::InvalidConfig("k must be at least 1".into()));
        }
        if !self.transform.is_valid() {
            return Err(GameError::InvalidConfig(format!(
                "transform parameters must be finite and positive: {:?}",
                self.transform
            )));
        }
        if self.budget == 0 {
            return Err(GameError::InvalidConfig("budget must be positive".into()));
        }
        Ok(())
    }
}

/// One transform power per player.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyProfile(Vec<u32>);

impl StrategyProfile {
    pub fn new(powers: Vec<u32>) -> Self {
        StrategyProfile(powers)
    }

    pub fn uniform(players: usize, power: u32) -> Self {
        StrategyProfile(vec![power; players])
    }

    pub fn powers(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Coordinates and payoffs produced by one profile.
///
/// `coords` covers every mesh vertex; `utilities` is indexed by player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileOutcome {
    pub coords: Vec<Point>,
    pub utilities: Vec<f64>,
    pub mean_quality: f64,
    pub min_quality: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Exhaustive,
    BestResponse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NashResult {
    pub profile: StrategyProfile,
    pub outcome: ProfileOutcome,
    pub is_equilibrium: bool,
    pub method: SolveMethod,
    /// Rounds for best response; profiles enumerated for exhaustive search.
    pub iterations: u64,
}

/// A unilateral switch that strictly raises the player's payoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub player: usize,
    pub power: u32,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NashCheck {
    pub is_equilibrium: bool,
    pub deviations: Vec<Deviation>,
}

/// A game instance with precomputed per-player proposals.
///
/// The full-mesh game has every element as a player. A restricted game
/// (used for neighborhood sub-games) has a subset of elements as players and
/// an explicit set of fixed vertices; vertices not touched by any player
/// never move.
#[derive(Clone, Debug)]
pub struct Game<'m> {
    mesh: &'m Mesh,
    config: GameConfig,
    base: Vec<Point>,
    players: Vec<usize>,
    /// `proposals[player][power]`.
    proposals: Vec<Vec<Triangle>>,
    /// Movable vertices with the `(player, corner)` pairs proposing for them.
    moving: Vec<(usize, Vec<(usize, usize)>)>,
}

impl<'m> Game<'m> {
    /// The game over all elements at the mesh's current positions.
    pub fn new(mesh: &'m Mesh, config: &GameConfig) -> Result<Self, GameError> {
        let players = (0..mesh.element_count()).collect();
        let fixed: Vec<bool> = mesh
            .vertices()
            .iter()
            .map(|v| config.fix_boundary && v.boundary)
            .collect();
        Self::restricted(mesh, mesh.positions(), config, players, &fixed)
    }

    /// A game over `players` at `coords`, with `fixed[v]` pinning vertex `v`.
    pub fn restricted(
        mesh: &'m Mesh,
        coords: Vec<Point>,
        config: &GameConfig,
        players: Vec<usize>,
        fixed: &[bool],
    ) -> Result<Self, GameError> {
        mesh.check_coords(&coords)?;
        if fixed.len() != mesh.vertex_count() {
            return Err(GameError::InvalidConfig(format!(
                "fixed-vertex mask has {} entries for {} vertices",
                fixed.len(),
                mesh.vertex_count()
            )));
        }
        if players.is_empty() {
            return Err(GameError::InvalidConfig("game has no players".into()));
        }
        if let Some(&bad) = players.iter().find(|&&e| e >= mesh.element_count()) {
            return Err(GameError::InvalidConfig(format!("no element {bad}")));
        }
        if !config.transform.is_valid() {
            return Err(GameError::InvalidConfig(format!(
                "transform parameters must be finite and positive: {:?}",
                config.transform
            )));
        }

        let proposals: Vec<Vec<Triangle>> = players
            .iter()
            .map(|&e| {
                let tri = mesh.triangle(e, &coords);
                (0..=config.max_power)
                    .map(|j| transform_power(&tri, j, &config.transform))
                    .collect()
            })
            .collect();

        let mut contributions: Vec<Vec<(usize, usize)>> = vec![Vec::new(); mesh.vertex_count()];
        for (slot, &e) in players.iter().enumerate() {
            for (corner, v) in mesh.elements()[e].indices().into_iter().enumerate() {
                contributions[v].push((slot, corner));
            }
        }
        let moving = contributions
            .into_iter()
            .enumerate()
            .filter(|(v, c)| !c.is_empty() && !fixed[*v])
            .collect();

        Ok(Game {
            mesh,
            config: config.clone(),
            base: coords,
            players,
            proposals,
            moving,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn players(&self) -> &[usize] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    /// The coordinates every profile starts from.
    pub fn base_coords(&self) -> &[Point] {
        &self.base
    }

    /// Number of strategies per player, `k + 1`.
    pub fn strategy_count(&self) -> u32 {
        self.config.max_power + 1
    }

    /// `(k + 1)^n`, saturating.
    pub fn profile_count(&self) -> u128 {
        u128::from(self.strategy_count())
            .checked_pow(self.players.len() as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn check_profile(&self, profile: &StrategyProfile) -> Result<(), GameError> {
        if profile.len() != self.players.len() {
            return Err(GameError::InvalidProfile(format!(
                "profile has {} entries for {} players",
                profile.len(),
                self.players.len()
            )));
        }
        if let Some((i, p)) = profile
            .powers()
            .iter()
            .enumerate()
            .find(|(_, &p)| p > self.config.max_power)
        {
            return Err(GameError::InvalidProfile(format!(
                "player {i} plays power {p}, above k = {}",
                self.config.max_power
            )));
        }
        Ok(())
    }

    /// Writes the averaged coordinates for `powers` into `coords`, which must
    /// start as a copy of the base coordinates.
    fn place(&self, powers: &[u32], coords: &mut [Point]) {
        for (v, sources) in &self.moving {
            let (slot, corner) = sources[0];
            let first = self.proposals[slot][powers[slot] as usize][corner];
            if sources[1..]
                .iter()
                .all(|&(s, c)| self.proposals[s][powers[s] as usize][c] == first)
            {
                coords[*v] = first;
                continue;
            }
            let sum = sources.iter().fold(first.coords * 0.0, |acc, &(s, c)| {
                acc + self.proposals[s][powers[s] as usize][c].coords
            });
            coords[*v] = Point::from(sum / sources.len() as f64);
        }
    }

    fn payoffs(&self, coords: &[Point], out: &mut [f64]) {
        for (u, &e) in out.iter_mut().zip(&self.players) {
            *u = self.config.metric.of(&self.mesh.triangle(e, coords));
        }
    }

    pub fn evaluate(&self, profile: &StrategyProfile) -> Result<ProfileOutcome, GameError> {
        self.check_profile(profile)?;
        Ok(self.evaluate_unchecked(profile.powers()))
    }

    fn evaluate_unchecked(&self, powers: &[u32]) -> ProfileOutcome {
        let mut coords = self.base.clone();
        self.place(powers, &mut coords);
        let mut utilities = vec![0.0; self.players.len()];
        self.payoffs(&coords, &mut utilities);
        let stats = QualityStats::from_values(&utilities);
        ProfileOutcome {
            coords,
            utilities,
            mean_quality: stats.mean,
            min_quality: stats.min,
        }
    }

    /// Payoffs only, reusing caller buffers.
    fn utilities_into(&self, powers: &[u32], coords: &mut [Point], out: &mut [f64]) {
        coords.copy_from_slice(&self.base);
        self.place(powers, coords);
        self.payoffs(coords, out);
    }

    pub fn verify(&self, profile: &StrategyProfile) -> Result<NashCheck, GameError> {
        self.check_profile(profile)?;
        let n = self.players.len();
        let mut coords = self.base.clone();
        let mut current = vec![0.0; n];
        self.utilities_into(profile.powers(), &mut coords, &mut current);

        let mut deviations = Vec::new();
        let mut trial = vec![0.0; n];
        let mut powers = profile.powers().to_vec();
        for player in 0..n {
            let own = powers[player];
            for power in 0..=self.config.max_power {
                if power == own {
                    continue;
                }
                powers[player] = power;
                self.utilities_into(&powers, &mut coords, &mut trial);
                let gain = trial[player] - current[player];
                if gain > PAYOFF_TOLERANCE {
                    deviations.push(Deviation {
                        player,
                        power,
                        gain,
                    });
                }
            }
            powers[player] = own;
        }
        Ok(NashCheck {
            is_equilibrium: deviations.is_empty(),
            deviations,
        })
    }

    /// Evaluates every profile. Refuses when `(k + 1)^n` exceeds the budget.
    pub fn enumerate(&self) -> Result<Enumeration<'_, 'm>, GameError> {
        self.config.validate()?;
        let total = self.profile_count();
        if total > u128::from(self.config.budget) {
            return Err(GameError::BudgetExceeded {
                profiles: total,
                budget: self.config.budget,
            });
        }
        let total = total as usize;
        let n = self.players.len();
        let radix = self.strategy_count();

        const CHUNK: usize = 256;
        let mut table = vec![0.0; total * n];
        table
            .par_chunks_mut(CHUNK * n)
            .enumerate()
            .for_each(|(chunk, rows)| {
                let mut powers = decode(chunk * CHUNK, n, radix);
                let mut coords = self.base.clone();
                for row in rows.chunks_mut(n) {
                    self.utilities_into(&powers, &mut coords, row);
                    increment(&mut powers, radix);
                }
            });

        Ok(Enumeration {
            game: self,
            table,
            total,
        })
    }

    /// Round-robin best-response dynamics from `start`.
    ///
    /// Players move in index order. A player switches only when some power
    /// beats its current payoff by more than [`PAYOFF_TOLERANCE`], and then
    /// picks the smallest power whose payoff is within tolerance of the best.
    pub fn best_response(
        &self,
        start: &StrategyProfile,
        max_rounds: u32,
    ) -> Result<NashResult, GameError> {
        self.config.validate()?;
        self.check_profile(start)?;
        let n = self.players.len();
        let mut powers = start.powers().to_vec();
        let mut coords = self.base.clone();
        let mut payoff = vec![0.0; n];
        let mut rounds = 0;
        let mut converged = false;

        while rounds < max_rounds {
            rounds += 1;
            let mut changed = false;
            for player in 0..n {
                let own = powers[player];
                let values: Vec<f64> = (0..=self.config.max_power)
                    .map(|p| {
                        powers[player] = p;
                        self.utilities_into(&powers, &mut coords, &mut payoff);
                        payoff[player]
                    })
                    .collect();
                let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                powers[player] = if best > values[own as usize] + PAYOFF_TOLERANCE {
                    changed = true;
                    values
                        .iter()
                        .position(|&v| v >= best - PAYOFF_TOLERANCE)
                        .expect("maximum is attained") as u32
                } else {
                    own
                };
            }
            if !changed {
                converged = true;
                break;
            }
        }

        let profile = StrategyProfile(powers);
        let is_equilibrium = converged && self.verify(&profile)?.is_equilibrium;
        Ok(NashResult {
            outcome: self.evaluate_unchecked(profile.powers()),
            profile,
            is_equilibrium,
            method: SolveMethod::BestResponse,
            iterations: u64::from(rounds),
        })
    }
}

/// Payoff table over all profiles of a game.
pub struct Enumeration<'g, 'm> {
    game: &'g Game<'m>,
    /// Row-major: `table[index * n + player]`.
    table: Vec<f64>,
    total: usize,
}

impl Enumeration<'_, '_> {
    pub fn profile_count(&self) -> usize {
        self.total
    }

    pub fn profile(&self, index: usize) -> StrategyProfile {
        StrategyProfile(decode(
            index,
            self.game.players.len(),
            self.game.strategy_count(),
        ))
    }

    pub fn utilities(&self, index: usize) -> &[f64] {
        let n = self.game.players.len();
        &self.table[index * n..(index + 1) * n]
    }

    pub fn mean_quality(&self, index: usize) -> f64 {
        let u = self.utilities(index);
        u.iter().sum::<f64>() / u.len() as f64
    }

    fn is_equilibrium(&self, index: usize) -> bool {
        let n = self.game.players.len();
        let radix = self.game.strategy_count() as usize;
        let mut rest = index;
        let mut stride = 1;
        for player in (0..n).rev() {
            let own = rest % radix;
            rest /= radix;
            let base = index - own * stride;
            let current = self.table[index * n + player];
            for p in (0..radix).filter(|&p| p != own) {
                if self.table[(base + p * stride) * n + player] > current + PAYOFF_TOLERANCE {
                    return false;
                }
            }
            stride *= radix;
        }
        true
    }

    /// Indices of all pure equilibria, ascending.
    pub fn equilibrium_indices(&self) -> Vec<usize> {
        (0..self.total)
            .into_par_iter()
            .filter(|&i| self.is_equilibrium(i))
            .collect()
    }

    /// All pure equilibria, ordered by the tie-break policy.
    pub fn equilibria(&self) -> Vec<NashResult> {
        let mut indices = self.equilibrium_indices();
        if self.game.config.tie_break == TieBreak::LexicographicLargest {
            indices.reverse();
        }
        indices
            .into_iter()
            .map(|i| {
                let profile = self.profile(i);
                NashResult {
                    outcome: self.game.evaluate_unchecked(profile.powers()),
                    profile,
                    is_equilibrium: true,
                    method: SolveMethod::Exhaustive,
                    iterations: self.total as u64,
                }
            })
            .collect()
    }

    /// The profile of highest mean quality. Profiles within
    /// [`PAYOFF_TOLERANCE`] of the maximum tie and the tie-break decides.
    pub fn best(&self) -> (StrategyProfile, ProfileOutcome) {
        let means: Vec<f64> = (0..self.total).map(|i| self.mean_quality(i)).collect();
        let top = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let near_top = |&i: &usize| means[i] >= top - PAYOFF_TOLERANCE;
        let index = match self.game.config.tie_break {
            TieBreak::LexicographicSmallest => (0..self.total).find(near_top),
            TieBreak::LexicographicLargest => (0..self.total).rev().find(near_top),
        }
        .expect("at least one profile");
        let profile = self.profile(index);
        let outcome = self.game.evaluate_unchecked(profile.powers());
        (profile, outcome)
    }
}

fn decode(mut index: usize, n: usize, radix: u32) -> Vec<u32> {
    let radix = radix as usize;
    let mut powers = vec![0; n];
    for slot in powers.iter_mut().rev() {
        *slot = (index % radix) as u32;
        index /= radix;
    }
    powers
}

fn increment(powers: &mut [u32], radix: u32) {
    for slot in powers.iter_mut().rev() {
        *slot += 1;
        if *slot < radix {
            return;
        }
        *slot = 0;
    }
}

pub fn evaluate_profile(
    mesh: &Mesh,
    profile: &StrategyProfile,
    config: &GameConfig,
) -> Result<ProfileOutcome, GameError> {
    Game::new(mesh, config)?.evaluate(profile)
}

pub fn verify_nash(
    mesh: &Mesh,
    profile: &StrategyProfile,
    config: &GameConfig,
) -> Result<NashCheck, GameError> {
    Game::new(mesh, config)?.verify(profile)
}

/// Every pure Nash equilibrium, ordered by the tie-break policy. Empty when
/// none exists.
pub fn exhaustive_nash(mesh: &Mesh, config: &GameConfig) -> Result<Vec<NashResult>, GameError> {
    let game = Game::new(mesh, config)?;
    let table = game.enumerate()?;
    Ok(table.equilibria())
}

pub fn best_response_nash(
    mesh: &Mesh,
    config: &GameConfig,
    start: &StrategyProfile,
    max_rounds: u32,
) -> Result<NashResult, GameError> {
    Game::new(mesh, config)?.best_response(start, max_rounds)
}

pub fn best_profile(
    mesh: &Mesh,
    config: &GameConfig,
) -> Result<(StrategyProfile, ProfileOutcome), GameError> {
    let game = Game::new(mesh, config)?;
    let table = game.enumerate()?;
    Ok(table.best())
}

/// The outcome of every element applying `T^k`.
pub fn uniform_profile_outcome(
    mesh: &Mesh,
    config: &GameConfig,
) -> Result<ProfileOutcome, GameError> {
    let game = Game::new(mesh, config)?;
    game.evaluate(&StrategyProfile::uniform(
        mesh.element_count(),
        config.max_power,
    ))
}

/// Vertices that never move in the full-mesh game under `config`.
pub fn fixed_vertices(mesh: &Mesh, config: &GameConfig) -> Vec<VertexId> {
    (0..mesh.vertex_count())
        .map(VertexId)
        .filter(|&v| config.fix_boundary && mesh.is_boundary(v))
        .collect()
}
