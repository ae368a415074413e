//! Canonical fan meshes used by the comparison runs.
//!
//! Each fan has a regular polygon boundary of unit circumradius (first vertex
//! on the positive x-axis, counterclockwise) and one center vertex at
//! `(0.3, 0.2)`, connected to every boundary edge. The center is vertex 0 and
//! element `i` is `(0, i + 1, i + 2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mesh::Mesh;

pub const CENTER: [f64; 2] = [0.3, 0.2];
pub const JITTER: f64 = 0.15;

pub const NAMES: [&str; 4] = ["fan4", "fan5", "fan5_perturbed", "fan6"];

#[derive(Debug, Error, PartialEq)]
#[error("unknown scenario `{0}` (expected one of fan4, fan5, fan5_perturbed, fan6)")]
pub struct UnknownScenario(pub String);

fn boundary(sides: usize) -> Vec<[f64; 2]> {
    (0..sides)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / sides as f64;
            [a.cos(), a.sin()]
        })
        .collect()
}

fn fan(boundary: Vec<[f64; 2]>) -> Mesh {
    let sides = boundary.len();
    let mut points = vec![CENTER];
    points.extend(boundary);
    let triangles = (0..sides)
        .map(|i| [0, 1 + i, 1 + (i + 1) % sides])
        .collect();
    Mesh::from_2d(&points, triangles).expect("fan construction is valid")
}

/// Fan with `sides` boundary vertices, each jittered uniformly in
/// `[-0.15, 0.15]^2` by a ChaCha8 stream seeded with `seed`.
pub fn perturbed_fan(sides: usize, seed: u64) -> Mesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = boundary(sides)
        .into_iter()
        .map(|[x, y]| {
            [
                x + rng.random_range(-JITTER..=JITTER),
                y + rng.random_range(-JITTER..=JITTER),
            ]
        })
        .collect();
    fan(points)
}

/// Builds a named scenario. The seed only affects `*_perturbed` names.
pub fn generate_scenario(name: &str, seed: u64) -> Result<Mesh, UnknownScenario> {
    match name {
        "fan4" => Ok(fan(boundary(4))),
        "fan5" => Ok(fan(boundary(5))),
        "fan6" => Ok(fan(boundary(6))),
        "fan5_perturbed" => Ok(perturbed_fan(5, seed)),
        other => Err(UnknownScenario(other.to_string())),
    }
}
