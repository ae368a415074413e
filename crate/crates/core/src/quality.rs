//! Element and mesh quality measures.

use serde::{Deserialize, Serialize};

use crate::geom::{self, Point, Triangle};
use crate::mesh::Mesh;

/// Which element quality drives the payoffs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Shortest over longest pairwise vertex distance.
    #[default]
    EdgeRatio,
    /// Area-normalized quality relative to the equilateral triangle.
    MeanRatio,
}

impl Metric {
    pub fn of(self, tri: &Triangle) -> f64 {
        match self {
            Metric::EdgeRatio => edge_ratio(tri),
            Metric::MeanRatio => mean_ratio(tri),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge-ratio" => Ok(Metric::EdgeRatio),
            "mean-ratio" => Ok(Metric::MeanRatio),
            other => Err(format!(
                "unknown metric `{other}` (expected edge-ratio or mean-ratio)"
            )),
        }
    }
}

/// `min |xa - xb| / max |xa - xb|` over the three vertex pairs.
///
/// Coincident vertices give 0. The measure ignores orientation, so a
/// collinear triangle with edges 1, 1, 2 scores 0.5.
pub fn edge_ratio(tri: &Triangle) -> f64 {
    let e = geom::edge_lengths(tri);
    let max = e[0].max(e[1]).max(e[2]);
    if max == 0.0 {
        return 0.0;
    }
    e[0].min(e[1]).min(e[2]) / max
}

/// `4 sqrt(3) A / (l0^2 + l1^2 + l2^2)` with `A` the signed area, clamped to
/// `[0, 1]`. Inverted and degenerate elements score 0.
pub fn mean_ratio(tri: &Triangle) -> f64 {
    let sum_sq: f64 = geom::edge_lengths(tri).iter().map(|l| l * l).sum();
    if sum_sq == 0.0 {
        return 0.0;
    }
    let area = geom::signed_area(tri);
    if area <= 0.0 {
        return 0.0;
    }
    (4.0 * 3f64.sqrt() * area / sum_sq).min(1.0)
}

pub fn element_quality(mesh: &Mesh, element: usize, coords: &[Point]) -> f64 {
    edge_ratio(&mesh.triangle(element, coords))
}

pub fn mean_ratio_quality(mesh: &Mesh, element: usize, coords: &[Point]) -> f64 {
    mean_ratio(&mesh.triangle(element, coords))
}

/// Arithmetic mean and minimum of element qualities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityStats {
    pub mean: f64,
    pub min: f64,
}

impl QualityStats {
    pub fn from_values(values: &[f64]) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        QualityStats { mean, min }
    }
}

pub fn element_qualities(mesh: &Mesh, coords: &[Point], metric: Metric) -> Vec<f64> {
    (0..mesh.element_count())
        .map(|e| metric.of(&mesh.triangle(e, coords)))
        .collect()
}

pub fn mesh_quality(mesh: &Mesh, coords: &[Point], metric: Metric) -> QualityStats {
    QualityStats::from_values(&element_qualities(mesh, coords, metric))
}
