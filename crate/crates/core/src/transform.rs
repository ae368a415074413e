//! The regularizing triangle transformation and its powers.
//!
//! For a triangle `(p0, p1, p2)` each vertex `pi` gets an apex erected over
//! its opposite edge:
//!
//! ```text
//! apex_i = (p_{i+1} + p_{i+2}) / 2 + theta * R90(p_{i+2} - p_{i+1})
//! ```
//!
//! where `R90` is the +90 degree rotation in the triangle's oriented plane.
//! The new vertex is `pi + relaxation * (apex_i - pi)`. With the default
//! `theta = sqrt(3)/2` an equilateral triangle maps onto itself, and with the
//! default `relaxation = 1/2` the anti-regular shape component is multiplied
//! by `-1/2` per application, so repeated application converges to an
//! equilateral triangle of the input's orientation. `relaxation = 1` is the
//! bare apex construction, which doubles the anti-regular component and
//! drives triangles towards an inverted equilateral shape.
//!
//! The centroid is preserved, and with `preserve_area` the result is scaled
//! about the centroid back to the input's area.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::geom::{self, Triangle};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    /// Apex height over the opposite edge, in units of that edge's length.
    pub theta: f64,
    /// Fraction of the way each vertex moves towards its apex.
    pub relaxation: f64,
    pub preserve_area: bool,
}

impl Default for TransformParams {
    fn default() -> Self {
        TransformParams {
            theta: 3f64.sqrt() / 2.0,
            relaxation: 0.5,
            preserve_area: true,
        }
    }
}

impl TransformParams {
    pub fn is_valid(&self) -> bool {
        self.theta.is_finite()
            && self.theta > 0.0
            && self.relaxation.is_finite()
            && self.relaxation > 0.0
    }
}

/// Unit normal used for `R90`. Triangles parallel to the xy-plane always use
/// `+z`, so inverted planar elements are rotated against the mesh's positive
/// orientation and get pushed back towards positive area. Collinear 3D input
/// also falls back to `+z`.
fn rotation_axis(tri: &Triangle) -> Vector3<f64> {
    if geom::is_xy_parallel(tri) {
        return Vector3::z();
    }
    let n = geom::normal(tri);
    let len = n.norm();
    if len > 0.0 {
        n / len
    } else {
        Vector3::z()
    }
}

pub fn transform_element(tri: &Triangle, params: &TransformParams) -> Triangle {
    if geom::diameter(tri) == 0.0 {
        return *tri;
    }
    let axis = rotation_axis(tri);
    let center = geom::centroid(tri);

    let moved: Triangle = std::array::from_fn(|i| {
        let a = tri[(i + 1) % 3];
        let b = tri[(i + 2) % 3];
        let midpoint = a + (b - a) * 0.5;
        let apex = midpoint + axis.cross(&(b - a)) * params.theta;
        tri[i] + (apex - tri[i]) * params.relaxation
    });

    // Re-anchor on the input centroid so rounding in the apex sums cannot
    // drift the element.
    let moved_center = geom::centroid(&moved);
    let scale = if params.preserve_area {
        let (before, after) = (geom::area(tri), geom::area(&moved));
        if before > 0.0 && after > 0.0 {
            (before / after).sqrt()
        } else {
            1.0
        }
    } else {
        1.0
    };
    moved.map(|p| center + (p - moved_center) * scale)
}

/// `power`-fold composition of [`transform_element`]; power 0 is the identity.
pub fn transform_power(tri: &Triangle, power: u32, params: &TransformParams) -> Triangle {
    (0..power).fold(*tri, |t, _| transform_element(&t, params))
}
