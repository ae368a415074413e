//! Small triangle helpers shared by the quality metrics and the transform.

use nalgebra::{Point3, Vector3};

/// A vertex position. Planar data is stored with `z = 0`.
pub type Point = Point3<f64>;

/// Three vertex positions in element order.
pub type Triangle = [Point; 3];

/// True when all three vertices share the same `z`, i.e. the triangle lies in
/// a plane parallel to the global xy-plane and its orientation is measured
/// against `+z`.
pub fn is_xy_parallel(tri: &Triangle) -> bool {
    tri[0].z == tri[1].z && tri[1].z == tri[2].z
}

/// Unnormalized normal `(p1 - p0) x (p2 - p0)`; its length is twice the area.
pub fn normal(tri: &Triangle) -> Vector3<f64> {
    (tri[1] - tri[0]).cross(&(tri[2] - tri[0]))
}

pub fn area(tri: &Triangle) -> f64 {
    0.5 * normal(tri).norm()
}

/// Area signed by orientation. For xy-parallel triangles the sign follows
/// `+z`; for general 3D triangles there is no global reference and the
/// unsigned area is returned.
pub fn signed_area(tri: &Triangle) -> f64 {
    let n = normal(tri);
    if is_xy_parallel(tri) {
        0.5 * n.z
    } else {
        0.5 * n.norm()
    }
}

pub fn centroid(tri: &Triangle) -> Point {
    Point::from((tri[0].coords + tri[1].coords + tri[2].coords) / 3.0)
}

/// Pairwise distances `|p0p1|, |p1p2|, |p2p0|`.
pub fn edge_lengths(tri: &Triangle) -> [f64; 3] {
    [
        (tri[1] - tri[0]).norm(),
        (tri[2] - tri[1]).norm(),
        (tri[0] - tri[2]).norm(),
    ]
}

pub fn diameter(tri: &Triangle) -> f64 {
    edge_lengths(tri).into_iter().fold(0.0, f64::max)
}
