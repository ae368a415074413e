//! Triangle meshes with fixed combinatorics.
//!
//! A [`Mesh`] owns its vertex positions, the element index triples, the
//! vertex-to-element incidence lists and the boundary flags. It is immutable
//! once built; smoothing produces new coordinate lists which can be paired
//! with the same combinatorics via [`Mesh::with_positions`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::geom::{self, Point, Triangle};

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("mesh has no elements")]
    Empty,
    #[error("element {element} references vertex {vertex}, but only {count} vertices exist")]
    IndexOutOfRange {
        element: usize,
        vertex: usize,
        count: usize,
    },
    #[error("element {element} repeats vertex {vertex}")]
    DuplicateVertex { element: usize, vertex: usize },
    #[error("vertex {0} is not referenced by any element")]
    Unreferenced(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("coordinate list has {got} entries, mesh has {expected} vertices")]
    CoordinateCount { expected: usize, got: usize },
}

/// Dense vertex index, stable for the lifetime of a mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub position: Point,
    pub boundary: bool,
}

/// An oriented triangle. Orientation is given by the vertex order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    vertex_ids: [VertexId; 3],
}

impl Element {
    pub fn vertex_ids(&self) -> [VertexId; 3] {
        self.vertex_ids
    }

    pub fn indices(&self) -> [usize; 3] {
        self.vertex_ids.map(VertexId::index)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertex_ids.contains(&v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Vertex>,
    elements: Vec<Element>,
    vertex_to_elements: Vec<Vec<usize>>,
}

impl Mesh {
    /// Builds a mesh from positions and index triples.
    ///
    /// Triangles lying in an xy-parallel plane with negative signed area are
    /// reoriented by swapping their last two vertices. Boundary vertices are
    /// those incident to an edge used by exactly one element.
    pub fn build(positions: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        for (i, p) in positions.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(MeshError::NonFinite(i));
            }
        }

        let count = positions.len();
        let mut elements = Vec::with_capacity(triangles.len());
        for (e, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= count {
                    return Err(MeshError::IndexOutOfRange {
                        element: e,
                        vertex: v,
                        count,
                    });
                }
            }
            if tri[0] == tri[1] || tri[0] == tri[2] {
                return Err(MeshError::DuplicateVertex {
                    element: e,
                    vertex: tri[0],
                });
            }
            if tri[1] == tri[2] {
                return Err(MeshError::DuplicateVertex {
                    element: e,
                    vertex: tri[1],
                });
            }
            let pts = [positions[tri[0]], positions[tri[1]], positions[tri[2]]];
            let ids = if geom::is_xy_parallel(&pts) && geom::signed_area(&pts) < 0.0 {
                [tri[0], tri[2], tri[1]]
            } else {
                *tri
            };
            elements.push(Element {
                vertex_ids: ids.map(VertexId),
            });
        }

        let mut vertex_to_elements = vec![Vec::new(); count];
        for (e, el) in elements.iter().enumerate() {
            for v in el.indices() {
                vertex_to_elements[v].push(e);
            }
        }
        if let Some(v) = vertex_to_elements.iter().position(Vec::is_empty) {
            return Err(MeshError::Unreferenced(v));
        }

        let mut edge_use: HashMap<(usize, usize), u32> = HashMap::new();
        for el in &elements {
            let [a, b, c] = el.indices();
            for (x, y) in [(a, b), (b, c), (c, a)] {
                *edge_use.entry((x.min(y), x.max(y))).or_default() += 1;
            }
        }
        let mut boundary = vec![false; count];
        for (&(x, y), &n) in &edge_use {
            if n == 1 {
                boundary[x] = true;
                boundary[y] = true;
            }
        }

        let vertices = positions
            .into_iter()
            .zip(boundary)
            .map(|(position, boundary)| Vertex { position, boundary })
            .collect();

        Ok(Mesh {
            vertices,
            elements,
            vertex_to_elements,
        })
    }

    /// Convenience constructor for planar input; stores `z = 0`.
    pub fn from_2d(points: &[[f64; 2]], triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let positions = points.iter().map(|p| Point::new(p[0], p[1], 0.0)).collect();
        Self::build(positions, triangles)
    }

    /// Same combinatorics and boundary flags, new positions.
    pub fn with_positions(&self, coords: &[Point]) -> Result<Self, MeshError> {
        self.check_coords(coords)?;
        let mut mesh = self.clone();
        for (v, p) in mesh.vertices.iter_mut().zip(coords) {
            v.position = *p;
        }
        Ok(mesh)
    }

    pub fn check_coords(&self, coords: &[Point]) -> Result<(), MeshError> {
        if coords.len() != self.vertices.len() {
            return Err(MeshError::CoordinateCount {
                expected: self.vertices.len(),
                got: coords.len(),
            });
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    /// Current vertex positions as a coordinate list.
    pub fn positions(&self) -> Vec<Point> {
        self.vertices.iter().map(|v| v.position).collect()
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.vertices[v.0].boundary
    }

    /// Indices of the elements containing `v`, ascending.
    pub fn elements_of(&self, v: VertexId) -> &[usize] {
        &self.vertex_to_elements[v.0]
    }

    /// The element's vertex positions taken from `coords`.
    pub fn triangle(&self, element: usize, coords: &[Point]) -> Triangle {
        self.elements[element].indices().map(|v| coords[v])
    }

    /// The element together with every element sharing at least one vertex
    /// with it, ascending.
    pub fn one_ring(&self, element: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self.elements[element]
            .indices()
            .into_iter()
            .flat_map(|v| self.vertex_to_elements[v].iter().copied())
            .collect();
        set.into_iter().collect()
    }

    /// True when every vertex has `z == 0`.
    pub fn is_planar(&self) -> bool {
        self.vertices.iter().all(|v| v.position.z == 0.0)
    }
}
