#![allow(dead_code)]

use gamesmooth::geom::Point;
use gamesmooth::mesh::Mesh;

/// A flat triangle `(0,0), (1,0), (0.5, 0.25)` (edge ratio ~0.56) with an
/// outward equilateral triangle on each of its edges, plus a small
/// equilateral hanging off each outer apex. The hanging triangles pin the
/// apexes as rim vertices of the bad triangle's neighborhood.
pub fn one_bad_triangle() -> Mesh {
    let a = [0.0, 0.0];
    let b = [1.0, 0.0];
    let c = [0.5, 0.25];
    let h = 3f64.sqrt() / 2.0;
    let outward = |p: [f64; 2], q: [f64; 2]| {
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        [(p[0] + q[0]) / 2.0 + h * dy, (p[1] + q[1]) / 2.0 - h * dx]
    };
    let mut pts = vec![a, b, c, outward(a, b), outward(b, c), outward(c, a)];
    let mut tris = vec![[0, 1, 2], [0, 3, 1], [1, 4, 2], [2, 5, 0]];
    let center = [0.5, 0.25 / 3.0];
    for apex in 3..6 {
        let p = pts[apex];
        let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
        let len = (dx * dx + dy * dy).sqrt();
        let dir = [dx / len, dy / len];
        let side = 0.5;
        let rot = |angle: f64| {
            let (s, c) = f64::sin_cos(angle);
            [
                p[0] + side * (c * dir[0] - s * dir[1]),
                p[1] + side * (s * dir[0] + c * dir[1]),
            ]
        };
        let first = pts.len();
        pts.push(rot(-std::f64::consts::FRAC_PI_6));
        pts.push(rot(std::f64::consts::FRAC_PI_6));
        tris.push([apex, first, first + 1]);
    }
    Mesh::from_2d(&pts, tris).unwrap()
}

pub fn max_abs_diff(a: &[Point], b: &[Point]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

/// Independent brute-force evaluation of the smoothing game, written against
/// the raw element list and `transform_power` only.
pub mod oracle {
    use gamesmooth::geom::Point;
    use gamesmooth::mesh::Mesh;
    use gamesmooth::transform::{transform_power, TransformParams};

    pub const TOL: f64 = 1e-12;

    fn dist(a: &Point, b: &Point) -> f64 {
        let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    fn quality(p: [Point; 3]) -> f64 {
        let d = [dist(&p[0], &p[1]), dist(&p[1], &p[2]), dist(&p[2], &p[0])];
        let max = d.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            0.0
        } else {
            d.iter().cloned().fold(f64::INFINITY, f64::min) / max
        }
    }

    pub struct Oracle {
        tris: Vec<[usize; 3]>,
        base: Vec<Point>,
        pinned: Vec<bool>,
        // proposals[e][power][corner]
        proposals: Vec<Vec<[Point; 3]>>,
        pub k: u32,
    }

    impl Oracle {
        pub fn new(mesh: &Mesh, k: u32, params: &TransformParams, fix_boundary: bool) -> Self {
            let tris: Vec<[usize; 3]> = mesh.elements().iter().map(|e| e.indices()).collect();
            let base = mesh.positions();
            let pinned = mesh
                .vertices()
                .iter()
                .map(|v| fix_boundary && v.boundary)
                .collect();
            let proposals = tris
                .iter()
                .map(|t| {
                    let tri = [base[t[0]], base[t[1]], base[t[2]]];
                    (0..=k).map(|j| transform_power(&tri, j, params)).collect()
                })
                .collect();
            Oracle {
                tris,
                base,
                pinned,
                proposals,
                k,
            }
        }

        pub fn coords(&self, profile: &[u32]) -> Vec<Point> {
            let mut out = self.base.clone();
            for (v, slot) in out.iter_mut().enumerate() {
                if self.pinned[v] {
                    continue;
                }
                let mut sum = [0.0; 3];
                let mut count = 0;
                for (e, t) in self.tris.iter().enumerate() {
                    for (corner, &id) in t.iter().enumerate() {
                        if id == v {
                            let p = self.proposals[e][profile[e] as usize][corner];
                            sum[0] += p.x;
                            sum[1] += p.y;
                            sum[2] += p.z;
                            count += 1;
                        }
                    }
                }
                if count > 0 {
                    let c = count as f64;
                    *slot = Point::new(sum[0] / c, sum[1] / c, sum[2] / c);
                }
            }
            out
        }

        pub fn utilities(&self, profile: &[u32]) -> Vec<f64> {
            let c = self.coords(profile);
            self.tris
                .iter()
                .map(|t| quality([c[t[0]], c[t[1]], c[t[2]]]))
                .collect()
        }

        pub fn profiles(&self) -> Vec<Vec<u32>> {
            let n = self.tris.len();
            let mut all = vec![vec![]];
            for _ in 0..n {
                all = all
                    .into_iter()
                    .flat_map(|prefix: Vec<u32>| {
                        (0..=self.k).map(move |p| {
                            let mut next = prefix.clone();
                            next.push(p);
                            next
                        })
                    })
                    .collect();
            }
            all
        }

        pub fn is_equilibrium(&self, profile: &[u32]) -> bool {
            let here = self.utilities(profile);
            for i in 0..profile.len() {
                for p in 0..=self.k {
                    if p == profile[i] {
                        continue;
                    }
                    let mut dev = profile.to_vec();
                    dev[i] = p;
                    if self.utilities(&dev)[i] > here[i] + TOL {
                        return false;
                    }
                }
            }
            true
        }

        /// All equilibria in lexicographic order.
        pub fn equilibria(&self) -> Vec<Vec<u32>> {
            self.profiles()
                .into_iter()
                .filter(|p| self.is_equilibrium(p))
                .collect()
        }

        pub fn mean(&self, profile: &[u32]) -> f64 {
            let u = self.utilities(profile);
            u.iter().sum::<f64>() / u.len() as f64
        }
    }
}
