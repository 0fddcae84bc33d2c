//! Bounding-volume hierarchy over triangles: point-to-mesh distance and
//! inside/outside parity tests.

use crate::geom::{distance_point_triangle, Aabb, Point3, Vec3};

#[derive(Clone, Debug)]
struct Node {
    bbox: Aabb,
    /// Leaf: range into `order`; internal: children indices.
    payload: NodePayload,
}

#[derive(Clone, Debug)]
enum NodePayload {
    Leaf { start: u32, end: u32 },
    Split { left: u32, right: u32 },
}

/// BVH over a triangle soup.
#[derive(Clone, Debug)]
pub struct TriAccel {
    tris: Vec<[Point3; 3]>,
    order: Vec<u32>,
    nodes: Vec<Node>,
    cumulative_area: Vec<f64>,
}

const LEAF_SIZE: usize = 8;

impl TriAccel {
    pub fn new(tris: Vec<[Point3; 3]>) -> TriAccel {
        let n = tris.len();
        let mut accel = TriAccel {
            order: (0..n as u32).collect(),
            nodes: Vec::with_capacity(2 * n.max(1)),
            cumulative_area: Vec::with_capacity(n),
            tris,
        };
        let mut acc = 0.0;
        for t in &accel.tris {
            acc += 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm();
            accel.cumulative_area.push(acc);
        }
        if n > 0 {
            accel.build(0, n);
        }
        accel
    }

    pub fn from_mesh(mesh: &super::InputComplex) -> TriAccel {
        TriAccel::new((0..mesh.triangles.len() as u32).map(|t| mesh.tri_points(t)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.tris.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.cumulative_area.last().copied().unwrap_or(0.0)
    }

    fn build(&mut self, start: usize, end: usize) -> u32 {
        let mut bbox = Aabb::empty();
        for &t in &self.order[start..end] {
            for p in self.tris[t as usize] {
                bbox.insert(p);
            }
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            bbox,
            payload: NodePayload::Leaf {
                start: start as u32,
                end: end as u32,
            },
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        // Median split on the widest centroid axis.
        let centroid = |t: u32| {
            let tri = self.tris[t as usize];
            (tri[0] + tri[1] + tri[2]) / 3.0
        };
        let mut cb = Aabb::empty();
        for &t in &self.order[start..end] {
            cb.insert(centroid(t));
        }
        let extent = cb.max - cb.min;
        let axis = if extent.x >= extent.y && extent.x >= extent.z {
            0
        } else if extent.y >= extent.z {
            1
        } else {
            2
        };
        let mid = (start + end) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroid(a)
                .component(axis)
                .partial_cmp(&centroid(b).component(axis))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id as usize].payload = NodePayload::Split { left, right };
        id
    }

    /// Distance to the closest point on the mesh (with the point itself).
    pub fn distance(&self, p: Point3) -> Option<(f64, Point3)> {
        if self.tris.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, Point3::ZERO);
        self.distance_rec(0, p, &mut best);
        Some(best)
    }

    fn distance_rec(&self, node: u32, p: Point3, best: &mut (f64, Point3)) {
        let n = &self.nodes[node as usize];
        if n.bbox.distance_squared(p) >= best.0 * best.0 {
            return;
        }
        match n.payload {
            NodePayload::Leaf { start, end } => {
                for &t in &self.order[start as usize..end as usize] {
                    let tri = self.tris[t as usize];
                    let (d, q) = distance_point_triangle(p, tri[0], tri[1], tri[2]);
                    if d < best.0 {
                        *best = (d, q);
                    }
                }
            }
            NodePayload::Split { left, right } => {
                let dl = self.nodes[left as usize].bbox.distance_squared(p);
                let dr = self.nodes[right as usize].bbox.distance_squared(p);
                if dl <= dr {
                    self.distance_rec(left, p, best);
                    self.distance_rec(right, p, best);
                } else {
                    self.distance_rec(right, p, best);
                    self.distance_rec(left, p, best);
                }
            }
        }
    }

    /// Parity-based inside test for a closed mesh. Grazing hits retry along
    /// a different direction.
    pub fn is_inside(&self, p: Point3) -> bool {
        const DIRS: [[f64; 3]; 5] = [
            [0.576123, 0.712342, 0.400912],
            [-0.301911, 0.893214, -0.333102],
            [0.811209, -0.214523, 0.544216],
            [-0.401293, -0.602123, 0.690214],
            [0.102931, 0.301298, -0.948021],
        ];
        for d in DIRS {
            let dir = Vec3::new(d[0], d[1], d[2]).normalized().unwrap();
            match self.count_crossings(p, dir) {
                Some(count) => return count % 2 == 1,
                None => continue,
            }
        }
        false
    }

    /// Number of ray/mesh crossings, or None when a hit was too close to an
    /// edge to be trusted.
    fn count_crossings(&self, origin: Point3, dir: Vec3) -> Option<usize> {
        let mut count = 0usize;
        let mut stack = vec![0u32];
        while let Some(node) = stack.pop() {
            let n = &self.nodes[node as usize];
            if !ray_hits_aabb(origin, dir, &n.bbox) {
                continue;
            }
            match n.payload {
                NodePayload::Leaf { start, end } => {
                    for &t in &self.order[start as usize..end as usize] {
                        match ray_triangle(origin, dir, self.tris[t as usize]) {
                            RayHit::Miss => {}
                            RayHit::Hit => count += 1,
                            RayHit::Grazing => return None,
                        }
                    }
                }
                NodePayload::Split { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        Some(count)
    }

    /// Uniform-by-area point sample; `u` picks the facet, `(v, w)` the
    /// barycentric position.
    pub fn sample_by_area(&self, u: f64, v: f64, w: f64) -> Point3 {
        let total = self.total_area();
        let target = u * total;
        let idx = self
            .cumulative_area
            .partition_point(|&a| a < target)
            .min(self.tris.len() - 1);
        let t = self.tris[idx];
        sample_triangle(t, v, w)
    }
}

/// Uniform barycentric sampling of a triangle.
pub fn sample_triangle(t: [Point3; 3], u: f64, v: f64) -> Point3 {
    let su = u.sqrt();
    t[0] * (1.0 - su) + t[1] * (su * (1.0 - v)) + t[2] * (su * v)
}

enum RayHit {
    Miss,
    Hit,
    Grazing,
}

fn ray_triangle(origin: Point3, dir: Vec3, tri: [Point3; 3]) -> RayHit {
    // Moller-Trumbore with a grazing band around edges and the plane.
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let pvec = dir.cross(e2);
    let det = e1.dot(pvec);
    let eps = 1e-12 * e1.norm().max(e2.norm());
    if det.abs() < eps {
        // Parallel or degenerate; check whether the ray passes near the
        // triangle plane slab.
        return RayHit::Miss;
    }
    let inv = 1.0 / det;
    let tvec = origin - tri[0];
    let u = tvec.dot(pvec) * inv;
    let qvec = tvec.cross(e1);
    let v = dir.dot(qvec) * inv;
    let t = e2.dot(qvec) * inv;
    let band = 1e-10;
    if t <= band {
        if t > -band && u > -band && v > -band && u + v < 1.0 + band {
            return RayHit::Grazing; // origin on the surface
        }
        return RayHit::Miss;
    }
    if u < -band || v < -band || u + v > 1.0 + band {
        return RayHit::Miss;
    }
    if u < band || v < band || u + v > 1.0 - band {
        return RayHit::Grazing;
    }
    RayHit::Hit
}

fn ray_hits_aabb(origin: Point3, dir: Vec3, b: &Aabb) -> bool {
    let mut tmin = 0.0f64;
    let mut tmax = f64::INFINITY;
    for axis in 0..3 {
        let o = origin.component(axis);
        let d = dir.component(axis);
        let lo = b.min.component(axis);
        let hi = b.max.component(axis);
        if d.abs() < 1e-300 {
            if o < lo || o > hi {
                return false;
            }
        } else {
            let inv = 1.0 / d;
            let (t0, t1) = if inv >= 0.0 {
                ((lo - o) * inv, (hi - o) * inv)
            } else {
                ((hi - o) * inv, (lo - o) * inv)
            };
            tmin = tmin.max(t0);
            tmax = tmax.min(t1);
            if tmin > tmax {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    #[test]
    fn distance_to_icosphere() {
        let sphere = shapes::icosphere(3, 1.0);
        let accel = TriAccel::from_mesh(&sphere);
        let (d, _) = accel.distance(Point3::new(2.0, 0.0, 0.0)).unwrap();
        assert!((d - 1.0).abs() < 5e-3, "got {d}");
        let (d, _) = accel.distance(Point3::ZERO).unwrap();
        assert!((d - 1.0).abs() < 5e-3, "got {d}");
    }

    #[test]
    fn parity_inside_cube() {
        let cube = shapes::unit_cube();
        let accel = TriAccel::from_mesh(&cube);
        assert!(accel.is_inside(Point3::splat(0.5)));
        assert!(accel.is_inside(Point3::new(0.9, 0.9, 0.9)));
        assert!(!accel.is_inside(Point3::new(1.5, 0.5, 0.5)));
        assert!(!accel.is_inside(Point3::new(-0.1, 0.2, 0.3)));
    }

    #[test]
    fn parity_inside_torus() {
        let torus = shapes::torus(48, 24, 1.0, 0.4);
        let accel = TriAccel::from_mesh(&torus);
        assert!(accel.is_inside(Point3::new(1.0, 0.0, 0.0)));
        assert!(!accel.is_inside(Point3::ZERO));
        assert!(!accel.is_inside(Point3::new(0.0, 0.0, 1.0)));
    }
}
