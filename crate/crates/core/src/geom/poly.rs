use super::aabb::Aabb;
use super::plane::Plane;
use super::vec::Vec3;
use std::collections::HashMap;

/// Provenance of a polyhedron face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceTag {
    /// Face inherited from the initial bounding box (axis index 0..6).
    Bounds(u8),
    /// Face cut by the bisector against the given neighbor.
    Neighbor(usize),
}

/// Polygonal face, vertices counter-clockwise seen from outside.
#[derive(Clone, Debug)]
pub struct Face {
    pub vertices: Vec<u32>,
    pub tag: FaceTag,
}

/// Closed convex polyhedron represented by vertices and oriented faces.
#[derive(Clone, Debug)]
pub struct ConvexPolyhedron {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Face>,
}

impl ConvexPolyhedron {
    /// Axis-aligned box cell. Face tags are `Bounds(0..6)` in the order
    /// -x, +x, -y, +y, -z, +z.
    pub fn from_aabb(b: &Aabb) -> ConvexPolyhedron {
        let (lo, hi) = (b.min, b.max);
        let v = vec![
            Vec3::new(lo.x, lo.y, lo.z), // 0
            Vec3::new(hi.x, lo.y, lo.z), // 1
            Vec3::new(hi.x, hi.y, lo.z), // 2
            Vec3::new(lo.x, hi.y, lo.z), // 3
            Vec3::new(lo.x, lo.y, hi.z), // 4
            Vec3::new(hi.x, lo.y, hi.z), // 5
            Vec3::new(hi.x, hi.y, hi.z), // 6
            Vec3::new(lo.x, hi.y, hi.z), // 7
        ];
        let faces = vec![
            Face { vertices: vec![0, 4, 7, 3], tag: FaceTag::Bounds(0) }, // -x
            Face { vertices: vec![1, 2, 6, 5], tag: FaceTag::Bounds(1) }, // +x
            Face { vertices: vec![0, 1, 5, 4], tag: FaceTag::Bounds(2) }, // -y
            Face { vertices: vec![3, 7, 6, 2], tag: FaceTag::Bounds(3) }, // +y
            Face { vertices: vec![0, 3, 2, 1], tag: FaceTag::Bounds(4) }, // -z
            Face { vertices: vec![4, 5, 6, 7], tag: FaceTag::Bounds(5) }, // +z
        ];
        ConvexPolyhedron { vertices: v, faces }
    }

    /// Clips by the half-space `normal . x <= offset`, tagging the cut face.
    ///
    /// Returns `None` when the intersection is empty (or has no volume).
    /// Vertices within `eps_on` of the plane are treated as on-plane and kept
    /// unchanged, which makes clipping idempotent.
    pub fn clip(&self, plane: &Plane, tag: FaceTag, eps_on: f64) -> Option<ConvexPolyhedron> {
        let dist: Vec<f64> = self.vertices.iter().map(|&v| plane.signed_distance(v)).collect();
        let any_outside = dist.iter().any(|&d| d > eps_on);
        if !any_outside {
            return Some(self.clone());
        }
        let any_inside = dist.iter().any(|&d| d < -eps_on);
        if !any_inside {
            return None;
        }

        #[derive(Clone, Copy, PartialEq)]
        enum Side {
            In,
            On,
            Out,
        }
        let side: Vec<Side> = dist
            .iter()
            .map(|&d| {
                if d > eps_on {
                    Side::Out
                } else if d < -eps_on {
                    Side::In
                } else {
                    Side::On
                }
            })
            .collect();

        let mut out_vertices: Vec<Vec3> = Vec::new();
        // Old vertex index -> new index (kept vertices).
        let mut kept: HashMap<u32, u32> = HashMap::new();
        // Canonical cut-edge key -> new vertex index, so adjacent faces share
        // the interpolated vertex exactly.
        let mut cut: HashMap<(u32, u32), u32> = HashMap::new();
        let mut out_faces: Vec<Face> = Vec::new();
        // Chords of the cap polygon: directed (enter, exit) pairs per face.
        let mut chords: Vec<(u32, u32)> = Vec::new();

        let keep_vertex = |i: u32, verts: &mut Vec<Vec3>, kept: &mut HashMap<u32, u32>| -> u32 {
            *kept.entry(i).or_insert_with(|| {
                verts.push(self.vertices[i as usize]);
                (verts.len() - 1) as u32
            })
        };
        let cut_vertex = |a: u32, b: u32, verts: &mut Vec<Vec3>, cut: &mut HashMap<(u32, u32), u32>| -> u32 {
            let key = if a < b { (a, b) } else { (b, a) };
            *cut.entry(key).or_insert_with(|| {
                let (da, db) = (dist[key.0 as usize], dist[key.1 as usize]);
                let t = da / (da - db);
                let p = self.vertices[key.0 as usize]
                    + (self.vertices[key.1 as usize] - self.vertices[key.0 as usize]) * t;
                verts.push(p);
                (verts.len() - 1) as u32
            })
        };

        for face in &self.faces {
            let n = face.vertices.len();
            let mut loop_out: Vec<u32> = Vec::with_capacity(n + 2);
            // Marks which emitted vertices lie on the clip plane.
            let mut on_plane: Vec<bool> = Vec::with_capacity(n + 2);
            for k in 0..n {
                let i = face.vertices[k];
                let j = face.vertices[(k + 1) % n];
                let (si, sj) = (side[i as usize], side[j as usize]);
                match si {
                    Side::In => {
                        loop_out.push(keep_vertex(i, &mut out_vertices, &mut kept));
                        on_plane.push(false);
                    }
                    Side::On => {
                        loop_out.push(keep_vertex(i, &mut out_vertices, &mut kept));
                        on_plane.push(true);
                    }
                    Side::Out => {}
                }
                let crossing = matches!((si, sj), (Side::In, Side::Out) | (Side::Out, Side::In));
                if crossing {
                    loop_out.push(cut_vertex(i, j, &mut out_vertices, &mut cut));
                    on_plane.push(true);
                }
            }
            if loop_out.len() < 3 {
                continue;
            }
            // A face entirely on the plane would duplicate the cap; convexity
            // means its region was caught by the early-outs above.
            let m = loop_out.len();
            let mut chord: Option<(u32, u32)> = None;
            for k in 0..m {
                let k2 = (k + 1) % m;
                if on_plane[k] && on_plane[k2] && loop_out[k] != loop_out[k2] {
                    // Consecutive on-plane vertices bound the face's cut edge.
                    chord = Some((loop_out[k], loop_out[k2]));
                }
            }
            if let Some(c) = chord {
                chords.push(c);
            }
            out_faces.push(Face {
                vertices: loop_out,
                tag: face.tag,
            });
        }

        if out_faces.is_empty() {
            return None;
        }

        // Assemble the cap polygon by chaining chords. Each chord is directed
        // along its face's orientation; the cap uses the reversed direction so
        // that it winds counter-clockwise seen from outside (plane normal).
        if chords.len() >= 3 {
            let mut next: HashMap<u32, u32> = HashMap::with_capacity(chords.len());
            for &(enter, exit) in &chords {
                next.insert(exit, enter);
            }
            let start = chords[0].1;
            let mut cap = vec![start];
            let mut cur = start;
            for _ in 0..chords.len() {
                match next.get(&cur) {
                    Some(&nxt) if nxt != start => {
                        cap.push(nxt);
                        cur = nxt;
                    }
                    _ => break,
                }
            }
            if cap.len() >= 3 {
                // Orient the cap outward (along the clip plane normal).
                let normal = polygon_normal(&cap, &out_vertices);
                if normal.dot(plane.normal()) < 0.0 {
                    cap.reverse();
                }
                out_faces.push(Face {
                    vertices: cap,
                    tag,
                });
            }
        }

        Some(ConvexPolyhedron {
            vertices: out_vertices,
            faces: out_faces,
        })
    }

    /// Best-fit plane of a face (Newell normal through the centroid).
    pub fn face_plane(&self, face: &Face) -> Option<Plane> {
        let normal = polygon_normal(&face.vertices, &self.vertices);
        let centroid = face
            .vertices
            .iter()
            .fold(Vec3::ZERO, |acc, &i| acc + self.vertices[i as usize])
            / face.vertices.len() as f64;
        Plane::from_point_normal(centroid, normal)
    }

    /// Signed volume via fan decomposition against the origin.
    pub fn volume(&self) -> f64 {
        let mut six_v = 0.0;
        for face in &self.faces {
            let vs = &face.vertices;
            let a = self.vertices[vs[0] as usize];
            for k in 1..vs.len() - 1 {
                let b = self.vertices[vs[k] as usize];
                let c = self.vertices[vs[k + 1] as usize];
                six_v += a.dot(b.cross(c));
            }
        }
        six_v / 6.0
    }

    pub fn centroid(&self) -> Vec3 {
        // Volume-weighted centroid from the tetra fan against the origin.
        let mut six_v = 0.0;
        let mut acc = Vec3::ZERO;
        for face in &self.faces {
            let vs = &face.vertices;
            let a = self.vertices[vs[0] as usize];
            for k in 1..vs.len() - 1 {
                let b = self.vertices[vs[k] as usize];
                let c = self.vertices[vs[k + 1] as usize];
                let w = a.dot(b.cross(c));
                six_v += w;
                acc += (a + b + c) * (w / 4.0);
            }
        }
        if six_v.abs() > 0.0 {
            acc / six_v
        } else {
            self.vertices.iter().fold(Vec3::ZERO, |s, &v| s + v) / self.vertices.len().max(1) as f64
        }
    }

    /// Largest violation of convexity: max over vertices of the signed
    /// distance to any face plane (a convex cell stays <= 0 up to rounding).
    pub fn convexity_violation(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for face in &self.faces {
            if let Some(plane) = self.face_plane(face) {
                for &v in &self.vertices {
                    worst = worst.max(plane.signed_distance(v));
                }
            }
        }
        if worst.is_finite() {
            worst
        } else {
            0.0
        }
    }

    /// Checks closure: every edge shared by exactly two faces, in opposite
    /// directions.
    pub fn is_closed(&self) -> bool {
        let mut count: HashMap<(u32, u32), i32> = HashMap::new();
        for face in &self.faces {
            let n = face.vertices.len();
            for k in 0..n {
                let a = face.vertices[k];
                let b = face.vertices[(k + 1) % n];
                if a == b {
                    return false;
                }
                let key = if a < b { (a, b) } else { (b, a) };
                *count.entry(key).or_insert(0) += if a < b { 1 } else { -1 };
            }
        }
        count.values().all(|&c| c == 0) && !count.is_empty()
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter().copied())
    }
}

/// Newell normal of a polygon (not normalized; magnitude is twice the area).
pub(crate) fn polygon_normal(indices: &[u32], vertices: &[Vec3]) -> Vec3 {
    let mut n = Vec3::ZERO;
    let m = indices.len();
    for k in 0..m {
        let a = vertices[indices[k] as usize];
        let b = vertices[indices[(k + 1) % m] as usize];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cube() -> ConvexPolyhedron {
        ConvexPolyhedron::from_aabb(&Aabb {
            min: Vec3::ZERO,
            max: Vec3::splat(1.0),
        })
    }

    const EPS_ON: f64 = 1e-12;

    #[test]
    fn cube_is_closed_with_unit_volume() {
        let c = unit_cube();
        assert!(c.is_closed());
        assert!((c.volume() - 1.0).abs() < 1e-12);
        assert!(c.convexity_violation() < 1e-12);
        assert!((c.centroid() - Vec3::splat(0.5)).norm() < 1e-12);
    }

    #[test]
    fn clip_cube_at_half() {
        let c = unit_cube();
        let plane = Plane::new(Vec3::new(1.0, 0.0, 0.0), 0.5).unwrap();
        let clipped = c.clip(&plane, FaceTag::Neighbor(7), EPS_ON).unwrap();
        assert_eq!(clipped.vertices.len(), 8);
        assert!(clipped.is_closed());
        assert!((clipped.volume() - 0.5).abs() < 1e-12);
        // Oracle: the expected vertex set is the cube's edges cut at x = 0.5.
        for v in &clipped.vertices {
            assert!(v.x <= 0.5 + 1e-12);
        }
        assert_eq!(
            clipped.faces.iter().filter(|f| f.tag == FaceTag::Neighbor(7)).count(),
            1
        );
    }

    #[test]
    fn clip_outside_plane_is_identity() {
        let c = unit_cube();
        let plane = Plane::new(Vec3::new(1.0, 0.0, 0.0), 2.0).unwrap();
        let clipped = c.clip(&plane, FaceTag::Neighbor(0), EPS_ON).unwrap();
        assert_eq!(clipped.vertices.len(), 8);
        assert_eq!(clipped.faces.len(), 6);
    }

    #[test]
    fn clip_excluding_cell_is_empty() {
        let c = unit_cube();
        let plane = Plane::new(Vec3::new(1.0, 0.0, 0.0), -1.0).unwrap();
        assert!(c.clip(&plane, FaceTag::Neighbor(0), EPS_ON).is_none());
    }

    #[test]
    fn clip_is_idempotent() {
        let c = unit_cube();
        let plane = Plane::new(Vec3::new(1.0, 1.0, 0.3).normalized().unwrap(), 0.7).unwrap();
        let once = c.clip(&plane, FaceTag::Neighbor(1), EPS_ON).unwrap();
        let twice = once.clip(&plane, FaceTag::Neighbor(1), EPS_ON).unwrap();
        assert_eq!(once.vertices.len(), twice.vertices.len());
        for (a, b) in once.vertices.iter().zip(twice.vertices.iter()) {
            assert!(a.distance(*b) <= 1e-12);
        }
    }

    #[test]
    fn diagonal_clip_stays_closed() {
        let c = unit_cube();
        let plane =
            Plane::from_point_normal(Vec3::splat(0.5), Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let clipped = c.clip(&plane, FaceTag::Neighbor(2), EPS_ON).unwrap();
        assert!(clipped.is_closed());
        assert!(clipped.convexity_violation() < 1e-9);
        // Volume of cube minus the corner tetra cut at the far corner.
        let vol = clipped.volume();
        assert!(vol < 1.0 && vol > 0.5);
    }
}
