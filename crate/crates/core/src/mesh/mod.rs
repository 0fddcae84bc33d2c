//! Input triangle complex: loading, adjacency, feature strata, smoothing.

mod accel;
mod features;
mod io;
pub mod shapes;
mod subdivide;

pub use accel::{sample_triangle, TriAccel};
pub use features::detect_features;
pub use io::{load_mesh, write_obj, write_off, MeshFormat};
pub use subdivide::{min_intra_patch_dihedral, smooth_patches};

use crate::error::Error;
use crate::geom::{Aabb, Point3, Vec3};
use std::collections::HashMap;

/// Undirected mesh edge with its incident facets.
#[derive(Clone, Debug)]
pub struct MeshEdge {
    pub a: u32,
    pub b: u32,
    pub tris: Vec<u32>,
}

/// Validated input triangle complex.
#[derive(Clone, Debug)]
pub struct InputComplex {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[u32; 3]>,
    pub edges: Vec<MeshEdge>,
    /// Per-triangle edge ids, matching the vertex order (edge k joins
    /// corners k and k+1).
    pub tri_edges: Vec<[u32; 3]>,
    /// Per-triangle unit normals, consistently oriented where possible.
    pub normals: Vec<Vec3>,
    pub areas: Vec<f64>,
    pub bbox: Aabb,
    /// Bounding-box diagonal; all relative tolerances hang off this.
    pub scale: f64,
}

impl InputComplex {
    /// Builds adjacency and validates the complex. With `require_watertight`
    /// every edge must have exactly two incident facets; non-manifold edges
    /// (three or more facets) are always admitted since they are features,
    /// not defects.
    pub fn build(
        vertices: Vec<Point3>,
        triangles: Vec<[u32; 3]>,
        require_watertight: bool,
    ) -> Result<Self, Error> {
        if triangles.is_empty() && vertices.is_empty() {
            return Err(Error::DegenerateInput("empty mesh".into()));
        }
        for p in &vertices {
            if !p.is_finite() {
                return Err(Error::DegenerateInput("non-finite vertex coordinate".into()));
            }
        }
        let nv = vertices.len() as u32;
        for t in &triangles {
            if t.iter().any(|&i| i >= nv) {
                return Err(Error::DegenerateInput("triangle index out of range".into()));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::DegenerateInput("degenerate triangle (repeated vertex)".into()));
            }
        }

        let bbox = Aabb::from_points(vertices.iter().copied());
        let scale = bbox.diagonal();
        if !(scale > 0.0) {
            return Err(Error::DegenerateInput("mesh has zero extent".into()));
        }

        let mut normals = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        for t in &triangles {
            let (a, b, c) = (
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
            );
            let n = (b - a).cross(c - a);
            let area = 0.5 * n.norm();
            if area < 1e-14 * scale * scale {
                return Err(Error::DegenerateInput(format!(
                    "zero-area facet (area {area:.3e})"
                )));
            }
            areas.push(area);
            normals.push(n / (2.0 * area));
        }

        let mut edge_ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut tri_edges = vec![[0u32; 3]; triangles.len()];
        for (ti, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                let a = t[k];
                let b = t[(k + 1) % 3];
                let key = if a < b { (a, b) } else { (b, a) };
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push(MeshEdge {
                        a: key.0,
                        b: key.1,
                        tris: Vec::new(),
                    });
                    (edges.len() - 1) as u32
                });
                edges[id as usize].tris.push(ti as u32);
                tri_edges[ti][k] = id;
            }
        }

        if require_watertight {
            for e in &edges {
                if e.tris.len() == 1 {
                    return Err(Error::NotWatertight(format!(
                        "edge ({}, {}) has a single incident facet",
                        e.a, e.b
                    )));
                }
            }
        }

        let mut complex = InputComplex {
            vertices,
            triangles,
            edges,
            tri_edges,
            normals,
            areas,
            bbox,
            scale,
        };
        complex.orient_consistently();
        Ok(complex)
    }

    /// Floods facet orientation across manifold edges so normals agree within
    /// each manifold piece, then flips closed components to point outward.
    fn orient_consistently(&mut self) {
        let nt = self.triangles.len();
        let mut visited = vec![false; nt];
        let mut flip = vec![false; nt];
        let mut components: Vec<Vec<u32>> = Vec::new();
        for start in 0..nt {
            if visited[start] {
                continue;
            }
            let mut comp = vec![start as u32];
            visited[start] = true;
            let mut stack = vec![start as u32];
            while let Some(ti) = stack.pop() {
                for &ei in &self.tri_edges[ti as usize] {
                    let e = &self.edges[ei as usize];
                    if e.tris.len() != 2 {
                        continue;
                    }
                    let other = if e.tris[0] == ti { e.tris[1] } else { e.tris[0] };
                    if visited[other as usize] {
                        continue;
                    }
                    // Consistent orientation: the shared edge runs in
                    // opposite directions in the two facets.
                    let same_dir = edge_direction(&self.triangles[ti as usize], e.a, e.b)
                        == edge_direction(&self.triangles[other as usize], e.a, e.b);
                    flip[other as usize] = flip[ti as usize] ^ same_dir;
                    visited[other as usize] = true;
                    comp.push(other);
                    stack.push(other);
                }
            }
            components.push(comp);
        }
        for ti in 0..nt {
            if flip[ti] {
                // [v0,v1,v2] -> [v0,v2,v1] maps edge slots (0,1,2) -> (2,1,0).
                self.triangles[ti].swap(1, 2);
                self.normals[ti] = -self.normals[ti];
                self.tri_edges[ti].swap(0, 2);
            }
        }
        // Outward orientation per closed component via signed volume.
        for comp in components {
            let closed = comp.iter().all(|&ti| {
                self.tri_edges[ti as usize]
                    .iter()
                    .all(|&ei| self.edges[ei as usize].tris.len() == 2)
            });
            if !closed {
                continue;
            }
            let mut six_v = 0.0;
            for &ti in &comp {
                let t = self.triangles[ti as usize];
                let (a, b, c) = (
                    self.vertices[t[0] as usize],
                    self.vertices[t[1] as usize],
                    self.vertices[t[2] as usize],
                );
                six_v += a.dot(b.cross(c));
            }
            if six_v < 0.0 {
                for &ti in &comp {
                    self.triangles[ti as usize].swap(1, 2);
                    self.normals[ti as usize] = -self.normals[ti as usize];
                    self.tri_edges[ti as usize].swap(0, 2);
                }
            }
        }
    }

    /// Complex made of bare segments (no facets); used by the planar
    /// pipeline, which treats the embedded boundary as a set of creases.
    pub fn from_segments(vertices: Vec<Point3>, segments: &[[u32; 2]]) -> Result<Self, Error> {
        if vertices.is_empty() || segments.is_empty() {
            return Err(Error::DegenerateInput("empty segment complex".into()));
        }
        let bbox = Aabb::from_points(vertices.iter().copied());
        let scale = bbox.diagonal();
        if !(scale > 0.0) {
            return Err(Error::DegenerateInput("segment complex has zero extent".into()));
        }
        let mut edges = Vec::with_capacity(segments.len());
        let mut seen = HashMap::new();
        for s in segments {
            if s[0] == s[1] || s[0] as usize >= vertices.len() || s[1] as usize >= vertices.len() {
                return Err(Error::DegenerateInput("invalid segment".into()));
            }
            let key = if s[0] < s[1] { (s[0], s[1]) } else { (s[1], s[0]) };
            if seen.insert(key, ()).is_some() {
                continue;
            }
            edges.push(MeshEdge {
                a: key.0,
                b: key.1,
                tris: Vec::new(),
            });
        }
        Ok(InputComplex {
            vertices,
            triangles: Vec::new(),
            edges,
            tri_edges: Vec::new(),
            normals: Vec::new(),
            areas: Vec::new(),
            bbox,
            scale,
        })
    }

    pub fn edge_length(&self, ei: u32) -> f64 {
        let e = &self.edges[ei as usize];
        self.vertices[e.a as usize].distance(self.vertices[e.b as usize])
    }

    pub fn edge_midpoint(&self, ei: u32) -> Point3 {
        let e = &self.edges[ei as usize];
        (self.vertices[e.a as usize] + self.vertices[e.b as usize]) * 0.5
    }

    pub fn tri_points(&self, ti: u32) -> [Point3; 3] {
        let t = self.triangles[ti as usize];
        [
            self.vertices[t[0] as usize],
            self.vertices[t[1] as usize],
            self.vertices[t[2] as usize],
        ]
    }

    /// Dihedral angle at a 2-manifold edge (pi = flat), or None for
    /// boundary / non-manifold edges.
    pub fn dihedral(&self, ei: u32) -> Option<f64> {
        let e = &self.edges[ei as usize];
        if e.tris.len() != 2 {
            return None;
        }
        let n0 = self.normals[e.tris[0] as usize];
        let n1 = self.normals[e.tris[1] as usize];
        Some(std::f64::consts::PI - n0.angle_to(n1))
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Euler characteristic V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }
}

/// True when (a, b) appears in the facet's cyclic vertex order as a -> b.
fn edge_direction(tri: &[u32; 3], a: u32, b: u32) -> bool {
    (tri[0] == a && tri[1] == b) || (tri[1] == a && tri[2] == b) || (tri[2] == a && tri[0] == b)
}

/// Welds vertices closer than `tol`, dropping facets that collapse.
pub fn weld_vertices(vertices: Vec<Point3>, triangles: Vec<[u32; 3]>, tol: f64) -> (Vec<Point3>, Vec<[u32; 3]>) {
    // Quantized hash grid with neighbor lookup so near-boundary pairs merge.
    let inv = 1.0 / tol.max(f64::MIN_POSITIVE);
    let mut grid: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
    let mut remap = vec![u32::MAX; vertices.len()];
    let mut out: Vec<Point3> = Vec::with_capacity(vertices.len());
    for (i, &p) in vertices.iter().enumerate() {
        let key = (
            (p.x * inv).round() as i64,
            (p.y * inv).round() as i64,
            (p.z * inv).round() as i64,
        );
        let mut found = None;
        'search: for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                for dz in -1..=1i64 {
                    if let Some(cands) = grid.get(&(key.0 + dx, key.1 + dy, key.2 + dz)) {
                        for &c in cands {
                            if out[c as usize].distance(p) <= tol {
                                found = Some(c);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        let id = found.unwrap_or_else(|| {
            out.push(p);
            let id = (out.len() - 1) as u32;
            grid.entry(key).or_default().push(id);
            id
        });
        remap[i] = id;
    }
    let tris = triangles
        .into_iter()
        .map(|t| [remap[t[0] as usize], remap[t[1] as usize], remap[t[2] as usize]])
        .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
        .collect();
    (out, tris)
}

/// Feature strata: sharp corners, creases (chains of sharp edges) and
/// surface patches, with consistently oriented per-face vectors.
#[derive(Clone, Debug, Default)]
pub struct Strata {
    /// Vertex ids of sharp corners.
    pub corners: Vec<u32>,
    /// Per-vertex corner index (or None).
    pub corner_of_vertex: HashMap<u32, u32>,
    /// Per-edge sharp flag.
    pub sharp_edge: Vec<bool>,
    /// Per-edge crease id for sharp edges.
    pub crease_of_edge: Vec<Option<u32>>,
    /// Oriented unit direction per sharp edge (consistent along its crease).
    pub edge_dir: Vec<Option<Vec3>>,
    pub creases: Vec<Crease>,
    /// Per-triangle patch id.
    pub patch_of_tri: Vec<u32>,
    pub patches: Vec<Patch>,
}

#[derive(Clone, Debug)]
pub struct Crease {
    /// Edge ids in path order.
    pub edges: Vec<u32>,
    /// Vertex ids in path order (len = edges + 1, or edges for a cycle with
    /// the closing vertex repeated at the end).
    pub vertices: Vec<u32>,
    pub is_cycle: bool,
    pub length: f64,
}

#[derive(Clone, Debug)]
pub struct Patch {
    pub tris: Vec<u32>,
    pub area: f64,
}

impl Strata {
    pub fn is_corner(&self, v: u32) -> bool {
        self.corner_of_vertex.contains_key(&v)
    }

    /// Creases whose endpoint set contains the given corner vertex.
    pub fn creases_at_corner(&self, v: u32) -> Vec<u32> {
        self.creases
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_cycle && (c.vertices[0] == v || *c.vertices.last().unwrap() == v))
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Patch ids adjacent to a crease (sharing any of its edges' facets).
    pub fn patches_at_crease(&self, mesh: &InputComplex, crease: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self.creases[crease as usize]
            .edges
            .iter()
            .flat_map(|&ei| mesh.edges[ei as usize].tris.iter().map(|&ti| self.patch_of_tri[ti as usize]))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}
