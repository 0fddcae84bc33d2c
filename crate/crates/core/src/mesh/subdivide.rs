//! Adaptive crease-aware Loop subdivision.
//!
//! Facets whose intra-patch dihedral angles all exceed the threshold are
//! left alone; the rest get 4-way midpoint splits with red/green closure so
//! the mesh stays conforming. Crease edges split at their midpoints and
//! crease/corner vertices stay fixed, so feature polylines are preserved as
//! point sets. Smooth vertices fully surrounded by subdivided facets move by
//! the Loop vertex rule.

use super::{Crease, InputComplex, Patch, Strata};
use crate::error::Error;
use crate::geom::{Point3, Vec3};
use std::collections::HashMap;

struct Working {
    verts: Vec<Point3>,
    tris: Vec<[u32; 3]>,
    patch: Vec<u32>,
    /// Sharp edges by vertex pair -> crease id.
    sharp: HashMap<(u32, u32), u32>,
    /// Ordered vertex paths per crease (cycles repeat the start at the end).
    crease_paths: Vec<(Vec<u32>, bool)>,
    corners: Vec<u32>,
}

fn pair(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Runs adaptive subdivision until every intra-patch dihedral angle exceeds
/// the threshold or the iteration budget is exhausted. Returns the refined
/// complex with strata recomputed while preserving feature identity.
pub fn smooth_patches(
    mesh: &InputComplex,
    strata: &Strata,
    dihedral_threshold: f64,
    max_iterations: u32,
) -> Result<(InputComplex, Strata), Error> {
    let mut w = Working {
        verts: mesh.vertices.clone(),
        tris: mesh.triangles.clone(),
        patch: strata.patch_of_tri.clone(),
        sharp: mesh
            .edges
            .iter()
            .enumerate()
            .filter(|(ei, _)| strata.sharp_edge[*ei])
            .map(|(ei, e)| (pair(e.a, e.b), strata.crease_of_edge[ei].unwrap_or(0)))
            .collect(),
        crease_paths: strata
            .creases
            .iter()
            .map(|c| (c.vertices.clone(), c.is_cycle))
            .collect(),
        corners: strata.corners.clone(),
    };

    for _ in 0..max_iterations {
        if !subdivide_once(&mut w, dihedral_threshold) {
            break;
        }
    }

    rebuild(w)
}

/// One adaptive round; returns false when nothing needed subdivision.
fn subdivide_once(w: &mut Working, threshold: f64) -> bool {
    let nt = w.tris.len();
    let nv = w.verts.len();

    // Transient adjacency.
    let mut edge_tris: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (ti, t) in w.tris.iter().enumerate() {
        for k in 0..3 {
            edge_tris
                .entry(pair(t[k], t[(k + 1) % 3]))
                .or_default()
                .push(ti as u32);
        }
    }
    let normal = |t: &[u32; 3]| -> Vec3 {
        (w.verts[t[1] as usize] - w.verts[t[0] as usize])
            .cross(w.verts[t[2] as usize] - w.verts[t[0] as usize])
    };
    let normals: Vec<Vec3> = w.tris.iter().map(normal).collect();

    // Facets that fail the dihedral criterion on some intra-patch edge.
    let mut red = vec![false; nt];
    for (key, tris) in &edge_tris {
        if w.sharp.contains_key(key) || tris.len() != 2 {
            continue;
        }
        let (a, b) = (tris[0] as usize, tris[1] as usize);
        let dihedral = std::f64::consts::PI - normals[a].angle_to(normals[b]);
        if dihedral <= threshold {
            red[a] = true;
            red[b] = true;
        }
    }
    if !red.iter().any(|&r| r) {
        return false;
    }

    // Red/green closure: every edge of a red facet splits; a facet with two
    // or more split edges is promoted to red.
    let mut split: HashMap<(u32, u32), bool> = HashMap::new();
    loop {
        let mut changed = false;
        for (ti, t) in w.tris.iter().enumerate() {
            if red[ti] {
                for k in 0..3 {
                    let key = pair(t[k], t[(k + 1) % 3]);
                    if !split.contains_key(&key) {
                        split.insert(key, true);
                        changed = true;
                    }
                }
            }
        }
        for (ti, t) in w.tris.iter().enumerate() {
            if red[ti] {
                continue;
            }
            let n_split = (0..3)
                .filter(|&k| split.contains_key(&pair(t[k], t[(k + 1) % 3])))
                .count();
            if n_split >= 2 {
                red[ti] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // New vertex positions on split edges.
    let mut midpoint: HashMap<(u32, u32), u32> = HashMap::new();
    let split_keys: Vec<(u32, u32)> = {
        let mut keys: Vec<_> = split.keys().copied().collect();
        keys.sort_unstable();
        keys
    };
    for key in split_keys {
        let (a, b) = key;
        let pa = w.verts[a as usize];
        let pb = w.verts[b as usize];
        let tris = &edge_tris[&key];
        let pos = if w.sharp.contains_key(&key) || tris.len() != 2 {
            (pa + pb) * 0.5
        } else {
            // Loop edge mask 3/8 (a+b) + 1/8 (c+d).
            let opposite = |ti: u32| {
                let t = w.tris[ti as usize];
                t.iter()
                    .copied()
                    .find(|&v| v != a && v != b)
                    .expect("triangle has a third vertex")
            };
            let c = w.verts[opposite(tris[0]) as usize];
            let d = w.verts[opposite(tris[1]) as usize];
            (pa + pb) * (3.0 / 8.0) + (c + d) * (1.0 / 8.0)
        };
        w.verts.push(pos);
        midpoint.insert(key, (w.verts.len() - 1) as u32);
    }

    // Old-vertex smoothing: only smooth vertices whose entire one-ring is
    // subdivided and which sit on no feature.
    let mut incident_all_red = vec![true; nv];
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); nv];
    for (ti, t) in w.tris.iter().enumerate() {
        for &v in t {
            if !red[ti] {
                incident_all_red[v as usize] = false;
            }
        }
        let _ = ti;
    }
    for (key, _) in &edge_tris {
        neighbors[key.0 as usize].push(key.1);
        neighbors[key.1 as usize].push(key.0);
    }
    let on_feature: Vec<bool> = {
        let mut f = vec![false; nv];
        for key in w.sharp.keys() {
            f[key.0 as usize] = true;
            f[key.1 as usize] = true;
        }
        for &c in &w.corners {
            f[c as usize] = true;
        }
        f
    };
    let mut new_positions: Vec<(u32, Point3)> = Vec::new();
    for v in 0..nv as u32 {
        if !incident_all_red[v as usize] || on_feature[v as usize] {
            continue;
        }
        let ring = &neighbors[v as usize];
        let n = ring.len();
        if n < 3 {
            continue;
        }
        let beta = {
            let c = 3.0 / 8.0 + 0.25 * (2.0 * std::f64::consts::PI / n as f64).cos();
            (5.0 / 8.0 - c * c) / n as f64
        };
        let sum = ring
            .iter()
            .fold(Vec3::ZERO, |acc, &u| acc + w.verts[u as usize]);
        new_positions.push((
            v,
            w.verts[v as usize] * (1.0 - n as f64 * beta) + sum * beta,
        ));
    }
    for (v, p) in new_positions {
        w.verts[v as usize] = p;
    }

    // Rebuild facets.
    let mut new_tris: Vec<[u32; 3]> = Vec::with_capacity(nt * 2);
    let mut new_patch: Vec<u32> = Vec::with_capacity(nt * 2);
    for (ti, t) in w.tris.iter().enumerate() {
        let mids: Vec<Option<u32>> = (0..3)
            .map(|k| midpoint.get(&pair(t[k], t[(k + 1) % 3])).copied())
            .collect();
        let p = w.patch[ti];
        if red[ti] {
            let (m01, m12, m20) = (mids[0].unwrap(), mids[1].unwrap(), mids[2].unwrap());
            for child in [
                [t[0], m01, m20],
                [t[1], m12, m01],
                [t[2], m20, m12],
                [m01, m12, m20],
            ] {
                new_tris.push(child);
                new_patch.push(p);
            }
        } else {
            match mids.iter().position(|m| m.is_some()) {
                Some(k) => {
                    // Green bisection across the single split edge.
                    let m = mids[k].unwrap();
                    let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
                    new_tris.push([a, m, c]);
                    new_patch.push(p);
                    new_tris.push([m, b, c]);
                    new_patch.push(p);
                }
                None => {
                    new_tris.push(*t);
                    new_patch.push(p);
                }
            }
        }
    }

    // Update sharp-edge labels: split sharp edges hand their crease id to
    // both halves.
    let mut new_sharp: HashMap<(u32, u32), u32> = HashMap::new();
    for (&key, &crease) in &w.sharp {
        match midpoint.get(&key) {
            Some(&m) => {
                new_sharp.insert(pair(key.0, m), crease);
                new_sharp.insert(pair(m, key.1), crease);
            }
            None => {
                new_sharp.insert(key, crease);
            }
        }
    }

    // Update crease vertex paths with the inserted midpoints.
    for (path, _) in w.crease_paths.iter_mut() {
        let mut out = Vec::with_capacity(path.len() * 2);
        for i in 0..path.len() {
            out.push(path[i]);
            if i + 1 < path.len() {
                if let Some(&m) = midpoint.get(&pair(path[i], path[i + 1])) {
                    out.push(m);
                }
            }
        }
        *path = out;
    }

    w.tris = new_tris;
    w.patch = new_patch;
    w.sharp = new_sharp;
    true
}

fn rebuild(w: Working) -> Result<(InputComplex, Strata), Error> {
    let n_patches = w.patch.iter().copied().max().map_or(0, |m| m + 1);
    let complex = InputComplex::build(w.verts, w.tris, false)?;

    let mut edge_id: HashMap<(u32, u32), u32> = HashMap::new();
    for (ei, e) in complex.edges.iter().enumerate() {
        edge_id.insert((e.a, e.b), ei as u32);
    }

    let ne = complex.edges.len();
    let mut sharp_edge = vec![false; ne];
    let mut crease_of_edge = vec![None; ne];
    let mut edge_dir = vec![None; ne];
    for (&key, &crease) in &w.sharp {
        if let Some(&ei) = edge_id.get(&key) {
            sharp_edge[ei as usize] = true;
            crease_of_edge[ei as usize] = Some(crease);
        }
    }

    let mut creases = Vec::with_capacity(w.crease_paths.len());
    for (path, is_cycle) in &w.crease_paths {
        let mut edges = Vec::with_capacity(path.len().saturating_sub(1));
        let mut length = 0.0;
        for i in 0..path.len().saturating_sub(1) {
            let (u, v) = (path[i], path[i + 1]);
            let ei = *edge_id
                .get(&pair(u, v))
                .ok_or_else(|| Error::DegenerateInput("crease path broken by subdivision".into()))?;
            let dir = (complex.vertices[v as usize] - complex.vertices[u as usize])
                .normalized()
                .unwrap_or(Vec3::new(1.0, 0.0, 0.0));
            edge_dir[ei as usize] = Some(dir);
            length += complex.edge_length(ei);
            edges.push(ei);
        }
        creases.push(Crease {
            edges,
            vertices: path.clone(),
            is_cycle: *is_cycle,
            length,
        });
    }

    let mut patches: Vec<Patch> = (0..n_patches)
        .map(|_| Patch {
            tris: Vec::new(),
            area: 0.0,
        })
        .collect();
    for (ti, &p) in w.patch.iter().enumerate() {
        patches[p as usize].tris.push(ti as u32);
        patches[p as usize].area += complex.areas[ti];
    }

    let corner_of_vertex = w
        .corners
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();

    Ok((
        complex,
        Strata {
            corners: w.corners,
            corner_of_vertex,
            sharp_edge,
            crease_of_edge,
            edge_dir,
            creases,
            patch_of_tri: w.patch,
            patches,
        },
    ))
}

/// Smallest intra-patch dihedral angle (pi when there are no smooth edges).
pub fn min_intra_patch_dihedral(mesh: &InputComplex, strata: &Strata) -> f64 {
    let mut min_d = std::f64::consts::PI;
    for ei in 0..mesh.edges.len() as u32 {
        if strata.sharp_edge[ei as usize] {
            continue;
        }
        if let Some(d) = mesh.dihedral(ei) {
            min_d = min_d.min(d);
        }
    }
    min_d
}
