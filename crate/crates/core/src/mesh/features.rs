//! Sharp-feature detection and stratification.

use super::{Crease, InputComplex, Patch, Strata};
use crate::geom::Vec3;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Detects sharp edges, sharp corners, creases and surface patches.
///
/// An edge is sharp when its dihedral angle is below `pi - theta_sharp` or
/// when it is non-manifold (one, or more than two, incident facets). A
/// vertex is a sharp corner when it has more than two sharp edges, exactly
/// two sharp edges whose supporting lines bend by more than `theta_sharp`,
/// two facets in one sector whose normals deviate by at least `theta_sharp`,
/// or exactly one sharp edge (a dangling junction). Creases are chains of
/// sharp edges flooded through non-corner vertices; patches are facet floods
/// across non-sharp edges.
pub fn detect_features(mesh: &InputComplex, theta_sharp: f64) -> Strata {
    let ne = mesh.edges.len();
    let nt = mesh.triangles.len();
    let nv = mesh.vertices.len();

    // Sharp edges.
    let mut sharp_edge = vec![false; ne];
    for (ei, e) in mesh.edges.iter().enumerate() {
        sharp_edge[ei] = match mesh.dihedral(ei as u32) {
            Some(d) => d < PI - theta_sharp,
            None => e.tris.len() != 2, // non-manifold or boundary
        };
    }

    // Vertex incidence.
    let mut vertex_edges: Vec<Vec<u32>> = vec![Vec::new(); nv];
    for (ei, e) in mesh.edges.iter().enumerate() {
        vertex_edges[e.a as usize].push(ei as u32);
        vertex_edges[e.b as usize].push(ei as u32);
    }
    let mut vertex_tris: Vec<Vec<u32>> = vec![Vec::new(); nv];
    for (ti, t) in mesh.triangles.iter().enumerate() {
        for &v in t {
            vertex_tris[v as usize].push(ti as u32);
        }
    }

    // Sharp corners.
    let mut corners = Vec::new();
    let mut corner_of_vertex = HashMap::new();
    for v in 0..nv as u32 {
        let sharp_at: Vec<u32> = vertex_edges[v as usize]
            .iter()
            .copied()
            .filter(|&ei| sharp_edge[ei as usize])
            .collect();
        let is_corner = match sharp_at.len() {
            0 => sector_normal_spread_exceeds(mesh, v, &vertex_tris[v as usize], &sharp_edge, theta_sharp),
            1 => true, // dangling sharp edge: protect the junction
            2 => {
                let d0 = edge_dir_from(mesh, sharp_at[0], v);
                let d1 = edge_dir_from(mesh, sharp_at[1], v);
                // Supporting lines bend by more than theta_sharp, i.e. the
                // outgoing directions fail to be anti-parallel within it.
                let bend = PI - d0.angle_to(d1);
                bend > theta_sharp
                    || sector_normal_spread_exceeds(mesh, v, &vertex_tris[v as usize], &sharp_edge, theta_sharp)
            }
            _ => true,
        };
        if is_corner {
            corner_of_vertex.insert(v, corners.len() as u32);
            corners.push(v);
        }
    }

    // Creases: flood chains of sharp edges through non-corner vertices.
    let mut crease_of_edge: Vec<Option<u32>> = vec![None; ne];
    let mut edge_dir: Vec<Option<Vec3>> = vec![None; ne];
    let mut creases: Vec<Crease> = Vec::new();
    let sharp_ids: Vec<u32> = (0..ne as u32).filter(|&ei| sharp_edge[ei as usize]).collect();
    let vertex_sharp: Vec<Vec<u32>> = {
        let mut vs = vec![Vec::new(); nv];
        for &ei in &sharp_ids {
            let e = &mesh.edges[ei as usize];
            vs[e.a as usize].push(ei);
            vs[e.b as usize].push(ei);
        }
        vs
    };
    // A vertex terminates a chain when it is a corner or when its sharp
    // valence differs from 2.
    let terminates = |v: u32| corner_of_vertex.contains_key(&v) || vertex_sharp[v as usize].len() != 2;
    let other_end = |ei: u32, v: u32| -> u32 {
        let e = &mesh.edges[ei as usize];
        if e.a == v {
            e.b
        } else {
            e.a
        }
    };
    for &start in &sharp_ids {
        if crease_of_edge[start as usize].is_some() {
            continue;
        }
        // Walk backward from start to a terminal vertex; interior chain
        // vertices have sharp valence exactly two, so the walk is unique.
        // Chains between terminals are assigned atomically, so the whole
        // chain of `start` is still unassigned here.
        let origin = mesh.edges[start as usize].a;
        let mut chain_start = origin;
        let mut first_edge = start;
        let mut guard = sharp_ids.len() + 1;
        while !terminates(chain_start) && guard > 0 {
            guard -= 1;
            let back = vertex_sharp[chain_start as usize]
                .iter()
                .copied()
                .find(|&ei| ei != first_edge)
                .expect("interior chain vertex has two sharp edges");
            chain_start = other_end(back, chain_start);
            first_edge = back;
            if chain_start == origin {
                break; // closed cycle, start anywhere
            }
        }
        // Walk the chain forward from (chain_start, first_edge).
        let id = creases.len() as u32;
        let mut edges_path = Vec::new();
        let mut verts_path = vec![chain_start];
        let mut v = chain_start;
        let mut next = Some(first_edge);
        let mut length = 0.0;
        while let Some(ei) = next {
            let w = other_end(ei, v);
            crease_of_edge[ei as usize] = Some(id);
            let dir = (mesh.vertices[w as usize] - mesh.vertices[v as usize])
                .normalized()
                .unwrap_or(Vec3::new(1.0, 0.0, 0.0));
            edge_dir[ei as usize] = Some(dir);
            length += mesh.edge_length(ei);
            edges_path.push(ei);
            verts_path.push(w);
            v = w;
            next = if terminates(v) || v == chain_start {
                None
            } else {
                vertex_sharp[v as usize]
                    .iter()
                    .copied()
                    .find(|&e2| e2 != ei && crease_of_edge[e2 as usize].is_none())
            };
        }
        let is_cycle = *verts_path.last().unwrap() == chain_start && edges_path.len() > 1;
        creases.push(Crease {
            edges: edges_path,
            vertices: verts_path,
            is_cycle,
            length,
        });
    }

    // Patches: flood facets across non-sharp edges.
    let mut patch_of_tri = vec![u32::MAX; nt];
    let mut patches = Vec::new();
    for start in 0..nt as u32 {
        if patch_of_tri[start as usize] != u32::MAX {
            continue;
        }
        let id = patches.len() as u32;
        let mut tris = vec![start];
        let mut area = mesh.areas[start as usize];
        patch_of_tri[start as usize] = id;
        let mut stack = vec![start];
        while let Some(ti) = stack.pop() {
            for &ei in &mesh.tri_edges[ti as usize] {
                if sharp_edge[ei as usize] {
                    continue;
                }
                let e = &mesh.edges[ei as usize];
                for &other in &e.tris {
                    if patch_of_tri[other as usize] == u32::MAX {
                        patch_of_tri[other as usize] = id;
                        area += mesh.areas[other as usize];
                        tris.push(other);
                        stack.push(other);
                    }
                }
            }
        }
        patches.push(Patch { tris, area });
    }

    Strata {
        corners,
        corner_of_vertex,
        sharp_edge,
        crease_of_edge,
        edge_dir,
        creases,
        patch_of_tri,
        patches,
    }
}

/// Unit direction of an edge leaving the given vertex.
fn edge_dir_from(mesh: &InputComplex, ei: u32, from: u32) -> Vec3 {
    let e = &mesh.edges[ei as usize];
    let (a, b) = if e.a == from { (e.a, e.b) } else { (e.b, e.a) };
    (mesh.vertices[b as usize] - mesh.vertices[a as usize])
        .normalized()
        .unwrap_or(Vec3::new(1.0, 0.0, 0.0))
}

/// Tests the sector rule: some pair of facets in one sector around the
/// vertex (facets connected across non-sharp edges incident to it) whose
/// normals deviate by at least theta_sharp. All pairs within the sector are
/// tested, since sectors are small.
fn sector_normal_spread_exceeds(
    mesh: &InputComplex,
    v: u32,
    tris_at_v: &[u32],
    sharp_edge: &[bool],
    theta_sharp: f64,
) -> bool {
    if tris_at_v.len() < 2 {
        return false;
    }
    // Union-find over the facets at v, merged across non-sharp edges at v.
    let mut parent: HashMap<u32, u32> = tris_at_v.iter().map(|&t| (t, t)).collect();
    fn find(parent: &mut HashMap<u32, u32>, x: u32) -> u32 {
        let p = parent[&x];
        if p == x {
            return x;
        }
        let r = find(parent, p);
        parent.insert(x, r);
        r
    }
    for &ti in tris_at_v {
        for &ei in &mesh.tri_edges[ti as usize] {
            let e = &mesh.edges[ei as usize];
            if sharp_edge[ei as usize] || (e.a != v && e.b != v) {
                continue;
            }
            for &other in &e.tris {
                if other != ti && parent.contains_key(&other) {
                    let (ra, rb) = (find(&mut parent, ti), find(&mut parent, other));
                    if ra != rb {
                        parent.insert(ra, rb);
                    }
                }
            }
        }
    }
    let mut sectors: HashMap<u32, Vec<u32>> = HashMap::new();
    for &ti in tris_at_v {
        let r = find(&mut parent, ti);
        sectors.entry(r).or_default().push(ti);
    }
    for sector in sectors.values() {
        for (i, &a) in sector.iter().enumerate() {
            for &b in &sector[i + 1..] {
                if mesh.normals[a as usize].angle_to(mesh.normals[b as usize]) >= theta_sharp {
                    return true;
                }
            }
        }
    }
    false
}
