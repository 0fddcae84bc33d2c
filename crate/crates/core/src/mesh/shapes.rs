//! Procedural test meshes.

use super::InputComplex;
use crate::geom::{Point3, Vec3};
use std::collections::HashMap;

/// Axis-aligned unit cube [0,1]^3 as 12 triangles.
pub fn unit_cube() -> InputComplex {
    let v = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(1.0, 1.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        Point3::new(1.0, 0.0, 1.0),
        Point3::new(1.0, 1.0, 1.0),
        Point3::new(0.0, 1.0, 1.0),
    ];
    let quads: [[u32; 4]; 6] = [
        [0, 3, 2, 1], // -z
        [4, 5, 6, 7], // +z
        [0, 1, 5, 4], // -y
        [2, 3, 7, 6], // +y
        [1, 2, 6, 5], // +x
        [0, 4, 7, 3], // -x
    ];
    let mut tris = Vec::new();
    for q in quads {
        tris.push([q[0], q[1], q[2]]);
        tris.push([q[0], q[2], q[3]]);
    }
    InputComplex::build(v, tris, true).expect("cube is valid")
}

/// Icosphere of the given radius centered at the origin.
pub fn icosphere(subdivisions: u32, radius: f64) -> InputComplex {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut verts = vec![
        Vec3::new(-1.0, phi, 0.0),
        Vec3::new(1.0, phi, 0.0),
        Vec3::new(-1.0, -phi, 0.0),
        Vec3::new(1.0, -phi, 0.0),
        Vec3::new(0.0, -1.0, phi),
        Vec3::new(0.0, 1.0, phi),
        Vec3::new(0.0, -1.0, -phi),
        Vec3::new(0.0, 1.0, -phi),
        Vec3::new(phi, 0.0, -1.0),
        Vec3::new(phi, 0.0, 1.0),
        Vec3::new(-phi, 0.0, -1.0),
        Vec3::new(-phi, 0.0, 1.0),
    ];
    for v in &mut verts {
        *v = v.normalized().unwrap() * radius;
    }
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut new_faces = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0u32; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = if a < b { (a, b) } else { (b, a) };
                mid[k] = *midpoints.entry(key).or_insert_with(|| {
                    let m = ((verts[a as usize] + verts[b as usize]) * 0.5)
                        .normalized()
                        .unwrap()
                        * radius;
                    verts.push(m);
                    (verts.len() - 1) as u32
                });
            }
            new_faces.push([f[0], mid[0], mid[2]]);
            new_faces.push([f[1], mid[1], mid[0]]);
            new_faces.push([f[2], mid[2], mid[1]]);
            new_faces.push([mid[0], mid[1], mid[2]]);
        }
        faces = new_faces;
    }
    InputComplex::build(verts, faces, true).expect("icosphere is valid")
}

/// Torus around the z axis: `major_radius` to the tube center,
/// `minor_radius` of the tube, tessellated `major_n` x `minor_n`.
pub fn torus(major_n: u32, minor_n: u32, major_radius: f64, minor_radius: f64) -> InputComplex {
    let mut verts = Vec::with_capacity((major_n * minor_n) as usize);
    for i in 0..major_n {
        let u = 2.0 * std::f64::consts::PI * i as f64 / major_n as f64;
        for j in 0..minor_n {
            let v = 2.0 * std::f64::consts::PI * j as f64 / minor_n as f64;
            let w = major_radius + minor_radius * v.cos();
            verts.push(Point3::new(
                w * u.cos(),
                w * u.sin(),
                minor_radius * v.sin(),
            ));
        }
    }
    let idx = |i: u32, j: u32| (i % major_n) * minor_n + (j % minor_n);
    let mut tris = Vec::with_capacity((major_n * minor_n * 2) as usize);
    for i in 0..major_n {
        for j in 0..minor_n {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    InputComplex::build(verts, tris, true).expect("torus is valid")
}

/// Three rectangles sharing one common edge (a non-manifold fixture).
pub fn triple_fin() -> InputComplex {
    // Shared edge from (0,0,0) to (1,0,0); fins along +z, +y and -y-z.
    let v = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        Point3::new(1.0, 0.0, 1.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(1.0, 1.0, 0.0),
        Point3::new(0.0, -0.7, -0.7),
        Point3::new(1.0, -0.7, -0.7),
    ];
    let tris = vec![
        [0, 1, 3],
        [0, 3, 2],
        [0, 5, 1],
        [0, 4, 5],
        [0, 1, 7],
        [0, 7, 6],
    ];
    InputComplex::build(v, tris, false).expect("fin complex is valid")
}
