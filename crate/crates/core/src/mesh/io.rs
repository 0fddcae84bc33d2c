//! OFF / OBJ / STL readers and polygon-aware OFF / OBJ writers.

use super::{weld_vertices, InputComplex};
use crate::error::Error;
use crate::geom::{Aabb, Point3};
use std::fs;
use std::io::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
    Stl,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<MeshFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(MeshFormat::Off),
            "obj" => Some(MeshFormat::Obj),
            "stl" => Some(MeshFormat::Stl),
            _ => None,
        }
    }
}

/// Loads a triangle mesh; quads and larger polygons are fan-triangulated
/// with a warning, duplicate vertices are merged at 1e-9 of the bbox
/// diagonal, adjacency is built and validated.
pub fn load_mesh(path: &Path, format: MeshFormat, require_watertight: bool) -> Result<InputComplex, Error> {
    let (vertices, triangles) = match format {
        MeshFormat::Off => parse_off(path)?,
        MeshFormat::Obj => parse_obj(path)?,
        MeshFormat::Stl => parse_stl(path)?,
    };
    if vertices.is_empty() || triangles.is_empty() {
        return Err(Error::parse(path.display().to_string(), "empty mesh"));
    }
    let bbox = Aabb::from_points(vertices.iter().copied());
    let tol = 1e-9 * bbox.diagonal();
    let (vertices, triangles) = weld_vertices(vertices, triangles, tol);
    InputComplex::build(vertices, triangles, require_watertight)
}

fn fan_triangulate(path: &Path, face: &[u32], out: &mut Vec<[u32; 3]>) -> Result<(), Error> {
    match face.len() {
        0..=2 => Err(Error::parse(
            path.display().to_string(),
            format!("face with {} vertices", face.len()),
        )),
        3 => {
            out.push([face[0], face[1], face[2]]);
            Ok(())
        }
        n => {
            log::warn!("fan-triangulating a face with {n} vertices");
            for k in 1..n - 1 {
                out.push([face[0], face[k], face[k + 1]]);
            }
            Ok(())
        }
    }
}

fn parse_off(path: &Path) -> Result<(Vec<Point3>, Vec<[u32; 3]>), Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split_whitespace())
        .peekable();
    let pd = || path.display().to_string();
    let header = tokens.next().ok_or_else(|| Error::parse(pd(), "missing OFF header"))?;
    if !header.eq_ignore_ascii_case("OFF") {
        return Err(Error::parse(pd(), format!("expected OFF header, got '{header}'")));
    }
    let mut next_num = |what: &str| -> Result<f64, Error> {
        tokens
            .next()
            .ok_or_else(|| Error::parse(pd(), format!("unexpected end of file reading {what}")))?
            .parse::<f64>()
            .map_err(|_| Error::parse(pd(), format!("bad number reading {what}")))
    };
    let nv = next_num("vertex count")? as usize;
    let nf = next_num("face count")? as usize;
    let _ne = next_num("edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let x = next_num("vertex x")?;
        let y = next_num("vertex y")?;
        let z = next_num("vertex z")?;
        vertices.push(Point3::new(x, y, z));
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let cnt = next_num("face size")? as usize;
        let mut face = Vec::with_capacity(cnt);
        for _ in 0..cnt {
            face.push(next_num("face index")? as u32);
        }
        fan_triangulate(path, &face, &mut triangles)?;
    }
    Ok((vertices, triangles))
}

fn parse_obj(path: &Path) -> Result<(Vec<Point3>, Vec<[u32; 3]>), Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let pd = || path.display().to_string();
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(|s| s.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| Error::parse(pd(), format!("bad vertex at line {}", lineno + 1)))?;
                if coords.len() != 3 {
                    return Err(Error::parse(pd(), format!("short vertex at line {}", lineno + 1)));
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut face = Vec::new();
                for spec in parts {
                    // "v", "v/vt", "v//vn", "v/vt/vn"; negative = relative.
                    let idx_str = spec.split('/').next().unwrap_or("");
                    let raw: i64 = idx_str
                        .parse()
                        .map_err(|_| Error::parse(pd(), format!("bad face index at line {}", lineno + 1)))?;
                    let idx = if raw > 0 {
                        (raw - 1) as u32
                    } else if raw < 0 {
                        (vertices.len() as i64 + raw) as u32
                    } else {
                        return Err(Error::parse(pd(), format!("zero face index at line {}", lineno + 1)));
                    };
                    face.push(idx);
                }
                fan_triangulate(path, &face, &mut triangles)?;
            }
            _ => {} // vn, vt, o, g, s, mtllib, usemtl: ignored
        }
    }
    Ok((vertices, triangles))
}

fn parse_stl(path: &Path) -> Result<(Vec<Point3>, Vec<[u32; 3]>), Error> {
    let bytes = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let is_ascii = bytes.len() >= 6
        && bytes.starts_with(b"solid")
        && std::str::from_utf8(&bytes)
            .map(|t| t.contains("facet"))
            .unwrap_or(false);
    let raw_tris = if is_ascii {
        parse_stl_ascii(path, std::str::from_utf8(&bytes).unwrap())?
    } else {
        parse_stl_binary(path, &bytes)?
    };
    // STL carries no connectivity: weld by exact match first, tolerance merge
    // happens again in load_mesh.
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut lookup: std::collections::HashMap<[u64; 3], u32> = std::collections::HashMap::new();
    for tri in raw_tris {
        let mut idx = [0u32; 3];
        for (k, p) in tri.iter().enumerate() {
            let key = [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()];
            idx[k] = *lookup.entry(key).or_insert_with(|| {
                vertices.push(*p);
                (vertices.len() - 1) as u32
            });
        }
        if idx[0] != idx[1] && idx[1] != idx[2] && idx[0] != idx[2] {
            triangles.push(idx);
        }
    }
    Ok((vertices, triangles))
}

fn parse_stl_ascii(path: &Path, text: &str) -> Result<Vec<[Point3; 3]>, Error> {
    let pd = || path.display().to_string();
    let mut tris = Vec::new();
    let mut current: Vec<Point3> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("vertex") {
            let coords: Vec<f64> = rest
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::parse(pd(), "bad STL vertex"))?;
            if coords.len() != 3 {
                return Err(Error::parse(pd(), "short STL vertex"));
            }
            current.push(Point3::new(coords[0], coords[1], coords[2]));
        } else if line.starts_with("endfacet") {
            if current.len() != 3 {
                return Err(Error::parse(pd(), "STL facet without three vertices"));
            }
            tris.push([current[0], current[1], current[2]]);
            current.clear();
        }
    }
    Ok(tris)
}

fn parse_stl_binary(path: &Path, bytes: &[u8]) -> Result<Vec<[Point3; 3]>, Error> {
    let pd = || path.display().to_string();
    if bytes.len() < 84 {
        return Err(Error::parse(pd(), "binary STL shorter than its header"));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let expected = 84 + count * 50;
    if bytes.len() < expected {
        return Err(Error::parse(pd(), "binary STL truncated"));
    }
    let f32_at = |off: usize| f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as f64;
    let mut tris = Vec::with_capacity(count);
    for i in 0..count {
        let base = 84 + i * 50 + 12; // skip the facet normal
        let mut tri = [Point3::ZERO; 3];
        for (k, p) in tri.iter_mut().enumerate() {
            let off = base + k * 12;
            *p = Point3::new(f32_at(off), f32_at(off + 4), f32_at(off + 8));
        }
        tris.push(tri);
    }
    Ok(tris)
}

/// Writes a polygonal OFF file.
pub fn write_off(path: &Path, vertices: &[Point3], faces: &[Vec<u32>]) -> Result<(), Error> {
    let mut out = String::new();
    out.push_str("OFF\n");
    out.push_str(&format!("{} {} 0\n", vertices.len(), faces.len()));
    for v in vertices {
        out.push_str(&format!("{} {} {}\n", v.x, v.y, v.z));
    }
    for f in faces {
        out.push_str(&f.len().to_string());
        for &i in f {
            out.push(' ');
            out.push_str(&i.to_string());
        }
        out.push('\n');
    }
    write_text(path, &out)
}

/// Writes a polygonal OBJ file (v/f records only).
pub fn write_obj(path: &Path, vertices: &[Point3], faces: &[Vec<u32>]) -> Result<(), Error> {
    let mut out = String::new();
    for v in vertices {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for f in faces {
        out.push('f');
        for &i in f {
            out.push(' ');
            out.push_str(&(i + 1).to_string());
        }
        out.push('\n');
    }
    write_text(path, &out)
}

pub(crate) fn write_text(path: &Path, contents: &str) -> Result<(), Error> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;
    use std::io::Write;

    fn tmp(name: &str, contents: &[u8]) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("vorocrust-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents).unwrap();
        path
    }

    #[test]
    fn off_unit_cube_roundtrip() {
        let cube = shapes::unit_cube();
        let faces: Vec<Vec<u32>> = cube.triangles.iter().map(|t| t.to_vec()).collect();
        let path = tmp("cube.off", b"");
        write_off(&path, &cube.vertices, &faces).unwrap();
        let loaded = load_mesh(&path, MeshFormat::Off, true).unwrap();
        assert_eq!(loaded.vertices.len(), 8);
        assert_eq!(loaded.triangles.len(), 12);
        assert_eq!(loaded.edges.len(), 18);
        assert_eq!(loaded.euler_characteristic(), 2);
    }

    #[test]
    fn obj_duplicate_vertex_is_welded() {
        // A tetrahedron with one vertex written twice.
        let obj = b"v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv 0 0 1\nf 1 3 2\nf 1 2 4\nf 2 3 5\nf 1 4 3\n";
        let path = tmp("tet_dup.obj", obj);
        let mesh = load_mesh(&path, MeshFormat::Obj, true).unwrap();
        assert_eq!(mesh.vertices.len(), 4);
        assert_eq!(mesh.triangles.len(), 4);
        assert_eq!(mesh.euler_characteristic(), 2);
    }

    #[test]
    fn open_mesh_fails_watertight_check() {
        let obj = b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
        let path = tmp("open.obj", obj);
        let err = load_mesh(&path, MeshFormat::Obj, true).unwrap_err();
        assert!(matches!(err, Error::NotWatertight(_)), "{err}");
        // The same mesh loads when watertightness is waived.
        let mesh = load_mesh(&path, MeshFormat::Obj, false).unwrap();
        assert_eq!(mesh.triangles.len(), 1);
    }

    #[test]
    fn binary_stl_roundtrip() {
        // One-triangle binary STL (open; watertight off).
        let mut bytes = vec![0u8; 84];
        bytes[80..84].copy_from_slice(&1u32.to_le_bytes());
        let tri: [[f32; 3]; 3] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        bytes.extend_from_slice(&[0u8; 12]);
        for v in tri {
            for c in v {
                bytes.extend_from_slice(&c.to_le_bytes());
            }
        }
        bytes.extend_from_slice(&[0u8; 2]);
        let path = tmp("tri.stl", &bytes);
        let mesh = load_mesh(&path, MeshFormat::Stl, false).unwrap();
        assert_eq!(mesh.triangles.len(), 1);
        assert_eq!(mesh.vertices.len(), 3);
    }

    #[test]
    fn quad_faces_are_fan_triangulated() {
        let off = b"OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        let path = tmp("quad.off", off);
        let mesh = load_mesh(&path, MeshFormat::Off, false).unwrap();
        assert_eq!(mesh.triangles.len(), 2);
    }
}
