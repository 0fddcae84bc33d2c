use super::poly::ConvexPolyhedron;
use super::sphere::Sphere;
use super::vec::Vec3;
use crate::error::Error;
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Triangle quality 6S / (sqrt(3) h P): S area, h longest edge, P half the
/// perimeter. 1 for equilateral, 0 for degenerate.
pub fn triangle_quality(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let bc = c - b;
    let area = 0.5 * ab.cross(ac).norm();
    let la = ab.norm();
    let lb = ac.norm();
    let lc = bc.norm();
    let h = la.max(lb).max(lc);
    let p = 0.5 * (la + lb + lc);
    let denom = 3.0_f64.sqrt() * h * p;
    if denom > 0.0 {
        (6.0 * area / denom).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Minimum enclosing sphere (Welzl, move-to-front) of a point set.
pub fn min_enclosing_sphere(points: &[Vec3]) -> Option<Sphere> {
    if points.is_empty() {
        return None;
    }
    let mut idx: Vec<usize> = (0..points.len()).collect();
    // Fixed seed keeps aspect_ratio deterministic.
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d62_7371);
    idx.shuffle(&mut rng);
    let pts: Vec<Vec3> = idx.into_iter().map(|i| points[i]).collect();
    let mut support: Vec<Vec3> = Vec::with_capacity(4);
    Some(welzl(&pts, pts.len(), &mut support))
}

fn welzl(pts: &[Vec3], n: usize, support: &mut Vec<Vec3>) -> Sphere {
    if n == 0 || support.len() == 4 {
        return sphere_of_support(support);
    }
    let p = pts[n - 1];
    let s = welzl(pts, n - 1, support);
    if s.radius > 0.0 && s.center.distance_squared(p) <= s.radius * s.radius * (1.0 + 1e-12) {
        return s;
    }
    support.push(p);
    let s = welzl(pts, n - 1, support);
    support.pop();
    s
}

fn sphere_of_support(support: &[Vec3]) -> Sphere {
    match support.len() {
        0 => Sphere {
            center: Vec3::ZERO,
            radius: 0.0,
        },
        1 => Sphere {
            center: support[0],
            radius: 0.0,
        },
        2 => {
            let c = (support[0] + support[1]) * 0.5;
            Sphere {
                center: c,
                radius: c.distance(support[0]),
            }
        }
        3 => circumsphere3(support[0], support[1], support[2]),
        _ => circumsphere4(support[0], support[1], support[2], support[3]),
    }
}

/// Circumsphere of three points (circle in their plane).
fn circumsphere3(a: Vec3, b: Vec3, c: Vec3) -> Sphere {
    let ab = b - a;
    let ac = c - a;
    let n = ab.cross(ac);
    let n2 = n.norm_squared();
    if n2 <= f64::MIN_POSITIVE {
        // Collinear: fall back to the longest-span pair.
        let mut best = sphere_of_support(&[a, b]);
        for pair in [[a, c], [b, c]] {
            let s = sphere_of_support(&pair);
            if s.radius > best.radius {
                best = s;
            }
        }
        return best;
    }
    let rel = (ab * ac.norm_squared() - ac * ab.norm_squared()).cross(n) / (2.0 * n2);
    let center = a + rel;
    Sphere {
        center,
        radius: rel.norm(),
    }
}

/// Circumsphere of four points via the linear system.
fn circumsphere4(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> Sphere {
    let rows = [b - a, c - a, d - a];
    let rhs = [
        0.5 * (b.norm_squared() - a.norm_squared() - 2.0 * a.dot(b - a)),
        0.5 * (c.norm_squared() - a.norm_squared() - 2.0 * a.dot(c - a)),
        0.5 * (d.norm_squared() - a.norm_squared() - 2.0 * a.dot(d - a)),
    ];
    match solve3(rows, rhs) {
        Some(rel) => {
            let center = a + rel;
            Sphere {
                center,
                radius: rel.norm(),
            }
        }
        None => circumsphere3(a, b, c),
    }
}

fn solve3(m: [Vec3; 3], b: [f64; 3]) -> Option<Vec3> {
    let det = m[0].dot(m[1].cross(m[2]));
    if det.abs() <= f64::MIN_POSITIVE {
        return None;
    }
    let x = Vec3::new(b[0], b[1], b[2]);
    let col = |k: usize| Vec3::new(m[0].component(k), m[1].component(k), m[2].component(k));
    let c0 = col(0);
    let c1 = col(1);
    let c2 = col(2);
    let d0 = x.dot(c1.cross(c2));
    let d1 = c0.dot(x.cross(c2));
    let d2 = c0.dot(c1.cross(x));
    Some(Vec3::new(d0 / det, d1 / det, d2 / det))
}

/// Chebyshev center: the center and radius of the largest inscribed sphere
/// of the convex polyhedron, solved as a small linear program.
pub fn inscribed_sphere(poly: &ConvexPolyhedron) -> Result<(Vec3, f64), Error> {
    let planes: Vec<_> = poly
        .faces
        .iter()
        .filter_map(|f| poly.face_plane(f))
        .collect();
    if planes.len() < 4 {
        return Err(Error::DegenerateCell);
    }
    // Shift so that the vertex average (interior for a non-degenerate convex
    // cell) is the origin; then all offsets are positive and the LP
    //   max r  s.t.  n_i . x + r <= d_i,  x free, r >= 0
    // has an initial basic feasible solution at the origin.
    let shift = poly.vertices.iter().fold(Vec3::ZERO, |s, &v| s + v) / poly.vertices.len() as f64;
    let rows: Vec<[f64; 7]> = planes
        .iter()
        .map(|p| {
            let n = p.normal();
            [n.x, -n.x, n.y, -n.y, n.z, -n.z, 1.0]
        })
        .collect();
    let rhs: Vec<f64> = planes.iter().map(|p| -p.signed_distance(shift)).collect();
    if rhs.iter().any(|&d| d < 0.0) {
        // Vertex average outside a face plane: flat or inverted cell.
        return Err(Error::DegenerateCell);
    }
    let mut objective = [0.0; 7];
    objective[6] = 1.0;
    let solution = simplex_max(&rows, &rhs, &objective).ok_or(Error::DegenerateCell)?;
    let x = Vec3::new(
        solution[0] - solution[1],
        solution[2] - solution[3],
        solution[4] - solution[5],
    );
    let r = solution[6];
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::DegenerateCell);
    }
    Ok((x + shift, r))
}

/// Ratio of the smallest circumscribing sphere radius to the largest
/// inscribed sphere radius of a convex cell. >= 1 up to tolerance.
pub fn aspect_ratio(poly: &ConvexPolyhedron) -> Result<f64, Error> {
    let circ = min_enclosing_sphere(&poly.vertices).ok_or(Error::DegenerateCell)?;
    let (_, r_in) = inscribed_sphere(poly)?;
    Ok(circ.radius / r_in)
}

/// Dense one-phase primal simplex for `max c.y, A y <= b, y >= 0` with
/// b >= 0. Bland's rule, so it cannot cycle. Returns the primal solution.
fn simplex_max(a: &[[f64; 7]], b: &[f64], c: &[f64; 7]) -> Option<Vec<f64>> {
    let m = a.len();
    let n = 7;
    let cols = n + m + 1;
    // Tableau rows: m constraint rows + objective row.
    let mut t = vec![vec![0.0; cols]; m + 1];
    for (i, row) in a.iter().enumerate() {
        t[i][..n].copy_from_slice(row);
        t[i][n + i] = 1.0;
        t[i][cols - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    for _ in 0..20_000 {
        // Entering variable: smallest index with negative reduced cost.
        let mut enter = None;
        for j in 0..cols - 1 {
            if t[m][j] < -1e-12 {
                enter = Some(j);
                break;
            }
        }
        let Some(enter) = enter else {
            // Optimal.
            let mut y = vec![0.0; n];
            for (i, &bi) in basis.iter().enumerate() {
                if bi < n {
                    y[bi] = t[i][cols - 1];
                }
            }
            return Some(y);
        };
        // Leaving variable: min ratio, ties by smallest basis index.
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > 1e-12 {
                let ratio = t[i][cols - 1] / t[i][enter];
                if ratio < best - 1e-15 || (ratio < best + 1e-15 && leave.map_or(true, |l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let leave = leave?; // Unbounded should not happen for bounded cells.
        let piv = t[leave][enter];
        for j in 0..cols {
            t[leave][j] /= piv;
        }
        for i in 0..m + 1 {
            if i != leave && t[i][enter].abs() > 0.0 {
                let f = t[i][enter];
                for j in 0..cols {
                    t[i][j] -= f * t[leave][j];
                }
            }
        }
        basis[leave] = enter;
    }
    None
}
