use super::vec::Vec3;

/// Distance from a point to a segment, with the closest point.
pub fn distance_point_segment(p: Vec3, a: Vec3, b: Vec3) -> (f64, Vec3) {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 <= f64::MIN_POSITIVE {
        return (p.distance(a), a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    let q = a + ab * t;
    (p.distance(q), q)
}

/// Distance from a point to a triangle, with the closest point
/// (vertex / edge / interior region classification per Ericson).
pub fn distance_point_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> (f64, Vec3) {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (p.distance(a), a);
    }

    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (p.distance(b), b);
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        let q = a + ab * t;
        return (p.distance(q), q);
    }

    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (p.distance(c), c);
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        let q = a + ac * t;
        return (p.distance(q), q);
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        let q = b + (c - b) * t;
        return (p.distance(q), q);
    }

    // Interior projection. Degenerate triangles never reach here: a zero
    // normal forces one of the edge/vertex regions above.
    let denom = va + vb + vc;
    if denom.abs() <= f64::MIN_POSITIVE {
        let (de, qe) = distance_point_segment(p, a, b);
        let (df, qf) = distance_point_segment(p, a, c);
        let (dg, qg) = distance_point_segment(p, b, c);
        let mut best = (de, qe);
        if df < best.0 {
            best = (df, qf);
        }
        if dg < best.0 {
            best = (dg, qg);
        }
        return best;
    }
    let v = vb / denom;
    let w = vc / denom;
    let q = a + ab * v + ac * w;
    (p.distance(q), q)
}
