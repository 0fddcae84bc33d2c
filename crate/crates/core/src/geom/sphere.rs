use super::vec::Vec3;
use crate::error::Error;

/// Ball/sphere with strictly positive radius.
#[derive(Clone, Copy, Debug)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Vec3, radius: f64) -> Sphere {
        debug_assert!(radius > 0.0, "sphere radius must be positive");
        Sphere { center, radius }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        self.center.distance_squared(p) <= self.radius * self.radius
    }

    pub fn overlaps(&self, o: &Sphere) -> bool {
        self.center.distance(o.center) < self.radius + o.radius
    }
}

/// Intersection of three sphere boundaries.
#[derive(Clone, Copy, Debug)]
pub enum TripletPoints {
    None,
    /// Tangential contact.
    One(Vec3),
    /// Two points; `up` lies on the positive side of
    /// (c2 - c1) x (c3 - c1), `down` is its mirror image across the plane
    /// of the centers.
    Two { up: Vec3, down: Vec3 },
}

/// Intersects the boundaries of three spheres.
///
/// Reduces to two radical planes plus the first sphere. Centers that are
/// collinear (or coincident) within `1e-12 * scale` are rejected as
/// degenerate; tangency within `1e-10 * max radius` collapses to one point.
pub fn sphere_triplet_points(
    s1: &Sphere,
    s2: &Sphere,
    s3: &Sphere,
    scale: f64,
) -> Result<TripletPoints, Error> {
    let c1 = s1.center;
    let n1 = s2.center - c1;
    let n2 = s3.center - c1;
    let axis = n1.cross(n2);
    let eps = 1e-12 * scale;
    if axis.norm() <= eps * eps.max(n1.norm().max(n2.norm())) || n1.norm() <= eps || n2.norm() <= eps
    {
        return Err(Error::DegenerateTriplet);
    }

    // Radical plane of (s1, s2): 2 (c2 - c1) . x = |c2|^2 - r2^2 - |c1|^2 + r1^2.
    let d1 = 0.5
        * (s2.center.norm_squared() - s2.radius * s2.radius - c1.norm_squared()
            + s1.radius * s1.radius);
    let d2 = 0.5
        * (s3.center.norm_squared() - s3.radius * s3.radius - c1.norm_squared()
            + s1.radius * s1.radius);

    // Point on the intersection line of the two radical planes: solve within
    // the span of (n1, n2).
    let a11 = n1.dot(n1);
    let a12 = n1.dot(n2);
    let a22 = n2.dot(n2);
    let det = a11 * a22 - a12 * a12;
    if det.abs() <= f64::MIN_POSITIVE.max(1e-30 * a11 * a22) {
        return Err(Error::DegenerateTriplet);
    }
    // Solve n1.x = d1, n2.x = d2 with x = c1 + s*n1 + t*n2.
    let r1 = d1 - n1.dot(c1);
    let r2 = d2 - n2.dot(c1);
    let s = (r1 * a22 - r2 * a12) / det;
    let t = (r2 * a11 - r1 * a12) / det;
    let base = c1 + n1 * s + n2 * t;

    let u = match axis.normalized() {
        Some(u) => u,
        None => return Err(Error::DegenerateTriplet),
    };

    // |base + h*u - c1|^2 = r1^2, with u orthogonal to (base - c1)'s offset
    // along the line direction handled by the quadratic.
    let w = base - c1;
    let h2 = s1.radius * s1.radius - w.norm_squared() + w.dot(u) * w.dot(u);
    // u is orthogonal to both n1 and n2, and w lies in their span, so
    // w.dot(u) vanishes up to rounding.
    let max_r = s1.radius.max(s2.radius).max(s3.radius);
    let tangent_tol = 0.5e-10 * max_r;
    if h2 < -(tangent_tol * tangent_tol) {
        return Ok(TripletPoints::None);
    }
    let h = h2.max(0.0).sqrt();
    if h <= tangent_tol {
        return Ok(TripletPoints::One(base));
    }
    Ok(TripletPoints::Two {
        up: base + u * h,
        down: base - u * h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(center: Vec3) -> Sphere {
        Sphere::new(center, 1.0)
    }

    #[test]
    fn equilateral_unit_spheres() {
        let s1 = unit(Vec3::new(0.0, 0.0, 0.0));
        let s2 = unit(Vec3::new(1.0, 0.0, 0.0));
        let s3 = unit(Vec3::new(0.5, 3.0_f64.sqrt() / 2.0, 0.0));
        let pts = sphere_triplet_points(&s1, &s2, &s3, 1.0).unwrap();
        match pts {
            TripletPoints::Two { up, down } => {
                let expect_xy = Vec3::new(0.5, 3.0_f64.sqrt() / 6.0, 0.0);
                let expect_z = (2.0_f64 / 3.0).sqrt();
                assert!((up - expect_xy - Vec3::new(0.0, 0.0, expect_z)).norm() < 1e-12);
                assert!((down - expect_xy + Vec3::new(0.0, 0.0, expect_z)).norm() < 1e-12);
                // Oracle: both points lie on all three spheres.
                for g in [up, down] {
                    for s in [&s1, &s2, &s3] {
                        assert!((g.distance(s.center) - s.radius).abs() < 1e-9);
                    }
                }
            }
            other => panic!("expected two points, got {other:?}"),
        }
    }

    #[test]
    fn disjoint_spheres_yield_none() {
        let s1 = unit(Vec3::new(0.0, 0.0, 0.0));
        let s2 = unit(Vec3::new(3.0, 0.0, 0.0));
        let s3 = unit(Vec3::new(0.0, 3.0, 0.0));
        assert!(matches!(
            sphere_triplet_points(&s1, &s2, &s3, 1.0).unwrap(),
            TripletPoints::None
        ));
    }

    #[test]
    fn identical_spheres_are_degenerate() {
        let s1 = unit(Vec3::new(0.0, 0.0, 0.0));
        let s3 = unit(Vec3::new(0.0, 1.0, 0.0));
        let err = sphere_triplet_points(&s1, &s1.clone(), &s3, 1.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateTriplet));
    }

    #[test]
    fn collinear_centers_are_degenerate() {
        let s1 = unit(Vec3::new(0.0, 0.0, 0.0));
        let s2 = unit(Vec3::new(1.0, 0.0, 0.0));
        let s3 = unit(Vec3::new(2.0, 0.0, 0.0));
        assert!(matches!(
            sphere_triplet_points(&s1, &s2, &s3, 1.0),
            Err(Error::DegenerateTriplet)
        ));
    }

    #[test]
    fn points_mirror_across_center_plane() {
        let s1 = Sphere::new(Vec3::new(0.1, -0.2, 0.3), 1.1);
        let s2 = Sphere::new(Vec3::new(1.0, 0.1, 0.2), 0.9);
        let s3 = Sphere::new(Vec3::new(0.4, 0.9, -0.1), 1.0);
        if let TripletPoints::Two { up, down } = sphere_triplet_points(&s1, &s2, &s3, 1.0).unwrap()
        {
            let mid = (up + down) * 0.5;
            let n = (s2.center - s1.center).cross(s3.center - s1.center);
            // Midpoint in the plane of the centers.
            assert!(n.normalized().unwrap().dot(mid - s1.center).abs() < 1e-12);
            // Up point on the positive side.
            assert!(n.dot(up - s1.center) > 0.0);
            for g in [up, down] {
                for s in [&s1, &s2, &s3] {
                    assert!((g.distance(s.center) - s.radius).abs() < 1e-9 * s.radius);
                }
            }
        } else {
            panic!("expected two points");
        }
    }
}
