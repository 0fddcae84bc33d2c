use super::vec::Vec3;

/// Oriented plane in signed-distance form `normal . x = offset`.
///
/// The half-space kept by clipping is `normal . x <= offset`.
#[derive(Clone, Copy, Debug)]
pub struct Plane {
    normal: Vec3,
    offset: f64,
}

impl Plane {
    /// Builds a plane from any non-zero normal; the normal is normalized.
    pub fn new(normal: Vec3, offset: f64) -> Option<Plane> {
        let n = normal.norm();
        normal.normalized().map(|u| Plane {
            normal: u,
            offset: offset / n,
        })
    }

    /// Plane through a point with the given (non-zero) normal direction.
    pub fn from_point_normal(point: Vec3, normal: Vec3) -> Option<Plane> {
        normal.normalized().map(|u| Plane {
            normal: u,
            offset: u.dot(point),
        })
    }

    /// Perpendicular bisector of the segment (a, b), oriented so that `a`
    /// is on the non-positive side. Requires distinct points.
    pub fn bisector(a: Vec3, b: Vec3) -> Option<Plane> {
        Plane::from_point_normal((a + b) * 0.5, b - a)
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed distance; positive on the clipped-away side.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn flipped(&self) -> Plane {
        Plane {
            normal: -self.normal,
            offset: -self.offset,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisector_is_equidistant() {
        let a = Vec3::new(0.0, 0.0, 0.0);
        let b = Vec3::new(2.0, 2.0, 0.0);
        let pl = Plane::bisector(a, b).unwrap();
        assert!(pl.signed_distance(a) < 0.0);
        assert!(pl.signed_distance(b) > 0.0);
        assert!(pl.signed_distance((a + b) * 0.5).abs() < 1e-15);
        assert!((pl.normal().norm() - 1.0).abs() < 1e-12);
    }
}
