//! Relaxed co-smoothness tests.
//!
//! Two boundary points are co-smooth when a path within one stratum connects
//! them with orientation vectors deviating by at most `theta_sharp`. The
//! relaxed test used everywhere replaces path computation with two angular
//! checks against small double cones around the sample's own face:
//!
//! 1. same stratum: the two orientation vectors (edge direction on creases,
//!    facet normal on patches, consistently oriented within the stratum)
//!    deviate by at most `theta_sharp`;
//! 2. the displacement between the points stays within `theta_sharp` of the
//!    crease line, or within `theta_sharp` of the patch tangent plane.
//!
//! Across strata only the displacement cone of the sample's face applies;
//! corner samples are never co-smooth with anything but themselves; samples
//! of the same kind on different strata are never co-smooth. The test may
//! err on the co-smooth side; late violations are caught against concrete
//! subfaces and resolved by shrinking.

use crate::geom::Vec3;

/// Where a boundary point lives and how its face is oriented.
#[derive(Clone, Copy, Debug)]
pub enum PointCtx {
    Corner { vertex: u32 },
    Crease { crease: u32, dir: Vec3 },
    Patch { patch: u32, normal: Vec3 },
}

impl PointCtx {
    pub fn kind_index(&self) -> usize {
        match self {
            PointCtx::Corner { .. } => 0,
            PointCtx::Crease { .. } => 1,
            PointCtx::Patch { .. } => 2,
        }
    }

    pub fn stratum(&self) -> u32 {
        match self {
            PointCtx::Corner { vertex } => *vertex,
            PointCtx::Crease { crease, .. } => *crease,
            PointCtx::Patch { patch, .. } => *patch,
        }
    }
}

/// Displacement within `theta` of the line spanned by `dir` (double cone).
fn along_line(dir: Vec3, u: Vec3, cos_theta: f64) -> bool {
    dir.dot(u).abs() >= cos_theta
}

/// Displacement within `theta` of the plane orthogonal to `normal`
/// (double cocone).
fn near_tangent(normal: Vec3, u: Vec3, sin_theta: f64) -> bool {
    normal.dot(u).abs() <= sin_theta
}

/// Relaxed co-smoothness of a query point `p` against a boundary sample `q`
/// carrying its face context. `u_pq` must be the unit vector from `q`
/// towards `p`, or None when the points coincide within tolerance (then the
/// displacement condition is waived).
pub fn cosmooth(p: &PointCtx, q: &PointCtx, u_pq: Option<Vec3>, theta_sharp: f64) -> bool {
    let cos_t = theta_sharp.cos();
    let sin_t = theta_sharp.sin();
    match q {
        // A corner is a stratum of its own: only the corner itself.
        PointCtx::Corner { vertex } => matches!(p, PointCtx::Corner { vertex: pv } if pv == vertex),
        PointCtx::Crease { crease: qc, dir: qd } => match p {
            PointCtx::Crease { crease: pc, dir: pd } => {
                if pc != qc {
                    return false;
                }
                qd.angle_to(*pd) <= theta_sharp
                    && u_pq.map_or(true, |u| along_line(*qd, u, cos_t))
            }
            // From a corner or a patch point, a crease sample is reachable
            // only along the crease's own line.
            PointCtx::Corner { .. } => u_pq.map_or(true, |u| along_line(*qd, u, cos_t)),
            PointCtx::Patch { .. } => false,
        },
        PointCtx::Patch { patch: qp, normal: qn } => match p {
            PointCtx::Patch { patch: pp, normal: pn } => {
                if pp != qp {
                    return false;
                }
                qn.angle_to(*pn) <= theta_sharp
                    && u_pq.map_or(true, |u| near_tangent(*qn, u, sin_t))
            }
            // Corners and crease points sit on the patch closure; they reach
            // patch samples along near-tangent displacements.
            PointCtx::Corner { .. } | PointCtx::Crease { .. } => {
                u_pq.map_or(true, |u| near_tangent(*qn, u, sin_t))
            }
        },
    }
}

/// Unit displacement helper: from `q` to `p`, or None below `eps`.
pub fn unit_towards(p: crate::geom::Point3, q: crate::geom::Point3, eps: f64) -> Option<Vec3> {
    let d = p - q;
    if d.norm() <= eps {
        None
    } else {
        d.normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point3;

    const THETA: f64 = 60.0 * std::f64::consts::PI / 180.0;

    #[test]
    fn coplanar_patch_points_are_cosmooth() {
        // p in the plane of the sample's facet: displacement is in-plane.
        let n = Vec3::new(0.0, 0.0, 1.0);
        let q = PointCtx::Patch { patch: 0, normal: n };
        let p = PointCtx::Patch { patch: 0, normal: n };
        let u = unit_towards(Point3::new(1.0, 0.3, 0.0), Point3::ZERO, 1e-12);
        assert!(cosmooth(&p, &q, u, THETA));
    }

    #[test]
    fn perpendicular_cube_faces_fail_normal_test() {
        let q = PointCtx::Patch { patch: 0, normal: Vec3::new(0.0, 0.0, 1.0) };
        let p = PointCtx::Patch { patch: 0, normal: Vec3::new(1.0, 0.0, 0.0) };
        // Same stratum id on purpose: the 90 degree normal deviation alone
        // must fail the test.
        let u = unit_towards(Point3::new(1.0, 0.0, 1.0), Point3::ZERO, 1e-12);
        assert!(!cosmooth(&p, &q, u, THETA));
    }

    #[test]
    fn straight_crease_is_cosmooth() {
        let d = Vec3::new(1.0, 0.0, 0.0);
        let q = PointCtx::Crease { crease: 2, dir: d };
        let p = PointCtx::Crease { crease: 2, dir: d };
        let u = unit_towards(Point3::new(5.0, 0.0, 0.0), Point3::ZERO, 1e-12);
        assert!(cosmooth(&p, &q, u, THETA));
        // Also backwards along the crease (double cone).
        let u = unit_towards(Point3::new(-5.0, 0.0, 0.0), Point3::ZERO, 1e-12);
        assert!(cosmooth(&p, &q, u, THETA));
    }

    #[test]
    fn different_strata_of_same_kind_are_never_cosmooth() {
        let d = Vec3::new(1.0, 0.0, 0.0);
        let q = PointCtx::Crease { crease: 2, dir: d };
        let p = PointCtx::Crease { crease: 3, dir: d };
        assert!(!cosmooth(&p, &q, None, THETA));
        let n = Vec3::new(0.0, 0.0, 1.0);
        let q = PointCtx::Patch { patch: 0, normal: n };
        let p = PointCtx::Patch { patch: 1, normal: n };
        assert!(!cosmooth(&p, &q, None, THETA));
    }

    #[test]
    fn corner_samples_match_only_their_own_corner() {
        let q = PointCtx::Corner { vertex: 4 };
        assert!(cosmooth(&PointCtx::Corner { vertex: 4 }, &q, None, THETA));
        assert!(!cosmooth(&PointCtx::Corner { vertex: 5 }, &q, None, THETA));
        let p = PointCtx::Patch { patch: 0, normal: Vec3::new(0.0, 0.0, 1.0) };
        assert!(!cosmooth(&p, &q, None, THETA));
    }

    #[test]
    fn crease_sample_perpendicular_to_patch_point_is_not_cosmooth() {
        // Patch point away from the crease, displacement perpendicular to
        // the crease direction: never co-smooth, so the crease bounds the
        // patch point's sizing.
        let q = PointCtx::Crease { crease: 0, dir: Vec3::new(1.0, 0.0, 0.0) };
        let p = PointCtx::Patch { patch: 0, normal: Vec3::new(0.0, 0.0, 1.0) };
        let u = unit_towards(Point3::new(0.0, 0.5, 0.0), Point3::ZERO, 1e-12);
        assert!(!cosmooth(&p, &q, u, THETA));
    }

    #[test]
    fn patch_sample_in_plane_of_crease_point_is_cosmooth() {
        // An edge ball near a flat adjacent patch: displacement towards the
        // crease stays in the patch plane.
        let q = PointCtx::Patch { patch: 0, normal: Vec3::new(0.0, 0.0, 1.0) };
        let p = PointCtx::Crease { crease: 0, dir: Vec3::new(1.0, 0.0, 0.0) };
        let u = unit_towards(Point3::new(0.0, 0.0, 0.0), Point3::new(0.3, 0.4, 0.0), 1e-12);
        assert!(cosmooth(&p, &q, u, THETA));
        // But a patch sample reached along its normal is not.
        let u = unit_towards(Point3::new(0.3, 0.4, 1.0), Point3::new(0.3, 0.4, 0.0), 1e-12);
        assert!(!cosmooth(&p, &q, u, THETA));
    }

    #[test]
    fn sphere_chord_threshold() {
        // Points on a unit sphere at angular distance phi: normals deviate
        // by phi, displacement leaves the tangent plane by phi/2.
        let check = |phi: f64| {
            let a = Point3::new(0.0, 0.0, 1.0);
            let b = Point3::new(phi.sin(), 0.0, phi.cos());
            let q = PointCtx::Patch { patch: 0, normal: b };
            let p = PointCtx::Patch { patch: 0, normal: a };
            cosmooth(&p, &q, unit_towards(a, b, 1e-12), THETA)
        };
        assert!(check(THETA - 0.01));
        assert!(!check(THETA + 0.01));
    }
}
