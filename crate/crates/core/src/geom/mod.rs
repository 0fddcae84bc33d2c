//! Geometric kernel: vectors, planes, spheres, convex polyhedra and the
//! element-quality formulas.
//!
//! Everything here is pure and tolerance-based; tolerances are relative to a
//! caller-supplied scale (typically the diagonal of the input bounding box).

mod aabb;
mod dist;
mod plane;
mod poly;
mod quality;
mod sphere;
mod vec;

pub use aabb::Aabb;
pub use dist::{distance_point_segment, distance_point_triangle};
pub use plane::Plane;
pub use poly::{ConvexPolyhedron, Face, FaceTag};
pub use quality::{aspect_ratio, inscribed_sphere, min_enclosing_sphere, triangle_quality};
pub use sphere::{sphere_triplet_points, Sphere, TripletPoints};
pub use vec::Vec3;

/// Positions and directions share one representation.
pub type Point3 = Vec3;

/// Default relative epsilon for geometric comparisons.
pub const REL_EPS: f64 = 1e-9;
