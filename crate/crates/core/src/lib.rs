//! Conforming Voronoi meshing without clipping.
//!
//! The pipeline covers the domain boundary with a union of protection balls
//! (corner, edge and surface balls obtained by a recursive maximal
//! Poisson-disk refinement), eliminates half-covered seed pairs, places
//! mirrored Voronoi seed pairs on ball-triplet intersections, samples the
//! interior, and builds unclipped Voronoi cells whose opposite-label facets
//! form the output surface. A 2D pipeline handles planar straight-line
//! graphs with the same machinery.

pub mod cosmooth;
pub mod error;
pub mod index;
pub mod mesh;
pub mod geom;
pub mod params;
pub mod rngs;

pub use error::Error;
pub use geom::{Aabb, ConvexPolyhedron, Plane, Point3, Sphere, Vec3};
pub use mesh::{InputComplex, Strata};
pub use params::{Parameters, Sizing};

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
