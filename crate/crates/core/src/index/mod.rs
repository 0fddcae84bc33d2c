//! Proximity acceleration: boundary supersample trees with on-the-fly
//! co-smoothness filtering, and ball trees with Lipschitz-bounded query
//! radii.

mod balls;
mod boundary;
mod kdtree;

pub use balls::{overlap_query_radius, BallEntry, BallIndex};
pub use boundary::BoundaryIndex;
pub use kdtree::{KdTree, NearestIter};
