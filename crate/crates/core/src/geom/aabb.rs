use super::vec::Vec3;
use serde::{Deserialize, Serialize};

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Vec3::splat(f64::INFINITY),
            max: Vec3::splat(f64::NEG_INFINITY),
        }
    }

    pub fn from_points<I: IntoIterator<Item = Vec3>>(points: I) -> Self {
        let mut b = Aabb::empty();
        for p in points {
            b.insert(p);
        }
        b
    }

    pub fn insert(&mut self, p: Vec3) {
        self.min = self.min.min_by_component(p);
        self.max = self.max.max_by_component(p);
    }

    pub fn merge(&mut self, o: &Aabb) {
        self.min = self.min.min_by_component(o.min);
        self.max = self.max.max_by_component(o.max);
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn volume(&self) -> f64 {
        let d = self.max - self.min;
        (d.x * d.y * d.z).max(0.0)
    }

    /// Box scaled about its center by the given factor.
    pub fn expanded(&self, factor: f64) -> Aabb {
        let c = self.center();
        let h = (self.max - self.min) * (0.5 * factor);
        Aabb {
            min: c - h,
            max: c + h,
        }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    /// Squared distance from a point to the box (zero inside).
    pub fn distance_squared(&self, p: Vec3) -> f64 {
        let mut d2 = 0.0;
        for axis in 0..3 {
            let v = p.component(axis);
            let lo = self.min.component(axis);
            let hi = self.max.component(axis);
            if v < lo {
                d2 += (lo - v) * (lo - v);
            } else if v > hi {
                d2 += (v - hi) * (v - hi);
            }
        }
        d2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_and_distance() {
        let b = Aabb::from_points([Vec3::ZERO, Vec3::splat(1.0)]);
        let e = b.expanded(3.0);
        assert_eq!(e.min, Vec3::splat(-1.0));
        assert_eq!(e.max, Vec3::splat(2.0));
        assert_eq!(b.distance_squared(Vec3::new(2.0, 0.5, 0.5)), 1.0);
        assert_eq!(b.distance_squared(Vec3::splat(0.5)), 0.0);
    }
}
