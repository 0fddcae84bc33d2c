//! Ball trees keyed by center, one per ball type, with query radii bounded
//! by the Lipschitz condition.
//!
//! The bounded radii are complete only while the Lipschitz condition holds
//! within a type class. After any shrink the class is flagged dirty and
//! queries fall back to the class's running maximum radius, which is always
//! a complete bound since radii never grow.

use super::kdtree::KdTree;
use crate::geom::{Point3, Sphere};
use std::collections::HashMap;

/// Tree entry: ball id plus its radius at insertion time. Radius updates
/// reinsert, so entries are never stale.
#[derive(Clone, Copy, Debug)]
pub struct BallEntry {
    pub ball: u32,
    pub radius: f64,
}

/// Query radius that catches every ball overlapping one of radius `r`
/// within an L-Lipschitz class.
pub fn overlap_query_radius(r: f64, lipschitz: f64) -> f64 {
    2.0 / (1.0 - lipschitz) * r
}

#[derive(Clone, Debug)]
pub struct BallIndex {
    trees: [KdTree<BallEntry>; 3],
    item_of_ball: HashMap<u32, (usize, u32)>,
    r_max: [f64; 3],
    clean: [bool; 3],
    lipschitz: f64,
}

impl BallIndex {
    pub fn new(lipschitz: f64) -> BallIndex {
        BallIndex {
            trees: [KdTree::new(), KdTree::new(), KdTree::new()],
            item_of_ball: HashMap::new(),
            r_max: [0.0; 3],
            clean: [true; 3],
            lipschitz,
        }
    }

    pub fn class_len(&self, class: usize) -> usize {
        self.trees[class].len()
    }

    pub fn insert(&mut self, ball: u32, class: usize, center: Point3, radius: f64) {
        let item = self.trees[class].insert(center, BallEntry { ball, radius });
        self.item_of_ball.insert(ball, (class, item));
        self.r_max[class] = self.r_max[class].max(radius);
        // A fresh radius is only guaranteed Lipschitz against its nearest
        // neighbor, not the whole class.
        self.clean[class] = false;
    }

    /// Radius update as lazy delete + reinsert.
    pub fn update_radius(&mut self, ball: u32, center: Point3, radius: f64) {
        let (class, item) = *self.item_of_ball.get(&ball).expect("ball indexed");
        let rebuilt = self.trees[class].remove(item);
        if rebuilt {
            self.remap_class(class);
        }
        let item = self.trees[class].insert(center, BallEntry { ball, radius });
        self.item_of_ball.insert(ball, (class, item));
        self.clean[class] = false;
    }

    fn remap_class(&mut self, class: usize) {
        let tree = &self.trees[class];
        let ids: Vec<(u32, u32)> = (0..tree.generation_len() as u32)
            .map(|i| (tree.payload(i).ball, i))
            .collect();
        for (ball, item) in ids {
            self.item_of_ball.insert(ball, (class, item));
        }
    }

    pub fn mark_clean(&mut self, class: usize) {
        self.clean[class] = true;
    }

    pub fn is_clean(&self, class: usize) -> bool {
        self.clean[class]
    }

    /// Nearest ball center of a class.
    pub fn nearest_in_class(&self, class: usize, p: Point3) -> Option<(u32, f64, f64)> {
        self.trees[class]
            .nearest(p)
            .map(|(item, d)| {
                let e = self.trees[class].payload(item);
                (e.ball, e.radius, d)
            })
    }

    /// All balls containing `x`; complete for any class state.
    pub fn for_each_covering(&self, x: Point3, mut f: impl FnMut(u32, Point3, f64)) {
        for class in 0..3 {
            let tree = &self.trees[class];
            if tree.is_empty() {
                continue;
            }
            let bound = match tree.nearest(x) {
                Some((item, d)) => {
                    let e = tree.payload(item);
                    (e.radius + self.lipschitz * d) / (1.0 - self.lipschitz)
                }
                None => continue,
            };
            let radius = if self.clean[class] {
                bound.min(self.r_max[class])
            } else {
                self.r_max[class]
            };
            tree.for_each_in_ball(x, radius, |_, e, pos| {
                if pos.distance(x) <= e.radius {
                    f(e.ball, pos, e.radius);
                }
            });
        }
    }

    /// All balls overlapping the given sphere; complete for any class state.
    pub fn for_each_overlapping(&self, s: &Sphere, own_class: Option<usize>, mut f: impl FnMut(u32, Point3, f64)) {
        for class in 0..3 {
            let tree = &self.trees[class];
            if tree.is_empty() {
                continue;
            }
            let complete = s.radius + self.r_max[class];
            let radius = if self.clean[class] && own_class == Some(class) {
                overlap_query_radius(s.radius, self.lipschitz).min(complete)
            } else {
                complete
            };
            tree.for_each_in_ball(s.center, radius, |_, e, pos| {
                if pos.distance(s.center) < s.radius + e.radius {
                    f(e.ball, pos, e.radius);
                }
            });
        }
    }

    /// All ball centers within a fixed radius (no Lipschitz reasoning).
    pub fn for_each_center_within(&self, x: Point3, radius: f64, mut f: impl FnMut(u32, Point3, f64)) {
        for tree in &self.trees {
            tree.for_each_in_ball(x, radius, |_, e, pos| f(e.ball, pos, e.radius));
        }
    }

    /// Exhaustive iteration over one class (test/oracle support).
    pub fn scan_class(&self, class: usize, mut f: impl FnMut(u32, Point3, f64)) {
        let tree = &self.trees[class];
        for item in tree.iter_live() {
            let e = tree.payload(item);
            f(e.ball, tree.position(item), e.radius);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_radius_formula() {
        assert!((overlap_query_radius(1.0, 0.25) - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn isolated_ball_has_no_overlaps() {
        let mut idx = BallIndex::new(0.25);
        idx.insert(0, 2, Point3::ZERO, 1.0);
        idx.insert(1, 2, Point3::new(10.0, 0.0, 0.0), 1.0);
        let mut hits = Vec::new();
        idx.for_each_overlapping(&Sphere::new(Point3::ZERO, 1.0), Some(2), |b, _, _| hits.push(b));
        assert_eq!(hits, vec![0]); // only itself
    }

    #[test]
    fn covering_contains_own_center() {
        let mut idx = BallIndex::new(0.25);
        idx.insert(7, 1, Point3::new(1.0, 2.0, 3.0), 0.5);
        let mut hits = Vec::new();
        idx.for_each_covering(Point3::new(1.0, 2.0, 3.0), |b, _, _| hits.push(b));
        assert_eq!(hits, vec![7]);
        let mut hits = Vec::new();
        idx.for_each_covering(Point3::new(9.0, 9.0, 9.0), |b, _, _| hits.push(b));
        assert!(hits.is_empty());
    }

    #[test]
    fn queries_match_brute_force_on_lipschitz_sets() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let lipschitz = 0.25;
        for trial in 0..30 {
            // Random centers; enforce the Lipschitz property by relaxation.
            let n = 60;
            let centers: Vec<Point3> = (0..n)
                .map(|_| {
                    Point3::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    )
                })
                .collect();
            let mut radii: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.5)).collect();
            loop {
                let mut changed = false;
                for i in 0..n {
                    for j in 0..n {
                        let bound = radii[j] + lipschitz * centers[i].distance(centers[j]);
                        if radii[i] > bound {
                            radii[i] = bound;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            let mut idx = BallIndex::new(lipschitz);
            for i in 0..n {
                idx.insert(i as u32, 2, centers[i], radii[i]);
            }
            if trial % 2 == 0 {
                idx.mark_clean(2);
            }
            // Covering query.
            for _ in 0..40 {
                let x = Point3::new(
                    rng.gen_range(-1.2..1.2),
                    rng.gen_range(-1.2..1.2),
                    rng.gen_range(-1.2..1.2),
                );
                let mut got: Vec<u32> = Vec::new();
                idx.for_each_covering(x, |b, _, _| got.push(b));
                got.sort_unstable();
                let mut expect: Vec<u32> = (0..n as u32)
                    .filter(|&i| centers[i as usize].distance(x) <= radii[i as usize])
                    .collect();
                expect.sort_unstable();
                assert_eq!(got, expect);
            }
            // Overlap query.
            for i in (0..n).step_by(7) {
                let s = Sphere::new(centers[i], radii[i]);
                let mut got: Vec<u32> = Vec::new();
                idx.for_each_overlapping(&s, Some(2), |b, _, _| got.push(b));
                got.sort_unstable();
                let mut expect: Vec<u32> = (0..n as u32)
                    .filter(|&j| {
                        centers[j as usize].distance(s.center) < s.radius + radii[j as usize]
                    })
                    .collect();
                expect.sort_unstable();
                assert_eq!(got, expect);
            }
        }
    }

    #[test]
    fn radius_update_is_invisible_to_queries() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        let n = 100;
        let centers: Vec<Point3> = (0..n)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        let mut idx = BallIndex::new(0.25);
        let mut radii = vec![0.4; n];
        for i in 0..n {
            idx.insert(i as u32, 0, centers[i], radii[i]);
        }
        // Shrink many, forcing compactions.
        for i in 0..n {
            if i % 2 == 0 {
                radii[i] = 0.1 + 0.001 * i as f64;
                idx.update_radius(i as u32, centers[i], radii[i]);
            }
        }
        for _ in 0..50 {
            let x = Point3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let mut got: Vec<u32> = Vec::new();
            idx.for_each_covering(x, |b, _, _| got.push(b));
            got.sort_unstable();
            let mut expect: Vec<u32> = (0..n as u32)
                .filter(|&i| centers[i as usize].distance(x) <= radii[i as usize])
                .collect();
            expect.sort_unstable();
            assert_eq!(got, expect);
        }
    }
}
