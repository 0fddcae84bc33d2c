//! Point k-d tree with payloads, filtered nearest-neighbor search, radius
//! queries, incremental nearest iteration, and lazy deletion.

use crate::geom::Point3;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const BUCKET: usize = 16;
/// Rebuild threshold: fraction of dead items.
const GARBAGE_RATIO: f64 = 0.25;

#[derive(Clone, Debug)]
struct Item<T> {
    pos: Point3,
    payload: T,
    dead: bool,
}

#[derive(Clone, Debug)]
enum NodeKind {
    Leaf { items: Vec<u32> },
    Split { axis: u8, value: f64, left: u32, right: u32 },
}

#[derive(Clone, Debug)]
struct Node {
    kind: NodeKind,
}

/// K-d tree over points with attached payloads.
#[derive(Clone, Debug)]
pub struct KdTree<T> {
    items: Vec<Item<T>>,
    nodes: Vec<Node>,
    root: u32,
    live: usize,
    dead: usize,
}

impl<T: Clone> Default for KdTree<T> {
    fn default() -> Self {
        KdTree::new()
    }
}

impl<T: Clone> KdTree<T> {
    pub fn new() -> Self {
        KdTree {
            items: Vec::new(),
            nodes: vec![Node { kind: NodeKind::Leaf { items: Vec::new() } }],
            root: 0,
            live: 0,
            dead: 0,
        }
    }

    pub fn bulk(points: impl IntoIterator<Item = (Point3, T)>) -> Self {
        let mut tree = KdTree::new();
        tree.items = points
            .into_iter()
            .map(|(pos, payload)| Item { pos, payload, dead: false })
            .collect();
        tree.live = tree.items.len();
        tree.rebuild();
        tree
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    fn rebuild(&mut self) {
        self.items.retain(|it| !it.dead);
        self.live = self.items.len();
        self.dead = 0;
        self.nodes.clear();
        let mut ids: Vec<u32> = (0..self.items.len() as u32).collect();
        if ids.is_empty() {
            self.nodes.push(Node { kind: NodeKind::Leaf { items: Vec::new() } });
            self.root = 0;
        } else {
            self.root = self.build_recursive(&mut ids);
        }
    }

    fn build_recursive(&mut self, ids: &mut [u32]) -> u32 {
        if ids.len() <= BUCKET {
            self.nodes.push(Node { kind: NodeKind::Leaf { items: ids.to_vec() } });
            return (self.nodes.len() - 1) as u32;
        }
        // Median split on the widest axis.
        let mut lo = Point3::splat(f64::INFINITY);
        let mut hi = Point3::splat(f64::NEG_INFINITY);
        for &i in ids.iter() {
            lo = lo.min_by_component(self.items[i as usize].pos);
            hi = hi.max_by_component(self.items[i as usize].pos);
        }
        let extent = hi - lo;
        let axis = if extent.x >= extent.y && extent.x >= extent.z {
            0u8
        } else if extent.y >= extent.z {
            1
        } else {
            2
        };
        let mid = ids.len() / 2;
        ids.select_nth_unstable_by(mid, |&a, &b| {
            let va = self.items[a as usize].pos.component(axis as usize);
            let vb = self.items[b as usize].pos.component(axis as usize);
            va.partial_cmp(&vb).unwrap_or(Ordering::Equal)
        });
        let value = self.items[ids[mid] as usize].pos.component(axis as usize);
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            kind: NodeKind::Split { axis, value, left: u32::MAX, right: u32::MAX },
        });
        let (a, b) = ids.split_at_mut(mid);
        let left = self.build_recursive(a);
        let right = self.build_recursive(b);
        if let NodeKind::Split { left: l, right: r, .. } = &mut self.nodes[id as usize].kind {
            *l = left;
            *r = right;
        }
        id
    }

    /// Inserts by descending the existing splits; leaves split locally when
    /// they overflow (no rebalancing on update).
    pub fn insert(&mut self, pos: Point3, payload: T) -> u32 {
        let item_id = self.items.len() as u32;
        self.items.push(Item { pos, payload, dead: false });
        self.live += 1;
        let mut node = self.root;
        loop {
            match &self.nodes[node as usize].kind {
                NodeKind::Split { axis, value, left, right } => {
                    node = if pos.component(*axis as usize) <= *value { *left } else { *right };
                }
                NodeKind::Leaf { .. } => break,
            }
        }
        if let NodeKind::Leaf { items } = &mut self.nodes[node as usize].kind {
            items.push(item_id);
            if items.len() > 2 * BUCKET {
                self.split_leaf(node);
            }
        }
        item_id
    }

    fn split_leaf(&mut self, node: u32) {
        let mut ids = match &mut self.nodes[node as usize].kind {
            NodeKind::Leaf { items } => std::mem::take(items),
            _ => return,
        };
        ids.retain(|&i| !self.items[i as usize].dead);
        if ids.len() <= BUCKET {
            self.nodes[node as usize].kind = NodeKind::Leaf { items: ids };
            return;
        }
        let mut lo = Point3::splat(f64::INFINITY);
        let mut hi = Point3::splat(f64::NEG_INFINITY);
        for &i in &ids {
            lo = lo.min_by_component(self.items[i as usize].pos);
            hi = hi.max_by_component(self.items[i as usize].pos);
        }
        let extent = hi - lo;
        let axis = if extent.x >= extent.y && extent.x >= extent.z {
            0u8
        } else if extent.y >= extent.z {
            1
        } else {
            2
        };
        if extent.component(axis as usize) <= 0.0 {
            // All coincident; keep as an oversized leaf.
            self.nodes[node as usize].kind = NodeKind::Leaf { items: ids };
            return;
        }
        let mid = ids.len() / 2;
        ids.select_nth_unstable_by(mid, |&a, &b| {
            let va = self.items[a as usize].pos.component(axis as usize);
            let vb = self.items[b as usize].pos.component(axis as usize);
            va.partial_cmp(&vb).unwrap_or(Ordering::Equal)
        });
        let value = self.items[ids[mid] as usize].pos.component(axis as usize);
        let right_items = ids.split_off(mid);
        let left = self.nodes.len() as u32;
        self.nodes.push(Node { kind: NodeKind::Leaf { items: ids } });
        let right = self.nodes.len() as u32;
        self.nodes.push(Node { kind: NodeKind::Leaf { items: right_items } });
        self.nodes[node as usize].kind = NodeKind::Split { axis, value, left, right };
    }

    /// Lazy deletion; compaction rebuilds once a quarter of items are dead.
    /// Returns true when a rebuild invalidated previously issued item ids.
    pub fn remove(&mut self, item_id: u32) -> bool {
        let it = &mut self.items[item_id as usize];
        if !it.dead {
            it.dead = true;
            self.live -= 1;
            self.dead += 1;
            if self.dead as f64 >= GARBAGE_RATIO * self.items.len().max(4) as f64 {
                self.rebuild();
                return true;
            }
        }
        false
    }

    /// Live item ids.
    pub fn iter_live(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.items.len() as u32).filter(|&i| !self.items[i as usize].dead)
    }

    /// True when compaction invalidated previously returned item ids.
    pub fn generation_len(&self) -> usize {
        self.items.len()
    }

    pub fn payload(&self, item_id: u32) -> &T {
        &self.items[item_id as usize].payload
    }

    pub fn position(&self, item_id: u32) -> Point3 {
        self.items[item_id as usize].pos
    }

    /// Nearest live item.
    pub fn nearest(&self, q: Point3) -> Option<(u32, f64)> {
        self.nearest_filtered(q, |_, _| true)
    }

    /// Nearest live item accepted by the filter. Filtered-out items do not
    /// update the search radius, so the traversal keeps descending until the
    /// nearest accepted item is found.
    pub fn nearest_filtered(
        &self,
        q: Point3,
        mut accept: impl FnMut(&T, Point3) -> bool,
    ) -> Option<(u32, f64)> {
        if self.live == 0 {
            return None;
        }
        let mut best: Option<(u32, f64)> = None;
        self.nearest_rec(self.root, q, &mut accept, &mut best);
        best
    }

    fn nearest_rec(
        &self,
        node: u32,
        q: Point3,
        accept: &mut impl FnMut(&T, Point3) -> bool,
        best: &mut Option<(u32, f64)>,
    ) {
        match &self.nodes[node as usize].kind {
            NodeKind::Leaf { items } => {
                for &i in items {
                    let it = &self.items[i as usize];
                    if it.dead {
                        continue;
                    }
                    let d = it.pos.distance(q);
                    if best.map_or(true, |(_, bd)| d < bd) && accept(&it.payload, it.pos) {
                        *best = Some((i, d));
                    }
                }
            }
            NodeKind::Split { axis, value, left, right } => {
                let delta = q.component(*axis as usize) - value;
                let (near, far) = if delta <= 0.0 { (*left, *right) } else { (*right, *left) };
                self.nearest_rec(near, q, accept, best);
                if best.map_or(true, |(_, bd)| delta.abs() < bd) {
                    self.nearest_rec(far, q, accept, best);
                }
            }
        }
    }

    /// Visits every live item within the radius.
    pub fn for_each_in_ball(&self, q: Point3, radius: f64, mut f: impl FnMut(u32, &T, Point3)) {
        if self.live == 0 || !(radius >= 0.0) {
            return;
        }
        let mut stack = vec![self.root];
        while let Some(node) = stack.pop() {
            match &self.nodes[node as usize].kind {
                NodeKind::Leaf { items } => {
                    for &i in items {
                        let it = &self.items[i as usize];
                        if !it.dead && it.pos.distance(q) <= radius {
                            f(i, &it.payload, it.pos);
                        }
                    }
                }
                NodeKind::Split { axis, value, left, right } => {
                    let delta = q.component(*axis as usize) - value;
                    if delta <= radius {
                        stack.push(*left);
                    }
                    if -delta <= radius {
                        stack.push(*right);
                    }
                }
            }
        }
    }

    /// Iterates live items in increasing distance from the query.
    pub fn nearest_iter(&self, q: Point3) -> NearestIter<'_, T> {
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry { dist: 0.0, entry: Entry::Node(self.root) });
        NearestIter { tree: self, q, heap }
    }
}

enum Entry {
    Node(u32),
    Item(u32),
}

struct HeapEntry {
    dist: f64,
    entry: Entry,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap by distance; ties by nothing in particular but total.
        other.dist.partial_cmp(&self.dist).unwrap_or(Ordering::Equal)
    }
}

/// Best-first traversal yielding `(item id, distance)` in ascending order.
pub struct NearestIter<'a, T> {
    tree: &'a KdTree<T>,
    q: Point3,
    heap: BinaryHeap<HeapEntry>,
}

impl<'a, T: Clone> Iterator for NearestIter<'a, T> {
    type Item = (u32, f64);

    fn next(&mut self) -> Option<(u32, f64)> {
        while let Some(HeapEntry { dist, entry }) = self.heap.pop() {
            match entry {
                Entry::Item(i) => return Some((i, dist)),
                Entry::Node(n) => match &self.tree.nodes[n as usize].kind {
                    NodeKind::Leaf { items } => {
                        for &i in items {
                            let it = &self.tree.items[i as usize];
                            if !it.dead {
                                self.heap.push(HeapEntry {
                                    dist: it.pos.distance(self.q),
                                    entry: Entry::Item(i),
                                });
                            }
                        }
                    }
                    NodeKind::Split { axis, value, left, right } => {
                        let delta = self.q.component(*axis as usize) - value;
                        let (near, far) = if delta <= 0.0 { (*left, *right) } else { (*right, *left) };
                        // Children inherit the parent's lower bound; the far
                        // side additionally clears the splitting plane.
                        self.heap.push(HeapEntry { dist, entry: Entry::Node(near) });
                        self.heap.push(HeapEntry {
                            dist: dist.max(delta.abs()),
                            entry: Entry::Node(far),
                        });
                    }
                },
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, seed: u64) -> Vec<Point3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect()
    }

    #[test]
    fn nearest_matches_linear_scan() {
        let pts = random_points(500, 3);
        let tree = KdTree::bulk(pts.iter().map(|&p| (p, ())));
        for q in random_points(100, 4) {
            let (i, d) = tree.nearest(q).unwrap();
            let brute = pts
                .iter()
                .map(|p| p.distance(q))
                .fold(f64::INFINITY, f64::min);
            assert!((d - brute).abs() < 1e-12);
            assert!((tree.position(i).distance(q) - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn filtered_nearest_matches_filtered_scan() {
        let pts = random_points(400, 5);
        let tree = KdTree::bulk(pts.iter().enumerate().map(|(i, &p)| (p, i)));
        for q in random_points(50, 6) {
            // Accept only payloads divisible by 3.
            let got = tree.nearest_filtered(q, |&i, _| i % 3 == 0);
            let brute = pts
                .iter()
                .enumerate()
                .filter(|(i, _)| i % 3 == 0)
                .map(|(_, p)| p.distance(q))
                .fold(f64::INFINITY, f64::min);
            assert!((got.unwrap().1 - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_query_matches_linear_scan() {
        let pts = random_points(400, 7);
        let tree = KdTree::bulk(pts.iter().map(|&p| (p, ())));
        for q in random_points(50, 8) {
            let r = 0.4;
            let mut got = Vec::new();
            tree.for_each_in_ball(q, r, |i, _, _| got.push(i));
            let expect = pts.iter().filter(|p| p.distance(q) <= r).count();
            assert_eq!(got.len(), expect);
        }
    }

    #[test]
    fn nearest_iter_is_sorted_and_complete() {
        let pts = random_points(300, 9);
        let tree = KdTree::bulk(pts.iter().map(|&p| (p, ())));
        let q = Point3::new(0.1, -0.2, 0.3);
        let dists: Vec<f64> = tree.nearest_iter(q).map(|(_, d)| d).collect();
        assert_eq!(dists.len(), 300);
        for w in dists.windows(2) {
            assert!(w[0] <= w[1] + 1e-15);
        }
    }

    #[test]
    fn update_is_equivalent_to_rebuild() {
        // Insert, remove, reinsert with a new "radius" payload, then compare
        // every ball query against a freshly built tree.
        let pts = random_points(200, 10);
        let mut tree = KdTree::new();
        let mut ids = Vec::new();
        for (i, &p) in pts.iter().enumerate() {
            ids.push(tree.insert(p, i as f64));
        }
        // Shrink every third item: delete + reinsert.
        let mut live: Vec<(Point3, f64)> = pts.iter().enumerate().map(|(i, &p)| (p, i as f64)).collect();
        for i in (0..pts.len()).step_by(3) {
            tree.remove(ids[i]);
            let new_payload = i as f64 / 2.0;
            tree.insert(pts[i], new_payload);
            live[i].1 = new_payload;
        }
        let fresh = KdTree::bulk(live.iter().copied());
        for q in random_points(40, 11) {
            let mut a: Vec<(u64, u64)> = Vec::new();
            tree.for_each_in_ball(q, 0.5, |_, &pl, pos| a.push((pos.x.to_bits(), pl.to_bits())));
            let mut b: Vec<(u64, u64)> = Vec::new();
            fresh.for_each_in_ball(q, 0.5, |_, &pl, pos| b.push((pos.x.to_bits(), pl.to_bits())));
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn incremental_inserts_stay_searchable() {
        let pts = random_points(2000, 12);
        let mut tree = KdTree::new();
        for &p in &pts {
            tree.insert(p, ());
        }
        let q = Point3::ZERO;
        let (_, d) = tree.nearest(q).unwrap();
        let brute = pts.iter().map(|p| p.distance(q)).fold(f64::INFINITY, f64::min);
        assert!((d - brute).abs() < 1e-12);
    }
}
