//! Bookkeeping for the non-star loop: the leaf lists of branch vertices and
//! degree-indexed buckets of representatives.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use super::AugmentError;
use crate::tree::Tree;

const NONE: u32 = u32::MAX;

/// Leaf list for every vertex that had degree >= 3 when the table was built.
///
/// A key with an empty list is a branch vertex that is not currently a
/// representative; it can become one again when a neighbouring chain is
/// contracted onto it. Keys are dense vertex indices; each key also has a
/// row number, and rows follow key order.
///
/// Leaves only ever leave a list from its small end, so each list is a sorted
/// run in one shared array with a moving head. Leaves merged in later go to a
/// per-row min-heap.
#[derive(Clone, Debug, Default)]
pub struct RepresentativeTable {
    row: Vec<u32>,
    rows: Vec<Row>,
    sorted: Vec<u32>,
    heaps: Vec<BinaryHeap<Reverse<u32>>>,
}

/// `heap` indexes `heaps`, allocated on a row's first merged leaf.
#[derive(Clone, Copy, Debug)]
struct Row {
    vertex: u32,
    head: u32,
    end: u32,
    heap: u32,
    retired: bool,
}

impl RepresentativeTable {
    /// Two passes over the leaves in index order (count, then place), so
    /// every run comes out sorted and each leaf's own row is read in
    /// sequence.
    pub(crate) fn build(tree: &Tree) -> Self {
        let mut t = Self {
            row: vec![NONE; tree.capacity()],
            ..Self::default()
        };
        for v in tree.live_indices().filter(|&v| tree.deg(v) >= 3) {
            t.row[v as usize] = t.rows.len() as u32;
            t.rows.push(Row {
                vertex: v,
                head: 0,
                end: 0,
                heap: NONE,
                retired: false,
            });
        }
        let owner = |x: u32| {
            let p = tree.adj(x).next().expect("leaf has a neighbour");
            t.row[p as usize]
        };
        let leaves = || tree.live_indices().filter(|&x| tree.deg(x) == 1);

        let mut counts = vec![0u32; t.rows.len()];
        for r in leaves().map(owner).filter(|&r| r != NONE) {
            counts[r as usize] += 1;
        }
        let mut acc = 0;
        for (row, c) in t.rows.iter_mut().zip(counts) {
            (row.head, row.end) = (acc, acc);
            acc += c;
        }
        let mut sorted = vec![0; acc as usize];
        for x in leaves() {
            let r = owner(x);
            if r != NONE {
                let row = &mut t.rows[r as usize];
                sorted[row.end as usize] = x;
                row.end += 1;
            }
        }
        t.sorted = sorted;
        t
    }

    pub(crate) fn rows(&self) -> usize {
        self.rows.len()
    }

    /// Row of `v`, retired or not.
    pub(crate) fn row_of(&self, v: u32) -> Option<u32> {
        self.row.get(v as usize).copied().filter(|&r| r != NONE)
    }

    pub(crate) fn vertex_at(&self, r: u32) -> u32 {
        self.rows[r as usize].vertex
    }

    fn key(&self, v: u32) -> Option<usize> {
        match self.row.get(v as usize) {
            Some(&r) if r != NONE && !self.rows[r as usize].retired => Some(r as usize),
            _ => None,
        }
    }

    pub fn is_key(&self, v: u32) -> bool {
        self.key(v).is_some()
    }

    fn merged(&self, r: usize) -> Option<&BinaryHeap<Reverse<u32>>> {
        self.heaps.get(self.rows[r].heap as usize)
    }

    fn len_of(&self, r: usize) -> usize {
        let row = self.rows[r];
        (row.end - row.head) as usize + self.merged(r).map_or(0, BinaryHeap::len)
    }

    pub fn leaf_count(&self, v: u32) -> usize {
        self.key(v).map_or(0, |r| self.len_of(r))
    }

    /// All leaves of `v`, ascending.
    pub fn leaves(&self, v: u32) -> Vec<u32> {
        let Some(r) = self.key(v) else {
            return Vec::new();
        };
        let row = self.rows[r];
        let mut out = self.sorted[row.head as usize..row.end as usize].to_vec();
        if let Some(heap) = self.merged(r).filter(|h| !h.is_empty()) {
            out.extend(heap.iter().map(|x| x.0));
            out.sort_unstable();
        }
        out
    }

    /// Removes and returns the `k` smallest leaves of `v`, ascending.
    pub(crate) fn take_smallest(&mut self, v: u32, k: usize) -> Vec<u32> {
        let r = self.key(v).expect("taking leaves from a vertex outside the table");
        let have = self.len_of(r);
        assert!(k <= have, "only {have} leaves under {v}");
        let row = &mut self.rows[r];
        let mut spare = BinaryHeap::new();
        let heap = self.heaps.get_mut(row.heap as usize).unwrap_or(&mut spare);
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let run = (row.head < row.end).then(|| self.sorted[row.head as usize]);
            match (run, heap.peek().map(|x| x.0)) {
                (Some(a), Some(b)) if b < a => out.push(heap.pop().unwrap().0),
                (Some(a), _) => {
                    row.head += 1;
                    out.push(a);
                }
                (None, Some(_)) => out.push(heap.pop().unwrap().0),
                (None, None) => unreachable!("count checked above"),
            }
        }
        out
    }

    pub(crate) fn insert(&mut self, v: u32, leaf: u32) {
        let r = self.key(v).expect("leaf moved onto a vertex outside the table");
        if self.rows[r].heap == NONE {
            self.rows[r].heap = self.heaps.len() as u32;
            self.heaps.push(BinaryHeap::new());
        }
        self.heaps[self.rows[r].heap as usize].push(Reverse(leaf));
    }

    /// Removes `v` from the table and hands back its remaining leaves,
    /// ascending, for merging into a neighbour. Each vertex may be merged away
    /// only once.
    pub(crate) fn retire(&mut self, v: u32) -> Vec<u32> {
        let r = self.row.get(v as usize).copied().unwrap_or(NONE);
        if r == NONE {
            return Vec::new();
        }
        assert!(!self.rows[r as usize].retired, "vertex {v} merged twice");
        let left = self.leaves(v);
        self.rows[r as usize].retired = true;
        left
    }
}

/// Vertices bucketed by current degree. Ties within a bucket go to the
/// smaller key. Buckets made with [`DegreeBuckets::counting`] track sizes
/// only and cannot name their members.
///
/// Each bucket is a min-heap with lazy deletion: an entry is live only while
/// its stamp matches the vertex's current stamp. The non-empty degrees are
/// kept in an ordered set, so finding the next bucket down never walks
/// through empty ones.
#[derive(Clone, Debug, Default)]
pub struct DegreeBuckets {
    buckets: Vec<BinaryHeap<Reverse<(u32, u32)>>>,
    counting: bool,
    live_in: Vec<usize>,
    nonempty: BTreeSet<usize>,
    /// `(degree, stamp)` per vertex; degree 0 when absent.
    entry: Vec<(u32, u32)>,
    len: usize,
}

impl DegreeBuckets {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pre-sizes for keys below `keys`.
    pub fn reserve(&mut self, keys: usize) {
        if self.entry.len() < keys {
            self.entry.resize(keys, (0, 0));
        }
    }

    pub fn counting() -> Self {
        Self {
            counting: true,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: u32) -> bool {
        self.degree(v).is_some()
    }

    pub fn degree(&self, v: u32) -> Option<usize> {
        self.entry.get(v as usize).map(|&(d, _)| d as usize).filter(|&d| d > 0)
    }

    /// Inserts `v` at `degree`, moving it if already present.
    pub fn set(&mut self, v: u32, degree: usize) {
        assert!(degree > 0);
        if self.degree(v) == Some(degree) {
            return;
        }
        self.remove(v);
        if self.buckets.len() <= degree {
            self.buckets.resize_with(degree + 1, BinaryHeap::new);
            self.live_in.resize(degree + 1, 0);
        }
        if self.entry.len() <= v as usize {
            self.entry.resize(v as usize + 1, (0, 0));
        }
        let e = &mut self.entry[v as usize];
        e.0 = degree as u32;
        if !self.counting {
            self.buckets[degree].push(Reverse((v, e.1)));
        }
        self.live_in[degree] += 1;
        if self.live_in[degree] == 1 {
            self.nonempty.insert(degree);
        }
        self.len += 1;
    }

    pub fn remove(&mut self, v: u32) {
        if let Some(d) = self.degree(v) {
            let e = &mut self.entry[v as usize];
            e.0 = 0;
            e.1 += 1;
            self.live_in[d] -= 1;
            if self.live_in[d] == 0 {
                self.nonempty.remove(&d);
                self.buckets[d].clear();
            }
            self.len -= 1;
        }
    }

    fn is_live(&self, d: usize, (v, stamp): (u32, u32)) -> bool {
        self.entry[v as usize] == (d as u32, stamp)
    }

    /// Smallest live key at degree `d`, discarding stale entries on the way.
    fn min_at(&mut self, d: usize) -> Option<u32> {
        assert!(!self.counting, "counting buckets do not order their members");
        while let Some(&Reverse(entry)) = self.buckets[d].peek() {
            if self.is_live(d, entry) {
                return Some(entry.0);
            }
            self.buckets[d].pop();
        }
        None
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.nonempty.last().copied()
    }

    /// Smallest key in the highest non-empty bucket.
    pub fn max_entry(&mut self) -> Option<(u32, usize)> {
        let d = self.max_degree()?;
        self.min_at(d).map(|v| (v, d))
    }

    /// The maximum and second-maximum entries. Ties go to the smaller key;
    /// both may come from the same bucket.
    pub fn top_two(&mut self) -> Result<(u32, u32), AugmentError> {
        if self.len < 2 {
            return Err(AugmentError::FewerThanTwoRepresentatives);
        }
        let d1 = self.max_degree().expect("non-empty");
        let first = self.min_at(d1).expect("bucket has a live entry");
        let second = if self.live_in[d1] >= 2 {
            let top = self.buckets[d1].pop().expect("first entry");
            let second = self.min_at(d1).expect("second live entry");
            self.buckets[d1].push(top);
            second
        } else {
            let d2 = *self.nonempty.range(..d1).next_back().expect("len >= 2");
            self.min_at(d2).expect("bucket has a live entry")
        };
        Ok((first, second))
    }

    /// Like [`top_two`](Self::top_two), but also removes both entries.
    pub fn take_top_two(&mut self) -> Result<(u32, u32), AugmentError> {
        if self.len < 2 {
            return Err(AugmentError::FewerThanTwoRepresentatives);
        }
        let mut take = || {
            let d = self.max_degree().expect("non-empty");
            let v = self.min_at(d).expect("bucket has a live entry");
            self.buckets[d].pop();
            self.remove(v);
            v
        };
        let first = take();
        Ok((first, take()))
    }

    /// Largest degree among entries other than `a` and `b`.
    pub fn max_excluding(&self, a: u32, b: u32) -> Option<usize> {
        self.nonempty.iter().rev().copied().find(|&d| {
            let mut excluded = usize::from(self.degree(a) == Some(d));
            if b != a {
                excluded += usize::from(self.degree(b) == Some(d));
            }
            self.live_in[d] > excluded
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_two_from_shared_max_bucket() {
        let mut b = DegreeBuckets::new();
        for (v, d) in [(3, 4), (6, 4), (4, 3), (5, 3), (10, 3)] {
            b.set(v, d);
        }
        assert_eq!(b.top_two(), Ok((3, 6)));
    }

    #[test]
    fn top_two_across_buckets() {
        let mut b = DegreeBuckets::new();
        for (v, d) in [(1, 4), (5, 3), (4, 3), (10, 3)] {
            b.set(v, d);
        }
        assert_eq!(b.top_two(), Ok((1, 4)));
        b.set(1, 3);
        assert_eq!(b.top_two(), Ok((1, 4)));
        b.remove(1);
        b.remove(4);
        assert_eq!(b.top_two(), Ok((5, 10)));
    }

    #[test]
    fn take_top_two_removes_both() {
        let mut b = DegreeBuckets::new();
        for (v, d) in [(1, 4), (5, 3), (4, 3), (10, 3)] {
            b.set(v, d);
        }
        assert_eq!(b.take_top_two(), Ok((1, 4)));
        assert_eq!((b.len(), b.contains(1), b.contains(4)), (2, false, false));
        b.set(4, 3);
        assert_eq!(b.take_top_two(), Ok((4, 5)));
        assert_eq!(b.take_top_two(), Err(AugmentError::FewerThanTwoRepresentatives));
        assert_eq!(b.max_entry(), Some((10, 3)));
    }

    #[test]
    fn counting_buckets_track_degrees() {
        let mut b = DegreeBuckets::counting();
        for (v, d) in [(1, 4), (5, 3), (4, 3)] {
            b.set(v, d);
        }
        assert_eq!(b.max_degree(), Some(4));
        assert_eq!(b.max_excluding(1, 5), Some(3));
        b.remove(1);
        assert_eq!((b.len(), b.max_degree()), (2, Some(3)));
    }

    #[test]
    #[should_panic(expected = "do not order")]
    fn counting_buckets_cannot_name_members() {
        let mut b = DegreeBuckets::counting();
        b.set(1, 3);
        b.max_entry();
    }

    #[test]
    fn single_bucket_tie_prefers_smaller_key() {
        let mut b = DegreeBuckets::new();
        b.set(9, 3);
        b.set(2, 3);
        assert_eq!(b.top_two(), Ok((2, 9)));
    }

    #[test]
    fn fewer_than_two() {
        let mut b = DegreeBuckets::new();
        b.set(7, 5);
        assert_eq!(b.top_two(), Err(AugmentError::FewerThanTwoRepresentatives));
        b.remove(7);
        assert!(b.is_empty());
        assert_eq!(b.max_degree(), None);
    }

    #[test]
    fn late_insert_above_current_max() {
        let mut b = DegreeBuckets::new();
        b.set(1, 3);
        b.set(2, 3);
        assert_eq!(b.max_degree(), Some(3));
        b.set(3, 7);
        assert_eq!(b.max_degree(), Some(7));
        assert_eq!(b.top_two(), Ok((3, 1)));
        assert_eq!(b.max_excluding(3, 1), Some(3));
        assert_eq!(b.max_excluding(3, 2), Some(3));
        b.remove(2);
        assert_eq!(b.max_excluding(3, 1), None);
    }

    #[test]
    fn stale_entries_are_skipped() {
        let mut b = DegreeBuckets::new();
        b.set(1, 5);
        b.set(2, 5);
        b.set(1, 4);
        b.remove(2);
        b.set(2, 5);
        b.set(2, 4);
        b.set(0, 4);
        assert_eq!(b.max_degree(), Some(4));
        assert_eq!(b.len(), 3);
        assert_eq!(b.top_two(), Ok((0, 1)));
        b.remove(0);
        b.remove(1);
        b.set(1, 4);
        assert_eq!(b.top_two(), Ok((1, 2)));
        assert_eq!(b.max_entry(), Some((1, 4)));
        assert_eq!(b.max_excluding(1, 1), Some(4));
        assert_eq!(b.max_excluding(1, 2), None);
    }

    #[test]
    fn table_lists_and_retire() {
        let t = Tree::from_edges([(1, 2), (1, 3), (1, 4), (4, 5), (4, 6)]).unwrap();
        let mut h1 = RepresentativeTable::build(&t);
        let (one, four) = (0, 3);
        assert!(h1.is_key(one) && h1.is_key(four));
        assert_eq!(h1.leaves(one), vec![1, 2]);
        assert_eq!(h1.take_smallest(four, 1), vec![4]);
        assert_eq!(h1.take_smallest(one, 1), vec![1]);
        assert_eq!(h1.leaf_count(one), 1);
        assert_eq!(h1.retire(one), vec![2]);
        assert!(!h1.is_key(one));
        assert_eq!(h1.leaf_count(one), 0);
    }

    #[test]
    fn merged_leaves_interleave() {
        let t = Tree::from_edges([(1, 2), (1, 5), (1, 9), (9, 10)]).unwrap();
        let mut h1 = RepresentativeTable::build(&t);
        let one = 0;
        assert_eq!(h1.leaves(one), vec![1, 2]);
        h1.insert(one, 0);
        h1.insert(one, 3);
        assert_eq!(h1.leaves(one), vec![0, 1, 2, 3]);
        assert_eq!(h1.take_smallest(one, 3), vec![0, 1, 2]);
        assert_eq!(h1.take_smallest(one, 1), vec![3]);
        assert_eq!(h1.leaf_count(one), 0);
    }

    #[test]
    #[should_panic(expected = "merged twice")]
    fn retire_twice_panics() {
        let t = Tree::from_edges([(1, 2), (1, 3), (1, 4)]).unwrap();
        let mut h1 = RepresentativeTable::build(&t);
        h1.retire(0);
        h1.retire(0);
    }
}
