//! Undirected trees over stable vertex ids.
//!
//! A [`Tree`] keeps the caller's vertex ids for its whole lifetime. Internally
//! vertices are densely indexed in ascending id order, so comparing dense
//! indices is the same as comparing ids. Removing a vertex (leaf deletion or
//! splicing out a degree-2 vertex) never renumbers the survivors.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Caller-facing vertex identifier. Always positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for VertexId {
    fn from(v: u64) -> Self {
        VertexId(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("edge list is empty")]
    Empty,
    #[error("edge ({0}, {1}) uses vertex id 0; ids must be positive")]
    ZeroId(u64, u64),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge ({0}, {1}) closes a cycle")]
    CycleDetected(VertexId, VertexId),
    #[error("vertex {unreachable} is not reachable from vertex {from}")]
    DisconnectedInput { from: VertexId, unreachable: VertexId },
    #[error("tree has {0} vertices; at least 3 are required")]
    TooSmall(usize),
}

/// Undirected tree. See the module docs for the id/index contract.
///
/// Adjacency is stored flat: vertex `i` owns the slots
/// `rows[i].start .. rows[i].start + rows[i].len`, and each slot records the
/// neighbour and the slot holding the reverse half of the same edge. No
/// operation ever adds a neighbour to a vertex, so the slots assigned at
/// construction suffice. Removing a vertex only sets its bit in `dead` and
/// leaves its half-edges in place as dead slots; `deg` counts only the live
/// ones, and a row with `deg == len` has none. The row of a removed vertex is
/// stale. Redirecting an edge is O(1). Neighbour order within a vertex is
/// unspecified.
#[derive(Clone, Debug)]
pub struct Tree {
    /// Never changes after construction, so clones share it.
    ids: Arc<[VertexId]>,
    /// `Some(ids[0])` when the ids are consecutive, so `id` needs no lookup.
    base: Option<u64>,
    rows: Vec<Row>,
    slots: Vec<Slot>,
    dead: Vec<u64>,
    live: usize,
}

// Per-vertex and per-slot fields are packed together so that one removal
// touches as few cache lines as possible.
#[derive(Clone, Copy, Debug)]
struct Row {
    start: u32,
    len: u32,
    deg: u32,
}

#[derive(Clone, Copy, Debug, Default)]
struct Slot {
    to: u32,
    twin: u32,
}

impl Tree {
    /// Builds and validates a tree from an edge list.
    ///
    /// Fails on the first offending edge: self-loops, repeated edges (in
    /// either orientation) and cycle-closing edges are reported as they are
    /// met; disconnection is reported after all edges are read.
    pub fn from_edges<I>(edges: I) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let edges: Vec<(u64, u64)> = edges.into_iter().collect();
        if edges.is_empty() {
            return Err(TreeError::Empty);
        }

        let mut ids: Vec<u64> = Vec::with_capacity(edges.len() + 1);
        for &(u, v) in &edges {
            if u == 0 || v == 0 {
                return Err(TreeError::ZeroId(u, v));
            }
            ids.push(u);
            ids.push(v);
        }
        ids.sort_unstable();
        ids.dedup();
        let n = ids.len();
        let index = |x: u64| ids.binary_search(&x).expect("id collected above") as u32;

        let mut pairs = Vec::with_capacity(edges.len());
        let mut components = UnionFind::new(n);
        let mut seen: Vec<Vec<u32>> = Vec::new();
        for &(u, v) in &edges {
            if u == v {
                return Err(TreeError::SelfLoop(VertexId(u)));
            }
            let (a, b) = (index(u), index(v));
            if !components.union(a as usize, b as usize) {
                // Rebuild adjacency lazily, only to tell a repeat from a cycle.
                if seen.is_empty() {
                    seen = vec![Vec::new(); n];
                    for &(x, y) in &pairs {
                        seen[x as usize].push(y);
                    }
                }
                let (lo, hi) = (a.min(b), a.max(b));
                return Err(if seen[lo as usize].contains(&hi) {
                    TreeError::DuplicateEdge(VertexId(u), VertexId(v))
                } else {
                    TreeError::CycleDetected(VertexId(u), VertexId(v))
                });
            }
            pairs.push((a.min(b), a.max(b)));
        }

        // Acyclic with fewer than n - 1 edges means a forest.
        if edges.len() != n - 1 {
            let root = components.find(0);
            let stray = (1..n).find(|&i| components.find(i) != root).unwrap_or(0);
            return Err(TreeError::DisconnectedInput {
                from: VertexId(ids[0]),
                unreachable: VertexId(ids[stray]),
            });
        }

        let mut deg = vec![0u32; n];
        for &(a, b) in &pairs {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut rows = Vec::with_capacity(n);
        let mut acc = 0u32;
        for &d in &deg {
            rows.push(Row {
                start: acc,
                len: d,
                deg: d,
            });
            acc += d;
        }
        let mut fill: Vec<u32> = rows.iter().map(|r| r.start).collect();
        let mut slots = vec![Slot::default(); acc as usize];
        for &(a, b) in &pairs {
            let (ka, kb) = (fill[a as usize], fill[b as usize]);
            slots[ka as usize] = Slot { to: b, twin: kb };
            slots[kb as usize] = Slot { to: a, twin: ka };
            fill[a as usize] += 1;
            fill[b as usize] += 1;
        }

        Ok(Tree {
            base: (ids[n - 1] - ids[0] == n as u64 - 1).then_some(ids[0]),
            ids: ids.into_iter().map(VertexId).collect(),
            rows,
            slots,
            dead: vec![0; n.div_ceil(64)],
            live: n,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.live
    }

    pub fn edge_count(&self) -> usize {
        self.live.saturating_sub(1)
    }

    /// Surviving vertex ids, ascending.
    pub fn vertices(&self) -> Vec<VertexId> {
        self.live_indices().map(|i| self.id(i)).collect()
    }

    /// Edges as `(smaller, larger)` pairs, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in self.live_indices() {
            for j in self.adj(i).filter(|&j| j > i) {
                out.push((self.id(i), self.id(j)));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index_of(v).is_some()
    }

    pub fn degree(&self, v: VertexId) -> Option<usize> {
        self.index_of(v).map(|i| self.deg(i))
    }

    /// Neighbour ids, ascending.
    pub fn neighbors(&self, v: VertexId) -> Option<Vec<VertexId>> {
        self.index_of(v).map(|i| {
            let mut out: Vec<VertexId> = self.adj(i).map(|j| self.id(j)).collect();
            out.sort_unstable();
            out
        })
    }

    /// Vertices of degree at most one, ascending. For a single edge both
    /// endpoints are leaves.
    pub fn leaves(&self) -> Vec<VertexId> {
        self.live_indices()
            .filter(|&i| self.deg(i) <= 1)
            .map(|i| self.id(i))
            .collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.live_indices().filter(|&i| self.deg(i) <= 1).count()
    }

    pub fn max_degree(&self) -> usize {
        self.live_indices().map(|i| self.deg(i)).max().unwrap_or(0)
    }

    /// Center of the tree if it is a star `K_{1,k}` with `k >= 2`.
    pub fn star_center(&self) -> Option<VertexId> {
        if self.live < 3 {
            return None;
        }
        self.live_indices()
            .find(|&i| self.deg(i) == self.live - 1)
            .map(|i| self.id(i))
    }

    // Dense-index view, shared with the contraction and augmentation engines.

    pub(crate) fn index_of(&self, v: VertexId) -> Option<u32> {
        let found = match self.base {
            Some(b) => v.0.checked_sub(b).map(|i| i as usize).filter(|&i| i < self.ids.len()),
            None => self.ids.binary_search(&v).ok(),
        };
        found.filter(|&i| self.is_alive(i as u32)).map(|i| i as u32)
    }

    pub(crate) fn id(&self, i: u32) -> VertexId {
        match self.base {
            Some(b) => VertexId(b + i as u64),
            None => self.ids[i as usize],
        }
    }

    /// Dense slots, removed vertices included.
    pub(crate) fn capacity(&self) -> usize {
        self.ids.len()
    }

    pub(crate) fn is_alive(&self, i: u32) -> bool {
        self.dead[i as usize / 64] & (1 << (i % 64)) == 0
    }

    /// Stale once `i` is removed.
    pub(crate) fn deg(&self, i: u32) -> usize {
        self.rows[i as usize].deg as usize
    }

    /// Indices of the live slots of `i`.
    fn live_slots(&self, i: u32) -> impl Iterator<Item = usize> + '_ {
        let r = self.rows[i as usize];
        let clean = r.len == r.deg;
        (r.start as usize..(r.start + r.len) as usize).filter(move |&k| clean || self.is_alive(self.slots[k].to))
    }

    /// Neighbours of `i`, in no particular order.
    pub(crate) fn adj(&self, i: u32) -> impl Iterator<Item = u32> + '_ {
        self.live_slots(i).map(|k| self.slots[k].to)
    }

    fn two_slots(&self, i: u32) -> (usize, usize) {
        let mut ks = self.live_slots(i);
        match (ks.next(), ks.next(), ks.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => panic!("vertex {} does not have degree 2", self.id(i)),
        }
    }

    pub(crate) fn live_indices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.ids.len() as u32).filter(move |&i| self.is_alive(i))
    }

    /// Neighbour of a degree-2 vertex other than `from`.
    pub(crate) fn other_neighbor(&self, i: u32, from: u32) -> u32 {
        let (ka, kb) = self.two_slots(i);
        let (a, b) = (self.slots[ka].to, self.slots[kb].to);
        if a != from {
            a
        } else {
            b
        }
    }

    /// Slot of `i` holding the edge to `j`.
    fn slot_to(&self, i: u32, j: u32) -> usize {
        self.live_slots(i)
            .find(|&k| self.slots[k].to == j)
            .expect("edge exists")
    }

    /// Points the half-edges at slots `ka` (owned by `a`) and `kb` (owned by
    /// `b`) at each other.
    fn join_slots(&mut self, a: u32, ka: usize, b: u32, kb: usize) {
        self.slots[ka] = Slot { to: b, twin: kb as u32 };
        self.slots[kb] = Slot { to: a, twin: ka as u32 };
    }

    fn kill(&mut self, i: u32) {
        self.dead[i as usize / 64] |= 1 << (i % 64);
        self.live -= 1;
    }

    /// Deletes a leaf and returns its former neighbour.
    #[cfg(test)]
    pub(crate) fn remove_leaf(&mut self, i: u32) -> u32 {
        assert_eq!(self.deg(i), 1, "vertex {} is not a leaf", self.id(i));
        let k = self.live_slots(i).next().expect("leaf has a neighbour");
        let p = self.slots[k].to;
        self.rows[p as usize].deg -= 1;
        self.kill(i);
        p
    }

    /// Deletes leaves that all hang off `p`. Only `p`'s row is touched.
    pub(crate) fn remove_leaves_of(&mut self, p: u32, leaves: &[u32]) {
        for &x in leaves {
            debug_assert!(self.deg(x) == 1 && self.adj(x).next() == Some(p));
            self.kill(x);
        }
        self.rows[p as usize].deg -= leaves.len() as u32;
    }

    /// Removes a degree-2 vertex and joins its two neighbours directly.
    /// Returns the neighbours, smaller index first.
    pub(crate) fn splice_out(&mut self, i: u32) -> (u32, u32) {
        assert_eq!(self.deg(i), 2, "vertex {} does not have degree 2", self.id(i));
        let (k0, k1) = self.two_slots(i);
        let (sa, sb) = (self.slots[k0], self.slots[k1]);
        let (a, b) = (sa.to, sb.to);
        let (ka, kb) = (sa.twin as usize, sb.twin as usize);
        self.join_slots(a, ka, b, kb);
        self.kill(i);
        (a.min(b), a.max(b))
    }

    /// Replaces the chain `from - internal[0] - ... - to` by the single edge
    /// `from - to`. Every internal vertex must have degree 2.
    pub(crate) fn bypass(&mut self, from: u32, internal: &[u32], to: u32) {
        let (first, last) = (internal[0], *internal.last().expect("non-empty chain"));
        let kf = self.slots[self.slot_to(first, from)].twin as usize;
        let kt = self.slots[self.slot_to(last, to)].twin as usize;
        self.join_slots(from, kf, to, kt);
        for &w in internal {
            debug_assert_eq!(self.deg(w), 2);
            self.kill(w);
        }
    }
}

/// Two trees are equal when they have the same surviving vertices and edges,
/// regardless of how they were derived.
impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        self.live == other.live && self.vertices() == other.vertices() && self.edges() == other.edges()
    }
}

impl Eq for Tree {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representative {
    pub vertex: VertexId,
    pub degree: usize,
    /// Leaf neighbours, ascending.
    pub leaves: Vec<VertexId>,
}

/// Vertices of degree at least 3 that have at least one leaf neighbour,
/// ascending by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepresentativeSet {
    pub entries: Vec<Representative>,
}

impl RepresentativeSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.entries.iter().map(|r| r.vertex).collect()
    }

    pub fn get(&self, v: VertexId) -> Option<&Representative> {
        self.entries.iter().find(|r| r.vertex == v)
    }
}

pub fn find_representatives(tree: &Tree) -> RepresentativeSet {
    let entries = tree
        .live_indices()
        .filter(|&i| tree.deg(i) >= 3)
        .filter_map(|i| {
            let mut leaves: Vec<VertexId> = tree.adj(i).filter(|&j| tree.deg(j) == 1).map(|j| tree.id(j)).collect();
            leaves.sort_unstable();
            (!leaves.is_empty()).then(|| Representative {
                vertex: tree.id(i),
                degree: tree.deg(i),
                leaves,
            })
        })
        .collect();
    RepresentativeSet { entries }
}

/// `max(ceil(l / 2), Δ - 1)`: no augmentation of `tree` into a 2-connected
/// graph can use fewer edges.
pub fn lower_bound(tree: &Tree) -> Result<usize, TreeError> {
    if tree.vertex_count() < 3 {
        return Err(TreeError::TooSmall(tree.vertex_count()));
    }
    Ok(bound_from(tree.leaf_count(), tree.max_degree()))
}

pub(crate) fn bound_from(leaves: usize, max_degree: usize) -> usize {
    leaves.div_ceil(2).max(max_degree.saturating_sub(1))
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// False when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u64]) -> Vec<VertexId> {
        v.iter().copied().map(VertexId).collect()
    }

    fn spider() -> Tree {
        // center 1, legs 1-2-3, 1-4-5, 1-6-7
        Tree::from_edges([(1, 2), (2, 3), (1, 4), (4, 5), (1, 6), (6, 7)]).unwrap()
    }

    #[test]
    fn path_of_three() {
        let t = Tree::from_edges([(1, 2), (2, 3)]).unwrap();
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(t.edge_count(), 2);
        assert_eq!(t.leaves(), ids(&[1, 3]));
        assert_eq!(lower_bound(&t), Ok(1));
        assert!(find_representatives(&t).is_empty());
    }

    #[test]
    fn star_has_one_representative() {
        let t = Tree::from_edges([(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(t.max_degree(), 3);
        assert_eq!(t.star_center(), Some(VertexId(1)));
        let reps = find_representatives(&t);
        assert_eq!(reps.vertices(), ids(&[1]));
        assert_eq!(reps.entries[0].leaves, ids(&[2, 3, 4]));

        let k14 = Tree::from_edges([(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
        assert_eq!(lower_bound(&k14), Ok(3));
        assert_eq!(find_representatives(&k14).entries[0].leaves.len(), 4);
    }

    #[test]
    fn spider_leaves_are_leg_tips() {
        let t = spider();
        assert_eq!(t.leaves(), ids(&[3, 5, 7]));
        assert_eq!(lower_bound(&t), Ok(2));
        assert!(find_representatives(&t).is_empty());
    }

    #[test]
    fn two_vertices_are_both_leaves_but_too_small() {
        let t = Tree::from_edges([(5, 9)]).unwrap();
        assert_eq!(t.leaves(), ids(&[5, 9]));
        assert_eq!(lower_bound(&t), Err(TreeError::TooSmall(2)));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            Tree::from_edges([(1, 2), (2, 3), (3, 1)]),
            Err(TreeError::CycleDetected(VertexId(3), VertexId(1)))
        );
        assert_eq!(
            Tree::from_edges([(1, 2), (2, 2)]),
            Err(TreeError::SelfLoop(VertexId(2)))
        );
        assert_eq!(
            Tree::from_edges([(1, 2), (2, 1)]),
            Err(TreeError::DuplicateEdge(VertexId(2), VertexId(1)))
        );
        assert_eq!(
            Tree::from_edges([(1, 2), (3, 4)]),
            Err(TreeError::DisconnectedInput {
                from: VertexId(1),
                unreachable: VertexId(3)
            })
        );
        assert_eq!(Tree::from_edges(Vec::<(u64, u64)>::new()), Err(TreeError::Empty));
        assert_eq!(Tree::from_edges([(0, 1)]), Err(TreeError::ZeroId(0, 1)));
    }

    #[test]
    fn sparse_ids_survive() {
        let t = Tree::from_edges([(100, 7), (7, 4000), (7, 12)]).unwrap();
        assert_eq!(t.vertices(), ids(&[7, 12, 100, 4000]));
        assert_eq!(t.degree(VertexId(7)), Some(3));
        assert_eq!(t.degree(VertexId(8)), None);
        assert_eq!(t.neighbors(VertexId(7)), Some(ids(&[12, 100, 4000])));
    }

    #[test]
    fn consecutive_ids_off_one() {
        let t = Tree::from_edges([(6, 5), (6, 7), (6, 8)]).unwrap();
        assert_eq!(t.base, Some(5));
        assert_eq!(
            t.edges(),
            vec![
                (VertexId(5), VertexId(6)),
                (VertexId(6), VertexId(7)),
                (VertexId(6), VertexId(8))
            ]
        );
        for missing in [0, 4, 9, u64::MAX] {
            assert!(!t.contains(VertexId(missing)));
        }
        assert_eq!(t.index_of(VertexId(8)), Some(3));
    }

    #[test]
    fn removal_keeps_ids() {
        let mut t = spider();
        let leg = t.index_of(VertexId(3)).unwrap();
        let p = t.remove_leaf(leg);
        assert_eq!(t.id(p), VertexId(2));
        assert!(!t.contains(VertexId(3)));
        assert_eq!(t.vertex_count(), 6);
        let mid = t.index_of(VertexId(4)).unwrap();
        t.splice_out(mid);
        assert_eq!(t.neighbors(VertexId(5)), Some(ids(&[1])));
        assert_eq!(t.vertices(), ids(&[1, 2, 5, 6, 7]));
        assert_eq!(t.edge_count(), 4);
    }

    #[test]
    fn equality_ignores_history() {
        let mut a = spider();
        for v in [2, 4, 6] {
            let i = a.index_of(VertexId(v)).unwrap();
            a.splice_out(i);
        }
        let b = Tree::from_edges([(1, 3), (1, 5), (1, 7)]).unwrap();
        assert_eq!(a, b);
    }
}
