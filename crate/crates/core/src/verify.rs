//! Independent checks on augmentation results.
//!
//! Nothing here uses the augmentation engine or the closed-form bound except
//! [`check_result`], which compares against it.

use std::fmt;

use thiserror::Error;

use crate::augment::AugmentationSet;
use crate::tree::{lower_bound, Tree, VertexId};

/// Largest tree the exhaustive oracle accepts.
pub const ORACLE_MAX_VERTICES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("graph has {0} vertices; at least 3 are required")]
    GraphTooSmall(usize),
    #[error("tree has {0} vertices; the oracle is limited to {ORACLE_MAX_VERTICES}")]
    TooLargeForOracle(usize),
    #[error("vertex {0} is not in the tree")]
    ForeignVertex(VertexId),
}

/// Dense adjacency over `vertices` (sorted, deduplicated). Parallel edges
/// and self-loops collapse away.
struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    fn new(vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> Result<Self, VerifyError> {
        let mut ids = vertices.to_vec();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() < 3 {
            return Err(VerifyError::GraphTooSmall(ids.len()));
        }
        let index = |v: VertexId| ids.binary_search(&v).map_err(|_| VerifyError::ForeignVertex(v));
        let mut adj = vec![Vec::new(); ids.len()];
        for &(u, v) in edges {
            let (a, b) = (index(u)?, index(v)?);
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj })
    }
}

/// True iff the graph is connected and has no articulation point.
///
/// Iterative low-link depth-first search, so deep paths do not overflow the
/// stack.
pub fn is_biconnected(vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> Result<bool, VerifyError> {
    let g = Graph::new(vertices, edges)?;
    let n = g.adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut root_children = 0;

    // (vertex, parent, next neighbour position)
    let mut stack = vec![(0usize, UNSEEN, 0usize)];
    disc[0] = 0;
    low[0] = 0;
    timer += 1;
    while let Some(top) = stack.last_mut() {
        let (u, parent) = (top.0, top.1);
        if let Some(&w) = g.adj[u].get(top.2) {
            top.2 += 1;
            if disc[w] == UNSEEN {
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                if u == 0 {
                    root_children += 1;
                }
                stack.push((w, u, 0));
            } else if w != parent {
                low[u] = low[u].min(disc[w]);
            }
        } else {
            stack.pop();
            if parent != UNSEEN {
                low[parent] = low[parent].min(low[u]);
                if parent != 0 && low[u] >= disc[parent] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(timer == n && root_children == 1)
}

/// Definitional check: deleting any single vertex leaves a connected graph.
/// Quadratic; meant as a reference for small graphs.
pub fn is_biconnected_by_deletion(vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> Result<bool, VerifyError> {
    let g = Graph::new(vertices, edges)?;
    let n = g.adj.len();
    for removed in 0..n {
        let start = usize::from(removed == 0);
        let mut seen = vec![false; n];
        seen[removed] = true;
        seen[start] = true;
        let mut queue = vec![start];
        let mut reached = 1;
        while let Some(u) = queue.pop() {
            for &w in &g.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push(w);
                }
            }
        }
        if reached != n - 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest number of non-tree edges whose addition makes `tree` 2-connected,
/// by exhaustive search.
///
/// Sizes are tried from 1 upward; at each size the candidate sets are visited
/// in lexicographic order of the sorted non-edges. A partial set is abandoned
/// once some vertex `x` splits the rest of the graph into more pieces than the
/// remaining edge budget can join.
pub fn brute_force_min_augmentation(tree: &Tree) -> Result<usize, VerifyError> {
    let n = tree.vertex_count();
    if n < 3 {
        return Err(VerifyError::GraphTooSmall(n));
    }
    if n > ORACLE_MAX_VERTICES {
        return Err(VerifyError::TooLargeForOracle(n));
    }

    let ids = tree.vertices();
    let pos = |v: VertexId| ids.binary_search(&v).expect("tree vertex");
    let mut adj = vec![0u16; n];
    for (u, v) in tree.edges() {
        let (a, b) = (pos(u), pos(v));
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let non_edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| adj[a] & (1 << b) == 0)
        .collect();

    let mut search = OracleSearch {
        n,
        adj,
        non_edges: &non_edges,
    };
    // A path of three is the cheapest case and already needs one edge, and a
    // complete graph on n >= 3 vertices is 2-connected, so this terminates.
    for budget in 1..=non_edges.len() {
        if search.extend(0, budget) {
            return Ok(budget);
        }
    }
    unreachable!("adding every non-edge yields a complete graph")
}

struct OracleSearch<'a> {
    n: usize,
    adj: Vec<u16>,
    non_edges: &'a [(usize, usize)],
}

impl OracleSearch<'_> {
    /// Whether choosing `remaining` more edges from `non_edges[from..]` can
    /// make the current graph 2-connected.
    fn extend(&mut self, from: usize, remaining: usize) -> bool {
        if !self.joinable_within(remaining) {
            return false;
        }
        if remaining == 0 {
            return true;
        }
        for k in from..self.non_edges.len() {
            if self.non_edges.len() - k < remaining {
                break;
            }
            let (a, b) = self.non_edges[k];
            self.adj[a] |= 1 << b;
            self.adj[b] |= 1 << a;
            let found = self.extend(k + 1, remaining - 1);
            self.adj[a] &= !(1 << b);
            self.adj[b] &= !(1 << a);
            if found {
                return true;
            }
        }
        false
    }

    /// For every vertex `x`, the pieces of the graph minus `x` can be joined
    /// with `budget` more edges. With `budget == 0` this is 2-connectivity.
    fn joinable_within(&self, budget: usize) -> bool {
        let full: u16 = (1 << self.n) - 1;
        (0..self.n).all(|x| {
            let mut unvisited = full & !(1 << x);
            let mut pieces = 0;
            while unvisited != 0 {
                pieces += 1;
                let mut frontier = unvisited & unvisited.wrapping_neg();
                unvisited &= !frontier;
                while frontier != 0 {
                    let v = frontier.trailing_zeros() as usize;
                    frontier &= frontier - 1;
                    let next = self.adj[v] & unvisited;
                    unvisited &= !next;
                    frontier |= next;
                }
            }
            pieces - 1 <= budget
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub lower_bound: usize,
    pub achieved: usize,
    pub biconnected: bool,
    pub oracle_optimal: Option<usize>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lower_bound={}", self.lower_bound)?;
        writeln!(f, "achieved={}", self.achieved)?;
        writeln!(f, "biconnected={}", self.biconnected)?;
        match self.oracle_optimal {
            Some(k) => writeln!(f, "oracle_optimal={k}")?,
            None => writeln!(f, "oracle_optimal=none")?,
        }
        match &self.verdict {
            Verdict::Pass => writeln!(f, "verdict=PASS"),
            Verdict::Fail(reasons) => {
                writeln!(f, "verdict=FAIL")?;
                writeln!(f, "reason={}", reasons.join("; "))
            }
        }
    }
}

/// Checks `set` against `tree`. The exhaustive oracle runs only when
/// `with_oracle` is set and the tree is small enough for it.
pub fn check_result(tree: &Tree, set: &AugmentationSet, with_oracle: bool) -> Result<VerificationReport, VerifyError> {
    for &(u, v) in set {
        for w in [u, v] {
            if !tree.contains(w) {
                return Err(VerifyError::ForeignVertex(w));
            }
        }
    }
    let n = tree.vertex_count();
    let bound = lower_bound(tree).map_err(|_| VerifyError::GraphTooSmall(n))?;

    let mut reasons = Vec::new();
    let tree_edges = tree.edges();
    let mut seen = std::collections::HashSet::new();
    for &(u, v) in set {
        if u == v {
            reasons.push(format!("pair ({u}, {v}) is a self-loop"));
        } else if tree_edges.binary_search(&(u, v)).is_ok() {
            reasons.push(format!("pair ({u}, {v}) is already a tree edge"));
        } else if !seen.insert((u, v)) {
            reasons.push(format!("pair ({u}, {v}) is repeated"));
        }
    }

    let mut all_edges = tree_edges;
    all_edges.extend(set.iter().copied());
    let biconnected = is_biconnected(&tree.vertices(), &all_edges)?;
    if !biconnected {
        reasons.push("graph is not biconnected".to_string());
    }
    let achieved = set.len();
    if achieved != bound {
        reasons.push(format!("added {achieved} edges, lower bound is {bound}"));
    }

    let oracle_optimal = if with_oracle && n <= ORACLE_MAX_VERTICES {
        Some(brute_force_min_augmentation(tree)?)
    } else {
        None
    };
    if let Some(best) = oracle_optimal {
        if best != achieved {
            reasons.push(format!("added {achieved} edges, optimum is {best}"));
        }
    }

    Ok(VerificationReport {
        lower_bound: bound,
        achieved,
        biconnected,
        oracle_optimal,
        verdict: if reasons.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail(reasons)
        },
    })
}
