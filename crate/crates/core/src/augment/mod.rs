//! Minimum biconnectivity augmentation of a tree.
//!
//! The driver contracts degree-2 chains, then repeatedly pairs leaves of the
//! two highest-degree representatives until at most one representative is
//! left, and finishes the residual star with a fan (or a path with a single
//! edge). Every step removes exactly as many units from the lower bound
//! `max(ceil(l / 2), Δ - 1)` as it adds edges, so the result is optimal.

mod engine;
mod tables;

pub use tables::{DegreeBuckets, RepresentativeTable};

pub(crate) use engine::{ordered, run, Executor, Pair};

use thiserror::Error;

use crate::contraction::ChainPath;
use crate::tree::{RepresentativeSet, Tree, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AugmentError {
    #[error("tree has {0} vertices; at least 3 are required")]
    TreeTooSmall(usize),
    #[error("tree is not a star")]
    NotAStar,
    #[error("fewer than two representatives remain")]
    FewerThanTwoRepresentatives,
}

/// Edges to add, in emission order. Each pair is stored `(smaller, larger)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AugmentationSet {
    pairs: Vec<(VertexId, VertexId)>,
}

impl AugmentationSet {
    pub fn from_pairs<I: IntoIterator<Item = (VertexId, VertexId)>>(pairs: I) -> Self {
        Self {
            pairs: pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn iter(&self) -> impl Iterator<Item = &(VertexId, VertexId)> {
        self.pairs.iter()
    }
}

impl<'a> IntoIterator for &'a AugmentationSet {
    type Item = &'a (VertexId, VertexId);
    type IntoIter = std::slice::Iter<'a, (VertexId, VertexId)>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

/// One pass of the non-star loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iteration {
    /// Max-degree representative and its degree / leaf count.
    pub first: (VertexId, usize, usize),
    /// Second-max representative and its degree / leaf count.
    pub second: (VertexId, usize, usize),
    /// Value from the case table before the degree cap.
    pub table_t: usize,
    /// Number of pairs actually emitted.
    pub t: usize,
    pub pairs: Vec<(VertexId, VertexId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Finish {
    /// The input had exactly two leaves.
    TwoLeaves,
    /// Residual was a path; its two leaves were joined.
    Path,
    /// Residual was a star; `edges` fan edges were added.
    Star { center: VertexId, edges: usize },
}

/// Step-by-step record of a run, for inspection and golden tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentTrace {
    pub contracted: Vec<ChainPath>,
    pub representatives: RepresentativeSet,
    pub iterations: Vec<Iteration>,
    pub finish: Finish,
}

/// Number of pairs to take from the max-degree representative `(d_i, l_i)`
/// and the second one `(d_j, l_j)` so that neither turns into a leaf.
///
/// `d - l == 1` means the representative has a single non-leaf neighbour, so
/// taking all of its leaves would make it a leaf itself.
pub fn compute_t(d_i: usize, l_i: usize, d_j: usize, l_j: usize) -> usize {
    let i_pinned = d_i - l_i == 1;
    let j_pinned = d_j - l_j == 1;
    match (i_pinned, j_pinned) {
        (true, true) => l_j - 1,
        (false, true) => {
            if l_i < l_j {
                l_i
            } else {
                l_j - 1
            }
        }
        (true, false) => l_j,
        (false, false) => l_i.min(l_j),
    }
}

/// Minimum set of edges whose addition makes `tree` 2-connected.
pub fn tree_augment(tree: &Tree) -> Result<AugmentationSet, AugmentError> {
    run(&engine::Sequential, tree, false).map(|(set, _)| set)
}

/// [`tree_augment`] plus a record of every step.
pub fn tree_augment_traced(tree: &Tree) -> Result<(AugmentationSet, AugmentTrace), AugmentError> {
    run(&engine::Sequential, tree, true).map(|(set, trace)| (set, trace.expect("trace requested")))
}

/// Fan from the smallest leaf of a star to each other leaf.
pub fn star_augment(tree: &Tree) -> Result<AugmentationSet, AugmentError> {
    let center = tree.star_center().ok_or(AugmentError::NotAStar)?;
    let leaves: Vec<VertexId> = tree.leaves().into_iter().filter(|&v| v != center).collect();
    let (&first, rest) = leaves.split_first().ok_or(AugmentError::NotAStar)?;
    Ok(AugmentationSet::from_pairs(rest.iter().map(|&x| (first, x))))
}

/// Runs the non-star loop on `tree` (contracting it first if needed) and
/// returns the emitted edges with the residual tree, which is a star or a
/// single edge.
pub fn non_star_augment(tree: &Tree) -> Result<(AugmentationSet, Tree), AugmentError> {
    engine::non_star_only(tree)
}
