//! Degree-2 chain classification and path-to-edge contraction.
//!
//! A chain hangs off a vertex of degree at least 3 and runs through one or
//! more degree-2 vertices. It ends either at another vertex of degree at least
//! 3 (a P1 chain) or at a leaf (a P2 chain). Contracting a chain deletes its
//! internal vertices and joins its endpoints by a single edge; the endpoints
//! keep their ids, so edges chosen on the contracted tree are valid on the
//! original one.

use thiserror::Error;

use crate::tree::{Tree, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractionError {
    #[error("tree has no vertex of degree 3 or more")]
    NoBranchVertex,
    #[error("chain {0}..{1} no longer matches the tree")]
    StalePath(VertexId, VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// Both endpoints have degree at least 3.
    P1,
    /// First endpoint has degree at least 3, second is a leaf.
    P2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPath {
    pub kind: ChainKind,
    /// `(u, v)`: `u` has degree >= 3. For P1 chains `u < v`, for P2 chains
    /// `v` is the leaf.
    pub endpoints: (VertexId, VertexId),
    /// Degree-2 vertices in order from `u` to `v`. Never empty.
    pub internal: Vec<VertexId>,
}

impl ChainPath {
    fn sort_key(&self) -> (VertexId, VertexId) {
        let (u, v) = self.endpoints;
        (u.min(v), u.max(v))
    }
}

/// A chain in dense-index form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RawChain {
    pub kind: ChainKind,
    pub from: u32,
    pub to: u32,
    pub internal: Vec<u32>,
}

impl RawChain {
    pub(crate) fn to_path(&self, tree: &Tree) -> ChainPath {
        ChainPath {
            kind: self.kind,
            endpoints: (tree.id(self.from), tree.id(self.to)),
            internal: self.internal.iter().map(|&i| tree.id(i)).collect(),
        }
    }
}

/// Walks every chain that starts at branch vertex `u`. A P1 chain is found from
/// both of its ends; only the walk from the smaller end is kept.
pub(crate) fn chains_from(tree: &Tree, u: u32, out: &mut Vec<RawChain>) {
    debug_assert!(tree.deg(u) >= 3);
    for first in tree.adj(u) {
        if tree.deg(first) != 2 {
            continue;
        }
        let mut internal = vec![first];
        let (mut prev, mut cur) = (u, first);
        while tree.deg(cur) == 2 {
            let next = tree.other_neighbor(cur, prev);
            prev = cur;
            cur = next;
            if tree.deg(cur) == 2 {
                internal.push(cur);
            }
        }
        let kind = if tree.deg(cur) == 1 {
            ChainKind::P2
        } else {
            ChainKind::P1
        };
        if kind == ChainKind::P2 || u < cur {
            out.push(RawChain {
                kind,
                from: u,
                to: cur,
                internal,
            });
        }
    }
}

pub(crate) fn raw_chains(tree: &Tree) -> Vec<RawChain> {
    let mut out = Vec::new();
    for u in tree.live_indices().filter(|&u| tree.deg(u) >= 3) {
        chains_from(tree, u, &mut out);
    }
    out.sort_by_key(|c| (c.from.min(c.to), c.from.max(c.to)));
    out
}

/// All maximal chains with at least one internal vertex, ordered by their
/// smaller endpoint id (then the larger one).
pub fn classify_paths(tree: &Tree) -> Result<Vec<ChainPath>, ContractionError> {
    if !tree.live_indices().any(|u| tree.deg(u) >= 3) {
        return Err(ContractionError::NoBranchVertex);
    }
    let mut paths: Vec<ChainPath> = raw_chains(tree).iter().map(|c| c.to_path(tree)).collect();
    paths.sort_by_key(ChainPath::sort_key);
    Ok(paths)
}

/// Contracts one chain of `tree` into the edge between its endpoints.
pub fn contract_path(tree: &Tree, path: &ChainPath) -> Result<Tree, ContractionError> {
    let stale = || ContractionError::StalePath(path.endpoints.0, path.endpoints.1);
    let raw = resolve(tree, path).ok_or_else(stale)?;
    let mut out = tree.clone();
    contract_raw(&mut out, &raw);
    Ok(out)
}

/// Contracts every P1 and P2 chain. Trees without a degree-2 vertex, and path
/// trees (which have no chain in this sense), are returned unchanged.
pub fn perform_path_to_edge_contraction(tree: &Tree) -> Tree {
    let mut out = tree.clone();
    splice_all(&mut out);
    out
}

/// Same result as [`contract_all`] without listing the chains. Splicing out a
/// vertex leaves every other degree unchanged, so removing each degree-2
/// vertex in turn contracts every chain.
pub(crate) fn splice_all(tree: &mut Tree) {
    if !tree.live_indices().any(|i| tree.deg(i) >= 3) {
        return;
    }
    for i in 0..tree.capacity() as u32 {
        if tree.is_alive(i) && tree.deg(i) == 2 {
            tree.splice_out(i);
        }
    }
}

/// In-place form of [`perform_path_to_edge_contraction`]; returns the chains
/// that were contracted.
pub(crate) fn contract_all(tree: &mut Tree) -> Vec<RawChain> {
    let has_deg2 = tree.live_indices().any(|i| tree.deg(i) == 2);
    if !has_deg2 {
        return Vec::new();
    }
    let chains = raw_chains(tree);
    for c in &chains {
        contract_raw(tree, c);
    }
    chains
}

pub(crate) fn contract_raw(tree: &mut Tree, chain: &RawChain) {
    for &w in &chain.internal {
        tree.splice_out(w);
    }
}

/// Maps a public chain back to dense indices, checking that it still describes
/// a chain of `tree`.
fn resolve(tree: &Tree, path: &ChainPath) -> Option<RawChain> {
    if path.internal.is_empty() {
        return None;
    }
    let from = tree.index_of(path.endpoints.0)?;
    let to = tree.index_of(path.endpoints.1)?;
    let internal = path
        .internal
        .iter()
        .map(|&v| tree.index_of(v))
        .collect::<Option<Vec<u32>>>()?;

    let far_ok = match path.kind {
        ChainKind::P1 => tree.deg(to) >= 3,
        ChainKind::P2 => tree.deg(to) == 1,
    };
    if tree.deg(from) < 3 || !far_ok || internal.iter().any(|&w| tree.deg(w) != 2) {
        return None;
    }
    let walk = std::iter::once(from)
        .chain(internal.iter().copied())
        .chain(std::iter::once(to))
        .collect::<Vec<_>>();
    if walk.windows(2).any(|w| !tree.adj(w[0]).any(|x| x == w[1])) {
        return None;
    }
    Some(RawChain {
        kind: path.kind,
        from,
        to,
        internal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: u64) -> VertexId {
        VertexId(x)
    }

    #[test]
    fn splice_all_matches_chain_contraction() {
        let t = Tree::from_edges([
            (1, 2),
            (2, 3),
            (3, 4),
            (3, 5),
            (5, 6),
            (6, 7),
            (3, 8),
            (8, 9),
            (9, 10),
            (9, 11),
        ])
        .unwrap();
        let mut by_chain = t.clone();
        let chains = contract_all(&mut by_chain);
        assert_eq!(chains.len(), 3);
        let mut direct = t.clone();
        splice_all(&mut direct);
        assert_eq!(direct, by_chain);

        let path = Tree::from_edges([(1, 2), (2, 3), (3, 4)]).unwrap();
        let mut p = path.clone();
        splice_all(&mut p);
        assert_eq!(p, path);
    }

    fn spider() -> Tree {
        Tree::from_edges([(1, 2), (2, 3), (1, 4), (4, 5), (1, 6), (6, 7)]).unwrap()
    }

    #[test]
    fn p1_between_two_branch_vertices() {
        // 1 and 3 have degree 3, joined through 2.
        let t = Tree::from_edges([(1, 2), (2, 3), (1, 10), (1, 11), (3, 12), (3, 13)]).unwrap();
        let paths = classify_paths(&t).unwrap();
        assert_eq!(
            paths,
            vec![ChainPath {
                kind: ChainKind::P1,
                endpoints: (v(1), v(3)),
                internal: vec![v(2)],
            }]
        );
        let c = contract_path(&t, &paths[0]).unwrap();
        assert!(!c.contains(v(2)));
        assert_eq!(c.neighbors(v(1)), Some(vec![v(3), v(10), v(11)]));
        assert_eq!(c.edge_count(), c.vertex_count() - 1);
    }

    #[test]
    fn spider_legs_are_p2() {
        let t = spider();
        let paths = classify_paths(&t).unwrap();
        assert_eq!(paths.len(), 3);
        assert!(paths.iter().all(|p| p.kind == ChainKind::P2));
        assert_eq!(paths[0].endpoints, (v(1), v(3)));
        assert_eq!(paths[0].internal, vec![v(2)]);

        let mut cur = t.clone();
        for p in &paths {
            cur = contract_path(&cur, p).unwrap();
        }
        let mut degrees: Vec<usize> = cur.vertices().iter().map(|&x| cur.degree(x).unwrap()).collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![1, 1, 1, 3]);
        assert_eq!(cur, perform_path_to_edge_contraction(&t));
    }

    #[test]
    fn p2_keeps_leaf() {
        let t = Tree::from_edges([(1, 2), (1, 3), (1, 4), (4, 5), (5, 6)]).unwrap();
        let paths = classify_paths(&t).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].internal, vec![v(4), v(5)]);
        let c = contract_path(&t, &paths[0]).unwrap();
        assert_eq!(c.degree(v(6)), Some(1));
        assert_eq!(c.degree(v(1)), Some(3));
    }

    #[test]
    fn star_has_no_chains() {
        let t = Tree::from_edges([(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(classify_paths(&t), Ok(vec![]));
        assert_eq!(perform_path_to_edge_contraction(&t), t);
    }

    #[test]
    fn path_has_no_branch_vertex() {
        let t = Tree::from_edges([(1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(classify_paths(&t), Err(ContractionError::NoBranchVertex));
        assert_eq!(perform_path_to_edge_contraction(&t), t);
    }

    #[test]
    fn stale_path_rejected() {
        let t = spider();
        let p = classify_paths(&t).unwrap().remove(0);
        let once = contract_path(&t, &p).unwrap();
        assert_eq!(contract_path(&once, &p), Err(ContractionError::StalePath(v(1), v(3))));
        let mut wrong_kind = p.clone();
        wrong_kind.kind = ChainKind::P1;
        assert!(contract_path(&t, &wrong_kind).is_err());
        let mut empty = p;
        empty.internal.clear();
        assert!(contract_path(&t, &empty).is_err());
    }
}
