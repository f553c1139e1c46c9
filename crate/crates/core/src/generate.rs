//! Tree generators: Prüfer decoding, exhaustive enumeration, and the fixed
//! benchmark shapes. Vertices are always labelled `1..=n`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tree::Tree;

/// Decodes a Prüfer sequence over `1..=n` (with `n = seq.len() + 2`) into the
/// edge list of its labelled tree. Edges come out in decoding order.
///
/// Panics if an entry lies outside `1..=n`.
pub fn prufer_decode(seq: &[u64]) -> Vec<(u64, u64)> {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n + 1];
    for &x in seq {
        assert!((1..=n as u64).contains(&x), "label {x} outside 1..={n}");
        degree[x as usize] += 1;
    }

    // Linear-time decode: `ptr` scans for the smallest leaf, and a freshly
    // created leaf smaller than `ptr` is consumed immediately.
    let mut edges = Vec::with_capacity(n - 1);
    let mut ptr = 1;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &x in seq {
        let x = x as usize;
        edges.push((leaf as u64, x as u64));
        degree[leaf] -= 1;
        degree[x] -= 1;
        if degree[x] == 1 && x < ptr {
            leaf = x;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    let last = (1..=n).rev().find(|&v| v != leaf && degree[v] == 1).unwrap();
    edges.push((leaf as u64, last as u64));
    edges
}

/// Uniformly random labelled tree on `1..=n`, reproducible from `seed`.
pub fn random_tree(n: usize, seed: u64) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tree_with(n, &mut rng)
}

pub fn random_tree_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tree {
    assert!(n >= 2, "random trees need at least two vertices");
    let seq: Vec<u64> = (0..n - 2).map(|_| rng.gen_range(1..=n as u64)).collect();
    Tree::from_edges(prufer_decode(&seq)).expect("Prüfer decoding yields a tree")
}

/// Every labelled tree on `1..=n`, in lexicographic order of Prüfer sequence.
/// There are `n^(n-2)` of them.
pub fn all_trees(n: usize) -> AllTrees {
    assert!(n >= 2, "enumeration needs at least two vertices");
    AllTrees {
        n: n as u64,
        seq: Some(vec![1; n - 2]),
    }
}

pub struct AllTrees {
    n: u64,
    seq: Option<Vec<u64>>,
}

impl Iterator for AllTrees {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        let seq = self.seq.as_mut()?;
        let tree = Tree::from_edges(prufer_decode(seq)).expect("Prüfer decoding yields a tree");
        // odometer increment
        match seq.iter().rposition(|&x| x < self.n) {
            Some(k) => {
                seq[k] += 1;
                seq[k + 1..].fill(1);
            }
            None => self.seq = None,
        }
        Some(tree)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Random,
    Star,
    Caterpillar,
    Spider,
    Path,
}

impl Shape {
    pub const ALL: [Shape; 5] = [
        Shape::Random,
        Shape::Star,
        Shape::Caterpillar,
        Shape::Spider,
        Shape::Path,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Random => "random",
            Shape::Star => "star",
            Shape::Caterpillar => "caterpillar",
            Shape::Spider => "spider",
            Shape::Path => "path",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown shape `{0}` (expected random, star, caterpillar, spider or path)")]
pub struct UnknownShape(pub String);

impl FromStr for Shape {
    type Err = UnknownShape;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Shape::ALL
            .into_iter()
            .find(|shape| shape.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownShape(s.to_string()))
    }
}

/// Edge list of a tree of the given shape. Only `Random` uses the seed.
///
/// - `Star`: centre 1 joined to `2..=n`.
/// - `Spider`: centre 1 with three legs whose lengths differ by at most one.
/// - `Path`: `1 - 2 - ... - n`.
/// - `Caterpillar`: a spine `1..=s` with `s = ceil(sqrt(n))`, the remaining
///   vertices hung round-robin on the spine, so the maximum degree is about
///   `sqrt(n)`.
pub fn shape_edges(shape: Shape, n: usize, seed: u64) -> Vec<(u64, u64)> {
    assert!(n >= 2, "shapes need at least two vertices");
    let n64 = n as u64;
    match shape {
        Shape::Random => random_tree(n, seed)
            .edges()
            .into_iter()
            .map(|(u, v)| (u.0, v.0))
            .collect(),
        Shape::Star => (2..=n64).map(|x| (1, x)).collect(),
        Shape::Path => (1..n64).map(|x| (x, x + 1)).collect(),
        Shape::Spider => {
            let legs = 3u64;
            let rest = n64 - 1;
            let mut edges = Vec::with_capacity(n - 1);
            let mut next = 2;
            for leg in 0..legs {
                let len = rest / legs + u64::from(leg < rest % legs);
                let mut prev = 1;
                for _ in 0..len {
                    edges.push((prev, next));
                    prev = next;
                    next += 1;
                }
            }
            edges
        }
        Shape::Caterpillar => {
            let spine = ((n as f64).sqrt().ceil() as u64).clamp(1, n64);
            let mut edges: Vec<(u64, u64)> = (1..spine).map(|x| (x, x + 1)).collect();
            for (k, x) in (spine + 1..=n64).enumerate() {
                edges.push((k as u64 % spine + 1, x));
            }
            edges
        }
    }
}

pub fn shape_tree(shape: Shape, n: usize, seed: u64) -> Tree {
    Tree::from_edges(shape_edges(shape, n, seed)).expect("generated shapes are trees")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::VertexId;

    #[test]
    fn decode_known_sequence() {
        // {4,4,4,5} on six vertices: 4 holds 1, 2, 3 and joins 5, which holds 6
        let t = Tree::from_edges(prufer_decode(&[4, 4, 4, 5])).unwrap();
        assert_eq!(t.degree(VertexId(4)), Some(4));
        assert_eq!(t.degree(VertexId(5)), Some(2));
        assert_eq!(t.leaf_count(), 4);
    }

    #[test]
    fn enumeration_counts() {
        for (n, count) in [(2, 1), (3, 3), (4, 16), (5, 125), (6, 1296)] {
            assert_eq!(all_trees(n).count(), count, "n = {n}");
        }
    }

    #[test]
    fn enumeration_is_injective() {
        let mut seen: Vec<Vec<_>> = all_trees(5).map(|t| t.edges()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 125);
    }

    #[test]
    fn random_is_seeded() {
        assert_eq!(random_tree(50, 7), random_tree(50, 7));
        assert_ne!(random_tree(50, 7), random_tree(50, 8));
    }

    #[test]
    fn fixed_shapes() {
        let star = shape_tree(Shape::Star, 4, 0);
        assert_eq!(star.star_center(), Some(VertexId(1)));
        assert_eq!(star.edge_count(), 3);

        let spider = shape_tree(Shape::Spider, 7, 99);
        assert_eq!(spider.degree(VertexId(1)), Some(3));
        assert_eq!(spider.leaf_count(), 3);
        assert_eq!(spider.edges().iter().filter(|(u, _)| u.0 == 1).count(), 3);

        let path = shape_tree(Shape::Path, 5, 0);
        assert_eq!(path.leaf_count(), 2);

        let cat = shape_tree(Shape::Caterpillar, 65_536, 0);
        assert!(cat.max_degree() >= 256);
        assert_eq!(cat.vertex_count(), 65_536);
    }

    #[test]
    fn shape_names_round_trip() {
        for s in Shape::ALL {
            assert_eq!(s.name().parse::<Shape>(), Ok(s));
        }
        assert!("banana".parse::<Shape>().is_err());
    }
}
