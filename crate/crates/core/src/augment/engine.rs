use super::tables::{DegreeBuckets, RepresentativeTable};
use super::{AugmentError, AugmentTrace, AugmentationSet, Finish, Iteration};
use crate::contraction::{contract_all, splice_all, RawChain};
use crate::tree::{bound_from, find_representatives, Tree, VertexId};

pub(crate) type Pair = (VertexId, VertexId);

/// The parts of the driver that the parallel engine runs across workers.
/// Everything else (selection, table updates) stays on the calling thread.
pub(crate) trait Executor {
    /// Contracts every chain. The chains are returned when `record` is set;
    /// otherwise the result may be empty.
    fn contract(&self, tree: &mut Tree, record: bool) -> Vec<RawChain>;

    /// Appends `(xs[k], ys[k])` for every `k`.
    fn emit(&self, tree: &Tree, xs: &[u32], ys: &[u32], out: &mut Vec<Pair>);

    /// Deletes leaves that all hang off `parent`.
    fn delete_leaves(&self, tree: &mut Tree, parent: u32, leaves: &[u32]);

    /// Appends `(leaves[0], leaves[k])` for `k >= 1`.
    fn fan(&self, tree: &Tree, leaves: &[u32], out: &mut Vec<Pair>);
}

pub(crate) struct Sequential;

impl Executor for Sequential {
    fn contract(&self, tree: &mut Tree, record: bool) -> Vec<RawChain> {
        if record {
            contract_all(tree)
        } else {
            splice_all(tree);
            Vec::new()
        }
    }

    fn emit(&self, tree: &Tree, xs: &[u32], ys: &[u32], out: &mut Vec<Pair>) {
        out.extend(xs.iter().zip(ys).map(|(&x, &y)| ordered(tree, x, y)));
    }

    fn delete_leaves(&self, tree: &mut Tree, parent: u32, leaves: &[u32]) {
        tree.remove_leaves_of(parent, leaves);
    }

    fn fan(&self, tree: &Tree, leaves: &[u32], out: &mut Vec<Pair>) {
        if let Some((&first, rest)) = leaves.split_first() {
            out.extend(rest.iter().map(|&x| ordered(tree, first, x)));
        }
    }
}

pub(crate) fn ordered(tree: &Tree, a: u32, b: u32) -> Pair {
    let (a, b) = (tree.id(a), tree.id(b));
    (a.min(b), a.max(b))
}

/// Shared driver for the sequential and parallel engines.
pub(crate) fn run<E: Executor>(
    exec: &E,
    tree: &Tree,
    record: bool,
) -> Result<(AugmentationSet, Option<AugmentTrace>), AugmentError> {
    let n = tree.vertex_count();
    if n < 3 {
        return Err(AugmentError::TreeTooSmall(n));
    }

    if tree.leaf_count() == 2 {
        let [x, y] = tree.leaves()[..] else {
            unreachable!("two leaves counted")
        };
        let set = AugmentationSet::from_pairs([(x, y)]);
        let trace = record.then(|| AugmentTrace {
            contracted: Vec::new(),
            representatives: Default::default(),
            iterations: Vec::new(),
            finish: Finish::TwoLeaves,
        });
        return Ok((set, trace));
    }

    let mut work = tree.clone();
    let chains = exec.contract(&mut work, record);
    let mut trace = record.then(|| AugmentTrace {
        contracted: chains.iter().map(|c| c.to_path(tree)).collect(),
        representatives: find_representatives(&work),
        iterations: Vec::new(),
        finish: Finish::Path,
    });

    let mut state = State::new(exec, work);
    while state.step(trace.as_mut())? {}
    let finish = state.finish();
    if let Some(trace) = trace.as_mut() {
        trace.finish = finish;
    }
    Ok((AugmentationSet { pairs: state.out }, trace))
}

pub(super) fn non_star_only(tree: &Tree) -> Result<(AugmentationSet, Tree), AugmentError> {
    let mut work = tree.clone();
    splice_all(&mut work);
    let mut state = State::new(&Sequential, work);
    if state.reps.len() < 2 {
        return Err(AugmentError::FewerThanTwoRepresentatives);
    }
    while state.step(None)? {}
    Ok((AugmentationSet { pairs: state.out }, state.tree))
}

/// Working copy of a contracted tree plus its leaf table (H1), the
/// representative buckets (H2), and buckets over every branch vertex, which
/// the degree cap needs. Both bucket sets are keyed by table row.
struct State<'e, E> {
    exec: &'e E,
    tree: Tree,
    table: RepresentativeTable,
    reps: DegreeBuckets,
    branch: DegreeBuckets,
    leaf_count: usize,
    out: Vec<Pair>,
}

impl<'e, E: Executor> State<'e, E> {
    fn new(exec: &'e E, tree: Tree) -> Self {
        let table = RepresentativeTable::build(&tree);
        let mut reps = DegreeBuckets::new();
        let mut branch = DegreeBuckets::counting();
        reps.reserve(table.rows());
        branch.reserve(table.rows());
        for r in 0..table.rows() as u32 {
            let v = table.vertex_at(r);
            branch.set(r, tree.deg(v));
            if table.leaf_count(v) > 0 {
                reps.set(r, tree.deg(v));
            }
        }
        let leaf_count = tree.leaf_count();
        // The run emits exactly the lower bound.
        let bound = bound_from(leaf_count, branch.max_degree().unwrap_or(1));
        Self {
            exec,
            leaf_count,
            tree,
            table,
            reps,
            branch,
            out: Vec::with_capacity(bound),
        }
    }

    /// One non-star iteration. `Ok(false)` once fewer than two
    /// representatives remain.
    fn step(&mut self, trace: Option<&mut AugmentTrace>) -> Result<bool, AugmentError> {
        let (ki, kj) = match self.reps.take_top_two() {
            Ok(pair) => pair,
            Err(AugmentError::FewerThanTwoRepresentatives) => return Ok(false),
            Err(e) => return Err(e),
        };
        let (ri, rj) = (self.table.vertex_at(ki), self.table.vertex_at(kj));
        let (di, li) = (self.tree.deg(ri), self.table.leaf_count(ri));
        let (dj, lj) = (self.tree.deg(rj), self.table.leaf_count(rj));
        let table_t = super::compute_t(di, li, dj, lj);

        // Every vertex outside the pair keeps its degree, so Δ - 1 can only
        // fall by t if no such vertex is within t of the current bound.
        let bound = bound_from(self.leaf_count, self.branch.max_degree().unwrap_or(1));
        let others = self.branch.max_excluding(ki, kj).unwrap_or(1);
        let t = table_t.min(bound + 1 - others);
        assert!(t >= 1 && t <= li && t <= lj, "bad pair count {t}");

        let xs = self.table.take_smallest(ri, t);
        let ys = self.table.take_smallest(rj, t);
        let start = self.out.len();
        self.exec.emit(&self.tree, &xs, &ys, &mut self.out);

        self.exec.delete_leaves(&mut self.tree, ri, &xs);
        self.exec.delete_leaves(&mut self.tree, rj, &ys);
        self.leaf_count -= 2 * t;

        if let Some(trace) = trace {
            trace.iterations.push(Iteration {
                first: (self.tree.id(ri), di, li),
                second: (self.tree.id(rj), dj, lj),
                table_t,
                t,
                pairs: self.out[start..].to_vec(),
            });
        }

        self.update_after_removal(&[ri, rj]);
        Ok(true)
    }

    /// Re-files the representatives that just lost leaves. One that dropped
    /// to degree 2 is spliced out and its remaining leaf moves to the
    /// surviving neighbour; one that kept degree >= 3 but has no leaves left
    /// leaves the buckets but stays keyed in the table.
    fn update_after_removal(&mut self, affected: &[u32]) {
        for &v in affected {
            let d = self.tree.deg(v);
            assert!(d >= 2, "representative {} became a leaf", self.tree.id(v));
            let k = self.key(v);
            if d >= 3 {
                self.branch.set(k, d);
                if self.table.leaf_count(v) == 0 {
                    self.reps.remove(k);
                } else {
                    self.reps.set(k, d);
                }
            } else {
                self.reps.remove(k);
                self.branch.remove(k);
                self.splice(v);
            }
        }
    }

    /// Table row of a vertex that had degree >= 3 when the table was built.
    fn key(&self, v: u32) -> u32 {
        self.table.row_of(v).expect("branch vertex has a table row")
    }

    fn splice(&mut self, v: u32) {
        let leftover = self.table.retire(v);
        let (a, b) = self.tree.splice_out(v);
        for x in leftover {
            let p = if x == a { b } else { a };
            if self.tree.deg(p) == 1 {
                // x and p are the two ends of a residual path
                continue;
            }
            self.table.insert(p, x);
            if self.tree.deg(p) >= 3 {
                self.reps.set(self.key(p), self.tree.deg(p));
            }
        }
    }

    fn finish(&mut self) -> Finish {
        if self.leaf_count == 2 {
            let ends: Vec<u32> = self.tree.live_indices().filter(|&i| self.tree.deg(i) == 1).collect();
            assert_eq!(ends.len(), 2, "residual path must have two leaves");
            let (x, y) = (ends[0], ends[1]);
            self.exec.emit(&self.tree, &[x], &[y], &mut self.out);
            return Finish::Path;
        }

        assert_eq!(
            self.reps.len(),
            1,
            "residual with three or more leaves has one representative"
        );
        let (k, _) = self.reps.max_entry().expect("one representative");
        let center = self.table.vertex_at(k);
        let leaves = self.table.leaves(center);
        assert_eq!(
            self.tree.deg(center),
            self.tree.vertex_count() - 1,
            "residual is not a star"
        );
        assert_eq!(leaves.len(), self.tree.deg(center));
        self.exec.fan(&self.tree, &leaves, &mut self.out);
        Finish::Star {
            center: self.tree.id(center),
            edges: leaves.len() - 1,
        }
    }
}
