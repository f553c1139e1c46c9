//! Fork-join parallel augmentation.
//!
//! Runs the same driver as [`crate::tree_augment`], but chain discovery,
//! chain contraction marking, pair emission, leaf-deletion marking and the
//! final star fan are split across a fixed pool of workers. Each phase hands
//! every worker a disjoint index range of a shared task array; the tree is
//! shared read-only while a phase runs. Structural edits and the H1/H2 tables
//! stay with the calling (coordinator) thread between phases.
//!
//! Output is identical, element for element, to the sequential engine.

use std::ops::Range;
use std::sync::atomic::{AtomicU8, AtomicUsize, Ordering};

use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::augment::{run, AugmentError, AugmentationSet, Executor, Pair};
use crate::contraction::{chains_from, RawChain};
use crate::tree::Tree;

/// Splits task arrays into contiguous per-worker index ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkerPlan {
    workers: usize,
}

impl WorkerPlan {
    pub fn new(workers: usize) -> Self {
        Self {
            workers: workers.max(1),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Partition of `0..tasks` into at most `workers` non-empty ranges whose
    /// lengths differ by at most one.
    pub fn ranges(&self, tasks: usize) -> Vec<Range<usize>> {
        let parts = self.workers.min(tasks);
        if parts == 0 {
            return Vec::new();
        }
        let (base, extra) = (tasks / parts, tasks % parts);
        let mut start = 0;
        (0..parts)
            .map(|p| {
                let len = base + usize::from(p < extra);
                let r = start..start + len;
                start += len;
                r
            })
            .collect()
    }
}

/// Default worker count: the tree's maximum degree, capped at the hardware
/// parallelism.
pub fn default_workers(tree: &Tree) -> usize {
    let hw = std::thread::available_parallelism().map_or(1, |n| n.get());
    tree.max_degree().clamp(1, hw)
}

/// Write accounting across the parallel phases of one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrewAudit {
    /// Phases executed (including ones small enough to run on one worker).
    pub phases: usize,
    /// Phases that actually fanned out to more than one worker.
    pub forked_phases: usize,
    /// Task-array entries processed over the run.
    pub tasks: usize,
    /// Shared slots written, counted once per write.
    pub slot_writes: usize,
    /// Slots written more than once within a phase, or not at all when the
    /// phase required it.
    pub violations: usize,
    /// Largest number of tasks handed to a single phase.
    pub widest_phase: usize,
}

#[derive(Default)]
struct AuditCounters {
    phases: AtomicUsize,
    forked_phases: AtomicUsize,
    tasks: AtomicUsize,
    slot_writes: AtomicUsize,
    violations: AtomicUsize,
    widest_phase: AtomicUsize,
}

impl AuditCounters {
    fn snapshot(&self) -> CrewAudit {
        CrewAudit {
            phases: self.phases.load(Ordering::Relaxed),
            forked_phases: self.forked_phases.load(Ordering::Relaxed),
            tasks: self.tasks.load(Ordering::Relaxed),
            slot_writes: self.slot_writes.load(Ordering::Relaxed),
            violations: self.violations.load(Ordering::Relaxed),
            widest_phase: self.widest_phase.load(Ordering::Relaxed),
        }
    }
}

/// A reusable parallel engine bound to a worker pool.
pub struct ParallelAugmenter {
    pool: ThreadPool,
    plan: WorkerPlan,
    audit: AuditCounters,
}

impl ParallelAugmenter {
    pub fn new(workers: usize) -> Self {
        let plan = WorkerPlan::new(workers);
        let pool = ThreadPoolBuilder::new()
            .num_threads(plan.workers())
            .thread_name(|i| format!("treeaug-worker-{i}"))
            .build()
            .expect("failed to start worker pool");
        Self {
            pool,
            plan,
            audit: AuditCounters::default(),
        }
    }

    pub fn workers(&self) -> usize {
        self.plan.workers()
    }

    pub fn augment(&self, tree: &Tree) -> Result<AugmentationSet, AugmentError> {
        run(self, tree, false).map(|(set, _)| set)
    }

    /// Like [`Self::augment`], also returning the write audit for this run.
    pub fn augment_audited(&self, tree: &Tree) -> Result<(AugmentationSet, CrewAudit), AugmentError> {
        let before = self.audit.snapshot();
        let set = self.augment(tree)?;
        Ok((set, diff(&self.audit.snapshot(), &before)))
    }

    pub fn contract(&self, tree: &Tree) -> Tree {
        let mut out = tree.clone();
        Executor::contract(self, &mut out, false);
        out
    }

    pub fn star_augment(&self, tree: &Tree) -> Result<AugmentationSet, AugmentError> {
        let center = tree.star_center().ok_or(AugmentError::NotAStar)?;
        let c = tree.index_of(center).expect("center is live");
        let mut leaves: Vec<u32> = tree.adj(c).collect();
        leaves.sort_unstable();
        let mut out = Vec::new();
        self.fan(tree, &leaves, &mut out);
        Ok(AugmentationSet::from_pairs(out))
    }

    pub fn audit(&self) -> CrewAudit {
        self.audit.snapshot()
    }

    /// Runs `task(k)` for every `k < slots.len()` and stores the result in
    /// `slots[k]`. Each worker owns one contiguous range of the slot array,
    /// and every slot must be written exactly once.
    fn phase<T, F>(&self, slots: &mut [Option<T>], task: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let ranges = self.plan.ranges(slots.len());
        let mut writes = vec![0u32; slots.len()];
        let work = |offset: usize, slots: &mut [Option<T>], writes: &mut [u32]| {
            for (k, (slot, w)) in slots.iter_mut().zip(writes.iter_mut()).enumerate() {
                *slot = Some(task(offset + k));
                *w += 1;
            }
        };

        if ranges.len() <= 1 {
            work(0, slots, &mut writes);
        } else {
            self.pool.scope(|s| {
                let (mut rest, mut rest_w) = (&mut *slots, &mut writes[..]);
                for r in &ranges {
                    let (mine, tail) = rest.split_at_mut(r.len());
                    let (mine_w, tail_w) = rest_w.split_at_mut(r.len());
                    rest = tail;
                    rest_w = tail_w;
                    let (work, start) = (&work, r.start);
                    s.spawn(move |_| work(start, mine, mine_w));
                }
            });
            self.audit.forked_phases.fetch_add(1, Ordering::Relaxed);
        }

        let written: usize = writes.iter().map(|&w| w as usize).sum();
        let bad = writes.iter().filter(|&&w| w != 1).count();
        self.record(slots.len(), written, bad);
    }

    fn record(&self, tasks: usize, written: usize, bad: usize) {
        let a = &self.audit;
        a.phases.fetch_add(1, Ordering::Relaxed);
        a.tasks.fetch_add(tasks, Ordering::Relaxed);
        a.slot_writes.fetch_add(written, Ordering::Relaxed);
        a.violations.fetch_add(bad, Ordering::Relaxed);
        a.widest_phase.fetch_max(tasks, Ordering::Relaxed);
    }
}

fn diff(after: &CrewAudit, before: &CrewAudit) -> CrewAudit {
    CrewAudit {
        phases: after.phases - before.phases,
        forked_phases: after.forked_phases - before.forked_phases,
        tasks: after.tasks - before.tasks,
        slot_writes: after.slot_writes - before.slot_writes,
        violations: after.violations - before.violations,
        widest_phase: after.widest_phase,
    }
}

impl Executor for ParallelAugmenter {
    /// Three steps: workers discover chains from the branch vertices in their
    /// index block; workers mark the internal vertices of their share of the
    /// chains; the coordinator rewires endpoints and drops marked vertices.
    fn contract(&self, tree: &mut Tree, _record: bool) -> Vec<RawChain> {
        if !tree.live_indices().any(|i| tree.deg(i) == 2) {
            return Vec::new();
        }

        let blocks = self.plan.ranges(tree.capacity());
        let mut found: Vec<Option<Vec<RawChain>>> = vec![None; blocks.len()];
        {
            let tree = &*tree;
            self.phase(&mut found, |b| {
                let mut out = Vec::new();
                for u in blocks[b].clone().map(|u| u as u32) {
                    if tree.is_alive(u) && tree.deg(u) >= 3 {
                        chains_from(tree, u, &mut out);
                    }
                }
                out
            });
        }
        let mut chains: Vec<RawChain> = found.into_iter().flatten().flatten().collect();
        chains.sort_by_key(|c| (c.from.min(c.to), c.from.max(c.to)));

        // One mark per internal vertex; a second mark means two chains
        // claimed the same vertex.
        let marks: Vec<AtomicU8> = (0..tree.capacity()).map(|_| AtomicU8::new(0)).collect();
        let mut marked: Vec<Option<usize>> = vec![None; chains.len()];
        self.phase(&mut marked, |k| {
            let chain = &chains[k];
            chain
                .internal
                .iter()
                .filter(|&&w| marks[w as usize].fetch_add(1, Ordering::Relaxed) != 0)
                .count()
        });
        let collisions: usize = marked.into_iter().flatten().sum();
        let total_marks: usize = chains.iter().map(|c| c.internal.len()).sum();
        self.record(0, total_marks, collisions);

        for c in &chains {
            tree.bypass(c.from, &c.internal, c.to);
        }
        chains
    }

    fn emit(&self, tree: &Tree, xs: &[u32], ys: &[u32], out: &mut Vec<Pair>) {
        let mut slots = vec![None; xs.len()];
        self.phase(&mut slots, |k| crate::augment::ordered(tree, xs[k], ys[k]));
        out.extend(slots.into_iter().flatten());
    }

    /// Workers check that each doomed leaf hangs off `parent`; the
    /// coordinator then detaches them.
    fn delete_leaves(&self, tree: &mut Tree, parent: u32, leaves: &[u32]) {
        let mut slots = vec![None; leaves.len()];
        {
            let tree = &*tree;
            self.phase(&mut slots, |k| {
                let x = leaves[k];
                assert_eq!(tree.deg(x), 1, "deleting a non-leaf");
                tree.adj(x).next().expect("leaf has a neighbour")
            });
        }
        assert!(
            slots.iter().all(|&p| p == Some(parent)),
            "leaf does not hang off its representative"
        );
        tree.remove_leaves_of(parent, leaves);
    }

    fn fan(&self, tree: &Tree, leaves: &[u32], out: &mut Vec<Pair>) {
        let Some((&first, rest)) = leaves.split_first() else {
            return;
        };
        let mut slots = vec![None; rest.len()];
        self.phase(&mut slots, |k| crate::augment::ordered(tree, first, rest[k]));
        out.extend(slots.into_iter().flatten());
    }
}

/// Path contraction with `workers` workers; equal to
/// [`crate::perform_path_to_edge_contraction`].
pub fn parallel_contract(tree: &Tree, workers: usize) -> Tree {
    ParallelAugmenter::new(workers).contract(tree)
}

pub fn parallel_star_augment(tree: &Tree, workers: usize) -> Result<AugmentationSet, AugmentError> {
    ParallelAugmenter::new(workers).star_augment(tree)
}

pub fn parallel_tree_augment(tree: &Tree, workers: usize) -> Result<AugmentationSet, AugmentError> {
    ParallelAugmenter::new(workers).augment(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{star_augment, tree_augment};
    use crate::contraction::perform_path_to_edge_contraction;

    #[test]
    fn ranges_partition() {
        let plan = WorkerPlan::new(4);
        assert_eq!(plan.ranges(10), vec![0..3, 3..6, 6..8, 8..10]);
        assert_eq!(plan.ranges(2), vec![0..1, 1..2]);
        assert!(plan.ranges(0).is_empty());
        assert_eq!(WorkerPlan::new(0).workers(), 1);
    }

    #[test]
    fn star_matches_sequential() {
        let k14 = Tree::from_edges([(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
        assert_eq!(parallel_star_augment(&k14, 4), star_augment(&k14));
        let path = Tree::from_edges([(1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(parallel_star_augment(&path, 2), Err(AugmentError::NotAStar));
    }

    #[test]
    fn wide_star_writes_each_slot_once() {
        let star = Tree::from_edges((2..=65).map(|x| (1, x))).unwrap();
        let engine = ParallelAugmenter::new(8);
        let set = engine.star_augment(&star).unwrap();
        assert_eq!(set.len(), 63);
        let audit = engine.audit();
        assert_eq!(audit.slot_writes, 63);
        assert_eq!(audit.violations, 0);
        assert_eq!(audit.forked_phases, 1);
        assert_eq!(set, star_augment(&star).unwrap());
    }

    #[test]
    fn spider_contracts_like_sequential() {
        let spider = Tree::from_edges([(1, 2), (2, 3), (1, 4), (4, 5), (1, 6), (6, 7)]).unwrap();
        for w in [1, 2, 3, 8] {
            assert_eq!(parallel_contract(&spider, w), perform_path_to_edge_contraction(&spider));
        }
    }

    #[test]
    fn small_trees_match() {
        let t = Tree::from_edges([
            (1, 2),
            (2, 3),
            (1, 4),
            (3, 5),
            (2, 6),
            (2, 7),
            (1, 8),
            (3, 9),
            (3, 10),
            (1, 11),
        ])
        .unwrap();
        for w in [1, 2, 4] {
            let (set, audit) = ParallelAugmenter::new(w).augment_audited(&t).unwrap();
            assert_eq!(set, tree_augment(&t).unwrap());
            assert_eq!(audit.violations, 0);
        }
    }
}
