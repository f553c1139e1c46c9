//! Minimum biconnectivity augmentation of trees.
//!
//! Given a tree `T`, [`tree_augment`] returns a smallest set of new edges that
//! makes `T` 2-vertex-connected; its size is always
//! `max(ceil(l / 2), Δ(T) - 1)` for `l` leaves and maximum degree `Δ(T)`.
//! [`parallel_tree_augment`] computes the identical edge list with a fork-join
//! worker pool. The [`verify`] module checks results independently.

pub mod augment;
pub mod bench;
pub mod contraction;
pub mod format;
pub mod generate;
pub mod parallel;
pub mod tree;
pub mod verify;

pub use augment::{
    compute_t, non_star_augment, star_augment, tree_augment, tree_augment_traced, AugmentError, AugmentTrace,
    AugmentationSet,
};
pub use contraction::{
    classify_paths, contract_path, perform_path_to_edge_contraction, ChainKind, ChainPath, ContractionError,
};
pub use parallel::{
    default_workers, parallel_contract, parallel_star_augment, parallel_tree_augment, CrewAudit, ParallelAugmenter,
    WorkerPlan,
};
pub use tree::{find_representatives, lower_bound, RepresentativeSet, Tree, TreeError, VertexId};
pub use verify::{
    brute_force_min_augmentation, check_result, is_biconnected, is_biconnected_by_deletion, Verdict,
    VerificationReport, VerifyError,
};
