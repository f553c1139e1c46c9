use proptest::prelude::*;
use treeaug::generate::prufer_decode;
use treeaug::{
    brute_force_min_augmentation, check_result, is_biconnected, is_biconnected_by_deletion, lower_bound,
    parallel_contract, parallel_tree_augment, perform_path_to_edge_contraction, tree_augment, Tree, VertexId,
    WorkerPlan,
};

fn tree_strategy(max_n: usize) -> impl Strategy<Value = Tree> {
    (3..=max_n)
        .prop_flat_map(|n| proptest::collection::vec(1..=n as u64, n - 2))
        .prop_map(|seq| Tree::from_edges(prufer_decode(&seq)).unwrap())
}

fn branch_degrees(t: &Tree) -> Vec<(VertexId, usize)> {
    t.vertices()
        .into_iter()
        .map(|v| (v, t.degree(v).unwrap()))
        .filter(|&(_, d)| d >= 3)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn augmentation_meets_bound_and_verifies(t in tree_strategy(120)) {
        let set = tree_augment(&t).unwrap();
        prop_assert_eq!(set.len(), lower_bound(&t).unwrap());
        let report = check_result(&t, &set, false).unwrap();
        prop_assert!(report.passed(), "{}", report);
        for &(u, v) in &set {
            prop_assert!(u < v);
        }
    }

    #[test]
    fn contraction_invariants(t in tree_strategy(150)) {
        let c = perform_path_to_edge_contraction(&t);
        prop_assert_eq!(c.leaf_count(), t.leaf_count());
        prop_assert_eq!(branch_degrees(&c), branch_degrees(&t));
        prop_assert_eq!(lower_bound(&c).ok(), lower_bound(&t).ok());
        prop_assert_eq!(&perform_path_to_edge_contraction(&c), &c);
        if t.max_degree() >= 3 {
            prop_assert!(c.vertices().iter().all(|&v| c.degree(v) != Some(2)));
        } else {
            prop_assert_eq!(&c, &t);
        }
    }

    #[test]
    fn parallel_contraction_matches(t in tree_strategy(150), workers in 1usize..9) {
        prop_assert_eq!(parallel_contract(&t, workers), perform_path_to_edge_contraction(&t));
    }

    #[test]
    fn engines_agree(t in tree_strategy(200), workers in 1usize..9) {
        prop_assert_eq!(parallel_tree_augment(&t, workers).unwrap(), tree_augment(&t).unwrap());
    }

    #[test]
    fn plan_partitions(workers in 0usize..20, tasks in 0usize..200) {
        let ranges = WorkerPlan::new(workers).ranges(tasks);
        let mut next = 0;
        for r in &ranges {
            prop_assert_eq!(r.start, next);
            prop_assert!(!r.is_empty());
            next = r.end;
        }
        prop_assert_eq!(next, tasks);
        prop_assert!(ranges.len() <= workers.max(1));
        if let (Some(lo), Some(hi)) = (ranges.iter().map(|r| r.len()).min(), ranges.iter().map(|r| r.len()).max()) {
            prop_assert!(hi - lo <= 1);
        }
    }

    #[test]
    fn checkers_agree(t in tree_strategy(10), extra in proptest::collection::vec((1u64..=10, 1u64..=10), 0..8)) {
        let n = t.vertex_count() as u64;
        let mut edges = t.edges();
        edges.extend(
            extra
                .into_iter()
                .map(|(a, b)| (a.min(n), b.min(n)))
                .filter(|(a, b)| a != b)
                .map(|(a, b)| (VertexId(a.min(b)), VertexId(a.max(b)))),
        );
        let vs = t.vertices();
        prop_assert_eq!(is_biconnected(&vs, &edges).unwrap(), is_biconnected_by_deletion(&vs, &edges).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn oracle_matches(t in tree_strategy(9)) {
        prop_assert_eq!(brute_force_min_augmentation(&t).unwrap(), tree_augment(&t).unwrap().len());
    }
}
