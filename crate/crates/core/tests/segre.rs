use std::sync::Arc;

use phylosemi::oracle::{factorizations, find_segre_instance, markov_with_cap, merged_segre_fiber};
use phylosemi::topology::tripod;
use phylosemi::tree::WeightedTree;

#[test]
fn family_instance_has_two_factorizations() {
    let inst = find_segre_instance(9).unwrap();
    assert_eq!(inst.spec.tree().leaf_count(), 9);
    assert_eq!(inst.omega.degree(), 3);
    let all = factorizations(&inst.spec, &inst.omega, 10).unwrap();
    assert_eq!(all.len(), 2);
    for f in &inst.factorizations {
        assert!(all.contains(f));
    }
    let shared = inst.factorizations[0].iter().any(|w| inst.factorizations[1].contains(w));
    assert!(!shared);
}

#[test]
fn markov_bound_is_three() {
    let inst = find_segre_instance(9).unwrap();
    let report = markov_with_cap(&inst.spec, 4, 100).unwrap();
    eprintln!("{report:?}");
    assert_eq!(report.max_degree, 3);
}

#[test]
fn merging_keeps_the_fiber_split() {
    let inst = find_segre_instance(9).unwrap();
    let tree = inst.spec.tree().clone();
    let leaf_edge = (0..tree.edge_count()).find(|&e| tree.is_leaf_edge(e)).unwrap();
    let other = WeightedTree::new(tripod(), vec![6, 6, 6], 3);
    let (count, components) = merged_segre_fiber(&inst, leaf_edge, &other, 0).unwrap();
    assert_eq!(count, 2);
    assert_eq!(components, 2);
    let _ = Arc::strong_count(&tree);
}
