use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use phylosemi::oracle::{check_deg1_generation, enumerate_degree, factorizations, hilbert};
use phylosemi::rewrite::{decompose_relation, factor_weighting, Method};
use phylosemi::topology::{caterpillar, snowflake, trivalent_topologies};
use phylosemi::tree::{classify_leaves, LeafWeights, TrivalentTree};
use phylosemi::weighting::{SemigroupSpec, Weighting};
use phylosemi::Level;

fn tree(n: usize, pick: usize) -> Arc<TrivalentTree> {
    let all = trivalent_topologies(n);
    Arc::new(all[pick % all.len()].clone())
}

/// Makes raw leaf weights admissible: even on lone leaves, even pair sums.
fn admissible(tree: &TrivalentTree, raw: &[u64]) -> LeafWeights {
    let pairing = classify_leaves(tree).unwrap();
    let index = |v| tree.leaves().iter().position(|&l| l == v).unwrap();
    let mut r = raw[..tree.leaf_count()].to_vec();
    for &l in &pairing.lone {
        r[index(l)] &= !1;
    }
    for &(a, b) in &pairing.pairs {
        if (r[index(a)] + r[index(b)]) % 2 == 1 {
            r[index(b)] ^= 1;
        }
    }
    LeafWeights::from_leaf_order(tree, &r)
}

fn instance() -> impl Strategy<Value = SemigroupSpec> {
    (4usize..=6, 0usize..4, proptest::collection::vec(0u64..=4, 6), prop_oneof![Just(4u64), Just(6)]).prop_map(
        |(n, pick, raw, level)| {
            let t = tree(n, pick);
            let r = admissible(&t, &raw);
            SemigroupSpec::s(t, r, Level::Finite(level))
        },
    )
}

fn pick_sum(spec: &SemigroupSpec, s1: &[Weighting], picks: &[usize]) -> (Vec<Weighting>, Weighting) {
    let mut parts: Vec<Weighting> = picks.iter().map(|&i| s1[i % s1.len()].clone()).collect();
    parts.sort();
    let sum = Weighting::sum(spec.edge_count(), &parts);
    (parts, sum)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sumsets_stay_inside(spec in instance(), i in 0usize..1000, j in 0usize..1000) {
        let s1 = enumerate_degree(&spec, 1).unwrap();
        let s2 = enumerate_degree(&spec, 2).unwrap();
        prop_assume!(!s1.is_empty());
        let a = &s1[i % s1.len()];
        let b = &s2[j % s2.len()];
        prop_assert!(spec.is_member(&(a + b)));
    }

    #[test]
    fn enumeration_is_complete(spec in instance(), seeds in proptest::collection::vec(any::<u64>(), 64)) {
        let k = 2;
        let members: BTreeSet<Weighting> = enumerate_degree(&spec, k).unwrap().into_iter().collect();
        prop_assert!(members.iter().all(|w| spec.is_member(w)));
        let bound = members.iter().flat_map(|w| w.values().iter().copied()).max().unwrap_or(0) + 2;
        for chunk in seeds.chunks(8) {
            let values: Vec<u64> = (0..spec.edge_count()).map(|e| chunk[e % chunk.len()].rotate_left(e as u32 * 7) % (bound + 1)).collect();
            let w = Weighting::new(values, k);
            prop_assert_eq!(spec.is_member(&w), members.contains(&w));
        }
        for w in members.iter().take(32) {
            prop_assert!(spec.is_member(w));
        }
    }

    #[test]
    fn factorizations_verify(spec in instance(), picks in proptest::collection::vec(0usize..1000, 1..=4)) {
        let s1 = enumerate_degree(&spec, 1).unwrap();
        prop_assume!(!s1.is_empty());
        let (_, omega) = pick_sum(&spec, &s1, &picks);
        let f = factor_weighting(&spec, &omega).unwrap();
        prop_assert_eq!(f.method, Method::Constructive);
        prop_assert_eq!(f.factors.len(), picks.len());
        prop_assert!(f.factors.iter().all(|x| x.degree() == 1 && spec.is_member(x)));
        prop_assert_eq!(Weighting::sum(spec.edge_count(), &f.factors), omega);
    }

    #[test]
    fn certificates_replay(spec in instance(), picks in proptest::collection::vec(0usize..1000, 2..=3), choice in 0usize..100) {
        let s1 = enumerate_degree(&spec, 1).unwrap();
        prop_assume!(!s1.is_empty());
        let (lhs, omega) = pick_sum(&spec, &s1, &picks);
        let all = factorizations(&spec, &omega, 64).unwrap();
        let rhs = &all[choice % all.len()];
        let cert = decompose_relation(&spec, &lhs, rhs).unwrap();
        prop_assert!(cert.replay().is_ok());
        prop_assert!(cert.max_degree() <= 3);
    }

    #[test]
    fn hilbert_matches_across_six_leaf_topologies(raw in proptest::collection::vec(0u64..=3, 6), level in 2u64..=4) {
        let (a, b) = (Arc::new(caterpillar(6)), Arc::new(snowflake()));
        let sa = SemigroupSpec::s(a.clone(), LeafWeights::from_leaf_order(&a, &raw), Level::Finite(level));
        let sb = SemigroupSpec::s(b.clone(), LeafWeights::from_leaf_order(&b, &raw), Level::Finite(level));
        prop_assert_eq!(hilbert(&sa, 3).unwrap().counts, hilbert(&sb, 3).unwrap().counts);
    }

    #[test]
    fn generation_implies_factorization(spec in instance()) {
        prop_assume!(spec.enumerate(1).unwrap().len() <= 40);
        let report = check_deg1_generation(&spec, 2).unwrap();
        prop_assert!(report.generated);
        for w in enumerate_degree(&spec, 2).unwrap() {
            prop_assert!(factor_weighting(&spec, &w).is_ok());
        }
    }
}

#[test]
fn hilbert_starts_at_one() {
    let t = Arc::new(snowflake());
    let spec = SemigroupSpec::s(t.clone(), LeafWeights::uniform(&t, 2), Level::Finite(4));
    let table = hilbert(&spec, 3).unwrap();
    assert_eq!(table.counts[0], 1);
    for (k, &c) in table.counts.iter().enumerate() {
        assert_eq!(c, enumerate_degree(&spec, k as u64).unwrap().len() as u128);
    }
}
