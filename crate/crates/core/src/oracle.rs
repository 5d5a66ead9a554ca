//! Brute-force ground truth: enumeration, Hilbert functions, degree-one
//! generation, Markov degree bounds, and the special families (good trees,
//! odd levels, Segre sites).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::cube::{in_omega, CubeError};
use crate::hull::Point;
use crate::relations::segre_cubic;
use crate::tree::{classify_leaves, merge, LeafWeights, MergeError, TreeError, TrivalentTree, WeightedTree};
use crate::weighting::{SemigroupSpec, SpecError, Weighting};
use crate::{Level, Variant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("no instance found within the search bounds")]
    NotFound,
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Merge(#[from] MergeError),
}

/// Members of degree `k`, sorted.
pub fn enumerate_degree(spec: &SemigroupSpec, k: u64) -> Result<Vec<Weighting>, OracleError> {
    Ok(spec.enumerate(k)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertTable {
    /// `counts[k] = |S[k]|`.
    pub counts: Vec<u128>,
}

pub fn hilbert(spec: &SemigroupSpec, k_max: u64) -> Result<HilbertTable, OracleError> {
    let counts = (0..=k_max).map(|k| spec.count(k)).collect::<Result<_, _>>()?;
    Ok(HilbertTable { counts })
}

/// Nondecreasing index tuples summing to `omega`.
fn factor_search(s1: &[Weighting], omega: &Weighting, limit: usize) -> Vec<Vec<usize>> {
    fn go(
        s1: &[Weighting],
        start: usize,
        rest: &Weighting,
        left: u64,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if left == 1 {
            if let Ok(i) = s1[start..].binary_search_by(|w| w.values().cmp(rest.values())) {
                cur.push(start + i);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for i in start..s1.len() {
            if let Some(next) = rest.checked_sub(&s1[i]) {
                cur.push(i);
                go(s1, i, &next, left - 1, cur, out, limit);
                cur.pop();
                if out.len() >= limit {
                    return;
                }
            }
        }
    }
    let mut out = Vec::new();
    if omega.degree() == 0 {
        out.push(Vec::new());
        return out;
    }
    go(s1, 0, omega, omega.degree(), &mut Vec::new(), &mut out, limit);
    out
}

/// Up to `limit` factorizations of `omega` into degree-one members, each
/// sorted, in lexicographic order of the sorted degree-one list.
pub fn factorizations(spec: &SemigroupSpec, omega: &Weighting, limit: usize) -> Result<Vec<Vec<Weighting>>, OracleError> {
    let s1 = spec.enumerate_below(1, omega)?;
    Ok(factor_search(&s1, omega, limit)
        .into_iter()
        .map(|ix| ix.into_iter().map(|i| s1[i].clone()).collect())
        .collect())
}

/// Some factorization of `omega` into degree-one members, by exhaustive
/// search.
pub fn find_factorization(spec: &SemigroupSpec, omega: &Weighting) -> Result<Option<Vec<Weighting>>, SpecError> {
    let s1 = spec.enumerate_below(1, omega)?;
    Ok(factor_search(&s1, omega, 1)
        .pop()
        .map(|ix| ix.into_iter().map(|i| s1[i].clone()).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationReport {
    pub generated: bool,
    /// Degree `k` and the least member of `S[k]` outside the `k`-fold sumset.
    pub witness: Option<(u64, Weighting)>,
}

/// Compares `S[k]` with the `k`-fold sumset of `S[1]` for `k <= k_max`.
pub fn check_deg1_generation(spec: &SemigroupSpec, k_max: u64) -> Result<GenerationReport, OracleError> {
    let s1: Vec<Vec<u64>> = spec.enumerate(1)?.into_iter().map(|w| w.values().to_vec()).collect();
    let mut sums: HashSet<Vec<u64>> = s1.iter().cloned().collect();
    for k in 2..=k_max {
        sums = sums
            .par_iter()
            .flat_map_iter(|a| s1.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<u64>>()))
            .collect();
        let members = spec.enumerate(k)?;
        if members.len() != sums.len() {
            let w = members
                .into_iter()
                .find(|w| !sums.contains(w.values()))
                .expect("sumset is contained in the semigroup");
            return Ok(GenerationReport {
                generated: false,
                witness: Some((k, w)),
            });
        }
    }
    Ok(GenerationReport {
        generated: true,
        witness: None,
    })
}

/// Connected components of a fiber, where two multisets are adjacent when
/// they share an element.
fn fiber_components(fiber: &[Vec<usize>]) -> usize {
    let mut parent: Vec<usize> = (0..fiber.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut first: HashMap<usize, usize> = HashMap::new();
    for (j, m) in fiber.iter().enumerate() {
        for &x in m {
            match first.get(&x) {
                Some(&i) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
                None => {
                    first.insert(x, j);
                }
            }
        }
    }
    (0..fiber.len()).filter(|&i| find(&mut parent, i) == i).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovReport {
    /// Largest degree with a minimal generator, 0 if there are no relations
    /// up to the degree bound.
    pub max_degree: usize,
    /// Number of minimal generators needed in each degree `2..=bound`.
    pub generators: Vec<(usize, usize)>,
    pub s1_size: usize,
}

pub const MARKOV_S1_CAP: usize = 60;

/// Minimal Markov generator counts per degree: a degree-`d` fiber with `c`
/// components under shared-element adjacency needs `c - 1` generators.
pub fn markov_degree_bound(spec: &SemigroupSpec, degree_bound: usize) -> Result<MarkovReport, OracleError> {
    markov_with_cap(spec, degree_bound, MARKOV_S1_CAP)
}

pub fn markov_with_cap(spec: &SemigroupSpec, degree_bound: usize, cap: usize) -> Result<MarkovReport, OracleError> {
    if degree_bound > 4 {
        return Err(OracleError::ResourceLimit(format!("degree bound {degree_bound} > 4")));
    }
    let s1 = spec.enumerate(1)?;
    if s1.len() > cap {
        return Err(OracleError::ResourceLimit(format!("|S[1]| = {} > {cap}", s1.len())));
    }
    let n = spec.edge_count();
    let mut generators = Vec::new();
    let mut max_degree = 0;
    for d in 2..=degree_bound {
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        let mut cur = Vec::new();
        fn go(n: usize, d: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == d {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                go(n, d, i, cur, out);
                cur.pop();
            }
        }
        go(s1.len(), d, 0, &mut cur, &mut tuples);
        let keyed: Vec<(Vec<u64>, Vec<usize>)> = tuples
            .into_par_iter()
            .map(|t| {
                let mut key = vec![0u64; n];
                for &i in &t {
                    for (k, v) in key.iter_mut().zip(s1[i].values()) {
                        *k += v;
                    }
                }
                (key, t)
            })
            .collect();
        let mut fibers: HashMap<Vec<u64>, Vec<Vec<usize>>> = HashMap::new();
        for (key, t) in keyed {
            fibers.entry(key).or_default().push(t);
        }
        let needed: usize = fibers
            .par_iter()
            .filter(|(_, f)| f.len() > 1)
            .map(|(_, f)| fiber_components(f) - 1)
            .sum();
        if needed > 0 {
            max_degree = d;
        }
        generators.push((d, needed));
    }
    Ok(MarkovReport {
        max_degree,
        generators,
        s1_size: s1.len(),
    })
}

/// Components of the fiber of `omega` under shared-factor adjacency, and
/// the number of factorizations.
pub fn fiber_report(spec: &SemigroupSpec, omega: &Weighting, limit: usize) -> Result<(usize, usize), OracleError> {
    let s1 = spec.enumerate_below(1, omega)?;
    let f = factor_search(&s1, omega, limit);
    if f.len() >= limit {
        return Err(OracleError::ResourceLimit(format!("more than {limit} factorizations")));
    }
    Ok((f.len(), fiber_components(&f)))
}

/// No leaf is lone.
pub fn is_good_tree(tree: &TrivalentTree) -> Result<bool, OracleError> {
    Ok(classify_leaves(tree)?.lone.is_empty())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorollaryCheck {
    pub generated: bool,
    pub predicted: bool,
    pub witness: Option<(u64, Weighting)>,
}

impl CorollaryCheck {
    pub fn agrees(&self) -> bool {
        self.generated == self.predicted
    }
}

/// Compares degree-one generation of `S^{2L}(1)` with the prediction
/// "good tree and `L > 1`".
pub fn check_corollary_good(tree: &TrivalentTree, level: u64, k_max: u64) -> Result<CorollaryCheck, OracleError> {
    let r = LeafWeights::uniform(tree, 1);
    let spec = SemigroupSpec::s(Arc::new(tree.clone()), r, Level::Finite(2 * level));
    let report = check_deg1_generation(&spec, k_max)?;
    Ok(CorollaryCheck {
        generated: report.generated,
        predicted: is_good_tree(tree)? && level > 1,
        witness: report.witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddLevelCheck {
    pub generated: bool,
    pub generation_witness: Option<(u64, Weighting)>,
    /// A member with a trinode restriction in the obstruction set, and the
    /// trinode.
    pub omega_witness: Option<(Weighting, usize)>,
}

impl OddLevelCheck {
    pub fn holds(&self) -> bool {
        self.generated == self.omega_witness.is_none()
    }
}

/// Degree-one generation up to `k_max` against the absence of members with
/// a trinode restriction in the obstruction set, for a clipped-tree spec of
/// odd level.
pub fn check_odd_level_theorem(spec: &SemigroupSpec, k_max: u64) -> Result<OddLevelCheck, OracleError> {
    if spec.variant() != Variant::U {
        return Err(SpecError::WrongVariant { expected: Variant::U }.into());
    }
    let level = spec
        .level()
        .finite()
        .ok_or(CubeError::EvenLevel(0))?;
    let report = check_deg1_generation(spec, k_max)?;
    let mut omega_witness = None;
    'outer: for k in 1..=k_max {
        for w in spec.enumerate(k)? {
            for t in 0..spec.system().trinodes().len() {
                if in_omega(spec.restrict(&w, t).values, k, level)? {
                    omega_witness = Some((w, t));
                    break 'outer;
                }
            }
        }
    }
    Ok(OddLevelCheck {
        generated: report.generated,
        generation_witness: report.witness,
        omega_witness,
    })
}

/// A degree-3 member with exactly two factorizations, related by the
/// degenerated Segre cubic at one trinode.
#[derive(Debug, Clone)]
pub struct SegreInstance {
    pub spec: SemigroupSpec,
    pub omega: Weighting,
    pub factorizations: [Vec<Weighting>; 2],
    /// Index of the trinode (in the clipped-tree spec) where the two
    /// factorizations differ.
    pub trinode: usize,
}

/// Smallest level admitting the family instance; keeps `|S[1]|` small.
pub const SEGRE_LEVEL: Level = Level::Finite(4);

/// Three branches off a center, each carrying a lone leaf and a cherry.
pub fn segre_family_tree() -> TrivalentTree {
    let mut edges: Vec<(String, String)> = Vec::new();
    for i in 1..=3 {
        let (b, p) = (format!("b{i}"), format!("p{i}"));
        edges.push(("c".into(), b.clone()));
        edges.push((b.clone(), format!("l{i}")));
        edges.push((b, p.clone()));
        edges.push((p.clone(), format!("x{i}")));
        edges.push((p, format!("y{i}")));
    }
    TrivalentTree::from_edges(&edges).expect("valid tree")
}

/// Trinode where the halved restrictions of the two factorizations differ
/// by a cube symmetry image of the Segre cubic, the restrictions agreeing
/// at every other trinode.
fn segre_site(half: &SemigroupSpec, a: &[Weighting], b: &[Weighting]) -> Option<usize> {
    let restr = |ws: &[Weighting], t: usize| {
        let mut v: Vec<Point> = ws.iter().map(|w| half.restrict(w, t).values.map(|x| x as i64)).collect();
        v.sort_unstable();
        v
    };
    let differ: Vec<usize> = (0..half.system().trinodes().len())
        .filter(|&t| restr(a, t) != restr(b, t))
        .collect();
    let &[t] = differ.as_slice() else {
        return None;
    };
    let (ra, rb) = (restr(a, t), restr(b, t));
    let base: Point = [0, 1, 2].map(|x| ra.iter().map(|p| p[x]).min().unwrap());
    let off = |v: &[Point]| -> Vec<Point> { v.iter().map(|p| [0, 1, 2].map(|x| p[x] - base[x])).collect() };
    let local = crate::relations::Binomial::new(off(&ra), off(&rb)).ok()?;
    let segre = segre_cubic().canonical();
    crate::cube::cube_symmetries()
        .iter()
        .any(|g| local.map(g).canonical() == segre)
        .then_some(t)
}

fn segre_check(spec: &SemigroupSpec, omega: &Weighting) -> Result<Option<SegreInstance>, OracleError> {
    let f = factorizations(spec, omega, 3)?;
    if f.len() != 2 {
        return Ok(None);
    }
    let half = spec.halved()?;
    let ha: Vec<Weighting> = f[0].iter().map(|w| spec.halve(w)).collect::<Result<_, _>>()?;
    let hb: Vec<Weighting> = f[1].iter().map(|w| spec.halve(w)).collect::<Result<_, _>>()?;
    Ok(segre_site(&half, &ha, &hb).map(|trinode| SegreInstance {
        spec: spec.clone(),
        omega: omega.clone(),
        factorizations: [f[0].clone(), f[1].clone()],
        trinode,
    }))
}

/// Searches for a Segre site with `r = 2`: first the three-branch family,
/// then every topology with at most `max_leaves` leaves, trying sums of
/// three degree-one members whose central restrictions form the Segre
/// cubic's right side.
pub fn find_segre_instance(max_leaves: usize) -> Result<SegreInstance, OracleError> {
    if max_leaves >= 9 {
        let tree = Arc::new(segre_family_tree());
        let spec = SemigroupSpec::s(tree.clone(), LeafWeights::uniform(&tree, 2), SEGRE_LEVEL);
        let values = tree
            .edges()
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (tree.label(u), tree.label(v));
                match (a.chars().next().unwrap(), b.chars().next().unwrap()) {
                    ('b', 'c') | ('c', 'b') => 4,
                    ('b', 'p') | ('p', 'b') => 10,
                    _ => 6,
                }
            })
            .collect();
        let omega = Weighting::new(values, 3);
        if spec.is_member(&omega) {
            if let Some(found) = segre_check(&spec, &omega)? {
                return Ok(found);
            }
        }
    }
    for n in 4..=max_leaves {
        for tree in crate::topology::trivalent_topologies(n) {
            let tree = Arc::new(tree);
            let spec = SemigroupSpec::s(tree.clone(), LeafWeights::uniform(&tree, 2), SEGRE_LEVEL);
            let half = spec.halved()?;
            let s1 = spec.enumerate(1)?;
            let hs: Vec<Weighting> = s1.iter().map(|w| spec.halve(w)).collect::<Result<_, _>>()?;
            let segre_rhs: Vec<Point> = segre_cubic().rhs().to_vec();
            for t in 0..half.system().trinodes().len() {
                let restr = |i: usize| half.restrict(&hs[i], t).values.map(|x| x as i64);
                for a in 0..s1.len() {
                    for b in a..s1.len() {
                        for c in b..s1.len() {
                            let mut pts = [restr(a), restr(b), restr(c)];
                            pts.sort_unstable();
                            let base: Point = [0, 1, 2].map(|x| pts.iter().map(|p| p[x]).min().unwrap());
                            let off: Vec<Point> = pts.iter().map(|p| [0, 1, 2].map(|x| p[x] - base[x])).collect();
                            if off != segre_rhs {
                                continue;
                            }
                            let omega = Weighting::sum(spec.edge_count(), [&s1[a], &s1[b], &s1[c]]);
                            if let Some(found) = segre_check(&spec, &omega)? {
                                return Ok(found);
                            }
                        }
                    }
                }
            }
        }
    }
    Err(OracleError::NotFound)
}

/// Merges the instance's weighting with another weighted tree along the
/// given edges and reports `(factorizations, fiber components)` of the
/// merged weighting.
pub fn merged_segre_fiber(
    instance: &SegreInstance,
    edge: usize,
    other: &WeightedTree,
    other_edge: usize,
) -> Result<(usize, usize), OracleError> {
    let tree = instance.spec.tree();
    let a = WeightedTree::new((**tree).clone(), instance.omega.values().to_vec(), instance.omega.degree());
    let m = merge(&a, edge, other, other_edge)?;
    let r = m
        .leaf_grades()
        .ok_or_else(|| OracleError::ResourceLimit("merged leaf values not divisible by degree".into()))?;
    let spec = SemigroupSpec::s(Arc::new(m.tree.clone()), r, Level::Infinite);
    let omega = Weighting::new(m.values.clone(), m.degree);
    fiber_report(&spec, &omega, 1000)
}

/// Left and right sides of a relation among degree-one members.
pub type Relation = (Vec<Weighting>, Vec<Weighting>);

/// A random degree-`k` relation: a random multiset of degree-one members
/// on the left, and a random factorization of its sum on the right,
/// preferring one that differs from the left side.
pub fn random_relation<R: rand::Rng>(
    spec: &SemigroupSpec,
    s1: &[Weighting],
    k: usize,
    rng: &mut R,
) -> Result<Option<Relation>, OracleError> {
    if s1.is_empty() || k == 0 {
        return Ok(None);
    }
    let mut lhs: Vec<Weighting> = (0..k).map(|_| s1[rng.gen_range(0..s1.len())].clone()).collect();
    lhs.sort();
    let omega = Weighting::sum(spec.edge_count(), &lhs);
    let mut all = factorizations(spec, &omega, 256)?;
    if all.len() > 1 {
        all.retain(|f| *f != lhs);
    }
    let rhs = all.swap_remove(rng.gen_range(0..all.len()));
    Ok(Some((lhs, rhs)))
}

/// Hilbert functions of several specs side by side.
pub fn hilbert_tables(specs: &[SemigroupSpec], k_max: u64) -> Result<Vec<HilbertTable>, OracleError> {
    specs.iter().map(|s| hilbert(s, k_max)).collect()
}

/// Counts of members by leaf-multigrade are fixed; this groups a degree's
/// members by the values on the given edges, for invariance checks.
pub fn multigrade_histogram(spec: &SemigroupSpec, k: u64, edges: &[usize]) -> Result<BTreeMap<Vec<u64>, usize>, OracleError> {
    let mut out = BTreeMap::new();
    for w in spec.enumerate(k)? {
        *out.entry(edges.iter().map(|&e| w.get(e)).collect()).or_insert(0) += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{caterpillar, snowflake, tripod};

    fn s_spec(tree: TrivalentTree, r: &[u64], level: Level) -> SemigroupSpec {
        let tree = Arc::new(tree);
        let r = LeafWeights::from_leaf_order(&tree, r);
        SemigroupSpec::s(tree, r, level)
    }

    #[test]
    fn tripod_enumeration() {
        let spec = s_spec(tripod(), &[1, 1, 2], Level::Infinite);
        assert_eq!(enumerate_degree(&spec, 1).unwrap(), vec![Weighting::new(vec![1, 1, 2], 1)]);
        let spec = s_spec(tripod(), &[1, 1, 3], Level::Infinite);
        assert!(enumerate_degree(&spec, 1).unwrap().is_empty());
    }

    #[test]
    fn caterpillar_hilbert() {
        let spec = s_spec(caterpillar(4), &[1, 1, 1, 1], Level::Infinite);
        assert_eq!(hilbert(&spec, 4).unwrap().counts, vec![1, 2, 3, 4, 5]);
        for k in 0..=4 {
            assert_eq!(enumerate_degree(&spec, k).unwrap().len() as u128, spec.count(k).unwrap());
        }
    }

    #[test]
    fn generation_examples() {
        let spec = s_spec(snowflake(), &[2; 6], Level::Finite(4));
        assert!(check_deg1_generation(&spec, 3).unwrap().generated);
        let zero = s_spec(caterpillar(5), &[0; 5], Level::Finite(4));
        assert!(check_deg1_generation(&zero, 3).unwrap().generated);
        let lone_odd = s_spec(caterpillar(6), &[1; 6], Level::Finite(4));
        let report = check_deg1_generation(&lone_odd, 3).unwrap();
        assert!(!report.generated);
        assert_eq!(report.witness.unwrap().0, 2);
    }

    #[test]
    fn markov_examples() {
        let spec = s_spec(caterpillar(4), &[2; 4], Level::Finite(4));
        assert!(markov_degree_bound(&spec, 4).unwrap().max_degree <= 2);
        let spec = s_spec(tripod(), &[2, 2, 2], Level::Finite(4));
        assert_eq!(markov_degree_bound(&spec, 4).unwrap().max_degree, 0);
    }

    #[test]
    fn good_tree_examples() {
        assert!(is_good_tree(&snowflake()).unwrap());
        assert!(!is_good_tree(&caterpillar(6)).unwrap());
        assert!(is_good_tree(&caterpillar(4)).unwrap());
        let c = check_corollary_good(&snowflake(), 2, 3).unwrap();
        assert!(c.generated && c.predicted);
        let c = check_corollary_good(&snowflake(), 1, 3).unwrap();
        assert!(!c.generated && !c.predicted);
        let c = check_corollary_good(&caterpillar(6), 2, 3).unwrap();
        assert!(!c.generated && !c.predicted);
    }

    #[test]
    fn odd_level_vacuous() {
        let t = Arc::new(caterpillar(5));
        let spec = SemigroupSpec::u(t.clone(), LeafWeights::uniform(&t, 0), Level::Finite(5)).unwrap();
        assert!(check_odd_level_theorem(&spec, 3).unwrap().holds());
    }

    #[test]
    fn odd_level_obstruction() {
        let t = Arc::new(crate::topology::trivalent_topologies(6).remove(0));
        let spec = SemigroupSpec::u(t.clone(), LeafWeights::uniform(&t, 2), Level::Finite(3)).unwrap();
        let c = check_odd_level_theorem(&spec, 3).unwrap();
        assert!(!c.generated && c.omega_witness.is_some() && c.holds());
        let (w, trinode) = c.omega_witness.unwrap();
        assert!(in_omega(spec.restrict(&w, trinode).values, w.degree(), 3).unwrap());
        assert!(in_omega([1, 1, 0], 2, 1).unwrap());
    }

    #[test]
    fn fiber_components_count() {
        assert_eq!(fiber_components(&[vec![0, 1], vec![2, 3]]), 2);
        assert_eq!(fiber_components(&[vec![0, 1], vec![1, 2], vec![3, 4]]), 2);
        assert_eq!(fiber_components(&[vec![0, 0, 1], vec![1, 2, 2], vec![3, 4, 5]]), 2);
    }
}
