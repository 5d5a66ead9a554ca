//! Weightings, semigroup membership, trinode restriction, and the halving
//! isomorphism between the full-tree and clipped-tree semigroups.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Add;
use std::sync::Arc;

use thiserror::Error;

use crate::system::{ConstraintSystem, EdgeRule, SysTrinode, SystemError, Violation};
use crate::tree::{self, Clipped, EdgeId, LeafWeights, Stalk, TrivalentTree, VertexId};
use crate::{Level, Variant};

/// Nonnegative edge values of a fixed degree, indexed by the edge order of
/// the `SemigroupSpec` they belong to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weighting {
    values: Vec<u64>,
    degree: u64,
}

impl Weighting {
    pub fn new(values: Vec<u64>, degree: u64) -> Self {
        Self { values, degree }
    }

    pub fn zero(edges: usize) -> Self {
        Self::new(vec![0; edges], 0)
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, e: usize) -> u64 {
        self.values[e]
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Weighting) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    /// `self - other`, if `other <= self` and the degrees allow it.
    pub fn checked_sub(&self, other: &Weighting) -> Option<Weighting> {
        if !other.le(self) || other.degree > self.degree {
            return None;
        }
        Some(Weighting::new(
            self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            self.degree - other.degree,
        ))
    }

    /// Sum of a nonempty or explicitly sized collection.
    pub fn sum<'a, I: IntoIterator<Item = &'a Weighting>>(edges: usize, items: I) -> Weighting {
        items.into_iter().fold(Weighting::zero(edges), |acc, w| &acc + w)
    }

    pub fn restrict(&self, t: &SysTrinode) -> TrinodeWeight {
        TrinodeWeight {
            values: t.edges.map(|e| self.values[e]),
            degree: self.degree,
        }
    }
}

impl Add for &Weighting {
    type Output = Weighting;

    fn add(self, rhs: &Weighting) -> Weighting {
        assert_eq!(self.values.len(), rhs.values.len());
        Weighting::new(
            self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect(),
            self.degree + rhs.degree,
        )
    }
}

/// The values a weighting puts on the three edges of a trinode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrinodeWeight {
    pub values: [u64; 3],
    pub degree: u64,
}

impl Add for TrinodeWeight {
    type Output = TrinodeWeight;

    fn add(self, rhs: TrinodeWeight) -> TrinodeWeight {
        TrinodeWeight {
            values: [0, 1, 2].map(|i| self.values[i] + rhs.values[i]),
            degree: self.degree + rhs.degree,
        }
    }
}

/// `|E - F| <= G <= E + F`.
pub fn check_triangle(t: [u64; 3]) -> bool {
    let [e, f, g] = t;
    e.abs_diff(f) <= g && g <= e + f
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("leaf weights violate the parity conditions needed for halving")]
    NotHalvable,
    #[error("weighting does not match the tree: {0}")]
    TreeMismatch(#[from] SystemError),
    #[error("operation needs a {expected} spec")]
    WrongVariant { expected: Variant },
    #[error("odd value on edge {0}; not an admissible member")]
    OddValue(String),
    #[error("not a member: {0}")]
    NotMember(Violation),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Member,
    NotMember(Violation),
}

impl Verdict {
    pub fn is_member(&self) -> bool {
        matches!(self, Verdict::Member)
    }
}

/// Which full-tree edges survive halving and which are forced by leaf
/// grades.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Halving {
    kept_edges: Vec<EdgeId>,
    paired_leaf_edges: Vec<(EdgeId, VertexId)>,
}

/// A graded semigroup `S^L(r)` on a tree, or `U^L(r)` on its clipped tree.
#[derive(Debug, Clone)]
pub struct SemigroupSpec {
    tree: Arc<TrivalentTree>,
    r: LeafWeights,
    level: Level,
    variant: Variant,
    system: ConstraintSystem,
    /// Original edge of each system edge.
    edge_map: Vec<EdgeId>,
    /// Original vertex at the center of each system trinode.
    centers: Vec<VertexId>,
    halving: Option<Halving>,
}

impl SemigroupSpec {
    pub fn new(tree: Arc<TrivalentTree>, r: LeafWeights, level: Level, variant: Variant) -> Result<Self, SpecError> {
        let halvable = tree::leaf_parity_ok(&tree, &r);
        let halving = halvable.then(|| {
            let clipped = tree::clip_for_halving(&tree);
            let kept: std::collections::BTreeSet<_> = clipped.kept_edges.iter().copied().collect();
            let paired_leaf_edges = tree
                .leaves()
                .iter()
                .map(|&l| (tree.leaf_edge(l), l))
                .filter(|(e, _)| !kept.contains(e))
                .collect();
            Halving {
                kept_edges: clipped.kept_edges,
                paired_leaf_edges,
            }
        });
        match variant {
            Variant::S => Ok(Self::build_s(tree, r, level, halving)),
            Variant::U if halvable => Ok(Self::build_u(tree, r, level, halving)),
            Variant::U => Err(SpecError::NotHalvable),
        }
    }

    pub fn s(tree: Arc<TrivalentTree>, r: LeafWeights, level: Level) -> Self {
        Self::new(tree, r, level, Variant::S).expect("S specs always build")
    }

    pub fn u(tree: Arc<TrivalentTree>, r: LeafWeights, level: Level) -> Result<Self, SpecError> {
        Self::new(tree, r, level, Variant::U)
    }

    fn build_s(tree: Arc<TrivalentTree>, r: LeafWeights, level: Level, halving: Option<Halving>) -> Self {
        let names = (0..tree.edge_count()).map(|e| tree.edge_name(e)).collect();
        let trinodes = tree
            .trinodes()
            .iter()
            .map(|t| SysTrinode {
                name: tree.label(t.center).to_string(),
                edges: t.edges,
            })
            .collect();
        let mut rules = vec![EdgeRule::Free; tree.edge_count()];
        for &leaf in tree.leaves() {
            rules[tree.leaf_edge(leaf)] = EdgeRule::Fixed(r.get(leaf));
        }
        let system = ConstraintSystem::new(names, trinodes, true, level.scaled(2), rules);
        Self {
            centers: tree.internal().to_vec(),
            edge_map: (0..tree.edge_count()).collect(),
            tree,
            r,
            level,
            variant: Variant::S,
            system,
            halving,
        }
    }

    fn build_u(tree: Arc<TrivalentTree>, r: LeafWeights, level: Level, halving: Option<Halving>) -> Self {
        let clipped: Clipped = tree::clip_for_halving(&tree);
        let index: BTreeMap<EdgeId, usize> = clipped
            .kept_edges
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
        let names = clipped.kept_edges.iter().map(|&e| tree.edge_name(e)).collect();
        let centers = clipped.trinode_centers(&tree);
        let trinodes = centers
            .iter()
            .map(|&v| {
                let t = tree.trinode(v);
                SysTrinode {
                    name: tree.label(v).to_string(),
                    edges: t.edges.map(|e| index[&e]),
                }
            })
            .collect();
        let mut rules = vec![EdgeRule::Free; clipped.kept_edges.len()];
        for stalk in &clipped.stalks {
            let rule = match stalk.stalk {
                Stalk::Lone { leaf } => EdgeRule::Fixed(r.get(leaf) / 2),
                Stalk::Pair { leaves: (a, b), .. } => {
                    let (ra, rb) = (r.get(a), r.get(b));
                    let half_sum = (ra + rb) / 2;
                    let lo = ra.abs_diff(rb) / 2;
                    // the pairing vertex still carries the level condition
                    let hi = match level {
                        Level::Finite(l) if l < half_sum => None,
                        Level::Finite(l) => Some(half_sum.min(l - half_sum)),
                        Level::Infinite => Some(half_sum),
                    };
                    match hi {
                        Some(hi) if lo <= hi => EdgeRule::Range { lo, hi },
                        _ => EdgeRule::Empty,
                    }
                }
            };
            let e = stalk.clipped_edge;
            rules[e] = rules[e].intersect(rule);
        }
        let system = ConstraintSystem::new(names, trinodes, false, level.finite(), rules);
        Self {
            tree,
            r,
            level,
            variant: Variant::U,
            system,
            edge_map: clipped.kept_edges,
            centers,
            halving,
        }
    }

    pub fn tree(&self) -> &Arc<TrivalentTree> {
        &self.tree
    }

    pub fn r(&self) -> &LeafWeights {
        &self.r
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn system(&self) -> &ConstraintSystem {
        &self.system
    }

    pub fn edge_count(&self) -> usize {
        self.system.edge_count()
    }

    /// The original tree edge behind system edge `i`.
    pub fn original_edge(&self, i: usize) -> EdgeId {
        self.edge_map[i]
    }

    /// The original vertex at the center of system trinode `t`.
    pub fn center(&self, t: usize) -> VertexId {
        self.centers[t]
    }

    pub fn is_halvable(&self) -> bool {
        self.halving.is_some()
    }

    /// Whether `(tree, r, L)` is admissible.
    pub fn is_admissible(&self) -> bool {
        tree::is_admissible(&self.tree, &self.r, self.level)
    }

    /// The clipped-tree spec with the same tree, weights and level.
    pub fn halved(&self) -> Result<SemigroupSpec, SpecError> {
        Self::u(self.tree.clone(), self.r.clone(), self.level)
    }

    /// The full-tree spec with the same data.
    pub fn unhalved(&self) -> SemigroupSpec {
        Self::s(self.tree.clone(), self.r.clone(), self.level)
    }

    pub fn member(&self, w: &Weighting) -> Result<Verdict, SpecError> {
        Ok(match self.system.check(&w.values, w.degree)? {
            Ok(()) => Verdict::Member,
            Err(v) => Verdict::NotMember(v),
        })
    }

    pub fn is_member(&self, w: &Weighting) -> bool {
        matches!(self.member(w), Ok(Verdict::Member))
    }

    pub fn restrict(&self, w: &Weighting, t: usize) -> TrinodeWeight {
        w.restrict(&self.system.trinodes()[t])
    }

    /// Members of degree `k`, sorted.
    pub fn enumerate(&self, k: u64) -> Result<Vec<Weighting>, SpecError> {
        Ok(self
            .system
            .enumerate(k, None)?
            .into_iter()
            .map(|v| Weighting::new(v, k))
            .collect())
    }

    /// Degree-`k` members bounded above by `cap` edgewise.
    pub fn enumerate_below(&self, k: u64, cap: &Weighting) -> Result<Vec<Weighting>, SpecError> {
        let window: Vec<(u64, u64)> = cap.values.iter().map(|&c| (0, c)).collect();
        Ok(self
            .system
            .enumerate(k, Some(&window))?
            .into_iter()
            .map(|v| Weighting::new(v, k))
            .collect())
    }

    pub fn count(&self, k: u64) -> Result<u128, SpecError> {
        Ok(self.system.count(k)?)
    }

    /// Full-tree member to clipped-tree member: drop paired leaf edges and
    /// halve the rest.
    pub fn halve(&self, w: &Weighting) -> Result<Weighting, SpecError> {
        self.expect_variant(Variant::S)?;
        let h = self.halving.as_ref().ok_or(SpecError::NotHalvable)?;
        if let Err(v) = self.system.check(&w.values, w.degree)? {
            return Err(SpecError::NotMember(v));
        }
        let mut values = Vec::with_capacity(h.kept_edges.len());
        for &e in &h.kept_edges {
            let v = w.values[e];
            if v % 2 == 1 {
                return Err(SpecError::OddValue(self.tree.edge_name(e)));
            }
            values.push(v / 2);
        }
        Ok(Weighting::new(values, w.degree))
    }

    /// Inverse of `halve`: doubles clipped values and restores paired leaf
    /// edges from the grades.
    pub fn unhalve(&self, w: &Weighting) -> Result<Weighting, SpecError> {
        self.expect_variant(Variant::S)?;
        let h = self.halving.as_ref().ok_or(SpecError::NotHalvable)?;
        if w.values.len() != h.kept_edges.len() {
            return Err(SystemError::Length {
                expected: h.kept_edges.len(),
                got: w.values.len(),
            }
            .into());
        }
        let mut values = vec![0; self.tree.edge_count()];
        for (i, &e) in h.kept_edges.iter().enumerate() {
            values[e] = 2 * w.values[i];
        }
        for &(e, leaf) in &h.paired_leaf_edges {
            values[e] = w.degree * self.r.get(leaf);
        }
        Ok(Weighting::new(values, w.degree))
    }

    fn expect_variant(&self, expected: Variant) -> Result<(), SpecError> {
        if self.variant == expected {
            Ok(())
        } else {
            Err(SpecError::WrongVariant { expected })
        }
    }

    /// Text form: `w <u> <v> <value>` per edge in order, then `degree <k>`.
    pub fn format_weighting(&self, w: &Weighting) -> String {
        let mut out = String::new();
        for (i, &v) in w.values.iter().enumerate() {
            let (a, b) = self.tree.edge(self.edge_map[i]);
            writeln!(out, "w {} {} {}", self.tree.label(a), self.tree.label(b), v).unwrap();
        }
        writeln!(out, "degree {}", w.degree).unwrap();
        out
    }

    pub fn parse_weighting(&self, text: &str) -> Result<Weighting, SpecError> {
        let blocks = self.parse_weighting_blocks(text)?;
        match blocks.as_slice() {
            [(None, w)] => Ok(w.clone()),
            _ => Err(SpecError::Syntax {
                line: 0,
                message: "expected a single weighting".into(),
            }),
        }
    }

    /// Several weightings, each optionally introduced by `factor <tag>`.
    pub fn parse_weighting_blocks(&self, text: &str) -> Result<Vec<(Option<String>, Weighting)>, SpecError> {
        struct Block {
            tag: Option<String>,
            values: Vec<Option<u64>>,
            degree: Option<u64>,
            line: usize,
        }
        let index: BTreeMap<EdgeId, usize> = self.edge_map.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut blocks: Vec<Block> = Vec::new();
        let fresh = |tag, line| Block {
            tag,
            values: vec![None; self.edge_count()],
            degree: None,
            line,
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |message: String| SpecError::Syntax { line, message };
            let fields: Vec<&str> = content.split_whitespace().collect();
            match fields.as_slice() {
                ["factor", tag] => blocks.push(fresh(Some(tag.to_string()), line)),
                ["w", u, v, value] => {
                    if blocks.is_empty() {
                        blocks.push(fresh(None, line));
                    }
                    let block = blocks.last_mut().unwrap();
                    let find = |s: &str| self.tree.vertex(s).ok_or_else(|| syntax(format!("unknown vertex {s}")));
                    let e = self
                        .tree
                        .find_edge(find(u)?, find(v)?)
                        .ok_or_else(|| syntax(format!("no edge {u} {v}")))?;
                    let &slot = index
                        .get(&e)
                        .ok_or_else(|| syntax(format!("edge {u} {v} is clipped away")))?;
                    let value = value.parse().map_err(|_| syntax(format!("bad value {value}")))?;
                    if block.values[slot].replace(value).is_some() {
                        return Err(syntax(format!("edge {u} {v} given twice")));
                    }
                }
                ["degree", k] => {
                    if blocks.is_empty() {
                        blocks.push(fresh(None, line));
                    }
                    let k = k.parse().map_err(|_| syntax(format!("bad degree {k}")))?;
                    if blocks.last_mut().unwrap().degree.replace(k).is_some() {
                        return Err(syntax("degree given twice".into()));
                    }
                }
                _ => return Err(syntax(format!("unrecognized line `{content}`"))),
            }
        }
        blocks
            .into_iter()
            .map(|b| {
                let missing = |message: String| SpecError::Syntax { line: b.line, message };
                let degree = b.degree.ok_or_else(|| missing("missing degree".into()))?;
                let values = b
                    .values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v.ok_or_else(|| missing(format!("missing value for {}", self.system.edge_name(i)))))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((b.tag, Weighting::new(values, degree)))
            })
            .collect()
    }
}

/// A level `N` past which the level condition is vacuous: every triangle
/// weighting with leaf values `r` has all edge values at most `N = sum r`,
/// so trinode sums stay below `2N` and `S^N(r) = S(r)` degree by degree.
pub fn stable_level(_tree: &TrivalentTree, r: &LeafWeights) -> u64 {
    r.total()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::ViolationKind;
    use crate::topology::{caterpillar, snowflake, tripod, trivalent_topologies};
    use proptest::prelude::*;

    fn arc(t: TrivalentTree) -> Arc<TrivalentTree> {
        Arc::new(t)
    }

    #[test]
    fn triangle_examples() {
        assert!(check_triangle([1, 1, 2]));
        assert!(!check_triangle([1, 1, 3]));
        assert!(check_triangle([0, 0, 0]));
    }

    #[test]
    fn membership_examples() {
        let t = arc(tripod());
        let spec = SemigroupSpec::s(t.clone(), LeafWeights::uniform(&t, 2), Level::Finite(4));
        assert!(spec.is_member(&Weighting::new(vec![2, 2, 2], 1)));
        // (2,2,4) is a degenerate triangle; what fails is the leaf grade
        match spec.member(&Weighting::new(vec![2, 2, 4], 1)).unwrap() {
            Verdict::NotMember(v) => assert_eq!(v.kind, ViolationKind::Grade),
            Verdict::Member => panic!(),
        }
        match spec.member(&Weighting::new(vec![2, 2, 6], 1)).unwrap() {
            Verdict::NotMember(v) => assert_eq!(v.kind, ViolationKind::Triangle),
            Verdict::Member => panic!(),
        }
        let t = arc(caterpillar(4));
        let spec = SemigroupSpec::s(t.clone(), LeafWeights::uniform(&t, 1), Level::Infinite);
        let inner = t.find_edge(t.vertex("u1").unwrap(), t.vertex("u2").unwrap()).unwrap();
        let mut values = vec![1; 5];
        values[inner] = 1;
        match spec.member(&Weighting::new(values, 1)).unwrap() {
            Verdict::NotMember(v) => assert_eq!(v.kind, ViolationKind::Parity),
            Verdict::Member => panic!(),
        }
        assert!(spec.member(&Weighting::new(vec![1; 3], 1)).is_err());
    }

    #[test]
    fn restriction_examples() {
        let t = arc(snowflake());
        let spec = SemigroupSpec::s(t.clone(), LeafWeights::uniform(&t, 2), Level::Infinite);
        let w = Weighting::new(vec![2; 9], 1);
        assert!(spec.is_member(&w));
        let c = t.internal().iter().position(|&v| t.label(v) == "c").unwrap();
        assert_eq!(spec.restrict(&w, c).values, [2, 2, 2]);
        let sum = &w + &w;
        assert_eq!(spec.restrict(&sum, c), spec.restrict(&w, c) + spec.restrict(&w, c));
    }

    #[test]
    fn halving_examples() {
        let t = arc(snowflake());
        let s = SemigroupSpec::s(t.clone(), LeafWeights::uniform(&t, 1), Level::Finite(4));
        let u = s.halved().unwrap();
        assert_eq!(u.edge_count(), 3);
        // every edge 1 on the snowflake with cherry weights (1, 1): stalks
        // carry 2 in S
        let mut values = vec![1; 9];
        for e in 0..9 {
            if !t.is_leaf_edge(e) {
                values[e] = 2;
            }
        }
        let w = Weighting::new(values, 1);
        assert!(s.is_member(&w));
        let h = s.halve(&w).unwrap();
        assert_eq!(h.values(), [1, 1, 1]);
        assert!(u.is_member(&h));
        assert_eq!(s.unhalve(&h).unwrap(), w);
        let zero = Weighting::zero(9);
        assert_eq!(s.halve(&zero).unwrap(), Weighting::zero(3));
    }

    #[test]
    fn u_rules_on_four_leaves() {
        let t = arc(caterpillar(4));
        let u = SemigroupSpec::u(t.clone(), LeafWeights::from_leaf_order(&t, &[1, 3, 2, 2]), Level::Finite(4)).unwrap();
        assert_eq!(u.edge_count(), 1);
        // pair (1,3) allows 1..=min(2, 4-2); pair (2,2) allows 0..=min(2, 2)
        assert_eq!(u.system().rule(0), EdgeRule::Range { lo: 1, hi: 2 });
        assert_eq!(u.count(1).unwrap(), 2);
        assert!(SemigroupSpec::u(t.clone(), LeafWeights::from_leaf_order(&t, &[1, 2, 2, 2]), Level::Finite(4)).is_err());
    }

    #[test]
    fn parse_and_format() {
        let t = arc(caterpillar(4));
        let spec = SemigroupSpec::s(t.clone(), LeafWeights::uniform(&t, 1), Level::Infinite);
        let w = Weighting::new(vec![1, 1, 1, 1, 2], 1);
        let text = spec.format_weighting(&w);
        assert_eq!(text, "w a u1 1\nw b u1 1\nw c u2 1\nw d u2 1\nw u1 u2 2\ndegree 1\n");
        assert_eq!(spec.parse_weighting(&text).unwrap(), w);
        let two = format!("factor lhs\n{text}factor rhs\n{text}");
        let blocks = spec.parse_weighting_blocks(&two).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[1].0.as_deref(), Some("rhs"));
        assert!(spec.parse_weighting("w a u1 1\ndegree 1\n").is_err());
        assert!(spec.parse_weighting("w a b 1\n").is_err());
    }

    #[test]
    fn stable_level_examples() {
        let t = caterpillar(4);
        assert_eq!(stable_level(&t, &LeafWeights::uniform(&t, 1)), 4);
        assert_eq!(stable_level(&t, &LeafWeights::uniform(&t, 0)), 0);
        for t in trivalent_topologies(6) {
            let t = arc(t);
            for w in [[1, 1, 2, 0, 2, 2], [2, 2, 2, 2, 2, 2], [0, 1, 1, 2, 1, 1]] {
                let r = LeafWeights::from_leaf_order(&t, &w);
                let n = stable_level(&t, &r);
                let bounded = SemigroupSpec::s(t.clone(), r.clone(), Level::Finite(n.max(1)));
                let free = SemigroupSpec::s(t.clone(), r, Level::Infinite);
                for k in 0..=3 {
                    assert_eq!(bounded.enumerate(k).unwrap(), free.enumerate(k).unwrap());
                }
            }
        }
    }

    fn admissible_cases() -> impl Strategy<Value = (Arc<TrivalentTree>, LeafWeights, Level)> {
        (4usize..=7, any::<u64>(), prop::sample::select(vec![4u64, 6, 8])).prop_map(|(n, seed, l)| {
            let trees = trivalent_topologies(n);
            let t = arc(trees[(seed as usize) % trees.len()].clone());
            let p = tree::classify_leaves(&t).unwrap();
            let mut w = vec![0u64; t.vertex_count()];
            let mut s = seed;
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                s >> 33
            };
            for &l in &p.lone {
                w[l] = 2 * (next() % 3);
            }
            for &(a, b) in &p.pairs {
                let parity = next() % 2;
                w[a] = parity + 2 * (next() % 2);
                w[b] = parity + 2 * (next() % 2);
            }
            let r = LeafWeights::from_leaf_order(&t, &t.leaves().iter().map(|&l| w[l]).collect::<Vec<_>>());
            (t, r, Level::Finite(l))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn halving_is_a_graded_isomorphism((t, r, level) in admissible_cases(), k in 0u64..3) {
            let s = SemigroupSpec::s(t, r, level);
            let u = s.halved().unwrap();
            let full = s.enumerate(k).unwrap();
            let mut halves = Vec::new();
            for w in &full {
                // members have even values away from paired leaves
                let h = s.halve(w).unwrap();
                prop_assert!(u.is_member(&h));
                prop_assert_eq!(&s.unhalve(&h).unwrap(), w);
                halves.push(h);
            }
            halves.sort();
            prop_assert_eq!(halves, u.enumerate(k).unwrap());
        }

        #[test]
        fn members_are_closed_under_addition((t, r, level) in admissible_cases(), i in any::<usize>(), j in any::<usize>()) {
            let s = SemigroupSpec::s(t, r, level);
            let one = s.enumerate(1).unwrap();
            let two = s.enumerate(2).unwrap();
            if !one.is_empty() && !two.is_empty() {
                let (a, b) = (&one[i % one.len()], &two[j % two.len()]);
                let sum = a + b;
                prop_assert!(s.is_member(&sum));
                let u = s.halved().unwrap();
                prop_assert_eq!(u.is_member(&(&s.halve(a).unwrap() + &s.halve(b).unwrap())), true);
                prop_assert_eq!(s.halve(&sum).unwrap(), &s.halve(a).unwrap() + &s.halve(b).unwrap());
            }
        }
    }
}
