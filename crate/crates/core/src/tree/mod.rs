//! Labeled trivalent trees and their leaf combinatorics.
//!
//! Vertices are identified by dense ids that follow the lexicographic order
//! of their labels, so the canonical edge order (lexicographic on sorted
//! endpoint labels) is simply the order of `(min id, max id)` pairs.

mod clip;
mod merge;
mod parity;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use clip::{clip, Clipped, ClippedShape, Stalk, StalkEdge};
pub(crate) use clip::clip_for_halving;
pub use merge::{merge, MergeError, WeightedTree};
pub use parity::{forced_edge_parities, odd_path_system, OddPath};
pub use parse::{parse_tree, parse_tree_input, write_tree_input, TreeInput};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(String),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(String, String),
    #[error("edge {0} {1} closes a cycle")]
    Cycle(String, String),
    #[error("disconnected: vertex {0} is not reachable from {1}")]
    Disconnected(String, String),
    #[error("non-trivalent vertex {vertex} with valence {valence}")]
    NonTrivalent { vertex: String, valence: usize },
    #[error("single-edge tree rejected")]
    SingleEdge,
    #[error("empty tree")]
    Empty,
    #[error("pairing undefined for Y")]
    PairingUndefinedForTripod,
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("vertex {0} is not a leaf")]
    NotALeaf(String),
    #[error("missing leaf weight for {0}")]
    MissingLeafWeight(String),
    #[error("leaf weights have odd total {0}")]
    OddTotal(u64),
}

/// A validated trivalent tree with canonical vertex and edge order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrivalentTree {
    labels: Vec<String>,
    edges: Vec<(VertexId, VertexId)>,
    incident: Vec<Vec<EdgeId>>,
    leaves: Vec<VertexId>,
    internal: Vec<VertexId>,
}

/// An internal vertex together with its three incident edges in canonical
/// edge order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Trinode {
    pub center: VertexId,
    pub edges: [EdgeId; 3],
}

impl TrivalentTree {
    /// Builds a tree from labeled edges, validating shape.
    pub fn from_edges<S: AsRef<str>>(edges: &[(S, S)]) -> Result<Self, TreeError> {
        if edges.is_empty() {
            return Err(TreeError::Empty);
        }
        let mut labels: Vec<String> = edges
            .iter()
            .flat_map(|(u, v)| [u.as_ref().to_string(), v.as_ref().to_string()])
            .collect();
        labels.sort();
        labels.dedup();
        let id = |s: &str| labels.binary_search_by(|l| l.as_str().cmp(s)).unwrap();

        let mut dsu = Dsu::new(labels.len());
        let mut seen = std::collections::BTreeSet::new();
        let mut pairs = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            if u == v {
                return Err(TreeError::SelfLoop(u.to_string()));
            }
            let (a, b) = (id(u).min(id(v)), id(u).max(id(v)));
            if !seen.insert((a, b)) {
                return Err(TreeError::DuplicateEdge(labels[a].clone(), labels[b].clone()));
            }
            if !dsu.union(a, b) {
                return Err(TreeError::Cycle(labels[a].clone(), labels[b].clone()));
            }
            pairs.push((a, b));
        }
        let root = dsu.find(0);
        if let Some(v) = (0..labels.len()).find(|&v| dsu.find(v) != root) {
            return Err(TreeError::Disconnected(labels[v].clone(), labels[0].clone()));
        }
        pairs.sort_unstable();

        let mut incident = vec![Vec::new(); labels.len()];
        for (e, &(a, b)) in pairs.iter().enumerate() {
            incident[a].push(e);
            incident[b].push(e);
        }
        if pairs.len() == 1 {
            return Err(TreeError::SingleEdge);
        }
        let mut leaves = Vec::new();
        let mut internal = Vec::new();
        for (v, inc) in incident.iter().enumerate() {
            match inc.len() {
                1 => leaves.push(v),
                3 => internal.push(v),
                valence => {
                    return Err(TreeError::NonTrivalent {
                        vertex: labels[v].clone(),
                        valence,
                    })
                }
            }
        }
        Ok(Self {
            labels,
            edges: pairs,
            incident,
            leaves,
            internal,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    /// `u-v` using labels.
    pub fn edge_name(&self, e: EdgeId) -> String {
        let (a, b) = self.edges[e];
        format!("{}-{}", self.labels[a], self.labels[b])
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v]
    }

    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            debug_assert_eq!(b, v);
            a
        }
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.incident[v].iter().map(move |&e| self.other_end(e, v))
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.incident[v].len() == 1
    }

    /// Leaves in label order.
    pub fn leaves(&self) -> &[VertexId] {
        &self.leaves
    }

    pub fn internal(&self) -> &[VertexId] {
        &self.internal
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_tripod(&self) -> bool {
        self.internal.len() == 1
    }

    /// The unique edge at a leaf.
    pub fn leaf_edge(&self, leaf: VertexId) -> EdgeId {
        debug_assert!(self.is_leaf(leaf));
        self.incident[leaf][0]
    }

    pub fn is_leaf_edge(&self, e: EdgeId) -> bool {
        let (a, b) = self.edges[e];
        self.is_leaf(a) || self.is_leaf(b)
    }

    pub fn trinode(&self, v: VertexId) -> Trinode {
        let inc = &self.incident[v];
        assert_eq!(inc.len(), 3, "{} is not internal", self.labels[v]);
        Trinode {
            center: v,
            edges: [inc[0], inc[1], inc[2]],
        }
    }

    /// Trinodes in internal-vertex label order.
    pub fn trinodes(&self) -> Vec<Trinode> {
        self.internal.iter().map(|&v| self.trinode(v)).collect()
    }

    pub(crate) fn labels(&self) -> &[String] {
        &self.labels
    }
}

impl fmt::Display for TrivalentTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(a, b) in &self.edges {
            writeln!(f, "edge {} {}", self.labels[a], self.labels[b])?;
        }
        Ok(())
    }
}

/// Nonnegative integer weights on the leaves of a tree, indexed by vertex id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LeafWeights {
    values: Vec<u64>,
}

impl LeafWeights {
    pub fn from_map(tree: &TrivalentTree, map: &BTreeMap<String, u64>) -> Result<Self, TreeError> {
        let mut values = vec![0; tree.vertex_count()];
        for (label, &w) in map {
            let v = tree
                .vertex(label)
                .ok_or_else(|| TreeError::UnknownVertex(label.clone()))?;
            if !tree.is_leaf(v) {
                return Err(TreeError::NotALeaf(label.clone()));
            }
            values[v] = w;
        }
        if let Some(&leaf) = tree.leaves().iter().find(|l| !map.contains_key(tree.label(**l))) {
            return Err(TreeError::MissingLeafWeight(tree.label(leaf).to_string()));
        }
        Ok(Self { values })
    }

    pub fn from_pairs(tree: &TrivalentTree, pairs: &[(&str, u64)]) -> Result<Self, TreeError> {
        let map = pairs.iter().map(|&(l, w)| (l.to_string(), w)).collect();
        Self::from_map(tree, &map)
    }

    /// Weights given in leaf label order.
    pub fn from_leaf_order(tree: &TrivalentTree, weights: &[u64]) -> Self {
        assert_eq!(weights.len(), tree.leaf_count());
        let mut values = vec![0; tree.vertex_count()];
        for (&leaf, &w) in tree.leaves().iter().zip(weights) {
            values[leaf] = w;
        }
        Self { values }
    }

    pub fn uniform(tree: &TrivalentTree, w: u64) -> Self {
        Self::from_leaf_order(tree, &vec![w; tree.leaf_count()])
    }

    pub fn get(&self, leaf: VertexId) -> u64 {
        self.values[leaf]
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    /// Weights in leaf label order.
    pub fn in_leaf_order(&self, tree: &TrivalentTree) -> Vec<u64> {
        tree.leaves().iter().map(|&l| self.values[l]).collect()
    }
}

/// Leaves sharing an internal neighbor are paired; the rest are lone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafPairing {
    pub pairs: Vec<(VertexId, VertexId)>,
    pub lone: Vec<VertexId>,
}

pub fn classify_leaves(tree: &TrivalentTree) -> Result<LeafPairing, TreeError> {
    if tree.is_tripod() {
        return Err(TreeError::PairingUndefinedForTripod);
    }
    let mut pairs = Vec::new();
    let mut lone = Vec::new();
    for &leaf in tree.leaves() {
        let hub = tree.neighbors(leaf).next().unwrap();
        let mates: Vec<_> = tree
            .neighbors(hub)
            .filter(|&w| w != leaf && tree.is_leaf(w))
            .collect();
        match mates.as_slice() {
            [] => lone.push(leaf),
            [mate] => {
                if leaf < *mate {
                    pairs.push((leaf, *mate));
                }
            }
            _ => unreachable!("a hub with three leaves is the tripod"),
        }
    }
    Ok(LeafPairing { pairs, lone })
}

/// Whether `r` meets the parity part of admissibility: even weight on every
/// lone leaf and even sum on every pair. The tripod's leaves count as lone.
pub fn leaf_parity_ok(tree: &TrivalentTree, r: &LeafWeights) -> bool {
    match classify_leaves(tree) {
        Ok(p) => {
            p.lone.iter().all(|&l| r.get(l).is_multiple_of(2))
                && p.pairs.iter().all(|&(a, b)| (r.get(a) + r.get(b)).is_multiple_of(2))
        }
        Err(_) => tree.leaves().iter().all(|&l| r.get(l).is_multiple_of(2)),
    }
}

/// Admissibility of `(tree, r, level)`: even level plus the leaf parity
/// conditions. An infinite level imposes nothing.
pub fn is_admissible(tree: &TrivalentTree, r: &LeafWeights, level: crate::Level) -> bool {
    let level_even = match level {
        crate::Level::Finite(l) => l % 2 == 0,
        crate::Level::Infinite => true,
    };
    level_even && leaf_parity_ok(tree, r)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{caterpillar, snowflake, tripod};

    #[test]
    fn tripod_shape() {
        let t = parse_tree("edge a x\nedge b x\nedge c x\n").unwrap();
        assert_eq!(t.internal().len(), 1);
        assert_eq!(t.label(t.internal()[0]), "x");
        assert_eq!(t.leaf_count(), 3);
        assert!(t.is_tripod());
    }

    #[test]
    fn four_leaf_caterpillar_shape() {
        let t = parse_tree("edge a u\nedge b u\nedge c v\nedge d v\nedge u v\n").unwrap();
        let internal: Vec<_> = t.internal().iter().map(|&v| t.label(v)).collect();
        assert_eq!(internal, ["u", "v"]);
        assert_eq!(t.edge_count(), 5);
    }

    #[test]
    fn rejects_valence_four() {
        let err = parse_tree("edge a x\nedge b x\nedge c x\nedge d x\n").unwrap_err();
        assert!(matches!(err, TreeError::NonTrivalent { ref vertex, valence: 4 } if vertex == "x"));
        assert!(err.to_string().contains("non-trivalent"));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            parse_tree("edge a b\nedge b c\nedge c a\n"),
            Err(TreeError::Cycle(..))
        ));
        assert!(matches!(
            parse_tree("edge a x\nedge b x\nedge c x\nedge x a\n"),
            Err(TreeError::DuplicateEdge(..))
        ));
        assert!(matches!(
            parse_tree("edge a x\nedge b x\nedge c x\nedge d y\nedge e y\nedge f y\n"),
            Err(TreeError::Disconnected(..))
        ));
        assert!(matches!(parse_tree("edge a b\n"), Err(TreeError::SingleEdge)));
        assert!(matches!(parse_tree("edge a a\n"), Err(TreeError::SelfLoop(_))));
    }

    #[test]
    fn canonical_edge_order_is_lexicographic() {
        let t = parse_tree("edge x c\nedge b x\nedge x a\n").unwrap();
        let names: Vec<_> = (0..3).map(|e| t.edge_name(e)).collect();
        assert_eq!(names, ["a-x", "b-x", "c-x"]);
    }

    #[test]
    fn pairing_examples() {
        let t = caterpillar(4);
        let p = classify_leaves(&t).unwrap();
        assert_eq!(p.pairs.len(), 2);
        assert!(p.lone.is_empty());

        let t = caterpillar(6);
        let p = classify_leaves(&t).unwrap();
        assert_eq!(p.pairs.len(), 2);
        assert_eq!(p.lone.len(), 2);

        let t = snowflake();
        let p = classify_leaves(&t).unwrap();
        assert_eq!(p.pairs.len(), 3);
        assert!(p.lone.is_empty());

        assert_eq!(
            classify_leaves(&tripod()).unwrap_err().to_string(),
            "pairing undefined for Y"
        );
    }

    #[test]
    fn admissibility_examples() {
        let t = caterpillar(6);
        let p = classify_leaves(&t).unwrap();
        let r = LeafWeights::uniform(&t, 2);
        assert!(is_admissible(&t, &r, crate::Level::Finite(4)));
        assert!(!is_admissible(&t, &r, crate::Level::Finite(3)));

        let mut w = r.in_leaf_order(&t);
        let lone_pos = t.leaves().iter().position(|&l| l == p.lone[0]).unwrap();
        w[lone_pos] = 1;
        let r = LeafWeights::from_leaf_order(&t, &w);
        assert!(!is_admissible(&t, &r, crate::Level::Finite(4)));

        let t = snowflake();
        let r = LeafWeights::uniform(&t, 1);
        assert!(is_admissible(&t, &r, crate::Level::Finite(2)));
    }

    #[test]
    fn counts_match_leaf_number() {
        for n in 3..=9 {
            for t in crate::topology::trivalent_topologies(n) {
                assert_eq!(t.edge_count(), 2 * n - 3);
                assert_eq!(t.internal().len(), n - 2);
            }
        }
    }
}
