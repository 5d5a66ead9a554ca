use std::collections::BTreeSet;

use thiserror::Error;

use super::{EdgeId, LeafWeights, TreeError, TrivalentTree};

/// A tree with an edge weighting of a fixed degree, indexed by canonical
/// edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTree {
    pub tree: TrivalentTree,
    pub values: Vec<u64>,
    pub degree: u64,
}

impl WeightedTree {
    pub fn new(tree: TrivalentTree, values: Vec<u64>, degree: u64) -> Self {
        assert_eq!(values.len(), tree.edge_count());
        Self { tree, values, degree }
    }

    /// Leaf multigrade `r` with `omega(e_i) = degree * r(i)`, if the leaf
    /// values are divisible by the degree.
    pub fn leaf_grades(&self) -> Option<LeafWeights> {
        let t = &self.tree;
        let mut w = Vec::new();
        for &leaf in t.leaves() {
            let v = self.values[t.leaf_edge(leaf)];
            if self.degree == 0 || !v.is_multiple_of(self.degree) {
                return None;
            }
            w.push(v / self.degree);
        }
        Some(LeafWeights::from_leaf_order(t, &w))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("edge index {0} out of range")]
    NoSuchEdge(EdgeId),
    #[error("degrees differ: {0} vs {1}")]
    DegreeMismatch(u64, u64),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Subdivides `ea` with a new vertex `mA` and `eb` with `mB`, keeps the old
/// weight on both halves, and joins `mA - mB` with weight 0. Labels of `b`
/// that collide with labels of `a` (or with `mA`, `mB`) get `'` appended
/// until unique.
pub fn merge(a: &WeightedTree, ea: EdgeId, b: &WeightedTree, eb: EdgeId) -> Result<WeightedTree, MergeError> {
    if ea >= a.tree.edge_count() {
        return Err(MergeError::NoSuchEdge(ea));
    }
    if eb >= b.tree.edge_count() {
        return Err(MergeError::NoSuchEdge(eb));
    }
    if a.degree != b.degree {
        return Err(MergeError::DegreeMismatch(a.degree, b.degree));
    }
    let mut taken: BTreeSet<String> = a.tree.labels().iter().cloned().collect();
    taken.insert("mA".into());
    taken.insert("mB".into());
    let rename: Vec<String> = b
        .tree
        .labels()
        .iter()
        .map(|l| {
            let mut name = l.clone();
            while taken.contains(&name) {
                name.push('\'');
            }
            name
        })
        .collect();
    for name in &rename {
        taken.insert(name.clone());
    }

    let mut edges: Vec<(String, String, u64)> = Vec::new();
    let mut push_side = |t: &TrivalentTree, values: &[u64], split: EdgeId, hub: &str, name: &dyn Fn(usize) -> String| {
        for (e, &(u, v)) in t.edges().iter().enumerate() {
            if e == split {
                edges.push((name(u), hub.to_string(), values[e]));
                edges.push((hub.to_string(), name(v), values[e]));
            } else {
                edges.push((name(u), name(v), values[e]));
            }
        }
    };
    push_side(&a.tree, &a.values, ea, "mA", &|v| a.tree.label(v).to_string());
    push_side(&b.tree, &b.values, eb, "mB", &|v| rename[v].clone());
    edges.push(("mA".into(), "mB".into(), 0));

    let pairs: Vec<(&str, &str)> = edges.iter().map(|(u, v, _)| (u.as_str(), v.as_str())).collect();
    let tree = TrivalentTree::from_edges(&pairs)?;
    let mut values = vec![0; tree.edge_count()];
    for (u, v, w) in &edges {
        let e = tree
            .find_edge(tree.vertex(u).unwrap(), tree.vertex(v).unwrap())
            .unwrap();
        values[e] = *w;
    }
    Ok(WeightedTree {
        tree,
        values,
        degree: a.degree,
    })
}
