use super::{classify_leaves, EdgeId, TreeError, TrivalentTree, VertexId};

/// Where a leaf edge of the clipped tree came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stalk {
    /// The edge of a lone leaf of the original tree.
    Lone { leaf: VertexId },
    /// The edge above a pairing vertex whose two leaves were clipped.
    Pair {
        hub: VertexId,
        leaves: (VertexId, VertexId),
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StalkEdge {
    /// Index into `Clipped::kept_edges`.
    pub clipped_edge: usize,
    pub original_edge: EdgeId,
    pub stalk: Stalk,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClippedShape {
    Tree(TrivalentTree),
    /// Both endpoints are former pairing vertices (the 4-leaf tree).
    SingleEdge { u: String, v: String },
    /// Some remaining internal vertex has valence below three.
    Degenerate { low_valence: Vec<String> },
}

/// The subtree left after forgetting the edges at paired leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clipped {
    pub shape: ClippedShape,
    /// Original edge ids that survive, ascending. Clipped edge `i` is
    /// `kept_edges[i]`; the order agrees with the clipped tree's canonical
    /// order because labels are preserved.
    pub kept_edges: Vec<EdgeId>,
    pub stalks: Vec<StalkEdge>,
}

impl Clipped {
    pub fn is_single_edge(&self) -> bool {
        matches!(self.shape, ClippedShape::SingleEdge { .. })
    }

    pub fn stalk_of(&self, clipped_edge: usize) -> Option<&StalkEdge> {
        self.stalks.iter().find(|s| s.clipped_edge == clipped_edge)
    }

    /// Internal vertices of the original tree that remain trinodes after
    /// clipping.
    pub fn trinode_centers(&self, tree: &TrivalentTree) -> Vec<VertexId> {
        let kept: std::collections::BTreeSet<_> = self.kept_edges.iter().copied().collect();
        tree.internal()
            .iter()
            .copied()
            .filter(|&v| tree.incident(v).iter().all(|e| kept.contains(e)))
            .collect()
    }
}

/// Clips the paired leaves of a tree with at least four leaves.
pub fn clip(tree: &TrivalentTree) -> Result<Clipped, TreeError> {
    let pairing = classify_leaves(tree)?;
    let mut dropped = vec![false; tree.edge_count()];
    let mut hubs = Vec::new();
    for &(a, b) in &pairing.pairs {
        dropped[tree.leaf_edge(a)] = true;
        dropped[tree.leaf_edge(b)] = true;
        hubs.push((tree.neighbors(a).next().unwrap(), (a, b)));
    }
    let kept_edges: Vec<EdgeId> = (0..tree.edge_count()).filter(|&e| !dropped[e]).collect();

    let mut stalks = Vec::new();
    for (i, &e) in kept_edges.iter().enumerate() {
        let (a, b) = tree.edge(e);
        for end in [a, b] {
            let stalk = if tree.is_leaf(end) {
                Some(Stalk::Lone { leaf: end })
            } else {
                hubs.iter()
                    .find(|(hub, _)| *hub == end)
                    .map(|&(hub, leaves)| Stalk::Pair { hub, leaves })
            };
            if let Some(stalk) = stalk {
                stalks.push(StalkEdge {
                    clipped_edge: i,
                    original_edge: e,
                    stalk,
                });
            }
        }
    }

    let mut valence = vec![0usize; tree.vertex_count()];
    for &e in &kept_edges {
        let (a, b) = tree.edge(e);
        valence[a] += 1;
        valence[b] += 1;
    }
    let low_valence: Vec<String> = (0..tree.vertex_count())
        .filter(|&v| valence[v] == 2)
        .map(|v| tree.label(v).to_string())
        .collect();

    let shape = if !low_valence.is_empty() {
        ClippedShape::Degenerate { low_valence }
    } else if kept_edges.len() == 1 {
        let (a, b) = tree.edge(kept_edges[0]);
        ClippedShape::SingleEdge {
            u: tree.label(a).to_string(),
            v: tree.label(b).to_string(),
        }
    } else {
        let labeled: Vec<(&str, &str)> = kept_edges
            .iter()
            .map(|&e| {
                let (a, b) = tree.edge(e);
                (tree.label(a), tree.label(b))
            })
            .collect();
        ClippedShape::Tree(TrivalentTree::from_edges(&labeled)?)
    };
    Ok(Clipped {
        shape,
        kept_edges,
        stalks,
    })
}

/// Clipping used by the halving isomorphism: the tripod is kept whole with
/// every leaf treated as lone.
pub(crate) fn clip_for_halving(tree: &TrivalentTree) -> Clipped {
    if !tree.is_tripod() {
        return clip(tree).expect("trees with four or more leaves clip");
    }
    let stalks = tree
        .leaves()
        .iter()
        .map(|&leaf| {
            let e = tree.leaf_edge(leaf);
            StalkEdge {
                clipped_edge: e,
                original_edge: e,
                stalk: Stalk::Lone { leaf },
            }
        })
        .collect();
    Clipped {
        shape: ClippedShape::Tree(tree.clone()),
        kept_edges: (0..tree.edge_count()).collect(),
        stalks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{caterpillar, snowflake, trivalent_topologies};

    #[test]
    fn snowflake_clips_to_tripod_of_cherries() {
        let t = snowflake();
        let c = clip(&t).unwrap();
        let ClippedShape::Tree(ref y) = c.shape else {
            panic!("expected a tree")
        };
        assert!(y.is_tripod());
        assert_eq!(y.label(y.internal()[0]), "c");
        assert_eq!(c.stalks.len(), 3);
        assert!(c.stalks.iter().all(|s| matches!(s.stalk, Stalk::Pair { .. })));
    }

    #[test]
    fn six_leaf_caterpillar_clips_to_four_leaf() {
        let t = caterpillar(6);
        let c = clip(&t).unwrap();
        let ClippedShape::Tree(ref small) = c.shape else {
            panic!("expected a tree")
        };
        assert_eq!(small.leaf_count(), 4);
        let lone = c
            .stalks
            .iter()
            .filter(|s| matches!(s.stalk, Stalk::Lone { .. }))
            .count();
        assert_eq!(lone, 2);
        // former lone leaves sit on different hubs, so no pair of the
        // clipped tree consists of two of them
        let pairing = classify_leaves(small).unwrap();
        assert_eq!(pairing.pairs.len(), 2);
        for (a, b) in pairing.pairs {
            let was_leaf = |v| t.is_leaf(t.vertex(small.label(v)).unwrap());
            assert!(!(was_leaf(a) && was_leaf(b)), "two former lone leaves paired");
        }
    }

    #[test]
    fn four_leaf_caterpillar_is_flagged() {
        let c = clip(&caterpillar(4)).unwrap();
        assert!(c.is_single_edge());
        assert_eq!(c.kept_edges.len(), 1);
        assert_eq!(c.stalks.len(), 2);
    }

    #[test]
    fn clipping_never_leaves_valence_two() {
        for n in 4..=9 {
            for t in trivalent_topologies(n) {
                let c = clip(&t).unwrap();
                assert!(!matches!(c.shape, ClippedShape::Degenerate { .. }));
            }
        }
    }
}
