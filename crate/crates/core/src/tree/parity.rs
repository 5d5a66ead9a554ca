use super::{EdgeId, LeafWeights, TreeError, TrivalentTree, VertexId};

/// The parity of every edge forced by the leaf parities: `true` means odd.
///
/// Computed by propagating from the leaves towards the first leaf: an edge
/// above a trinode carries the sum of the parities below it.
pub fn forced_edge_parities(tree: &TrivalentTree, r: &LeafWeights) -> Result<Vec<bool>, TreeError> {
    let total = r.total();
    if total % 2 == 1 {
        return Err(TreeError::OddTotal(total));
    }
    let root = tree.leaves()[0];
    let mut parity = vec![false; tree.edge_count()];
    fill(tree, r, tree.neighbors(root).next().unwrap(), tree.leaf_edge(root), &mut parity);
    parity[tree.leaf_edge(root)] = r.get(root) % 2 == 1;
    Ok(parity)
}

// Returns the parity of `up`, the edge from `v` towards the root.
fn fill(tree: &TrivalentTree, r: &LeafWeights, v: VertexId, up: EdgeId, parity: &mut [bool]) -> bool {
    if tree.is_leaf(v) {
        parity[up] = r.get(v) % 2 == 1;
        return parity[up];
    }
    let mut acc = false;
    for &e in tree.incident(v) {
        if e != up {
            acc ^= fill(tree, r, tree.other_end(e, v), e, parity);
        }
    }
    parity[up] = acc;
    acc
}

/// A maximal path of odd edges, running between two odd leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddPath {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl OddPath {
    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.vertices[0], *self.vertices.last().unwrap())
    }
}

/// Decomposes the odd edges into edge-disjoint leaf-to-leaf paths.
pub fn odd_path_system(tree: &TrivalentTree, r: &LeafWeights) -> Result<Vec<OddPath>, TreeError> {
    let parity = forced_edge_parities(tree, r)?;
    for &v in tree.internal() {
        let odd = tree.incident(v).iter().filter(|&&e| parity[e]).count();
        assert!(odd == 0 || odd == 2, "trinode {} sees {odd} odd edges", tree.label(v));
    }
    let mut used = vec![false; tree.edge_count()];
    let mut paths = Vec::new();
    for &leaf in tree.leaves() {
        let start = tree.leaf_edge(leaf);
        if !parity[start] || used[start] {
            continue;
        }
        let mut vertices = vec![leaf];
        let mut edges = Vec::new();
        let (mut at, mut via) = (leaf, start);
        loop {
            used[via] = true;
            edges.push(via);
            at = tree.other_end(via, at);
            vertices.push(at);
            if tree.is_leaf(at) {
                break;
            }
            via = *tree
                .incident(at)
                .iter()
                .find(|&&e| parity[e] && !used[e])
                .expect("odd edges pair up at trinodes");
        }
        paths.push(OddPath { vertices, edges });
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{caterpillar, snowflake, trivalent_topologies};

    fn caterpillar_edge(t: &TrivalentTree) -> EdgeId {
        t.find_edge(t.vertex("u1").unwrap(), t.vertex("u2").unwrap()).unwrap()
    }

    #[test]
    fn four_leaf_examples() {
        let t = caterpillar(4);
        let internal = caterpillar_edge(&t);
        let p = forced_edge_parities(&t, &LeafWeights::from_leaf_order(&t, &[1, 1, 1, 1])).unwrap();
        assert!(!p[internal]);
        let r = LeafWeights::from_leaf_order(&t, &[1, 0, 1, 0]);
        let p = forced_edge_parities(&t, &r).unwrap();
        assert!(p[internal]);

        let paths = odd_path_system(&t, &r).unwrap();
        assert_eq!(paths.len(), 1);
        let (a, b) = paths[0].endpoints();
        assert_eq!((t.label(a), t.label(b)), ("a", "c"));
        assert!(paths[0].edges.contains(&internal));
    }

    #[test]
    fn even_weights_give_even_edges() {
        for t in trivalent_topologies(7) {
            let r = LeafWeights::uniform(&t, 2);
            assert!(forced_edge_parities(&t, &r).unwrap().iter().all(|&odd| !odd));
            assert!(odd_path_system(&t, &r).unwrap().is_empty());
        }
    }

    #[test]
    fn snowflake_single_odd_cherry() {
        let t = snowflake();
        let mut w = vec![2; 6];
        w[0] = 1;
        w[1] = 1;
        let r = LeafWeights::from_leaf_order(&t, &w);
        let paths = odd_path_system(&t, &r).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].edges.len(), 2);
        let (a, b) = paths[0].endpoints();
        assert_eq!([a, b], [t.leaves()[0], t.leaves()[1]]);
    }

    #[test]
    fn odd_total_is_rejected() {
        let t = caterpillar(4);
        let r = LeafWeights::from_leaf_order(&t, &[1, 0, 0, 0]);
        assert_eq!(forced_edge_parities(&t, &r), Err(TreeError::OddTotal(1)));
    }

    #[test]
    fn parities_are_even_at_every_trinode_exhaustively() {
        for n in 4..=7 {
            for t in trivalent_topologies(n) {
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() % 2 == 1 {
                        continue;
                    }
                    let w: Vec<u64> = (0..n).map(|i| u64::from((mask >> i) & 1)).collect();
                    let r = LeafWeights::from_leaf_order(&t, &w);
                    let p = forced_edge_parities(&t, &r).unwrap();
                    for &v in t.internal() {
                        let odd = t.incident(v).iter().filter(|&&e| p[e]).count();
                        assert_eq!(odd % 2, 0);
                    }
                    let paths = odd_path_system(&t, &r).unwrap();
                    let mut ends: Vec<_> = paths
                        .iter()
                        .flat_map(|p| {
                            let (a, b) = p.endpoints();
                            [a, b]
                        })
                        .collect();
                    ends.sort_unstable();
                    let mut odd_leaves: Vec<_> =
                        t.leaves().iter().copied().filter(|&l| r.get(l) == 1).collect();
                    odd_leaves.sort_unstable();
                    assert_eq!(ends, odd_leaves);
                    let mut all_edges: Vec<_> = paths.iter().flat_map(|p| p.edges.clone()).collect();
                    let before = all_edges.len();
                    all_edges.sort_unstable();
                    all_edges.dedup();
                    assert_eq!(before, all_edges.len(), "paths share an edge");
                }
            }
        }
    }
}
