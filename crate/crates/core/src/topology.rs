//! Standard trees and exhaustive enumeration of unlabeled trivalent
//! topologies.
//!
//! Generated trees label leaves `a, b, c, ...` and internal vertices
//! `u1, u2, ...`.

use std::collections::BTreeMap;

use crate::tree::TrivalentTree;

fn leaf_label(i: usize) -> String {
    assert!(i < 26, "at most 26 leaves are supported");
    char::from(b'a' + i as u8).to_string()
}

fn build(edges: Vec<(String, String)>) -> TrivalentTree {
    TrivalentTree::from_edges(&edges).expect("generated trees are trivalent")
}

/// The tree with one internal vertex `u1` and leaves `a, b, c`.
pub fn tripod() -> TrivalentTree {
    caterpillar(3)
}

/// The caterpillar on `n >= 3` leaves: a path `u1 - ... - u(n-2)` with two
/// leaves on each end vertex and one on each middle vertex, in order.
pub fn caterpillar(n: usize) -> TrivalentTree {
    assert!(n >= 3);
    if n == 3 {
        return build((0..3).map(|i| (leaf_label(i), "u1".to_string())).collect());
    }
    let spine = n - 2;
    let mut edges = Vec::new();
    for j in 1..spine {
        edges.push((format!("u{j}"), format!("u{}", j + 1)));
    }
    for i in 0..n {
        let hub = if i < 2 {
            1
        } else if i >= n - 2 {
            spine
        } else {
            i
        };
        edges.push((leaf_label(i), format!("u{hub}")));
    }
    build(edges)
}

/// Three cherries around a central trinode `c`; cherry hubs `h1, h2, h3`
/// carry leaves `l1 l2`, `l3 l4`, `l5 l6`.
pub fn snowflake() -> TrivalentTree {
    let mut edges = Vec::new();
    for h in 1..=3 {
        edges.push(("c".to_string(), format!("h{h}")));
        edges.push((format!("h{h}"), format!("l{}", 2 * h - 1)));
        edges.push((format!("h{h}"), format!("l{}", 2 * h)));
    }
    build(edges)
}

type Adjacency = Vec<Vec<usize>>;

fn encode(adj: &Adjacency, v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| encode(adj, w, v))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Root-independent canonical form: the least rooted encoding.
fn canonical(adj: &Adjacency) -> (String, usize) {
    (0..adj.len())
        .map(|v| (encode(adj, v, usize::MAX), v))
        .min()
        .unwrap()
}

fn label_canonically(adj: &Adjacency, root: usize) -> TrivalentTree {
    let mut names = vec![String::new(); adj.len()];
    let (mut leaves, mut internal) = (0, 0);
    let mut stack = vec![(root, usize::MAX)];
    while let Some((v, parent)) = stack.pop() {
        if adj[v].len() == 1 {
            names[v] = leaf_label(leaves);
            leaves += 1;
        } else {
            internal += 1;
            names[v] = format!("u{internal}");
        }
        let mut kids: Vec<(String, usize)> = adj[v]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| (encode(adj, w, v), w))
            .collect();
        kids.sort();
        for (_, w) in kids.into_iter().rev() {
            stack.push((w, v));
        }
    }
    let mut edges = Vec::new();
    for (v, nbrs) in adj.iter().enumerate() {
        for &w in nbrs {
            if v < w {
                edges.push((names[v].clone(), names[w].clone()));
            }
        }
    }
    build(edges)
}

/// Every unlabeled trivalent tree with `n` leaves, canonically labeled and
/// in a fixed order. Counts for n = 3..10 are 1, 1, 1, 2, 2, 4, 6, 11.
pub fn trivalent_topologies(n: usize) -> Vec<TrivalentTree> {
    assert!((3..=26).contains(&n));
    let tripod: Adjacency = vec![vec![1, 2, 3], vec![0], vec![0], vec![0]];
    let mut level: BTreeMap<String, Adjacency> = BTreeMap::new();
    level.insert(canonical(&tripod).0, tripod);
    for _ in 3..n {
        let mut next = BTreeMap::new();
        for adj in level.values() {
            for v in 0..adj.len() {
                for &w in &adj[v] {
                    if v > w {
                        continue;
                    }
                    // subdivide v-w with s and hang a new leaf t from s
                    let mut grown = adj.clone();
                    let (s, t) = (grown.len(), grown.len() + 1);
                    for x in grown[v].iter_mut() {
                        if *x == w {
                            *x = s;
                        }
                    }
                    for x in grown[w].iter_mut() {
                        if *x == v {
                            *x = s;
                        }
                    }
                    grown.push(vec![v, w, t]);
                    grown.push(vec![s]);
                    next.entry(canonical(&grown).0).or_insert(grown);
                }
            }
        }
        level = next;
    }
    level
        .values()
        .map(|adj| label_canonically(adj, canonical(adj).1))
        .collect()
}
