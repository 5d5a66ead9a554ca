//! Binomial relations among lattice points: the Graver basis of the unit
//! cube, a brute-force regenerator, and the canonical quadric/cubic forms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cube::{cube_symmetries, LatticeEquivalence};
use crate::hull::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("sides have different sizes {0} and {1}")]
    UnequalDegrees(usize, usize),
    #[error("sides have different sums")]
    UnequalSums,
    #[error("sides are equal")]
    Trivial,
}

/// `lhs = rhs` as multisets of lattice points, each side sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binomial {
    lhs: Vec<Point>,
    rhs: Vec<Point>,
}

fn total(side: &[Point]) -> Point {
    side.iter().fold([0; 3], |a, p| [a[0] + p[0], a[1] + p[1], a[2] + p[2]])
}

impl Binomial {
    pub fn new(mut lhs: Vec<Point>, mut rhs: Vec<Point>) -> Result<Binomial, RelationError> {
        if lhs.len() != rhs.len() {
            return Err(RelationError::UnequalDegrees(lhs.len(), rhs.len()));
        }
        if total(&lhs) != total(&rhs) {
            return Err(RelationError::UnequalSums);
        }
        lhs.sort_unstable();
        rhs.sort_unstable();
        if lhs == rhs {
            return Err(RelationError::Trivial);
        }
        Ok(Binomial { lhs, rhs })
    }

    pub fn lhs(&self) -> &[Point] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[Point] {
        &self.rhs
    }

    pub fn degree(&self) -> usize {
        self.lhs.len()
    }

    pub fn reversed(&self) -> Binomial {
        Binomial {
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
        }
    }

    /// The orientation with the lexicographically smaller side first.
    pub fn canonical(&self) -> Binomial {
        if self.lhs <= self.rhs {
            self.clone()
        } else {
            self.reversed()
        }
    }

    pub fn support(&self) -> BTreeSet<Point> {
        self.lhs.iter().chain(&self.rhs).copied().collect()
    }

    pub fn map(&self, g: &LatticeEquivalence) -> Binomial {
        let f = |s: &[Point]| {
            let mut v: Vec<Point> = s.iter().map(|&p| g.apply(p)).collect();
            v.sort_unstable();
            v
        };
        Binomial {
            lhs: f(&self.lhs),
            rhs: f(&self.rhs),
        }
    }
}

fn write_side(f: &mut fmt::Formatter<'_>, side: &[Point]) -> fmt::Result {
    for (i, p) in side.iter().enumerate() {
        if i > 0 {
            f.write_str(" + ")?;
        }
        write!(f, "({},{},{})", p[0], p[1], p[2])?;
    }
    Ok(())
}

impl fmt::Display for Binomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_side(f, &self.lhs)?;
        f.write_str(" = ")?;
        write_side(f, &self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedBinomial {
    pub id: &'static str,
    pub binomial: Binomial,
    pub segre: bool,
}

type Row = (&'static str, &'static [Point], &'static [Point]);

const GRAVER: [Row; 20] = [
    ("Q1", &[[1, 0, 0], [1, 1, 1]], &[[1, 0, 1], [1, 1, 0]]),
    ("Q2", &[[0, 1, 0], [1, 1, 1]], &[[0, 1, 1], [1, 1, 0]]),
    ("Q3", &[[0, 0, 0], [1, 1, 1]], &[[0, 0, 1], [1, 1, 0]]),
    ("Q4", &[[0, 0, 1], [1, 1, 1]], &[[0, 1, 1], [1, 0, 1]]),
    ("Q5", &[[0, 0, 0], [1, 1, 1]], &[[0, 1, 0], [1, 0, 1]]),
    ("Q6", &[[0, 0, 1], [1, 1, 0]], &[[0, 1, 0], [1, 0, 1]]),
    ("Q7", &[[0, 0, 0], [1, 1, 1]], &[[0, 1, 1], [1, 0, 0]]),
    ("Q8", &[[0, 0, 1], [1, 1, 0]], &[[0, 1, 1], [1, 0, 0]]),
    ("Q9", &[[0, 1, 0], [1, 0, 1]], &[[0, 1, 1], [1, 0, 0]]),
    ("Q10", &[[0, 0, 0], [1, 1, 0]], &[[0, 1, 0], [1, 0, 0]]),
    ("Q11", &[[0, 0, 0], [1, 0, 1]], &[[0, 0, 1], [1, 0, 0]]),
    ("Q12", &[[0, 0, 0], [0, 1, 1]], &[[0, 0, 1], [0, 1, 0]]),
    ("C1", &[[0, 1, 0], [1, 0, 0], [1, 1, 1]], &[[0, 0, 1], [1, 1, 0], [1, 1, 0]]),
    ("C2", &[[0, 0, 0], [1, 1, 1], [1, 1, 1]], &[[0, 1, 1], [1, 0, 1], [1, 1, 0]]),
    ("C3", &[[0, 0, 1], [1, 0, 0], [1, 1, 1]], &[[0, 1, 0], [1, 0, 1], [1, 0, 1]]),
    ("C4", &[[0, 0, 1], [0, 0, 1], [1, 1, 0]], &[[0, 0, 0], [0, 1, 1], [1, 0, 1]]),
    ("C5", &[[0, 0, 0], [0, 1, 1], [1, 1, 0]], &[[0, 1, 0], [0, 1, 0], [1, 0, 1]]),
    ("C6", &[[0, 0, 0], [1, 0, 1], [1, 1, 0]], &[[0, 1, 1], [1, 0, 0], [1, 0, 0]]),
    ("C7", &[[0, 0, 1], [0, 1, 0], [1, 1, 1]], &[[0, 1, 1], [0, 1, 1], [1, 0, 0]]),
    ("C8", &[[0, 0, 0], [0, 0, 0], [1, 1, 1]], &[[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
];

fn named(rows: &[Row], segre_id: &str) -> Vec<NamedBinomial> {
    rows.iter()
        .map(|&(id, l, r)| NamedBinomial {
            id,
            binomial: Binomial::new(l.to_vec(), r.to_vec()).expect("stored relation is valid"),
            segre: id == segre_id,
        })
        .collect()
}

/// The 12 quadrics `Q1..Q12` and 8 cubics `C1..C8` of the unit cube.
pub fn unit_cube_graver() -> Vec<NamedBinomial> {
    named(&GRAVER, "C2")
}

/// The four representative relation forms; `R4` is the degenerated Segre
/// cubic.
pub fn canonical_relations() -> Vec<NamedBinomial> {
    const ROWS: [Row; 4] = [
        ("R1", &[[1, 0, 0], [0, 1, 0]], &[[1, 1, 0], [0, 0, 0]]),
        ("R2", &[[1, 0, 1], [0, 1, 0]], &[[1, 1, 1], [0, 0, 0]]),
        ("R3", &[[1, 0, 1], [1, 1, 0]], &[[1, 1, 1], [1, 0, 0]]),
        ("R4", &[[1, 1, 1], [1, 1, 1], [0, 0, 0]], &[[1, 1, 0], [1, 0, 1], [0, 1, 1]]),
    ];
    named(&ROWS, "R4")
}

/// The degenerated Segre cubic.
pub fn segre_cubic() -> Binomial {
    canonical_relations().pop().expect("R4").binomial
}

/// The Graver elements supported on `points`.
pub fn restrict_graver(points: &[Point]) -> Vec<NamedBinomial> {
    let set: BTreeSet<Point> = points.iter().copied().collect();
    unit_cube_graver()
        .into_iter()
        .filter(|b| b.binomial.support().is_subset(&set))
        .collect()
}

/// Whether `b` is a Graver element up to a cube symmetry and side swap.
pub fn in_graver_up_to_symmetry(b: &Binomial) -> bool {
    let graver: BTreeSet<Binomial> = unit_cube_graver().into_iter().map(|n| n.binomial.canonical()).collect();
    cube_symmetries().iter().any(|g| graver.contains(&b.map(g).canonical()))
}

/// Nondecreasing index tuples of length `d` over `n` items.
fn multisets(n: usize, d: usize) -> Vec<Vec<usize>> {
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
    let mut out = Vec::new();
    go(n, d, 0, &mut Vec::new(), &mut out);
    out
}

/// Sub-multisets of `xs` of size `s`, as sorted index vectors.
fn sub_multisets(xs: &[usize], s: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for mask in 0u32..1 << xs.len() {
        if mask.count_ones() as usize == s {
            out.insert((0..xs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| xs[i]).collect());
        }
    }
    out
}

/// All primitive binomials among multisets of `points` of degree at most
/// `degree_bound`, in canonical orientation, sorted.
pub fn brute_force_graver(points: &[Point], degree_bound: usize) -> Vec<Binomial> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let sum = |m: &[usize]| total(&m.iter().map(|&i| pts[i]).collect::<Vec<_>>());
    let mut out = Vec::new();
    for d in 2..=degree_bound {
        let mut fibers: BTreeMap<Point, Vec<Vec<usize>>> = BTreeMap::new();
        for m in multisets(pts.len(), d) {
            fibers.entry(sum(&m)).or_default().push(m);
        }
        for fiber in fibers.values() {
            for (i, a) in fiber.iter().enumerate() {
                for b in &fiber[i + 1..] {
                    if a.iter().any(|x| b.contains(x)) {
                        continue;
                    }
                    let divisible = (1..d).any(|s| {
                        let bs = sub_multisets(b, s);
                        let bsums: BTreeSet<Point> = bs.iter().map(|x| sum(x)).collect();
                        sub_multisets(a, s).iter().any(|x| bsums.contains(&sum(x)))
                    });
                    if !divisible {
                        let side = |m: &[usize]| m.iter().map(|&i| pts[i]).collect();
                        out.push(Binomial::new(side(a), side(b)).expect("fiber pair").canonical());
                    }
                }
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{classify_cell, unit_cube};
    use crate::Level;

    fn canonical_set(v: &[NamedBinomial]) -> BTreeSet<Binomial> {
        v.iter().map(|b| b.binomial.canonical()).collect()
    }

    #[test]
    fn stored_list_shape() {
        let g = unit_cube_graver();
        assert_eq!(g.len(), 20);
        assert_eq!(g.iter().filter(|b| b.binomial.degree() == 2).count(), 12);
        assert_eq!(g.iter().filter(|b| b.binomial.degree() == 3).count(), 8);
        let first = Binomial::new(vec![[1, 0, 0], [1, 1, 1]], vec![[1, 0, 1], [1, 1, 0]]).unwrap();
        assert!(g.iter().any(|b| b.binomial == first));
        let c8 = Binomial::new(vec![[0, 0, 0], [0, 0, 0], [1, 1, 1]], vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap();
        assert!(g.iter().any(|b| b.binomial == c8));
        assert_eq!(g.iter().filter(|b| b.segre).count(), 1);
    }

    #[test]
    fn invalid_binomials() {
        assert_eq!(
            Binomial::new(vec![[0, 0, 1], [1, 1, 1]], vec![[0, 0, 1], [1, 0, 1]]),
            Err(RelationError::UnequalSums)
        );
        assert_eq!(Binomial::new(vec![[0, 0, 1]], vec![[0, 0, 1], [0, 0, 0]]), Err(RelationError::UnequalDegrees(1, 2)));
        assert_eq!(Binomial::new(vec![[1, 0, 0]], vec![[1, 0, 0]]), Err(RelationError::Trivial));
    }

    #[test]
    fn brute_force_regenerates_cube_basis() {
        let brute: BTreeSet<Binomial> = brute_force_graver(&unit_cube(), 3).into_iter().collect();
        assert_eq!(brute, canonical_set(&unit_cube_graver()));
    }

    #[test]
    fn simplices_have_no_relations() {
        let simplex = classify_cell([1, 1, 3], Level::Infinite).points;
        assert!(brute_force_graver(&simplex, 3).is_empty());
        assert!(restrict_graver(&simplex).is_empty());
        assert!(brute_force_graver(&[[0, 0, 0], [1, 1, 0]], 4).is_empty());
    }

    #[test]
    fn restriction_examples() {
        assert_eq!(restrict_graver(&unit_cube()).len(), 20);
        let allzero = classify_cell([0, 0, 0], Level::Infinite).points;
        let r = restrict_graver(&allzero);
        assert!(r.iter().any(|b| b.segre));
        assert_eq!(
            canonical_set(&r),
            brute_force_graver(&allzero, 3).into_iter().collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn canonical_forms_are_graver_elements() {
        let c = canonical_relations();
        assert_eq!(c.len(), 4);
        assert_eq!(c.iter().filter(|b| b.segre).count(), 1);
        for b in &c {
            assert!(in_graver_up_to_symmetry(&b.binomial), "{}", b.binomial);
        }
        assert_eq!(segre_cubic().to_string(), "(0,0,0) + (1,1,1) + (1,1,1) = (0,1,1) + (1,0,1) + (1,1,0)");
    }

    #[test]
    fn every_cubic_is_a_vertex_star() {
        for b in unit_cube_graver().iter().filter(|b| b.binomial.degree() == 3) {
            let g = cube_symmetries()
                .into_iter()
                .find(|g| b.binomial.map(g).canonical() == segre_cubic().canonical());
            assert!(g.is_some(), "{}", b.id);
        }
    }
}
