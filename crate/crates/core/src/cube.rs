//! Unit-cube cells `C(m) ∩ P_3(2L)`, their classification, lattice normal
//! forms, normality, and the odd-level polytopes `IP_3(L)`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::hull::{vertices, Hull, Point};
use crate::Level;

/// The eight offsets of the unit cube in lexicographic order.
pub fn unit_cube() -> Vec<Point> {
    let mut v = Vec::with_capacity(8);
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                v.push([x, y, z]);
            }
        }
    }
    v
}

fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn triangle(p: Point) -> bool {
    let [a, b, c] = p;
    a >= 0 && b >= 0 && c >= 0 && (a - b).abs() <= c && c <= a + b
}

/// Sorts `m` ascending and returns the sorted triple, the permutation
/// (`sorted[i] = m[perm[i]]`) and `n_i = sum - 2 * sorted_i`.
pub fn n_values(m: [i64; 3]) -> ([i64; 3], [usize; 3], [i64; 3]) {
    let mut perm = [0, 1, 2];
    perm.sort_by_key(|&i| (m[i], i));
    let sorted = perm.map(|i| m[i]);
    let s: i64 = sorted.iter().sum();
    (sorted, perm, sorted.map(|x| s - 2 * x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimitiveClass {
    Empty,
    N3Minus2,
    N3Minus1,
    AllZero,
    N1Pos,
    N1N2Pos,
    Full,
}

impl PrimitiveClass {
    pub const NONEMPTY: [PrimitiveClass; 6] = [
        PrimitiveClass::N3Minus2,
        PrimitiveClass::N3Minus1,
        PrimitiveClass::AllZero,
        PrimitiveClass::N1Pos,
        PrimitiveClass::N1N2Pos,
        PrimitiveClass::Full,
    ];

    /// Number of offsets in an untruncated cell of this class.
    pub fn size(self) -> usize {
        match self {
            PrimitiveClass::Empty => 0,
            PrimitiveClass::N3Minus2 => 1,
            PrimitiveClass::N3Minus1 => 4,
            PrimitiveClass::AllZero => 5,
            PrimitiveClass::N1Pos => 6,
            PrimitiveClass::N1N2Pos => 7,
            PrimitiveClass::Full => 8,
        }
    }

    /// A base point whose unbounded cell has this class.
    pub fn representative(self) -> [i64; 3] {
        match self {
            PrimitiveClass::Empty => [0, 0, 3],
            PrimitiveClass::N3Minus2 => [1, 1, 4],
            PrimitiveClass::N3Minus1 => [1, 1, 3],
            PrimitiveClass::AllZero => [0, 0, 0],
            PrimitiveClass::N1Pos => [0, 1, 1],
            PrimitiveClass::N1N2Pos => [1, 1, 2],
            PrimitiveClass::Full => [2, 2, 2],
        }
    }
}

impl fmt::Display for PrimitiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrimitiveClass::Empty => "EMPTY",
            PrimitiveClass::N3Minus2 => "N3_MINUS2",
            PrimitiveClass::N3Minus1 => "N3_MINUS1",
            PrimitiveClass::AllZero => "ALLZERO",
            PrimitiveClass::N1Pos => "N1POS",
            PrimitiveClass::N1N2Pos => "N1N2POS",
            PrimitiveClass::Full => "FULL",
        })
    }
}

/// Where the level plane `sum = L2` meets the cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cut {
    /// Through `(1,1,0),(1,0,1),(0,1,1)`: removes `(1,1,1)`.
    Upper,
    /// Through `(1,0,0),(0,1,0),(0,0,1)`: keeps offsets of sum at most 1.
    Lower,
    /// Through the corner `(0,0,0)` only.
    Corner,
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cut::Upper => "upper",
            Cut::Lower => "lower",
            Cut::Corner => "corner",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellClass {
    Primitive(PrimitiveClass),
    LevelTruncated { base: PrimitiveClass, cut: Cut },
}

impl CellClass {
    pub fn is_empty(self) -> bool {
        self == CellClass::Primitive(PrimitiveClass::Empty)
    }
}

impl fmt::Display for CellClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellClass::Primitive(p) => p.fmt(f),
            CellClass::LevelTruncated { base, cut } => write!(f, "LEVEL_TRUNCATED({base},{cut})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeCell {
    pub base: [i64; 3],
    pub bound: Level,
    /// Offsets in `{0,1}^3`, in the caller's coordinate order, sorted.
    pub points: Vec<Point>,
    pub class: CellClass,
}

impl CubeCell {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The absolute lattice points `base + offset`.
    pub fn absolute_points(&self) -> Vec<Point> {
        self.points.iter().map(|&p| add(self.base, p)).collect()
    }
}

fn primitive_class(m: [i64; 3]) -> PrimitiveClass {
    let (sorted, _, n) = n_values(m);
    match n[2] {
        x if x < -2 => PrimitiveClass::Empty,
        -2 => PrimitiveClass::N3Minus2,
        -1 => PrimitiveClass::N3Minus1,
        _ if sorted == [0, 0, 0] => PrimitiveClass::AllZero,
        _ if n[1] == 0 => PrimitiveClass::N1Pos,
        0 => PrimitiveClass::N1N2Pos,
        _ => PrimitiveClass::Full,
    }
}

/// Classifies the cell based at `m` under the trinode sum bound `l2`.
pub fn classify_cell(m: [i64; 3], l2: Level) -> CubeCell {
    assert!(m.iter().all(|&x| x >= 0), "cell base must be nonnegative");
    let sum_m: i64 = m.iter().sum();
    let within = |p: Point| l2.finite().is_none_or(|l| sum_m + p.iter().sum::<i64>() <= l as i64);
    let unbounded: Vec<Point> = unit_cube().into_iter().filter(|&p| triangle(add(m, p))).collect();
    let points: Vec<Point> = unbounded.iter().copied().filter(|&p| within(p)).collect();
    let base = primitive_class(m);
    let class = if points.is_empty() {
        CellClass::Primitive(PrimitiveClass::Empty)
    } else if points.len() == unbounded.len() {
        CellClass::Primitive(base)
    } else {
        let cut = match l2.finite().map(|l| l as i64 - sum_m) {
            Some(2) => Cut::Upper,
            Some(1) => Cut::Lower,
            _ => Cut::Corner,
        };
        CellClass::LevelTruncated { base, cut }
    };
    CubeCell {
        base: m,
        bound: l2,
        points,
        class,
    }
}

/// An affine map `p -> transform * p + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeEquivalence {
    pub translation: [i64; 3],
    pub transform: [[i64; 3]; 3],
}

impl LatticeEquivalence {
    pub fn apply(&self, p: Point) -> Point {
        let mut out = self.translation;
        for (i, row) in self.transform.iter().enumerate() {
            for j in 0..3 {
                out[i] += row[j] * p[j];
            }
        }
        out
    }

    pub fn determinant(&self) -> i64 {
        let a = self.transform;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// The 48 symmetries of the unit cube, each mapping `{0,1}^3` onto itself.
pub fn cube_symmetries() -> Vec<LatticeEquivalence> {
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for signs in 0..8u8 {
            let mut transform = [[0; 3]; 3];
            let mut translation = [0; 3];
            for i in 0..3 {
                let flip = signs >> i & 1 == 1;
                transform[i][perm[i]] = if flip { -1 } else { 1 };
                translation[i] = i64::from(flip);
            }
            out.push(LatticeEquivalence { translation, transform });
        }
    }
    out
}

/// The lexicographically least image of `points` under the cube
/// symmetries, with the first symmetry attaining it.
pub fn lattice_normal_form(points: &[Point]) -> (Vec<Point>, LatticeEquivalence) {
    let mut best: Option<(Vec<Point>, LatticeEquivalence)> = None;
    for g in cube_symmetries() {
        let mut image: Vec<Point> = points.iter().map(|&p| g.apply(p)).collect();
        image.sort_unstable();
        if best.as_ref().is_none_or(|(b, _)| image < *b) {
            best = Some((image, g));
        }
    }
    best.expect("cube has symmetries")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normality {
    /// `(degree, lattice point of the dilate not reached by the sumset)`.
    pub witness: Option<(u64, Point)>,
}

impl Normality {
    pub fn is_normal(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks that every lattice point of `d * conv(points)` is a sum of `d`
/// points, for `2 <= d <= max_degree`.
pub fn is_normal(points: &[Point], max_degree: u64) -> Normality {
    let Some(hull) = Hull::new(points) else {
        return Normality { witness: None };
    };
    let lo = [0, 1, 2].map(|i| points.iter().map(|p| p[i]).min().unwrap());
    let hi = [0, 1, 2].map(|i| points.iter().map(|p| p[i]).max().unwrap());
    let mut sums: HashSet<Point> = points.iter().copied().collect();
    for d in 2..=max_degree {
        sums = sums.iter().flat_map(|&s| points.iter().map(move |&p| add(s, p))).collect();
        let k = d as i64;
        for x in k * lo[0]..=k * hi[0] {
            for y in k * lo[1]..=k * hi[1] {
                for z in k * lo[2]..=k * hi[2] {
                    let q = [x, y, z];
                    if hull.contains_scaled(q, k) && !sums.contains(&q) {
                        return Normality { witness: Some((d, q)) };
                    }
                }
            }
        }
    }
    Normality { witness: None }
}

/// A catalog shape up to lattice equivalence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CatalogForm {
    Primitive(PrimitiveClass),
    /// The level-one cell at the origin.
    LevelOneTetrahedron,
    /// Two adjacent offsets, from a lower cut of an `N3_MINUS1` cell.
    Segment,
}

impl fmt::Display for CatalogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogForm::Primitive(p) => p.fmt(f),
            CatalogForm::LevelOneTetrahedron => f.write_str("L1_TETRAHEDRON"),
            CatalogForm::Segment => f.write_str("SEGMENT"),
        }
    }
}

/// Every catalog form with its normal form.
pub fn catalog() -> Vec<(CatalogForm, Vec<Point>)> {
    let mut out: Vec<(CatalogForm, Vec<Point>)> = PrimitiveClass::NONEMPTY
        .iter()
        .map(|&c| {
            let cell = classify_cell(c.representative(), Level::Infinite);
            (CatalogForm::Primitive(c), lattice_normal_form(&cell.points).0)
        })
        .collect();
    let tetra = classify_cell([0, 0, 0], Level::Finite(2));
    out.push((CatalogForm::LevelOneTetrahedron, lattice_normal_form(&tetra.points).0));
    let segment = classify_cell([0, 1, 2], Level::Finite(4));
    out.push((CatalogForm::Segment, lattice_normal_form(&segment.points).0));
    out
}

/// The catalog form lattice-equivalent to `points`, if any.
pub fn catalog_match(points: &[Point]) -> Option<CatalogForm> {
    let nf = lattice_normal_form(points).0;
    catalog().into_iter().find(|(_, p)| *p == nf).map(|(f, _)| f)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusEntry {
    pub cell: CubeCell,
    pub form: Option<CatalogForm>,
    pub normality: Normality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    /// Nonempty cells in `(bound, base)` order.
    pub entries: Vec<CensusEntry>,
    pub empty_cells: usize,
}

impl Census {
    /// Cell counts per class label.
    pub fn class_counts(&self) -> BTreeMap<CellClass, usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.cell.class).or_insert(0) += 1;
        }
        out
    }

    /// Cell counts per catalog form (`None` for unmatched cells).
    pub fn form_counts(&self) -> BTreeMap<Option<CatalogForm>, usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.form).or_insert(0) += 1;
        }
        out
    }
}

/// Classifies every cell with base in `[0, max]^3` for each bound, checking
/// normality up to `max_degree`. Normality is computed once per shape.
pub fn sweep(max: i64, bounds: &[Level], max_degree: u64) -> Census {
    let grid: Vec<(Level, [i64; 3])> = bounds
        .iter()
        .flat_map(|&b| {
            (0..=max).flat_map(move |x| (0..=max).flat_map(move |y| (0..=max).map(move |z| (b, [x, y, z]))))
        })
        .collect();
    let cells: Vec<CubeCell> = grid.par_iter().map(|&(b, m)| classify_cell(m, b)).collect();
    let empty_cells = cells.iter().filter(|c| c.is_empty()).count();
    let cells: Vec<CubeCell> = cells.into_iter().filter(|c| !c.is_empty()).collect();
    let mut shapes: Vec<Vec<Point>> = cells.iter().map(|c| lattice_normal_form(&c.points).0).collect();
    let keys = shapes.clone();
    shapes.sort();
    shapes.dedup();
    let verdicts: BTreeMap<Vec<Point>, (Option<CatalogForm>, Normality)> = shapes
        .into_par_iter()
        .map(|s| {
            let v = (catalog_match(&s), is_normal(&s, max_degree));
            (s, v)
        })
        .collect();
    let entries = cells
        .into_iter()
        .zip(keys)
        .map(|(cell, key)| {
            let (form, normality) = verdicts[&key];
            CensusEntry { cell, form, normality }
        })
        .collect();
    Census { entries, empty_cells }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubeError {
    #[error("level {0} is even; use P_3 directly")]
    EvenLevel(u64),
    #[error("level must be positive")]
    ZeroLevel,
    #[error("point {point:?} is not in {degree} * P_3({level})")]
    NotInPolytope { point: [u64; 3], degree: u64, level: u64 },
}

/// Lattice points of `P_3(level)`: triangle triples with sum at most `level`.
pub fn p3_lattice_points(level: u64) -> Vec<Point> {
    let l = level as i64;
    let mut out = Vec::new();
    for a in 0..=l {
        for b in 0..=l - a {
            for c in 0..=l - a - b {
                if triangle([a, b, c]) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn check_odd(level: u64) -> Result<(), CubeError> {
    match level {
        0 => Err(CubeError::ZeroLevel),
        l if l % 2 == 0 => Err(CubeError::EvenLevel(l)),
        _ => Ok(()),
    }
}

/// Vertices of the hull of the integral points of `P_3(level)`, from the
/// closed-form candidate list.
pub fn ip3(level: u64) -> Result<Vec<Point>, CubeError> {
    check_odd(level)?;
    let h = ((level - 1) / 2) as i64;
    let mut candidates = vec![[0, 0, 0]];
    for third in [0, 1] {
        candidates.extend([[h, h, third], [h, third, h], [third, h, h]]);
    }
    let l = level as i64;
    candidates.retain(|&p| triangle(p) && p.iter().sum::<i64>() <= l);
    Ok(vertices(&candidates))
}

/// Vertices of the hull of every integral point of `P_3(level)`.
pub fn ip3_brute_force(level: u64) -> Result<Vec<Point>, CubeError> {
    check_odd(level)?;
    Ok(vertices(&p3_lattice_points(level)))
}

/// Whether the degree-`degree` point `q` normalizes into
/// `P_3(level) \ IP_3(level)`.
pub fn in_omega(q: [u64; 3], degree: u64, level: u64) -> Result<bool, CubeError> {
    check_odd(level)?;
    let p = q.map(|x| x as i64);
    if degree == 0 || !triangle(p) || p.iter().sum::<i64>() > (degree * level) as i64 {
        return Err(CubeError::NotInPolytope {
            point: q,
            degree,
            level,
        });
    }
    let hull = Hull::new(&ip3(level)?).expect("IP_3 contains the origin");
    Ok(!hull.contains_scaled(p, degree as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn n_value_examples() {
        assert_eq!(n_values([1, 1, 3]).2, [3, 3, -1]);
        assert_eq!(n_values([0, 0, 0]).2, [0, 0, 0]);
        assert_eq!(n_values([1, 1, 4]).2, [4, 4, -2]);
        let (sorted, perm, _) = n_values([5, 0, 2]);
        assert_eq!(sorted, [0, 2, 5]);
        assert_eq!(perm, [1, 2, 0]);
    }

    #[test]
    fn classify_examples() {
        let c = classify_cell([0, 0, 0], Level::Infinite);
        assert_eq!(c.points, vec![[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0], [1, 1, 1]]);
        assert_eq!(c.class.to_string(), "ALLZERO");

        let c = classify_cell([1, 1, 3], Level::Infinite);
        assert_eq!(c.points, vec![[0, 1, 0], [1, 0, 0], [1, 1, 0], [1, 1, 1]]);
        assert_eq!(c.class.to_string(), "N3_MINUS1");

        assert!(classify_cell([0, 0, 3], Level::Infinite).class.is_empty());

        let c = classify_cell([0, 0, 0], Level::Finite(2));
        assert_eq!(c.points, vec![[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]);
        assert_eq!(c.class.to_string(), "LEVEL_TRUNCATED(ALLZERO,upper)");
    }

    #[test]
    fn unsorted_base_uses_caller_coordinates() {
        let c = classify_cell([3, 1, 1], Level::Infinite);
        assert_eq!(c.points, vec![[0, 0, 1], [0, 1, 0], [0, 1, 1], [1, 1, 1]]);
        assert_eq!(c.class, CellClass::Primitive(PrimitiveClass::N3Minus1));
    }

    #[test]
    fn class_sizes() {
        for c in PrimitiveClass::NONEMPTY {
            let cell = classify_cell(c.representative(), Level::Infinite);
            assert_eq!(cell.class, CellClass::Primitive(c));
            assert_eq!(cell.points.len(), c.size());
        }
    }

    #[test]
    fn symmetries_are_unimodular() {
        let syms = cube_symmetries();
        assert_eq!(syms.len(), 48);
        for g in &syms {
            assert_eq!(g.determinant().abs(), 1);
            let mut img: Vec<Point> = unit_cube().into_iter().map(|p| g.apply(p)).collect();
            img.sort_unstable();
            assert_eq!(img, unit_cube());
        }
    }

    #[test]
    fn normal_form_examples() {
        let allzero = classify_cell([0, 0, 0], Level::Infinite).points;
        let reflected: Vec<Point> = allzero.iter().map(|p| p.map(|x| 1 - x)).collect();
        assert_eq!(lattice_normal_form(&allzero).0, lattice_normal_form(&reflected).0);
        let (nf, g) = lattice_normal_form(&reflected);
        let mut img: Vec<Point> = reflected.iter().map(|&p| g.apply(p)).collect();
        img.sort_unstable();
        assert_eq!(img, nf);

        let tetra = classify_cell([0, 0, 0], Level::Finite(2)).points;
        assert_ne!(lattice_normal_form(&allzero).0, lattice_normal_form(&tetra).0);
    }

    #[test]
    fn normality_examples() {
        let allzero = classify_cell([0, 0, 0], Level::Infinite).points;
        assert!(is_normal(&allzero, 4).is_normal());
        let tetra = classify_cell([0, 0, 0], Level::Finite(2)).points;
        assert_eq!(is_normal(&tetra, 2).witness, Some((2, [1, 1, 1])));
        let simplex = classify_cell([1, 1, 3], Level::Infinite).points;
        assert!(is_normal(&simplex, 4).is_normal());
    }

    #[test]
    fn catalog_forms_are_distinct() {
        let cat = catalog();
        assert_eq!(cat.len(), 8);
        for (i, (_, a)) in cat.iter().enumerate() {
            for (_, b) in &cat[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn small_sweep_matches_catalog() {
        let census = sweep(3, &[Level::Infinite, Level::Finite(4)], 3);
        assert!(census.entries.iter().all(|e| e.form.is_some()));
        assert!(census.entries.iter().all(|e| e.normality.is_normal()));
        assert!(census.empty_cells > 0);
    }

    #[test]
    fn ip3_examples() {
        assert_eq!(ip3(1).unwrap(), vec![[0, 0, 0]]);
        let v5 = ip3(5).unwrap();
        assert_eq!(v5.len(), 7);
        assert!(v5.contains(&[2, 2, 0]) && v5.contains(&[1, 2, 2]));
        for l in [1, 3, 5, 7] {
            assert_eq!(ip3(l).unwrap(), ip3_brute_force(l).unwrap(), "L={l}");
        }
        assert_eq!(ip3(4), Err(CubeError::EvenLevel(4)));
    }

    #[test]
    fn omega_examples() {
        assert_eq!(in_omega([1, 1, 0], 2, 1), Ok(true));
        assert_eq!(in_omega([2, 2, 0], 1, 5), Ok(false));
        assert_eq!(in_omega([5, 5, 0], 2, 5), Ok(true));
        assert_eq!(in_omega([4, 4, 2], 2, 5), Ok(false));
        assert!(in_omega([1, 1, 3], 1, 5).is_err());
    }

    /// `q` is a sum of `k` integral points of `P_3(level)`.
    fn factors(q: Point, k: u64, pts: &[Point]) -> bool {
        if k == 0 {
            return q == [0, 0, 0];
        }
        pts.iter().any(|&p| {
            let r = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
            r.iter().all(|&x| x >= 0) && factors(r, k - 1, pts)
        })
    }

    #[test]
    fn omega_free_points_factor() {
        for level in [3, 5] {
            let pts = p3_lattice_points(level);
            for k in 1..=3u64 {
                for q in p3_lattice_points(level * k) {
                    let qu = q.map(|x| x as u64);
                    if !in_omega(qu, k, level).unwrap() {
                        assert!(factors(q, k, &pts), "L={level} k={k} q={q:?}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn points_match_predicate(m in proptest::array::uniform3(0i64..8), l in 1u64..12) {
            let cell = classify_cell(m, Level::Finite(2 * l));
            let expected: Vec<Point> = unit_cube().into_iter().filter(|&p| {
                let q = add(m, p);
                let [a, b, c] = q;
                a + b >= c && a + c >= b && b + c >= a && a + b + c <= 2 * l as i64
            }).collect();
            prop_assert_eq!(&cell.points, &expected);
            prop_assert_eq!(cell.points.is_empty(), cell.class.is_empty());
        }

        #[test]
        fn facet_vertices_have_even_sum(m in proptest::array::uniform3(0i64..8), l in 1u64..12) {
            let cell = classify_cell(m, Level::Finite(2 * l));
            for q in cell.absolute_points() {
                let s: i64 = q.iter().sum();
                if q.iter().any(|&x| s == 2 * x) {
                    prop_assert_eq!(s % 2, 0);
                }
            }
            // every cell lies in P_3(2L)
            let p3 = Hull::new(&[[0, 0, 0], [l as i64, l as i64, 0], [l as i64, 0, l as i64], [0, l as i64, l as i64]]).unwrap();
            for q in cell.absolute_points() {
                prop_assert!(p3.contains(q));
            }
        }

        #[test]
        fn normal_form_is_invariant(mask in 1u8..=255, g in 0usize..48) {
            let pts: Vec<Point> = unit_cube().into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p).collect();
            let sym = cube_symmetries()[g];
            let img: Vec<Point> = pts.iter().map(|&p| sym.apply(p)).collect();
            prop_assert_eq!(lattice_normal_form(&pts).0, lattice_normal_form(&img).0);
        }
    }
}
