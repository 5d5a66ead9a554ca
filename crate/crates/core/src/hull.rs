//! Exact convex hulls of small integer point sets in three dimensions.
//!
//! A hull is stored as affine equalities plus facet inequalities with
//! integer coefficients, so membership of a rational point `p / den` is a
//! handful of integer comparisons.

pub type Point = [i64; 3];

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: Point, b: Point) -> i128 {
    (0..3).map(|i| a[i] as i128 * b[i] as i128).sum()
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn primitive(v: Point) -> Point {
    let g = gcd(gcd(v[0], v[1]), v[2]);
    if g == 0 {
        v
    } else {
        v.map(|x| x / g)
    }
}

/// `a . x <= c` (or `=` for equalities).
type Halfspace = (Point, i128);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hull {
    dimension: usize,
    equalities: Vec<Halfspace>,
    inequalities: Vec<Halfspace>,
}

impl Hull {
    /// The hull of a nonempty point set.
    pub fn new(points: &[Point]) -> Option<Hull> {
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        let &p0 = pts.first()?;
        let dirs: Vec<Point> = pts.iter().map(|&p| sub(p, p0)).collect();
        let d1 = dirs.iter().copied().find(|&d| d != [0, 0, 0]);
        let Some(d1) = d1 else {
            let equalities = (0..3)
                .map(|i| {
                    let mut e = [0; 3];
                    e[i] = 1;
                    (e, p0[i] as i128)
                })
                .collect();
            return Some(Hull {
                dimension: 0,
                equalities,
                inequalities: Vec::new(),
            });
        };
        let d2 = dirs.iter().copied().find(|&d| cross(d1, d) != [0, 0, 0]);
        let Some(d2) = d2 else {
            let axis = (0..3)
                .map(|i| {
                    let mut e = [0; 3];
                    e[i] = 1;
                    cross(d1, e)
                })
                .find(|&n| n != [0, 0, 0])
                .unwrap();
            let n1 = primitive(axis);
            let n2 = primitive(cross(d1, n1));
            let along: Vec<i128> = pts.iter().map(|&p| dot(d1, p)).collect();
            let neg = d1.map(|x| -x);
            return Some(Hull {
                dimension: 1,
                equalities: vec![(n1, dot(n1, p0)), (n2, dot(n2, p0))],
                inequalities: vec![(d1, *along.iter().max().unwrap()), (neg, -*along.iter().min().unwrap())],
            });
        };
        let normal = primitive(cross(d1, d2));
        if dirs.iter().all(|&d| dot(normal, d) == 0) {
            let mut inequalities = Vec::new();
            for (i, &a) in pts.iter().enumerate() {
                for &b in &pts[i + 1..] {
                    let m = primitive(cross(normal, sub(b, a)));
                    Self::push_supporting(&pts, m, a, &mut inequalities);
                }
            }
            return Some(Hull {
                dimension: 2,
                equalities: vec![(normal, dot(normal, p0))],
                inequalities,
            });
        }
        let mut inequalities = Vec::new();
        for (i, &a) in pts.iter().enumerate() {
            for (j, &b) in pts.iter().enumerate().skip(i + 1) {
                for &c in &pts[j + 1..] {
                    let n = primitive(cross(sub(b, a), sub(c, a)));
                    if n != [0, 0, 0] {
                        Self::push_supporting(&pts, n, a, &mut inequalities);
                    }
                }
            }
        }
        Some(Hull {
            dimension: 3,
            equalities: Vec::new(),
            inequalities,
        })
    }

    /// Adds `n . x <= n . a` or its negation if all points lie on one side.
    fn push_supporting(pts: &[Point], n: Point, a: Point, out: &mut Vec<Halfspace>) {
        let c = dot(n, a);
        let (mut below, mut above) = (true, true);
        for &p in pts {
            let v = dot(n, p);
            below &= v <= c;
            above &= v >= c;
        }
        let h = if below && !above {
            (n, c)
        } else if above && !below {
            (n.map(|x| -x), -c)
        } else {
            return;
        };
        if !out.contains(&h) {
            out.push(h);
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn contains(&self, p: Point) -> bool {
        self.contains_scaled(p, 1)
    }

    /// Whether `p / den` lies in the hull; `den > 0`.
    pub fn contains_scaled(&self, p: Point, den: i64) -> bool {
        assert!(den > 0);
        let den = den as i128;
        self.equalities.iter().all(|&(a, c)| dot(a, p) == c * den)
            && self.inequalities.iter().all(|&(a, c)| dot(a, p) <= c * den)
    }
}

/// The points of `points` that are vertices of its hull, sorted.
pub fn vertices(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    pts.iter()
        .copied()
        .filter(|&p| {
            let others: Vec<Point> = pts.iter().copied().filter(|&q| q != p).collect();
            Hull::new(&others).is_none_or(|h| !h.contains(p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cube() -> Vec<Point> {
        let mut v = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    v.push([x, y, z]);
                }
            }
        }
        v
    }

    #[test]
    fn unit_cube() {
        let h = Hull::new(&cube()).unwrap();
        assert_eq!(h.dimension(), 3);
        assert!(h.contains_scaled([1, 1, 1], 2));
        assert!(!h.contains_scaled([3, 1, 1], 2));
        assert_eq!(vertices(&cube()).len(), 8);
    }

    #[test]
    fn low_dimensional() {
        let point = Hull::new(&[[1, 2, 3]]).unwrap();
        assert_eq!(point.dimension(), 0);
        assert!(point.contains([1, 2, 3]));
        assert!(!point.contains([1, 2, 4]));

        let seg = Hull::new(&[[1, 0, 0], [0, 1, 0]]).unwrap();
        assert_eq!(seg.dimension(), 1);
        assert!(seg.contains_scaled([1, 1, 0], 2));
        assert!(!seg.contains_scaled([1, 1, 1], 2));
        assert!(!seg.contains([2, -1, 0]));

        let tri = Hull::new(&[[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]]).unwrap();
        assert_eq!(tri.dimension(), 2);
        assert!(tri.contains_scaled([1, 1, 0], 2));
        assert!(!tri.contains_scaled([1, 1, 1], 2));
        assert!(!tri.contains_scaled([3, 1, 0], 2));
        assert_eq!(vertices(&[[0, 0, 0], [2, 0, 0], [1, 0, 0]]), vec![[0, 0, 0], [2, 0, 0]]);
    }

    #[test]
    fn tetrahedron_center() {
        let t = [[0, 0, 0], [1, 1, 0], [1, 0, 1], [0, 1, 1]];
        let h = Hull::new(&t).unwrap();
        assert!(h.contains_scaled([1, 1, 1], 2));
        assert!(!h.contains([1, 1, 1]));
    }

    proptest! {
        /// The only lattice points of a 0/1 polytope are its own points,
        /// and pairwise sums always lie in the doubled hull.
        #[test]
        fn subset_membership(mask in 1u8..=255, p in proptest::array::uniform3(0i64..=4)) {
            let pts: Vec<Point> = cube().into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p).collect();
            let h = Hull::new(&pts).unwrap();
            prop_assert_eq!(h.contains(p), pts.contains(&p));
            let (a, b) = (pts[(p[0] as usize) % pts.len()], pts[(p[1] as usize) % pts.len()]);
            prop_assert!(h.contains_scaled([a[0] + b[0], a[1] + b[1], a[2] + b[2]], 2));
        }
    }
}
