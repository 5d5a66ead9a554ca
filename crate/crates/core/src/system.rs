//! Edge constraint systems: the common shape of every semigroup handled
//! here. A system fixes which edge triples meet at trinodes, whether
//! trinode sums must be even, a per-degree bound on trinode sums, and a
//! per-degree rule on individual edges.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

/// A per-degree constraint on a single edge; in degree `k` the bounds are
/// multiplied by `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeRule {
    Free,
    /// A leaf grade: the value is exactly `k * c`.
    Fixed(u64),
    /// A stalk range `k * lo ..= k * hi`.
    Range { lo: u64, hi: u64 },
    /// Only zero, and only in degree 0.
    Empty,
}

impl EdgeRule {
    /// Bounds in degree `k`, `None` when nothing is allowed.
    pub fn bounds(self, k: u64) -> Option<(u64, Option<u64>)> {
        match self {
            EdgeRule::Free => Some((0, None)),
            EdgeRule::Fixed(c) => Some((k * c, Some(k * c))),
            EdgeRule::Range { lo, hi } => Some((k * lo, Some(k * hi))),
            EdgeRule::Empty if k == 0 => Some((0, Some(0))),
            EdgeRule::Empty => None,
        }
    }

    pub fn intersect(self, other: EdgeRule) -> EdgeRule {
        use EdgeRule::*;
        let (lo, hi) = match (self, other) {
            (Empty, _) | (_, Empty) => return Empty,
            (Free, r) | (r, Free) => return r,
            (Fixed(a), Fixed(b)) => return if a == b { Fixed(a) } else { Empty },
            (Fixed(c), Range { lo, hi }) | (Range { lo, hi }, Fixed(c)) => {
                return if (lo..=hi).contains(&c) { Fixed(c) } else { Empty }
            }
            (Range { lo: a, hi: b }, Range { lo: c, hi: d }) => (a.max(c), b.min(d)),
        };
        if lo > hi {
            Empty
        } else {
            Range { lo, hi }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SysTrinode {
    pub name: String,
    pub edges: [usize; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    Triangle,
    Parity,
    Grade,
    Level,
    Stalk,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Triangle => "triangle",
            ViolationKind::Parity => "parity",
            ViolationKind::Grade => "grade",
            ViolationKind::Level => "level",
            ViolationKind::Stalk => "stalk",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Site {
    Trinode(String),
    Edge(String),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Trinode(v) => write!(f, "trinode {v}"),
            Site::Edge(e) => write!(f, "edge {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Error)]
#[error("{kind} violated at {site}")]
pub struct Violation {
    pub kind: ViolationKind,
    pub site: Site,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("expected {expected} edge values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("edge {0} has no upper bound; enumeration needs a finite level or rule")]
    Unbounded(String),
}

/// Inclusive absolute bounds per edge, intersected with the rules.
pub type Window = [(u64, u64)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    edge_names: Vec<String>,
    trinodes: Vec<SysTrinode>,
    parity: bool,
    level: Option<u64>,
    rules: Vec<EdgeRule>,
    edge_trinodes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
struct Plan {
    root: usize,
    /// Trinodes in pre-order with parent edge and child edges.
    order: Vec<(usize, usize, [usize; 2])>,
    /// The trinode below each edge, seen from the root.
    below: Vec<Option<usize>>,
}

impl ConstraintSystem {
    /// `level` bounds every trinode sum by `level * k` in degree `k`.
    pub fn new(
        edge_names: Vec<String>,
        trinodes: Vec<SysTrinode>,
        parity: bool,
        level: Option<u64>,
        rules: Vec<EdgeRule>,
    ) -> Self {
        assert_eq!(edge_names.len(), rules.len());
        let mut edge_trinodes = vec![Vec::new(); edge_names.len()];
        for (t, tri) in trinodes.iter().enumerate() {
            for &e in &tri.edges {
                edge_trinodes[e].push(t);
            }
        }
        assert!(edge_trinodes.iter().all(|ts| ts.len() <= 2));
        assert!(
            !trinodes.is_empty() || edge_names.len() == 1,
            "a system without trinodes has exactly one edge"
        );
        Self {
            edge_names,
            trinodes,
            parity,
            level,
            rules,
            edge_trinodes,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edge_names[e]
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edge_names
    }

    pub fn trinodes(&self) -> &[SysTrinode] {
        &self.trinodes
    }

    pub fn parity(&self) -> bool {
        self.parity
    }

    pub fn level(&self) -> Option<u64> {
        self.level
    }

    pub fn rule(&self, e: usize) -> EdgeRule {
        self.rules[e]
    }

    pub fn rules(&self) -> &[EdgeRule] {
        &self.rules
    }

    /// Trinodes containing edge `e` (at most two).
    pub fn trinodes_at(&self, e: usize) -> &[usize] {
        &self.edge_trinodes[e]
    }

    pub fn is_boundary(&self, e: usize) -> bool {
        self.edge_trinodes[e].len() <= 1
    }

    /// Edges reachable from `e` without passing through trinode `t`,
    /// including `e` itself.
    pub fn branch(&self, t: usize, e: usize) -> Vec<usize> {
        let mut seen = vec![false; self.edge_count()];
        let mut stack = vec![e];
        seen[e] = true;
        let mut out = Vec::new();
        while let Some(x) = stack.pop() {
            out.push(x);
            for &s in &self.edge_trinodes[x] {
                if s == t {
                    continue;
                }
                for &y in &self.trinodes[s].edges {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn valid(&self, x: u64, y: u64, z: u64, k: u64) -> bool {
        z <= x + y
            && x <= y + z
            && y <= x + z
            && (!self.parity || (x + y + z).is_multiple_of(2))
            && self.level.is_none_or(|l| x + y + z <= l * k)
    }

    /// First violated condition, checked in the order triangle, parity,
    /// grade, level, stalk.
    pub fn check(&self, values: &[u64], k: u64) -> Result<Result<(), Violation>, SystemError> {
        if values.len() != self.edge_count() {
            return Err(SystemError::Length {
                expected: self.edge_count(),
                got: values.len(),
            });
        }
        let tri = |t: &SysTrinode| t.edges.map(|e| values[e]);
        let at_trinode = |kind, t: &SysTrinode| Violation {
            kind,
            site: Site::Trinode(t.name.clone()),
        };
        let at_edge = |kind, e: usize| Violation {
            kind,
            site: Site::Edge(self.edge_names[e].clone()),
        };
        for t in &self.trinodes {
            let [x, y, z] = tri(t);
            if !(z <= x + y && x <= y + z && y <= x + z) {
                return Ok(Err(at_trinode(ViolationKind::Triangle, t)));
            }
        }
        if self.parity {
            if let Some(t) = self.trinodes.iter().find(|t| tri(t).iter().sum::<u64>() % 2 == 1) {
                return Ok(Err(at_trinode(ViolationKind::Parity, t)));
            }
        }
        for (e, rule) in self.rules.iter().enumerate() {
            if let EdgeRule::Fixed(c) = rule {
                if values[e] != k * c {
                    return Ok(Err(at_edge(ViolationKind::Grade, e)));
                }
            }
        }
        if k == 0 {
            if let Some(e) = values.iter().position(|&v| v != 0) {
                return Ok(Err(at_edge(ViolationKind::Grade, e)));
            }
        }
        if let Some(l) = self.level {
            if let Some(t) = self.trinodes.iter().find(|t| tri(t).iter().sum::<u64>() > l * k) {
                return Ok(Err(at_trinode(ViolationKind::Level, t)));
            }
        }
        for (e, rule) in self.rules.iter().enumerate() {
            let ok = match rule.bounds(k) {
                None => false,
                Some((lo, hi)) => values[e] >= lo && hi.is_none_or(|h| values[e] <= h),
            };
            if !ok {
                return Ok(Err(at_edge(ViolationKind::Stalk, e)));
            }
        }
        Ok(Ok(()))
    }

    pub fn is_member(&self, values: &[u64], k: u64) -> bool {
        matches!(self.check(values, k), Ok(Ok(())))
    }

    fn plan(&self) -> Plan {
        let root = (0..self.edge_count())
            .find(|&e| self.is_boundary(e))
            .expect("a finite tree has a boundary edge");
        let mut below = vec![None; self.edge_count()];
        let mut order = Vec::new();
        if let Some(&t0) = self.edge_trinodes[root].first() {
            let mut stack = vec![(t0, root)];
            while let Some((t, parent)) = stack.pop() {
                below[parent] = Some(t);
                let kids: Vec<usize> = self.trinodes[t]
                    .edges
                    .iter()
                    .copied()
                    .filter(|&e| e != parent)
                    .collect();
                order.push((t, parent, [kids[0], kids[1]]));
                for &c in kids.iter().rev() {
                    if let Some(&s) = self.edge_trinodes[c].iter().find(|&&s| s != t) {
                        stack.push((s, c));
                    }
                }
            }
        }
        Plan { root, order, below }
    }

    /// Per-edge bounds in degree `k`, after windows; `None` if some edge
    /// admits nothing.
    fn edge_bounds(&self, k: u64, window: Option<&Window>) -> Result<Option<Vec<(u64, u64)>>, SystemError> {
        let level_cap = self.level.map(|l| l * k);
        let mut out = Vec::with_capacity(self.edge_count());
        let mut boundary_total = 0u64;
        for e in 0..self.edge_count() {
            if let (true, Some((_, Some(hi)))) = (self.is_boundary(e), self.rules[e].bounds(k)) {
                boundary_total += hi;
            }
        }
        for e in 0..self.edge_count() {
            let Some((mut lo, hi)) = self.rules[e].bounds(k) else {
                return Ok(None);
            };
            let mut hi = match (hi, level_cap) {
                (Some(h), Some(c)) => h.min(c),
                (Some(h), None) => h,
                (None, Some(c)) => c,
                (None, None) if self.is_boundary(e) => {
                    return Err(SystemError::Unbounded(self.edge_names[e].clone()))
                }
                (None, None) => u64::MAX,
            };
            if !self.is_boundary(e) {
                hi = hi.min(boundary_total);
            }
            if let Some(w) = window {
                lo = lo.max(w[e].0);
                hi = hi.min(w[e].1);
            }
            if lo > hi {
                return Ok(None);
            }
            out.push((lo, hi));
        }
        Ok(Some(out))
    }

    /// For every edge, the values realizable by the subtree below it.
    fn feasible(&self, plan: &Plan, k: u64, bounds: &[(u64, u64)]) -> Vec<Vec<u64>> {
        let mut feas: Vec<Vec<u64>> = vec![Vec::new(); self.edge_count()];
        for e in 0..self.edge_count() {
            if plan.below[e].is_none() {
                feas[e] = (bounds[e].0..=bounds[e].1).collect();
            }
        }
        for &(_, parent, [c1, c2]) in plan.order.iter().rev() {
            let (lo, hi) = bounds[parent];
            let mut hit = vec![false; (hi - lo + 1) as usize];
            for &x in &feas[c1] {
                for &y in &feas[c2] {
                    let start = x.abs_diff(y).max(lo);
                    let end = (x + y).min(hi);
                    let mut z = start;
                    if self.parity && (x + y + z) % 2 == 1 {
                        z += 1;
                    }
                    let step = if self.parity { 2 } else { 1 };
                    while z <= end {
                        if self.level.is_none_or(|l| x + y + z <= l * k) {
                            hit[(z - lo) as usize] = true;
                        }
                        z += step;
                    }
                }
            }
            feas[parent] = hit
                .iter()
                .enumerate()
                .filter(|(_, &h)| h)
                .map(|(i, _)| lo + i as u64)
                .collect();
        }
        feas
    }

    /// Visits every member of degree `k` inside the optional window.
    pub fn for_each<F: FnMut(&[u64])>(&self, k: u64, window: Option<&Window>, mut f: F) -> Result<(), SystemError> {
        let Some(bounds) = self.edge_bounds(k, window)? else {
            return Ok(());
        };
        let plan = self.plan();
        let feas = self.feasible(&plan, k, &bounds);
        let mut values = vec![0u64; self.edge_count()];
        for &z in &feas[plan.root] {
            values[plan.root] = z;
            self.descend(&plan, &feas, k, 0, &mut values, &mut f);
        }
        Ok(())
    }

    fn descend<F: FnMut(&[u64])>(
        &self,
        plan: &Plan,
        feas: &[Vec<u64>],
        k: u64,
        i: usize,
        values: &mut Vec<u64>,
        f: &mut F,
    ) {
        let Some(&(_, parent, [c1, c2])) = plan.order.get(i) else {
            f(values);
            return;
        };
        let z = values[parent];
        for &x in &feas[c1] {
            for &y in &feas[c2] {
                if self.valid(x, y, z, k) {
                    values[c1] = x;
                    values[c2] = y;
                    self.descend(plan, feas, k, i + 1, values, f);
                }
            }
        }
    }

    /// All members of degree `k` in the window, sorted lexicographically.
    pub fn enumerate(&self, k: u64, window: Option<&Window>) -> Result<Vec<Vec<u64>>, SystemError> {
        let Some(bounds) = self.edge_bounds(k, window)? else {
            return Ok(Vec::new());
        };
        let plan = self.plan();
        let feas = self.feasible(&plan, k, &bounds);
        let mut out: Vec<Vec<u64>> = feas[plan.root]
            .par_iter()
            .flat_map_iter(|&z| {
                let mut local = Vec::new();
                let mut values = vec![0u64; self.edge_count()];
                values[plan.root] = z;
                self.descend(&plan, &feas, k, 0, &mut values, &mut |v: &[u64]| local.push(v.to_vec()));
                local
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Number of members of degree `k`, by dynamic programming over the
    /// same plan as `enumerate`.
    pub fn count(&self, k: u64) -> Result<u128, SystemError> {
        let Some(bounds) = self.edge_bounds(k, None)? else {
            return Ok(0);
        };
        let plan = self.plan();
        let feas = self.feasible(&plan, k, &bounds);
        // counts[e][v - lo] = completions of the subtree below e given value v
        let mut counts: Vec<Vec<u128>> = vec![Vec::new(); self.edge_count()];
        for e in 0..self.edge_count() {
            if plan.below[e].is_none() {
                counts[e] = vec![1; (bounds[e].1 - bounds[e].0 + 1) as usize];
            }
        }
        for &(_, parent, [c1, c2]) in plan.order.iter().rev() {
            let (lo, hi) = bounds[parent];
            let mut acc = vec![0u128; (hi - lo + 1) as usize];
            for &z in &feas[parent] {
                let mut total = 0;
                for &x in &feas[c1] {
                    for &y in &feas[c2] {
                        if self.valid(x, y, z, k) {
                            total += counts[c1][(x - bounds[c1].0) as usize] * counts[c2][(y - bounds[c2].0) as usize];
                        }
                    }
                }
                acc[(z - lo) as usize] = total;
            }
            counts[parent] = acc;
        }
        let root = plan.root;
        Ok(feas[root]
            .iter()
            .map(|&z| counts[root][(z - bounds[root].0) as usize])
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("e{i}")).collect()
    }

    /// Four-leaf caterpillar: leaves e0 e1 at t0, e3 e4 at t1, inner e2.
    fn caterpillar4(parity: bool, level: Option<u64>, leaves: [u64; 4]) -> ConstraintSystem {
        let trinodes = vec![
            SysTrinode {
                name: "u".into(),
                edges: [0, 1, 2],
            },
            SysTrinode {
                name: "v".into(),
                edges: [2, 3, 4],
            },
        ];
        let rules = vec![
            EdgeRule::Fixed(leaves[0]),
            EdgeRule::Fixed(leaves[1]),
            EdgeRule::Free,
            EdgeRule::Fixed(leaves[2]),
            EdgeRule::Fixed(leaves[3]),
        ];
        ConstraintSystem::new(names(5), trinodes, parity, level, rules)
    }

    /// Independent oracle: scan the whole box.
    fn brute(sys: &ConstraintSystem, k: u64, cap: u64) -> Vec<Vec<u64>> {
        let n = sys.edge_count();
        let mut out = Vec::new();
        let mut v = vec![0u64; n];
        loop {
            if sys.is_member(&v, k) {
                out.push(v.clone());
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if v[i] < cap {
                    v[i] += 1;
                    break;
                }
                v[i] = 0;
            }
        }
    }

    #[test]
    fn caterpillar_counts_are_k_plus_one() {
        let sys = caterpillar4(true, None, [1, 1, 1, 1]);
        for k in 0..=4 {
            assert_eq!(sys.count(k).unwrap(), (k + 1) as u128);
            assert_eq!(sys.enumerate(k, None).unwrap().len(), (k + 1) as usize);
        }
    }

    #[test]
    fn first_violation_order() {
        let sys = caterpillar4(true, Some(2), [1, 1, 1, 1]);
        let v = sys.check(&[1, 1, 1, 1, 1], 1).unwrap().unwrap_err();
        assert_eq!(v.kind, ViolationKind::Parity);
        let v = sys.check(&[1, 1, 3, 1, 1], 1).unwrap().unwrap_err();
        assert_eq!(v.kind, ViolationKind::Triangle);
        let v = sys.check(&[2, 2, 2, 2, 2], 1).unwrap().unwrap_err();
        assert_eq!(v.kind, ViolationKind::Grade);
        let v = sys.check(&[1, 1, 2, 1, 1], 1).unwrap().unwrap_err();
        assert_eq!(v.kind, ViolationKind::Level);
        assert_eq!(v.site, Site::Trinode("u".into()));
        assert!(sys.check(&[1, 1], 1).is_err());
    }

    #[test]
    fn rule_intersection() {
        use EdgeRule::*;
        assert_eq!(Range { lo: 0, hi: 3 }.intersect(Range { lo: 2, hi: 5 }), Range { lo: 2, hi: 3 });
        assert_eq!(Range { lo: 0, hi: 1 }.intersect(Range { lo: 2, hi: 5 }), Empty);
        assert_eq!(Fixed(2).intersect(Range { lo: 2, hi: 5 }), Fixed(2));
        assert_eq!(Free.intersect(Fixed(1)), Fixed(1));
        assert_eq!(Empty.bounds(0), Some((0, Some(0))));
        assert_eq!(Empty.bounds(1), None);
    }

    #[test]
    fn branches() {
        let sys = caterpillar4(true, None, [1, 1, 1, 1]);
        assert_eq!(sys.branch(0, 2), vec![2, 3, 4]);
        assert_eq!(sys.branch(0, 0), vec![0]);
        assert_eq!(sys.branch(1, 2), vec![0, 1, 2]);
    }

    #[test]
    fn unbounded_boundary_is_an_error() {
        let sys = ConstraintSystem::new(
            names(3),
            vec![SysTrinode {
                name: "x".into(),
                edges: [0, 1, 2],
            }],
            false,
            None,
            vec![EdgeRule::Free; 3],
        );
        assert!(matches!(sys.enumerate(1, None), Err(SystemError::Unbounded(_))));
    }

    proptest! {
        #[test]
        fn enumeration_matches_box_scan(
            leaves in proptest::array::uniform4(0u64..3),
            parity in any::<bool>(),
            level in prop::option::of(1u64..5),
            k in 0u64..3,
        ) {
            let sys = caterpillar4(parity, level, leaves);
            let cap = k * leaves.iter().sum::<u64>();
            let fast = sys.enumerate(k, None).unwrap();
            prop_assert_eq!(&fast, &brute(&sys, k, cap));
            prop_assert_eq!(sys.count(k).unwrap(), fast.len() as u128);
            let mut seen = 0;
            sys.for_each(k, None, |_| seen += 1).unwrap();
            prop_assert_eq!(seen, fast.len());
        }

        #[test]
        fn windows_filter(
            leaves in proptest::array::uniform4(0u64..3),
            k in 1u64..3,
            inner in 0u64..6,
        ) {
            let sys = caterpillar4(false, None, leaves);
            let mut window = vec![(0, u64::MAX); 5];
            window[2] = (inner, inner);
            let got = sys.enumerate(k, Some(&window)).unwrap();
            let expected: Vec<_> = sys
                .enumerate(k, None)
                .unwrap()
                .into_iter()
                .filter(|v| v[2] == inner)
                .collect();
            prop_assert_eq!(got, expected);
        }
    }
}
