//! Constructive degree-one factorization and relation certificates.
//!
//! Everything runs on the clipped-tree semigroup: full-tree inputs with
//! halvable weights are halved first. Locally a degree-`k` trinode weight
//! splits into floor/ceiling candidates; the local splits glue along shared
//! edges because balanced multisets are determined by size and sum.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::cube::unit_cube;
use crate::hull::Point;
use crate::oracle;
use crate::relations::{restrict_graver, Binomial};
use crate::system::{ConstraintSystem, EdgeRule, Violation};
use crate::tree::forced_edge_parities;
use crate::weighting::{check_triangle, SemigroupSpec, SpecError, TrinodeWeight, Verdict, Weighting};
use crate::Variant;

/// Where a rewrite step acts, or where an obstruction sits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StepSite {
    Global,
    Trinode(String),
    Edge(String),
}

impl fmt::Display for StepSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepSite::Global => f.write_str("GLOBAL"),
            StepSite::Trinode(v) => f.write_str(v),
            StepSite::Edge(e) => f.write_str(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("no degree-1 factorization (obstruction at {site})")]
    NoFactorization { site: StepSite },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("not a member: {0}")]
    NotMember(Violation),
    #[error("factor of degree {0}, expected 1")]
    NotDegreeOne(u64),
    #[error("the two sides have different sizes or sums")]
    SumMismatch,
    #[error("edge values cannot be matched across {edge}")]
    MatchingFailure { edge: String },
    #[error("certificate stuck at {site}")]
    CertificateStuck { site: StepSite },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Constructive,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Constructive => "constructive",
            Method::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationResult {
    pub factors: Vec<Weighting>,
    pub method: Method,
}

/// All triples with entries `floor(q_i/k)` or `ceil(q_i/k)` that satisfy the
/// triangle inequalities and the degree-one level bound, in lexicographic
/// order.
pub fn floor_ceiling_candidates(q: TrinodeWeight, level: Option<u64>) -> Vec<[u64; 3]> {
    let k = q.degree;
    if k == 0 {
        return Vec::new();
    }
    let lo = q.values.map(|x| x / k);
    let hi = q.values.map(|x| x.div_ceil(k));
    let mut out = Vec::new();
    for a in lo[0]..=hi[0] {
        for b in lo[1]..=hi[1] {
            for c in lo[2]..=hi[2] {
                let w = [a, b, c];
                if check_triangle(w) && level.is_none_or(|l| a + b + c <= l) {
                    out.push(w);
                }
            }
        }
    }
    out
}

/// `k` floor/ceiling candidates summing to `q`, the first in nondecreasing
/// candidate order; `None` when no such split exists.
pub fn factor_trinode(q: TrinodeWeight, level: Option<u64>) -> Option<Vec<[u64; 3]>> {
    fn go(cands: &[[u64; 3]], start: usize, rest: [u64; 3], left: u64, out: &mut Vec<[u64; 3]>) -> bool {
        if left == 0 {
            return rest == [0, 0, 0];
        }
        for (i, &c) in cands.iter().enumerate().skip(start) {
            if (0..3).all(|j| c[j] <= rest[j]) {
                out.push(c);
                if go(cands, i, [0, 1, 2].map(|j| rest[j] - c[j]), left - 1, out) {
                    return true;
                }
                out.pop();
            }
        }
        false
    }
    let cands = floor_ceiling_candidates(q, level);
    let mut out = Vec::new();
    go(&cands, 0, q.values, q.degree, &mut out).then_some(out)
}

/// Whether `q` splits into `q.degree` arbitrary lattice points that each
/// satisfy the degree-one conditions of trinode `t`.
fn local_factorable(sys: &ConstraintSystem, t: usize, q: TrinodeWeight) -> bool {
    let edges = sys.trinodes()[t].edges;
    let rules: [EdgeRule; 3] = edges.map(|e| sys.rule(e));
    let mut points = Vec::new();
    for a in 0..=q.values[0] {
        for b in 0..=q.values[1] {
            for c in 0..=q.values[2] {
                let p = [a, b, c];
                let ok_rules = (0..3).all(|i| match rules[i].bounds(1) {
                    None => false,
                    Some((lo, hi)) => p[i] >= lo && hi.is_none_or(|h| p[i] <= h),
                });
                if check_triangle(p)
                    && ok_rules
                    && (!sys.parity() || (a + b + c) % 2 == 0)
                    && sys.level().is_none_or(|l| a + b + c <= l)
                {
                    points.push(p);
                }
            }
        }
    }
    fn go(points: &[[u64; 3]], rest: [u64; 3], left: u64, memo: &mut HashMap<([u64; 3], u64), bool>) -> bool {
        if left == 0 {
            return rest == [0, 0, 0];
        }
        if let Some(&v) = memo.get(&(rest, left)) {
            return v;
        }
        let v = points
            .iter()
            .any(|p| (0..3).all(|j| p[j] <= rest[j]) && go(points, [0, 1, 2].map(|j| rest[j] - p[j]), left - 1, memo));
        memo.insert((rest, left), v);
        v
    }
    go(&points, q.values, q.degree, &mut HashMap::new())
}

/// Result of `balance_multiset`: one exchange of the min/max schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exchange {
    pub i: usize,
    pub j: usize,
    pub before: (u64, u64),
    pub after: (u64, u64),
}

fn argmin(xs: &[u64]) -> usize {
    (0..xs.len()).min_by_key(|&i| (xs[i], i)).unwrap()
}

fn argmax(xs: &[u64]) -> usize {
    (0..xs.len()).min_by_key(|&i| (std::cmp::Reverse(xs[i]), i)).unwrap()
}

/// Repeatedly replaces the current min and max by the floor and ceiling of
/// their average until the values differ by at most one.
pub fn balance_multiset(xs: &[u64]) -> (Vec<u64>, Vec<Exchange>) {
    let mut v = xs.to_vec();
    let mut log = Vec::new();
    if v.is_empty() {
        return (v, log);
    }
    loop {
        let (i, j) = (argmin(&v), argmax(&v));
        if v[j] - v[i] <= 1 {
            return (v, log);
        }
        let s = v[i] + v[j];
        let after = (s / 2, s - s / 2);
        log.push(Exchange {
            i,
            j,
            before: (v[i], v[j]),
            after,
        });
        (v[i], v[j]) = after;
    }
}

pub fn is_balanced_multiset(xs: &[u64]) -> bool {
    match (xs.iter().min(), xs.iter().max()) {
        (Some(a), Some(b)) => b - a <= 1,
        _ => true,
    }
}

/// Every edge's value multiset across `factors` is balanced.
pub fn is_balanced(factors: &[Weighting]) -> bool {
    let Some(first) = factors.first() else {
        return true;
    };
    (0..first.len()).all(|e| is_balanced_multiset(&factors.iter().map(|w| w.get(e)).collect::<Vec<_>>()))
}

/// Combines local floor/ceiling splits at every trinode into global
/// degree-one weightings by matching equal values on shared edges.
pub fn glue_factorizations(
    sys: &ConstraintSystem,
    omega: &Weighting,
    local: &[Vec<[u64; 3]>],
) -> Result<Vec<Weighting>, RewriteError> {
    let k = omega.degree() as usize;
    let n = sys.edge_count();
    let tris = sys.trinodes();
    assert_eq!(local.len(), tris.len());
    if tris.is_empty() {
        let v = omega.get(0);
        let kk = omega.degree();
        return Ok((0..kk)
            .map(|i| Weighting::new(vec![v / kk + u64::from(i >= kk - v % kk)], 1))
            .collect());
    }
    let mut values = vec![vec![0u64; n]; k];
    let mut placed = vec![false; tris.len()];
    for (i, f) in local[0].iter().enumerate() {
        for x in 0..3 {
            values[i][tris[0].edges[x]] = f[x];
        }
    }
    placed[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        for &e in &tris[t].edges {
            for &s in sys.trinodes_at(e) {
                if placed[s] {
                    continue;
                }
                let xs = tris[s].edges.iter().position(|&f| f == e).unwrap();
                let mut have: Vec<u64> = values.iter().map(|v| v[e]).collect();
                let mut want: Vec<u64> = local[s].iter().map(|f| f[xs]).collect();
                have.sort_unstable();
                want.sort_unstable();
                if have != want {
                    return Err(RewriteError::MatchingFailure {
                        edge: sys.edge_name(e).to_string(),
                    });
                }
                let mut used = vec![false; k];
                for f in &local[s] {
                    let i = (0..k).find(|&i| !used[i] && values[i][e] == f[xs]).unwrap();
                    used[i] = true;
                    for x in 0..3 {
                        values[i][tris[s].edges[x]] = f[x];
                    }
                }
                placed[s] = true;
                queue.push_back(s);
            }
        }
    }
    Ok(values.into_iter().map(|v| Weighting::new(v, 1)).collect())
}

fn check_member(spec: &SemigroupSpec, w: &Weighting) -> Result<(), RewriteError> {
    match spec.member(w)? {
        Verdict::Member => Ok(()),
        Verdict::NotMember(v) => Err(RewriteError::NotMember(v)),
    }
}

fn assert_factorization(spec: &SemigroupSpec, omega: &Weighting, factors: &[Weighting]) {
    assert_eq!(factors.len() as u64, omega.degree());
    for f in factors {
        assert_eq!(f.degree(), 1);
        assert!(spec.is_member(f), "factor is not a degree-1 member");
    }
    assert_eq!(&Weighting::sum(omega.len(), factors), omega, "factors do not sum to the input");
}

/// Factorization on a parity-free (clipped-tree) system.
fn factor_clipped(spec: &SemigroupSpec, omega: &Weighting) -> Result<FactorizationResult, RewriteError> {
    let sys = spec.system();
    let mut local = Vec::with_capacity(sys.trinodes().len());
    let mut stuck = false;
    for t in 0..sys.trinodes().len() {
        let q = spec.restrict(omega, t);
        match factor_trinode(q, sys.level()) {
            Some(f) => local.push(f),
            None if local_factorable(sys, t, q) => {
                stuck = true;
                break;
            }
            None => {
                return Err(RewriteError::NoFactorization {
                    site: StepSite::Trinode(sys.trinodes()[t].name.clone()),
                })
            }
        }
    }
    if !stuck {
        let factors = glue_factorizations(sys, omega, &local)?;
        if factors.iter().all(|f| spec.is_member(f)) {
            return Ok(FactorizationResult {
                factors,
                method: Method::Constructive,
            });
        }
    }
    oracle_factor(spec, omega)
}

fn oracle_factor(spec: &SemigroupSpec, omega: &Weighting) -> Result<FactorizationResult, RewriteError> {
    match oracle::find_factorization(spec, omega)? {
        Some(factors) => Ok(FactorizationResult {
            factors,
            method: Method::Oracle,
        }),
        None => Err(RewriteError::NoFactorization { site: StepSite::Global }),
    }
}

/// Writes a member of degree `k` as a sum of `k` degree-one members.
pub fn factor_weighting(spec: &SemigroupSpec, omega: &Weighting) -> Result<FactorizationResult, RewriteError> {
    check_member(spec, omega)?;
    let k = omega.degree();
    if k <= 1 {
        return Ok(FactorizationResult {
            factors: if k == 1 { vec![omega.clone()] } else { Vec::new() },
            method: Method::Constructive,
        });
    }
    let result = match spec.variant() {
        Variant::U => factor_clipped(spec, omega)?,
        Variant::S if spec.is_halvable() => {
            let half = spec.halved()?;
            let inner = factor_clipped(&half, &spec.halve(omega)?)?;
            FactorizationResult {
                factors: inner
                    .factors
                    .iter()
                    .map(|f| spec.unhalve(f))
                    .collect::<Result<_, _>>()?,
                method: inner.method,
            }
        }
        Variant::S => {
            let tree = spec.tree();
            if let Ok(parity) = forced_edge_parities(tree, spec.r()) {
                for e in 0..spec.edge_count() {
                    if parity[e] && omega.get(e) < k {
                        return Err(RewriteError::NoFactorization {
                            site: StepSite::Edge(tree.edge_name(e)),
                        });
                    }
                }
            }
            for t in 0..spec.system().trinodes().len() {
                if !local_factorable(spec.system(), t, spec.restrict(omega, t)) {
                    return Err(RewriteError::NoFactorization {
                        site: StepSite::Trinode(spec.system().trinodes()[t].name.clone()),
                    });
                }
            }
            oracle_factor(spec, omega)?
        }
    };
    assert_factorization(spec, omega, &result.factors);
    Ok(result)
}

/// The clipped-tree spec certificates are computed in, and whether inputs
/// need halving.
pub fn working_spec(spec: &SemigroupSpec) -> Result<(SemigroupSpec, bool), RewriteError> {
    match spec.variant() {
        Variant::U => Ok((spec.clone(), false)),
        Variant::S if spec.is_halvable() => Ok((spec.halved()?, true)),
        Variant::S => Err(SpecError::NotHalvable.into()),
    }
}

/// A local binomial applied at a trinode, in absolute trinode coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalMove {
    pub trinode: usize,
    pub binomial: Binomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub site: StepSite,
    /// A Graver id such as `Q3` (`Q3~` when applied right to left), `BAL2`
    /// for a pairwise refactorization, or `SWAP` for exchanging the parts
    /// on one side of an edge.
    pub binomial: String,
    pub factors: Vec<usize>,
    pub before: Vec<Weighting>,
    pub after: Vec<Weighting>,
    pub local: Option<LocalMove>,
}

impl RewriteStep {
    pub fn degree(&self) -> usize {
        self.factors.len()
    }
}

#[derive(Debug, Clone)]
pub struct RelationCertificate {
    /// The clipped-tree spec the steps live in.
    pub spec: SemigroupSpec,
    pub halved: bool,
    pub start: Vec<Weighting>,
    pub end: Vec<Weighting>,
    pub steps: Vec<RewriteStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("replay failed{}: {reason}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
pub struct ReplayError {
    pub step: Option<usize>,
    pub reason: String,
}

impl RelationCertificate {
    pub fn max_degree(&self) -> usize {
        self.steps.iter().map(RewriteStep::degree).max().unwrap_or(0)
    }

    /// Replays every step from `start`, checking each against the current
    /// state, and compares the final state with `end` as multisets.
    pub fn replay(&self) -> Result<(), ReplayError> {
        let fail = |step: Option<usize>, reason: &str| ReplayError {
            step,
            reason: reason.to_string(),
        };
        let n = self.spec.edge_count();
        for w in self.start.iter().chain(&self.end) {
            if w.degree() != 1 || !self.spec.is_member(w) {
                return Err(fail(None, "endpoint is not a degree-1 member"));
            }
        }
        let total = Weighting::sum(n, &self.start);
        if self.start.len() != self.end.len() || Weighting::sum(n, &self.end) != total {
            return Err(fail(None, "endpoints have different sums"));
        }
        let mut state = self.start.clone();
        for (s, step) in self.steps.iter().enumerate() {
            let at = Some(s + 1);
            let d = step.factors.len();
            if !(2..=3).contains(&d) || step.before.len() != d || step.after.len() != d {
                return Err(fail(at, "bad step degree"));
            }
            let mut seen = step.factors.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != d || seen.iter().any(|&i| i >= state.len()) {
                return Err(fail(at, "bad factor indices"));
            }
            if step.factors.iter().zip(&step.before).any(|(&i, b)| &state[i] != b) {
                return Err(fail(at, "before does not match the state"));
            }
            if Weighting::sum(n, &step.before) != Weighting::sum(n, &step.after) {
                return Err(fail(at, "step changes the sum"));
            }
            if step.after.iter().any(|w| w.degree() != 1 || !self.spec.is_member(w)) {
                return Err(fail(at, "step produces a non-member"));
            }
            if let Some(local) = &step.local {
                let tri = &self.spec.system().trinodes()[local.trinode];
                let side = |ws: &[Weighting]| {
                    let mut v: Vec<Point> = ws.iter().map(|w| w.restrict(tri).values.map(|x| x as i64)).collect();
                    v.sort_unstable();
                    v
                };
                if side(&step.before) != local.binomial.lhs() || side(&step.after) != local.binomial.rhs() {
                    return Err(fail(at, "local binomial does not match the restrictions"));
                }
            }
            for (&i, w) in step.factors.iter().zip(&step.after) {
                state[i] = w.clone();
            }
            if Weighting::sum(n, &state) != total {
                return Err(fail(at, "intermediate sum changed"));
            }
        }
        let mut a = state;
        let mut b = self.end.clone();
        a.sort();
        b.sort();
        if a != b {
            return Err(fail(None, "final state differs from end"));
        }
        Ok(())
    }

    /// One `step <n> site=<site> binomial=<id> factors=<i,j,..>` line per
    /// step.
    pub fn format_steps(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            let idx: Vec<String> = s.factors.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!(
                "step {} site={} binomial={} factors={}\n",
                i + 1,
                s.site,
                s.binomial,
                idx.join(",")
            ));
        }
        out
    }
}

fn validate_side(spec: &SemigroupSpec, side: &[Weighting]) -> Result<(), RewriteError> {
    for w in side {
        if w.degree() != 1 {
            return Err(RewriteError::NotDegreeOne(w.degree()));
        }
        check_member(spec, w)?;
    }
    Ok(())
}

fn to_working(spec: &SemigroupSpec, halved: bool, side: &[Weighting]) -> Result<Vec<Weighting>, RewriteError> {
    if halved {
        for w in side {
            if w.degree() != 1 {
                return Err(RewriteError::NotDegreeOne(w.degree()));
            }
        }
        Ok(side.iter().map(|w| spec.halve(w)).collect::<Result<_, _>>()?)
    } else {
        Ok(side.to_vec())
    }
}

/// Balances every edge of `factors` in canonical edge order with pairwise
/// refactorizations, logging each as a degree-2 step.
fn balance_side(spec: &SemigroupSpec, factors: &mut [Weighting]) -> Result<Vec<RewriteStep>, RewriteError> {
    let mut steps = Vec::new();
    let n = spec.edge_count();
    for e in 0..n {
        loop {
            let vals: Vec<u64> = factors.iter().map(|w| w.get(e)).collect();
            if vals.is_empty() {
                break;
            }
            let (i, j) = (argmin(&vals), argmax(&vals));
            if vals[j] - vals[i] <= 1 {
                break;
            }
            let pair = &factors[i] + &factors[j];
            let mut new = factor_weighting(spec, &pair)?.factors;
            new.sort_by_key(|w| w.get(e));
            if new[1].get(e) - new[0].get(e) > 1 {
                return Err(RewriteError::CertificateStuck {
                    site: StepSite::Edge(spec.system().edge_name(e).to_string()),
                });
            }
            steps.push(RewriteStep {
                site: StepSite::Global,
                binomial: "BAL2".into(),
                factors: vec![i, j],
                before: vec![factors[i].clone(), factors[j].clone()],
                after: new.clone(),
                local: None,
            });
            factors[i] = new[0].clone();
            factors[j] = new[1].clone();
        }
    }
    Ok(steps)
}

/// Both sides with every edge balanced, and the degree-2 steps that
/// balanced each side.
#[derive(Debug, Clone)]
pub struct BalancedRelation {
    pub spec: SemigroupSpec,
    pub halved: bool,
    pub lhs: Vec<Weighting>,
    pub rhs: Vec<Weighting>,
    pub lhs_steps: Vec<RewriteStep>,
    pub rhs_steps: Vec<RewriteStep>,
}

fn prepare(spec: &SemigroupSpec, lhs: &[Weighting], rhs: &[Weighting]) -> Result<(SemigroupSpec, bool, Vec<Weighting>, Vec<Weighting>), RewriteError> {
    let (work, halved) = working_spec(spec)?;
    let l = to_working(spec, halved, lhs)?;
    let r = to_working(spec, halved, rhs)?;
    validate_side(&work, &l)?;
    validate_side(&work, &r)?;
    let n = work.edge_count();
    if l.len() != r.len() || Weighting::sum(n, &l) != Weighting::sum(n, &r) {
        return Err(RewriteError::SumMismatch);
    }
    Ok((work, halved, l, r))
}

pub fn balance_relation(spec: &SemigroupSpec, lhs: &[Weighting], rhs: &[Weighting]) -> Result<BalancedRelation, RewriteError> {
    let (work, halved, mut l, mut r) = prepare(spec, lhs, rhs)?;
    let lhs_steps = balance_side(&work, &mut l)?;
    let rhs_steps = balance_side(&work, &mut r)?;
    Ok(BalancedRelation {
        spec: work,
        halved,
        lhs: l,
        rhs: r,
        lhs_steps,
        rhs_steps,
    })
}

/// Applies `lhs -> rhs` at trinode `t`: picks factors restricting to the
/// lhs points and regrows each rhs point from the old branch parts with
/// matching edge values.
fn lift(
    spec: &SemigroupSpec,
    factors: &[Weighting],
    t: usize,
    lhs: &[Point],
    rhs: &[Point],
) -> Result<(Vec<usize>, Vec<Weighting>), RewriteError> {
    let sys = spec.system();
    let tri = &sys.trinodes()[t];
    let site = || RewriteError::CertificateStuck {
        site: StepSite::Trinode(tri.name.clone()),
    };
    let mut idx: Vec<usize> = Vec::with_capacity(lhs.len());
    for p in lhs {
        let i = (0..factors.len())
            .find(|i| !idx.contains(i) && factors[*i].restrict(tri).values.map(|x| x as i64) == *p)
            .ok_or_else(site)?;
        idx.push(i);
    }
    let branches: Vec<Vec<usize>> = tri.edges.iter().map(|&e| sys.branch(t, e)).collect();
    let mut after = vec![vec![0u64; sys.edge_count()]; rhs.len()];
    for x in 0..3 {
        let e = tri.edges[x];
        let mut used = vec![false; idx.len()];
        for (j, q) in rhs.iter().enumerate() {
            let src = (0..idx.len())
                .find(|&s| !used[s] && factors[idx[s]].get(e) as i64 == q[x])
                .ok_or_else(|| RewriteError::MatchingFailure {
                    edge: sys.edge_name(e).to_string(),
                })?;
            used[src] = true;
            for &b in &branches[x] {
                after[j][b] = factors[idx[src]].get(b);
            }
        }
    }
    Ok((idx, after.into_iter().map(|v| Weighting::new(v, 1)).collect()))
}

/// Lifts a local binomial at trinode `t` to a global rewrite of balanced
/// degree-one factors. `local` is in absolute trinode coordinates.
pub fn lift_trinode_relation(
    spec: &SemigroupSpec,
    factors: &[Weighting],
    t: usize,
    local: &Binomial,
    id: &str,
) -> Result<RewriteStep, RewriteError> {
    let (idx, after) = lift(spec, factors, t, local.lhs(), local.rhs())?;
    Ok(RewriteStep {
        site: StepSite::Trinode(spec.system().trinodes()[t].name.clone()),
        binomial: id.to_string(),
        before: idx.iter().map(|&i| factors[i].clone()).collect(),
        factors: idx,
        after,
        local: Some(LocalMove {
            trinode: t,
            binomial: local.clone(),
        }),
    })
}

fn apply(state: &mut [Weighting], step: &RewriteStep) {
    for (&i, w) in step.factors.iter().zip(&step.after) {
        state[i] = w.clone();
    }
}

const BFS_CAP: usize = 10_000;

fn restrictions(spec: &SemigroupSpec, ws: &[Weighting], t: usize) -> Vec<Point> {
    let mut v: Vec<Point> = ws
        .iter()
        .map(|w| spec.restrict(w, t).values.map(|x| x as i64))
        .collect();
    v.sort_unstable();
    v
}

/// Rewrites `cur` with restricted Graver moves at `t` until its restrictions
/// at `t` agree with those of `target` as multisets.
fn convert_trinode(
    spec: &SemigroupSpec,
    cur: &mut [Weighting],
    target: &[Weighting],
    t: usize,
    steps: &mut Vec<RewriteStep>,
) -> Result<(), RewriteError> {
    let sys = spec.system();
    let tri = &sys.trinodes()[t];
    let start = restrictions(spec, cur, t);
    let goal = restrictions(spec, target, t);
    if start == goal {
        return Ok(());
    }
    let k = cur.len() as i64;
    let base: Point = [0, 1, 2].map(|x| start.iter().map(|p| p[x]).sum::<i64>() / k);
    let valid: Vec<Point> = unit_cube()
        .into_iter()
        .filter(|o| {
            let p = [0, 1, 2].map(|x| (base[x] + o[x]) as u64);
            let rules_ok = (0..3).all(|x| match sys.rule(tri.edges[x]).bounds(1) {
                None => false,
                Some((lo, hi)) => p[x] >= lo && hi.is_none_or(|h| p[x] <= h),
            });
            check_triangle(p)
                && rules_ok
                && (!sys.parity() || p.iter().sum::<u64>() % 2 == 0)
                && sys.level().is_none_or(|l| p.iter().sum::<u64>() <= l)
        })
        .collect();
    let shift = |ps: &[Point]| -> Vec<Point> { ps.iter().map(|o| [0, 1, 2].map(|x| base[x] + o[x])).collect() };
    let mut moves: Vec<(String, Vec<Point>, Vec<Point>)> = Vec::new();
    for g in restrict_graver(&valid) {
        let (l, r) = (shift(g.binomial.lhs()), shift(g.binomial.rhs()));
        moves.push((g.id.to_string(), l.clone(), r.clone()));
        moves.push((format!("{}~", g.id), r, l));
    }
    let stuck = || RewriteError::CertificateStuck {
        site: StepSite::Trinode(tri.name.clone()),
    };
    let take = |state: &[Point], side: &[Point]| -> Option<Vec<Point>> {
        let mut rest = state.to_vec();
        for p in side {
            let i = rest.iter().position(|q| q == p)?;
            rest.remove(i);
        }
        Some(rest)
    };
    let mut prev: HashMap<Vec<Point>, (Vec<Point>, usize)> = HashMap::new();
    let mut queue = VecDeque::from([start.clone()]);
    prev.insert(start.clone(), (Vec::new(), usize::MAX));
    'search: while let Some(state) = queue.pop_front() {
        for (m, (_, l, r)) in moves.iter().enumerate() {
            if let Some(mut next) = take(&state, l) {
                next.extend_from_slice(r);
                next.sort_unstable();
                if prev.contains_key(&next) {
                    continue;
                }
                prev.insert(next.clone(), (state.clone(), m));
                if next == goal {
                    break 'search;
                }
                if prev.len() > BFS_CAP {
                    return Err(stuck());
                }
                queue.push_back(next);
            }
        }
    }
    if !prev.contains_key(&goal) {
        return Err(stuck());
    }
    let mut path = Vec::new();
    let mut at = goal;
    while at != start {
        let (p, m) = prev[&at].clone();
        path.push(m);
        at = p;
    }
    path.reverse();
    for m in path {
        let (id, l, r) = &moves[m];
        let local = Binomial::new(l.clone(), r.clone()).map_err(|_| stuck())?;
        let step = lift_trinode_relation(spec, cur, t, &local, id)?;
        apply(cur, &step);
        steps.push(step);
    }
    Ok(())
}

/// Exchanges parent-side parts across edge `e` between factors with equal
/// `e` values so that `cur` matches `target` jointly on `region` and at `t`.
fn align(
    spec: &SemigroupSpec,
    cur: &mut [Weighting],
    target: &[Weighting],
    t: usize,
    e: usize,
    region: &[usize],
    steps: &mut Vec<RewriteStep>,
) -> Result<(), RewriteError> {
    let sys = spec.system();
    let parent_side = sys.branch(t, e);
    let key_r = |w: &Weighting| region.iter().map(|&x| w.get(x)).collect::<Vec<_>>();
    let key_t = |w: &Weighting| spec.restrict(w, t).values;
    let stuck = || RewriteError::CertificateStuck {
        site: StepSite::Edge(sys.edge_name(e).to_string()),
    };
    let k = cur.len();
    // want[q] = original position whose parent part should end at q
    let mut want = vec![usize::MAX; k];
    let mut used_q = vec![false; k];
    let mut used_p = vec![false; k];
    for h in target {
        let q = (0..k)
            .find(|&q| !used_q[q] && cur[q].get(e) == h.get(e) && key_t(&cur[q]) == key_t(h))
            .ok_or_else(stuck)?;
        let p = (0..k)
            .find(|&p| !used_p[p] && cur[p].get(e) == h.get(e) && key_r(&cur[p]) == key_r(h))
            .ok_or_else(stuck)?;
        used_q[q] = true;
        used_p[p] = true;
        want[q] = p;
    }
    let mut holder: Vec<usize> = (0..k).collect();
    for q in 0..k {
        if holder[q] == want[q] {
            continue;
        }
        let l = (0..k).find(|&l| holder[l] == want[q]).unwrap();
        let (a, b) = (&cur[q], &cur[l]);
        let mut na = a.values().to_vec();
        let mut nb = b.values().to_vec();
        for &x in &parent_side {
            na[x] = b.get(x);
            nb[x] = a.get(x);
        }
        let after = vec![Weighting::new(na, 1), Weighting::new(nb, 1)];
        if after[0] != *a {
            let step = RewriteStep {
                site: StepSite::Edge(sys.edge_name(e).to_string()),
                binomial: "SWAP".into(),
                factors: vec![q, l],
                before: vec![a.clone(), b.clone()],
                after,
                local: None,
            };
            apply(cur, &step);
            steps.push(step);
        }
        holder.swap(q, l);
    }
    Ok(())
}

/// Trinodes in breadth-first order from the first, each with the edge
/// joining it to the part already visited.
fn trinode_order(sys: &ConstraintSystem) -> Vec<(usize, Option<usize>)> {
    let tris = sys.trinodes();
    if tris.is_empty() {
        return Vec::new();
    }
    let mut seen = vec![false; tris.len()];
    seen[0] = true;
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(0usize, None)]);
    while let Some((t, parent)) = queue.pop_front() {
        out.push((t, parent));
        for &e in &tris[t].edges {
            for &s in sys.trinodes_at(e) {
                if !seen[s] {
                    seen[s] = true;
                    queue.push_back((s, Some(e)));
                }
            }
        }
    }
    out
}

/// Certifies `lhs = rhs` as a chain of degree-2 balancing steps and local
/// Graver moves of degree at most 3.
pub fn decompose_relation(spec: &SemigroupSpec, lhs: &[Weighting], rhs: &[Weighting]) -> Result<RelationCertificate, RewriteError> {
    let (work, halved, start, end) = prepare(spec, lhs, rhs)?;
    let mut sorted_l = start.clone();
    let mut sorted_r = end.clone();
    sorted_l.sort();
    sorted_r.sort();
    let mut steps = Vec::new();
    if sorted_l != sorted_r {
        let mut cur = start.clone();
        steps = balance_side(&work, &mut cur)?;
        let mut target = end.clone();
        let rhs_steps = balance_side(&work, &mut target)?;
        let sys = work.system();
        let mut region: Vec<usize> = Vec::new();
        for (t, parent) in trinode_order(sys) {
            convert_trinode(&work, &mut cur, &target, t, &mut steps)?;
            if let Some(e) = parent {
                align(&work, &mut cur, &target, t, e, &region, &mut steps)?;
            }
            region.extend(sys.trinodes()[t].edges);
            region.sort_unstable();
            region.dedup();
        }
        let mut sigma = Vec::with_capacity(target.len());
        for w in &target {
            let i = (0..cur.len())
                .find(|i| !sigma.contains(i) && cur[*i] == *w)
                .ok_or(RewriteError::CertificateStuck { site: StepSite::Global })?;
            sigma.push(i);
        }
        for s in rhs_steps.iter().rev() {
            let step = RewriteStep {
                site: s.site.clone(),
                binomial: s.binomial.clone(),
                factors: s.factors.iter().map(|&i| sigma[i]).collect(),
                before: s.after.clone(),
                after: s.before.clone(),
                local: None,
            };
            apply(&mut cur, &step);
            steps.push(step);
        }
    }
    let cert = RelationCertificate {
        spec: work,
        halved,
        start,
        end,
        steps,
    };
    debug_assert!(cert.replay().is_ok());
    Ok(cert)
}
