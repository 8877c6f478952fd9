//! Exact evaluation of webs on points of the Grassmannian.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::cyclic::LabelSet;
use crate::error::{Error, Result};
use crate::linalg::{parse_rational, permutation_sign, rat, Rational, RationalMatrix};
use crate::webs::{Rank2Web, Web, WebJson};

/// A full-rank `k x n` matrix; column `j` (1-based) is the vector `v_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrassPoint {
    matrix: RationalMatrix,
}

impl GrassPoint {
    pub fn new(matrix: RationalMatrix) -> Result<Self> {
        if matrix.rank() != matrix.rows() {
            return Err(Error::DegeneratePoint);
        }
        Ok(Self { matrix })
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    /// Left action of a `k x k` matrix.
    pub fn act(&self, g: &RationalMatrix) -> Result<GrassPoint> {
        GrassPoint::new(g.mul(&self.matrix)?)
    }

    /// Reads whitespace/tab separated rows of rationals `p/q`.
    pub fn parse_tsv(text: &str) -> Result<GrassPoint> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GrassPoint::new(RationalMatrix::from_rows(rows)?)
    }
}

/// Integer entries uniform in `[-9, 9]`, resampled until the rank is `k`.
pub fn random_point<R: Rng>(k: usize, n: usize, rng: &mut R) -> GrassPoint {
    assert!(k <= n, "need k <= n");
    loop {
        let data = (0..k * n).map(|_| rat(rng.gen_range(-9..=9))).collect();
        if let Ok(p) = GrassPoint::new(RationalMatrix::new(k, n, data).expect("shape")) {
            return p;
        }
    }
}

fn check_labels(labels: &[usize], n: usize) -> Result<()> {
    match labels.iter().find(|&&l| l == 0 || l > n) {
        Some(&l) => Err(Error::LabelOutOfRange { label: l, n }),
        None => Ok(()),
    }
}

/// Plücker coordinate: the minor on the columns of `set` in increasing order.
pub fn plucker(set: &LabelSet, p: &GrassPoint) -> Result<Rational> {
    if set.n() != p.n() {
        return Err(Error::AmbientMismatch(set.n(), p.n()));
    }
    if set.len() != p.k() {
        return Err(Error::Size {
            got: set.len(),
            expected: p.k(),
        });
    }
    minor(p, set.as_slice())
}

/// Determinant of the columns `labels` in the given order (repeats allowed).
pub fn minor(p: &GrassPoint, labels: &[usize]) -> Result<Rational> {
    check_labels(labels, p.n())?;
    let cols: Vec<usize> = labels.iter().map(|l| l - 1).collect();
    p.matrix.select_columns(&cols).det()
}

/// `F_i`: drop column `i`.
pub fn forget_column(p: &GrassPoint, i: usize) -> Result<GrassPoint> {
    check_labels(&[i], p.n())?;
    GrassPoint::new(p.matrix.remove_column(i - 1))
}

/// `G_i`: `Gr(k+1, n+1) -> Gr(k, n)` through the dual Grassmannian. Only
/// defined up to the left `GL_k` action.
pub fn dual_delete(p: &GrassPoint, i: usize) -> Result<GrassPoint> {
    let dual = dual_point(p)?;
    let forgotten = forget_column(&dual, i)?;
    dual_point(&forgotten)
}

/// The row space of the kernel of `p`.
pub fn dual_point(p: &GrassPoint) -> Result<GrassPoint> {
    let kernel = p.matrix.kernel_basis();
    if kernel.rows() == 0 {
        return Err(Error::DegeneratePoint);
    }
    GrassPoint::new(kernel)
}

/// Which two white vertices each `V` label is attached to.
pub type VAssignment = Vec<[usize; 2]>;

/// Greedy rule: `V` in increasing order, each label goes to the two vertices
/// with the largest remaining capacity `k - #leaves`, ties to the lower index.
pub fn greedy_assignment(k: usize, base: &[Vec<usize>], v: &[usize]) -> Result<VAssignment> {
    let mut capacity: Vec<i64> = base.iter().map(|l| k as i64 - l.len() as i64).collect();
    let mut out = Vec::with_capacity(v.len());
    for _ in v {
        let mut order: Vec<usize> = (0..capacity.len()).collect();
        order.sort_by_key(|&j| (-capacity[j], j));
        let pair = [order[0].min(order[1]), order[0].max(order[1])];
        capacity[pair[0]] -= 1;
        capacity[pair[1]] -= 1;
        out.push(pair);
    }
    if capacity.iter().any(|&c| c < 0) {
        return Err(Error::InvalidWeb);
    }
    Ok(out)
}

/// Leaf lists of the white vertices once `v` is attached per `assignment`.
pub fn attach(
    base: &[Vec<usize>],
    v: &[usize],
    assignment: &[[usize; 2]],
) -> Result<Vec<Vec<usize>>> {
    if assignment.len() != v.len() {
        return Err(Error::Size {
            got: assignment.len(),
            expected: v.len(),
        });
    }
    let mut lists = base.to_vec();
    for (&label, pair) in v.iter().zip(assignment) {
        if pair[0] == pair[1] || pair.iter().any(|&j| j >= lists.len()) {
            return Err(Error::Parameter(format!(
                "bad attachment {pair:?} for label {label}"
            )));
        }
        for &j in pair {
            lists[j].push(label);
        }
    }
    for l in &mut lists {
        l.sort_unstable();
    }
    Ok(lists)
}

fn rank2_base(w: &Rank2Web) -> Vec<Vec<usize>> {
    vec![
        w.r().as_slice().to_vec(),
        w.s().as_slice().to_vec(),
        w.t().as_slice().to_vec(),
    ]
}

/// Leaf lists of `w` under the greedy `V` assignment.
pub fn leaf_lists(w: &Rank2Web) -> Result<Vec<Vec<usize>>> {
    let base = rank2_base(w);
    let assignment = greedy_assignment(w.k(), &base, w.v().as_slice())?;
    attach(&base, w.v().as_slice(), &assignment)
}

/// Contraction of white vertices with leaf lists `lists` through one black
/// vertex: the sum over ordered set partitions `(I_1, ..)` of `[k]` with
/// `|I_j| = k - |L_j|` of `sgn(I_1 I_2 ..) * prod det[P_{L_j} | e_{I_j}]`.
pub fn eval_tree(k: usize, lists: &[Vec<usize>], p: &GrassPoint) -> Result<Rational> {
    if p.k() != k {
        return Err(Error::Size {
            got: p.k(),
            expected: k,
        });
    }
    for l in lists {
        check_labels(l, p.n())?;
    }
    if lists.len() == 1 {
        return minor(p, &lists[0]);
    }
    let mut m = Vec::with_capacity(lists.len());
    for l in lists {
        if l.len() > k {
            return Err(Error::InvalidWeb);
        }
        m.push(k - l.len());
    }
    if m.iter().sum::<usize>() != k {
        return Err(Error::Size {
            got: m.iter().sum(),
            expected: k,
        });
    }
    let mut ctx = Contraction {
        k,
        lists,
        m: &m,
        p,
        memo: HashMap::new(),
    };
    let mut parts = Vec::new();
    ctx.sum(0, (1u32 << k) - 1, &mut parts)
}

struct Contraction<'a> {
    k: usize,
    lists: &'a [Vec<usize>],
    m: &'a [usize],
    p: &'a GrassPoint,
    memo: HashMap<(usize, u32), Rational>,
}

impl Contraction<'_> {
    /// `det[P_{L_j} | e_I]` by Laplace expansion along the unit columns.
    fn factor(&mut self, j: usize, mask: u32) -> Result<Rational> {
        if let Some(v) = self.memo.get(&(j, mask)) {
            return Ok(v.clone());
        }
        let k = self.k;
        let leaves = &self.lists[j];
        let rows: Vec<usize> = (0..k).filter(|r| mask & (1 << r) == 0).collect();
        let cols: Vec<usize> = leaves.iter().map(|l| l - 1).collect();
        let sub = self.p.matrix.select_columns(&cols).select_rows(&rows);
        let mut value = if rows.is_empty() {
            Rational::one()
        } else {
            sub.det()?
        };
        // unit column t (1-based position k - m + t) sits in row i_t
        let first = leaves.len();
        let parity: usize = (0..k)
            .filter(|r| mask & (1 << r) != 0)
            .enumerate()
            .map(|(t, r)| (r + 1) + (first + t + 1))
            .sum();
        if parity % 2 == 1 {
            value = -value;
        }
        self.memo.insert((j, mask), value.clone());
        Ok(value)
    }

    fn sum(&mut self, j: usize, remaining: u32, parts: &mut Vec<usize>) -> Result<Rational> {
        if j + 1 == self.lists.len() {
            let mut seq = parts.clone();
            seq.extend((0..self.k).filter(|r| remaining & (1 << r) != 0));
            let mut prod = Rational::from_integer(permutation_sign(&seq).into());
            let mut start = 0;
            for (idx, &size) in self.m.iter().enumerate() {
                let mask = seq[start..start + size]
                    .iter()
                    .fold(0u32, |acc, r| acc | (1 << r));
                start += size;
                let f = self.factor(idx, mask)?;
                if f.is_zero() {
                    return Ok(Rational::zero());
                }
                prod *= f;
            }
            return Ok(prod);
        }
        let avail: Vec<usize> = (0..self.k).filter(|r| remaining & (1 << r) != 0).collect();
        let mut total = Rational::zero();
        for chosen in combinations(&avail, self.m[j]) {
            let mask = chosen.iter().fold(0u32, |acc, r| acc | (1 << r));
            if self.factor(j, mask)?.is_zero() {
                continue;
            }
            let len = parts.len();
            parts.extend(&chosen);
            total += self.sum(j + 1, remaining & !mask, parts)?;
            parts.truncate(len);
        }
        Ok(total)
    }
}

fn combinations(items: &[usize], r: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    items.iter().copied().combinations(r).collect()
}

/// Value of `w` at `p`.
pub fn eval_web(w: &Web, p: &GrassPoint) -> Result<Rational> {
    if w.n() != p.n() {
        return Err(Error::AmbientMismatch(w.n(), p.n()));
    }
    match w {
        Web::Rank1(w) => plucker(w.leaves(), p),
        Web::Rank2(w) => eval_tree(w.k(), &leaf_lists(w)?, p),
        Web::Tree(w) => eval_tree(w.k, &w.vertices, p),
    }
}

/// Value of a rank-2 web with an explicit `V` assignment.
pub fn eval_rank2_with(
    w: &Rank2Web,
    assignment: &[[usize; 2]],
    p: &GrassPoint,
) -> Result<Rational> {
    let lists = attach(&rank2_base(w), w.v().as_slice(), assignment)?;
    if lists.iter().any(|l| l.len() > w.k()) {
        return Err(Error::InvalidWeb);
    }
    eval_tree(w.k(), &lists, p)
}

/// One term `coef * w_1 * w_2 * ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: Rational,
    pub factors: Vec<Web>,
}

/// A formal sum of products of webs on one `Gr(k, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionExpr {
    k: usize,
    n: usize,
    terms: Vec<Term>,
}

impl FunctionExpr {
    pub fn new(k: usize, n: usize) -> Self {
        Self {
            k,
            n,
            terms: Vec::new(),
        }
    }

    pub fn single(w: Web) -> Self {
        let mut e = Self::new(w.k(), w.n());
        e.terms.push(Term {
            coef: Rational::one(),
            factors: vec![w],
        });
        e
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn push(&mut self, coef: Rational, factors: Vec<Web>) -> Result<()> {
        for w in &factors {
            if w.n() != self.n {
                return Err(Error::AmbientMismatch(self.n, w.n()));
            }
            if w.k() != self.k {
                return Err(Error::Size {
                    got: w.k(),
                    expected: self.k,
                });
            }
        }
        self.terms.push(Term { coef, factors });
        Ok(())
    }

    pub fn add(&self, other: &FunctionExpr) -> Result<FunctionExpr> {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.coef.clone(), t.factors.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> FunctionExpr {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coef = &t.coef * c;
        }
        out
    }

    pub fn sub(&self, other: &FunctionExpr) -> Result<FunctionExpr> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &FunctionExpr) -> Result<FunctionExpr> {
        if (self.k, self.n) != (other.k, other.n) {
            return Err(Error::SpecMismatch(self.k, self.n, other.k, other.n));
        }
        let mut out = FunctionExpr::new(self.k, self.n);
        for a in &self.terms {
            for b in &other.terms {
                let factors = a.factors.iter().chain(&b.factors).cloned().collect();
                out.terms.push(Term {
                    coef: &a.coef * &b.coef,
                    factors,
                });
            }
        }
        Ok(out)
    }

    /// Distinct webs in order of first appearance.
    pub fn webs(&self) -> Vec<Web> {
        let mut out: Vec<Web> = Vec::new();
        for t in &self.terms {
            for w in &t.factors {
                if !out.contains(w) {
                    out.push(w.clone());
                }
            }
        }
        out
    }

    /// Text form: one term per line, `coef; web-json; web-json; ...`.
    pub fn parse(text: &str) -> Result<FunctionExpr> {
        let mut expr: Option<FunctionExpr> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(';').map(str::trim);
            let coef = parse_rational(fields.next().unwrap_or(""))
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let factors = fields
                .filter(|f| !f.is_empty())
                .map(Web::from_json)
                .collect::<Result<Vec<_>>>()?;
            if factors.is_empty() {
                return Err(Error::Parse(format!(
                    "line {}: term without webs",
                    lineno + 1
                )));
            }
            let e = expr.get_or_insert_with(|| FunctionExpr::new(factors[0].k(), factors[0].n()));
            e.push(coef, factors)?;
        }
        expr.ok_or_else(|| Error::Parse("empty expression".into()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            s.push_str(&t.coef.to_string());
            for w in &t.factors {
                s.push_str("; ");
                s.push_str(&serde_json::to_string(&WebJson::from(w)).expect("serializable"));
            }
            s.push('\n');
        }
        s
    }
}

/// Per-point web values, computed once each.
pub struct Evaluator<'a> {
    point: &'a GrassPoint,
    cache: HashMap<Web, Rational>,
}

impl<'a> Evaluator<'a> {
    pub fn new(point: &'a GrassPoint) -> Self {
        Self {
            point,
            cache: HashMap::new(),
        }
    }

    pub fn web(&mut self, w: &Web) -> Result<Rational> {
        if let Some(v) = self.cache.get(w) {
            return Ok(v.clone());
        }
        let v = eval_web(w, self.point)?;
        self.cache.insert(w.clone(), v.clone());
        Ok(v)
    }

    pub fn expr(&mut self, e: &FunctionExpr) -> Result<Rational> {
        self.signed_expr(e, &HashMap::new())
    }

    fn signed_expr(&mut self, e: &FunctionExpr, signs: &HashMap<&Web, i8>) -> Result<Rational> {
        let mut total = Rational::zero();
        for t in &e.terms {
            let mut prod = t.coef.clone();
            for w in &t.factors {
                prod *= self.web(w)?;
                if signs.get(w) == Some(&-1) {
                    prod = -prod;
                }
            }
            total += prod;
        }
        Ok(total)
    }
}

pub fn eval_expr(e: &FunctionExpr, p: &GrassPoint) -> Result<Rational> {
    if (e.k, e.n) != (p.k(), p.n()) {
        return Err(Error::SpecMismatch(e.k, e.n, p.k(), p.n()));
    }
    Evaluator::new(p).expr(e)
}

/// Outcome of [`verify_identity`].
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// One sign per distinct web (JSON form), in order of first appearance.
    pub signs: Vec<(String, i8)>,
    pub samples: usize,
    pub residuals: Vec<String>,
    pub ok: bool,
    /// Number of sign assignments consistent with every sample.
    pub consistent_assignments: usize,
    pub witness: Option<String>,
}

impl IdentityReport {
    pub fn into_result(self) -> Result<IdentityReport> {
        if self.ok {
            Ok(self)
        } else {
            Err(Error::IdentityFailure(
                self.witness.clone().unwrap_or_default(),
            ))
        }
    }

    /// Signs keyed by web, for feeding into a later identity.
    pub fn sign_map(&self, e: &FunctionExpr) -> BTreeMap<Web, i8> {
        e.webs()
            .into_iter()
            .zip(self.signs.iter().map(|s| s.1))
            .collect()
    }
}

const MAX_FREE_SIGNS: usize = 16;

/// Looks for signs `eps_w` making `sum coef * prod eps_w w` vanish at
/// `samples` random points. Webs in `fixed` keep their sign.
pub fn verify_identity_with(
    e: &FunctionExpr,
    samples: usize,
    seed: u64,
    fixed: &BTreeMap<Web, i8>,
) -> Result<IdentityReport> {
    use rand::SeedableRng;
    let webs = e.webs();
    let free: Vec<usize> = (0..webs.len())
        .filter(|&i| !fixed.contains_key(&webs[i]))
        .collect();
    if free.len() > MAX_FREE_SIGNS {
        return Err(Error::Parameter(format!(
            "{} free signs is too many to search",
            free.len()
        )));
    }
    let assignment = |mask: u32| -> HashMap<&Web, i8> {
        let mut signs: HashMap<&Web, i8> = HashMap::new();
        for (i, w) in webs.iter().enumerate() {
            let s = match free.iter().position(|&f| f == i) {
                Some(bit) if mask & (1 << bit) != 0 => -1,
                Some(_) => 1,
                None => fixed[w],
            };
            signs.insert(w, s);
        }
        signs
    };
    let mut candidates: Vec<u32> = (0..1u32 << free.len()).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut witness = None;
    let mut points = Vec::with_capacity(samples);
    for s in 0..samples {
        let p = random_point(e.k, e.n, &mut rng);
        let mut ev = Evaluator::new(&p);
        let mut keep = Vec::new();
        for &mask in &candidates {
            if ev.signed_expr(e, &assignment(mask))?.is_zero() {
                keep.push(mask);
            }
        }
        if keep.is_empty() && witness.is_none() {
            witness = Some(format!("sample {s}: {:?}", p.matrix()));
        }
        candidates = keep;
        points.push(p);
        if candidates.is_empty() {
            break;
        }
    }
    let ok = !candidates.is_empty();
    let chosen = candidates.first().copied().unwrap_or(0);
    let signs_map = assignment(chosen);
    let mut residuals = Vec::with_capacity(points.len());
    for p in &points {
        residuals.push(Evaluator::new(p).signed_expr(e, &signs_map)?.to_string());
    }
    Ok(IdentityReport {
        signs: webs.iter().map(|w| (w.to_json(), signs_map[w])).collect(),
        samples: points.len(),
        residuals,
        ok,
        consistent_assignments: candidates.len(),
        witness,
    })
}

pub fn verify_identity(e: &FunctionExpr, samples: usize, seed: u64) -> Result<IdentityReport> {
    verify_identity_with(e, samples, seed, &BTreeMap::new())
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if !t.coef.is_one() || t.factors.is_empty() {
                write!(f, "({})", t.coef)?;
            }
            for w in &t.factors {
                write!(f, "[{}]", w.to_json())?;
            }
        }
        Ok(())
    }
}

/// `|value|`, used when comparing functions defined up to sign.
pub fn abs(v: &Rational) -> Rational {
    v.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::webs::{enumerate_webs, Direction, Rank1Web};
    use proptest::prelude::{any, prop, prop_assert_eq, proptest, ProptestConfig, Strategy};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn rank2(k: usize, n: usize, r: &[usize], s: &[usize], t: &[usize], v: &[usize]) -> Web {
        Web::Rank2(Rank2Web::from_labels(k, n, r, s, t, v).unwrap())
    }

    fn rank1(n: usize, leaves: &[usize]) -> Web {
        Web::Rank1(
            Rank1Web::new(
                leaves.len(),
                LabelSet::new(n, leaves.iter().copied()).unwrap(),
            )
            .unwrap(),
        )
    }

    /// Naive expansion: full determinants with explicit unit columns.
    fn eval_tree_naive(k: usize, lists: &[Vec<usize>], p: &GrassPoint) -> Rational {
        let m: Vec<usize> = lists.iter().map(|l| k - l.len()).collect();
        let mut total = Rational::zero();
        for perm in (0..k).permutations(k) {
            // only count each ordered set partition once: parts increasing
            let mut start = 0;
            let mut ok = true;
            for &size in &m {
                if perm[start..start + size].windows(2).any(|w| w[0] > w[1]) {
                    ok = false;
                }
                start += size;
            }
            if !ok {
                continue;
            }
            let mut prod = Rational::from_integer(permutation_sign(&perm).into());
            let mut start = 0;
            for (j, &size) in m.iter().enumerate() {
                let mut cols: Vec<Vec<Rational>> =
                    lists[j].iter().map(|&l| p.matrix().column(l - 1)).collect();
                for &r in &perm[start..start + size] {
                    let mut e = vec![Rational::zero(); k];
                    e[r] = Rational::one();
                    cols.push(e);
                }
                start += size;
                prod *= RationalMatrix::from_rows(cols)
                    .unwrap()
                    .transpose()
                    .det()
                    .unwrap();
            }
            total += prod;
        }
        total
    }

    use itertools::Itertools;

    fn random_unimodular(k: usize, rng: &mut ChaCha8Rng) -> RationalMatrix {
        let mut g = RationalMatrix::identity(k);
        for _ in 0..3 * k {
            let (i, j) = (rng.gen_range(0..k), rng.gen_range(0..k));
            if i == j {
                continue;
            }
            let c = rat(rng.gen_range(-3..=3));
            let mut e = RationalMatrix::identity(k);
            e.set(i, j, c);
            g = e.mul(&g).unwrap();
        }
        g
    }

    #[test]
    fn plucker_examples() {
        let mut p = RationalMatrix::zeros(3, 5);
        for i in 0..3 {
            p.set(i, i, rat(1));
        }
        p.set(0, 3, rat(2));
        p.set(1, 4, rat(7));
        let p = GrassPoint::new(p).unwrap();
        assert_eq!(
            plucker(&LabelSet::new(5, [1, 2, 3]).unwrap(), &p).unwrap(),
            rat(1)
        );
        assert_eq!(
            plucker(&LabelSet::new(5, [2, 3, 4]).unwrap(), &p).unwrap(),
            rat(2)
        );
        assert!(plucker(&LabelSet::new(5, [1, 2]).unwrap(), &p).is_err());
        let mut z = p.matrix().clone();
        for r in 0..3 {
            z.set(r, 4, rat(0));
        }
        let z = GrassPoint::new(z).unwrap();
        assert_eq!(
            plucker(&LabelSet::new(5, [1, 2, 5]).unwrap(), &z).unwrap(),
            rat(0)
        );
    }

    #[test]
    fn contraction_matches_naive_expansion() {
        let mut r = rng(1);
        for (k, lists) in [
            (3, vec![vec![1, 2], vec![3, 4], vec![5, 6]]),
            (4, vec![vec![1, 2, 7], vec![3, 4, 7], vec![5, 6]]),
            (5, vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9, 1]]),
            (4, vec![vec![1, 2, 3, 4], vec![3, 5], vec![6, 7]]),
        ] {
            let p = random_point(k, 9, &mut r);
            assert_eq!(
                eval_tree(k, &lists, &p).unwrap(),
                eval_tree_naive(k, &lists, &p)
            );
        }
    }

    #[test]
    fn gr36_web_satisfies_the_plucker_expansion() {
        let mut r = rng(2);
        let w = rank2(3, 6, &[1, 2], &[3, 4], &[5, 6], &[]);
        for _ in 0..10 {
            let p = random_point(3, 6, &mut r);
            let m = |l: [usize; 3]| minor(&p, &l).unwrap();
            let value = eval_web(&w, &p).unwrap();
            // classical expansion of the non-Plücker cluster variable
            let x = m([1, 2, 4]) * m([3, 5, 6]) - m([1, 2, 3]) * m([4, 5, 6]);
            assert_eq!(
                value.clone().abs(),
                x.clone().abs(),
                "point {:?}",
                p.matrix()
            );
        }
    }

    #[test]
    fn equal_columns_at_one_vertex_vanish() {
        let mut r = rng(3);
        let p = random_point(3, 6, &mut r);
        let mut m = p.matrix().clone();
        for row in 0..3 {
            let v = m.get(row, 0).clone();
            m.set(row, 1, v);
        }
        let p = GrassPoint::new(m).unwrap();
        let w = rank2(3, 6, &[1, 2], &[3, 4], &[5, 6], &[]);
        assert!(eval_web(&w, &p).unwrap().is_zero());
    }

    #[test]
    fn rank1_webs_are_pluckers() {
        let mut r = rng(4);
        let p = random_point(3, 6, &mut r);
        for set in (1..=6).combinations(3) {
            let w = rank1(6, &set);
            assert_eq!(
                eval_web(&w, &p).unwrap(),
                plucker(&LabelSet::new(6, set).unwrap(), &p).unwrap()
            );
        }
        let tree = Web::Tree(crate::webs::TreeWeb {
            k: 3,
            n: 6,
            vertices: vec![vec![2, 4, 6]],
        });
        assert_eq!(eval_web(&tree, &p).unwrap(), minor(&p, &[2, 4, 6]).unwrap());
    }

    #[test]
    fn v_reattachment_changes_at_most_a_global_sign() {
        let mut r = rng(5);
        for w in enumerate_webs(4, 8)
            .into_iter()
            .filter(|w| !w.v().is_empty())
            .take(20)
        {
            let pairs = [[0, 1], [0, 2], [1, 2]];
            let v = w.v().as_slice().to_vec();
            let points: Vec<GrassPoint> = (0..5).map(|_| random_point(4, 8, &mut r)).collect();
            let reference: Vec<Rational> = points
                .iter()
                .map(|p| eval_web(&Web::Rank2(w.clone()), p).unwrap())
                .collect();
            for choice in std::iter::repeat_n(pairs.iter(), v.len()).multi_cartesian_product() {
                let assignment: Vec<[usize; 2]> = choice.into_iter().copied().collect();
                let values: Vec<Result<Rational>> = points
                    .iter()
                    .map(|p| eval_rank2_with(&w, &assignment, p))
                    .collect();
                if values.iter().any(|v| v.is_err()) {
                    continue;
                }
                let values: Vec<Rational> = values.into_iter().map(|v| v.unwrap()).collect();
                let sign = if values[0] == reference[0] { 1 } else { -1 };
                for (a, b) in values.iter().zip(&reference) {
                    assert_eq!(a, &(b * rat(sign)), "{w} with {assignment:?}");
                }
            }
        }
    }

    #[test]
    fn identity_verification_detects_failures() {
        let w = rank2(3, 6, &[1, 2], &[3, 4], &[5, 6], &[]);
        let x = rank1(6, &[1, 2, 4]);
        let mut e = FunctionExpr::single(w.clone());
        e.push(rat(1), vec![x]).unwrap();
        let report = verify_identity(&e, 5, 1).unwrap();
        assert!(!report.ok);
        assert!(report.witness.is_some());
        assert!(report.into_result().is_err());

        let mut e = FunctionExpr::single(w);
        e.push(rat(-1), vec![rank1(6, &[1, 2, 4]), rank1(6, &[3, 5, 6])])
            .unwrap();
        e.push(rat(1), vec![rank1(6, &[1, 2, 3]), rank1(6, &[4, 5, 6])])
            .unwrap();
        let report = verify_identity(&e, 5, 1).unwrap().into_result().unwrap();
        assert_eq!(report.residuals.len(), 5);
        assert!(report.residuals.iter().all(|r| r == "0"));
    }

    #[test]
    fn expression_text_roundtrip() {
        let w = rank2(3, 6, &[1, 2], &[3, 4], &[5, 6], &[]);
        let mut e = FunctionExpr::single(w.clone());
        e.push(rat(-2), vec![rank1(6, &[1, 2, 3]), rank1(6, &[4, 5, 6])])
            .unwrap();
        let text = e.to_text();
        assert_eq!(FunctionExpr::parse(&text).unwrap(), e);
        let zero = FunctionExpr::parse(&format!("0; {}", w.to_json())).unwrap();
        let p = random_point(3, 6, &mut rng(6));
        assert!(eval_expr(&zero, &p).unwrap().is_zero());
        assert!(FunctionExpr::parse("1; ").is_err());
        assert!(FunctionExpr::parse(&format!(
            "1; {}\n1; {}",
            w.to_json(),
            rank1(7, &[1, 2, 3]).to_json()
        ))
        .is_err());
    }

    #[test]
    fn dual_plucker_ratios() {
        let mut r = rng(7);
        let (k, n) = (3, 7);
        let p = random_point(k, n, &mut r);
        let d = dual_point(&p).unwrap();
        assert_eq!(d.k(), n - k);
        let sets: Vec<Vec<usize>> = (1..=n).combinations(k).collect();
        let comp = |s: &[usize]| -> Vec<usize> { (1..=n).filter(|x| !s.contains(x)).collect() };
        let base = &sets[0];
        let (pb, db) = (minor(&p, base).unwrap(), minor(&d, &comp(base)).unwrap());
        for s in &sets {
            let lhs = minor(&d, &comp(s)).unwrap() / &db;
            let rhs = minor(&p, s).unwrap() / &pb;
            assert_eq!(lhs.abs(), rhs.abs());
        }
        // double dual preserves all ratios up to sign
        let dd = dual_point(&d).unwrap();
        for s in &sets {
            assert_eq!(
                (minor(&dd, s).unwrap() / minor(&dd, base).unwrap()).abs(),
                (minor(&p, s).unwrap() / &pb).abs()
            );
        }
    }

    #[test]
    fn dual_delete_matches_down_stretching_of_pluckers() {
        let mut r = rng(8);
        let (k, n) = (3, 7);
        for i in 1..=n + 1 {
            let p = random_point(k + 1, n + 1, &mut r);
            let g = dual_delete(&p, i).unwrap();
            assert_eq!((g.k(), g.n()), (k, n));
            let sets: Vec<LabelSet> = (1..=n)
                .combinations(k)
                .map(|s| LabelSet::new(n, s).unwrap())
                .collect();
            let base = &sets[0];
            let lhs0 = plucker(&base.shift_down(i), &p).unwrap();
            let rhs0 = plucker(base, &g).unwrap();
            for s in &sets {
                let lhs = plucker(&s.shift_down(i), &p).unwrap() / &lhs0;
                let rhs = plucker(s, &g).unwrap() / &rhs0;
                assert_eq!(lhs.abs(), rhs.abs(), "i={i}, set {s}");
            }
        }
    }

    #[test]
    fn forget_column_examples() {
        let mut r = rng(9);
        let p = random_point(3, 6, &mut r);
        let q = forget_column(&p, 4).unwrap();
        assert_eq!(
            minor(&q, &[1, 2, 4]).unwrap(),
            minor(&p, &[1, 2, 5]).unwrap()
        );
        let degenerate = GrassPoint::new(RationalMatrix::from_i64_rows(&[
            vec![1, 0, 0],
            vec![0, 1, 0],
        ]))
        .unwrap();
        assert_eq!(forget_column(&degenerate, 1), Err(Error::DegeneratePoint));
    }

    fn arb_web_and_seed() -> impl Strategy<Value = (Rank2Web, u64)> {
        (
            3usize..=4,
            0usize..2,
            any::<prop::sample::Index>(),
            any::<u64>(),
        )
            .prop_map(|(k, extra, idx, seed)| {
                let webs = enumerate_webs(k, 2 * k + extra);
                (webs[idx.index(webs.len())].clone(), seed)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn special_linear_invariance((w, seed) in arb_web_and_seed()) {
            let mut r = rng(seed);
            let p = random_point(w.k(), w.n(), &mut r);
            let g = random_unimodular(w.k(), &mut r);
            let web = Web::Rank2(w);
            prop_assert_eq!(eval_web(&web, &p.act(&g).unwrap()).unwrap(), eval_web(&web, &p).unwrap());
        }

        #[test]
        fn degree_two_homogeneity((w, seed) in arb_web_and_seed()) {
            let mut r = rng(seed);
            let p = random_point(w.k(), w.n(), &mut r);
            let mut g = random_unimodular(w.k(), &mut r);
            let c = rat(r.gen_range(2..5));
            for col in 0..w.k() {
                let v = g.get(0, col) * &c;
                g.set(0, col, v);
            }
            let web = Web::Rank2(w);
            prop_assert_eq!(eval_web(&web, &p.act(&g).unwrap()).unwrap(), eval_web(&web, &p).unwrap() * &c * &c);
        }

        #[test]
        fn alternating_within_a_vertex((w, seed) in arb_web_and_seed()) {
            let mut lists = leaf_lists(&w).unwrap();
            let j = lists.iter().position(|l| l.len() >= 2).unwrap();
            let p = random_point(w.k(), w.n(), &mut rng(seed));
            let before = eval_tree(w.k(), &lists, &p).unwrap();
            lists[j].swap(0, 1);
            prop_assert_eq!(eval_tree(w.k(), &lists, &p).unwrap(), -before);
        }

        #[test]
        fn forgetting_columns_matches_up_stretching((w, seed) in arb_web_and_seed(), pos in any::<prop::sample::Index>()) {
            let i = pos.index(w.n() + 1) + 1;
            let p = random_point(w.k(), w.n() + 1, &mut rng(seed));
            let Ok(q) = forget_column(&p, i) else { return Ok(()) };
            let web = Web::Rank2(w);
            prop_assert_eq!(
                eval_web(&web.stretch(Direction::Up, i).unwrap(), &p).unwrap(),
                eval_web(&web, &q).unwrap()
            );
        }
    }
}
