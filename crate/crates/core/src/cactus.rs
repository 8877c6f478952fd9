//! The functions `tcfr(a,d; b; c)` on `Gr(k, 3(k-1))`, their degenerations
//! and the three-term exchange relation between them.
//!
//! With `n = 3(k-1)`:
//! `R = {d+1..a}`, `S = {k..k+b-1}`, `T = {2k-1..2k+c-2}`, `V = {1..d}`
//! (labels taken mod `n`). When `a + b + c = k` the same triple of intervals
//! with `R = {1..a}` gives a Plücker coordinate instead.

use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;

use crate::cyclic::{wrap, LabelSet};
use crate::error::{Error, Result};
use crate::evaluation::{
    attach, greedy_assignment, verify_identity_with, FunctionExpr, IdentityReport,
};
use crate::linalg::Rational;
use crate::webs::{Rank1Web, Rank2Web, TreeWeb, Web};

/// Parameters `(a, d; b; c)` of a rank-2 member of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TcfrParams {
    pub k: usize,
    pub a: usize,
    pub d: usize,
    pub b: usize,
    pub c: usize,
}

/// Which factorization applies, checked in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// `a = k`: a single Plücker coordinate `tcfr(d; b; c)`.
    Plucker,
    /// `a + b = k`: `tcfr(a; b;) * tcfr(d;; c)`.
    SplitAb,
    /// `a + c = k`: `tcfr(a;; c) * tcfr(d; b;)`.
    SplitAc,
    None,
}

fn interval(from: usize, len: usize, n: usize) -> Vec<usize> {
    (0..len).map(|j| wrap((from + j) as i64, n)).collect()
}

impl TcfrParams {
    /// Checks `a, b, c, d <= k`, `a > d`, `a + b + c + d = 2k` and the
    /// (non-strict) triangle inequality on `(a - d, b, c)`.
    pub fn new(k: usize, a: usize, d: usize, b: usize, c: usize) -> Result<Self> {
        let p = Self { k, a, d, b, c };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(Error::Parameter(format!(
                "{p} is not a valid parameter set"
            )))
        }
    }

    fn is_valid(&self) -> bool {
        let Self { k, a, d, b, c } = *self;
        if k < 3 || a > k || b > k || c > k || d > k || a <= d || a + b + c + d != 2 * k {
            return false;
        }
        let x = a - d;
        x <= b + c && b <= x + c && c <= x + b
    }

    pub fn n(&self) -> usize {
        3 * (self.k - 1)
    }

    /// `(R, S, T, V)` as label lists (possibly overlapping in degenerate cases).
    pub fn label_lists(&self) -> [Vec<usize>; 4] {
        let Self { k, a, d, b, c } = *self;
        let n = self.n();
        [
            interval(d + 1, a - d, n),
            interval(k, b, n),
            interval(2 * k - 1, c, n),
            interval(1, d, n),
        ]
    }

    pub fn degeneracy(&self) -> Degeneracy {
        let Self { k, a, b, c, .. } = *self;
        if a == k {
            Degeneracy::Plucker
        } else if a + b == k {
            Degeneracy::SplitAb
        } else if a + c == k {
            Degeneracy::SplitAc
        } else {
            Degeneracy::None
        }
    }

    /// The tree web read off the definition, without resolving degeneracies.
    pub fn raw_web(&self) -> Result<Web> {
        let [r, s, t, v] = self.label_lists();
        let base = vec![r, s, t];
        let assignment = greedy_assignment(self.k, &base, &v)?;
        Ok(Web::Tree(TreeWeb {
            k: self.k,
            n: self.n(),
            vertices: attach(&base, &v, &assignment)?,
        }))
    }

    /// The genuine rank-2 web, when no box is empty.
    pub fn rank2_web(&self) -> Result<Rank2Web> {
        if self.degeneracy() != Degeneracy::None {
            return Err(Error::Parameter(format!("{self} is degenerate")));
        }
        let [r, s, t, v] = self.label_lists();
        Rank2Web::from_labels(self.k, self.n(), &r, &s, &t, &v)
    }

    /// Factors after applying the degeneracy rules.
    pub fn factors(&self) -> Result<Vec<Web>> {
        let Self { k, a, d, b, c } = *self;
        Ok(match self.degeneracy() {
            Degeneracy::Plucker => vec![plucker_tcfr(k, d, b, c)?],
            Degeneracy::SplitAb => vec![plucker_tcfr(k, a, b, 0)?, plucker_tcfr(k, d, 0, c)?],
            Degeneracy::SplitAc => vec![plucker_tcfr(k, a, 0, c)?, plucker_tcfr(k, d, b, 0)?],
            Degeneracy::None => vec![Web::Rank2(self.rank2_web()?)],
        })
    }

    /// `tcfr(a,d; b; c)` as a one-term expression.
    pub fn expr(&self) -> Result<FunctionExpr> {
        let mut e = FunctionExpr::new(self.k, self.n());
        e.push(Rational::one(), self.factors()?)?;
        Ok(e)
    }

    fn shifted(&self, da: i64, dd: i64, db: i64, dc: i64) -> Option<TcfrParams> {
        let f = |x: usize, dx: i64| usize::try_from(x as i64 + dx).ok();
        let p = TcfrParams {
            k: self.k,
            a: f(self.a, da)?,
            d: f(self.d, dd)?,
            b: f(self.b, db)?,
            c: f(self.c, dc)?,
        };
        p.is_valid().then_some(p)
    }

    /// The mutated function `(a-1, d-1; b+1; c+1)`.
    pub fn mutated(&self) -> Option<TcfrParams> {
        self.shifted(-1, -1, 1, 1)
    }

    /// The six parameter sets of the exchange relation at `self`, in the
    /// order `x, x', y1, y2, z1, z2` of
    /// `x x' = y1 y2 + z1 z2`; `None` if some term is invalid.
    pub fn exchange_terms(&self) -> Option<[TcfrParams; 6]> {
        Some([
            *self,
            self.mutated()?,
            self.shifted(-1, 0, 1, 0)?,
            self.shifted(0, -1, 0, 1)?,
            self.shifted(-1, 0, 0, 1)?,
            self.shifted(0, -1, 1, 0)?,
        ])
    }
}

impl fmt::Display for TcfrParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tcfr({},{};{};{}) on Gr({},{})",
            self.a,
            self.d,
            self.b,
            self.c,
            self.k,
            self.n()
        )
    }
}

/// The Plücker coordinate `tcfr(a; b; c)` with `a + b + c = k`.
pub fn plucker_tcfr(k: usize, a: usize, b: usize, c: usize) -> Result<Web> {
    if a + b + c != k {
        return Err(Error::Parameter(format!(
            "tcfr({a};{b};{c}) needs a+b+c = {k}"
        )));
    }
    let n = 3 * (k - 1);
    let labels = interval(1, a, n)
        .into_iter()
        .chain(interval(k, b, n))
        .chain(interval(2 * k - 1, c, n));
    Ok(Web::Rank1(Rank1Web::new(k, LabelSet::new(n, labels)?)?))
}

/// Every valid parameter set for `k`.
pub fn valid_params(k: usize) -> Vec<TcfrParams> {
    let mut out = Vec::new();
    for a in 1..=k {
        for d in 0..a {
            for b in 0..=k {
                let Some(c) = (2 * k).checked_sub(a + b + d) else {
                    continue;
                };
                if let Ok(p) = TcfrParams::new(k, a, d, b, c) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Parameter sets at which all six terms of the exchange relation exist.
pub fn admissible_mutations(k: usize) -> Vec<TcfrParams> {
    valid_params(k)
        .into_iter()
        .filter(|p| p.exchange_terms().is_some())
        .collect()
}

/// `x x' - y1 y2 - z1 z2`.
pub fn exchange_identity(p: &TcfrParams) -> Result<FunctionExpr> {
    let [x, x2, y1, y2, z1, z2] = p
        .exchange_terms()
        .ok_or_else(|| Error::Parameter(format!("{p} does not admit the exchange relation")))?;
    let lhs = x.expr()?.mul(&x2.expr()?)?;
    let y = y1.expr()?.mul(&y2.expr()?)?;
    let z = z1.expr()?.mul(&z2.expr()?)?;
    lhs.sub(&y)?.sub(&z)
}

/// `raw - factors` for a degenerate parameter set.
///
/// For `a = k` the raw web uses columns `1..k` once more than
/// `tcfr(d; b; c)`; on the Grassmannian the two differ by the frozen
/// coordinate `p_{1..k}`, which is 1 on the configuration space.
pub fn degeneracy_identity(p: &TcfrParams) -> Option<Result<FunctionExpr>> {
    if p.degeneracy() == Degeneracy::None {
        return None;
    }
    Some((|| {
        let raw = FunctionExpr::single(p.raw_web()?);
        let mut rhs = p.expr()?;
        if p.degeneracy() == Degeneracy::Plucker {
            rhs = FunctionExpr::single(plucker_tcfr(p.k, p.k, 0, 0)?).mul(&rhs)?;
        }
        raw.sub(&rhs)
    })())
}

/// Mutation chains `(k, d; b; c) -> (k-1, d-1; b+1; c+1) -> ... -> (k-d, 0; b+d; c+d)`,
/// one per starting Plücker coordinate `tcfr(d; b; c)` with `d >= 1`, as the
/// list of parameter sets at which the exchange relation is applied.
pub fn cactus_chains(k: usize) -> Vec<Vec<TcfrParams>> {
    let mut chains = Vec::new();
    for d in 1..k {
        for b in 0..=k - d {
            let c = k - d - b;
            let Ok(start) = TcfrParams::new(k, k, d, b, c) else {
                continue;
            };
            let mut chain = Vec::new();
            let mut cur = start;
            while cur.d > 0 {
                if cur.exchange_terms().is_none() {
                    break;
                }
                chain.push(cur);
                cur = cur.mutated().expect("checked by exchange_terms");
            }
            if !chain.is_empty() {
                chains.push(chain);
            }
        }
    }
    chains
}

/// Verifies the exchange relations of one chain, fixing each function's
/// sign the first time it is seen.
pub fn verify_chain(
    chain: &[TcfrParams],
    samples: usize,
    seed: u64,
) -> Result<Vec<IdentityReport>> {
    let mut signs: BTreeMap<Web, i8> = BTreeMap::new();
    let mut reports = Vec::new();
    for (i, p) in chain.iter().enumerate() {
        let e = exchange_identity(p)?;
        let report = verify_identity_with(&e, samples, seed.wrapping_add(i as u64), &signs)?;
        if !report.ok {
            reports.push(report);
            break;
        }
        signs.extend(report.sign_map(&e));
        reports.push(report);
    }
    Ok(reports)
}
