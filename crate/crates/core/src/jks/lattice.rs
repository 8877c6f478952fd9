//! Modules given as periodic chains of lattices in `K^r`, `K = Q((t))`.
//!
//! Vertex `i` carries the lattice `L_i` with basis `Q_i diag(t^{e_i})` for
//! a constant invertible `Q_i`. The chain satisfies
//! `t L_{i-1} ⊆ L_i ⊆ L_{i-1}` and `L_{i+n} = t^k L_i`; `y_i` is the
//! inclusion and `x_i` is multiplication by `t`, so both relations of the
//! algebra hold by construction. Every arrow entry is a monomial, which
//! makes the module graded.

use num_traits::Zero;

use super::explicit::ExplicitModule;
use super::QuiverAlgebraSpec;
use crate::cyclic::LabelSet;
use crate::error::{Error, Result};
use crate::linalg::{rat, PolyMatrix, Rational, RationalMatrix, TruncPoly};
use crate::profiles::Rank2Profile;
use crate::webs::Direction;

/// Entry `(r, c)` is `coef[r][c] * t^exp[r][c]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMatrix {
    pub coef: RationalMatrix,
    pub exp: Vec<Vec<i64>>,
}

impl MonomialMatrix {
    /// True when no nonzero entry has a negative exponent.
    pub fn is_integral(&self) -> bool {
        (0..self.coef.rows()).all(|r| {
            (0..self.coef.cols()).all(|c| self.coef.get(r, c).is_zero() || self.exp[r][c] >= 0)
        })
    }

    pub fn to_poly(&self, order: usize) -> Result<PolyMatrix> {
        if !self.is_integral() {
            return Err(Error::Relation(
                "negative power of t in a lattice map".into(),
            ));
        }
        let mut m = PolyMatrix::zeros(self.coef.rows(), self.coef.cols(), order);
        for r in 0..self.coef.rows() {
            for c in 0..self.coef.cols() {
                let v = self.coef.get(r, c);
                if !v.is_zero() {
                    m.set(
                        r,
                        c,
                        TruncPoly::monomial(v.clone(), self.exp[r][c] as usize, order),
                    );
                }
            }
        }
        Ok(m)
    }

    /// The reduction mod `t`.
    pub fn constant_part(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.coef.rows(), self.coef.cols());
        for r in 0..self.coef.rows() {
            for c in 0..self.coef.cols() {
                if self.exp[r][c] == 0 {
                    m.set(r, c, self.coef.get(r, c).clone());
                }
            }
        }
        m
    }
}

/// A periodic lattice chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeModule {
    spec: QuiverAlgebraSpec,
    rank: usize,
    frames: Vec<RationalMatrix>,
    inverses: Vec<RationalMatrix>,
    exps: Vec<Vec<i64>>,
}

/// The three lines of a rank-2 module, in box order.
pub const DEFAULT_LINES: [[i64; 2]; 3] = [[1, 0], [0, 1], [1, 1]];

fn prefix_counts(set: &LabelSet) -> Vec<i64> {
    let mut p = vec![0i64; set.n() + 1];
    for i in 1..=set.n() {
        p[i] = p[i - 1] + set.contains(i) as i64;
    }
    p
}

impl LatticeModule {
    /// Validates invertibility and the chain conditions.
    pub fn new(
        spec: QuiverAlgebraSpec,
        frames: Vec<RationalMatrix>,
        exps: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if frames.len() != spec.n || exps.len() != spec.n {
            return Err(Error::Dimension(format!(
                "need {} frames, got {}",
                spec.n,
                frames.len()
            )));
        }
        let rank = frames[0].rows();
        let mut inverses = Vec::with_capacity(spec.n);
        for (q, e) in frames.iter().zip(&exps) {
            if q.rows() != rank || q.cols() != rank || e.len() != rank {
                return Err(Error::Dimension(
                    "frames must all be square of one size".into(),
                ));
            }
            inverses.push(
                q.inverse()?
                    .ok_or_else(|| Error::Dimension("singular frame".into()))?,
            );
        }
        let m = Self {
            spec,
            rank,
            frames,
            inverses,
            exps,
        };
        for i in 1..=spec.n {
            if !m.arrow_y(i).is_integral() {
                return Err(Error::Relation(format!(
                    "L_{i} is not contained in L_{}",
                    i - 1
                )));
            }
            if !m.arrow_x(i).is_integral() {
                return Err(Error::Relation(format!(
                    "t L_{} is not contained in L_{i}",
                    i - 1
                )));
            }
        }
        Ok(m)
    }

    pub fn spec(&self) -> QuiverAlgebraSpec {
        self.spec
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Frame and exponents at an unrolled vertex index.
    pub fn frame(&self, j: i64) -> (&RationalMatrix, &RationalMatrix, Vec<i64>) {
        let n = self.spec.n as i64;
        let v = j.rem_euclid(n);
        let wraps = (j - v) / n;
        let shift = wraps * self.spec.k as i64;
        let e = self.exps[v as usize].iter().map(|x| x + shift).collect();
        (&self.frames[v as usize], &self.inverses[v as usize], e)
    }

    pub fn exponents(&self, v: usize) -> &[i64] {
        &self.exps[v]
    }

    pub fn frames(&self) -> &[RationalMatrix] {
        &self.frames
    }

    /// Matrix of `t^degree * phi` from `L^src_{j}` to `L^dst_{j}` in the lattice bases.
    pub fn transfer(
        src: &LatticeModule,
        dst: &LatticeModule,
        j: i64,
        phi: &RationalMatrix,
        degree: i64,
    ) -> MonomialMatrix {
        let (qs, _, es) = src.frame(j);
        let (_, qd_inv, ed) = dst.frame(j);
        let coef = qd_inv.mul(&phi.mul(qs).expect("shapes")).expect("shapes");
        let exp = (0..dst.rank)
            .map(|r| (0..src.rank).map(|c| degree + es[c] - ed[r]).collect())
            .collect();
        MonomialMatrix { coef, exp }
    }

    fn step(&self, from: i64, to: i64, degree: i64) -> MonomialMatrix {
        let (qs, _, es) = self.frame(from);
        let (_, qd_inv, ed) = self.frame(to);
        let coef = qd_inv.mul(qs).expect("square frames");
        let exp = (0..self.rank)
            .map(|r| (0..self.rank).map(|c| degree + es[c] - ed[r]).collect())
            .collect();
        MonomialMatrix { coef, exp }
    }

    /// `y_i: L_i -> L_{i-1}`, `i` in `1..=n`.
    pub fn arrow_y(&self, i: usize) -> MonomialMatrix {
        self.step(i as i64, i as i64 - 1, 0)
    }

    /// `x_i: L_{i-1} -> L_i`.
    pub fn arrow_x(&self, i: usize) -> MonomialMatrix {
        self.step(i as i64 - 1, i as i64, 1)
    }

    /// The rank-1 module whose down steps are `set`.
    pub fn rank1(spec: QuiverAlgebraSpec, set: &LabelSet) -> Result<Self> {
        if set.n() != spec.n {
            return Err(Error::AmbientMismatch(spec.n, set.n()));
        }
        if set.len() != spec.k {
            return Err(Error::Size {
                got: set.len(),
                expected: spec.k,
            });
        }
        let p = prefix_counts(set);
        let frames = vec![RationalMatrix::identity(1); spec.n];
        let exps = (0..spec.n).map(|v| vec![p[v]]).collect();
        Self::new(spec, frames, exps)
    }

    /// Rank-2 module of a three-box profile, with box `b` realizing `lines[b]`.
    ///
    /// `L_i = t^{p_i} (Q[[t]] v_b + t^{delta_i} Q[[t]]^2)` inside box `b`
    /// and `t^{p_i} Q[[t]]^2` outside, where `p_i = |I ∩ [1,i]|` and
    /// `delta_i` is the depth of the profile at vertex `i`.
    pub fn from_profile_with_lines(profile: &Rank2Profile, lines: &[[i64; 2]; 3]) -> Result<Self> {
        let boxes = profile.decompose_boxes()?;
        if boxes.len() != 3 {
            return Err(Error::NotThreeBoxes(boxes.len()));
        }
        let spec = QuiverAlgebraSpec::new(profile.k(), profile.n())?;
        let n = spec.n;
        let depth = profile.depths();
        let p = prefix_counts(profile.top());
        let mut box_of = vec![None; n];
        for (b, bx) in boxes.iter().enumerate() {
            for &label in &bx.span[..bx.span.len() - 1] {
                box_of[label % n] = Some(b);
            }
        }
        let mut frames = Vec::with_capacity(n);
        let mut exps = Vec::with_capacity(n);
        for v in 0..n {
            match box_of[v] {
                None => {
                    debug_assert_eq!(depth[v], 0);
                    frames.push(RationalMatrix::identity(2));
                    exps.push(vec![p[v], p[v]]);
                }
                Some(b) => {
                    let [a, c] = lines[b];
                    let w = if a != 0 { [0, 1] } else { [1, 0] };
                    frames.push(RationalMatrix::from_i64_rows(&[
                        vec![a, w[0]],
                        vec![c, w[1]],
                    ]));
                    exps.push(vec![p[v], p[v] + depth[v] as i64]);
                }
            }
        }
        Self::new(spec, frames, exps)
    }

    pub fn from_profile(profile: &Rank2Profile) -> Result<Self> {
        Self::from_profile_with_lines(profile, &DEFAULT_LINES)
    }

    pub fn direct_sum(&self, other: &LatticeModule) -> Result<LatticeModule> {
        self.spec.check_same(&other.spec)?;
        let (r1, r2) = (self.rank, other.rank);
        let mut frames = Vec::with_capacity(self.spec.n);
        let mut exps = Vec::with_capacity(self.spec.n);
        for v in 0..self.spec.n {
            let mut q = RationalMatrix::zeros(r1 + r2, r1 + r2);
            for r in 0..r1 {
                for c in 0..r1 {
                    q.set(r, c, self.frames[v].get(r, c).clone());
                }
            }
            for r in 0..r2 {
                for c in 0..r2 {
                    q.set(r1 + r, r1 + c, other.frames[v].get(r, c).clone());
                }
            }
            frames.push(q);
            exps.push(self.exps[v].iter().chain(&other.exps[v]).copied().collect());
        }
        LatticeModule::new(self.spec, frames, exps)
    }

    /// Direct sum of a nonempty list.
    pub fn sum_of(parts: &[LatticeModule]) -> Result<LatticeModule> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::Dimension("empty direct sum".into()))?;
        rest.iter()
            .try_fold(first.clone(), |acc, m| acc.direct_sum(m))
    }

    /// `t^s M`.
    pub fn shifted(&self, s: i64) -> LatticeModule {
        let mut m = self.clone();
        for e in &mut m.exps {
            for x in e.iter_mut() {
                *x += s;
            }
        }
        m
    }

    /// Inserts a `U/U` (up) or `D/D` (down) step at position `i`.
    pub fn stretch(&self, direction: Direction, i: usize) -> Result<LatticeModule> {
        let n = self.spec.n;
        if i == 0 || i > n + 1 {
            return Err(Error::LabelOutOfRange { label: i, n: n + 1 });
        }
        let down = matches!(direction, Direction::Down) as i64;
        let spec = QuiverAlgebraSpec::new(self.spec.k + down as usize, n + 1)?;
        let mut frames = Vec::with_capacity(n + 1);
        let mut exps = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let (q, _, e) = if j < i {
                self.frame(j as i64)
            } else {
                self.frame(j as i64 - 1)
            };
            let bump = if j < i { 0 } else { down };
            frames.push(q.clone());
            exps.push(e.iter().map(|x| x + bump).collect());
        }
        LatticeModule::new(spec, frames, exps)
    }

    pub fn to_explicit(&self, order: usize) -> Result<ExplicitModule> {
        let n = self.spec.n;
        let x = (1..=n)
            .map(|i| self.arrow_x(i).to_poly(order))
            .collect::<Result<Vec<_>>>()?;
        let y = (1..=n)
            .map(|i| self.arrow_y(i).to_poly(order))
            .collect::<Result<Vec<_>>>()?;
        ExplicitModule::new(self.spec, self.rank, order, x, y)
    }

    /// `dim_Q` of the degree-`m` part of `L_v`: `#{c : e_{v,c} <= m}`.
    pub fn graded_dim(&self, v: usize, m: i64) -> usize {
        self.exps[v].iter().filter(|&&e| e <= m).count()
    }

    /// Basis of the constant matrices `phi` such that `t^degree phi` maps
    /// every `L_v` into `target`'s `L_v`.
    pub fn graded_hom(&self, target: &LatticeModule, degree: i64) -> Result<Vec<RationalMatrix>> {
        self.spec.check_same(&target.spec)?;
        let (rs, rt) = (self.rank, target.rank);
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for v in 0..self.spec.n {
            let (qs, _, es) = self.frame(v as i64);
            let (_, qt_inv, et) = target.frame(v as i64);
            for (r, &er) in et.iter().enumerate().take(rt) {
                for (c, &ec) in es.iter().enumerate().take(rs) {
                    if degree + ec - er >= 0 {
                        continue;
                    }
                    // (Qt^{-1} phi Qs)_{rc} = sum_ab Qt^{-1}[r][a] phi[a][b] Qs[b][c]
                    let mut row = vec![Rational::zero(); rt * rs];
                    for a in 0..rt {
                        for b in 0..rs {
                            row[a * rs + b] = qt_inv.get(r, a) * qs.get(b, c);
                        }
                    }
                    rows.push(row);
                }
            }
        }
        let basis = if rows.is_empty() {
            RationalMatrix::identity(rt * rs)
        } else {
            RationalMatrix::from_rows(rows)?.kernel_basis()
        };
        Ok((0..basis.rows())
            .map(|i| RationalMatrix::new(rt, rs, basis.row(i).to_vec()).expect("shape"))
            .collect())
    }

    /// Degrees outside `[lo, hi]` have `H = 0` (below) or `H = everything` (above).
    pub fn hom_degree_bounds(&self, target: &LatticeModule) -> (i64, i64) {
        let mut lo = i64::MIN;
        let mut hi = i64::MIN;
        for v in 0..self.spec.n {
            let mut vmin = i64::MAX;
            for &et in &target.exps[v] {
                for &es in &self.exps[v] {
                    vmin = vmin.min(et - es);
                    hi = hi.max(et - es);
                }
            }
            lo = lo.max(vmin);
        }
        (lo, hi)
    }

    /// Least degree with a nonzero homogeneous map, if any.
    pub fn min_hom_degree(&self, target: &LatticeModule) -> Result<i64> {
        let (lo, hi) = self.hom_degree_bounds(target);
        for d in lo..=hi {
            if !self.graded_hom(target, d)?.is_empty() {
                return Ok(d);
            }
        }
        Ok(hi)
    }

    /// Representatives of `End(M) / t End(M)`, grouped by degree.
    pub fn endomorphisms_mod_t(&self) -> Result<Vec<(i64, Vec<RationalMatrix>)>> {
        let (lo, hi) = self.hom_degree_bounds(self);
        let mut out = Vec::new();
        let mut prev: Vec<RationalMatrix> = Vec::new();
        for d in lo..=hi {
            let cur = self.graded_hom(self, d)?;
            let reps = extend_basis(&prev, &cur);
            if !reps.is_empty() {
                out.push((d, reps));
            }
            prev = cur;
        }
        Ok(out)
    }

    /// `End(M)` is local. Uses the trace form of `End/tEnd` acting on
    /// `M/tM`, where `tr(t^i phi * t^j psi) = n tr(phi psi) [i + j = 0]`;
    /// its rank is `dim End/rad`.
    pub fn is_indecomposable(&self) -> Result<bool> {
        let graded = self.endomorphisms_mod_t()?;
        let mut elems: Vec<(i64, &RationalMatrix)> = Vec::new();
        for (d, reps) in &graded {
            for r in reps {
                elems.push((*d, r));
            }
        }
        let m = elems.len();
        let mut g = RationalMatrix::zeros(m, m);
        for (i, (di, a)) in elems.iter().enumerate() {
            for (j, (dj, b)) in elems.iter().enumerate() {
                if di + dj == 0 {
                    g.set(i, j, a.mul(b)?.trace()? * rat(self.spec.n as i64));
                }
            }
        }
        Ok(g.rank() == 1)
    }
}

/// Elements of `cur` completing a basis of `span(prev)` to one of `span(cur)`.
pub(crate) fn extend_basis(prev: &[RationalMatrix], cur: &[RationalMatrix]) -> Vec<RationalMatrix> {
    let flat = |m: &RationalMatrix| -> Vec<Rational> {
        (0..m.rows()).flat_map(|r| m.row(r).to_vec()).collect()
    };
    let mut rows: Vec<Vec<Rational>> = prev.iter().map(flat).collect();
    let mut rank = if rows.is_empty() {
        0
    } else {
        RationalMatrix::from_rows(rows.clone()).unwrap().rank()
    };
    let mut out = Vec::new();
    for m in cur {
        rows.push(flat(m));
        let r = RationalMatrix::from_rows(rows.clone()).unwrap().rank();
        if r > rank {
            rank = r;
            out.push(m.clone());
        } else {
            rows.pop();
        }
    }
    out
}

impl LatticeModule {
    /// Whether two modules agree up to the choice of frames at each vertex.
    pub fn same_lattices(&self, other: &LatticeModule) -> Result<bool> {
        if self.spec != other.spec || self.rank != other.rank {
            return Ok(false);
        }
        let id = RationalMatrix::identity(self.rank);
        for v in 0..self.spec.n {
            let there = LatticeModule::transfer(self, other, v as i64, &id, 0);
            let back = LatticeModule::transfer(other, self, v as i64, &id, 0);
            if !there.is_integral() || !back.is_integral() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
