//! Modules as explicit arrow matrices over `Q[t]/(t^N)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::lattice::{LatticeModule, DEFAULT_LINES};
use super::ses::{verify_lattice_ses, SesOptions};
use super::QuiverAlgebraSpec;
use crate::cyclic::LabelSet;
use crate::error::{Error, Result};
use crate::linalg::{smith_invariants_t, PolyMatrix, Rational, RationalMatrix, TruncPoly};
use crate::profiles::{Letter, Rank1Profile, Rank2Profile};
use crate::webs::Direction;

/// A representation of the quiver with free rank-`r` modules at each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitModule {
    spec: QuiverAlgebraSpec,
    rank: usize,
    order: usize,
    x: Vec<PolyMatrix>,
    y: Vec<PolyMatrix>,
}

/// A family of per-vertex maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleHom {
    pub maps: Vec<PolyMatrix>,
}

fn product(
    mats: impl Iterator<Item = PolyMatrix>,
    size: usize,
    order: usize,
) -> Result<PolyMatrix> {
    mats.into_iter()
        .try_fold(PolyMatrix::identity(size, order), |acc, m| acc.mul(&m))
}

impl ExplicitModule {
    /// Arrow `i` (`1..=n`) is stored at index `i - 1`. Relations are checked.
    pub fn new(
        spec: QuiverAlgebraSpec,
        rank: usize,
        order: usize,
        x: Vec<PolyMatrix>,
        y: Vec<PolyMatrix>,
    ) -> Result<Self> {
        if x.len() != spec.n || y.len() != spec.n {
            return Err(Error::Dimension(format!(
                "need {} arrows of each kind",
                spec.n
            )));
        }
        if x.iter()
            .chain(&y)
            .any(|m| m.rows() != rank || m.cols() != rank || m.order() != order)
        {
            return Err(Error::Dimension(format!(
                "arrows must be {rank}x{rank} mod t^{order}"
            )));
        }
        let m = Self {
            spec,
            rank,
            order,
            x,
            y,
        };
        m.check_relations()?;
        Ok(m)
    }

    pub fn spec(&self) -> QuiverAlgebraSpec {
        self.spec
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `x_i`, with `i` taken cyclically.
    pub fn x(&self, i: i64) -> &PolyMatrix {
        &self.x[self.spec.arrow(i) - 1]
    }

    pub fn y(&self, i: i64) -> &PolyMatrix {
        &self.y[self.spec.arrow(i) - 1]
    }

    /// `x_{v+k} ... x_{v+1}` as a matrix.
    pub fn x_path(&self, v: usize) -> Result<PolyMatrix> {
        let v = v as i64;
        product(
            (1..=self.spec.k as i64)
                .rev()
                .map(|j| self.x(v + j).clone()),
            self.rank,
            self.order,
        )
    }

    /// `y_{v-(n-k-1)} ... y_v`.
    pub fn y_path(&self, v: usize) -> Result<PolyMatrix> {
        let v = v as i64;
        let len = (self.spec.n - self.spec.k) as i64;
        product(
            (0..len).map(|j| self.y(v - len + 1 + j).clone()),
            self.rank,
            self.order,
        )
    }

    /// `y_{to+1} ... y_{from}`: the map from vertex `from` down to `to`.
    pub fn y_walk(&self, from: i64, to: i64) -> Result<PolyMatrix> {
        product(
            ((to + 1)..=from).map(|j| self.y(j).clone()),
            self.rank,
            self.order,
        )
    }

    pub fn check_relations(&self) -> Result<()> {
        let t = PolyMatrix::t_identity(self.rank, self.order);
        for i in 1..=self.spec.n as i64 {
            if self.x(i).mul(self.y(i))? != t {
                return Err(Error::Relation(format!("x_{i} y_{i} != t")));
            }
            if self.y(i).mul(self.x(i))? != t {
                return Err(Error::Relation(format!("y_{i} x_{i} != t")));
            }
        }
        for v in 0..self.spec.n {
            if self.x_path(v)? != self.y_path(v)? {
                return Err(Error::Relation(format!(
                    "x-path and y-path differ from vertex {v}"
                )));
            }
        }
        Ok(())
    }

    /// Dimension over `Q` at every vertex.
    pub fn vertex_dim(&self) -> usize {
        self.rank * self.order
    }

    pub fn direct_sum(&self, other: &ExplicitModule) -> Result<ExplicitModule> {
        self.spec.check_same(&other.spec)?;
        if self.order != other.order {
            return Err(Error::Dimension(
                "direct sum of different truncations".into(),
            ));
        }
        let x = self
            .x
            .iter()
            .zip(&other.x)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        let y = self
            .y
            .iter()
            .zip(&other.y)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        ExplicitModule::new(self.spec, self.rank + other.rank, self.order, x, y)
    }

    /// Inserts a new arrow `i` carrying `x = t, y = 1` (up) or `x = 1, y = t` (down).
    pub fn stretch(&self, direction: Direction, i: usize) -> Result<ExplicitModule> {
        let n = self.spec.n;
        if i == 0 || i > n + 1 {
            return Err(Error::LabelOutOfRange { label: i, n: n + 1 });
        }
        let (r, order) = (self.rank, self.order);
        let (new_x, new_y, k) = match direction {
            Direction::Up => (
                PolyMatrix::t_identity(r, order),
                PolyMatrix::identity(r, order),
                self.spec.k,
            ),
            Direction::Down => (
                PolyMatrix::identity(r, order),
                PolyMatrix::t_identity(r, order),
                self.spec.k + 1,
            ),
        };
        let mut x = self.x.clone();
        let mut y = self.y.clone();
        x.insert(i - 1, new_x);
        y.insert(i - 1, new_y);
        ExplicitModule::new(QuiverAlgebraSpec::new(k, n + 1)?, r, order, x, y)
    }

    fn x_valuations(&self, i: usize) -> Result<Vec<usize>> {
        let v = smith_invariants_t(&self.x[i - 1])?;
        if v.iter().any(|&e| e > 1) {
            return Err(Error::NotTwoContour(format!("x_{i} has invariants {v:?}")));
        }
        Ok(v)
    }

    /// The set of down steps of a rank-1 module.
    pub fn rank1_profile(&self) -> Result<Rank1Profile> {
        if self.rank != 1 {
            return Err(Error::Dimension(format!(
                "rank-1 profile of a rank-{} module",
                self.rank
            )));
        }
        let mut set = Vec::new();
        for i in 1..=self.spec.n {
            if self.x_valuations(i)? == [0] {
                set.push(i);
            }
        }
        Ok(Rank1Profile {
            set: LabelSet::new(self.spec.n, set)?,
        })
    }

    /// Reads the profile off the arrows.
    ///
    /// The letters `U/U`, `D/D` come from the invariants of `x_i`. Mixed
    /// positions alternate between box openings and closings; a consecutive
    /// pair `m < m'` is an opening followed by a closing exactly when the
    /// inclusion `M_{m'} -> M_{m-1}` is `t^e` times an isomorphism, since
    /// the strand line is the same on both ends. Three such peaks and the
    /// gaps between them fix every box width.
    pub fn extract_profile(&self) -> Result<Rank2Profile> {
        if self.rank != 2 {
            return Err(Error::Dimension(format!(
                "profile extraction needs rank 2, got {}",
                self.rank
            )));
        }
        let n = self.spec.n;
        let mut letters = vec![Letter::UU; n];
        let mut mixed = Vec::new();
        for i in 1..=n {
            match self.x_valuations(i)?.as_slice() {
                [0, 0] => letters[i - 1] = Letter::DD,
                [1, 1] => letters[i - 1] = Letter::UU,
                _ => mixed.push(i),
            }
        }
        let m = mixed.len();
        let mut peaks = Vec::new();
        for s in 0..m {
            let a = mixed[s] as i64;
            let mut b = mixed[(s + 1) % m] as i64;
            if b <= a {
                b += n as i64;
            }
            let inv = smith_invariants_t(&self.y_walk(b, a - 1)?)?;
            if inv[0] == inv[1] {
                peaks.push(s);
            }
        }
        if peaks.len() != 3 {
            return Err(Error::NotThreeBoxes(peaks.len()));
        }
        // gap[j]: mixed positions strictly between peak j's closing and peak j+1's opening
        let gap: Vec<usize> = (0..3)
            .map(|j| (peaks[(j + 1) % 3] + 2 * m - peaks[j] - 2) % m)
            .collect();
        let half = m / 2;
        let mut width = [0usize; 3];
        for j in 0..3 {
            // w_j = m/2 - (gap[j+1] + 2)
            let other = gap[(j + 1) % 3] + 2;
            if m % 2 != 0 || half <= other {
                return Err(Error::NotTwoContour(format!(
                    "inconsistent box widths from peaks {peaks:?}"
                )));
            }
            width[j] = half - other;
        }
        for j in 0..3 {
            let s = peaks[j];
            letters[mixed[s] - 1] = Letter::UD;
            for q in 0..width[j] {
                letters[mixed[(s + 1 + q) % m] - 1] = Letter::DU;
            }
            for q in 0..gap[j].saturating_sub(width[j] - 1) {
                letters[mixed[(s + 1 + width[j] + q) % m] - 1] = Letter::UD;
            }
        }
        let p = Rank2Profile::from_letters(&letters)?;
        if p.box_count()? != 3 {
            return Err(Error::NotTwoContour(format!(
                "reconstructed profile {p} is not three boxes"
            )));
        }
        Ok(p)
    }

    /// Basis of the maps `self -> other` commuting with all arrows, over the
    /// truncated ring.
    ///
    /// The linear system is sparse and splits into small blocks for graded
    /// modules, so it is solved one connected component at a time.
    pub fn hom_space(&self, other: &ExplicitModule) -> Result<Vec<ModuleHom>> {
        self.spec.check_same(&other.spec)?;
        if self.order != other.order {
            return Err(Error::Dimension("Hom between different truncations".into()));
        }
        let (n, rs, rt, order) = (self.spec.n, self.rank, other.rank, self.order);
        let var = |v: usize, a: usize, b: usize, m: usize| ((v * rt + a) * rs + b) * order + m;
        let nvars = n * rt * rs * order;
        let mut equations: Vec<BTreeMap<usize, Rational>> = Vec::new();
        // h_w A - A' h_u = 0 for (A, A', u, w) = (x_i, x'_i, i-1, i) and (y_i, y'_i, i, i-1)
        let mut push = |src: &PolyMatrix, dst: &PolyMatrix, u: usize, w: usize| {
            for a in 0..rt {
                for b in 0..rs {
                    for m in 0..order {
                        let mut eq: BTreeMap<usize, Rational> = BTreeMap::new();
                        for c in 0..rs {
                            let p = src.get(c, b);
                            for j in 0..=m {
                                let coef = p.coeff(m - j);
                                if !coef.is_zero() {
                                    *eq.entry(var(w, a, c, j)).or_insert_with(Rational::zero) +=
                                        coef;
                                }
                            }
                        }
                        for c in 0..rt {
                            let p = dst.get(a, c);
                            for j in 0..=m {
                                let coef = p.coeff(m - j);
                                if !coef.is_zero() {
                                    *eq.entry(var(u, c, b, j)).or_insert_with(Rational::zero) -=
                                        coef;
                                }
                            }
                        }
                        eq.retain(|_, c| !c.is_zero());
                        if !eq.is_empty() {
                            equations.push(eq);
                        }
                    }
                }
            }
        };
        for i in 1..=n {
            let (u, w) = (i - 1, i % n);
            push(&self.x[i - 1], &other.x[i - 1], u, w);
            push(&self.y[i - 1], &other.y[i - 1], w, u);
        }
        let solutions = solve_sparse(nvars, &equations);
        Ok(solutions
            .into_iter()
            .map(|sol| {
                let maps = (0..n)
                    .map(|v| {
                        let mut h = PolyMatrix::zeros(rt, rs, order);
                        for a in 0..rt {
                            for b in 0..rs {
                                let coeffs = (0..order)
                                    .map(|m| {
                                        sol.get(&var(v, a, b, m))
                                            .cloned()
                                            .unwrap_or_else(Rational::zero)
                                    })
                                    .collect();
                                h.set(a, b, TruncPoly::from_coeffs(coeffs, order));
                            }
                        }
                        h
                    })
                    .collect();
                ModuleHom { maps }
            })
            .collect())
    }

    /// `End(M)` is local. Uses the trace form on the action of `End(M)` on
    /// `M/tM`: endomorphisms acting by zero there form a nilpotent ideal,
    /// so the rank of the form is `dim End / rad`.
    pub fn is_indecomposable(&self) -> Result<bool> {
        let ends = self.hom_space(self)?;
        let (n, r) = (self.spec.n, self.rank);
        // constant terms of the vertex maps, flattened and reduced to a basis of their span
        let rows: Vec<Vec<Rational>> = ends
            .iter()
            .map(|h| {
                h.maps
                    .iter()
                    .flat_map(|m| {
                        let c = m.coefficient(0);
                        (0..r).flat_map(move |i| c.row(i).to_vec())
                    })
                    .collect()
            })
            .collect();
        let mut span = RationalMatrix::from_rows(rows)?;
        let dim = span.rref().len();
        let block = |row: usize, v: usize| -> RationalMatrix {
            RationalMatrix::new(r, r, span.row(row)[v * r * r..(v + 1) * r * r].to_vec())
                .expect("square block")
        };
        let mut g = RationalMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Rational::zero();
                for v in 0..n {
                    acc += block(i, v).mul(&block(j, v))?.trace()?;
                }
                g.set(i, j, acc);
            }
        }
        Ok(g.rank() == 1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mat = |m: &PolyMatrix| -> Vec<Vec<String>> {
            (0..m.rows())
                .map(|r| (0..m.cols()).map(|c| m.get(r, c).to_string()).collect())
                .collect()
        };
        serde_json::to_value(ModuleJson {
            k: self.spec.k,
            n: self.spec.n,
            order: self.order,
            rank: self.rank,
            x: self.x.iter().map(mat).collect(),
            y: self.y.iter().map(mat).collect(),
        })
        .expect("plain data")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<ExplicitModule> {
        let raw: ModuleJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let spec = QuiverAlgebraSpec::new(raw.k, raw.n)?;
        let parse = |rows: &Vec<Vec<String>>| -> Result<PolyMatrix> {
            let mut m = PolyMatrix::zeros(raw.rank, raw.rank, raw.order);
            if rows.len() != raw.rank || rows.iter().any(|r| r.len() != raw.rank) {
                return Err(Error::Parse(format!(
                    "arrow matrices must be {0}x{0}",
                    raw.rank
                )));
            }
            for (r, row) in rows.iter().enumerate() {
                for (c, s) in row.iter().enumerate() {
                    m.set(r, c, TruncPoly::parse(s, raw.order)?);
                }
            }
            Ok(m)
        };
        let x = raw.x.iter().map(parse).collect::<Result<Vec<_>>>()?;
        let y = raw.y.iter().map(parse).collect::<Result<Vec<_>>>()?;
        ExplicitModule::new(spec, raw.rank, raw.order, x, y)
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleJson {
    k: usize,
    n: usize,
    #[serde(rename = "N")]
    order: usize,
    rank: usize,
    x: Vec<Vec<Vec<String>>>,
    y: Vec<Vec<Vec<String>>>,
}

/// Null space of a sparse system, one connected block of variables at a
/// time. Each solution maps variable index to value.
fn solve_sparse(
    nvars: usize,
    equations: &[BTreeMap<usize, Rational>],
) -> Vec<BTreeMap<usize, Rational>> {
    let mut parent: Vec<usize> = (0..nvars).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for eq in equations {
        let mut vars = eq.keys();
        if let Some(&first) = vars.next() {
            let root = find(&mut parent, first);
            for &v in vars {
                let r = find(&mut parent, v);
                parent[r] = root;
            }
        }
    }
    let mut comp_vars: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..nvars {
        let r = find(&mut parent, v);
        comp_vars.entry(r).or_default().push(v);
    }
    let mut comp_eqs: BTreeMap<usize, Vec<&BTreeMap<usize, Rational>>> = BTreeMap::new();
    for eq in equations {
        let r = find(&mut parent, *eq.keys().next().expect("nonempty"));
        comp_eqs.entry(r).or_default().push(eq);
    }
    let mut out = Vec::new();
    for (root, vars) in comp_vars {
        let Some(eqs) = comp_eqs.get(&root) else {
            for v in vars {
                out.push(BTreeMap::from([(v, Rational::one())]));
            }
            continue;
        };
        let index: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let rows = eqs
            .iter()
            .map(|eq| {
                let mut row = vec![Rational::zero(); vars.len()];
                for (v, c) in eq.iter() {
                    row[index[v]] = c.clone();
                }
                row
            })
            .collect();
        let kernel = RationalMatrix::from_rows(rows)
            .expect("rectangular")
            .kernel_basis();
        for i in 0..kernel.rows() {
            out.push(
                kernel
                    .row(i)
                    .iter()
                    .zip(&vars)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, &v)| (v, c.clone()))
                    .collect(),
            );
        }
    }
    out
}

impl ModuleHom {
    pub fn identity(m: &ExplicitModule) -> ModuleHom {
        ModuleHom {
            maps: vec![PolyMatrix::identity(m.rank, m.order); m.spec.n],
        }
    }

    pub fn scale(&self, c: &Rational) -> ModuleHom {
        ModuleHom {
            maps: self.maps.iter().map(|m| m.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &ModuleHom) -> Result<ModuleHom> {
        Ok(ModuleHom {
            maps: self
                .maps
                .iter()
                .zip(&other.maps)
                .map(|(a, b)| a.add(b))
                .collect::<Result<_>>()?,
        })
    }

    /// Multiplication by `t`.
    pub fn times_t(&self) -> ModuleHom {
        ModuleHom {
            maps: self
                .maps
                .iter()
                .map(|m| {
                    let mut out = m.clone();
                    for r in 0..m.rows() {
                        for c in 0..m.cols() {
                            out.set(r, c, m.get(r, c).shift_up(1));
                        }
                    }
                    out
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(PolyMatrix::is_zero)
    }

    /// Checks that the maps intertwine the arrows of `src` and `dst`.
    pub fn check(&self, src: &ExplicitModule, dst: &ExplicitModule) -> Result<()> {
        src.spec.check_same(&dst.spec)?;
        let n = src.spec.n;
        if self.maps.len() != n {
            return Err(Error::Dimension(format!("need {n} vertex maps")));
        }
        for i in 1..=n {
            let (u, w) = (i - 1, i % n);
            if self.maps[w].mul(&src.x[i - 1])? != dst.x[i - 1].mul(&self.maps[u])? {
                return Err(Error::Relation(format!("map does not commute with x_{i}")));
            }
            if self.maps[u].mul(&src.y[i - 1])? != dst.y[i - 1].mul(&self.maps[w])? {
                return Err(Error::Relation(format!("map does not commute with y_{i}")));
            }
        }
        Ok(())
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ModuleHom) -> Result<ModuleHom> {
        Ok(ModuleHom {
            maps: self
                .maps
                .iter()
                .zip(&first.maps)
                .map(|(a, b)| a.mul(b))
                .collect::<Result<_>>()?,
        })
    }

    /// Block-diagonal reduction mod `t` over all vertices.
    pub fn top(&self) -> RationalMatrix {
        let (rows, cols) = (self.maps[0].rows(), self.maps[0].cols());
        let n = self.maps.len();
        let mut out = RationalMatrix::zeros(n * rows, n * cols);
        for (v, m) in self.maps.iter().enumerate() {
            let c0 = m.coefficient(0);
            for r in 0..rows {
                for c in 0..cols {
                    out.set(v * rows + r, v * cols + c, c0.get(r, c).clone());
                }
            }
        }
        out
    }

    /// The map on the total space over `Q`, with basis `t^m e_c` at vertex `v`
    /// indexed `(v * rank + c) * N + m`.
    pub fn linear_map(&self) -> RationalMatrix {
        let (rows, cols, order) = (
            self.maps[0].rows(),
            self.maps[0].cols(),
            self.maps[0].order(),
        );
        let n = self.maps.len();
        let mut out = RationalMatrix::zeros(n * rows * order, n * cols * order);
        for (v, h) in self.maps.iter().enumerate() {
            for a in 0..rows {
                for c in 0..cols {
                    let p = h.get(a, c);
                    for m in 0..order {
                        for j in 0..order - m {
                            let coef = p.coeff(j);
                            if !coef.is_zero() {
                                out.set(
                                    ((v * rows + a) * order) + m + j,
                                    ((v * cols + c) * order) + m,
                                    coef.clone(),
                                );
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.maps
                .iter()
                .map(|m| {
                    serde_json::json!((0..m.rows())
                        .map(|r| (0..m.cols())
                            .map(|c| m.get(r, c).to_string())
                            .collect::<Vec<_>>())
                        .collect::<Vec<_>>())
                })
                .collect(),
        )
    }
}

/// The rank-1 module of a `k`-subset, truncated at `2n`.
pub fn module_from_rank1(profile: &Rank1Profile) -> Result<ExplicitModule> {
    module_from_rank1_at(profile, 2 * profile.n())
}

pub fn module_from_rank1_at(profile: &Rank1Profile, order: usize) -> Result<ExplicitModule> {
    let spec = QuiverAlgebraSpec::new(profile.k(), profile.n())?;
    LatticeModule::rank1(spec, &profile.set)?.to_explicit(order)
}

/// The indecomposable rank-2 module of a three-box profile, truncated at `2n`.
pub fn module_from_profile(profile: &Rank2Profile) -> Result<ExplicitModule> {
    module_from_profile_at(profile, 2 * profile.n())
}

pub fn module_from_profile_at(profile: &Rank2Profile, order: usize) -> Result<ExplicitModule> {
    validated_lattice(profile, order).map(|(_, m)| m)
}

/// Alternative line placements tried after the default one.
fn line_choices() -> Vec<[[i64; 2]; 3]> {
    let [a, b, c] = DEFAULT_LINES;
    let mut out = vec![
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ];
    out.push([[1, 0], [1, 1], [1, -1]]);
    out.push([[0, 1], [1, 2], [1, -1]]);
    out
}

/// Builds the lattice model of a profile and validates it: relations
/// (at `order` and `order + n`), profile round trip, indecomposability and
/// the extension `0 -> M_J -> M -> M_I -> 0`.
pub fn validated_lattice(
    profile: &Rank2Profile,
    order: usize,
) -> Result<(LatticeModule, ExplicitModule)> {
    let boxes = profile.box_count()?;
    if boxes != 3 {
        return Err(Error::NotThreeBoxes(boxes));
    }
    let spec = QuiverAlgebraSpec::new(profile.k(), profile.n())?;
    let mut last_err = None;
    for lines in line_choices() {
        let attempt = (|| -> Result<(LatticeModule, ExplicitModule)> {
            let lattice = LatticeModule::from_profile_with_lines(profile, &lines)?;
            let explicit = lattice.to_explicit(order)?;
            lattice.to_explicit(order + spec.n)?;
            let extracted = explicit.extract_profile()?;
            if &extracted != profile {
                return Err(Error::NotTwoContour(format!(
                    "extracted {extracted}, expected {profile}"
                )));
            }
            if !lattice.is_indecomposable()? {
                return Err(Error::NotTwoContour("decomposable".into()));
            }
            let sub = LatticeModule::rank1(spec, profile.bottom())?;
            let quotient = LatticeModule::rank1(spec, profile.top())?;
            verify_lattice_ses(
                &[sub],
                std::slice::from_ref(&lattice),
                &[quotient],
                &SesOptions::light(),
            )?;
            Ok((lattice, explicit))
        })();
        match attempt {
            Ok(found) => return Ok(found),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one placement"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{algebra_radical, rat};
    use crate::profiles::psi;
    use crate::webs::{enumerate_webs, Rank2Web};

    fn rank1(n: usize, set: &[usize]) -> ExplicitModule {
        module_from_rank1(&Rank1Profile {
            set: LabelSet::new(n, set.iter().copied()).unwrap(),
        })
        .unwrap()
    }

    /// Dense solve of the commuting equations on the total space.
    fn dense_hom_dim(a: &ExplicitModule, b: &ExplicitModule) -> usize {
        let n = a.spec().n;
        let (ra, rb, order) = (a.rank(), b.rank(), a.order());
        let nvars = n * rb * ra * order;
        let mut rows = Vec::new();
        let unit = |var: usize| -> ModuleHom {
            let mut maps = vec![PolyMatrix::zeros(rb, ra, order); n];
            let m = var % order;
            let rest = var / order;
            let (bb, rest) = (rest % ra, rest / ra);
            let (aa, v) = (rest % rb, rest / rb);
            maps[v].set(aa, bb, TruncPoly::monomial(Rational::one(), m, order));
            ModuleHom { maps }
        };
        let mut columns = Vec::new();
        for var in 0..nvars {
            let h = unit(var);
            let mut col = Vec::new();
            for i in 1..=n {
                let (u, w) = (i - 1, i % n);
                let dx = h.maps[w]
                    .mul(&a.x[i - 1])
                    .unwrap()
                    .add(&b.x[i - 1].mul(&h.maps[u]).unwrap().scale(&rat(-1)))
                    .unwrap();
                let dy = h.maps[u]
                    .mul(&a.y[i - 1])
                    .unwrap()
                    .add(&b.y[i - 1].mul(&h.maps[w]).unwrap().scale(&rat(-1)))
                    .unwrap();
                for d in [dx, dy] {
                    for r in 0..d.rows() {
                        for c in 0..d.cols() {
                            col.extend(d.get(r, c).coeffs().iter().cloned());
                        }
                    }
                }
            }
            columns.push(col);
        }
        for r in 0..columns[0].len() {
            rows.push(columns.iter().map(|c| c[r].clone()).collect::<Vec<_>>());
        }
        nvars - RationalMatrix::from_rows(rows).unwrap().rank()
    }

    #[test]
    fn rank1_contour_and_relations() {
        let m = rank1(6, &[1, 2, 5]);
        let letters: String = (1..=6)
            .map(|i| {
                if smith_invariants_t(m.x(i)).unwrap() == [0] {
                    'D'
                } else {
                    'U'
                }
            })
            .collect();
        assert_eq!(letters, "DDUUDU");
        let around = product((1..=6).rev().map(|i| m.x(i).clone()), 1, m.order()).unwrap();
        assert_eq!(
            around,
            PolyMatrix::scalar(TruncPoly::monomial(rat(1), 3, m.order()), 1)
        );
        let m = rank1(7, &[1, 2, 3]);
        for i in 1..=3 {
            assert_eq!(m.x(i), &PolyMatrix::identity(1, 14));
        }
        assert_eq!(m.x_path(0).unwrap(), m.y_path(0).unwrap());
        assert_eq!(
            m.rank1_profile().unwrap().set,
            LabelSet::new(7, [1, 2, 3]).unwrap()
        );
    }

    #[test]
    fn relation_failures_are_reported() {
        let m = rank1(4, &[1, 3]);
        let mut x = m.x.clone();
        x[0] = PolyMatrix::identity(1, m.order());
        x[1] = PolyMatrix::identity(1, m.order());
        assert!(matches!(
            ExplicitModule::new(m.spec(), 1, m.order(), x, m.y.clone()),
            Err(Error::Relation(_))
        ));
    }

    #[test]
    fn hom_space_basics() {
        let m = rank1(6, &[1, 3, 5]);
        let ends = m.hom_space(&m).unwrap();
        let id = ModuleHom::identity(&m);
        let span = |hs: &[ModuleHom], extra: &ModuleHom| {
            let flat = |h: &ModuleHom| -> Vec<Rational> {
                let l = h.linear_map();
                (0..l.rows()).flat_map(|r| l.row(r).to_vec()).collect()
            };
            let mut rows: Vec<_> = hs.iter().map(flat).collect();
            let before = RationalMatrix::from_rows(rows.clone()).unwrap().rank();
            rows.push(flat(extra));
            RationalMatrix::from_rows(rows).unwrap().rank() == before
        };
        assert!(span(&ends, &id));
        assert!(span(&ends, &id.times_t()));
        for h in &ends {
            h.check(&m, &m).unwrap();
        }
        let other = module_from_rank1(&Rank1Profile {
            set: LabelSet::new(8, [1, 2, 3, 4]).unwrap(),
        })
        .unwrap();
        assert!(matches!(m.hom_space(&other), Err(Error::SpecMismatch(..))));
    }

    #[test]
    fn hom_space_matches_dense_solve() {
        let mk = |s: &[usize]| {
            module_from_rank1_at(
                &Rank1Profile {
                    set: LabelSet::new(6, s.iter().copied()).unwrap(),
                },
                4,
            )
            .unwrap()
        };
        let pairs = [
            ([1, 3, 5], [2, 4, 6]),
            ([1, 2, 4], [3, 5, 6]),
            ([1, 2, 3], [1, 2, 3]),
        ];
        for (a, b) in pairs {
            let (a, b) = (mk(&a), mk(&b));
            assert_eq!(a.hom_space(&b).unwrap().len(), dense_hom_dim(&a, &b));
        }
        let p = psi(&enumerate_webs(3, 6)[0]).unwrap();
        let m = module_from_profile_at(&p, 3).unwrap();
        let r = module_from_rank1_at(
            &Rank1Profile {
                set: LabelSet::new(6, [1, 3, 5]).unwrap(),
            },
            3,
        )
        .unwrap();
        assert_eq!(m.hom_space(&r).unwrap().len(), dense_hom_dim(&m, &r));
        assert_eq!(m.hom_space(&m).unwrap().len(), dense_hom_dim(&m, &m));
    }

    #[test]
    fn indecomposability_against_radical() {
        let mk = |s: &[usize]| {
            module_from_rank1_at(
                &Rank1Profile {
                    set: LabelSet::new(6, s.iter().copied()).unwrap(),
                },
                3,
            )
            .unwrap()
        };
        let a = mk(&[1, 3, 5]);
        let b = mk(&[2, 4, 6]);
        let sum = a.direct_sum(&b).unwrap();
        for (m, expect) in [(&a, 1), (&sum, 2)] {
            let basis: Vec<RationalMatrix> = m
                .hom_space(m)
                .unwrap()
                .iter()
                .map(ModuleHom::linear_map)
                .collect();
            let rad = algebra_radical(&basis).unwrap();
            assert_eq!(basis.len() - rad.len(), expect);
            assert_eq!(m.is_indecomposable().unwrap(), expect == 1);
        }
    }

    #[test]
    fn profile_modules_round_trip() {
        for (k, n) in [(3, 6), (4, 8)] {
            for w in enumerate_webs(k, n) {
                let p = psi(&w).unwrap();
                let m = module_from_profile(&p).unwrap();
                assert_eq!(m.extract_profile().unwrap(), p);
                assert!(m.is_indecomposable().unwrap(), "{p}");
            }
        }
    }

    #[test]
    fn extraction_errors() {
        let a = rank1(6, &[1, 3, 5]);
        assert!(matches!(a.extract_profile(), Err(Error::Dimension(_))));
        let sum = a.direct_sum(&rank1(6, &[2, 4, 6])).unwrap();
        assert!(matches!(
            sum.extract_profile(),
            Err(Error::NotThreeBoxes(6))
        ));
        let same = Rank2Profile::from_labels(6, &[1, 3, 5], &[1, 3, 5]).unwrap();
        assert!(matches!(
            module_from_profile(&same),
            Err(Error::NotThreeBoxes(0))
        ));
    }

    #[test]
    fn stretching_modules() {
        let w = Rank2Web::from_labels(3, 6, &[1, 2], &[3, 4], &[5, 6], &[]).unwrap();
        let p = psi(&w).unwrap();
        assert_eq!(
            p,
            Rank2Profile::from_labels(6, &[1, 3, 5], &[2, 4, 6]).unwrap()
        );
        let m = module_from_profile(&p).unwrap();
        let u3 = m.stretch(Direction::Up, 3).unwrap();
        assert_eq!(
            u3.extract_profile().unwrap(),
            Rank2Profile::from_labels(7, &[1, 4, 6], &[2, 5, 7]).unwrap()
        );
        for w in enumerate_webs(3, 6) {
            let p = psi(&w).unwrap();
            let m = module_from_profile(&p).unwrap();
            for i in 1..=7 {
                for dir in [Direction::Up, Direction::Down] {
                    let s = m.stretch(dir, i).unwrap();
                    assert_eq!(s.extract_profile().unwrap(), p.stretch(dir, i).unwrap());
                    assert!(s.is_indecomposable().unwrap());
                }
            }
        }
        let r = rank1(6, &[1, 3, 5]);
        let d = r.stretch(Direction::Down, 2).unwrap();
        assert_eq!(
            d.rank1_profile().unwrap().set,
            LabelSet::new(7, [1, 2, 4, 6]).unwrap()
        );
    }

    #[test]
    fn json_round_trip() {
        let p = psi(&enumerate_webs(3, 6)[1]).unwrap();
        let m = module_from_profile(&p).unwrap();
        let back = ExplicitModule::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let j = m.to_json();
        assert_eq!(j["N"], 12);
        assert_eq!(j["x"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn seven_eighteen_dimensions() {
        use crate::cactus::TcfrParams;
        let p = psi(&TcfrParams::new(7, 5, 1, 4, 4).unwrap().rank2_web().unwrap()).unwrap();
        let m = module_from_profile(&p).unwrap();
        assert_eq!(m.order(), 36);
        assert_eq!(m.vertex_dim(), 72);
    }
}
