//! The truncated polynomial ring `Q[t]/(t^N)` and matrices over it.

use num_traits::{One, Zero};
use std::fmt;

use super::{Rational, RationalMatrix};
use crate::error::{Error, Result};

/// Element of `Q[t]/(t^N)`; `coeffs[j]` is the coefficient of `t^j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncPoly {
    coeffs: Vec<Rational>,
}

impl TruncPoly {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(Rational::one(), 0, order)
    }

    /// `c * t^e`, which is zero when `e >= order`.
    pub fn monomial(c: Rational, e: usize, order: usize) -> Self {
        let mut p = Self::zero(order);
        if e < order {
            p.coeffs[e] = c;
        }
        p
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order, Rational::zero());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, j: usize) -> &Rational {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, j: usize, c: Rational) {
        self.coeffs[j] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Lowest degree with a nonzero coefficient; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &TruncPoly) -> TruncPoly {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        TruncPoly { coeffs }
    }

    pub fn sub(&self, other: &TruncPoly) -> TruncPoly {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        TruncPoly { coeffs }
    }

    pub fn neg(&self) -> TruncPoly {
        TruncPoly {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> TruncPoly {
        TruncPoly {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &TruncPoly) -> TruncPoly {
        let n = self.order();
        let mut out = TruncPoly::zero(n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }

    /// Multiplication by `t^e`.
    pub fn shift_up(&self, e: usize) -> TruncPoly {
        let n = self.order();
        let mut out = TruncPoly::zero(n);
        for j in 0..n.saturating_sub(e) {
            out.coeffs[j + e] = self.coeffs[j].clone();
        }
        out
    }

    /// Division by `t^e`; the top `e` coefficients become zero.
    fn shift_down(&self, e: usize) -> TruncPoly {
        let n = self.order();
        let mut out = TruncPoly::zero(n);
        for j in e..n {
            out.coeffs[j - e] = self.coeffs[j].clone();
        }
        out
    }

    /// Inverse of a unit (nonzero constant term).
    pub fn inverse(&self) -> Option<TruncPoly> {
        let n = self.order();
        if self.coeffs[0].is_zero() {
            return None;
        }
        let c0 = self.coeffs[0].recip();
        let mut inv = TruncPoly::zero(n);
        inv.coeffs[0] = c0.clone();
        for j in 1..n {
            let mut acc = Rational::zero();
            for i in 1..=j {
                acc += &self.coeffs[i] * &inv.coeffs[j - i];
            }
            inv.coeffs[j] = -acc * &c0;
        }
        Some(inv)
    }
}

impl TruncPoly {
    /// Parses the display form, e.g. `1 + -1/2*t + 3*t^2`. Terms may also
    /// be joined with `-`, and `t^j` may omit its coefficient.
    pub fn parse(s: &str, order: usize) -> Result<TruncPoly> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut out = TruncPoly::zero(order);
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-')
                && bytes[i - 1] != b'+'
                && bytes[i - 1] != b'-'
            {
                terms.push(&compact[start..i]);
                start = if bytes[i] == b'+' { i + 1 } else { i };
            }
        }
        terms.push(&compact[start..]);
        for term in terms {
            let term = term.strip_prefix('+').unwrap_or(term);
            let (coef, power) = match term.find('t') {
                None => (term, 0),
                Some(pos) => {
                    let power = match &term[pos + 1..] {
                        "" => 1,
                        rest => rest
                            .strip_prefix('^')
                            .and_then(|e| e.parse::<usize>().ok())
                            .ok_or_else(|| Error::Parse(format!("bad exponent in {term:?}")))?,
                    };
                    let coef = term[..pos].strip_suffix('*').unwrap_or(&term[..pos]);
                    (coef, power)
                }
            };
            let c = match coef {
                "" | "+" => Rational::one(),
                "-" => -Rational::one(),
                c => super::parse_rational(c)?,
            };
            if power < order {
                out.coeffs[power] += c;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => c.to_string(),
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{j}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (mod t^{})", self.order())
    }
}

/// Dense matrix over `Q[t]/(t^N)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    order: usize,
    data: Vec<TruncPoly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, order: usize) -> Self {
        Self {
            rows,
            cols,
            order,
            data: vec![TruncPoly::zero(order); rows * cols],
        }
    }

    pub fn identity(n: usize, order: usize) -> Self {
        Self::scalar(TruncPoly::one(order), n)
    }

    pub fn scalar(p: TruncPoly, n: usize) -> Self {
        let order = p.order();
        let mut m = Self::zeros(n, n, order);
        for i in 0..n {
            m.data[i * n + i] = p.clone();
        }
        m
    }

    /// `t * I`.
    pub fn t_identity(n: usize, order: usize) -> Self {
        Self::scalar(TruncPoly::monomial(Rational::one(), 1, order), n)
    }

    /// Embeds a constant matrix.
    pub fn from_constant(m: &RationalMatrix, order: usize) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols(), order);
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.set(r, c, TruncPoly::monomial(m.get(r, c).clone(), 0, order));
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, r: usize, c: usize) -> &TruncPoly {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: TruncPoly) {
        debug_assert_eq!(p.order(), self.order);
        self.data[r * self.cols + c] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(TruncPoly::is_zero)
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows || self.order != other.order {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} (mod t^{}) by {}x{} (mod t^{})",
                self.rows, self.cols, self.order, other.rows, other.cols, other.order
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols, self.order);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = TruncPoly::zero(self.order);
                for k in 0..self.cols {
                    let a = self.get(r, k);
                    let b = other.get(k, c);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if (self.rows, self.cols, self.order) != (other.rows, other.cols, other.order) {
            return Err(Error::Dimension(
                "adding polynomial matrices of different shapes".into(),
            ));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(Self { data, ..*self })
    }

    pub fn scale(&self, s: &Rational) -> PolyMatrix {
        Self {
            data: self.data.iter().map(|p| p.scale(s)).collect(),
            ..*self
        }
    }

    /// Coefficient matrix of `t^j`.
    pub fn coefficient(&self, j: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).coeff(j).clone());
            }
        }
        m
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &PolyMatrix) -> PolyMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols, self.order);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                out.set(self.rows + r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    /// Reinterprets the entries at a different truncation order (padding
    /// with zeros or dropping high coefficients).
    pub fn with_order(&self, order: usize) -> PolyMatrix {
        let data = self
            .data
            .iter()
            .map(|p| TruncPoly::from_coeffs(p.coeffs()[..p.order().min(order)].to_vec(), order))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            order,
            data,
        }
    }
}

/// Valuations of the elementary divisors of `m` over the local ring
/// `Q[t]/(t^N)`, sorted ascending; one per `min(rows, cols)`.
///
/// Fails with [`Error::TruncationTooSmall`] when some invariant is not
/// below `N`, since it cannot then be told apart from zero.
pub fn smith_invariants_t(m: &PolyMatrix) -> Result<Vec<usize>> {
    let mut a = m.clone();
    let order = a.order;
    let size = a.rows.min(a.cols);
    let mut out = Vec::with_capacity(size);
    for step in 0..size {
        // entry of least valuation in the trailing block
        let mut best: Option<(usize, usize, usize)> = None;
        for r in step..a.rows {
            for c in step..a.cols {
                if let Some(v) = a.get(r, c).valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((v, pr, pc)) = best else {
            return Err(Error::TruncationTooSmall(order));
        };
        swap_rows(&mut a, step, pr);
        swap_cols(&mut a, step, pc);
        let unit_inv = a
            .get(step, step)
            .shift_down(v)
            .inverse()
            .expect("pivot has exact valuation");
        for r in step + 1..a.rows {
            if a.get(r, step).is_zero() {
                continue;
            }
            let factor = a.get(r, step).shift_down(v).mul(&unit_inv);
            for c in step..a.cols {
                let p = a.get(r, c).sub(&factor.mul(a.get(step, c)));
                a.set(r, c, p);
            }
        }
        for c in step + 1..a.cols {
            if a.get(step, c).is_zero() {
                continue;
            }
            let factor = a.get(step, c).shift_down(v).mul(&unit_inv);
            for r in step..a.rows {
                let p = a.get(r, c).sub(&factor.mul(a.get(r, step)));
                a.set(r, c, p);
            }
        }
        out.push(v);
    }
    out.sort_unstable();
    Ok(out)
}

fn swap_rows(a: &mut PolyMatrix, x: usize, y: usize) {
    if x != y {
        for c in 0..a.cols {
            a.data.swap(x * a.cols + c, y * a.cols + c);
        }
    }
}

fn swap_cols(a: &mut PolyMatrix, x: usize, y: usize) {
    if x != y {
        for r in 0..a.rows {
            a.data.swap(r * a.cols + x, r * a.cols + y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mono(c: i64, e: usize, n: usize) -> TruncPoly {
        TruncPoly::monomial(rat(c), e, n)
    }

    fn matrix(entries: &[&[TruncPoly]]) -> PolyMatrix {
        let order = entries[0][0].order();
        let mut m = PolyMatrix::zeros(entries.len(), entries[0].len(), order);
        for (r, row) in entries.iter().enumerate() {
            for (c, p) in row.iter().enumerate() {
                m.set(r, c, p.clone());
            }
        }
        m
    }

    #[test]
    fn parse_round_trip() {
        let p = TruncPoly::from_coeffs(vec![rat(1), ratio(-1, 2), rat(0), rat(3)], 5);
        assert_eq!(TruncPoly::parse(&p.to_string(), 5).unwrap(), p);
        assert_eq!(
            TruncPoly::parse("2 - t^3 + t", 5).unwrap(),
            TruncPoly::from_coeffs(vec![rat(2), rat(1), rat(0), rat(-1)], 5)
        );
        assert_eq!(TruncPoly::parse("0", 3).unwrap(), TruncPoly::zero(3));
        assert!(TruncPoly::parse("t^x", 3).is_err());
    }

    fn random_poly(rng: &mut ChaCha8Rng, order: usize) -> TruncPoly {
        let coeffs = (0..order).map(|_| rat(rng.gen_range(-3..=3))).collect();
        TruncPoly::from_coeffs(coeffs, order)
    }

    /// Random unimodular matrix: product of elementary operations with unit
    /// diagonal.
    fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, order: usize) -> PolyMatrix {
        let mut m = PolyMatrix::identity(n, order);
        for _ in 0..6 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let mut e = PolyMatrix::identity(n, order);
            if i == j {
                let mut u = random_poly(rng, order);
                u.set_coeff(0, ratio(rng.gen_range(1..=4), rng.gen_range(1..=3)));
                e.set(i, i, u);
            } else {
                e.set(i, j, random_poly(rng, order));
            }
            m = m.mul(&e).unwrap();
        }
        m
    }

    #[test]
    fn inverse_of_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let mut p = random_poly(&mut rng, 6);
            p.set_coeff(0, rat(3));
            assert_eq!(p.mul(&p.inverse().unwrap()), TruncPoly::one(6));
        }
        assert!(mono(1, 1, 4).inverse().is_none());
    }

    #[test]
    fn smith_examples() {
        let n = 4;
        let diag = matrix(&[
            &[mono(1, 0, n), mono(0, 0, n)],
            &[mono(0, 0, n), mono(1, 1, n)],
        ]);
        assert_eq!(smith_invariants_t(&diag).unwrap(), vec![0, 1]);
        let jordan = matrix(&[
            &[mono(1, 1, n), mono(1, 0, n)],
            &[mono(0, 0, n), mono(1, 1, n)],
        ]);
        assert_eq!(smith_invariants_t(&jordan).unwrap(), vec![0, 2]);
        assert_eq!(
            smith_invariants_t(&PolyMatrix::zeros(2, 2, n)),
            Err(Error::TruncationTooSmall(n))
        );
    }

    /// Brute-force oracle for 2x2: the first invariant is the least entry
    /// valuation, the sum is the valuation of the determinant.
    #[test]
    fn smith_two_by_two_matches_gcd_and_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let order = 8;
        for _ in 0..40 {
            let mut m = PolyMatrix::zeros(2, 2, order);
            for r in 0..2 {
                for c in 0..2 {
                    m.set(
                        r,
                        c,
                        mono(rng.gen_range(-2..=2), rng.gen_range(0..3), order),
                    );
                }
            }
            let det = m
                .get(0, 0)
                .mul(m.get(1, 1))
                .sub(&m.get(0, 1).mul(m.get(1, 0)));
            let Some(dv) = det.valuation() else { continue };
            let least = (0..4).filter_map(|i| m.data[i].valuation()).min().unwrap();
            assert_eq!(smith_invariants_t(&m).unwrap(), vec![least, dv - least]);
        }
    }

    #[test]
    fn smith_invariant_under_unimodular_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let order = 10;
        for _ in 0..10 {
            let mut m = PolyMatrix::zeros(3, 3, order);
            for i in 0..3 {
                m.set(i, i, mono(1, rng.gen_range(0..3), order));
            }
            let expected = smith_invariants_t(&m).unwrap();
            let p = random_unimodular(&mut rng, 3, order);
            let q = random_unimodular(&mut rng, 3, order);
            let conj = p.mul(&m).unwrap().mul(&q).unwrap();
            assert_eq!(smith_invariants_t(&conj).unwrap(), expected);
        }
    }
}
