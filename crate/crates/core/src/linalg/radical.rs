//! Jacobson radical of a finite-dimensional matrix algebra in characteristic 0.

use num_traits::Zero;

use super::{Rational, RationalMatrix};
use crate::error::{Error, Result};

fn flatten(m: &RationalMatrix) -> Vec<Rational> {
    (0..m.rows()).flat_map(|r| m.row(r).to_vec()).collect()
}

fn in_span(basis_rows: &RationalMatrix, rank: usize, v: Vec<Rational>) -> bool {
    let mut rows: Vec<Vec<Rational>> = (0..basis_rows.rows())
        .map(|r| basis_rows.row(r).to_vec())
        .collect();
    rows.push(v);
    RationalMatrix::from_rows(rows)
        .expect("uniform rows")
        .rank()
        == rank
}

/// `tr(a b)` without forming the product.
fn trace_of_product(a: &RationalMatrix, b: &RationalMatrix) -> Rational {
    let mut acc = Rational::zero();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = a.get(i, j);
            if !x.is_zero() {
                acc += x * b.get(j, i);
            }
        }
    }
    acc
}

/// Basis of the Jacobson radical of the algebra spanned by `basis`.
///
/// Uses the trace form of the given (faithful) matrix representation: in
/// characteristic 0 the radical is exactly `{a : tr(ab) = 0 for all b}`.
pub fn algebra_radical(basis: &[RationalMatrix]) -> Result<Vec<RationalMatrix>> {
    let Some(first) = basis.first() else {
        return Ok(Vec::new());
    };
    let d = first.rows();
    if basis.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(Error::Dimension(
            "algebra basis must be square matrices of one size".into(),
        ));
    }
    let flat = RationalMatrix::from_rows(basis.iter().map(flatten).collect())?;
    let rank = flat.rank();
    if rank != basis.len() {
        return Err(Error::Dimension(
            "algebra basis is linearly dependent".into(),
        ));
    }
    for a in basis {
        for b in basis {
            if !in_span(&flat, rank, flatten(&a.mul(b)?)) {
                return Err(Error::NotClosed);
            }
        }
    }
    let m = basis.len();
    let mut gram = RationalMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = trace_of_product(&basis[i], &basis[j]);
            gram.set(j, i, v.clone());
            gram.set(i, j, v);
        }
    }
    let kernel = gram.kernel_basis();
    let mut out = Vec::with_capacity(kernel.rows());
    for r in 0..kernel.rows() {
        let mut acc = RationalMatrix::zeros(d, d);
        for (c, coef) in kernel.row(r).iter().enumerate() {
            if !coef.is_zero() {
                acc = acc.add(&basis[c].scale(coef))?;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Checks that every product of `len` elements of `ideal` vanishes.
pub fn is_nilpotent_ideal(ideal: &[RationalMatrix], len: usize) -> Result<bool> {
    if ideal.is_empty() {
        return Ok(true);
    }
    let mut products: Vec<RationalMatrix> = ideal.to_vec();
    for _ in 1..len {
        let mut next = Vec::new();
        for p in &products {
            for a in ideal {
                let q = p.mul(a)?;
                if !q.is_zero() {
                    next.push(q);
                }
            }
        }
        // keep a spanning set only
        if next.is_empty() {
            return Ok(true);
        }
        let flat = RationalMatrix::from_rows(next.iter().map(flatten).collect())?;
        let mut reduced = flat.clone();
        let pivots = reduced.rref();
        let d = ideal[0].rows();
        products = (0..pivots.len())
            .map(|r| RationalMatrix::new(d, d, reduced.row(r).to_vec()).expect("square"))
            .collect();
    }
    Ok(products.iter().all(RationalMatrix::is_zero))
}
