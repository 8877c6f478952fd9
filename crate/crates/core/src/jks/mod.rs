//! Modules over the algebra `A_{k,n}`: the completed path algebra of the
//! cyclic quiver with arrows `x_i: i-1 -> i` and `y_i: i -> i-1` subject to
//! `xy = yx` at every vertex and `x^k = y^{n-k}`.

pub mod explicit;
pub mod lattice;
pub mod ses;

pub use explicit::{module_from_profile, module_from_rank1, ExplicitModule, ModuleHom};
pub use lattice::LatticeModule;
pub use ses::{verify_ses, SesCertificate, SesOptions};

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// The pair `(k, n)` fixing the algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuiverAlgebraSpec {
    pub k: usize,
    pub n: usize,
}

/// One defining relation, anchored at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `y_{i+1} x_{i+1} = x_i y_i`, both equal to `t` at vertex `i`.
    Commute(usize),
    /// `x_{i+k} ... x_{i+1} = y_{i-(n-k-1)} ... y_i`.
    Paths(usize),
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Commute(i) => write!(f, "xy = yx at vertex {i}"),
            Relation::Paths(i) => write!(f, "x^k = y^(n-k) from vertex {i}"),
        }
    }
}

impl QuiverAlgebraSpec {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::Parameter(format!(
                "need 0 < k < n, got k={k}, n={n}"
            )));
        }
        Ok(Self { k, n })
    }

    /// The `2n` relations.
    pub fn relations(&self) -> Vec<Relation> {
        (0..self.n)
            .map(Relation::Commute)
            .chain((0..self.n).map(Relation::Paths))
            .collect()
    }

    /// Vertex `i` reduced into `0..n`.
    pub fn vertex(&self, i: i64) -> usize {
        i.rem_euclid(self.n as i64) as usize
    }

    /// Arrow label reduced into `1..=n`.
    pub fn arrow(&self, i: i64) -> usize {
        (i - 1).rem_euclid(self.n as i64) as usize + 1
    }

    pub(crate) fn check_same(&self, other: &QuiverAlgebraSpec) -> Result<()> {
        if self != other {
            return Err(Error::SpecMismatch(self.k, self.n, other.k, other.n));
        }
        Ok(())
    }
}

impl fmt::Display for QuiverAlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A({},{})", self.k, self.n)
    }
}
