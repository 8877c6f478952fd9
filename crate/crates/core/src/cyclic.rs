//! Cyclic index sets `[n] = {1, ..., n}`.
//!
//! Labels are 1-based. Arithmetic on labels wraps into `1..=n`, so `0`
//! and `n` name the same boundary point.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// A single element of `[n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicLabel {
    value: usize,
    n: usize,
}

impl CyclicLabel {
    pub fn new(value: usize, n: usize) -> Result<Self> {
        if value == 0 || value > n {
            return Err(Error::LabelOutOfRange { label: value, n });
        }
        Ok(Self { value, n })
    }

    /// Reduces any integer into `1..=n`.
    pub fn wrapping(value: i64, n: usize) -> Self {
        Self {
            value: wrap(value, n),
            n,
        }
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn n(self) -> usize {
        self.n
    }

    /// Position of `self` in the order `<_start`, counted from 0.
    fn offset_from(self, start: CyclicLabel) -> usize {
        (self.value + self.n - start.value) % self.n
    }
}

impl fmt::Display for CyclicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Reduces an integer into `1..=n`.
pub fn wrap(value: i64, n: usize) -> usize {
    let n = n as i64;
    ((value - 1).rem_euclid(n) + 1) as usize
}

/// `x <_i y` in the total order `i < i+1 < ... < n < 1 < ... < i-1`.
pub fn cyclic_less(i: CyclicLabel, x: CyclicLabel, y: CyclicLabel) -> Result<bool> {
    if i.n != x.n || i.n != y.n {
        let other = if i.n != x.n { x.n } else { y.n };
        return Err(Error::AmbientMismatch(i.n, other));
    }
    Ok(x.offset_from(i) < y.offset_from(i))
}

/// A set of distinct labels of `[n]`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabelSet {
    n: usize,
    elements: Vec<usize>,
}

impl LabelSet {
    pub fn new(n: usize, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut elements: Vec<usize> = elements.into_iter().collect();
        for &e in &elements {
            if e == 0 || e > n {
                return Err(Error::LabelOutOfRange { label: e, n });
            }
        }
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::NotDisjoint(w[0]));
        }
        Ok(Self { n, elements })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            elements: Vec::new(),
        }
    }

    /// The cyclic interval `from, from+1, ..., from+len-1`, wrapped into `[n]`.
    pub fn interval(n: usize, from: i64, len: usize) -> Result<Self> {
        Self::new(n, (0..len as i64).map(|j| wrap(from + j, n)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, label: usize) -> bool {
        self.elements.binary_search(&label).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.elements.iter().copied()
    }

    pub fn min(&self) -> Option<usize> {
        self.elements.first().copied()
    }

    pub fn is_disjoint(&self, other: &LabelSet) -> bool {
        self.elements.iter().all(|e| !other.contains(*e))
    }

    pub fn union(&self, other: &LabelSet) -> Result<LabelSet> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch(self.n, other.n));
        }
        LabelSet::new(self.n, self.iter().chain(other.iter()))
    }

    pub fn complement(&self) -> LabelSet {
        LabelSet {
            n: self.n,
            elements: (1..=self.n).filter(|e| !self.contains(*e)).collect(),
        }
    }

    /// Elements listed in the order `<_start`.
    pub fn listed_from(&self, start: usize) -> Vec<usize> {
        let mut v = self.elements.clone();
        v.sort_by_key(|&e| (e + self.n - start) % self.n);
        v
    }

    /// Applies `s_i : [n] -> [n+1]` to every element (`j -> j` for `j < i`,
    /// `j -> j+1` otherwise).
    pub fn shift_up(&self, i: usize) -> LabelSet {
        LabelSet {
            n: self.n + 1,
            elements: self.elements.iter().map(|&j| shift_label(j, i)).collect(),
        }
    }

    /// `U_i(I) ∪ {i}` on `[n+1]`.
    pub fn shift_down(&self, i: usize) -> LabelSet {
        let mut s = self.shift_up(i);
        s.elements.push(i);
        s.elements.sort_unstable();
        s
    }

    /// Deletes label `i` (which must be absent) and renumbers; the inverse of
    /// [`LabelSet::shift_up`].
    pub fn forget(&self, i: usize) -> Result<LabelSet> {
        if self.contains(i) {
            return Err(Error::Parameter(format!(
                "label {i} is in use and cannot be forgotten"
            )));
        }
        Ok(LabelSet {
            n: self.n - 1,
            elements: self
                .elements
                .iter()
                .map(|&j| if j > i { j - 1 } else { j })
                .collect(),
        })
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (idx, e) in self.elements.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// `s_i(j)`.
pub fn shift_label(j: usize, i: usize) -> usize {
    if j < i {
        j
    } else {
        j + 1
    }
}

/// Finds the start of a cyclic order in which `R < S < T` elementwise.
///
/// The returned label is the first element of `R` in that order; it is the
/// only element of `R` that can serve as the starting point.
pub fn is_cyclically_separated(r: &LabelSet, s: &LabelSet, t: &LabelSet) -> Result<Option<usize>> {
    let n = r.n;
    for other in [s, t] {
        if other.n != n {
            return Err(Error::AmbientMismatch(n, other.n));
        }
    }
    for (set, name) in [(r, "R"), (s, "S"), (t, "T")] {
        if set.is_empty() {
            return Err(Error::EmptySet(name));
        }
    }
    for (x, y) in [(r, s), (s, t), (r, t)] {
        if let Some(e) = x.iter().find(|e| y.contains(*e)) {
            return Err(Error::NotDisjoint(e));
        }
    }
    for start in r.iter() {
        let off = |e: usize| (e + n - start) % n;
        let r_max = r.iter().map(off).max().unwrap();
        let (s_min, s_max) = min_max(s.iter().map(off));
        let t_min = t.iter().map(off).min().unwrap();
        if r_max < s_min && s_max < t_min {
            return Ok(Some(start));
        }
    }
    Ok(None)
}

fn min_max(it: impl Iterator<Item = usize>) -> (usize, usize) {
    it.fold((usize::MAX, 0), |(lo, hi), x| (lo.min(x), hi.max(x)))
}
