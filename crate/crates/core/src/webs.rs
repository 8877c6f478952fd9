//! Rank-1 and rank-2 webs with leaves of weight 1.
//!
//! A rank-2 web `W(R, S, T, V)` is a tree with three white vertices joined
//! through one black vertex. White vertex 1 carries the leaves `R`, vertex 2
//! carries `S`, vertex 3 carries `T`, and every label of `V` sends one leaf
//! to each of two white vertices. Which two does not change the function, so
//! the attachment of `V` is not part of the data.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::cyclic::{is_cyclically_separated, LabelSet};
use crate::error::{Error, Result};

/// Up (`U_i`) or down (`D_i`) stretching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up" | "U" => Ok(Direction::Up),
            "down" | "D" => Ok(Direction::Down),
            _ => Err(Error::Parse(format!("unknown direction {s:?}"))),
        }
    }
}

fn check_stretch_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n + 1 {
        return Err(Error::LabelOutOfRange { label: i, n: n + 1 });
    }
    Ok(())
}

/// One white vertex joined to `k` boundary vertices: a Plücker coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rank1Web {
    k: usize,
    leaves: LabelSet,
}

impl Rank1Web {
    pub fn new(k: usize, leaves: LabelSet) -> Result<Self> {
        if leaves.len() != k {
            return Err(Error::Size {
                got: leaves.len(),
                expected: k,
            });
        }
        Ok(Self { k, leaves })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.leaves.n()
    }

    pub fn leaves(&self) -> &LabelSet {
        &self.leaves
    }

    pub fn stretch(&self, direction: Direction, i: usize) -> Result<Rank1Web> {
        check_stretch_index(i, self.n())?;
        Ok(match direction {
            Direction::Up => Rank1Web {
                k: self.k,
                leaves: self.leaves.shift_up(i),
            },
            Direction::Down => Rank1Web {
                k: self.k + 1,
                leaves: self.leaves.shift_down(i),
            },
        })
    }
}

/// Sizes `(a, b, c, d) = (|R|, |S|, |T|, |V|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WebSizes {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

/// Box sizes solving `a = alpha + beta`, `b = beta + gamma`, `c = gamma + alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoxSizes {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
}

impl BoxSizes {
    pub fn solve(a: usize, b: usize, c: usize) -> Result<BoxSizes> {
        if (a + b + c) % 2 == 1 {
            return Err(Error::Parity(a + b + c));
        }
        let (a, b, c) = (a as i64, b as i64, c as i64);
        let alpha = (a - b + c) / 2;
        let beta = (a + b - c) / 2;
        let gamma = (b + c - a) / 2;
        if alpha < 0 || beta < 0 || gamma < 0 {
            return Err(Error::NegativeBox {
                a: a as usize,
                b: b as usize,
                c: c as usize,
            });
        }
        Ok(BoxSizes {
            alpha: alpha as usize,
            beta: beta as usize,
            gamma: gamma as usize,
        })
    }

    pub fn all_positive(&self) -> bool {
        self.alpha > 0 && self.beta > 0 && self.gamma > 0
    }
}

/// A validated rank-2 web `W(R, S, T, V)`.
///
/// Zero boxes are allowed here (such webs factor into two Plücker
/// coordinates); membership in the family of indecomposable webs is
/// [`Rank2Web::in_family`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rank2Web {
    k: usize,
    r: LabelSet,
    s: LabelSet,
    t: LabelSet,
    v: LabelSet,
}

impl Rank2Web {
    pub fn new(k: usize, r: LabelSet, s: LabelSet, t: LabelSet, v: LabelSet) -> Result<Self> {
        let n = r.n();
        for set in [&s, &t, &v] {
            if set.n() != n {
                return Err(Error::AmbientMismatch(n, set.n()));
            }
        }
        if is_cyclically_separated(&r, &s, &t)?.is_none() {
            return Err(Error::NotSeparated);
        }
        for set in [&r, &s, &t] {
            if let Some(e) = v.iter().find(|e| set.contains(*e)) {
                return Err(Error::NotDisjoint(e));
            }
        }
        let (a, b, c, d) = (r.len(), s.len(), t.len(), v.len());
        if (a + b + c) % 2 == 1 {
            return Err(Error::Parity(a + b + c));
        }
        if a + b + c + 2 * d != 2 * k {
            return Err(Error::Size {
                got: a + b + c + 2 * d,
                expected: 2 * k,
            });
        }
        BoxSizes::solve(a, b, c)?;
        Ok(Self { k, r, s, t, v })
    }

    /// Convenience constructor from plain label lists.
    pub fn from_labels(
        k: usize,
        n: usize,
        r: &[usize],
        s: &[usize],
        t: &[usize],
        v: &[usize],
    ) -> Result<Self> {
        let set = |x: &[usize]| LabelSet::new(n, x.iter().copied());
        Self::new(k, set(r)?, set(s)?, set(t)?, set(v)?)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.r.n()
    }

    pub fn r(&self) -> &LabelSet {
        &self.r
    }

    pub fn s(&self) -> &LabelSet {
        &self.s
    }

    pub fn t(&self) -> &LabelSet {
        &self.t
    }

    pub fn v(&self) -> &LabelSet {
        &self.v
    }

    pub fn sizes(&self) -> WebSizes {
        WebSizes {
            a: self.r.len(),
            b: self.s.len(),
            c: self.t.len(),
            d: self.v.len(),
        }
    }

    pub fn boxes(&self) -> BoxSizes {
        BoxSizes::solve(self.r.len(), self.s.len(), self.t.len())
            .expect("validated at construction")
    }

    /// All three boxes nonempty.
    pub fn in_family(&self) -> bool {
        self.boxes().all_positive()
    }

    /// First label of `R` in the order that separates `R < S < T`.
    pub fn separation_start(&self) -> usize {
        is_cyclically_separated(&self.r, &self.s, &self.t)
            .expect("validated at construction")
            .expect("validated at construction")
    }

    /// The lexicographically least of the three rotations of `(R, S, T)`.
    pub fn canonicalize(&self) -> Rank2Web {
        let rotations = [
            (&self.r, &self.s, &self.t),
            (&self.s, &self.t, &self.r),
            (&self.t, &self.r, &self.s),
        ];
        let (r, s, t) = rotations
            .into_iter()
            .min_by(|x, y| {
                (x.0.as_slice(), x.1.as_slice(), x.2.as_slice()).cmp(&(
                    y.0.as_slice(),
                    y.1.as_slice(),
                    y.2.as_slice(),
                ))
            })
            .unwrap();
        Rank2Web {
            k: self.k,
            r: r.clone(),
            s: s.clone(),
            t: t.clone(),
            v: self.v.clone(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        let m = LabelSet::min(&self.r).unwrap();
        m < LabelSet::min(&self.s).unwrap() && m < LabelSet::min(&self.t).unwrap()
    }

    /// `U_i` keeps `k`; `D_i` adds `i` to `V` and raises `k` by one.
    pub fn stretch(&self, direction: Direction, i: usize) -> Result<Rank2Web> {
        check_stretch_index(i, self.n())?;
        let (k, v) = match direction {
            Direction::Up => (self.k, self.v.shift_up(i)),
            Direction::Down => (self.k + 1, self.v.shift_down(i)),
        };
        Rank2Web::new(
            k,
            self.r.shift_up(i),
            self.s.shift_up(i),
            self.t.shift_up(i),
            v,
        )
    }

    /// Removes an unused label and renumbers (inverse of `U_i`).
    pub fn forget_label(&self, i: usize) -> Result<Rank2Web> {
        Rank2Web::new(
            self.k,
            self.r.forget(i)?,
            self.s.forget(i)?,
            self.t.forget(i)?,
            self.v.forget(i)?,
        )
    }
}

impl fmt::Display for Rank2Web {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "W({}, {}, {}, {}) on Gr({},{})",
            self.r,
            self.s,
            self.t,
            self.v,
            self.k,
            self.n()
        )
    }
}

/// A tree web given directly by the leaf lists of its white vertices,
/// all joined to one black vertex. Labels may repeat, which is how the
/// degenerate members of the cactus family are written down.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeWeb {
    pub k: usize,
    pub n: usize,
    pub vertices: Vec<Vec<usize>>,
}

/// Any web the evaluator understands.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Web {
    Rank1(Rank1Web),
    Rank2(Rank2Web),
    Tree(TreeWeb),
}

impl Web {
    pub fn k(&self) -> usize {
        match self {
            Web::Rank1(w) => w.k(),
            Web::Rank2(w) => w.k(),
            Web::Tree(w) => w.k,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Web::Rank1(w) => w.n(),
            Web::Rank2(w) => w.n(),
            Web::Tree(w) => w.n,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Web::Rank1(_) => 1,
            Web::Rank2(_) => 2,
            Web::Tree(w) => w.vertices.iter().map(Vec::len).sum::<usize>() / w.k.max(1),
        }
    }

    pub fn stretch(&self, direction: Direction, i: usize) -> Result<Web> {
        match self {
            Web::Rank1(w) => Ok(Web::Rank1(w.stretch(direction, i)?)),
            Web::Rank2(w) => Ok(Web::Rank2(w.stretch(direction, i)?)),
            Web::Tree(_) => Err(Error::Parameter("raw tree webs are not stretched".into())),
        }
    }
}

/// JSON form: `{"kind":"rank2","k":K,"n":N,"R":[..],"S":[..],"T":[..],"V":[..]}`
/// or `{"kind":"rank1","k":K,"n":N,"leaves":[..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WebJson {
    pub kind: String,
    pub k: usize,
    pub n: usize,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<usize>>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<usize>>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<usize>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaves: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<usize>>>,
}

impl From<&Web> for WebJson {
    fn from(w: &Web) -> Self {
        let mut j = WebJson {
            kind: String::new(),
            k: w.k(),
            n: w.n(),
            r: None,
            s: None,
            t: None,
            v: None,
            leaves: None,
            vertices: None,
        };
        match w {
            Web::Rank1(w) => {
                j.kind = "rank1".into();
                j.leaves = Some(w.leaves.as_slice().to_vec());
            }
            Web::Rank2(w) => {
                j.kind = "rank2".into();
                j.r = Some(w.r.as_slice().to_vec());
                j.s = Some(w.s.as_slice().to_vec());
                j.t = Some(w.t.as_slice().to_vec());
                j.v = Some(w.v.as_slice().to_vec());
            }
            Web::Tree(w) => {
                j.kind = "tree".into();
                j.vertices = Some(w.vertices.clone());
            }
        }
        j
    }
}

impl TryFrom<WebJson> for Web {
    type Error = Error;

    fn try_from(j: WebJson) -> Result<Web> {
        let missing =
            |f: &str| Error::Parse(format!("web JSON of kind {:?} lacks field {f:?}", j.kind));
        match j.kind.as_str() {
            "rank1" => {
                let leaves = j.leaves.clone().ok_or_else(|| missing("leaves"))?;
                Ok(Web::Rank1(Rank1Web::new(j.k, LabelSet::new(j.n, leaves)?)?))
            }
            "rank2" => {
                let r = j.r.clone().ok_or_else(|| missing("R"))?;
                let s = j.s.clone().ok_or_else(|| missing("S"))?;
                let t = j.t.clone().ok_or_else(|| missing("T"))?;
                let v = j.v.clone().unwrap_or_default();
                Ok(Web::Rank2(Rank2Web::from_labels(j.k, j.n, &r, &s, &t, &v)?))
            }
            "tree" => {
                let vertices = j.vertices.clone().ok_or_else(|| missing("vertices"))?;
                Ok(Web::Tree(TreeWeb {
                    k: j.k,
                    n: j.n,
                    vertices,
                }))
            }
            other => Err(Error::Parse(format!("unknown web kind {other:?}"))),
        }
    }
}

impl Web {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&WebJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Web> {
        let j: WebJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Web::try_from(j)
    }
}

/// Size class of a web: `(a, b, c)` sorted descending, and `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WebClass {
    pub abc: [usize; 3],
    pub d: usize,
}

impl fmt::Display for WebClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{};d={})",
            self.abc[0], self.abc[1], self.abc[2], self.d
        )
    }
}

impl Rank2Web {
    pub fn class(&self) -> WebClass {
        let mut abc = [self.r.len(), self.s.len(), self.t.len()];
        abc.sort_unstable_by(|x, y| y.cmp(x));
        WebClass {
            abc,
            d: self.v.len(),
        }
    }
}

/// Every canonical web of the family on `Gr(k, n)`, each once, in a fixed
/// order: by `d`, then ordered sizes, then support, then cut, then `V`.
pub fn enumerate_webs(k: usize, n: usize) -> Vec<Rank2Web> {
    let mut out = Vec::new();
    for_each_web(k, n, |w| out.push(w));
    out
}

/// Streaming form of [`enumerate_webs`].
pub fn for_each_web(k: usize, n: usize, mut f: impl FnMut(Rank2Web)) {
    for d in 0..=k {
        let Some(m) = (2 * k).checked_sub(2 * d) else {
            continue;
        };
        if m + d > n || m < 6 {
            continue;
        }
        for a in 2..=m {
            for b in 2..=m - a {
                let c = m - a - b;
                if c < 2 || a >= b + c || b >= a + c || c >= a + b {
                    continue;
                }
                for support in (1..=n).combinations(m) {
                    for offset in 0..m {
                        let take = |from: usize, len: usize| -> Vec<usize> {
                            (from..from + len)
                                .map(|j| support[(offset + j) % m])
                                .collect()
                        };
                        let r = take(0, a);
                        if !r.contains(&support[0]) {
                            continue;
                        }
                        let s = take(a, b);
                        let t = take(a + b, c);
                        let rest: Vec<usize> = (1..=n).filter(|x| !support.contains(x)).collect();
                        for v in rest.into_iter().combinations(d) {
                            let w = Rank2Web::from_labels(k, n, &r, &s, &t, &v)
                                .expect("enumerated webs are valid");
                            f(w);
                        }
                    }
                }
            }
        }
    }
}

/// Number of canonical webs per size class.
pub fn count_by_class(k: usize, n: usize) -> BTreeMap<WebClass, usize> {
    let mut table = BTreeMap::new();
    for_each_web(k, n, |w| *table.entry(w.class()).or_insert(0) += 1);
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn web(k: usize, n: usize, r: &[usize], s: &[usize], t: &[usize], v: &[usize]) -> Rank2Web {
        Rank2Web::from_labels(k, n, r, s, t, v).unwrap()
    }

    fn binomial(n: usize, r: usize) -> usize {
        if r > n {
            return 0;
        }
        (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Family membership read straight off the definition: all ordered
    /// disjoint triples of nonempty subsets plus V.
    fn brute_force_count(k: usize, n: usize) -> usize {
        let mut count = 0;
        for code in 0..5usize.pow(n as u32) {
            let mut parts: [Vec<usize>; 4] = Default::default();
            let mut c = code;
            for label in 1..=n {
                if c % 5 < 4 {
                    parts[c % 5].push(label);
                }
                c /= 5;
            }
            let [r, s, t, v] = &parts;
            if r.is_empty() || s.is_empty() || t.is_empty() {
                continue;
            }
            if let Ok(w) = Rank2Web::from_labels(k, n, r, s, t, v) {
                if w.in_family() && w.is_canonical() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn construction_examples() {
        let w = web(3, 6, &[1, 2], &[3, 4], &[5, 6], &[]);
        assert_eq!(
            w.boxes(),
            BoxSizes {
                alpha: 1,
                beta: 1,
                gamma: 1
            }
        );
        let w = web(5, 12, &[1, 2, 3, 4], &[5, 6, 7], &[8, 9, 10], &[]);
        // a = 4, b = c = 3
        assert_eq!(
            w.boxes(),
            BoxSizes {
                alpha: 2,
                beta: 2,
                gamma: 1
            }
        );
        assert_eq!(
            Rank2Web::from_labels(3, 6, &[1, 3], &[2], &[4], &[]),
            Err(Error::NotSeparated)
        );
        assert_eq!(
            Rank2Web::from_labels(3, 6, &[1, 2], &[3, 4], &[5], &[]),
            Err(Error::Parity(5))
        );
        assert_eq!(
            Rank2Web::from_labels(4, 8, &[1, 2], &[3, 4], &[5, 6], &[]),
            Err(Error::Size {
                got: 6,
                expected: 8
            })
        );
        assert!(matches!(
            Rank2Web::from_labels(4, 8, &[1, 2, 3, 4, 5, 6], &[7], &[8], &[]),
            Err(Error::NegativeBox { .. })
        ));
    }

    #[test]
    fn canonicalization() {
        let w = web(3, 6, &[3, 4], &[5, 6], &[1, 2], &[]);
        let c = w.canonicalize();
        assert_eq!(c, web(3, 6, &[1, 2], &[3, 4], &[5, 6], &[]));
        assert_eq!(c.canonicalize(), c);
        assert!(c.is_canonical());
    }

    #[test]
    fn enumeration_small_cases() {
        assert_eq!(enumerate_webs(3, 6).len(), 2);
        assert_eq!(enumerate_webs(3, 5).len(), 0);
        assert_eq!(brute_force_count(3, 5), 0);
        assert_eq!(brute_force_count(3, 6), 2);
        assert_eq!(enumerate_webs(3, 7).len(), brute_force_count(3, 7));
        assert_eq!(enumerate_webs(4, 7).len(), brute_force_count(4, 7));
    }

    #[test]
    fn enumeration_is_canonical_and_unique() {
        let webs = enumerate_webs(4, 8);
        let mut seen = std::collections::HashSet::new();
        for w in &webs {
            assert_eq!(w.canonicalize(), *w);
            assert!(w.in_family());
            let s = w.sizes();
            assert_eq!(s.a + s.b + s.c + 2 * s.d, 2 * w.k());
            assert!(seen.insert(w.clone()));
        }
    }

    #[test]
    fn real_root_subcounts() {
        for (k, n) in [(3, 6), (4, 8), (5, 10), (4, 9)] {
            let count = enumerate_webs(k, n)
                .iter()
                .filter(|w| w.v().len() == k - 3)
                .count();
            assert_eq!(
                count,
                2 * binomial(n, 6) * binomial(n - 6, k - 3),
                "(k,n)=({k},{n})"
            );
        }
    }

    #[test]
    fn stretching_examples() {
        let w = web(3, 6, &[1, 2], &[3, 4], &[5, 6], &[]);
        assert_eq!(
            w.stretch(Direction::Up, 3).unwrap(),
            web(3, 7, &[1, 2], &[4, 5], &[6, 7], &[])
        );
        assert_eq!(
            w.stretch(Direction::Down, 3).unwrap(),
            web(4, 7, &[1, 2], &[4, 5], &[6, 7], &[3])
        );
        assert_eq!(
            w.stretch(Direction::Up, 7).unwrap(),
            web(3, 7, &[1, 2], &[3, 4], &[5, 6], &[])
        );
        assert_eq!(
            w.stretch(Direction::Up, 3)
                .unwrap()
                .forget_label(3)
                .unwrap(),
            w
        );
        assert!(w.stretch(Direction::Up, 9).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let w = Web::Rank2(web(4, 8, &[1, 2], &[3, 4], &[6, 7], &[8]));
        let s = w.to_json();
        assert_eq!(
            s,
            r#"{"kind":"rank2","k":4,"n":8,"R":[1,2],"S":[3,4],"T":[6,7],"V":[8]}"#
        );
        assert_eq!(Web::from_json(&s).unwrap(), w);
        assert!(
            Web::from_json(r#"{"kind":"rank2","k":3,"n":6,"R":[1,4],"S":[2],"T":[3]}"#).is_err()
        );
    }
}
