//! Profiles of rank-1 and rank-2 modules and the bijection with webs.
//!
//! A rank-2 profile is a pair of `k`-subsets `I` (top rim) and `J` (bottom
//! rim). At label `l` the top letter is `D` when `l` is in `I` and `U`
//! otherwise; likewise for the bottom. Compactly a profile is a word in
//!
//! * `U` for `U/U`, `D` for `D/D`,
//! * `<` for `U/D` (in `J` only), `>` for `D/U` (in `I` only).

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::cyclic::LabelSet;
use crate::error::{Error, Result};
use crate::webs::{Direction, Rank2Web};

/// A letter of a rank-2 profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    UU,
    DD,
    UD,
    DU,
}

impl Letter {
    pub fn symbol(self) -> char {
        match self {
            Letter::UU => 'U',
            Letter::DD => 'D',
            Letter::UD => '<',
            Letter::DU => '>',
        }
    }

    pub fn from_symbol(c: char) -> Result<Letter> {
        match c {
            'U' => Ok(Letter::UU),
            'D' => Ok(Letter::DD),
            '<' => Ok(Letter::UD),
            '>' => Ok(Letter::DU),
            _ => Err(Error::Parse(format!("unknown profile letter {c:?}"))),
        }
    }

    pub fn is_mixed(self) -> bool {
        matches!(self, Letter::UD | Letter::DU)
    }
}

/// Profile of a rank-1 module: the set of down steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rank1Profile {
    pub set: LabelSet,
}

impl Rank1Profile {
    pub fn k(&self) -> usize {
        self.set.len()
    }

    pub fn n(&self) -> usize {
        self.set.n()
    }
}

/// Profile `I/J` of a rank-2 module.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rank2Profile {
    top: LabelSet,
    bottom: LabelSet,
}

/// One box: the `U/D` labels that open it and the `D/U` labels that close
/// it, plus every label it covers from first to last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileBox {
    pub opens: Vec<usize>,
    pub closes: Vec<usize>,
    pub span: Vec<usize>,
}

impl ProfileBox {
    pub fn width(&self) -> usize {
        self.opens.len()
    }
}

impl Rank2Profile {
    pub fn new(top: LabelSet, bottom: LabelSet) -> Result<Self> {
        if top.n() != bottom.n() {
            return Err(Error::AmbientMismatch(top.n(), bottom.n()));
        }
        if top.len() != bottom.len() {
            return Err(Error::MalformedProfile(format!(
                "top has {} down steps, bottom has {}",
                top.len(),
                bottom.len()
            )));
        }
        Ok(Self { top, bottom })
    }

    pub fn from_labels(n: usize, top: &[usize], bottom: &[usize]) -> Result<Self> {
        Self::new(
            LabelSet::new(n, top.iter().copied())?,
            LabelSet::new(n, bottom.iter().copied())?,
        )
    }

    pub fn from_letters(letters: &[Letter]) -> Result<Self> {
        let n = letters.len();
        let top = (1..=n).filter(|&l| matches!(letters[l - 1], Letter::DD | Letter::DU));
        let bottom = (1..=n).filter(|&l| matches!(letters[l - 1], Letter::DD | Letter::UD));
        Self::new(LabelSet::new(n, top)?, LabelSet::new(n, bottom)?)
    }

    pub fn parse_compact(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(Letter::from_symbol)
            .collect::<Result<Vec<_>>>()?;
        Self::from_letters(&letters)
    }

    pub fn k(&self) -> usize {
        self.top.len()
    }

    pub fn n(&self) -> usize {
        self.top.n()
    }

    pub fn top(&self) -> &LabelSet {
        &self.top
    }

    pub fn bottom(&self) -> &LabelSet {
        &self.bottom
    }

    pub fn letter(&self, label: usize) -> Letter {
        match (self.top.contains(label), self.bottom.contains(label)) {
            (false, false) => Letter::UU,
            (true, true) => Letter::DD,
            (false, true) => Letter::UD,
            (true, false) => Letter::DU,
        }
    }

    pub fn letters(&self) -> Vec<Letter> {
        (1..=self.n()).map(|l| self.letter(l)).collect()
    }

    pub fn compact(&self) -> String {
        self.letters().into_iter().map(Letter::symbol).collect()
    }

    /// `h_i = #(J ∩ [1,i]) - #(I ∩ [1,i])` for `i = 0..n`; `h_0 = h_n = 0`.
    pub fn heights(&self) -> Vec<i64> {
        let mut h = vec![0i64; self.n() + 1];
        for i in 1..=self.n() {
            h[i] = h[i - 1] + self.bottom.contains(i) as i64 - self.top.contains(i) as i64;
        }
        h
    }

    /// `delta_i = h_i - min h`, indexed by vertex `0..n` (vertex 0 is vertex n).
    pub fn depths(&self) -> Vec<usize> {
        let h = self.heights();
        let m = *h.iter().min().unwrap();
        h.iter().map(|x| (x - m) as usize).collect()
    }

    /// Splits the profile into boxes, scanning from the first vertex of
    /// minimal height. Fails if some box closes and reopens before
    /// returning to the base line.
    pub fn decompose_boxes(&self) -> Result<Vec<ProfileBox>> {
        let n = self.n();
        let depth = self.depths();
        let start = (0..n).find(|&i| depth[i] == 0).unwrap();
        let mut boxes = Vec::new();
        let mut current: Option<ProfileBox> = None;
        let mut closing = false;
        for step in 1..=n {
            let label = (start + step - 1) % n + 1;
            let letter = self.letter(label);
            if let Some(b) = current.as_mut() {
                b.span.push(label);
                match letter {
                    Letter::UD if closing => {
                        return Err(Error::MalformedProfile(format!(
                            "box reopens at label {label} before closing in {}",
                            self.compact()
                        )))
                    }
                    Letter::UD => b.opens.push(label),
                    Letter::DU => {
                        closing = true;
                        b.closes.push(label);
                    }
                    _ => {}
                }
                if depth[label % n] == 0 {
                    boxes.push(current.take().unwrap());
                    closing = false;
                }
            } else {
                match letter {
                    Letter::UD => {
                        current = Some(ProfileBox {
                            opens: vec![label],
                            closes: Vec::new(),
                            span: vec![label],
                        })
                    }
                    Letter::DU => unreachable!("depth is never negative"),
                    _ => {}
                }
            }
        }
        debug_assert!(current.is_none());
        Ok(boxes)
    }

    /// Number of boxes, or an error for a malformed profile.
    pub fn box_count(&self) -> Result<usize> {
        Ok(self.decompose_boxes()?.len())
    }

    /// `U_i` inserts `U/U` at position `i`, `D_i` inserts `D/D`.
    pub fn stretch(&self, direction: Direction, i: usize) -> Result<Rank2Profile> {
        if i == 0 || i > self.n() + 1 {
            return Err(Error::LabelOutOfRange {
                label: i,
                n: self.n() + 1,
            });
        }
        Ok(match direction {
            Direction::Up => Rank2Profile {
                top: self.top.shift_up(i),
                bottom: self.bottom.shift_up(i),
            },
            Direction::Down => Rank2Profile {
                top: self.top.shift_down(i),
                bottom: self.bottom.shift_down(i),
            },
        })
    }
}

impl fmt::Display for Rank2Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.top, self.bottom)
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    n: usize,
    top: Vec<usize>,
    bottom: Vec<usize>,
}

impl Serialize for Rank2Profile {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ProfileJson {
            n: self.n(),
            top: self.top.as_slice().to_vec(),
            bottom: self.bottom.as_slice().to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rank2Profile {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let j = ProfileJson::deserialize(deserializer)?;
        Rank2Profile::from_labels(j.n, &j.top, &j.bottom).map_err(serde::de::Error::custom)
    }
}

/// The profile of the module attached to `web`.
pub fn psi(web: &Rank2Web) -> Result<Rank2Profile> {
    if !web.in_family() {
        let b = web.boxes();
        return Err(Error::Decomposable(b.alpha, b.beta, b.gamma));
    }
    let boxes = web.boxes();
    let start = web.separation_start();
    let r = web.r().listed_from(start);
    let s = web.s().listed_from(start);
    let t = web.t().listed_from(start);
    let (alpha, beta, gamma) = (boxes.alpha, boxes.beta, boxes.gamma);
    let top = r[..alpha]
        .iter()
        .chain(&s[..beta])
        .chain(&t[..gamma])
        .copied()
        .chain(web.v().iter());
    let bottom = r[alpha..]
        .iter()
        .chain(&s[beta..])
        .chain(&t[gamma..])
        .copied()
        .chain(web.v().iter());
    Rank2Profile::new(
        LabelSet::new(web.n(), top)?,
        LabelSet::new(web.n(), bottom)?,
    )
}

/// The canonical web whose profile is `profile`.
pub fn psi_inverse(profile: &Rank2Profile) -> Result<Rank2Web> {
    let boxes = profile.decompose_boxes()?;
    if boxes.len() != 3 {
        return Err(Error::NotThreeBoxes(boxes.len()));
    }
    let n = profile.n();
    let v: Vec<usize> = (1..=n)
        .filter(|&l| profile.letter(l) == Letter::DD)
        .collect();
    let join = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
    // box 0 = R2 | S1, box 1 = S2 | T1, box 2 = T2 | R1
    let r = join(&boxes[2].closes, &boxes[0].opens);
    let s = join(&boxes[0].closes, &boxes[1].opens);
    let t = join(&boxes[1].closes, &boxes[2].opens);
    let k = profile.k();
    Ok(Rank2Web::from_labels(k, n, &r, &s, &t, &v)?.canonicalize())
}
