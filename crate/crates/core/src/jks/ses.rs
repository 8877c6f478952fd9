//! Short exact sequences of lattice modules, found by a graded search and
//! certified on explicit truncations.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::explicit::{validated_lattice, ExplicitModule, ModuleHom};
use super::lattice::LatticeModule;
use super::QuiverAlgebraSpec;
use crate::cactus::TcfrParams;
use crate::cyclic::LabelSet;
use crate::error::{Error, Result};
use crate::linalg::{rat, RationalMatrix};
use crate::profiles::{psi, Rank2Profile};
use crate::webs::{for_each_web, Direction, Web};

/// One direct summand of a term of a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SesTerm {
    Rank1(LabelSet),
    Rank2(Rank2Profile),
}

impl SesTerm {
    pub fn rank(&self) -> usize {
        match self {
            SesTerm::Rank1(_) => 1,
            SesTerm::Rank2(_) => 2,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            SesTerm::Rank1(s) => s.n(),
            SesTerm::Rank2(p) => p.n(),
        }
    }

    /// The module of a web: `M_I` for rank 1, the profile module for rank 2.
    pub fn from_web(web: &Web) -> Result<SesTerm> {
        match web {
            Web::Rank1(w) => Ok(SesTerm::Rank1(w.leaves().clone())),
            Web::Rank2(w) => Ok(SesTerm::Rank2(psi(w)?)),
            Web::Tree(_) => Err(Error::Parameter("tree webs have no module".into())),
        }
    }

    pub fn lattice(&self, order: usize) -> Result<LatticeModule> {
        match self {
            SesTerm::Rank1(s) => LatticeModule::rank1(QuiverAlgebraSpec::new(s.len(), s.n())?, s),
            SesTerm::Rank2(p) => validated_lattice(p, order).map(|(l, _)| l),
        }
    }

    /// Removes an unused position (a `U/U` step).
    pub fn forget(&self, label: usize) -> Result<SesTerm> {
        match self {
            SesTerm::Rank1(s) => Ok(SesTerm::Rank1(s.forget(label)?)),
            SesTerm::Rank2(p) => Ok(SesTerm::Rank2(Rank2Profile::new(
                p.top().forget(label)?,
                p.bottom().forget(label)?,
            )?)),
        }
    }

    pub fn stretch(&self, direction: Direction, i: usize) -> Result<SesTerm> {
        match self {
            SesTerm::Rank1(s) => {
                let shifted = s.shift_up(i);
                Ok(SesTerm::Rank1(match direction {
                    Direction::Up => shifted,
                    Direction::Down => shifted.union(&LabelSet::new(s.n() + 1, [i])?)?,
                }))
            }
            SesTerm::Rank2(p) => Ok(SesTerm::Rank2(p.stretch(direction, i)?)),
        }
    }
}

impl fmt::Display for SesTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SesTerm::Rank1(s) => write!(f, "M{s}"),
            SesTerm::Rank2(p) => write!(f, "M({p})"),
        }
    }
}

/// Search and certification parameters.
#[derive(Debug, Clone)]
pub struct SesOptions {
    /// Truncation order; defaults to `2n`. Certification also runs at `N + n`.
    pub order: Option<usize>,
    pub seed: u64,
    /// Random elements drawn per candidate Hom space.
    pub samples_per_space: usize,
    /// Cap on the number of grading shifts tried for the middle term.
    pub max_candidates: usize,
    /// Extra degrees tried above the least nonzero Hom degree.
    pub slack: i64,
}

impl Default for SesOptions {
    fn default() -> Self {
        Self {
            order: None,
            seed: 0x5e5,
            samples_per_space: 2,
            max_candidates: 4096,
            slack: 1,
        }
    }
}

impl SesOptions {
    /// Smaller budget, for validating constructions.
    pub fn light() -> Self {
        Self {
            samples_per_space: 1,
            max_candidates: 256,
            ..Self::default()
        }
    }
}

/// Everything needed to re-check a verified sequence
/// `0 -> L -> C -> R -> 0`.
///
/// Summand `i` of each term is shifted by `t^{shift_i}`; after that the
/// inclusion, projection and isomorphism are constant matrices in the
/// ambient `K^r` coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct SesCertificate {
    pub left: Vec<String>,
    pub middle: Vec<String>,
    pub right: Vec<String>,
    pub left_shifts: Vec<i64>,
    pub middle_shifts: Vec<i64>,
    pub right_shifts: Vec<i64>,
    pub inclusion: Vec<Vec<String>>,
    pub projection: Vec<Vec<String>>,
    /// From the cokernel to the shifted right-hand term.
    pub isomorphism: Vec<Vec<String>>,
    pub cokernel_exponents: Vec<Vec<i64>>,
    pub orders: Vec<usize>,
    pub candidates_tried: usize,
}

fn matrix_strings(m: &RationalMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|x| x.to_string()).collect())
        .collect()
}

fn random_combination(basis: &[RationalMatrix], rng: &mut ChaCha8Rng) -> RationalMatrix {
    let mut acc = RationalMatrix::zeros(basis[0].rows(), basis[0].cols());
    for b in basis {
        let mut c = 0;
        while c == 0 {
            c = rng.gen_range(-9..=9);
        }
        acc = acc.add(&b.scale(&rat(c))).expect("same shape");
    }
    acc
}

fn cartesian(choices: &[Vec<i64>]) -> Vec<Vec<i64>> {
    choices.iter().fold(vec![vec![]], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&o| {
                    let mut p = prefix.clone();
                    p.push(o);
                    p
                })
            })
            .collect()
    })
}

fn dedup_sorted(mut v: Vec<i64>) -> Vec<i64> {
    v.sort_unstable();
    v.dedup();
    v
}

fn shifted_sum(parts: &[LatticeModule], shifts: &[i64]) -> Result<LatticeModule> {
    // a degree-0 map between shifted sums is a map of degree `s_j - s_l` between summands
    let shifted: Vec<_> = parts
        .iter()
        .zip(shifts)
        .map(|(m, &s)| m.shifted(-s))
        .collect();
    LatticeModule::sum_of(&shifted)
}

/// `Phi mod t` is injective at every vertex.
fn is_saturated(src: &LatticeModule, dst: &LatticeModule, phi: &RationalMatrix) -> bool {
    (0..src.spec().n).all(|v| {
        let m = LatticeModule::transfer(src, dst, v as i64, phi, 0);
        m.is_integral() && m.constant_part().rank() == src.rank()
    })
}

/// The image of `C` under `P`, as a lattice chain.
fn image_module(c: &LatticeModule, p: &RationalMatrix) -> Result<LatticeModule> {
    let spec = c.spec();
    let r = p.rows();
    let mut frames = Vec::with_capacity(spec.n);
    let mut exps = Vec::with_capacity(spec.n);
    for v in 0..spec.n {
        let (q, _, e) = c.frame(v as i64);
        let cols = p.mul(q)?;
        let mut order: Vec<usize> = (0..e.len()).collect();
        order.sort_by_key(|&i| e[i]);
        let mut picked: Vec<usize> = Vec::new();
        for i in order {
            let mut trial = picked.clone();
            trial.push(i);
            if cols.select_columns(&trial).rank() == trial.len() {
                picked = trial;
            }
            if picked.len() == r {
                break;
            }
        }
        if picked.len() != r {
            return Err(Error::Ses("projection is not surjective".into()));
        }
        frames.push(cols.select_columns(&picked));
        exps.push(picked.iter().map(|&i| e[i]).collect());
    }
    LatticeModule::new(spec, frames, exps)
        .map_err(|e| Error::Ses(format!("cokernel is not a lattice chain: {e}")))
}

fn check_additivity(l: &LatticeModule, c: &LatticeModule, r: &LatticeModule) -> Result<()> {
    for v in 0..c.spec().n {
        let all: Vec<i64> = [l, c, r]
            .iter()
            .flat_map(|m| m.exponents(v).to_vec())
            .collect();
        let (lo, hi) = (*all.iter().min().unwrap(), *all.iter().max().unwrap());
        for m in lo..=hi {
            if l.graded_dim(v, m) + r.graded_dim(v, m) != c.graded_dim(v, m) {
                return Err(Error::Ses(format!(
                    "dimensions do not add up at vertex {v}, degree {m}"
                )));
            }
        }
    }
    Ok(())
}

/// A degree-0 isomorphism from `coker` onto `right` with suitable shifts.
fn find_isomorphism(
    coker: &LatticeModule,
    right: &[LatticeModule],
    rng: &mut ChaCha8Rng,
    opts: &SesOptions,
) -> Result<Option<(Vec<i64>, LatticeModule, RationalMatrix)>> {
    let spec = coker.spec();
    let total = |m: &LatticeModule| m.exponents(0).iter().sum::<i64>();
    let deficit = right.iter().map(total).sum::<i64>() - total(coker);
    let window = (spec.n + spec.k) as i64;
    let ranks: Vec<i64> = right.iter().map(|m| m.rank() as i64).collect();
    let last = ranks.len() - 1;
    let free: Vec<Vec<i64>> = (0..last).map(|_| (-window..=window).collect()).collect();
    let mut candidates: Vec<Vec<i64>> = cartesian(&free)
        .into_iter()
        .filter_map(|mut s| {
            let used: i64 = s.iter().zip(&ranks).map(|(a, b)| a * b).sum();
            let rest = deficit - used;
            (rest % ranks[last] == 0).then(|| {
                s.push(rest / ranks[last]);
                s
            })
        })
        .collect();
    let mean = deficit as f64 / ranks.iter().sum::<i64>() as f64;
    candidates.sort_by(|a, b| {
        let spread = |s: &Vec<i64>| s.iter().map(|&x| (x as f64 - mean).abs()).sum::<f64>();
        spread(a).partial_cmp(&spread(b)).unwrap()
    });
    for shifts in candidates {
        let target = shifted_sum(right, &shifts)?;
        let hom = coker.graded_hom(&target, 0)?;
        if hom.is_empty() {
            continue;
        }
        for _ in 0..opts.samples_per_space.max(1) {
            let psi = random_combination(&hom, rng);
            let invertible = (0..spec.n).all(|v| {
                let m = LatticeModule::transfer(coker, &target, v as i64, &psi, 0);
                m.constant_part().rank() == coker.rank()
            });
            if invertible {
                return Ok(Some((shifts, target, psi)));
            }
        }
    }
    Ok(None)
}

fn hom_from(
    src: &LatticeModule,
    dst: &LatticeModule,
    phi: &RationalMatrix,
    order: usize,
) -> Result<ModuleHom> {
    let maps = (0..src.spec().n)
        .map(|v| LatticeModule::transfer(src, dst, v as i64, phi, 0).to_poly(order))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModuleHom { maps })
}

/// Re-checks the sequence on explicit truncations at `order`.
fn certify(
    l: &LatticeModule,
    c: &LatticeModule,
    r: &LatticeModule,
    t: &LatticeModule,
    maps: (&RationalMatrix, &RationalMatrix, &RationalMatrix),
    order: usize,
) -> Result<()> {
    let (lx, cx, rx, tx): (
        ExplicitModule,
        ExplicitModule,
        ExplicitModule,
        ExplicitModule,
    ) = (
        l.to_explicit(order)?,
        c.to_explicit(order)?,
        r.to_explicit(order)?,
        t.to_explicit(order)?,
    );
    let f = hom_from(l, c, maps.0, order)?;
    let pi = hom_from(c, r, maps.1, order)?;
    let iso = hom_from(r, t, maps.2, order)?;
    f.check(&lx, &cx)?;
    pi.check(&cx, &rx)?;
    iso.check(&rx, &tx)?;
    if !pi.compose(&f)?.is_zero() {
        return Err(Error::Ses(format!(
            "projection does not kill the image at order {order}"
        )));
    }
    for v in 0..l.spec().n {
        if f.maps[v].coefficient(0).rank() != l.rank() {
            return Err(Error::Ses(format!(
                "inclusion is not split-injective at vertex {v}"
            )));
        }
        if pi.maps[v].coefficient(0).rank() != r.rank() {
            return Err(Error::Ses(format!(
                "projection is not surjective at vertex {v}"
            )));
        }
        if iso.maps[v].coefficient(0).rank() != r.rank() {
            return Err(Error::Ses(format!("isomorphism is singular at vertex {v}")));
        }
    }
    Ok(())
}

/// Finds and certifies `0 -> ⊕left -> ⊕middle -> ⊕right -> 0`.
///
/// Each summand may be shifted in degree. For every choice of shifts a
/// random degree-0 map `f` is tested for being injective mod `t` at every
/// vertex; its cokernel is then computed as the image of the middle term
/// under a left kernel of `f`, compared to the right term by a random
/// degree-0 map that is invertible mod `t`, and finally every map is
/// re-checked on explicit truncations at `N` and `N + n`.
pub fn verify_lattice_ses(
    left: &[LatticeModule],
    middle: &[LatticeModule],
    right: &[LatticeModule],
    opts: &SesOptions,
) -> Result<SesCertificate> {
    let first = left
        .first()
        .ok_or_else(|| Error::Ses("empty left term".into()))?;
    let spec = first.spec();
    for m in left.iter().chain(middle).chain(right) {
        spec.check_same(&m.spec())?;
    }
    let rank = |ms: &[LatticeModule]| ms.iter().map(LatticeModule::rank).sum::<usize>();
    let (rl, rc, rr) = (rank(left), rank(middle), rank(right));
    if rc != rl + rr || middle.is_empty() || right.is_empty() {
        return Err(Error::Ses(format!("ranks {rl} + {rr} != {rc}")));
    }
    let order = opts.order.unwrap_or(2 * spec.n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dmin: Vec<Vec<i64>> = left
        .iter()
        .map(|l| {
            middle
                .iter()
                .map(|c| l.min_hom_degree(c))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let dmin = &dmin;
    let sigma_choices: Vec<Vec<i64>> = (0..left.len())
        .map(|l| match l {
            0 => vec![0],
            _ => dedup_sorted(
                (0..middle.len())
                    .flat_map(|j| (-1..=1).map(move |d| dmin[0][j] - dmin[l][j] + d))
                    .collect(),
            ),
        })
        .collect();

    let mut tried = 0usize;
    let mut last_err = Error::Ses("no injective map with a saturated image was found".into());
    for sigma in cartesian(&sigma_choices) {
        let s_choices: Vec<Vec<i64>> = (0..middle.len())
            .map(|j| {
                dedup_sorted(
                    (0..left.len())
                        .flat_map(|l| (0..=opts.slack).map(move |d| (l, d)))
                        .map(|(l, d)| sigma[l] + dmin[l][j] + d)
                        .collect(),
                )
            })
            .collect();
        let mut configs = cartesian(&s_choices);
        configs.sort_by_key(|s| s.iter().sum::<i64>());
        for s in configs {
            tried += 1;
            if tried > opts.max_candidates {
                return Err(last_err);
            }
            let l = shifted_sum(left, &sigma)?;
            let c = shifted_sum(middle, &s)?;
            let hom = l.graded_hom(&c, 0)?;
            if hom.is_empty() {
                continue;
            }
            for _ in 0..opts.samples_per_space.max(1) {
                let phi = random_combination(&hom, &mut rng);
                if !is_saturated(&l, &c, &phi) {
                    continue;
                }
                let proj = phi.transpose().kernel_basis();
                let coker = match image_module(&c, &proj) {
                    Ok(m) => m,
                    Err(e) => {
                        last_err = e;
                        continue;
                    }
                };
                check_additivity(&l, &c, &coker)?;
                let Some((right_shifts, target, iso)) =
                    find_isomorphism(&coker, right, &mut rng, opts)?
                else {
                    last_err =
                        Error::Ses("cokernel is not isomorphic to the right-hand term".into());
                    break;
                };
                let orders = vec![order, order + spec.n];
                for &o in &orders {
                    certify(&l, &c, &coker, &target, (&phi, &proj, &iso), o)?;
                }
                return Ok(SesCertificate {
                    left: Vec::new(),
                    middle: Vec::new(),
                    right: Vec::new(),
                    left_shifts: sigma.clone(),
                    middle_shifts: s,
                    right_shifts,
                    inclusion: matrix_strings(&phi),
                    projection: matrix_strings(&proj),
                    isomorphism: matrix_strings(&iso),
                    cokernel_exponents: (0..spec.n).map(|v| coker.exponents(v).to_vec()).collect(),
                    orders,
                    candidates_tried: tried,
                });
            }
        }
    }
    Err(last_err)
}

/// [`verify_lattice_ses`] on terms given by profiles.
pub fn verify_ses(
    left: &[SesTerm],
    middle: &[SesTerm],
    right: &[SesTerm],
    opts: &SesOptions,
) -> Result<SesCertificate> {
    let n = left
        .first()
        .map(SesTerm::n)
        .ok_or_else(|| Error::Ses("empty left term".into()))?;
    let order = opts.order.unwrap_or(2 * n);
    let build = |ts: &[SesTerm]| {
        ts.iter()
            .map(|t| t.lattice(order))
            .collect::<Result<Vec<_>>>()
    };
    let mut cert = verify_lattice_ses(&build(left)?, &build(middle)?, &build(right)?, opts)?;
    let names = |ts: &[SesTerm]| ts.iter().map(ToString::to_string).collect();
    cert.left = names(left);
    cert.middle = names(middle);
    cert.right = names(right);
    Ok(cert)
}

/// The summands of the module of a tcfr function.
pub fn tcfr_terms(p: &TcfrParams) -> Result<Vec<SesTerm>> {
    p.factors()?.iter().map(SesTerm::from_web).collect()
}

/// The two sequences of the exchange at `x`:
/// `0 -> x -> z1 ⊕ z2 -> x' -> 0` and `0 -> x' -> y1 ⊕ y2 -> x -> 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeSequences {
    pub forward: [Vec<SesTerm>; 3],
    pub backward: [Vec<SesTerm>; 3],
}

impl ExchangeSequences {
    pub fn new(x: &TcfrParams) -> Result<Self> {
        let terms = x
            .exchange_terms()
            .ok_or_else(|| Error::Parameter(format!("{x} admits no exchange")))?;
        let m = terms.iter().map(tcfr_terms).collect::<Result<Vec<_>>>()?;
        let cat =
            |a: &Vec<SesTerm>, b: &Vec<SesTerm>| a.iter().chain(b).cloned().collect::<Vec<_>>();
        Ok(Self {
            forward: [m[0].clone(), cat(&m[4], &m[5]), m[1].clone()],
            backward: [m[1].clone(), cat(&m[2], &m[3]), m[0].clone()],
        })
    }

    /// Applies `f` to every summand.
    pub fn map(&self, f: impl Fn(&SesTerm) -> Result<SesTerm>) -> Result<Self> {
        let map3 = |s: &[Vec<SesTerm>; 3]| -> Result<[Vec<SesTerm>; 3]> {
            let v = s
                .iter()
                .map(|ts| ts.iter().map(&f).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok([v[0].clone(), v[1].clone(), v[2].clone()])
        };
        Ok(Self {
            forward: map3(&self.forward)?,
            backward: map3(&self.backward)?,
        })
    }

    /// Drops the listed unused positions, in order.
    pub fn forget(&self, labels: &[usize]) -> Result<Self> {
        self.map(|t| labels.iter().try_fold(t.clone(), |acc, &l| acc.forget(l)))
    }

    pub fn verify(&self, opts: &SesOptions) -> Result<[SesCertificate; 2]> {
        let [a, b, c] = &self.forward;
        let first = verify_ses(a, b, c, opts)?;
        let [a, b, c] = &self.backward;
        let second = verify_ses(a, b, c, opts)?;
        Ok([first, second])
    }
}

/// Counts of indecomposable rank-2 modules with three-box profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModuleCounts {
    pub total: usize,
    /// Profiles with `|I ∩ J| = k - 3`.
    pub real_roots: usize,
}

/// Enumerates three-box profiles through webs and `psi`.
pub fn enumerate_modules(k: usize, n: usize) -> Result<ModuleCounts> {
    let mut counts = ModuleCounts {
        total: 0,
        real_roots: 0,
    };
    let mut err = None;
    for_each_web(k, n, |w| {
        if err.is_some() {
            return;
        }
        match psi(&w) {
            Ok(p) => {
                counts.total += 1;
                let common = p.top().iter().filter(|&i| p.bottom().contains(i)).count();
                if common + 3 == k {
                    counts.real_roots += 1;
                }
            }
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(counts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cactus::admissible_mutations;

    fn r1(n: usize, s: &[usize]) -> SesTerm {
        SesTerm::Rank1(LabelSet::new(n, s.iter().copied()).unwrap())
    }

    #[test]
    fn plucker_exchange_on_gr26() {
        // p13 p24 = p12 p34 + p14 p23
        let opts = SesOptions::default();
        verify_ses(
            &[r1(4, &[1, 3])],
            &[r1(4, &[1, 4]), r1(4, &[2, 3])],
            &[r1(4, &[2, 4])],
            &opts,
        )
        .unwrap();
        verify_ses(
            &[r1(4, &[2, 4])],
            &[r1(4, &[1, 2]), r1(4, &[3, 4])],
            &[r1(4, &[1, 3])],
            &opts,
        )
        .unwrap();
        let wrong = verify_ses(
            &[r1(4, &[1, 3])],
            &[r1(4, &[1, 4]), r1(4, &[2, 3])],
            &[r1(4, &[1, 3])],
            &opts,
        );
        assert!(matches!(wrong, Err(Error::Ses(_))));
        // the pairing is not symmetric
        assert!(verify_ses(
            &[r1(4, &[1, 3])],
            &[r1(4, &[1, 2]), r1(4, &[3, 4])],
            &[r1(4, &[2, 4])],
            &opts
        )
        .is_err());
    }

    #[test]
    fn module_counts() {
        assert_eq!(
            enumerate_modules(3, 6).unwrap(),
            ModuleCounts {
                total: 2,
                real_roots: 2
            }
        );
        assert_eq!(enumerate_modules(2, 5).unwrap().total, 0);
    }

    #[test]
    fn exchange_sequences_k3() {
        let xs = admissible_mutations(3);
        assert!(!xs.is_empty());
        for x in xs {
            ExchangeSequences::new(&x)
                .unwrap()
                .verify(&SesOptions::default())
                .unwrap();
        }
    }

    #[test]
    fn stretched_sequences_stay_exact() {
        let x = admissible_mutations(4)[0];
        let seqs = ExchangeSequences::new(&x).unwrap();
        for (dir, i) in [
            (Direction::Up, 1),
            (Direction::Down, 4),
            (Direction::Up, 10),
        ] {
            let stretched = seqs.map(|t| t.stretch(dir, i)).unwrap();
            stretched.verify(&SesOptions::default()).unwrap();
        }
    }

    #[test]
    fn worked_case_reduced_ambient() {
        let x = TcfrParams::new(7, 5, 1, 4, 4).unwrap();
        let reduced = ExchangeSequences::new(&x)
            .unwrap()
            .forget(&[18, 12, 6])
            .unwrap();
        assert!(reduced.forward.iter().flatten().all(|t| t.n() == 15));
        let [a, b] = reduced.verify(&SesOptions::default()).unwrap();
        assert_eq!(a.orders, vec![30, 45]);
        assert_eq!(b.middle.len(), 2);
    }

    #[test]
    fn rank_mismatch_is_rejected() {
        let e = verify_ses(
            &[r1(4, &[1, 3])],
            &[r1(4, &[1, 4])],
            &[r1(4, &[2, 4])],
            &SesOptions::default(),
        );
        assert!(matches!(e, Err(Error::Ses(_))));
    }
}
