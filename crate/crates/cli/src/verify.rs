//! The `verify` subcommands. Each builds a [`Report`] of named checks.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use itertools::Itertools;
use serde_json::{json, Value};

use webmod::cactus::{
    admissible_mutations, cactus_chains, degeneracy_identity, exchange_identity, valid_params,
    verify_chain, TcfrParams,
};
use webmod::cyclic::LabelSet;
use webmod::evaluation::{verify_identity, IdentityReport};
use webmod::jks::explicit::{module_from_rank1_at, validated_lattice};
use webmod::jks::ses::{enumerate_modules, ExchangeSequences, SesOptions};
use webmod::jks::SesCertificate;
use webmod::profiles::{psi, Rank1Profile};
use webmod::webs::{count_by_class, for_each_web, WebClass};

pub struct Check {
    pub kind: &'static str,
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Default)]
pub struct Report {
    pub checks: Vec<Check>,
    /// Extra machine-readable output, e.g. SES certificates.
    pub payload: Vec<Value>,
}

impl Report {
    fn push(&mut self, kind: &'static str, name: impl ToString, ok: bool, detail: impl ToString) {
        self.checks.push(Check {
            kind,
            name: name.to_string(),
            ok,
            detail: detail.to_string(),
        });
    }

    fn record<T>(
        &mut self,
        kind: &'static str,
        name: impl ToString,
        r: webmod::error::Result<T>,
        detail: impl FnOnce(&T) -> String,
    ) -> Option<T> {
        match r {
            Ok(v) => {
                let d = detail(&v);
                self.push(kind, name, true, d);
                Some(v)
            }
            Err(e) => {
                self.push(kind, name, false, e);
                None
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "kind": c.kind, "name": c.name, "ok": c.ok, "detail": c.detail,
            })).collect::<Vec<_>>(),
            "payload": self.payload,
        })
    }

    pub fn failures_json(&self) -> Value {
        json!({
            "failed": self.checks.iter().filter(|c| !c.ok).map(|c| json!({
                "kind": c.kind, "name": c.name, "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.ok { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}\t{}\t{}\t{}\n", c.kind, c.name, c.detail));
        }
        let failed = self.checks.iter().filter(|c| !c.ok).count();
        out.push_str(&format!(
            "{} checks, {} passed, {failed} failed\n",
            self.checks.len(),
            self.checks.len() - failed
        ));
        out
    }
}

pub fn identities(k: usize, samples: usize, seed: u64) -> Result<Report> {
    if k < 3 {
        bail!("k must be at least 3");
    }
    let mut rep = Report::default();
    for (i, x) in admissible_mutations(k).iter().enumerate() {
        let r = exchange_identity(x).and_then(|e| verify_identity(&e, samples, seed + i as u64));
        push_identity(&mut rep, "exchange", x, r);
    }
    for (i, p) in valid_params(k).iter().enumerate() {
        if let Some(e) = degeneracy_identity(p) {
            let r = e.and_then(|e| verify_identity(&e, samples, seed + 1000 + i as u64));
            push_identity(&mut rep, "degeneracy", p, r);
        }
    }
    for (i, chain) in cactus_chains(k).iter().enumerate() {
        let name = format!("chain from {}", chain[0]);
        match verify_chain(chain, samples, seed + 2000 + i as u64) {
            Ok(reports) => {
                let ok = reports.len() == chain.len() && reports.iter().all(|r| r.ok);
                rep.push("chain", name, ok, format!("{} steps", reports.len()));
            }
            Err(e) => rep.push("chain", name, false, e),
        }
    }
    Ok(rep)
}

fn push_identity(
    rep: &mut Report,
    kind: &'static str,
    p: &TcfrParams,
    r: webmod::error::Result<IdentityReport>,
) {
    match r {
        Ok(r) if r.ok => rep.push(kind, p, true, format!("{} samples", r.samples)),
        Ok(r) => rep.push(kind, p, false, r.witness.unwrap_or_default()),
        Err(e) => rep.push(kind, p, false, e),
    }
}

fn certificate_json(kind: &str, cert: &SesCertificate) -> Value {
    let mut v = serde_json::to_value(cert).expect("serializable");
    v["sequence"] = json!(kind);
    v
}

fn ses_pair(rep: &mut Report, name: &str, seqs: &ExchangeSequences, opts: &SesOptions) {
    for (kind, [a, b, c]) in [("forward", &seqs.forward), ("backward", &seqs.backward)] {
        let label = |ts: &[webmod::jks::ses::SesTerm]| ts.iter().join(" + ");
        let seq = format!(
            "{name}: 0 -> {} -> {} -> {} -> 0",
            label(a),
            label(b),
            label(c)
        );
        let r = webmod::jks::verify_ses(a, b, c, opts);
        if let Some(cert) = rep.record("ses", seq, r, |c| {
            format!("orders {:?}, {} candidate(s)", c.orders, c.candidates_tried)
        }) {
            rep.payload.push(certificate_json(kind, &cert));
        }
    }
}

/// Both sequences at one parameter set, optionally after forgetting labels,
/// or (without a case) at every step of every cactus chain for `k`.
pub fn ses(
    k: usize,
    case: Option<[usize; 4]>,
    forget: &[usize],
    opts: &SesOptions,
) -> Result<Report> {
    let mut rep = Report::default();
    let steps: Vec<TcfrParams> = match case {
        Some([a, b, c, d]) => vec![TcfrParams::new(k, a, d, b, c)?],
        None => cactus_chains(k).into_iter().flatten().collect(),
    };
    if steps.is_empty() {
        bail!("no exchange steps for k = {k}");
    }
    for x in steps {
        let mut seqs = ExchangeSequences::new(&x)?;
        let mut name = x.to_string();
        if !forget.is_empty() {
            seqs = seqs.forget(forget)?;
            name = format!("{name} without {forget:?}");
        }
        ses_pair(&mut rep, &name, &seqs, opts);
    }
    Ok(rep)
}

/// Relations at `N = order` and `N + n` for every rank-1 module and every
/// module of a three-box profile over `A(k, n)`.
pub fn relations(k: usize, n: usize, order: Option<usize>) -> Result<Report> {
    if k == 0 || k >= n {
        bail!("need 0 < k < n");
    }
    let order = order.unwrap_or(2 * n);
    let mut rep = Report::default();
    for s in (1..=n).combinations(k) {
        let profile = Rank1Profile {
            set: LabelSet::new(n, s)?,
        };
        let name = format!("rank 1 {}", profile.set);
        let r = [order, order + n]
            .iter()
            .try_for_each(|&o| module_from_rank1_at(&profile, o).and_then(|m| m.check_relations()));
        rep.record("relations", name, r, |_| {
            format!("N = {order}, {}", order + n)
        });
    }
    let mut profiles = Vec::new();
    for_each_web(k, n, |w| profiles.push(psi(&w)));
    for p in profiles {
        let p = p?;
        let r = validated_lattice(&p, order).and_then(|(lattice, m)| {
            m.check_relations()?;
            lattice.to_explicit(order + n)?.check_relations()
        });
        rep.record("relations", format!("rank 2 {p}"), r, |_| {
            format!("N = {order}, {}", order + n)
        });
    }
    Ok(rep)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of webs of class `(a >= b >= c, d)` on `[n]`: choose the
/// `a + b + c` leaves and the `d` labels of `V`, then cut the leaves into
/// three consecutive arcs of the given sizes, up to rotating `(R, S, T)`.
pub fn closed_form_count(class: &WebClass, n: usize) -> u128 {
    let [a, b, c] = class.abc;
    let m = a + b + c;
    let cuts = if a == b && b == c {
        m / 3
    } else if a == b || b == c {
        m
    } else {
        2 * m
    };
    cuts as u128 * binomial(n, m) * binomial(n - m.min(n), class.d)
}

pub fn expected_classes(k: usize, n: usize) -> BTreeMap<WebClass, u128> {
    let mut out = BTreeMap::new();
    for a in 1..=n {
        for b in 1..=a {
            for c in 1..=b {
                let m = a + b + c;
                if m % 2 != 0 || a >= b + c || m > 2 * k || m > n {
                    continue;
                }
                let d = (2 * k - m) / 2;
                if m + d > n {
                    continue;
                }
                let class = WebClass { abc: [a, b, c], d };
                out.insert(class, closed_form_count(&class, n));
            }
        }
    }
    out
}

pub fn counts(k: usize, n: usize) -> Result<Report> {
    if k < 3 || k >= n {
        bail!("need 3 <= k < n");
    }
    let mut rep = Report::default();
    let found = count_by_class(k, n);
    let expected = expected_classes(k, n);
    let mut classes: Vec<WebClass> = found.keys().chain(expected.keys()).copied().collect();
    classes.sort();
    classes.dedup();
    for class in &classes {
        let got = found.get(class).copied().unwrap_or(0) as u128;
        let want = expected.get(class).copied().unwrap_or(0);
        rep.push(
            "class",
            class,
            got == want,
            format!("enumerated {got}, closed form {want}"),
        );
    }
    let total: u128 = found.values().map(|&c| c as u128).sum();
    let want: u128 = expected.values().sum();
    rep.push(
        "total",
        format!("Gr({k},{n})"),
        total == want,
        format!("enumerated {total}, closed form {want}"),
    );
    let real: u128 = found
        .iter()
        .filter(|(c, _)| c.d + 3 == k)
        .map(|(_, &c)| c as u128)
        .sum();
    let want = 2 * binomial(n, 6) * binomial(n - 6.min(n), k - 3);
    rep.push(
        "real roots",
        format!("|V| = {}", k - 3),
        real == want,
        format!(
            "enumerated {real}, 2 C({n},6) C({},{}) = {want}",
            n.saturating_sub(6),
            k - 3
        ),
    );
    match enumerate_modules(k, n) {
        Ok(m) => rep.push(
            "modules",
            "three-box profiles",
            m.total as u128 == total && m.real_roots as u128 == real,
            format!("{} profiles, {} real roots", m.total, m.real_roots),
        ),
        Err(e) => rep.push("modules", "three-box profiles", false, e),
    }
    Ok(rep)
}
