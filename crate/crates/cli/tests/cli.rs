use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

use webmod::profiles::Rank2Profile;
use webmod::webs::{enumerate_webs, Rank2Web, Web};

const PRIMITIVE: &str = r#"{"kind":"rank2","k":3,"n":6,"R":[1,2],"S":[3,4],"T":[5,6],"V":[]}"#;

fn webmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_webmod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn webmod_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_webmod"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("JSON output")
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn profile_of(o: &Output) -> Rank2Profile {
    serde_json::from_value(json(o)["profile"].clone()).unwrap()
}

#[test]
fn enumerate_gr36_has_two_webs() {
    let o = webmod(&["enumerate", "--k", "3", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["total"], 2);
    let webs = v["webs"].as_array().unwrap();
    assert_eq!(webs.len(), 2);
    for w in webs {
        let parsed = Web::from_json(&w.to_string()).unwrap();
        assert_eq!(parsed.k(), 3);
    }
}

#[test]
fn enumerate_gr512_class_table() {
    let o = webmod(&["enumerate", "--k", "5", "--n", "12", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a\tb\tc\td\tcount"));
    let rows: Vec<Vec<u64>> = lines
        .map(|l| l.split('\t').map(|x| x.parse().unwrap()).collect())
        .collect();
    let count = |abc: [u64; 3], d: u64| {
        rows.iter()
            .find(|r| r[..3] == abc && r[3] == d)
            .map(|r| r[4])
            .unwrap_or(0)
    };
    assert_eq!(count([2, 2, 2], 2), 2 * binomial(12, 6) * binomial(6, 2));
    assert_eq!(count([3, 3, 2], 1), 8 * binomial(12, 8) * binomial(4, 1));
    assert_eq!(
        count([4, 3, 3], 0) + count([4, 4, 2], 0),
        20 * binomial(12, 10)
    );
    assert_eq!(rows.iter().map(|r| r[4]).sum::<u64>(), 44880);
}

#[test]
fn enumerate_gr35_is_empty() {
    let o = webmod(&["enumerate", "--k", "3", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["total"], 0);
}

#[test]
fn enumerate_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("webs.json");
    let o = webmod(&[
        "enumerate",
        "--k",
        "3",
        "--n",
        "6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["total"], 2);
}

#[test]
fn psi_of_primitive_web() {
    let o = webmod(&["psi", PRIMITIVE]);
    assert_eq!(o.status.code(), Some(0));
    let expected = Rank2Profile::from_labels(6, &[1, 3, 5], &[2, 4, 6]).unwrap();
    assert_eq!(profile_of(&o), expected);
}

#[test]
fn psi_rejects_invalid_web() {
    let bad = r#"{"kind":"rank2","k":3,"n":6,"R":[1,3],"S":[2],"T":[4,5,6],"V":[]}"#;
    let o = webmod(&["psi", bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("separated"), "{}", stderr(&o));
    let o = webmod(&["psi", "{not json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn psi_inverse_round_trips() {
    let webs: Vec<Rank2Web> = enumerate_webs(3, 6)
        .into_iter()
        .chain(enumerate_webs(4, 8).into_iter().step_by(37))
        .collect();
    assert!(webs.len() > 5);
    for w in webs {
        let web = Web::Rank2(w.clone()).to_json();
        let p = webmod(&["psi", &web]);
        assert_eq!(p.status.code(), Some(0));
        let back = webmod_stdin(&["psi-inverse", "-"], &stdout(&p));
        assert_eq!(back.status.code(), Some(0), "{}", stderr(&back));
        assert_eq!(Web::from_json(&stdout(&back)).unwrap(), Web::Rank2(w));
    }
}

#[test]
fn psi_inverse_accepts_profile_words() {
    let o = webmod(&["psi-inverse", "><><><"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        Web::from_json(&stdout(&o)).unwrap(),
        Web::from_json(PRIMITIVE).unwrap()
    );
}

#[test]
fn stretching_webs_and_profiles() {
    let o = webmod(&["stretch", "--dir", "up", "--at", "3", PRIMITIVE]);
    assert_eq!(o.status.code(), Some(0));
    let expected = Rank2Web::from_labels(3, 7, &[1, 2], &[4, 5], &[6, 7], &[]).unwrap();
    assert_eq!(Web::from_json(&stdout(&o)).unwrap(), Web::Rank2(expected));

    let o = webmod(&["stretch", "--dir", "down", "--at", "3", PRIMITIVE]);
    let expected = Rank2Web::from_labels(4, 7, &[1, 2], &[4, 5], &[6, 7], &[3]).unwrap();
    assert_eq!(Web::from_json(&stdout(&o)).unwrap(), Web::Rank2(expected));

    let profile = r#"{"n":6,"top":[1,3,5],"bottom":[2,4,6]}"#;
    let o = webmod(&["stretch", "--dir", "up", "--at", "3", profile]);
    assert_eq!(o.status.code(), Some(0));
    let expected = Rank2Profile::from_labels(7, &[1, 4, 6], &[2, 5, 7]).unwrap();
    assert_eq!(profile_of(&o), expected);
}

#[test]
fn eval_rank1_web_is_a_minor() {
    let dir = tempfile::tempdir().unwrap();
    let point = dir.path().join("p.tsv");
    std::fs::write(&point, "1\t2\t0\t1/2\n3\t-1\t1\t0\n").unwrap();
    let web = r#"{"kind":"rank1","k":2,"n":4,"leaves":[2,4]}"#;
    let o = webmod(&["eval", web, "--point", point.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // det [[2, 1/2], [-1, 0]] = 1/2
    assert_eq!(stdout(&o).trim(), "1/2");
}

#[test]
fn eval_with_seed_is_reproducible() {
    let a = webmod(&["eval", PRIMITIVE, "--seed", "11"]);
    let b = webmod(&["eval", PRIMITIVE, "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let o = webmod(&["eval", PRIMITIVE]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_identity_k4() {
    let o = webmod(&[
        "verify",
        "identity",
        "--k",
        "4",
        "--samples",
        "20",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(!text.contains("FAIL"));
    for kind in ["exchange", "degeneracy", "chain"] {
        assert!(text.contains(&format!("PASS\t{kind}")), "no {kind} checks");
    }
}

#[test]
fn verify_ses_worked_case() {
    let o = webmod(&["verify", "ses", "--k", "7", "--case", "5,4,4,1", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    let certs = v["payload"].as_array().unwrap();
    assert_eq!(certs.len(), 2);
    assert_eq!(certs[0]["sequence"], "forward");
    assert_eq!(certs[1]["sequence"], "backward");
    for c in certs {
        assert_eq!(c["orders"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn verify_ses_reduced_and_chains() {
    let o = webmod(&[
        "verify", "ses", "--k", "7", "--case", "5,4,4,1", "--forget", "18,12,6",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("2 checks, 2 passed"));
    let o = webmod(&["verify", "ses", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_failure_exits_one_with_payload() {
    let o = webmod(&[
        "verify", "ses", "--k", "3", "--case", "3,1,1,1", "--order", "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let payload: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(payload["failed"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_input_errors_exit_two() {
    let o = webmod(&["verify", "ses", "--k", "7", "--case", "5,4,4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = webmod(&["verify", "ses", "--k", "4", "--case", "9,9,9,9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_counts_and_relations() {
    let o = webmod(&["verify", "counts", "--k", "5", "--n", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("enumerated 44880"));
    let o = webmod(&["verify", "relations", "--k", "3", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    // 20 rank-1 modules and 2 three-box modules
    assert!(stdout(&o).contains("22 checks, 22 passed"));
}

fn count(svg: &str, needle: &str) -> usize {
    svg.matches(needle).count()
}

#[test]
fn render_primitive_web() {
    let o = webmod(&["render", PRIMITIVE]);
    assert_eq!(o.status.code(), Some(0));
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg"));
    assert_eq!(count(&svg, r#"class="boundary""#), 6);
    assert_eq!(count(&svg, r#"class="white""#), 3);
    assert_eq!(count(&svg, r#"class="black""#), 1);
    // six leaves and three spokes
    assert_eq!(count(&svg, "<line"), 9);
}

#[test]
fn render_rank1_star() {
    let o = webmod(&["render", r#"{"kind":"rank1","k":3,"n":6,"leaves":[1,3,5]}"#]);
    let svg = stdout(&o);
    assert_eq!(count(&svg, r#"class="white""#), 1);
    assert_eq!(count(&svg, r#"class="black""#), 0);
    assert_eq!(count(&svg, "<line"), 3);
}

#[test]
fn render_profile_boxes() {
    let o = webmod(&["render", r#"{"n":6,"top":[1,3,5],"bottom":[2,4,6]}"#]);
    assert_eq!(o.status.code(), Some(0));
    let svg = stdout(&o);
    assert_eq!(count(&svg, "<polyline"), 2);
    assert_eq!(count(&svg, r#"class="box""#), 3);
    let o = webmod(&["render", "UD<>"]);
    assert_eq!(count(&stdout(&o), r#"class="box""#), 1);
}
