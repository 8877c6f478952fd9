mod input;
mod render;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde_json::json;

use webmod::evaluation::{eval_web, random_point};
use webmod::jks::SesOptions;
use webmod::profiles::{psi, psi_inverse};
use webmod::webs::{count_by_class, enumerate_webs, Direction, Web, WebJson};

use input::{parse_object, parse_point, parse_profile, parse_web, read_arg, Object};
use verify::Report;

/// Rank-2 webs on Grassmannians and the matching modules over A(k,n).
#[derive(Parser)]
#[command(name = "webmod", version)]
struct Cli {
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Up,
    Down,
}

#[derive(Subcommand)]
enum Command {
    /// List every web of the rank-2 family on Gr(k,n) with a class table.
    Enumerate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// json: webs and classes; tsv: the class table only.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Profile of a rank-2 web. INPUT is JSON, a file, or `-` for stdin.
    Psi { input: String },
    /// Canonical web of a three-box profile (JSON or a word over U D < >).
    PsiInverse { input: String },
    /// Insert an up or down step at position `at` into a web or profile.
    Stretch {
        input: String,
        #[arg(long, value_enum)]
        dir: Dir,
        #[arg(long)]
        at: usize,
    },
    /// Evaluate a web at a point given as a TSV matrix, or at a random point.
    Eval {
        web: String,
        /// k x n matrix of rationals, one row per line.
        #[arg(long, conflicts_with = "seed")]
        point: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
        /// Report as JSON instead of one line per check.
        #[arg(long, global = true)]
        json: bool,
    },
    /// Draw a web or a profile as SVG.
    Render { input: String },
}

#[derive(Subcommand)]
enum VerifyKind {
    /// Exchange, degeneracy and chain identities of the tcfr family.
    Identity {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Short exact sequences of one exchange (`--case a,b,c,d`) or of
    /// every cactus chain step for `k`.
    Ses {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        case: Option<String>,
        /// Labels to delete from every term first, e.g. `18,12,6`.
        #[arg(long)]
        forget: Option<String>,
        #[arg(long, default_value_t = SesOptions::default().seed)]
        seed: u64,
        /// Truncation order (default 2n).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Module relations for all rank-1 and three-box modules of A(k,n).
    Relations {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Enumeration counts against closed forms.
    Counts {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
}

/// A finished command: its output and whether every check passed.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, passed: true }
    }
}

fn direction(d: Dir) -> Direction {
    match d {
        Dir::Up => Direction::Up,
        Dir::Down => Direction::Down,
    }
}

fn enumerate(k: usize, n: usize, format: Format) -> Result<String> {
    if k == 0 || k >= n {
        bail!("need 0 < k < n");
    }
    let classes = count_by_class(k, n);
    Ok(match format {
        Format::Tsv => {
            let mut s = String::from("a\tb\tc\td\tcount\n");
            for (c, count) in &classes {
                let [a, b, cc] = c.abc;
                s.push_str(&format!("{a}\t{b}\t{cc}\t{}\t{count}\n", c.d));
            }
            s
        }
        Format::Json => {
            let webs: Vec<WebJson> = enumerate_webs(k, n)
                .into_iter()
                .map(|w| WebJson::from(&Web::Rank2(w)))
                .collect();
            let table: Vec<_> = classes
                .iter()
                .map(|(c, count)| {
                    json!({"a": c.abc[0], "b": c.abc[1], "c": c.abc[2], "d": c.d, "count": count})
                })
                .collect();
            let out = json!({"k": k, "n": n, "total": webs.len(), "classes": table, "webs": webs});
            serde_json::to_string_pretty(&out)? + "\n"
        }
    })
}

fn profile_json(p: &webmod::profiles::Rank2Profile) -> Result<String> {
    let out = json!({"profile": p, "word": p.compact(), "display": p.to_string()});
    Ok(serde_json::to_string(&out)? + "\n")
}

fn report(rep: Report, as_json: bool) -> Result<Outcome> {
    let text = if as_json {
        serde_json::to_string_pretty(&rep.to_json())? + "\n"
    } else {
        rep.to_text()
    };
    if !rep.passed() && !as_json {
        eprintln!("{}", rep.failures_json());
    }
    Ok(Outcome {
        text,
        passed: rep.passed(),
    })
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Enumerate { k, n, format } => Ok(Outcome::ok(enumerate(k, n, format)?)),
        Command::Psi { input } => {
            let web = match parse_web(&read_arg(&input)?)? {
                Web::Rank2(w) => w,
                _ => bail!("psi takes a rank-2 web"),
            };
            Ok(Outcome::ok(profile_json(&psi(&web)?)?))
        }
        Command::PsiInverse { input } => {
            let p = parse_profile(&read_arg(&input)?)?;
            Ok(Outcome::ok(Web::Rank2(psi_inverse(&p)?).to_json() + "\n"))
        }
        Command::Stretch { input, dir, at } => {
            let d = direction(dir);
            Ok(Outcome::ok(match parse_object(&read_arg(&input)?)? {
                Object::Web(w) => w.stretch(d, at)?.to_json() + "\n",
                Object::Profile(p) => profile_json(&p.stretch(d, at)?)?,
            }))
        }
        Command::Eval { web, point, seed } => {
            let w = parse_web(&read_arg(&web)?)?;
            let p = match (point, seed) {
                (Some(p), _) => parse_point(&read_arg(&p)?)?,
                (None, Some(seed)) => random_point(
                    w.k(),
                    w.n(),
                    &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed),
                ),
                (None, None) => bail!("give --point or --seed"),
            };
            if (p.k(), p.n()) != (w.k(), w.n()) {
                bail!(
                    "point is {}x{} but the web lives on Gr({},{})",
                    p.k(),
                    p.n(),
                    w.k(),
                    w.n()
                );
            }
            Ok(Outcome::ok(format!("{}\n", eval_web(&w, &p)?)))
        }
        Command::Render { input } => Ok(Outcome::ok(match parse_object(&read_arg(&input)?)? {
            Object::Web(w) => render::render_web(&w)?,
            Object::Profile(p) => render::render_profile(&p)?,
        })),
        Command::Verify { kind, json } => {
            let rep = match kind {
                VerifyKind::Identity { k, samples, seed } => verify::identities(k, samples, seed)?,
                VerifyKind::Ses {
                    k,
                    case,
                    forget,
                    seed,
                    order,
                } => {
                    let case = match case.as_deref().map(input::parse_list).transpose()? {
                        Some(v) => Some(
                            <[usize; 4]>::try_from(v.as_slice())
                                .context("--case takes four numbers a,b,c,d")?,
                        ),
                        None => None,
                    };
                    let forget = forget
                        .as_deref()
                        .map(input::parse_list)
                        .transpose()?
                        .unwrap_or_default();
                    let opts = SesOptions {
                        order,
                        seed,
                        ..SesOptions::default()
                    };
                    verify::ses(k, case, &forget, &opts)?
                }
                VerifyKind::Relations { k, n, order } => verify::relations(k, n, order)?,
                VerifyKind::Counts { k, n } => verify::counts(k, n)?,
            };
            report(rep, json)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(outcome) => {
            let written = match &out {
                Some(path) => std::fs::write(path, &outcome.text)
                    .with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{}", outcome.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
