mod input;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use cantor_ramsey::devlin::{self, TreeType};
use cantor_ramsey::lab::{self, ColoringSpec, QCopy};
use cantor_ramsey::surjections::{self, Surjection};
use cantor_ramsey::{suite, BoundaryTuple, Error, Point};
use clap::{Parser, Subcommand};
use serde::Serialize;

use input::{depth_cap, input_error, load, InputError};

#[derive(Parser)]
#[command(
    name = "cantor-ramsey",
    version,
    about = "Exact computations with nondecreasing surjections of the Cantor space"
)]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Emit JSON instead of the human-readable form.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The tangent number t_k.
    Tangent { k: usize },
    /// Lists the similarity types of l-tuples in canonical order.
    Types {
        #[arg(long)]
        l: usize,
    },
    /// Similarity type of a tuple (a JSON array of points).
    TypeOf { tuple: PathBuf },
    /// Finds a tuple of the given type inside the max-set of h.
    SearchType {
        #[arg(long)]
        h: PathBuf,
        /// Type encoding such as "(0 1 2)".
        #[arg(long = "type")]
        target: String,
    },
    /// Evaluates f at a point.
    Eval {
        f: PathBuf,
        x: PathBuf,
        #[arg(long, default_value_t = 16)]
        digits: usize,
    },
    /// The composite f ∘ g.
    Compose {
        f: PathBuf,
        g: PathBuf,
        /// Materialize the composite to this depth instead of writing a chain.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// The sup distance between two surjections.
    Dist { f: PathBuf, g: PathBuf },
    /// Factors g through h down to a depth.
    Factor {
        g: PathBuf,
        h: PathBuf,
        #[arg(long)]
        depth: u32,
    },
    /// The depth-d fingerprint of f.
    Boundaries {
        f: PathBuf,
        #[arg(long)]
        depth: u32,
    },
    /// The type coloring of f's depth-k fingerprint.
    ColorDevlin {
        f: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// The omega-coloring of a Q-copy.
    ColorOmega { y: PathBuf },
    /// A sub-copy of Y with the requested omega-color.
    WitnessOmega {
        y: PathBuf,
        #[arg(long)]
        target: u64,
    },
    /// The tree of a Q-copy down to a depth.
    PerfectTree {
        y: PathBuf,
        #[arg(long)]
        depth: u32,
    },
    /// Realizes every type color by a factor of h.
    RealizeAll {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Searches for h with few colors under a fingerprint coloring.
    Oscillation {
        #[arg(long)]
        coloring: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1024)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The parameters k, l and t for an epsilon.
    Params {
        #[arg(long, default_value_t = 2)]
        b: u8,
        #[arg(long)]
        eps: f64,
    },
    /// Runs the verification suite.
    Verify {
        #[arg(long)]
        seed: u64,
        /// Run only these criteria.
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
    },
}

/// What a command produced: the text to emit and whether its assertions held.
struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, ok: true }
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// JSON when asked for, otherwise the given text.
fn either<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> anyhow::Result<Output> {
    Ok(Output::ok(if json { to_json(value)? } else { text() }))
}

fn load_tuple(path: &Path) -> anyhow::Result<Vec<Point>> {
    let value: serde_json::Value = load(path)?;
    if value.is_array() {
        return serde_json::from_value(value).map_err(|e| input_error(format!("{}: {e}", path.display())));
    }
    let tuple: BoundaryTuple =
        serde_json::from_value(value).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok(tuple.into_entries())
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    let json = cli.json;
    let cap = depth_cap()?;
    match &cli.command {
        Command::Tangent { k } => {
            let t = devlin::tangent_number(*k)?;
            Ok(Output::ok(format!("{t}\n")))
        }
        Command::Types { l } => {
            let types = devlin::enumerate_types(*l)?;
            let encodings: Vec<String> = types.iter().map(TreeType::encoding).collect();
            either(json, &encodings, || {
                let mut s = String::new();
                for (i, e) in encodings.iter().enumerate() {
                    let _ = writeln!(s, "{i:>6}  {e}");
                }
                s
            })
        }
        Command::TypeOf { tuple } => {
            let points = load_tuple(tuple)?;
            match devlin::similarity_type(&points) {
                Ok(t) => {
                    let index = devlin::type_index(&t).ok();
                    let report = serde_json::json!({ "type": t.encoding(), "index": index });
                    either(json, &report, || match index {
                        Some(i) => format!("{t}  (index {i})\n"),
                        None => format!("{t}\n"),
                    })
                }
                Err(Error::NotStronglyDiagonal) => {
                    let report = serde_json::json!({ "type": null, "strongly_diagonal": false });
                    either(json, &report, || "not strongly diagonal\n".to_string())
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::SearchType { h, target } => {
            let h: Surjection = load(h)?;
            let target = TreeType::parse(target).map_err(|e| input_error(format!("--type: {e}")))?;
            match devlin::search_tuple_of_type(&h, &target, cap)? {
                Some(hit) => {
                    let report =
                        serde_json::json!({ "type": target.encoding(), "depth": hit.depth, "tuple": hit.tuple });
                    Ok(Output::ok(to_json(&report)?))
                }
                None => Ok(Output {
                    text: format!("no tuple of type {target} within depth {cap}\n"),
                    ok: false,
                }),
            }
        }
        Command::Eval { f, x, digits } => {
            let f: Surjection = load(f)?;
            let x: Point = load(x)?;
            let e = f.evaluate(&x, *digits, cap)?;
            let report = serde_json::json!({ "digits": e.digits, "exact": e.exact });
            either(json, &report, || match &e.exact {
                Some(y) => format!("{y}\n"),
                None => {
                    let d: String = e.digits.iter().map(|d| d.to_string()).collect();
                    format!("{d}...\n")
                }
            })
        }
        Command::Compose { f, g, depth } => {
            let f: Surjection = load(f)?;
            let g: Surjection = load(g)?;
            let c = surjections::compose(&f, &g)?;
            match depth {
                Some(d) => Ok(Output::ok(to_json(&surjections::to_filtering(&c, *d)?)?)),
                None => Ok(Output::ok(to_json(&c)?)),
            }
        }
        Command::Dist { f, g } => {
            let f: Surjection = load(f)?;
            let g: Surjection = load(g)?;
            let d = surjections::distance(&f, &g, cap)?;
            let report = match d {
                surjections::SupDistance::Exact { exponent } => serde_json::json!({ "exponent": exponent }),
                surjections::SupDistance::ZeroToCap { cap } => serde_json::json!({ "zero_to_cap": cap }),
            };
            either(json, &report, || format!("{d}\n"))
        }
        Command::Factor { g, h, depth } => {
            let g: Surjection = load(g)?;
            let h: Surjection = load(h)?;
            let f = surjections::factor_through(&g, &h, *depth, cap)?;
            Ok(Output::ok(to_json(&f)?))
        }
        Command::Boundaries { f, depth } => {
            let f: Surjection = load(f)?;
            let t = f.boundary_tuple(*depth)?;
            either(json, &t, || t.entries().iter().map(|p| format!("{p}\n")).collect())
        }
        Command::ColorDevlin { f, k } => {
            let f: Surjection = load(f)?;
            let color = lab::lower_bound_coloring(&f, *k)?;
            let fingerprint = f.boundary_tuple(*k)?;
            let ty = devlin::similarity_type(fingerprint.entries())
                .ok()
                .map(|t| t.encoding());
            let report = serde_json::json!({ "color": color, "type": ty });
            either(json, &report, || match &ty {
                Some(t) => format!("{color}  {t}\n"),
                None => format!("{color}  (not strongly diagonal)\n"),
            })
        }
        Command::ColorOmega { y } => {
            let y: QCopy = load(y)?;
            let c = lab::omega_coloring_details(&y)?;
            either(json, &c, || {
                format!(
                    "{}\n|t_0|, |t_1| = {:?}\n|s_i| < |t_1|: {:?}\n",
                    c.color, c.t_levels, c.s_levels
                )
            })
        }
        Command::WitnessOmega { y, target } => {
            let y: QCopy = load(y)?;
            let z = lab::build_witness(&y, *target)?;
            let got = lab::omega_coloring(&z)?;
            Ok(Output {
                text: to_json(&z)?,
                ok: got == *target && z.is_subset_of(&y),
            })
        }
        Command::PerfectTree { y, depth } => {
            let y: QCopy = load(y)?;
            let tree = lab::perfect_tree(&y, *depth);
            either(json, &tree, || {
                let show = |w: &String| if w.is_empty() { "()".to_string() } else { w.clone() };
                let mut s = String::new();
                let _ = writeln!(
                    s,
                    "nodes:     {}",
                    tree.nodes.iter().map(show).collect::<Vec<_>>().join(" ")
                );
                let _ = writeln!(
                    s,
                    "splitting: {}",
                    tree.splitting.iter().map(show).collect::<Vec<_>>().join(" ")
                );
                let _ = writeln!(
                    s,
                    "pending:   {}",
                    tree.pending.iter().map(show).collect::<Vec<_>>().join(" ")
                );
                s
            })
        }
        Command::RealizeAll { h, k, cap: search_cap } => {
            let h: Surjection = load(h)?;
            let mut report = lab::realize_all_colors(&h, *k, search_cap.unwrap_or(cap))?;
            let ok = report.all_realized;
            if json {
                return Ok(Output {
                    text: to_json(&report)?,
                    ok,
                });
            }
            report.elapsed_ms = None;
            let mut s = String::new();
            let _ = writeln!(
                s,
                "b = {}, k = {}, l = {}, t = {}",
                report.b, report.k, report.l, report.t
            );
            let _ = writeln!(s, "{:>5}  {:>5}  {:<8}  type", "color", "depth", "verified");
            for w in &report.realized {
                let _ = writeln!(
                    s,
                    "{:>5}  {:>5}  {:<8}  {}",
                    w.color, w.depth, w.verified, w.type_encoding
                );
            }
            for m in &report.caps_hit {
                let _ = writeln!(s, "missing: {m}");
            }
            let _ = writeln!(s, "{} of {} colors realized", report.realized.len(), report.t);
            Ok(Output { text: s, ok })
        }
        Command::Oscillation {
            coloring,
            eps,
            budget,
            seed,
        } => {
            let c: ColoringSpec = load(coloring)?;
            let report = lab::oscillation_search(&c, *eps, *budget, *seed)?;
            let ok = report.regime == lab::Regime::Heuristic || report.bound_verified;
            if json {
                return Ok(Output {
                    text: to_json(&report)?,
                    ok,
                });
            }
            let mut s = String::new();
            let _ = writeln!(s, "regime: {:?}", report.regime);
            let _ = writeln!(s, "k = {}, l = {}, t = {}", report.k, report.l, report.t);
            let _ = writeln!(s, "|B| = {}  B = {:?}", report.colors.len(), report.colors);
            let _ = writeln!(s, "evaluations: {}", report.evaluations);
            match report.regime {
                lab::Regime::Exact => {
                    let _ = writeln!(s, "bound |B| <= t verified: {}", report.bound_verified);
                }
                lab::Regime::Heuristic => {
                    let _ = writeln!(s, "sampled color set; no bound claimed");
                }
            }
            Ok(Output { text: s, ok })
        }
        Command::Params { b, eps } => {
            let p = lab::epsilon_parameters(*b, *eps)?;
            let report = serde_json::json!({ "k": p.k, "l": p.l, "t": p.t.to_string() });
            either(json, &report, || format!("k = {}, l = {}, t = {}\n", p.k, p.l, p.t))
        }
        Command::Verify { seed, criteria } => {
            let ids: Vec<u8> = if criteria.is_empty() {
                suite::CRITERIA.iter().map(|(id, _)| *id).collect()
            } else {
                criteria.clone()
            };
            let results: Vec<suite::CriterionResult> = ids.iter().map(|&id| suite::run(id, *seed)).collect();
            let ok = results.iter().all(|r| r.passed);
            if json {
                let report = serde_json::json!({ "seed": seed, "passed": ok, "criteria": results });
                return Ok(Output {
                    text: to_json(&report)?,
                    ok,
                });
            }
            let mut s = String::new();
            let _ = writeln!(s, "seed {seed}");
            for r in &results {
                let mark = if r.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    s,
                    "[{mark}] {:>2} {:<26} {:>5} cases  {}",
                    r.id, r.name, r.cases, r.summary
                );
                for f in &r.failures {
                    let _ = writeln!(s, "       counterexample: {f}");
                }
            }
            let passed = results.iter().filter(|r| r.passed).count();
            let _ = writeln!(s, "{passed}/{} criteria passed", results.len());
            Ok(Output { text: s, ok })
        }
    }
}

/// Library errors that point at the input rather than at a failed check.
fn is_input_error(e: &anyhow::Error) -> bool {
    if e.downcast_ref::<InputError>().is_some() {
        return true;
    }
    matches!(
        e.downcast_ref::<Error>(),
        Some(
            Error::InvalidArgument(_)
                | Error::InvalidBase(_)
                | Error::DigitOutOfRange { .. }
                | Error::BaseMismatch { .. }
                | Error::InvalidTuple(_)
                | Error::InvalidFiltering(_)
                | Error::InvalidQCopy(_)
                | Error::NotEventuallyMax(_)
                | Error::NotEventuallyMin(_)
                | Error::DuplicateEntries
                | Error::TypeCapExceeded { .. }
        )
    )
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        emit(&cli, &out.text)?;
        if !out.ok {
            bail!("assertion failed; see the report above");
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_input_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
