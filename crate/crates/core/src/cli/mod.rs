//! Command-line front end. [`run`] parses arguments, runs one subcommand and
//! returns the exit code with the text for stdout; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 negative answer, 2 usage or input error,
//! 3 capacity exceeded or inconclusive search.

pub mod suites;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::decide::{decide, LogicPreset, PresetKind, Verdict};
use crate::filtration::{check_filtration_lemma, filtrate, verify_filtration, FiltrationKind};
use crate::formula::{self, axiom, AxiomId, Formula, FormulaSet};
use crate::graph::{
    chromatic_number, frame_properties, is_connected, random_graph, DEFAULT_CHROMATIC_CAP,
};
use crate::json::{self, WorkbenchDocument};
use crate::kripke::{
    check, extension, frame_satisfiable, frame_valid, scheme_true, Frame, Model, Witness,
    DEFAULT_SCHEME_CAP, DEFAULT_VALUATION_CAP,
};
use crate::morphism::{check_pmorphism, repair, repair_irreflexive};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "diffmodal",
    version,
    about = "Bimodal logics with the difference modality"
)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and report its size.
    Parse { formula: String },
    /// Print a formula in canonical syntax.
    Print { formula: String },
    /// Model-check a formula at a point, or report its extension.
    Mc {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        point: Option<String>,
    },
    /// Frame validity of a formula.
    Valid {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = DEFAULT_VALUATION_CAP)]
        val_cap: u64,
    },
    /// Satisfiability of a formula on a frame.
    Sat {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = DEFAULT_VALUATION_CAP)]
        val_cap: u64,
    },
    /// Chromatic number of the first relation.
    Chromatic {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CHROMATIC_CAP)]
        cap: usize,
    },
    /// Connectivity of the first relation.
    Connected {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Structural properties of a frame.
    Props {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Generate an axiom, e.g. `CF:3`, `CON`, or `CF --k 3`.
    Gen {
        axiom: String,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Filtrate a model through Sub(formula).
    Filtrate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, value_enum, default_value_t = Kind::Minimal)]
        kind: Kind,
        /// Extra formulas for the equivalence; Sub(formula) is always included.
        #[arg(long)]
        psi: Vec<String>,
    },
    /// Check that a candidate is a filtration of a model through Sub(formula).
    VerifyFiltration {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Instance checks of the filtration lemma and the two colouring lemmas.
    CheckLemma {
        #[arg(value_enum)]
        which: Lemma,
        #[arg(long)]
        model: PathBuf,
        /// Gamma is Sub(formula); defaults to the lemma's own axiom.
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Repair a point-generated frame.
    Repair {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        irreflexive: bool,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Check a p-morphism given as a JSON object from source ids to target ids.
    Pmorphism {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        dst: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Bounded countermodel search in a preset logic.
    Decide {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[arg(long, default_value_t = DEFAULT_VALUATION_CAP)]
        val_cap: u64,
    },
    /// A seeded random graph.
    RandomGraph {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        directed: bool,
        /// Add the inequality relation as `D`.
        #[arg(long)]
        diff: bool,
    },
    /// Run randomized invariant suites.
    Proptest {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Minimal,
    Largest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Lemma {
    Filtration,
    Lemma1,
    Lemma2,
}

struct Output {
    code: i32,
    text: String,
}

impl Output {
    fn ok(text: impl Into<String>) -> Self {
        Output {
            code: 0,
            text: text.into(),
        }
    }

    fn verdict(positive: bool, text: impl Into<String>) -> Self {
        Output {
            code: if positive { 0 } else { 1 },
            text: text.into(),
        }
    }
}

/// Runs the command line `argv` (program name first).
pub fn run<S: AsRef<str>>(argv: &[S]) -> (i32, String) {
    let cli = match Cli::try_parse_from(argv.iter().map(AsRef::as_ref)) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                return (0, e.to_string());
            }
            eprint!("{e}");
            return (code, String::new());
        }
    };
    match execute(&cli) {
        Ok(out) => (out.code, out.text),
        Err(e) => {
            eprintln!("error: {e}");
            let code = if matches!(e, Error::CapacityExceeded { .. }) {
                3
            } else {
                2
            };
            (code, String::new())
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_frame(path: &Path) -> Result<Frame> {
    json::read_frame(&read_file(path)?)
}

fn load_model(path: &Path) -> Result<Model> {
    json::read_model(&read_file(path)?)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value")
}

fn witness_json(frame: &Frame, w: &Witness) -> serde_json::Value {
    json!({
        "valuation": json::valuation_to_doc(frame, &w.valuation),
        "point": frame.point(w.point),
    })
}

fn witness_text(frame: &Frame, w: &Witness) -> String {
    let mut out = format!("point: {}\n", frame.point(w.point));
    for (v, ids) in json::valuation_to_doc(frame, &w.valuation) {
        out.push_str(&format!("{v}: {{{}}}\n", ids.join(", ")));
    }
    out
}

fn execute(cli: &Cli) -> Result<Output> {
    let as_json = cli.json;
    match &cli.command {
        Command::Parse { formula } => {
            let f = formula::read(formula)?;
            let sub = f.subformulas().len();
            let (nodes, depth) = (f.node_count(), f.modal_depth());
            Ok(Output::ok(if as_json {
                pretty(
                    &json!({"formula": f.to_string(), "sub": sub, "nodes": nodes, "depth": depth}),
                )
            } else {
                format!("{f}\nsubformulas: {sub}\nnodes: {nodes}\nmodal depth: {depth}")
            }))
        }
        Command::Print { formula } => {
            let f = formula::read(formula)?;
            Ok(Output::ok(if as_json {
                pretty(&json!({"formula": f.to_string()}))
            } else {
                f.to_string()
            }))
        }
        Command::Mc {
            model,
            formula,
            point,
        } => {
            let m = load_model(model)?;
            let f = formula::read(formula)?;
            match point {
                Some(x) => {
                    let holds = check(&m, x, &f)?;
                    Ok(Output::verdict(
                        holds,
                        if as_json {
                            pretty(&json!({"holds": holds}))
                        } else {
                            holds.to_string()
                        },
                    ))
                }
                None => {
                    let ext = extension(&m, &f);
                    let ids = json::valuation_to_doc(&m.frame, &[(0, ext.clone())].into())
                        .remove("p0")
                        .unwrap();
                    let text = if as_json {
                        pretty(&json!({"extension": ids}))
                    } else {
                        ids.join(" ")
                    };
                    Ok(Output::verdict(ext.is_full(), text))
                }
            }
        }
        Command::Valid {
            frame,
            formula,
            val_cap,
        } => {
            let fr = load_frame(frame)?;
            let f = formula::read(formula)?;
            let refutation = frame_satisfiable(&fr, &f.clone().not(), *val_cap)?;
            let valid = refutation.is_none();
            debug_assert_eq!(valid, frame_valid(&fr, &f, *val_cap)?);
            let text = match (&refutation, as_json) {
                (None, true) => pretty(&json!({"valid": true})),
                (None, false) => "valid".into(),
                (Some(w), true) => {
                    let mut v = witness_json(&fr, w);
                    v["valid"] = json!(false);
                    pretty(&v)
                }
                (Some(w), false) => format!("not valid\n{}", witness_text(&fr, w)),
            };
            Ok(Output::verdict(valid, text))
        }
        Command::Sat {
            frame,
            formula,
            val_cap,
        } => {
            let fr = load_frame(frame)?;
            let f = formula::read(formula)?;
            let found = frame_satisfiable(&fr, &f, *val_cap)?;
            let text = match (&found, as_json) {
                (None, true) => pretty(&json!({"satisfiable": false})),
                (None, false) => "unsatisfiable".into(),
                (Some(w), true) => {
                    let mut v = witness_json(&fr, w);
                    v["satisfiable"] = json!(true);
                    pretty(&v)
                }
                (Some(w), false) => format!("satisfiable\n{}", witness_text(&fr, w)),
            };
            Ok(Output::verdict(found.is_some(), text))
        }
        Command::Chromatic { frame, cap } => {
            let c = chromatic_number(&load_frame(frame)?, *cap)?;
            Ok(Output::ok(if as_json {
                pretty(&json!({"chromatic": c.to_string()}))
            } else {
                c.to_string()
            }))
        }
        Command::Connected { frame } => {
            let c = is_connected(&load_frame(frame)?);
            let text = if as_json {
                pretty(&json!({"connected": c}))
            } else if c {
                "connected".into()
            } else {
                "disconnected".into()
            };
            Ok(Output::verdict(c, text))
        }
        Command::Props { frame } => {
            let fr = load_frame(frame)?;
            let p = frame_properties(&fr);
            let v = json!({
                "points": fr.len(),
                "symmetric": p.symmetric,
                "irreflexive": p.irreflexive,
                "serial": p.serial,
                "connected": is_connected(&fr),
                "point_generated": fr.is_diff_pointgen(),
            });
            Ok(Output::ok(if as_json {
                pretty(&v)
            } else {
                v.as_object()
                    .unwrap()
                    .iter()
                    .map(|(k, v)| format!("{k}: {v}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            }))
        }
        Command::Gen { axiom: name, k } => {
            let f = match formula::shorthand(name) {
                Some(f) if k.is_none() => f?,
                _ => axiom(name.parse::<AxiomId>()?, *k)?,
            };
            Ok(Output::ok(if as_json {
                pretty(&json!({"formula": f.to_string()}))
            } else {
                f.to_string()
            }))
        }
        Command::Filtrate {
            model,
            formula,
            kind,
            psi,
        } => {
            let m = load_model(model)?;
            let gamma = formula::read(formula)?.subformulas();
            let mut full_psi = gamma.clone();
            for p in psi {
                full_psi.insert(formula::read(p)?);
            }
            let kind = match kind {
                Kind::Minimal => FiltrationKind::Minimal,
                Kind::Largest => FiltrationKind::Largest,
            };
            let f = filtrate(&m, &gamma, &full_psi, kind)?;
            Ok(Output::ok(
                WorkbenchDocument::Filtration(json::filtration_to_doc(&m, &f)).to_json(),
            ))
        }
        Command::VerifyFiltration {
            model,
            candidate,
            formula,
        } => {
            let m = load_model(model)?;
            let gamma = formula::read(formula)?.subformulas();
            let doc = match WorkbenchDocument::from_json(&read_file(candidate)?)? {
                WorkbenchDocument::Filtration(doc) => doc,
                other => {
                    return Err(Error::InvalidFrame(format!(
                        "expected a filtration document, got a {}",
                        other.kind()
                    )))
                }
            };
            let cand = json::filtration_from_doc(&m, &doc, gamma.clone(), gamma)?;
            let ok = verify_filtration(&m, &cand);
            let text = if as_json {
                pretty(&json!({"filtration": ok}))
            } else if ok {
                "filtration".into()
            } else {
                "not a filtration".into()
            };
            Ok(Output::verdict(ok, text))
        }
        Command::CheckLemma {
            which,
            model,
            formula,
            k,
        } => {
            let m = load_model(model)?;
            check_lemma(*which, &m, formula.as_deref(), *k, as_json)
        }
        Command::Repair {
            frame,
            irreflexive,
            k,
        } => {
            let fr = load_frame(frame)?;
            let (out, map) = if *irreflexive {
                let k = k.ok_or_else(|| Error::BadParameter("--irreflexive needs --k".into()))?;
                repair_irreflexive(&fr, k)?
            } else {
                repair(&fr)?
            };
            let v = json!({
                "frame": serde_json::to_value(json::frame_to_doc(&out))?,
                "map": json::point_map_to_json(&map),
            });
            Ok(Output::ok(pretty(&v)))
        }
        Command::Pmorphism { src, dst, map } => {
            let (s, d) = (load_frame(src)?, load_frame(dst)?);
            let map = json::point_map_from_json(&read_file(map)?)?;
            let ok = check_pmorphism(&s, &d, &map);
            let text = if as_json {
                pretty(&json!({"pmorphism": ok}))
            } else if ok {
                "p-morphism".into()
            } else {
                "not a p-morphism".into()
            };
            Ok(Output::verdict(ok, text))
        }
        Command::Decide {
            preset,
            k,
            formula,
            max_size,
            val_cap,
        } => {
            let preset = LogicPreset::new(preset.parse::<PresetKind>()?, *k)?;
            let f = formula::read(formula)?;
            let v = decide(&f, preset, *max_size, *val_cap)?;
            let code = match v {
                Verdict::Refuted { .. } => 1,
                Verdict::TheoremWithinBound { .. } => 0,
                Verdict::Unknown { .. } => 3,
            };
            Ok(Output {
                code,
                text: WorkbenchDocument::Verdict(json::verdict_to_doc(&v)).to_json(),
            })
        }
        Command::RandomGraph {
            n,
            p,
            seed,
            directed,
            diff,
        } => {
            let mut g = random_graph(*n, *p, *seed, *directed)?;
            if *diff {
                g.set_inequality();
            }
            Ok(Output::ok(json::write_frame(&g)))
        }
        Command::Proptest { suite, count, seed } => {
            let reports = suites::run_suites(suite, *count, *seed)?;
            let ok = reports.iter().all(|r| r.failures.is_empty());
            let text = if as_json {
                pretty(&serde_json::to_value(&reports)?)
            } else {
                reports
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            Ok(Output::verdict(ok, text))
        }
    }
}

fn check_lemma(
    which: Lemma,
    m: &Model,
    formula: Option<&str>,
    k: Option<u32>,
    as_json: bool,
) -> Result<Output> {
    let outcome = |name: &str, premise: bool, holds: bool| {
        let text = if as_json {
            pretty(&json!({"check": name, "premise": premise, "holds": holds}))
        } else if !premise {
            format!("{name}: premise false")
        } else {
            format!("{name}: {}", if holds { "holds" } else { "fails" })
        };
        Output::verdict(holds, text)
    };
    match which {
        Lemma::Filtration => {
            let f = formula::read(
                formula.ok_or_else(|| Error::BadParameter("filtration needs --formula".into()))?,
            )?;
            let gamma = f.subformulas();
            let holds = [FiltrationKind::Minimal, FiltrationKind::Largest]
                .into_iter()
                .map(|kind| {
                    filtrate(m, &gamma, &gamma, kind).map(|c| check_filtration_lemma(m, &c))
                })
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|b| b);
            Ok(outcome("filtration lemma", true, holds))
        }
        Lemma::Lemma1 => {
            let k = k.ok_or_else(|| Error::BadParameter("lemma1 needs --k".into()))?;
            let cf = axiom(AxiomId::Cf, Some(k))?;
            let gamma = gamma_for(formula, &cf)?;
            let premise = scheme_true(m, &cf, DEFAULT_SCHEME_CAP)?;
            let holds = !premise || {
                let q = filtrate(m, &gamma, &gamma, FiltrationKind::Minimal)?;
                chromatic_number(&q.quotient.frame, usize::MAX)?.exceeds(k as usize)
            };
            Ok(outcome("lemma1", premise, holds))
        }
        Lemma::Lemma2 => {
            let con = axiom(AxiomId::Con, None)?;
            let gamma = gamma_for(formula, &con)?;
            let premise = m.frame.is_diff_pointgen()
                && m.frame.is_diff_frame()
                && frame_properties(&m.frame).symmetric
                && scheme_true(m, &con, DEFAULT_SCHEME_CAP)?;
            let holds = !premise || {
                let q = filtrate(m, &gamma, &gamma, FiltrationKind::Minimal)?;
                is_connected(&q.quotient.frame)
            };
            Ok(outcome("lemma2", premise, holds))
        }
    }
}

fn gamma_for(formula: Option<&str>, default: &Formula) -> Result<FormulaSet> {
    Ok(match formula {
        Some(text) => formula::read(text)?.subformulas(),
        None => default.subformulas(),
    })
}
