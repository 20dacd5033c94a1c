//! Randomized invariant suites behind the `proptest` subcommand, and the
//! generators they share.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::decide::{decide, LogicPreset, PresetKind, Verdict};
use crate::filtration::{check_filtration_lemma, filtrate, verify_filtration, FiltrationKind};
use crate::formula::{axiom, parse, AxiomId, Formula, FormulaSet};
use crate::graph::{chromatic_number, frame_properties, is_connected, random_graph, Chromatic};
use crate::json::{model_from_doc, model_to_doc, WorkbenchDocument};
use crate::kripke::{check_at, frame_valid, scheme_true, Frame, Model, DEFAULT_SCHEME_CAP};
use crate::morphism::{check_pmorphism, repair, repair_irreflexive};
use crate::{Error, PointSet, Result};

pub const SUITES: [&str; 9] = [
    "prop3",
    "prop6",
    "filtration",
    "lemma1",
    "lemma2",
    "repair",
    "chromatic",
    "roundtrip",
    "decide",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let passed = self.checked - self.failures.len();
        write!(f, "{}: {passed}/{} passed", self.name, self.checked)?;
        for fail in &self.failures {
            write!(f, "\n  {fail}")?;
        }
        Ok(())
    }
}

/// A random formula over `p0..p{vars-1}` of modal depth at most `depth`,
/// using derived connectives as well as primitives.
pub fn random_formula<R: Rng>(rng: &mut R, vars: u32, depth: usize) -> Formula {
    fn go<R: Rng>(rng: &mut R, vars: u32, depth: usize, size: usize) -> Formula {
        let leaf = |rng: &mut R| match rng.gen_range(0..8) {
            0 => Formula::bottom(),
            1 => Formula::top(),
            _ => Formula::var(rng.gen_range(0..vars.max(1))),
        };
        if size == 0 {
            return leaf(rng);
        }
        let modal = depth > 0;
        match rng.gen_range(0..if modal { 10 } else { 5 }) {
            0 => leaf(rng),
            1 => go(rng, vars, depth, size - 1).not(),
            2 => go(rng, vars, depth, size / 2).and(go(rng, vars, depth, size / 2)),
            3 => go(rng, vars, depth, size / 2).or(go(rng, vars, depth, size / 2)),
            4 => go(rng, vars, depth, size / 2).implies(go(rng, vars, depth, size / 2)),
            5 => go(rng, vars, depth - 1, size - 1).diamond(),
            6 => go(rng, vars, depth - 1, size - 1).diff_diamond(),
            7 => go(rng, vars, depth - 1, size - 1).boxed(),
            8 => go(rng, vars, depth - 1, size - 1).diff_box(),
            _ => go(rng, vars, depth - 1, size - 1).exists(),
        }
    }
    go(rng, vars, depth, 6)
}

/// Random loops added to a graph, each point independently.
pub fn add_loops<R: Rng>(rng: &mut R, frame: &mut Frame, prob: f64) {
    for x in 0..frame.len() {
        if rng.gen_bool(prob) {
            frame.add_edge_idx(x, x);
        }
    }
}

/// A random graph on `1..=max_n` points, loops included with small probability.
pub fn random_graph_with_loops<R: Rng>(rng: &mut R, max_n: usize, symmetric: bool) -> Frame {
    let n = rng.gen_range(1..=max_n);
    let p = rng.gen_range(0.2..0.9);
    let mut g = random_graph(n, p, rng.gen(), !symmetric).expect("valid parameters");
    add_loops(rng, &mut g, 0.15);
    g
}

pub fn random_valuation<R: Rng>(rng: &mut R, m: &mut Model, vars: u32) {
    let n = m.frame.len();
    for v in 0..vars {
        let set = PointSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        m.set(v, set).expect("sized to frame");
    }
}

/// A random model whose second relation is inequality or an arbitrary
/// explicit relation.
pub fn random_model<R: Rng>(rng: &mut R, max_n: usize, vars: u32) -> Model {
    let mut fr = {
        let sym = rng.gen_bool(0.5);
        random_graph_with_loops(rng, max_n, sym)
    };
    if rng.gen_bool(0.5) {
        fr.set_inequality();
    } else {
        fr.set_explicit_diff();
        let n = fr.len();
        for i in 0..n {
            for j in 0..n {
                if rng.gen_bool(0.4) {
                    fr.add_diff_edge_idx(i, j);
                }
            }
        }
    }
    let mut m = Model::new(fr);
    random_valuation(rng, &mut m, vars);
    m
}

/// `F≠(G)` with extra `D`-loops, and `R`-loops only where `D` loops.
pub fn random_pointgen_frame<R: Rng>(rng: &mut R, max_n: usize, symmetric: bool) -> Frame {
    let n = rng.gen_range(1..=max_n);
    let g =
        random_graph(n, rng.gen_range(0.2..0.9), rng.gen(), !symmetric).expect("valid parameters");
    let mut fr = g.diff_expand();
    for x in 0..n {
        if rng.gen_bool(0.4) {
            fr.add_diff_edge_idx(x, x);
            if rng.gen_bool(0.5) {
                fr.add_edge_idx(x, x);
            }
        }
    }
    fr
}

/// Γ = Sub(φ) for a random φ, possibly joined with Sub of an axiom.
fn random_gamma<R: Rng>(rng: &mut R, vars: u32, extra: &Formula) -> FormulaSet {
    let mut gamma = random_formula(rng, vars, 3).subformulas();
    if rng.gen_bool(0.5) {
        gamma.extend(extra.subformulas());
    }
    gamma
}

/// Least `k` with a proper `k`-colouring, by trying every colouring.
fn brute_chromatic(frame: &Frame) -> Chromatic {
    let n = frame.len();
    if (0..n).any(|x| frame.r_contains(x, x)) {
        return Chromatic::Infinite;
    }
    let pairs = frame.r_pairs();
    for k in 1..=n {
        let total = k.pow(n as u32);
        let ok = (0..total).any(|mut code| {
            let mut colour = vec![0; n];
            for c in colour.iter_mut() {
                *c = code % k;
                code /= k;
            }
            pairs.iter().all(|&(i, j)| colour[i] != colour[j])
        });
        if ok {
            return Chromatic::Finite(k);
        }
    }
    unreachable!()
}

struct Ctx {
    checked: usize,
    failures: Vec<String>,
}

impl Ctx {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn suite_prop3(rng: &mut ChaCha8Rng, count: usize, cx: &mut Ctx) -> Result<()> {
    for _ in 0..count {
        let g = {
            let sym = rng.gen_bool(0.5);
            random_graph_with_loops(rng, 5, sym)
        };
        let c = chromatic_number(&g, 20)?;
        for k in 1..=3 {
            let valid = frame_valid(&g.diff_expand(), &axiom(AxiomId::Cf, Some(k))?, 24)?;
            cx.expect(valid == c.exceeds(k as usize), || {
                format!("CF_{k} on {:?}: valid={valid}, C={c}", g.r_pairs())
            });
        }
    }
    Ok(())
}

fn suite_prop6(rng: &mut ChaCha8Rng, count: usize, cx: &mut Ctx) -> Result<()> {
    let con = axiom(AxiomId::Con, None)?;
    for _ in 0..count {
        let n = rng.gen_range(1..=8);
        let mut g = random_graph(n, rng.gen_range(0.05..0.6), rng.gen(), false)?;
        add_loops(rng, &mut g, 0.1);
        let valid = frame_valid(&g.diff_expand(), &con, 24)?;
        cx.expect(valid == is_connected(&g), || {
            format!("Con on {:?}: valid={valid}", g.r_pairs())
        });
    }
    Ok(())
}

fn suite_filtration(rng: &mut ChaCha8Rng, count: usize, cx: &mut Ctx) -> Result<()> {
    for _ in 0..count {
        let vars = rng.gen_range(1..=3);
        let m = random_model(rng, 8, vars);
        let phi = random_formula(rng, vars, 3);
        let gamma = phi.subformulas();
        let mut psi = gamma.clone();
        if rng.gen_bool(0.3) {
            psi.insert(random_formula(rng, vars, 2));
        }
        for kind in [FiltrationKind::Minimal, FiltrationKind::Largest] {
            let q = filtrate(&m, &gamma, &psi, kind)?;
            cx.expect(verify_filtration(&m, &q), || {
                format!("{kind:?} filtration rejected for {phi}")
            });
            cx.expect(check_filtration_lemma(&m, &q), || {
                format!("{kind:?} filtration lemma fails for {phi}")
            });
            cx.expect(q.quotient.frame.len() <= m.frame.len(), || {
                "quotient larger than source".into()
            });
        }
    }
    Ok(())
}

fn suite_lemma1(rng: &mut ChaCha8Rng, count: usize, cx: &mut Ctx) -> Result<()> {
    let mut done = 0;
    while done < count {
        let k = rng.gen_range(1..=2);
        let g = {
            let sym = rng.gen_bool(0.5);
            random_graph_with_loops(rng, 5, sym)
        };
        if !chromatic_number(&g, 20)?.exceeds(k) {
            continue;
        }
        done += 1;
        let cf = axiom(AxiomId::Cf, Some(k as u32))?;
        let mut m = Model::new(g.diff_expand());
        random_valuation(rng, &mut m, 2);
        cx.expect(scheme_true(&m, &cf, DEFAULT_SCHEME_CAP)?, || {
            format!("Sch(CF_{k}) fails on {:?}", g.r_pairs())
        });
        for _ in 0..4 {
            let gamma = random_gamma(rng, 2, &cf);
            for kind in [FiltrationKind::Minimal, FiltrationKind::Largest] {
                let q = filtrate(&m, &gamma, &gamma, kind)?;
                let c = chromatic_number(&q.quotient.frame, 20)?;
                cx.expect(c.exceeds(k), || {
                    format!("{kind:?} quotient of {:?} has C={c} <= {k}", g.r_pairs())
                });
            }
        }
    }
    Ok(())
}

fn suite_lemma2(rng: &mut ChaCha8Rng, count: usize, cx: &mut Ctx) -> Result<()> {
    let con = axiom(AxiomId::Con, None)?;
    let mut done = 0;
    while done < count {
        let n = rng.gen_range(1..=8);
        let mut g = random_graph(n, rng.gen_range(0.2..0.8), rng.gen(), false)?;
        add_loops(rng, &mut g, 0.1);
        if !is_connected(&g) {
            continue;
        }
        done += 1;
        let mut m = Model::new(g.diff_expand());
        random_valuation(rng, &mut m, 2);
        cx.expect(scheme_true(&m, &con, DEFAULT_SCHEME_CAP)?, || {
            format!("Sch(Con) fails on {:?}", g.r_pairs())
        });
        for _ in 0..4 {
            let gamma = random_gamma(rng, 2, &con);
            for kind in [FiltrationKind::Minimal, FiltrationKind::Largest] {
                let q = filtrate(&m, &gamma, &gamma, kind)?;
                cx.expect(is_connected(&q.quotient.frame), || {
                    format!("{kind:?} quotient of {:?} disconnected", g.r_pairs())
                });
            }
        }
    }
    Ok(())
}

fn suite_repair(rng: &mut ChaCha8Rng, count: usize, cx: &mut Ctx) -> Result<()> {
    for _ in 0..count {
        let symmetric = rng.gen_bool(0.5);
        let fr = random_pointgen_frame(rng, 5, symmetric);
        let k = rng.gen_range(1..=3);
        let c = chromatic_number(&fr, 20)?;
        let props = frame_properties(&fr);

        let (y, map) = repair(&fr)?;
        cx.expect(check_pmorphism(&y, &fr, &map), || {
            format!("repair projection on {:?}", fr.r_pairs())
        });
        cx.expect(y.has_inequality(), || "repair keeps an explicit D".into());
        cx.expect(!props.symmetric || frame_properties(&y).symmetric, || {
            "repair breaks symmetry".into()
        });
        cx.expect(
            !c.exceeds(k) || chromatic_number(&y, 20)?.exceeds(k),
            || format!("repair lowers C below {k}"),
        );
        // A lone point without an R-loop but with a D-loop is connected, yet
        // its two copies are not: no path of length 0 joins distinct copies.
        let lone = fr.len() == 1 && !fr.r_contains(0, 0) && fr.d_contains(0, 0);
        cx.expect(!is_connected(&fr) || is_connected(&y) || lone, || {
            "repair disconnects".into()
        });
        cx.expect(!lone || !is_connected(&y), || {
            "lone D-loop repaired into a connected frame".into()
        });

        let (z, map) = repair_irreflexive(&fr, k)?;
        cx.expect(check_pmorphism(&z, &fr, &map), || {
            format!("irreflexive projection on {:?}", fr.r_pairs())
        });
        cx.expect(frame_properties(&z).irreflexive, || {
            "irreflexive repair has a loop".into()
        });
        cx.expect(
            !c.exceeds(k) || chromatic_number(&z, 20)?.exceeds(k),
            || format!("irreflexive repair lowers C below {k}"),
        );
        for x in (0..fr.len()).filter(|&x| fr.r_contains(x, x)) {
            let copies: Vec<usize> = map
                .mapping
                .iter()
                .filter(|(_, t)| t.as_str() == fr.point(x))
                .map(|(s, _)| z.index_of(s))
                .collect::<Result<_>>()?;
            let clique = copies.len() == k + 1
                && copies
                    .iter()
                    .all(|&a| copies.iter().all(|&b| a == b || z.r_contains(a, b)));
            cx.expect(clique, || {
                format!(
                    "reflexive {} does not become a {}-clique",
                    fr.point(x),
                    k + 1
                )
            });
        }
    }
    Ok(())
}

fn suite_chromatic(rng: &mut ChaCha8Rng, count: usize, cx: &mut Ctx) -> Result<()> {
    for _ in 0..count {
        let g = {
            let sym = rng.gen_bool(0.5);
            random_graph_with_loops(rng, 6, sym)
        };
        let fast = chromatic_number(&g, 20)?;
        let slow = brute_chromatic(&g);
        cx.expect(fast == slow, || {
            format!("{:?}: backtracking {fast}, brute force {slow}", g.r_pairs())
        });
    }
    Ok(())
}

fn suite_roundtrip(rng: &mut ChaCha8Rng, count: usize, cx: &mut Ctx) -> Result<()> {
    for _ in 0..count {
        let f = random_formula(rng, 4, 3);
        let back = parse(&f.to_string());
        cx.expect(back.as_ref().ok() == Some(&f), || {
            format!("{f} reparses as {back:?}")
        });

        let m = random_model(rng, 5, 3);
        let doc = WorkbenchDocument::Model(model_to_doc(&m));
        let again = WorkbenchDocument::from_json(&doc.to_json())?;
        cx.expect(again == doc, || {
            "model document changes on a round trip".into()
        });
        if let WorkbenchDocument::Model(d) = again {
            cx.expect(model_from_doc(&d)? == m, || {
                "model changes on a round trip".into()
            });
        }
    }
    Ok(())
}

fn suite_decide(rng: &mut ChaCha8Rng, count: usize, cx: &mut Ctx) -> Result<()> {
    let presets = [
        LogicPreset::new(PresetKind::KdiffCf, Some(1))?,
        LogicPreset::new(PresetKind::KbdiffCf, Some(2))?,
        LogicPreset::new(PresetKind::KbdiffCon, None)?,
        LogicPreset::new(PresetKind::KbdiffCfCon, Some(1))?,
    ];
    for _ in 0..count {
        let f = random_formula(rng, 2, 2);
        let preset = *presets.choose(rng).expect("nonempty");
        let v = decide(&f, preset, 3, 24)?;
        if let Verdict::Refuted {
            frame,
            valuation,
            point,
            ..
        } = &v
        {
            let m = Model::with_valuation(frame.clone(), valuation.clone())?;
            cx.expect(!check_at(&m, *point, &f), || {
                format!("{f}: witness does not refute")
            });
            cx.expect(preset.in_class(frame), || {
                format!("{f}: witness outside {preset}")
            });
        }
        cx.expect(decide(&f, preset, 3, 24)? == v, || {
            format!("{f}: verdict not deterministic")
        });
    }
    Ok(())
}

/// Runs one suite by name, or all of them for `"all"`. Each suite draws
/// from its own ChaCha8 stream of `seed`.
pub fn run_suites(name: &str, count: usize, seed: u64) -> Result<Vec<SuiteReport>> {
    let chosen: Vec<&str> = if name == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&name) {
        vec![name]
    } else {
        return Err(Error::BadParameter(format!(
            "unknown suite `{name}`; known: all, {}",
            SUITES.join(", ")
        )));
    };
    chosen
        .into_iter()
        .map(|s| {
            let stream = SUITES.iter().position(|&t| t == s).expect("known suite") as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let mut cx = Ctx {
                checked: 0,
                failures: Vec::new(),
            };
            let run = match s {
                "prop3" => suite_prop3,
                "prop6" => suite_prop6,
                "filtration" => suite_filtration,
                "lemma1" => suite_lemma1,
                "lemma2" => suite_lemma2,
                "repair" => suite_repair,
                "chromatic" => suite_chromatic,
                "roundtrip" => suite_roundtrip,
                _ => suite_decide,
            };
            run(&mut rng, count, &mut cx)?;
            Ok(SuiteReport {
                name: s.to_string(),
                checked: cx.checked,
                failures: cx.failures,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_briefly() {
        for r in run_suites("all", 8, 3).unwrap() {
            assert!(r.failures.is_empty(), "{r}");
            assert!(r.checked > 0, "{r}");
        }
    }

    #[test]
    fn suites_are_reproducible() {
        let a = run_suites("filtration", 5, 11).unwrap();
        let b = run_suites("filtration", 5, 11).unwrap();
        assert_eq!(a[0].checked, b[0].checked);
        assert!(run_suites("nope", 1, 0).is_err());
    }

    #[test]
    fn generated_formulas_respect_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let f = random_formula(&mut rng, 3, 2);
            assert!(f.modal_depth() <= 2, "{f}");
            assert!(f.vars().iter().all(|&v| v < 3));
        }
    }
}
