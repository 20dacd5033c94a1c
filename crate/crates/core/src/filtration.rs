//! Filtrations of finite models through a subformula-closed set `Gamma`.
//!
//! The quotient is taken by agreement on a finite `Psi ⊇ Gamma`. Its
//! relations may be anything between the minimal lift
//! `[x] R~ [y] iff x' R y' for some x' ~ x, y' ~ y` and the largest one
//! `[x] R^ [y] iff for all <>psi in Gamma, y |= psi implies x |= <>psi`,
//! with the same two bounds for `D` and `<!=>`.

use std::collections::BTreeMap;

use crate::formula::{Formula, FormulaSet};
use crate::kripke::{extensions, Frame, Model};
use crate::{Error, PointSet, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiltrationKind {
    Minimal,
    Largest,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationResult {
    pub quotient: Model,
    /// Source point index to quotient point index.
    pub class_map: Vec<usize>,
    pub gamma: FormulaSet,
    pub psi: FormulaSet,
}

impl FiltrationResult {
    /// Source point id to class id (the least member id of its class).
    pub fn classes(&self, source: &Model) -> BTreeMap<String, String> {
        self.class_map
            .iter()
            .enumerate()
            .map(|(x, &c)| {
                (
                    source.frame.point(x).to_string(),
                    self.quotient.frame.point(c).to_string(),
                )
            })
            .collect()
    }
}

/// Class index per point for agreement on `formulas`; classes are numbered
/// in the string order of their least member.
fn classify(m: &Model, formulas: &FormulaSet) -> (Vec<usize>, Vec<String>) {
    let list: Vec<&Formula> = formulas.iter().collect();
    let exts = extensions(m, &list);
    let n = m.frame.len();
    let signature = |x: usize| exts.iter().map(|e| e.contains(x)).collect::<Vec<bool>>();
    let mut by_sig: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        by_sig.entry(signature(x)).or_default().push(x);
    }
    let mut classes: Vec<(String, Vec<usize>)> = by_sig
        .into_values()
        .map(|members| {
            let id = members
                .iter()
                .map(|&x| m.frame.point(x))
                .min()
                .unwrap()
                .to_string();
            (id, members)
        })
        .collect();
    classes.sort();
    let mut map = vec![0; n];
    for (c, (_, members)) in classes.iter().enumerate() {
        for &x in members {
            map[x] = c;
        }
    }
    (map, classes.into_iter().map(|(id, _)| id).collect())
}

/// Point id to class id under agreement on every member of `psi`.
pub fn gamma_classes(m: &Model, psi: &FormulaSet) -> BTreeMap<String, String> {
    let (map, ids) = classify(m, psi);
    (0..m.frame.len())
        .map(|x| (m.frame.point(x).to_string(), ids[map[x]].clone()))
        .collect()
}

struct Lifted {
    r: Vec<PointSet>,
    d: Vec<PointSet>,
}

fn lift_minimal(m: &Model, class_map: &[usize], q: usize) -> Lifted {
    let mut r = vec![PointSet::empty(q); q];
    let mut d = vec![PointSet::empty(q); q];
    for (x, y) in m.frame.r_pairs() {
        r[class_map[x]].insert(class_map[y]);
    }
    for (x, y) in m.frame.d_pairs() {
        d[class_map[x]].insert(class_map[y]);
    }
    Lifted { r, d }
}

fn lift_largest(m: &Model, class_map: &[usize], q: usize, gamma: &FormulaSet) -> Lifted {
    let mut reps = vec![usize::MAX; q];
    for (x, &c) in class_map.iter().enumerate() {
        if reps[c] == usize::MAX {
            reps[c] = x;
        }
    }
    let dia: Vec<(&Formula, &Formula)> = gamma
        .iter()
        .filter_map(|f| match f {
            Formula::Diamond(a) => Some((f, &**a)),
            _ => None,
        })
        .collect();
    let diff: Vec<(&Formula, &Formula)> = gamma
        .iter()
        .filter_map(|f| match f {
            Formula::DiffDiamond(a) => Some((f, &**a)),
            _ => None,
        })
        .collect();
    let relation = |pairs: &[(&Formula, &Formula)]| -> Vec<PointSet> {
        let list: Vec<&Formula> = pairs
            .iter()
            .flat_map(|(outer, inner)| [*outer, *inner])
            .collect();
        let exts = extensions(m, &list);
        let mut rel = vec![PointSet::empty(q); q];
        for a in 0..q {
            for b in 0..q {
                let (x, y) = (reps[a], reps[b]);
                let ok = exts
                    .chunks(2)
                    .all(|e| !e[1].contains(y) || e[0].contains(x));
                if ok {
                    rel[a].insert(b);
                }
            }
        }
        rel
    };
    Lifted {
        r: relation(&dia),
        d: relation(&diff),
    }
}

fn quotient_model(m: &Model, class_map: &[usize], ids: &[String], lifted: Lifted) -> Model {
    let mut frame = Frame::new(ids.iter().cloned()).expect("class ids are distinct and nonempty");
    frame.set_explicit_diff();
    for (a, succ) in lifted.r.iter().enumerate() {
        for b in succ.iter() {
            frame.add_edge_idx(a, b);
        }
    }
    for (a, succ) in lifted.d.iter().enumerate() {
        for b in succ.iter() {
            frame.add_diff_edge_idx(a, b);
        }
    }
    let q = ids.len();
    let mut model = Model::new(frame);
    for (&v, set) in m.valuation() {
        let image = PointSet::from_indices(q, set.iter().map(|x| class_map[x]));
        model.set(v, image).expect("sized to quotient");
    }
    model
}

fn check_sets(gamma: &FormulaSet, psi: &FormulaSet) -> Result<()> {
    if !gamma.is_sub_closed() {
        return Err(Error::GammaNotSubClosed);
    }
    if !gamma.is_subset(psi) {
        return Err(Error::GammaNotSubsetPsi);
    }
    Ok(())
}

/// Quotient by agreement on `psi`, with relations of the requested kind.
/// Variables outside `gamma` are mapped to the image of their source value.
pub fn filtrate(
    m: &Model,
    gamma: &FormulaSet,
    psi: &FormulaSet,
    kind: FiltrationKind,
) -> Result<FiltrationResult> {
    check_sets(gamma, psi)?;
    let (class_map, ids) = classify(m, psi);
    let q = ids.len();
    let lifted = match kind {
        FiltrationKind::Minimal => lift_minimal(m, &class_map, q),
        FiltrationKind::Largest => lift_largest(m, &class_map, q, gamma),
    };
    let quotient = quotient_model(m, &class_map, &ids, lifted);
    Ok(FiltrationResult {
        quotient,
        class_map,
        gamma: gamma.clone(),
        psi: psi.clone(),
    })
}

pub fn minimal_filtration(
    m: &Model,
    gamma: &FormulaSet,
    psi: &FormulaSet,
) -> Result<FiltrationResult> {
    filtrate(m, gamma, psi, FiltrationKind::Minimal)
}

pub fn largest_filtration(
    m: &Model,
    gamma: &FormulaSet,
    psi: &FormulaSet,
) -> Result<FiltrationResult> {
    filtrate(m, gamma, psi, FiltrationKind::Largest)
}

fn well_formed(m: &Model, c: &FiltrationResult) -> bool {
    let q = c.quotient.frame.len();
    if c.class_map.len() != m.frame.len() || c.class_map.iter().any(|&k| k >= q) {
        return false;
    }
    let mut hit = PointSet::empty(q);
    c.class_map.iter().for_each(|&k| hit.insert(k));
    hit.is_full()
}

/// Checks the three defining conditions of a `Gamma`-filtration against the
/// equivalence induced by `candidate.class_map`.
pub fn verify_filtration(m: &Model, candidate: &FiltrationResult) -> bool {
    if !well_formed(m, candidate) || !candidate.gamma.is_sub_closed() {
        return false;
    }
    let map = &candidate.class_map;
    let gamma: Vec<&Formula> = candidate.gamma.iter().collect();
    let exts = extensions(m, &gamma);
    let n = m.frame.len();

    // The kernel of the class map refines agreement on Gamma.
    for x in 0..n {
        for y in x + 1..n {
            if map[x] == map[y] && exts.iter().any(|e| e.contains(x) != e.contains(y)) {
                return false;
            }
        }
    }

    for v in candidate.gamma.iter().filter_map(|f| match f {
        Formula::Var(v) => Some(*v),
        _ => None,
    }) {
        let (src, dst) = (m.value(v), candidate.quotient.value(v));
        if (0..n).any(|x| src.contains(x) != dst.contains(map[x])) {
            return false;
        }
    }

    let q = candidate.quotient.frame.len();
    let lo = lift_minimal(m, map, q);
    let hi = lift_largest(m, map, q, &candidate.gamma);
    let qf = &candidate.quotient.frame;
    (0..q).all(|a| {
        let r = qf.r_succ(a);
        let d = qf.d_succ(a);
        lo.r[a].is_subset(r)
            && r.is_subset(&hi.r[a])
            && lo.d[a].is_subset(&d)
            && d.is_subset(&hi.d[a])
    })
}

/// Whether every formula of `Gamma` has the same truth value at `x` in the
/// source and at `[x]` in the quotient.
pub fn check_filtration_lemma(m: &Model, candidate: &FiltrationResult) -> bool {
    if !well_formed(m, candidate) {
        return false;
    }
    let gamma: Vec<&Formula> = candidate.gamma.iter().collect();
    let src = extensions(m, &gamma);
    let dst = extensions(&candidate.quotient, &gamma);
    src.iter().zip(&dst).all(|(s, d)| {
        (0..m.frame.len()).all(|x| s.contains(x) == d.contains(candidate.class_map[x]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn set(fs: &[&str]) -> FormulaSet {
        fs.iter().map(|t| parse(t).unwrap()).collect()
    }

    fn chain() -> Model {
        let mut fr = Frame::new(["a", "b"]).unwrap();
        fr.add_edge("a", "b").unwrap();
        let mut m = Model::new(fr);
        m.set_ids(0, &["b"]).unwrap();
        m
    }

    fn four_cycle() -> Model {
        let mut fr = Frame::new(["a", "b", "c", "d"]).unwrap();
        for (x, y) in [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")] {
            fr.add_edge(x, y).unwrap();
            fr.add_edge(y, x).unwrap();
        }
        let mut m = Model::new(fr);
        m.set_ids(0, &["a", "c"]).unwrap();
        m
    }

    #[test]
    fn classes_by_agreement() {
        let mut m = Model::new(Frame::new(["a", "b", "c"]).unwrap());
        m.set_ids(0, &["a"]).unwrap();
        let all_a: BTreeMap<String, String> = ["a", "b", "c"]
            .iter()
            .map(|x| (x.to_string(), "a".to_string()))
            .collect();
        assert_eq!(gamma_classes(&m, &FormulaSet::new()), all_a);

        let c = gamma_classes(&m, &set(&["p0"]));
        assert_eq!(c["a"], "a");
        assert_eq!(c["b"], "b");
        assert_eq!(c["c"], "b");

        let c = gamma_classes(&chain(), &parse("<>p0").unwrap().subformulas());
        assert_eq!(c["a"], "a");
        assert_eq!(c["b"], "b");
    }

    #[test]
    fn minimal_filtration_of_four_cycle() {
        let m = four_cycle();
        let g = set(&["p0"]);
        let f = minimal_filtration(&m, &g, &g).unwrap();
        assert_eq!(
            f.quotient.frame.points(),
            &["a".to_string(), "b".to_string()]
        );
        assert_eq!(f.quotient.frame.r_pairs(), vec![(0, 1), (1, 0)]);
        assert!(verify_filtration(&m, &f));
        assert!(check_filtration_lemma(&m, &f));
    }

    #[test]
    fn single_point_quotients() {
        let mut fr = Frame::new(["a"]).unwrap();
        fr.add_edge("a", "a").unwrap();
        let m = Model::new(fr.diff_expand());
        let g = parse("<>p0 -> <!=>p0").unwrap().subformulas();
        let f = minimal_filtration(&m, &g, &g).unwrap();
        assert_eq!(f.quotient.frame.len(), 1);
        assert_eq!(f.quotient.frame.r_pairs(), vec![(0, 0)]);
        assert!(f.quotient.frame.d_pairs().is_empty());

        // Largest: the loop survives since <>psi holds wherever psi does.
        let f = largest_filtration(&m, &g, &g).unwrap();
        assert_eq!(f.quotient.frame.r_pairs(), vec![(0, 0)]);
        // <!=>p0 in Gamma, p0 false everywhere: the D-loop is admissible too.
        assert_eq!(f.quotient.frame.d_pairs(), vec![(0, 0)]);
    }

    #[test]
    fn separating_psi_gives_an_isomorphic_copy() {
        let mut m = Model::new(Frame::new(["a", "b", "c"]).unwrap().diff_expand());
        m.set_ids(0, &["a"]).unwrap();
        m.set_ids(1, &["b"]).unwrap();
        let g = set(&["p0", "p1"]);
        let f = minimal_filtration(&m, &g, &g).unwrap();
        assert_eq!(f.class_map, vec![0, 1, 2]);
        assert_eq!(f.quotient.frame.d_pairs(), m.frame.d_pairs());
    }

    #[test]
    fn largest_without_diamonds_is_total() {
        let m = four_cycle();
        let g = set(&["p0"]);
        let f = largest_filtration(&m, &g, &g).unwrap();
        assert_eq!(f.quotient.frame.r_pairs().len(), 4);
        assert_eq!(f.quotient.frame.d_pairs().len(), 4);
        assert!(verify_filtration(&m, &f));
    }

    #[test]
    fn largest_on_chain_drops_the_b_loop() {
        let m = chain();
        let g = parse("<>p0").unwrap().subformulas();
        let f = largest_filtration(&m, &g, &g).unwrap();
        let (a, b) = (0, 1);
        assert!(f.quotient.frame.r_contains(a, b));
        assert!(!f.quotient.frame.r_contains(b, b));
        assert!(check_filtration_lemma(&m, &f));
    }

    #[test]
    fn precondition_errors() {
        let m = chain();
        let not_closed = set(&["<>p0"]);
        assert!(matches!(
            minimal_filtration(&m, &not_closed, &not_closed),
            Err(Error::GammaNotSubClosed)
        ));
        let g = parse("<>p0").unwrap().subformulas();
        assert!(matches!(
            minimal_filtration(&m, &g, &set(&["p0"])),
            Err(Error::GammaNotSubsetPsi)
        ));
    }

    #[test]
    fn corrupted_candidates_are_rejected() {
        let m = four_cycle();
        let g = parse("<>p0 -> p0").unwrap().subformulas();
        let good = minimal_filtration(&m, &g, &g).unwrap();
        assert!(verify_filtration(&m, &good));
        assert!(check_filtration_lemma(&m, &good));
        assert!(verify_filtration(
            &m,
            &largest_filtration(&m, &g, &g).unwrap()
        ));

        // Dropping a minimal pair breaks the lower bound.
        let mut missing = good.clone();
        let mut fr = Frame::new(missing.quotient.frame.points().iter().cloned()).unwrap();
        fr.set_explicit_diff();
        for (i, j) in good.quotient.frame.d_pairs() {
            fr.add_diff_edge_idx(i, j);
        }
        let pairs = good.quotient.frame.r_pairs();
        for &(i, j) in &pairs[1..] {
            fr.add_edge_idx(i, j);
        }
        missing.quotient = Model::with_valuation(fr, good.quotient.valuation().clone()).unwrap();
        assert!(!verify_filtration(&m, &missing));

        // Flipping the quotient value of p0 breaks the valuation clause.
        let mut flipped = good.clone();
        let v = flipped.quotient.value(0).complement();
        flipped.quotient.set(0, v).unwrap();
        assert!(!verify_filtration(&m, &flipped));
        assert!(!check_filtration_lemma(&m, &flipped));
    }

    #[test]
    fn empty_gamma_is_vacuous() {
        let m = four_cycle();
        let f = minimal_filtration(&m, &FormulaSet::new(), &FormulaSet::new()).unwrap();
        assert_eq!(f.quotient.frame.len(), 1);
        assert!(check_filtration_lemma(&m, &f));
    }
}
