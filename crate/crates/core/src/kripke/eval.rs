use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{Frame, Model, SecondRelation};
use crate::formula::Formula;
use crate::{Error, PointSet, Result};

#[derive(Clone, Copy, Debug)]
enum Node {
    /// Index into `Program::vars`.
    Var(usize),
    Bottom,
    Implies(usize, usize),
    Dia(usize),
    Diff(usize),
}

/// A set of formulas flattened into a DAG of distinct subformulas, children
/// before parents.
#[derive(Debug)]
pub(crate) struct Program {
    nodes: Vec<Node>,
    vars: Vec<u32>,
    roots: Vec<usize>,
}

impl Program {
    pub(crate) fn compile(formulas: &[&Formula]) -> Program {
        let mut vars: Vec<u32> = formulas.iter().flat_map(|f| f.vars()).collect();
        vars.sort_unstable();
        vars.dedup();
        let mut prog = Program {
            nodes: Vec::new(),
            vars,
            roots: Vec::new(),
        };
        let mut memo = HashMap::new();
        for f in formulas {
            let r = prog.add(f, &mut memo);
            prog.roots.push(r);
        }
        prog
    }

    fn add<'f>(&mut self, f: &'f Formula, memo: &mut HashMap<&'f Formula, usize>) -> usize {
        if let Some(&i) = memo.get(f) {
            return i;
        }
        let node = match f {
            Formula::Var(v) => Node::Var(self.vars.binary_search(v).expect("variable collected")),
            Formula::Bottom => Node::Bottom,
            Formula::Implies(a, b) => {
                let a = self.add(a, memo);
                let b = self.add(b, memo);
                Node::Implies(a, b)
            }
            Formula::Diamond(a) => Node::Dia(self.add(a, memo)),
            Formula::DiffDiamond(a) => Node::Diff(self.add(a, memo)),
        };
        self.nodes.push(node);
        memo.insert(f, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub(crate) fn vars(&self) -> &[u32] {
        &self.vars
    }
}

/// Reusable evaluation buffers for one program on one frame.
pub(crate) struct Evaluator<'a> {
    frame: &'a Frame,
    prog: &'a Program,
    buf: Vec<PointSet>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(frame: &'a Frame, prog: &'a Program) -> Self {
        let buf = vec![PointSet::empty(frame.len()); prog.nodes.len()];
        Evaluator { frame, prog, buf }
    }

    /// Evaluates every node; `slots[i]` is the value of `prog.vars[i]`.
    pub(crate) fn run(&mut self, slots: &[PointSet]) {
        let n = self.frame.len();
        for (i, node) in self.prog.nodes.iter().enumerate() {
            let (done, rest) = self.buf.split_at_mut(i);
            let out = &mut rest[0];
            match *node {
                Node::Var(s) => out.clone_from(&slots[s]),
                Node::Bottom => out.clear(),
                Node::Implies(a, b) => {
                    out.assign_implies(&done[a], &done[b]);
                }
                Node::Dia(a) => {
                    out.clear();
                    for x in 0..n {
                        if self.frame.r[x].intersects(&done[a]) {
                            out.insert(x);
                        }
                    }
                }
                Node::Diff(a) => {
                    let arg = &done[a];
                    match &self.frame.d {
                        None => out.clear(),
                        Some(SecondRelation::Inequality) => match arg.count() {
                            0 => out.clear(),
                            1 => out.assign_complement(arg),
                            _ => out.fill(),
                        },
                        Some(SecondRelation::Explicit(succ)) => {
                            out.clear();
                            for (x, s) in succ.iter().enumerate() {
                                if s.intersects(arg) {
                                    out.insert(x);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    pub(crate) fn root(&self, i: usize) -> &PointSet {
        &self.buf[self.prog.roots[i]]
    }
}

fn model_slots(m: &Model, prog: &Program) -> Vec<PointSet> {
    prog.vars.iter().map(|&v| m.value(v)).collect()
}

/// The set of points of `m` where `f` holds.
pub fn extension(m: &Model, f: &Formula) -> PointSet {
    extensions(m, &[f]).pop().expect("one root")
}

/// Extensions of several formulas at once, sharing common subformulas.
pub fn extensions(m: &Model, formulas: &[&Formula]) -> Vec<PointSet> {
    let prog = Program::compile(formulas);
    let mut ev = Evaluator::new(&m.frame, &prog);
    ev.run(&model_slots(m, &prog));
    (0..formulas.len()).map(|i| ev.root(i).clone()).collect()
}

/// `M, x |= f` for a point given by id.
pub fn check(m: &Model, x: &str, f: &Formula) -> Result<bool> {
    let i = m.frame.index_of(x)?;
    Ok(check_at(m, i, f))
}

pub fn check_at(m: &Model, x: usize, f: &Formula) -> bool {
    extension(m, f).contains(x)
}

/// `f` holds at every point of `m`.
pub fn model_true(m: &Model, f: &Formula) -> bool {
    extension(m, f).is_full()
}

/// A valuation of a formula's variables together with a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub valuation: BTreeMap<u32, PointSet>,
    pub point: usize,
}

impl Witness {
    pub fn into_model(self, frame: Frame) -> Model {
        Model::with_valuation(frame, self.valuation).expect("witness sized to its frame")
    }
}

const CHUNK: u64 = 1 << 12;

/// Sweeps every valuation of `prog`'s variables in ascending code order and
/// returns the first `(code, point)` accepted by `pick`. Variable `i` (in
/// ascending index order) takes bits `i*n .. (i+1)*n` of the code.
fn sweep<F>(frame: &Frame, prog: &Program, cap: u64, pick: F) -> Result<Option<(u64, usize)>>
where
    F: Fn(&PointSet) -> Option<usize> + Sync,
{
    let n = frame.len();
    let m = prog.vars.len();
    let bits = (n * m) as u64;
    if bits > cap || bits >= 64 {
        return Err(Error::CapacityExceeded {
            required: bits,
            cap,
        });
    }
    let total = 1u64 << bits;
    let chunks = total.div_ceil(CHUNK);
    let run_chunk = |c: u64| -> Option<(u64, usize)> {
        let mut ev = Evaluator::new(frame, prog);
        let mut slots = vec![PointSet::empty(n); m];
        for code in c * CHUNK..((c + 1) * CHUNK).min(total) {
            decode(code, n, &mut slots);
            ev.run(&slots);
            if let Some(x) = pick(ev.root(0)) {
                return Some((code, x));
            }
        }
        None
    };
    Ok(if chunks == 1 {
        run_chunk(0)
    } else {
        (0..chunks).into_par_iter().find_map_first(run_chunk)
    })
}

fn decode(code: u64, n: usize, slots: &mut [PointSet]) {
    if n == 0 {
        return;
    }
    let mask = crate::pointset::mask_for(n);
    for (i, slot) in slots.iter_mut().enumerate() {
        slot.set_bits((code >> (i * n)) & mask);
    }
}

fn witness(prog: &Program, n: usize, code: u64, point: usize) -> Witness {
    let mut slots = vec![PointSet::empty(n); prog.vars.len()];
    decode(code, n, &mut slots);
    Witness {
        valuation: prog.vars.iter().copied().zip(slots).collect(),
        point,
    }
}

/// Whether `f` is true in every model on `frame`. Only the variables of `f`
/// are enumerated, so the work is `2^(points * variables)`.
pub fn frame_valid(frame: &Frame, f: &Formula, cap: u64) -> Result<bool> {
    let prog = Program::compile(&[f]);
    Ok(sweep(frame, &prog, cap, |ext| ext.complement().first())?.is_none())
}

/// The least valuation (in sweep order) and least point at which `f` holds.
pub fn frame_satisfiable(frame: &Frame, f: &Formula, cap: u64) -> Result<Option<Witness>> {
    let prog = Program::compile(&[f]);
    let found = sweep(frame, &prog, cap, |ext| ext.first())?;
    Ok(found.map(|(code, x)| witness(&prog, frame.len(), code, x)))
}

/// The least valuation and point at which `f` fails; `None` iff `f` is valid.
pub(crate) fn frame_refute(frame: &Frame, f: &Formula, cap: u64) -> Result<Option<Witness>> {
    let prog = Program::compile(&[f]);
    let found = sweep(frame, &prog, cap, |ext| ext.complement().first())?;
    Ok(found.map(|(code, x)| witness(&prog, frame.len(), code, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{axiom, parse, AxiomId};

    fn k3() -> Frame {
        let mut f = Frame::new(["a", "b", "c"]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    f.add_edge_idx(i, j);
                }
            }
        }
        f
    }

    #[test]
    fn single_point_has_no_distinct_successor() {
        let mut m = Model::new(Frame::new(["a"]).unwrap().diff_expand());
        m.set_ids(0, &["a"]).unwrap();
        assert!(!check(&m, "a", &parse("<!=>p0").unwrap()).unwrap());
    }

    #[test]
    fn diamond_and_diff_box_on_two_points() {
        let mut fr = Frame::new(["a", "b"]).unwrap();
        fr.add_edge("a", "b").unwrap();
        let mut m = Model::new(fr.diff_expand());
        m.set_ids(0, &["b"]).unwrap();
        assert!(check(&m, "a", &parse("<>p0").unwrap()).unwrap());
        assert!(check(&m, "a", &parse("[!=]p0").unwrap()).unwrap());
        assert!(!check(&m, "b", &parse("[!=]p0").unwrap()).unwrap());
        assert!(matches!(
            check(&m, "zz", &Formula::top()),
            Err(Error::UnknownPoint(_))
        ));
    }

    #[test]
    fn model_truth() {
        let mut m = Model::new(Frame::new(["a", "b"]).unwrap());
        m.set_ids(0, &["a"]).unwrap();
        assert!(model_true(&m, &Formula::top()));
        assert!(!model_true(&m, &Formula::var(0)));

        // The symmetry axiom for D holds in any diff model.
        let mut m = Model::new(k3().diff_expand());
        m.set_ids(0, &["a"]).unwrap();
        assert!(model_true(&m, &axiom(AxiomId::DiffSym, None).unwrap()));
    }

    #[test]
    fn k3_colourability() {
        let fr = k3().diff_expand();
        let cf2 = axiom(AxiomId::Cf, Some(2)).unwrap();
        let cf3 = axiom(AxiomId::Cf, Some(3)).unwrap();
        assert!(frame_valid(&fr, &cf2, 24).unwrap());
        assert!(!frame_valid(&fr, &cf3, 24).unwrap());
        assert!(frame_valid(&fr, &Formula::top(), 24).unwrap());

        // A refuting valuation for CF_3 is a proper 3-colouring.
        let w = frame_satisfiable(&fr, &cf3.clone().not(), 24)
            .unwrap()
            .expect("witness");
        let blocks: Vec<&PointSet> = w.valuation.values().collect();
        assert_eq!(blocks.len(), 3);
        assert!(blocks.iter().all(|b| b.count() == 1));
        let mut union = PointSet::empty(3);
        blocks.iter().for_each(|b| union.union_with(b));
        assert!(union.is_full());
    }

    #[test]
    fn seriality_on_single_points() {
        let serial = axiom(AxiomId::Serial, None).unwrap();
        let lonely = Frame::new(["x"]).unwrap();
        assert_eq!(frame_satisfiable(&lonely, &serial, 24).unwrap(), None);

        let mut looped = Frame::new(["x"]).unwrap();
        looped.add_edge("x", "x").unwrap();
        let w = frame_satisfiable(&looped, &serial, 24).unwrap().unwrap();
        assert!(w.valuation.is_empty());
        assert_eq!(w.point, 0);
    }

    #[test]
    fn capacity_is_enforced() {
        let fr = Frame::with_size(5).unwrap();
        let cf3 = axiom(AxiomId::Cf, Some(3)).unwrap();
        assert!(matches!(
            frame_valid(&fr, &cf3, 14),
            Err(Error::CapacityExceeded {
                required: 15,
                cap: 14
            })
        ));
    }

    #[test]
    fn large_sweeps_match_sequential_witness() {
        // 4 points * 4 variables = 65536 valuations, several chunks.
        let fr = k3().diff_expand();
        let mut fr4 = Frame::with_size(4).unwrap();
        for (i, j) in fr.r_pairs() {
            fr4.add_edge_idx(i, j);
        }
        let fr4 = fr4.diff_expand();
        let f = parse("~(p0 & p1 & p2 & p3 & <>p3)").unwrap();
        let w = frame_refute(&fr4, &f, 24).unwrap().unwrap();
        // Least code: every variable true exactly where needed.
        let m = w.clone().into_model(fr4.clone());
        assert!(!check_at(&m, w.point, &f));
        // p3 occupies the highest code bits, so it is minimised first: the
        // least set holding an R-edge is {x0, x1}; the rest then shrink to {x0}.
        let x0 = PointSet::from_indices(4, [0]);
        assert_eq!(w.valuation[&3], PointSet::from_indices(4, [0, 1]));
        assert!((0..3).all(|v| w.valuation[&v] == x0), "{w:?}");
        assert_eq!(w.point, 0);
    }
}
