//! Finite bimodal frames `(X, R, D)`, models, and truth.
//!
//! The second relation `D` is either the inequality relation on the point
//! set, kept symbolic and never stored, or an explicit set of pairs. A frame
//! built from a plain graph has no `D` at all; the difference diamond is then
//! false everywhere.

mod algebra;
mod eval;

use std::collections::{BTreeMap, HashMap};

use crate::{Error, PointSet, Result};

pub use algebra::{definable_algebra, scheme_true};
pub(crate) use eval::frame_refute;
pub use eval::{
    check, check_at, extension, extensions, frame_satisfiable, frame_valid, model_true, Witness,
};

/// Default bound on `points * variables` for valuation sweeps.
pub const DEFAULT_VALUATION_CAP: u64 = 24;
/// Default bound on the size of a definable algebra.
pub const DEFAULT_ALGEBRA_CAP: u64 = 4096;
/// Default bound on the number of substitution instances `scheme_true` checks.
pub const DEFAULT_SCHEME_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SecondRelation {
    Inequality,
    /// Successor sets, one per point.
    Explicit(Vec<PointSet>),
}

#[derive(Clone, Debug)]
pub struct Frame {
    points: Vec<String>,
    index: HashMap<String, usize>,
    r: Vec<PointSet>,
    d: Option<SecondRelation>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.r == other.r && self.d == other.d
    }
}

impl Eq for Frame {}

/// `x0, x1, ...`, zero-padded so that string order agrees with index order.
pub fn point_names(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("x{i:0width$}")).collect()
}

impl Frame {
    /// A frame with the given points, empty `R` and no second relation.
    pub fn new<S: Into<String>>(points: impl IntoIterator<Item = S>) -> Result<Frame> {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        if points.is_empty() {
            return Err(Error::InvalidFrame(
                "a frame needs at least one point".into(),
            ));
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::InvalidFrame(format!("duplicate point `{p}`")));
            }
        }
        let n = points.len();
        Ok(Frame {
            points,
            index,
            r: vec![PointSet::empty(n); n],
            d: None,
        })
    }

    /// A frame on `n` points named by [`point_names`].
    pub fn with_size(n: usize) -> Result<Frame> {
        Frame::new(point_names(n))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: frames are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<()> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        self.add_edge_idx(i, j);
        Ok(())
    }

    pub fn add_edge_idx(&mut self, i: usize, j: usize) {
        self.r[i].insert(j);
    }

    pub fn set_inequality(&mut self) {
        self.d = Some(SecondRelation::Inequality);
    }

    /// Replaces `D` by an explicit, initially empty relation.
    pub fn set_explicit_diff(&mut self) {
        let n = self.len();
        self.d = Some(SecondRelation::Explicit(vec![PointSet::empty(n); n]));
    }

    pub fn clear_diff(&mut self) {
        self.d = None;
    }

    /// Adds a pair to `D`, first materialising it if it is the inequality
    /// relation or absent.
    pub fn add_diff_edge(&mut self, a: &str, b: &str) -> Result<()> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        self.add_diff_edge_idx(i, j);
        Ok(())
    }

    pub fn add_diff_edge_idx(&mut self, i: usize, j: usize) {
        let n = self.len();
        let succ = match self.d.take() {
            Some(SecondRelation::Explicit(s)) => s,
            Some(SecondRelation::Inequality) => (0..n).map(|x| self.d_image_ineq(x)).collect(),
            None => vec![PointSet::empty(n); n],
        };
        let mut succ = succ;
        succ[i].insert(j);
        self.d = Some(SecondRelation::Explicit(succ));
    }

    fn d_image_ineq(&self, x: usize) -> PointSet {
        let mut s = PointSet::full(self.len());
        s.remove(x);
        s
    }

    pub fn r_succ(&self, i: usize) -> &PointSet {
        &self.r[i]
    }

    pub fn r_contains(&self, i: usize, j: usize) -> bool {
        self.r[i].contains(j)
    }

    pub fn r_pairs(&self) -> Vec<(usize, usize)> {
        self.r
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |j| (i, j)))
            .collect()
    }

    pub fn d(&self) -> Option<&SecondRelation> {
        self.d.as_ref()
    }

    pub fn has_inequality(&self) -> bool {
        matches!(self.d, Some(SecondRelation::Inequality))
    }

    pub fn d_contains(&self, i: usize, j: usize) -> bool {
        match &self.d {
            None => false,
            Some(SecondRelation::Inequality) => i != j,
            Some(SecondRelation::Explicit(s)) => s[i].contains(j),
        }
    }

    /// The `D`-successors of `i`, materialised.
    pub fn d_succ(&self, i: usize) -> PointSet {
        match &self.d {
            None => PointSet::empty(self.len()),
            Some(SecondRelation::Inequality) => self.d_image_ineq(i),
            Some(SecondRelation::Explicit(s)) => s[i].clone(),
        }
    }

    pub fn d_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| {
                self.d_succ(i)
                    .iter()
                    .map(move |j| (i, j))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// `{x : x R y for some y in set}`.
    pub fn r_preimage(&self, set: &PointSet) -> PointSet {
        PointSet::from_indices(
            self.len(),
            (0..self.len()).filter(|&x| self.r[x].intersects(set)),
        )
    }

    /// `{x : x D y for some y in set}`.
    pub fn d_preimage(&self, set: &PointSet) -> PointSet {
        let n = self.len();
        match &self.d {
            None => PointSet::empty(n),
            Some(SecondRelation::Inequality) => match set.count() {
                0 => PointSet::empty(n),
                1 => set.complement(),
                _ => PointSet::full(n),
            },
            Some(SecondRelation::Explicit(s)) => {
                PointSet::from_indices(n, (0..n).filter(|&x| s[x].intersects(set)))
            }
        }
    }

    /// The frame `(X, R, !=_X)`; any existing second relation is replaced.
    pub fn diff_expand(&self) -> Frame {
        let mut f = self.clone();
        f.set_inequality();
        f
    }

    /// Whether every pair of distinct points is in `D`; for frames validating
    /// the difference axioms this is exactly point-generatedness.
    pub fn is_diff_pointgen(&self) -> bool {
        match &self.d {
            Some(SecondRelation::Inequality) => true,
            _ => (0..self.len()).all(|i| (0..self.len()).all(|j| i == j || self.d_contains(i, j))),
        }
    }
}

impl Frame {
    /// Whether the frame validates the difference axioms: `D` symmetric,
    /// `D` plus the diagonal transitive, and `R` inside `D` plus the diagonal.
    pub fn is_diff_frame(&self) -> bool {
        let n = self.len();
        let d = |i: usize, j: usize| i == j || self.d_contains(i, j);
        (0..n).all(|x| {
            (0..n).all(|y| {
                (!self.d_contains(x, y) || self.d_contains(y, x))
                    && (!self.r_contains(x, y) || d(x, y))
                    && (!self.d_contains(x, y) || (0..n).all(|z| !self.d_contains(y, z) || d(x, z)))
            })
        })
    }
}

/// Free-function form of [`Frame::diff_expand`].
pub fn diff_expand(graph: &Frame) -> Frame {
    graph.diff_expand()
}

/// Free-function form of [`Frame::is_diff_pointgen`].
pub fn is_diff_pointgen(frame: &Frame) -> bool {
    frame.is_diff_pointgen()
}

/// A frame with a valuation; variables missing from the map denote the empty set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub frame: Frame,
    valuation: BTreeMap<u32, PointSet>,
}

impl Model {
    pub fn new(frame: Frame) -> Model {
        Model {
            frame,
            valuation: BTreeMap::new(),
        }
    }

    pub fn with_valuation(frame: Frame, valuation: BTreeMap<u32, PointSet>) -> Result<Model> {
        let mut m = Model::new(frame);
        for (v, s) in valuation {
            m.set(v, s)?;
        }
        Ok(m)
    }

    pub fn set(&mut self, var: u32, set: PointSet) -> Result<()> {
        if set.universe() != self.frame.len() {
            return Err(Error::InvalidFrame(format!(
                "valuation of p{var} is over {} points, frame has {}",
                set.universe(),
                self.frame.len()
            )));
        }
        self.valuation.insert(var, set);
        Ok(())
    }

    pub fn set_ids<S: AsRef<str>>(&mut self, var: u32, ids: &[S]) -> Result<()> {
        let mut set = PointSet::empty(self.frame.len());
        for id in ids {
            set.insert(self.frame.index_of(id.as_ref())?);
        }
        self.set(var, set)
    }

    pub fn value(&self, var: u32) -> PointSet {
        self.valuation
            .get(&var)
            .cloned()
            .unwrap_or_else(|| PointSet::empty(self.frame.len()))
    }

    pub fn valuation(&self) -> &BTreeMap<u32, PointSet> {
        &self.valuation
    }
}
