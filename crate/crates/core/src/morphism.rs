//! P-morphisms, point-generated subframes and the repairing of a
//! point-generated frame into one whose second relation is inequality.

use std::collections::{BTreeMap, VecDeque};

use crate::kripke::Frame;
use crate::{Error, PointSet, Result};

/// A map between point sets, by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointMap {
    pub mapping: BTreeMap<String, String>,
}

impl PointMap {
    pub fn new<A: Into<String>, B: Into<String>>(pairs: impl IntoIterator<Item = (A, B)>) -> Self {
        PointMap {
            mapping: pairs
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
        }
    }

    pub fn identity(frame: &Frame) -> Self {
        PointMap::new(frame.points().iter().map(|p| (p.clone(), p.clone())))
    }

    pub fn get(&self, id: &str) -> Option<&str> {
        self.mapping.get(id).map(String::as_str)
    }

    /// Index form `src index -> dst index`, if total and well-typed.
    fn resolve(&self, src: &Frame, dst: &Frame) -> Option<Vec<usize>> {
        src.points()
            .iter()
            .map(|p| self.mapping.get(p).and_then(|q| dst.index_of(q).ok()))
            .collect()
    }
}

fn relation_ok(
    n: usize,
    h: &[usize],
    src_succ: impl Fn(usize) -> PointSet,
    dst_succ: impl Fn(usize) -> PointSet,
) -> bool {
    (0..n).all(|x| {
        let succ = src_succ(x);
        let image = PointSet::from_indices(dst_succ(h[x]).universe(), succ.iter().map(|y| h[y]));
        // forth: image inside; back: every target successor is hit.
        image == dst_succ(h[x])
    })
}

/// Whether `map` is a surjective p-morphism from `src` onto `dst` for both
/// relations. An inequality `D` is treated as its set of pairs.
pub fn check_pmorphism(src: &Frame, dst: &Frame, map: &PointMap) -> bool {
    let Some(h) = map.resolve(src, dst) else {
        return false;
    };
    let mut hit = PointSet::empty(dst.len());
    h.iter().for_each(|&y| hit.insert(y));
    if !hit.is_full() {
        return false;
    }
    let n = src.len();
    relation_ok(n, &h, |x| src.r_succ(x).clone(), |y| dst.r_succ(y).clone())
        && relation_ok(n, &h, |x| src.d_succ(x), |y| dst.d_succ(y))
}

/// The subframe on the points reachable from `x` along `R ∪ D`.
pub fn generated_subframe(fr: &Frame, x: &str) -> Result<Frame> {
    let start = fr.index_of(x)?;
    let n = fr.len();
    let mut seen = PointSet::empty(n);
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let next = fr.r_succ(u).union(&fr.d_succ(u));
        for v in next.iter() {
            if !seen.contains(v) {
                seen.insert(v);
                queue.push_back(v);
            }
        }
    }
    if seen.is_full() {
        return Ok(fr.clone());
    }
    let kept: Vec<usize> = seen.iter().collect();
    let mut sub = Frame::new(kept.iter().map(|&i| fr.point(i).to_string()))?;
    if fr.d().is_some() {
        sub.set_explicit_diff();
    }
    for (a, &i) in kept.iter().enumerate() {
        for (b, &j) in kept.iter().enumerate() {
            if fr.r_contains(i, j) {
                sub.add_edge_idx(a, b);
            }
            if fr.d_contains(i, j) {
                sub.add_diff_edge_idx(a, b);
            }
        }
    }
    Ok(sub)
}

fn copy_id(x: &str, i: usize) -> String {
    format!("({x},{i})")
}

/// Builds `Y` with copies `0..=copies(x)` of each point, copies of a point
/// kept adjacent, and `S` given by `related`.
fn build_copies(
    fr: &Frame,
    copies: impl Fn(usize) -> usize,
    related: impl Fn((usize, usize), (usize, usize)) -> bool,
) -> Result<(Frame, PointMap)> {
    let cells: Vec<(usize, usize)> = (0..fr.len())
        .flat_map(|x| (0..=copies(x)).map(move |i| (x, i)))
        .collect();
    let ids: Vec<String> = cells
        .iter()
        .map(|&(x, i)| copy_id(fr.point(x), i))
        .collect();
    let mut out = Frame::new(ids.iter().cloned())?;
    for (a, &ca) in cells.iter().enumerate() {
        for (b, &cb) in cells.iter().enumerate() {
            if related(ca, cb) {
                out.add_edge_idx(a, b);
            }
        }
    }
    out.set_inequality();
    let map = PointMap::new(
        ids.iter()
            .zip(&cells)
            .map(|(id, &(x, _))| (id.clone(), fr.point(x).to_string())),
    );
    Ok((out, map))
}

/// The repairing `F⊎`: each `D`-reflexive point gets a second copy, `S`
/// relates copies exactly when their originals are `R`-related, and the
/// second relation becomes inequality. Returns the frame and the projection
/// `(x,i) -> x`.
pub fn repair(fr: &Frame) -> Result<(Frame, PointMap)> {
    if !fr.is_diff_pointgen() {
        return Err(Error::NotPointGenerated);
    }
    build_copies(
        fr,
        |x| usize::from(fr.d_contains(x, x)),
        |(x, _), (y, _)| fr.r_contains(x, y),
    )
}

/// The irreflexive repairing: `k` extra copies of each `D`-reflexive point,
/// and `S` as in [`repair`] minus loops. An `R`-reflexive point thus becomes
/// a clique on `k + 1` points.
///
/// The projection is a p-morphism only if every `R`-reflexive point is also
/// `D`-reflexive; otherwise its single copy loses the loop with nothing to
/// stand in for it, and the frame is rejected.
pub fn repair_irreflexive(fr: &Frame, k: usize) -> Result<(Frame, PointMap)> {
    if k == 0 {
        return Err(Error::BadParameter(
            "irreflexive repairing needs k >= 1".into(),
        ));
    }
    if !fr.is_diff_pointgen() {
        return Err(Error::NotPointGenerated);
    }
    if let Some(x) = (0..fr.len()).find(|&x| fr.r_contains(x, x) && !fr.d_contains(x, x)) {
        return Err(Error::ReflexiveWithoutDiffLoop(fr.point(x).to_string()));
    }
    build_copies(
        fr,
        |x| if fr.d_contains(x, x) { k } else { 0 },
        |a, b| a != b && fr.r_contains(a.0, b.0),
    )
}
