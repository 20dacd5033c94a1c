//! Graph-theoretic oracles on the first relation of a frame: proper
//! partitions, the chromatic number, connectivity and simple structural
//! predicates, plus seeded random graphs.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kripke::Frame;
use crate::{Error, PointSet, Result};

pub const DEFAULT_CHROMATIC_CAP: usize = 20;

/// A partition of a frame's points, blocks given by point id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<String>>,
}

impl Partition {
    pub fn new<S: Into<String>>(
        blocks: impl IntoIterator<Item = impl IntoIterator<Item = S>>,
    ) -> Self {
        Partition {
            blocks: blocks
                .into_iter()
                .map(|b| b.into_iter().map(Into::into).collect())
                .collect(),
        }
    }

    /// Resolves blocks to index sets, checking the partition invariants.
    pub fn resolve(&self, frame: &Frame) -> Result<Vec<PointSet>> {
        let n = frame.len();
        let mut seen = PointSet::empty(n);
        let mut out = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            if block.is_empty() {
                return Err(Error::NotAPartition("empty block".into()));
            }
            let mut set = PointSet::empty(n);
            for id in block {
                let i = frame
                    .index_of(id)
                    .map_err(|_| Error::NotAPartition(format!("unknown point `{id}`")))?;
                if seen.contains(i) {
                    return Err(Error::NotAPartition(format!("point `{id}` occurs twice")));
                }
                seen.insert(i);
                set.insert(i);
            }
            out.push(set);
        }
        if !seen.is_full() {
            return Err(Error::NotAPartition(
                "blocks do not cover every point".into(),
            ));
        }
        Ok(out)
    }
}

/// No block contains `x, y` (possibly equal) with `x R y`.
pub fn is_proper(frame: &Frame, partition: &Partition) -> Result<bool> {
    let blocks = partition.resolve(frame)?;
    Ok(blocks
        .iter()
        .all(|b| b.iter().all(|x| !frame.r_succ(x).intersects(b))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Chromatic {
    Finite(usize),
    /// Some point is `R`-reflexive, so no partition is proper.
    Infinite,
}

impl Chromatic {
    pub fn exceeds(self, k: usize) -> bool {
        match self {
            Chromatic::Finite(c) => c > k,
            Chromatic::Infinite => true,
        }
    }
}

impl fmt::Display for Chromatic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chromatic::Finite(k) => write!(f, "{k}"),
            Chromatic::Infinite => f.write_str("infinite"),
        }
    }
}

/// Undirected adjacency of `R` with loops dropped.
fn symmetric_adjacency(frame: &Frame) -> Vec<PointSet> {
    let n = frame.len();
    let mut adj = vec![PointSet::empty(n); n];
    for (i, j) in frame.r_pairs() {
        if i != j {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    adj
}

/// Least size of a proper partition of `(X, R)`.
///
/// Properness looks at ordered pairs inside a block, so the search runs on
/// the symmetric closure of `R`; any loop makes the answer infinite.
pub fn chromatic_number(frame: &Frame, cap: usize) -> Result<Chromatic> {
    let n = frame.len();
    if n > cap {
        return Err(Error::CapacityExceeded {
            required: n as u64,
            cap: cap as u64,
        });
    }
    if (0..n).any(|x| frame.r_contains(x, x)) {
        return Ok(Chromatic::Infinite);
    }
    let adj = symmetric_adjacency(frame);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].count()));
    let mut colour = vec![usize::MAX; n];
    for k in 1..=n {
        if colourable(&adj, &order, 0, k, 0, &mut colour) {
            return Ok(Chromatic::Finite(k));
        }
    }
    unreachable!("n colours always suffice for a loop-free relation")
}

fn colourable(
    adj: &[PointSet],
    order: &[usize],
    pos: usize,
    k: usize,
    used: usize,
    colour: &mut [usize],
) -> bool {
    let Some(&v) = order.get(pos) else {
        return true;
    };
    // New colours are interchangeable, so only the next fresh one is tried.
    for c in 0..k.min(used + 1) {
        if adj[v].iter().all(|u| colour[u] != c) {
            colour[v] = c;
            if colourable(adj, order, pos + 1, k, used.max(c + 1), colour) {
                return true;
            }
        }
    }
    colour[v] = usize::MAX;
    false
}

/// Whether all points are linked by paths along `R` in either direction.
pub fn is_connected(frame: &Frame) -> bool {
    let n = frame.len();
    let adj = symmetric_adjacency(frame);
    let mut seen = PointSet::empty(n);
    let mut queue = VecDeque::from([0]);
    seen.insert(0);
    while let Some(x) = queue.pop_front() {
        for y in adj[x].iter() {
            if !seen.contains(y) {
                seen.insert(y);
                queue.push_back(y);
            }
        }
    }
    seen.is_full()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameProperties {
    pub symmetric: bool,
    pub irreflexive: bool,
    pub serial: bool,
}

pub fn frame_properties(frame: &Frame) -> FrameProperties {
    let n = frame.len();
    let pairs: BTreeSet<(usize, usize)> = frame.r_pairs().into_iter().collect();
    FrameProperties {
        symmetric: pairs.iter().all(|&(i, j)| pairs.contains(&(j, i))),
        irreflexive: (0..n).all(|x| !frame.r_contains(x, x)),
        serial: (0..n).all(|x| !frame.r_succ(x).is_empty()),
    }
}

/// A loop-free random graph on `n` points named by
/// [`point_names`](crate::kripke::point_names).
///
/// Candidate pairs are visited in row-major order (`i < j` when undirected,
/// `i != j` when directed) and each is kept when a ChaCha8 stream seeded
/// with `seed` yields `true` for `gen_bool(edge_prob)`. Undirected edges are
/// stored in both directions.
pub fn random_graph(n: usize, edge_prob: f64, seed: u64, directed: bool) -> Result<Frame> {
    if n == 0 {
        return Err(Error::BadParameter("random graphs need n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::BadParameter(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frame = Frame::with_size(n)?;
    for i in 0..n {
        for j in 0..n {
            let candidate = if directed { i != j } else { i < j };
            if candidate && rng.gen_bool(edge_prob) {
                frame.add_edge_idx(i, j);
                if !directed {
                    frame.add_edge_idx(j, i);
                }
            }
        }
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Frame {
        random_graph(n, 1.0, 0, false).unwrap()
    }

    fn looped() -> Frame {
        let mut f = Frame::new(["x"]).unwrap();
        f.add_edge("x", "x").unwrap();
        f
    }

    #[test]
    fn proper_partitions() {
        let edgeless = Frame::new(["a", "b", "c"]).unwrap();
        assert!(is_proper(&edgeless, &Partition::new([["a", "b", "c"]])).unwrap());
        assert!(!is_proper(&looped(), &Partition::new([["x"]])).unwrap());

        let k3 = Frame::new(["a", "b", "c"]).unwrap();
        let mut k3 = k3;
        for (x, y) in [
            ("a", "b"),
            ("b", "a"),
            ("a", "c"),
            ("c", "a"),
            ("b", "c"),
            ("c", "b"),
        ] {
            k3.add_edge(x, y).unwrap();
        }
        assert!(is_proper(&k3, &Partition::new([["a"], ["b"], ["c"]])).unwrap());
        assert!(!is_proper(&k3, &Partition::new([vec!["a", "b"], vec!["c"]])).unwrap());
    }

    #[test]
    fn malformed_partitions() {
        let f = Frame::new(["a", "b"]).unwrap();
        let bad = [
            Partition::new([vec!["a"]]),
            Partition::new([vec!["a", "b"], vec![]]),
            Partition::new([vec!["a", "b"], vec!["a"]]),
            Partition::new([vec!["a", "b", "z"]]),
        ];
        for p in bad {
            assert!(
                matches!(is_proper(&f, &p), Err(Error::NotAPartition(_))),
                "{p:?}"
            );
        }
    }

    #[test]
    fn chromatic_examples() {
        assert_eq!(
            chromatic_number(&complete(3), 20).unwrap(),
            Chromatic::Finite(3)
        );
        assert_eq!(
            chromatic_number(&Frame::new(["x"]).unwrap(), 20).unwrap(),
            Chromatic::Finite(1)
        );
        assert_eq!(
            chromatic_number(&looped(), 20).unwrap(),
            Chromatic::Infinite
        );
        assert!(matches!(
            chromatic_number(&complete(4), 3),
            Err(Error::CapacityExceeded {
                required: 4,
                cap: 3
            })
        ));
    }

    #[test]
    fn directed_edges_count_in_either_direction() {
        let mut f = Frame::with_size(3).unwrap();
        f.add_edge_idx(0, 1);
        f.add_edge_idx(1, 2);
        f.add_edge_idx(2, 0);
        assert_eq!(chromatic_number(&f, 20).unwrap(), Chromatic::Finite(3));
    }

    #[test]
    fn connectivity() {
        let mut path = Frame::new(["a", "b", "c"]).unwrap();
        path.add_edge("a", "b").unwrap();
        path.add_edge("c", "b").unwrap();
        assert!(is_connected(&path));
        assert!(!is_connected(&Frame::new(["a", "b"]).unwrap()));
        assert!(is_connected(&Frame::new(["a"]).unwrap()));
    }

    #[test]
    fn properties() {
        let p = frame_properties(&complete(3));
        assert_eq!(
            p,
            FrameProperties {
                symmetric: true,
                irreflexive: true,
                serial: true
            }
        );

        let mut f = Frame::new(["a", "b"]).unwrap();
        f.add_edge("a", "b").unwrap();
        let p = frame_properties(&f);
        assert_eq!(
            p,
            FrameProperties {
                symmetric: false,
                irreflexive: true,
                serial: false
            }
        );

        let p = frame_properties(&looped());
        assert_eq!(
            p,
            FrameProperties {
                symmetric: true,
                irreflexive: false,
                serial: true
            }
        );
    }

    #[test]
    fn random_graph_edge_cases() {
        let one = random_graph(1, 0.7, 9, false).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one.r_pairs().is_empty());
        assert_eq!(random_graph(3, 1.0, 1, false).unwrap(), complete(3));
        assert!(random_graph(6, 0.0, 1, true).unwrap().r_pairs().is_empty());
        assert_eq!(
            random_graph(7, 0.5, 42, true).unwrap(),
            random_graph(7, 0.5, 42, true).unwrap()
        );
        assert!(random_graph(0, 0.5, 1, false).is_err());
        assert!(random_graph(2, 1.5, 1, false).is_err());
    }
}
