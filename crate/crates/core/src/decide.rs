//! Bounded countermodel search for five logics over diff frames
//! `(X, R, !=_X)`, each given by its class of finite graphs.
//!
//! Frames of each size are enumerated in the order of their adjacency
//! bitstrings and the least frame, valuation and point falsifying the
//! formula is returned. The logics have the exponential finite model
//! property, so a search reaching `2^|Sub(f)|` points is conclusive.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::formula::Formula;
use crate::graph::{chromatic_number, frame_properties, is_connected};
use crate::kripke::{frame_refute, Frame, Witness};
use crate::{Error, PointSet, Result};

/// Largest number of adjacency bits enumerated at one size.
pub const MAX_ENUMERATION_BITS: usize = 32;

/// Size from which isomorphic copies are skipped during `decide`.
const DEDUP_FROM: usize = 5;

const HN_NOTE: &str = "HN_LOWER is searched by its frame class; completeness of the \
axiomatisation for that class is asserted without proof, so this verdict rests on it";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PresetKind {
    /// Any `R`, chromatic number above `k`.
    KdiffCf,
    /// Symmetric, chromatic number above `k`.
    KbdiffCf,
    /// Symmetric and connected.
    KbdiffCon,
    /// Symmetric, connected, chromatic number above `k`.
    KbdiffCfCon,
    /// Symmetric, connected, serial, irreflexive, chromatic number above 4.
    HnLower,
}

impl PresetKind {
    pub const ALL: [PresetKind; 5] = [
        Self::KdiffCf,
        Self::KbdiffCf,
        Self::KbdiffCon,
        Self::KbdiffCfCon,
        Self::HnLower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::KdiffCf => "KDIFF_CF",
            Self::KbdiffCf => "KBDIFF_CF",
            Self::KbdiffCon => "KBDIFF_CON",
            Self::KbdiffCfCon => "KBDIFF_CF_CON",
            Self::HnLower => "HN_LOWER",
        }
    }

    fn symmetric(self) -> bool {
        self != Self::KdiffCf
    }

    fn connected(self) -> bool {
        matches!(self, Self::KbdiffCon | Self::KbdiffCfCon | Self::HnLower)
    }

    fn takes_k(self) -> bool {
        matches!(self, Self::KdiffCf | Self::KbdiffCf | Self::KbdiffCfCon)
    }
}

impl fmt::Display for PresetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| Error::BadParameter(format!("unknown preset `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LogicPreset {
    pub kind: PresetKind,
    /// The colouring bound; `None` only for `KBDIFF_CON`.
    pub k: Option<u32>,
}

impl LogicPreset {
    /// `k` is required (and at least 1) for the CF presets, ignored for
    /// `KBDIFF_CON`, and must be absent or 4 for `HN_LOWER`.
    pub fn new(kind: PresetKind, k: Option<u32>) -> Result<Self> {
        let k = match kind {
            PresetKind::HnLower => match k {
                None | Some(4) => Some(4),
                Some(other) => {
                    return Err(Error::BadParameter(format!(
                        "HN_LOWER fixes k = 4, got {other}"
                    )))
                }
            },
            PresetKind::KbdiffCon => None,
            _ => match k {
                Some(k) if k >= 1 => Some(k),
                _ => return Err(Error::BadParameter(format!("{kind} needs k >= 1"))),
            },
        };
        Ok(LogicPreset { kind, k })
    }

    /// Whether `frame`'s graph belongs to the preset's class. The second
    /// relation is not inspected.
    pub fn in_class(&self, frame: &Frame) -> bool {
        let props = frame_properties(frame);
        if self.kind.symmetric() && !props.symmetric {
            return false;
        }
        if self.kind == PresetKind::HnLower && !(props.serial && props.irreflexive) {
            return false;
        }
        if self.kind.connected() && !is_connected(frame) {
            return false;
        }
        match self.k {
            Some(k) if self.kind.takes_k() || self.kind == PresetKind::HnLower => {
                chromatic_number(frame, usize::MAX)
                    .expect("no cap")
                    .exceeds(k as usize)
            }
            _ => true,
        }
    }
}

impl fmt::Display for LogicPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k {
            Some(k) => write!(f, "{} (k = {k})", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// Candidate pairs at one size and the bijection between bitstrings and
/// frames.
struct Layout {
    n: usize,
    pairs: Vec<(usize, usize)>,
    index: Vec<Vec<usize>>,
    symmetric: bool,
}

impl Layout {
    fn new(n: usize, kind: PresetKind) -> Layout {
        let loops = kind != PresetKind::HnLower;
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let keep = if kind.symmetric() {
                    i < j || (loops && i == j)
                } else {
                    true
                };
                if keep {
                    pairs.push((i, j));
                }
            }
        }
        let mut index = vec![vec![usize::MAX; n]; n];
        for (t, &(i, j)) in pairs.iter().enumerate() {
            index[i][j] = t;
        }
        Layout {
            n,
            pairs,
            index,
            symmetric: kind.symmetric(),
        }
    }

    fn bits(&self) -> usize {
        self.pairs.len()
    }

    /// Pair `t` is bit `m - 1 - t`, so counting up is lexicographic order on
    /// the bitstring `b_0 b_1 ...`.
    fn shift(&self, t: usize) -> usize {
        self.bits() - 1 - t
    }

    fn frame(&self, code: u64) -> Frame {
        let mut f = Frame::with_size(self.n).expect("n >= 1");
        for (t, &(i, j)) in self.pairs.iter().enumerate() {
            if code >> self.shift(t) & 1 == 1 {
                f.add_edge_idx(i, j);
                if self.symmetric {
                    f.add_edge_idx(j, i);
                }
            }
        }
        f.set_inequality();
        f
    }

    /// Whether no relabelling of the frame coded by `code` has a smaller code.
    fn is_canonical(&self, code: u64, perms: &[Vec<usize>]) -> bool {
        let set: Vec<usize> = (0..self.bits())
            .filter(|&t| code >> self.shift(t) & 1 == 1)
            .collect();
        perms.iter().all(|p| {
            let mut image = 0u64;
            for &t in &set {
                let (i, j) = self.pairs[t];
                let (a, b) = (p[i], p[j]);
                let (a, b) = if self.symmetric && a > b {
                    (b, a)
                } else {
                    (a, b)
                };
                image |= 1 << self.shift(self.index[a][b]);
            }
            image >= code
        })
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Every diff frame of size `n` in the preset's class, by ascending
/// adjacency bitstring. Symmetric presets range over symmetric `R` only,
/// and `HN_LOWER` over loop-free `R`.
pub fn frames_in_class(n: usize, preset: LogicPreset) -> Result<impl Iterator<Item = Frame>> {
    if n == 0 {
        return Err(Error::BadParameter("frames need at least one point".into()));
    }
    let layout = Layout::new(n, preset.kind);
    if layout.bits() > MAX_ENUMERATION_BITS {
        return Err(Error::CapacityExceeded {
            required: layout.bits() as u64,
            cap: MAX_ENUMERATION_BITS as u64,
        });
    }
    let total = 1u64 << layout.bits();
    Ok((0..total)
        .map(move |code| layout.frame(code))
        .filter(move |f| preset.in_class(f)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Refuted {
        frame: Frame,
        valuation: BTreeMap<u32, PointSet>,
        point: usize,
        size: usize,
    },
    TheoremWithinBound {
        searched_to: usize,
        /// Whether `searched_to >= 2^sub_count`.
        exhaustive: bool,
        /// Distinct subformulas.
        sub_count: usize,
        /// Nodes of the syntax tree, duplicates included.
        node_count: usize,
        note: Option<String>,
    },
    Unknown {
        searched_to: usize,
        reason: String,
    },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Refuted { .. } => "refuted",
            Verdict::TheoremWithinBound { .. } => "theorem-within-bound",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    pub fn searched_to(&self) -> usize {
        match self {
            Verdict::Refuted { size, .. } => *size,
            Verdict::TheoremWithinBound { searched_to, .. }
            | Verdict::Unknown { searched_to, .. } => *searched_to,
        }
    }
}

/// Whether frames up to `size` points cover the finite model property bound
/// `2^sub_count`.
pub fn covers_bound(size: usize, sub_count: usize) -> bool {
    sub_count < 64 && (size as u64) >= 1u64 << sub_count
}

/// The least frame of one size (with its least refuting valuation) on which
/// `f` fails. The caller has checked the valuation cap.
fn search_size(
    f: &Formula,
    preset: LogicPreset,
    layout: &Layout,
    val_cap: u64,
    dedup: bool,
) -> Option<(Frame, Witness)> {
    let perms = if dedup {
        permutations(layout.n)
    } else {
        Vec::new()
    };
    (0..1u64 << layout.bits())
        .into_par_iter()
        .find_map_first(|code| {
            if dedup && !layout.is_canonical(code, &perms) {
                return None;
            }
            let frame = layout.frame(code);
            if !preset.in_class(&frame) {
                return None;
            }
            let w = frame_refute(&frame, f, val_cap).expect("capacity checked by the caller")?;
            Some((frame, w))
        })
}

/// Searches the preset's frames of sizes `1..=max_size` for a countermodel
/// to `f`. `val_cap` bounds `points * variables` for each valuation sweep.
pub fn decide(f: &Formula, preset: LogicPreset, max_size: usize, val_cap: u64) -> Result<Verdict> {
    if max_size == 0 {
        return Err(Error::BadParameter("max size must be at least 1".into()));
    }
    let vars = f.vars().len() as u64;
    for n in 1..=max_size {
        if n as u64 * vars > val_cap {
            return Ok(Verdict::Unknown {
                searched_to: n - 1,
                reason: format!(
                    "{n} points x {vars} variables exceeds the valuation cap {val_cap}"
                ),
            });
        }
        let layout = Layout::new(n, preset.kind);
        if layout.bits() > MAX_ENUMERATION_BITS {
            return Ok(Verdict::Unknown {
                searched_to: n - 1,
                reason: format!("2^{} candidate graphs on {n} points", layout.bits()),
            });
        }
        if let Some((frame, w)) = search_size(f, preset, &layout, val_cap, n >= DEDUP_FROM) {
            return Ok(Verdict::Refuted {
                frame,
                valuation: w.valuation,
                point: w.point,
                size: n,
            });
        }
    }
    let sub_count = f.subformulas().len();
    Ok(Verdict::TheoremWithinBound {
        searched_to: max_size,
        exhaustive: covers_bound(max_size, sub_count),
        sub_count,
        node_count: f.node_count(),
        note: (preset.kind == PresetKind::HnLower).then(|| HN_NOTE.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{axiom, parse, AxiomId};
    use crate::graph::Chromatic;
    use crate::kripke::{check_at, Model};

    fn preset(kind: PresetKind, k: Option<u32>) -> LogicPreset {
        LogicPreset::new(kind, k).unwrap()
    }

    #[test]
    fn preset_names_and_parameters() {
        assert_eq!(
            "kbdiff-cf".parse::<PresetKind>().unwrap(),
            PresetKind::KbdiffCf
        );
        assert_eq!(
            "HN_LOWER".parse::<PresetKind>().unwrap(),
            PresetKind::HnLower
        );
        assert!("kb".parse::<PresetKind>().is_err());
        assert!(LogicPreset::new(PresetKind::KbdiffCf, None).is_err());
        assert!(LogicPreset::new(PresetKind::KdiffCf, Some(0)).is_err());
        assert!(LogicPreset::new(PresetKind::HnLower, Some(3)).is_err());
        assert_eq!(preset(PresetKind::HnLower, None).k, Some(4));
        assert_eq!(preset(PresetKind::KbdiffCon, Some(7)).k, None);
    }

    #[test]
    fn single_point_classes() {
        let frames: Vec<Frame> = frames_in_class(1, preset(PresetKind::KbdiffCf, Some(1)))
            .unwrap()
            .collect();
        assert_eq!(frames.len(), 1);
        assert!(frames[0].r_contains(0, 0));
        assert!(frames[0].has_inequality());
        assert_eq!(
            frames_in_class(2, preset(PresetKind::HnLower, None))
                .unwrap()
                .count(),
            0
        );
    }

    #[test]
    fn enumeration_counts() {
        // Symmetric graphs with loops on 3 labelled points: 2^6.
        let con = preset(PresetKind::KbdiffCon, None);
        let all = Layout::new(3, con.kind);
        assert_eq!(all.bits(), 6);
        let k3 = frames_in_class(3, preset(PresetKind::KbdiffCf, Some(2)))
            .unwrap()
            .find(|f| chromatic_number(f, 20).unwrap() == Chromatic::Finite(3))
            .unwrap();
        assert_eq!(k3.r_pairs().len(), 6);
    }

    #[test]
    fn enumeration_is_ascending() {
        let layout = Layout::new(3, PresetKind::KbdiffCf);
        // First pair (0,0) is the most significant bit.
        assert!(layout.frame(1 << 5).r_contains(0, 0));
        assert!(layout.frame(1).r_contains(2, 2));
        assert!(layout.frame(1 << 4).r_contains(1, 0));
    }

    #[test]
    fn canonical_forms_keep_least_labelling() {
        let layout = Layout::new(3, PresetKind::KbdiffCon);
        let perms = permutations(3);
        let canon: Vec<u64> = (0..64)
            .filter(|&c| layout.is_canonical(c, &perms))
            .collect();
        // Each kept code is the least of its orbit, and orbits are disjoint.
        assert!(canon.contains(&0));
        for &c in &canon {
            let f = layout.frame(c);
            for p in &perms {
                let mut g = Frame::with_size(3).unwrap();
                for (i, j) in f.r_pairs() {
                    g.add_edge_idx(p[i], p[j]);
                }
                g.set_inequality();
                let code = (0..64).find(|&d| layout.frame(d) == g).unwrap();
                assert!(code >= c);
            }
        }
        // Graphs with loops on 3 points up to isomorphism.
        assert_eq!(canon.len(), 20);
    }

    #[test]
    fn cf3_refuted_on_triangle() {
        let cf3 = axiom(AxiomId::Cf, Some(3)).unwrap();
        let v = decide(&cf3, preset(PresetKind::KbdiffCf, Some(2)), 4, 24).unwrap();
        let Verdict::Refuted {
            frame,
            valuation,
            point,
            size,
        } = v
        else {
            panic!("{v:?}")
        };
        assert_eq!(size, 3);
        assert_eq!(chromatic_number(&frame, 20).unwrap(), Chromatic::Finite(3));
        let m = Model::with_valuation(frame, valuation).unwrap();
        assert!(!check_at(&m, point, &cf3));
    }

    #[test]
    fn top_is_a_theorem() {
        // |Sub(top)| = 2: top and bottom.
        let p = preset(PresetKind::KbdiffCon, None);
        let v = decide(&Formula::top(), p, 3, 24).unwrap();
        assert!(matches!(
            v,
            Verdict::TheoremWithinBound {
                searched_to: 3,
                exhaustive: false,
                sub_count: 2,
                ..
            }
        ));
        let v = decide(&Formula::top(), p, 4, 24).unwrap();
        assert!(matches!(
            v,
            Verdict::TheoremWithinBound {
                exhaustive: true,
                ..
            }
        ));
    }

    #[test]
    fn hn_lower_carries_a_note() {
        let v = decide(&Formula::top(), preset(PresetKind::HnLower, None), 2, 24).unwrap();
        let Verdict::TheoremWithinBound { note, .. } = v else {
            panic!()
        };
        assert!(note.is_some());
    }

    #[test]
    fn capacity_turns_into_unknown() {
        let f = parse("p0 | ~p0 | p1 | p2 | p3 | p4").unwrap();
        let v = decide(&f, preset(PresetKind::KbdiffCon, None), 6, 12).unwrap();
        assert_eq!(
            v,
            Verdict::Unknown {
                searched_to: 2,
                reason: "3 points x 5 variables exceeds the valuation cap 12".into()
            }
        );
        assert!(decide(&f, preset(PresetKind::KbdiffCon, None), 0, 24).is_err());
    }

    #[test]
    fn directed_preset_refutes_symmetry() {
        // B survives the lone loop on x1 and fails on the edge x1 -> x0.
        let b = axiom(AxiomId::B, None).unwrap();
        let v = decide(&b, preset(PresetKind::KdiffCf, Some(1)), 3, 24).unwrap();
        let Verdict::Refuted { frame, size, .. } = v else {
            panic!("{v:?}")
        };
        assert_eq!(size, 2);
        assert_eq!(frame.r_pairs(), vec![(1, 0)]);
    }

    #[test]
    fn dedup_does_not_change_the_witness() {
        let cases = [
            (
                axiom(AxiomId::B, None).unwrap(),
                preset(PresetKind::KdiffCf, Some(1)),
            ),
            (
                axiom(AxiomId::IrrIncl, None).unwrap(),
                preset(PresetKind::KbdiffCf, Some(2)),
            ),
            (
                axiom(AxiomId::Con, None).unwrap(),
                preset(PresetKind::KbdiffCf, Some(1)),
            ),
            (
                axiom(AxiomId::Cf, Some(2)).unwrap(),
                preset(PresetKind::KbdiffCf, Some(1)),
            ),
            (Formula::bottom(), preset(PresetKind::HnLower, None)),
        ];
        for (f, p) in cases {
            let layout = Layout::new(5, p.kind);
            if layout.bits() > 20 {
                continue;
            }
            let plain = search_size(&f, p, &layout, 24, false);
            let dedup = search_size(&f, p, &layout, 24, true);
            assert_eq!(plain, dedup, "{f} in {p}");
        }
    }
}
