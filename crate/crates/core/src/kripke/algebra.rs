//! Definable subsets of a finite model.
//!
//! The algebra generated by the valuation under the Boolean operations and
//! both diamond images is finite, so it is determined by its atoms. Those
//! are found by partition refinement: start from the partition induced by
//! the generators and split blocks until the `R`- and `D`-preimage of every
//! block is a union of blocks. Every union of atoms is then the extension of
//! some formula, and every formula's extension is such a union.

use std::collections::BTreeSet;

use super::eval::{Evaluator, Program};
use super::Model;
use crate::formula::Formula;
use crate::{Error, PointSet, Result};

/// Atoms of the least algebra containing `{value(v) : v in vars}` and closed
/// under complement, intersection and both diamond preimages.
pub(crate) fn atoms(m: &Model, vars: &BTreeSet<u32>) -> Vec<PointSet> {
    let frame = &m.frame;
    let n = frame.len();
    let mut blocks = vec![PointSet::full(n)];
    let split = |blocks: Vec<PointSet>, by: &PointSet| -> Vec<PointSet> {
        blocks
            .into_iter()
            .flat_map(|b| [b.intersection(by), b.intersection(&by.complement())])
            .filter(|b| !b.is_empty())
            .collect()
    };
    for v in vars {
        blocks = split(blocks, &m.value(*v));
    }
    loop {
        let before = blocks.len();
        let splitters: Vec<PointSet> = blocks
            .iter()
            .flat_map(|b| [frame.r_preimage(b), frame.d_preimage(b)])
            .collect();
        for s in &splitters {
            blocks = split(blocks, s);
        }
        if blocks.len() == before {
            break;
        }
    }
    blocks.sort();
    blocks
}

/// Every definable subset of `m` over the given variables, sorted.
pub fn definable_algebra(m: &Model, vars: &BTreeSet<u32>, cap: u64) -> Result<Vec<PointSet>> {
    let atoms = atoms(m, vars);
    let size = 1u64.checked_shl(atoms.len() as u32).filter(|&s| s <= cap);
    let size = size.ok_or(Error::CapacityExceeded {
        required: 1u64.checked_shl(atoms.len() as u32).unwrap_or(u64::MAX),
        cap,
    })?;
    let n = m.frame.len();
    let mut out: Vec<PointSet> = (0..size)
        .map(|mask| {
            let mut s = PointSet::empty(n);
            for (i, a) in atoms.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    s.union_with(a);
                }
            }
            s
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Whether every substitution instance of `f` is true in `m`.
///
/// On a finite model the extensions of formulas are exactly the definable
/// sets over the model's valuation, so it suffices to let `f`'s variables
/// range over the definable algebra. `cap` bounds both the algebra and the
/// number of assignments tried.
pub fn scheme_true(m: &Model, f: &Formula, cap: u64) -> Result<bool> {
    let prog = Program::compile(&[f]);
    let k = prog.vars().len() as u32;
    if k == 0 {
        return Ok(super::model_true(m, f));
    }
    let vars: BTreeSet<u32> = m.valuation().keys().copied().collect();
    let algebra = definable_algebra(m, &vars, cap)?;
    let total = (algebra.len() as u64)
        .checked_pow(k)
        .filter(|&t| t <= cap)
        .ok_or(Error::CapacityExceeded {
            required: (algebra.len() as u64).saturating_pow(k),
            cap,
        })?;
    let mut ev = Evaluator::new(&m.frame, &prog);
    let mut digits = vec![0usize; k as usize];
    let mut slots: Vec<PointSet> = vec![algebra[0].clone(); k as usize];
    for _ in 0..total {
        for (slot, &d) in slots.iter_mut().zip(&digits) {
            slot.clone_from(&algebra[d]);
        }
        ev.run(&slots);
        if !ev.root(0).is_full() {
            return Ok(false);
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < algebra.len() {
                break;
            }
            *d = 0;
        }
    }
    Ok(true)
}
