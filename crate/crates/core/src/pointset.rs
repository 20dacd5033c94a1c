use std::fmt;

/// A set of point indices `0..len`, stored as a bit vector.
///
/// Ordering compares the bit vectors word by word, which gives every
/// collection of sets a deterministic order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    len: usize,
    words: Vec<u64>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl PointSet {
    pub fn empty(len: usize) -> Self {
        PointSet {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        s.fill();
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut s = Self::empty(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Builds the set whose members are the set bits of `bits` (requires `len <= 64`).
    pub fn from_bits(len: usize, bits: u64) -> Self {
        assert!(len <= 64, "from_bits needs len <= 64");
        let mut s = Self::empty(len);
        if len > 0 {
            s.words[0] = bits & mask_for(len);
        }
        s
    }

    /// Universe size, not the number of members.
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "point index {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn fill(&mut self) {
        self.words.iter_mut().for_each(|w| *w = u64::MAX);
        self.trim();
    }

    fn trim(&mut self) {
        if let Some(last) = self.words.last_mut() {
            let rem = self.len % 64;
            if rem != 0 {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn complement(&self) -> PointSet {
        let mut s = self.clone();
        s.words.iter_mut().for_each(|w| *w = !*w);
        s.trim();
        s
    }

    pub fn union_with(&mut self, other: &PointSet) {
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a |= b);
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a &= b);
    }

    /// `self := !a | b`.
    pub(crate) fn assign_implies(&mut self, a: &PointSet, b: &PointSet) {
        for ((o, x), y) in self.words.iter_mut().zip(&a.words).zip(&b.words) {
            *o = !x | y;
        }
        self.trim();
    }

    pub(crate) fn assign_complement(&mut self, a: &PointSet) {
        for (o, x) in self.words.iter_mut().zip(&a.words) {
            *o = !x;
        }
        self.trim();
    }

    /// Overwrites the first word (requires `len <= 64`).
    pub(crate) fn set_bits(&mut self, bits: u64) {
        if let Some(w) = self.words.first_mut() {
            *w = bits & mask_for(self.len);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }
}

pub(crate) fn mask_for(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_stays_inside_universe() {
        let s = PointSet::from_indices(70, [0, 65, 69]);
        let c = s.complement();
        assert_eq!(c.count(), 67);
        assert!(!c.contains(65));
        assert!(c.contains(64));
        assert!(c.complement() == s);
    }

    #[test]
    fn iter_is_ascending() {
        let s = PointSet::from_indices(130, [129, 3, 64, 0]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 64, 129]);
        assert_eq!(s.first(), Some(0));
    }

    #[test]
    fn from_bits_masks_excess() {
        let s = PointSet::from_bits(3, 0b11111);
        assert_eq!(s.count(), 3);
        assert!(s.is_full());
    }
}
