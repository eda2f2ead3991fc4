use std::fmt;

use super::{GroundSize, LatticeError, SetMask};

/// A family of subsets of `[n]`, stored as a dense bitset over all `2^n` masks.
///
/// Position `idx` is set iff the subset with bitmask `idx` is a member. For
/// `n < 6` only the low `2^n` bits of the single word are used.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    n: GroundSize,
    words: Vec<u64>,
    size: usize,
}

#[inline]
pub(crate) fn word_count(n: GroundSize) -> usize {
    n.universe().div_ceil(64)
}

/// Valid bits of the last (or only) word.
#[inline]
pub(crate) fn tail_mask(n: GroundSize) -> u64 {
    if n.get() >= 6 {
        u64::MAX
    } else {
        (1u64 << n.universe()) - 1
    }
}

impl Family {
    pub fn empty(n: GroundSize) -> Self {
        Family { n, words: vec![0; word_count(n)], size: 0 }
    }

    /// All of `P([n])`.
    pub fn full(n: GroundSize) -> Self {
        let mut words = vec![u64::MAX; word_count(n)];
        *words.last_mut().unwrap() &= tail_mask(n);
        Family { n, words, size: n.universe() }
    }

    pub fn from_masks<I>(n: GroundSize, masks: I) -> Result<Self, LatticeError>
    where
        I: IntoIterator<Item = SetMask>,
    {
        let mut f = Family::empty(n);
        for m in masks {
            if !m.fits(n) {
                return Err(LatticeError::MaskOutOfRange { mask: m.bits(), n: n.get() });
            }
            f.insert(m);
        }
        Ok(f)
    }

    /// Builds a family from raw bitset words, clearing bits beyond `2^n`.
    pub fn from_words(n: GroundSize, mut words: Vec<u64>) -> Self {
        words.resize(word_count(n), 0);
        *words.last_mut().unwrap() &= tail_mask(n);
        let size = words.iter().map(|w| w.count_ones() as usize).sum();
        Family { n, words, size }
    }

    /// Builds a family on `n <= 6` from a single word.
    pub fn from_word(n: GroundSize, word: u64) -> Self {
        debug_assert!(n.get() <= 6);
        Family::from_words(n, vec![word])
    }

    #[inline]
    pub fn ground(&self) -> GroundSize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, m: SetMask) -> bool {
        let idx = m.bits() as usize;
        idx < self.n.universe() && self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// Inserts `m`; returns true if it was not already present.
    pub fn insert(&mut self, m: SetMask) -> bool {
        let idx = m.bits() as usize;
        assert!(idx < self.n.universe(), "mask outside P([n])");
        let word = &mut self.words[idx / 64];
        let bit = 1u64 << (idx % 64);
        let fresh = *word & bit == 0;
        *word |= bit;
        self.size += fresh as usize;
        fresh
    }

    pub fn remove(&mut self, m: SetMask) -> bool {
        let idx = m.bits() as usize;
        if idx >= self.n.universe() {
            return false;
        }
        let word = &mut self.words[idx / 64];
        let bit = 1u64 << (idx % 64);
        let present = *word & bit != 0;
        *word &= !bit;
        self.size -= present as usize;
        present
    }

    /// Members in ascending mask order.
    pub fn iter(&self) -> Members<'_> {
        Members { words: &self.words, word_idx: 0, current: self.words[0] }
    }

    pub fn first(&self) -> Option<SetMask> {
        self.iter().next()
    }

    pub fn union(&self, other: &Family) -> Family {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Family) -> Family {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Family) -> Family {
        self.zip_with(other, |a, b| a & !b)
    }

    /// `P([n])` minus this family.
    pub fn complement(&self) -> Family {
        Family::from_words(self.n, self.words.iter().map(|w| !w).collect())
    }

    pub fn is_subset_of(&self, other: &Family) -> bool {
        self.same_ground(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Family) -> bool {
        self.same_ground(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersection_len(&self, other: &Family) -> usize {
        self.same_ground(other);
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// True iff every pair of distinct members is incomparable.
    pub fn is_antichain(&self) -> bool {
        // A member that is comparable to another member shows up in the strict
        // up- or down-shadow of the family.
        let strict_up = super::closure::strict_up(self);
        self.is_disjoint(&strict_up)
    }

    fn zip_with(&self, other: &Family, op: impl Fn(u64, u64) -> u64) -> Family {
        self.same_ground(other);
        Family::from_words(self.n, self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect())
    }

    #[inline]
    fn same_ground(&self, other: &Family) {
        assert_eq!(self.n, other.n, "families over different ground sets");
    }

    pub(crate) fn words_mut_and_recount(&mut self, f: impl FnOnce(&mut [u64])) {
        f(&mut self.words);
        *self.words.last_mut().unwrap() &= tail_mask(self.n);
        self.size = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family(n={}, ", self.n)?;
        f.debug_set().entries(self.iter().map(|m| m.to_string())).finish()?;
        f.write_str(")")
    }
}

/// Ascending iterator over the members of a [`Family`].
pub struct Members<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Members<'_> {
    type Item = SetMask;

    fn next(&mut self) -> Option<SetMask> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(SetMask((self.word_idx * 64 + bit) as u32));
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = SetMask;
    type IntoIter = Members<'a>;

    fn into_iter(self) -> Members<'a> {
        self.iter()
    }
}

/// Spreads the low bits of `local` onto the positions of `ground` (parallel deposit).
#[inline]
pub(crate) fn deposit(local: u32, ground: &[u32]) -> u32 {
    let mut out = 0;
    for (j, &e) in ground.iter().enumerate() {
        if local >> j & 1 == 1 {
            out |= 1 << (e - 1);
        }
    }
    out
}

/// The first `t` subsets of the ordered ground list `a` in colex order.
///
/// The colex rank of a subset of `a` is the numeric value of its local bitmask
/// (bit `j` for `a[j]`), so the initial segment is ranks `0..t`. Clearing a
/// bit lowers the rank, which makes every initial segment a downset in `P(a)`.
pub fn colex_initial_segment(n: GroundSize, a: &[u32], t: u64) -> Result<Family, LatticeError> {
    if a.windows(2).any(|w| w[0] >= w[1]) || a.iter().any(|&e| e == 0 || e > n.get()) {
        return Err(LatticeError::BadGroundList);
    }
    let max = 1u64 << a.len();
    if t == 0 || t > max {
        return Err(LatticeError::BadSegmentSize { t, max });
    }
    let mut f = Family::empty(n);
    for rank in 0..t as u32 {
        f.insert(SetMask(deposit(rank, a)));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::closure::is_downset;

    fn g(n: u32) -> GroundSize {
        GroundSize::new(n).unwrap()
    }

    fn fam(n: u32, sets: &[&[u32]]) -> Family {
        Family::from_masks(g(n), sets.iter().map(|e| SetMask::from_elements(g(n), e.iter().copied()).unwrap())).unwrap()
    }

    #[test]
    fn insert_remove_and_iterate() {
        let mut f = Family::empty(g(7));
        assert!(f.insert(SetMask(3)));
        assert!(f.insert(SetMask(100)));
        assert!(!f.insert(SetMask(3)));
        assert_eq!(f.len(), 2);
        assert_eq!(f.iter().collect::<Vec<_>>(), vec![SetMask(3), SetMask(100)]);
        assert!(f.remove(SetMask(3)));
        assert!(!f.remove(SetMask(3)));
        assert_eq!(f.len(), 1);
        assert_eq!(f.first(), Some(SetMask(100)));
    }

    #[test]
    fn full_family_respects_small_ground() {
        for n in 0..=8 {
            let f = Family::full(g(n));
            assert_eq!(f.len(), 1 << n);
            assert_eq!(f.complement().len(), 0);
        }
    }

    #[test]
    fn out_of_range_mask_rejected() {
        assert!(Family::from_masks(g(2), [SetMask(4)]).is_err());
    }

    #[test]
    fn antichain_examples() {
        assert!(fam(4, &[&[1, 4], &[2, 4]]).is_antichain());
        assert!(!fam(4, &[&[1], &[1, 2]]).is_antichain());
        let middle = Family::from_masks(g(4), (0..16u32).filter(|m| m.count_ones() == 2).map(SetMask)).unwrap();
        assert_eq!(middle.len(), 6);
        assert!(middle.is_antichain());
        assert!(Family::empty(g(3)).is_antichain());
    }

    #[test]
    fn colex_segment_examples() {
        assert_eq!(colex_initial_segment(g(2), &[1, 2], 2).unwrap(), fam(2, &[&[], &[1]]));
        assert_eq!(colex_initial_segment(g(4), &[3, 4], 3).unwrap(), fam(4, &[&[], &[3], &[4]]));
        let full = colex_initial_segment(g(5), &[2, 4, 5], 8).unwrap();
        assert_eq!(full.len(), 8);
        assert!(full.iter().all(|m| m.is_subset_of(SetMask(0b11010))));
        assert!(matches!(colex_initial_segment(g(4), &[1, 2], 5), Err(LatticeError::BadSegmentSize { .. })));
        assert!(matches!(colex_initial_segment(g(4), &[1, 2], 0), Err(LatticeError::BadSegmentSize { .. })));
        assert_eq!(colex_initial_segment(g(4), &[2, 1], 1), Err(LatticeError::BadGroundList));
        assert_eq!(colex_initial_segment(g(4), &[1, 5], 1), Err(LatticeError::BadGroundList));
    }

    #[test]
    fn colex_segments_are_downsets_up_to_six() {
        for n in 0..=6u32 {
            // Every subset of [n] as an ordered ground list.
            for ground in 0u32..(1 << n) {
                let a = SetMask(ground).elements();
                for t in 1..=(1u64 << a.len()) {
                    let seg = colex_initial_segment(g(n), &a, t).unwrap();
                    assert_eq!(seg.len() as u64, t);
                    // Downset within P(a): equivalently a downset of P([n]) all
                    // of whose members lie inside a.
                    assert!(is_downset(&seg), "n={n} a={a:?} t={t}");
                    assert!(seg.iter().all(|m| m.is_subset_of(SetMask(ground))));
                }
            }
        }
    }
}
