//! Bitset primitives over the power-set lattice of `[n]`.
//!
//! A subset of `[n] = {1, .., n}` is a [`SetMask`] with element `i` stored in
//! bit `i - 1`. A [`Family`] is a dense bitset with one position per subset,
//! so closures, hulls and intersections are word-parallel sweeps.

mod closure;
mod family;
mod tuple;

use std::fmt;

use thiserror::Error;

pub use closure::{
    closure, comparability_number, comparable_set, convex_hull, hk_check, incomparable_complement, is_downset,
    is_upset, HarrisKleitman,
};
pub use family::{colex_initial_segment, Family, Members};
pub use tuple::{merge_partition, FamilyTuple, Violation};

/// Largest supported ground size; families hold `2^n` bits.
pub const MAX_GROUND: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("ground size {0} exceeds the supported maximum of {MAX_GROUND}")]
    GroundTooLarge(u32),
    #[error("subset mask {mask:#x} is outside P([{n}])")]
    MaskOutOfRange { mask: u32, n: u32 },
    #[error("element {element} is not in [{n}]")]
    ElementOutOfRange { element: u32, n: u32 },
    #[error("families live over different ground sets ({0} vs {1})")]
    GroundMismatch(u32, u32),
    #[error("family {index} is empty; families must be non-empty")]
    EmptyFamily { index: usize },
    #[error("a family tuple needs at least two families, got {0}")]
    TooFewFamilies(usize),
    #[error("segment size {t} is out of range 1..={max}")]
    BadSegmentSize { t: u64, max: u64 },
    #[error("ground list must hold distinct elements of [n] in increasing order")]
    BadGroundList,
    #[error("split index {j} must satisfy 1 <= j < {k}")]
    BadIndex { j: usize, k: usize },
    #[error("{0}")]
    NotMonotone(&'static str),
}

/// Number of ground elements `n`, with `0 <= n <= 20`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundSize(u32);

impl GroundSize {
    pub fn new(n: u32) -> Result<Self, LatticeError> {
        if n > MAX_GROUND {
            return Err(LatticeError::GroundTooLarge(n));
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// `2^n`, the number of subsets.
    #[inline]
    pub fn universe(self) -> usize {
        1usize << self.0
    }

    /// Mask of the whole ground set `[n]`.
    #[inline]
    pub fn full_mask(self) -> SetMask {
        SetMask(((1u64 << self.0) - 1) as u32)
    }
}

impl fmt::Display for GroundSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A subset of `[n]`; element `i` is bit `i - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SetMask(pub u32);

impl SetMask {
    pub const EMPTY: SetMask = SetMask(0);

    /// Builds a mask from 1-based element labels.
    pub fn from_elements<I>(n: GroundSize, elements: I) -> Result<Self, LatticeError>
    where
        I: IntoIterator<Item = u32>,
    {
        let mut bits = 0u32;
        for e in elements {
            if e == 0 || e > n.get() {
                return Err(LatticeError::ElementOutOfRange { element: e, n: n.get() });
            }
            bits |= 1 << (e - 1);
        }
        Ok(SetMask(bits))
    }

    /// Sorted 1-based element labels.
    pub fn elements(self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len());
        let mut bits = self.0;
        while bits != 0 {
            out.push(bits.trailing_zeros() + 1);
            bits &= bits - 1;
        }
        out
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, element: u32) -> bool {
        (1..=32).contains(&element) && self.0 >> (element - 1) & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(self, other: SetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement within `[n]`.
    #[inline]
    pub fn complement(self, n: GroundSize) -> SetMask {
        SetMask(!self.0 & n.full_mask().0)
    }

    #[inline]
    pub fn fits(self, n: GroundSize) -> bool {
        (self.0 as u64) < (1u64 << n.get())
    }
}

/// True iff one set contains the other.
#[inline]
pub fn comparable(x: SetMask, y: SetMask) -> bool {
    x.is_subset_of(y) || y.is_subset_of(x)
}

impl fmt::Display for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (idx, e) in self.elements().into_iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// Closure direction: supersets (`Up`) or subsets (`Down`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32) -> GroundSize {
        GroundSize::new(n).unwrap()
    }

    fn s(n: u32, e: &[u32]) -> SetMask {
        SetMask::from_elements(g(n), e.iter().copied()).unwrap()
    }

    #[test]
    fn comparable_examples() {
        assert!(comparable(s(3, &[1]), s(3, &[1, 2])));
        assert!(!comparable(s(3, &[1]), s(3, &[2])));
        assert!(comparable(s(3, &[]), s(3, &[2, 3])));
        assert!(comparable(s(3, &[2]), s(3, &[2])));
    }

    #[test]
    fn ground_size_limit() {
        assert!(GroundSize::new(20).is_ok());
        assert_eq!(GroundSize::new(21), Err(LatticeError::GroundTooLarge(21)));
        assert_eq!(g(0).universe(), 1);
        assert_eq!(g(0).full_mask(), SetMask::EMPTY);
    }

    #[test]
    fn element_round_trip_and_display() {
        let m = s(6, &[1, 4, 6]);
        assert_eq!(m.bits(), 0b101001);
        assert_eq!(m.elements(), vec![1, 4, 6]);
        assert_eq!(m.to_string(), "{1,4,6}");
        assert_eq!(SetMask::EMPTY.to_string(), "{}");
        assert!(SetMask::from_elements(g(3), [4]).is_err());
        assert!(SetMask::from_elements(g(3), [0]).is_err());
        assert_eq!(m.complement(g(6)), s(6, &[2, 3, 5]));
    }
}
