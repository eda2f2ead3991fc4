//! Deterministic builders for the explicit cross-Sperner constructions.
//!
//! Every builder verifies its output before returning, so a [`Construction`]
//! always holds a cross-Sperner tuple together with the sizes its formula
//! predicts.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use thiserror::Error;

use crate::bounds::{antichain_comp_value, lstar, sum_offset};
use crate::lattice::{incomparable_complement, Family, FamilyTuple, GroundSize, LatticeError, SetMask, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("ground size n = {n} is too small: {reason}")]
    BadGround { n: u32, reason: &'static str },
    #[error("need k >= 2 families, got {0}")]
    BadK(usize),
    #[error("segment size t_{part} = {t} is out of range 1..{max} for part {part}")]
    BadSegmentSize { part: usize, t: u64, max: u64 },
    #[error("expected {expected} segment sizes, got {got}")]
    SegmentCount { expected: usize, got: usize },
    #[error("part {part} leaves no room for its complement segment (t_{part} = 2^|A_{part}|)")]
    EmptyBlock { part: usize },
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("no antichain of {k} sets of size floor({ell}/2) in P([{ell}]): C({ell}, {half}) < {k}", half = ell / 2)]
    AntichainTooSmall { ell: u32, k: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("construction is not cross-Sperner: {0}")]
    NotCrossSperner(Violation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionKind {
    PairProduct,
    PairSum,
    Product,
    Sum,
    Conjecture,
}

impl ConstructionKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstructionKind::PairProduct => "pair-product",
            ConstructionKind::PairSum => "pair-sum",
            ConstructionKind::Product => "product",
            ConstructionKind::Sum => "sum",
            ConstructionKind::Conjecture => "conjecture",
        }
    }
}

/// A verified cross-Sperner tuple and the family sizes its formula predicts.
#[derive(Debug, Clone)]
pub struct Construction {
    pub kind: ConstructionKind,
    pub tuple: FamilyTuple,
    pub predicted_sizes: Vec<u64>,
}

impl Construction {
    pub fn predicted_product(&self) -> BigUint {
        self.predicted_sizes.iter().map(|&s| BigUint::from(s)).product()
    }

    pub fn predicted_sum(&self) -> u64 {
        self.predicted_sizes.iter().sum()
    }
}

fn ground(n: u32) -> Result<GroundSize, ConstructionError> {
    Ok(GroundSize::new(n)?)
}

fn verified(
    kind: ConstructionKind,
    families: Vec<Family>,
    predicted: Vec<u64>,
) -> Result<Construction, ConstructionError> {
    let tuple = FamilyTuple::new(families)?;
    if let Some(v) = tuple.violation()? {
        return Err(ConstructionError::NotCrossSperner(v));
    }
    debug_assert_eq!(tuple.sizes().iter().map(|&s| s as u64).collect::<Vec<_>>(), predicted);
    Ok(Construction { kind, tuple, predicted_sizes: predicted })
}

fn family_where(n: GroundSize, pred: impl Fn(u32) -> bool) -> Family {
    let masks = (0..n.universe() as u32).filter(|&m| pred(m)).map(SetMask);
    Family::from_masks(n, masks).expect("masks below 2^n")
}

/// `F = {F : 1 ∈ F, n ∉ F}` and `G = {G : 1 ∉ G, n ∈ G}`, each of size `2^{n-2}`.
pub fn build_pair_product(n: u32) -> Result<Construction, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::BadGround { n, reason: "needs n >= 2" });
    }
    let g = ground(n)?;
    let (first, last) = (1u32, 1u32 << (n - 1));
    let f = family_where(g, |m| m & first != 0 && m & last == 0);
    let h = family_where(g, |m| m & first == 0 && m & last != 0);
    let size = 1u64 << (n - 2);
    verified(ConstructionKind::PairProduct, vec![f, h], vec![size, size])
}

/// `F = {[floor(n/2)]}` and `G` = every set incomparable to it.
pub fn build_pair_sum(n: u32) -> Result<Construction, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::BadGround { n, reason: "needs n >= 2" });
    }
    let g = ground(n)?;
    let head = SetMask((1u32 << (n / 2)) - 1);
    let f = Family::from_masks(g, [head])?;
    let rest = incomparable_complement(&f)?;
    let other = (1u64 << n) - (1u64 << (n / 2)) - (1u64 << n.div_ceil(2)) + 1;
    verified(ConstructionKind::PairSum, vec![f, rest], vec![1, other])
}

/// Parameters of the partition construction: `[n]` split into `k` contiguous
/// blocks `A_i` (larger blocks first), and in each block a colex initial
/// segment `X_i` of size `t_i` with complement `Y_i = P(A_i) \ X_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductParams {
    pub n: u32,
    pub k: usize,
    /// 1-based elements of each block, ascending.
    pub parts: Vec<Vec<u32>>,
    pub segments: Vec<u64>,
}

impl ProductParams {
    /// Blocks of size `ceil(n/k)` then `floor(n/k)`, with `t_i = max(1, floor(2^|A_i| / k))`.
    pub fn new(n: u32, k: usize) -> Result<Self, ConstructionError> {
        if k < 2 {
            return Err(ConstructionError::BadK(k));
        }
        ground(n)?;
        let (base, extra) = (n as usize / k, n as usize % k);
        let mut parts = Vec::with_capacity(k);
        let mut next = 1u32;
        for i in 0..k {
            let len = base + usize::from(i < extra);
            parts.push((next..next + len as u32).collect::<Vec<_>>());
            next += len as u32;
        }
        let segments = parts.iter().map(|p| ((1u64 << p.len()) / k as u64).max(1)).collect();
        Ok(ProductParams { n, k, parts, segments })
    }

    pub fn with_segments(mut self, segments: Vec<u64>) -> Result<Self, ConstructionError> {
        if segments.len() != self.k {
            return Err(ConstructionError::SegmentCount { expected: self.k, got: segments.len() });
        }
        self.segments = segments;
        Ok(self)
    }

    fn validate(&self) -> Result<(), ConstructionError> {
        for (i, (part, &t)) in self.parts.iter().zip(&self.segments).enumerate() {
            let full = 1u64 << part.len();
            if t == 0 || t > full {
                return Err(ConstructionError::BadSegmentSize { part: i + 1, t, max: full });
            }
            if t == full {
                return Err(ConstructionError::EmptyBlock { part: i + 1 });
            }
        }
        Ok(())
    }

    /// `|F_i| = t_i * prod_{j != i} (2^|A_j| - t_j)`.
    pub fn predicted_sizes(&self) -> Vec<u64> {
        let rest: Vec<u64> = self.parts.iter().zip(&self.segments).map(|(p, &t)| (1u64 << p.len()) - t).collect();
        (0..self.k)
            .map(|i| {
                self.segments[i] * rest.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &r)| r).product::<u64>()
            })
            .collect()
    }

    /// `prod_i lambda_i (1 - lambda_i)^{k-1} 2^{kn}` with `lambda_i = t_i / 2^|A_i|`.
    pub fn lambda_product(&self) -> BigRational {
        let mut acc = BigRational::from_integer(BigInt::from(1u8) << (self.k * self.n as usize));
        for (part, &t) in self.parts.iter().zip(&self.segments) {
            let full = BigInt::from(1u8) << part.len();
            let lambda = BigRational::new(BigInt::from(t), full);
            let rest = BigRational::from_integer(1.into()) - &lambda;
            acc *= lambda * num_traits::pow(rest, self.k - 1);
        }
        acc
    }
}

/// `F_i = {F : F ∩ A_i ∈ X_i and F ∩ A_j ∈ Y_j for all j != i}`.
pub fn build_product_tuple(p: &ProductParams) -> Result<Construction, ConstructionError> {
    p.validate()?;
    let g = ground(p.n)?;
    // Blocks are contiguous, so a block's local mask is a shift and a mask.
    let blocks: Vec<(u32, u32, u64)> =
        p.parts.iter().zip(&p.segments).map(|(part, &t)| (part[0] - 1, (1u32 << part.len()) - 1, t)).collect();
    let mut families = vec![Family::empty(g); p.k];
    for mask in 0..g.universe() as u32 {
        let mut owner = None;
        let mut in_x = 0;
        for (i, &(shift, width, t)) in blocks.iter().enumerate() {
            if (((mask >> shift) & width) as u64) < t {
                in_x += 1;
                owner = Some(i);
            }
        }
        if in_x == 1 {
            families[owner.unwrap()].insert(SetMask(mask));
        }
    }
    verified(ConstructionKind::Product, families, p.predicted_sizes())
}

/// Parameters of the sum construction: the antichain `F_i = {i} ∪ G` for
/// `i < k`, with tail block `G = {n - l + 1, .., n}` and `l = (n - a) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumParams {
    pub n: u32,
    pub k: usize,
    pub a: i64,
    pub ell: u32,
}

impl SumParams {
    /// Picks the parity-matched `a` closest to the unconstrained optimum.
    pub fn new(n: u32, k: usize) -> Result<Self, ConstructionError> {
        if k < 2 {
            return Err(ConstructionError::BadK(k));
        }
        SumParams::with_offset(n, k, sum_offset(n, k as u64))
    }

    /// Uses a caller-chosen `a`; only parity and feasibility are checked.
    pub fn with_offset(n: u32, k: usize, a: i64) -> Result<Self, ConstructionError> {
        if k < 2 {
            return Err(ConstructionError::BadK(k));
        }
        ground(n)?;
        if a.rem_euclid(2) != n as i64 % 2 {
            return Err(ConstructionError::InfeasibleParams(format!("a = {a} must have the parity of n = {n}")));
        }
        if a > n as i64 {
            return Err(ConstructionError::InfeasibleParams(format!("a = {a} exceeds n = {n}, so l < 0")));
        }
        if (n as i64) < 2 * (k as i64 - 1) - a {
            return Err(ConstructionError::InfeasibleParams(format!(
                "needs n >= 2(k-1) - a = {}",
                2 * (k as i64 - 1) - a
            )));
        }
        Ok(SumParams { n, k, a, ell: ((n as i64 - a) / 2) as u32 })
    }

    /// The tail block `G` as a mask.
    pub fn tail(&self) -> SetMask {
        SetMask(((1u32 << self.ell) - 1) << (self.n - self.ell))
    }

    /// The `k - 1` antichain members `{i} ∪ G`.
    pub fn antichain(&self) -> Vec<SetMask> {
        let tail = self.tail().bits();
        (0..self.k as u32 - 1).map(|i| SetMask(tail | 1 << i)).collect()
    }

    pub fn predicted_comparability(&self) -> u64 {
        let c = antichain_comp_value(self.n, self.k as u64, self.ell);
        debug_assert!(c.is_integer());
        u64::try_from(c.to_integer()).expect("comparability is a small non-negative integer")
    }
}

/// `k - 1` singleton families `{F_i}` plus every set incomparable to all of them.
pub fn build_sum_tuple(s: &SumParams) -> Result<Construction, ConstructionError> {
    let g = ground(s.n)?;
    let members = s.antichain();
    let antichain = Family::from_masks(g, members.iter().copied())?;
    let rest = incomparable_complement(&antichain)?;
    if rest.is_empty() {
        return Err(ConstructionError::InfeasibleParams("every set is comparable to the antichain".into()));
    }
    let mut families: Vec<Family> = members.iter().map(|&m| Family::from_masks(g, [m])).collect::<Result<_, _>>()?;
    families.push(rest);
    let mut predicted = vec![1; s.k - 1];
    predicted.push((1u64 << s.n) - s.predicted_comparability());
    verified(ConstructionKind::Sum, families, predicted)
}

/// Parameters of the antichain-prefix construction `F_i = {F : F ∩ [l] = A_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureParams {
    pub n: u32,
    pub k: usize,
    pub ell: u32,
}

impl ConjectureParams {
    pub fn new(n: u32, k: usize) -> Result<Self, ConstructionError> {
        if k < 2 {
            return Err(ConstructionError::BadK(k));
        }
        ConjectureParams::with_ell(n, k, lstar(k as u64))
    }

    pub fn with_ell(n: u32, k: usize, ell: u32) -> Result<Self, ConstructionError> {
        if k < 2 {
            return Err(ConstructionError::BadK(k));
        }
        ground(n)?;
        if ell > n {
            return Err(ConstructionError::BadGround { n, reason: "needs l <= n" });
        }
        Ok(ConjectureParams { n, k, ell })
    }

    /// The first `k` sets of size `floor(l/2)` in `P([l])`, in colex order.
    pub fn antichain(&self) -> Result<Vec<SetMask>, ConstructionError> {
        let half = self.ell / 2;
        let sets: Vec<SetMask> =
            (0u32..1 << self.ell).filter(|m| m.count_ones() == half).take(self.k).map(SetMask).collect();
        if sets.len() < self.k {
            return Err(ConstructionError::AntichainTooSmall { ell: self.ell, k: self.k });
        }
        Ok(sets)
    }
}

pub fn build_conjecture_tuple(c: &ConjectureParams) -> Result<Construction, ConstructionError> {
    let g = ground(c.n)?;
    let prefix = (1u32 << c.ell) - 1;
    let families: Vec<Family> =
        c.antichain()?.into_iter().map(|a| family_where(g, |m| m & prefix == a.bits())).collect();
    let size = 1u64 << (c.n - c.ell);
    verified(ConstructionKind::Conjecture, families, vec![size; c.k])
}
