//! Closed-form bounds on the product and sum measures of cross-Sperner
//! tuples and on the comparability number.
//!
//! Formulas that are rational in powers of two are evaluated exactly as
//! [`BigRational`]s. Terms of the form `c * sqrt(x)` stay exact when `x` is a
//! perfect rational square and otherwise fall back to `f64`; terms involving
//! `e` are always `f64`. Float values carry a relative tolerance of `1e-12`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

/// Relative tolerance for comparisons involving float-valued bounds.
pub const FLOAT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("unknown bound id `{0}`")]
    UnknownBound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundId {
    SeymourRhs,
    ProdPairUpper,
    SumPairUpper,
    PiLowerAsym,
    PiLowerConstructive,
    PiUpper,
    SigmaLower,
    SigmaLowerPow2,
    SigmaUpper,
    CompLower,
    AntichainComp,
    GerbnerConjUpper,
    ClosingConjAsym,
}

/// What a bound says about its measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
    /// An exact value (not a bound).
    Value,
    /// A conjectured value or bound; excluded from consistency checks.
    Conjecture,
}

/// The quantity a bound is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// `|F|^{1/2} + |G|^{1/2}` for a pair.
    SqrtSum,
    Product,
    Sum,
    Comparability,
}

impl BoundId {
    pub const ALL: [BoundId; 13] = [
        BoundId::SeymourRhs,
        BoundId::ProdPairUpper,
        BoundId::SumPairUpper,
        BoundId::PiLowerAsym,
        BoundId::PiLowerConstructive,
        BoundId::PiUpper,
        BoundId::SigmaLower,
        BoundId::SigmaLowerPow2,
        BoundId::SigmaUpper,
        BoundId::CompLower,
        BoundId::AntichainComp,
        BoundId::GerbnerConjUpper,
        BoundId::ClosingConjAsym,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::SeymourRhs => "SEYMOUR_RHS",
            BoundId::ProdPairUpper => "PROD_PAIR_UPPER",
            BoundId::SumPairUpper => "SUM_PAIR_UPPER",
            BoundId::PiLowerAsym => "PI_LOWER_ASYM",
            BoundId::PiLowerConstructive => "PI_LOWER_CONSTRUCTIVE",
            BoundId::PiUpper => "PI_UPPER",
            BoundId::SigmaLower => "SIGMA_LOWER",
            BoundId::SigmaLowerPow2 => "SIGMA_LOWER_POW2",
            BoundId::SigmaUpper => "SIGMA_UPPER",
            BoundId::CompLower => "COMP_LOWER",
            BoundId::AntichainComp => "ANTICHAIN_COMP",
            BoundId::GerbnerConjUpper => "GERBNER_CONJ_UPPER",
            BoundId::ClosingConjAsym => "CLOSING_CONJ_ASYM",
        }
    }

    pub fn kind(self) -> BoundKind {
        use BoundId::*;
        match self {
            PiLowerAsym | PiLowerConstructive | SigmaLower | SigmaLowerPow2 | CompLower => BoundKind::Lower,
            SeymourRhs | ProdPairUpper | SumPairUpper | PiUpper | SigmaUpper => BoundKind::Upper,
            AntichainComp => BoundKind::Value,
            GerbnerConjUpper | ClosingConjAsym => BoundKind::Conjecture,
        }
    }

    pub fn measure(self) -> Measure {
        use BoundId::*;
        match self {
            SeymourRhs => Measure::SqrtSum,
            ProdPairUpper | PiLowerAsym | PiLowerConstructive | PiUpper | GerbnerConjUpper | ClosingConjAsym => {
                Measure::Product
            }
            SumPairUpper | SigmaLower | SigmaLowerPow2 | SigmaUpper => Measure::Sum,
            CompLower | AntichainComp => Measure::Comparability,
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundId {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_uppercase().replace('-', "_");
        BoundId::ALL.into_iter().find(|id| id.name() == wanted).ok_or_else(|| BoundsError::UnknownBound(s.to_string()))
    }
}

/// A bound's numeric value: exact when the formula allows it.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Exact(BigRational),
    Approx(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Number::Exact(_))
    }

    /// The value as an integer, when it is an exact integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Number::Exact(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    /// Ordering with exact comparison between exact values and a relative
    /// `FLOAT_REL_TOL` window otherwise (values inside the window are `Equal`).
    pub fn compare(&self, other: &Number) -> Option<Ordering> {
        match (self, other) {
            (Number::Exact(a), Number::Exact(b)) => Some(a.cmp(b)),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if a.is_nan() || b.is_nan() {
                    return None;
                }
                let scale = a.abs().max(b.abs()).max(1.0);
                if (a - b).abs() <= FLOAT_REL_TOL * scale {
                    Some(Ordering::Equal)
                } else {
                    a.partial_cmp(&b)
                }
            }
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(r) if r.is_integer() => write!(f, "{}", r.to_integer()),
            Number::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Number::Approx(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    pub id: BoundId,
    pub value: Number,
    pub applicable: bool,
    /// Names the violated hypothesis when `applicable` is false.
    pub precondition_note: String,
}

/// Which printed form of the general sum lower bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaLowerForm {
    /// Carries the factor `(1 - 2^{-(k-1)})^{1/2}`; hypothesis `n >= 2k - 1 - log2 k`.
    #[default]
    Refined,
    /// Factor replaced by 1; hypothesis `n >= 2k`.
    Simplified,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rpow(base: &BigRational, e: u32) -> BigRational {
    num_traits::pow(base.clone(), e as usize)
}

/// `sqrt(r)` when `r >= 0` is the square of a rational.
pub fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (p, q) = (r.numer(), r.denom());
    let (sp, sq) = (p.sqrt(), q.sqrt());
    (&sp * &sp == *p && &sq * &sq == *q).then(|| BigRational::new(sp, sq))
}

/// `a + coef * sqrt(radicand)`, exact when the radicand is a perfect square.
fn affine_sqrt(a: BigRational, coef: BigRational, radicand: BigRational) -> Number {
    match exact_sqrt(&radicand) {
        Some(root) => Number::Exact(a + coef * root),
        None => {
            let root = radicand.to_f64().unwrap_or(f64::NAN).sqrt();
            Number::Approx(a.to_f64().unwrap_or(f64::NAN) + coef.to_f64().unwrap_or(f64::NAN) * root)
        }
    }
}

fn is_power_of_two(k: u64) -> bool {
    k != 0 && k & (k - 1) == 0
}

fn binomial(n: u64, r: u64) -> BigUint {
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Least `l >= 1` whose central binomial coefficient `C(l, floor(l/2))` is at least `k`.
pub fn lstar(k: u64) -> u32 {
    let target = BigUint::from(k);
    (1u32..).find(|&l| binomial(l as u64, l as u64 / 2) >= target).expect("central binomials grow without bound")
}

/// `n > k log2 k + k`, decided exactly as `2^(n-k) > k^k`.
pub fn product_threshold_holds(n: u32, k: u64) -> bool {
    if (n as u64) <= k {
        return false;
    }
    let lhs = BigUint::one() << (n as u64 - k) as usize;
    lhs > num_traits::pow(BigUint::from(k), k as usize)
}

/// `n >= 2k - 1 - log2 k`, decided exactly.
pub fn sum_lower_threshold_holds(n: u32, k: u64) -> bool {
    let gap = 2 * k as i64 - 1 - n as i64;
    // n >= 2k - 1 - log2 k  <=>  log2 k >= gap  <=>  k >= 2^gap
    gap <= 0 || (gap < 64 && k >= 1u64 << gap)
}

/// `2^n >= (k-1)(1 + sqrt(k-1))^2`, decided exactly.
pub fn sum_upper_threshold_holds(n: u32, k: u64) -> bool {
    // (k-1)(1 + sqrt(k-1))^2 = k(k-1) + 2(k-1)sqrt(k-1)
    let lhs = (BigInt::one() << n as usize) - BigInt::from(k) * BigInt::from(k - 1);
    if lhs.is_negative() {
        return false;
    }
    let km1 = BigInt::from(k - 1);
    &lhs * &lhs >= BigInt::from(4) * &km1 * &km1 * &km1
}

/// `2^{-floor(n/k)} <= (e - (1 + 1/(k-1))^{k-1}) / (e k)`: the point from which
/// the asymptotic product lower bound follows from the constructive one.
pub fn asymptotic_threshold_holds(n: u32, k: u64) -> bool {
    let e = std::f64::consts::E;
    let kf = k as f64;
    let rhs = (e - (1.0 + 1.0 / (kf - 1.0)).powf(kf - 1.0)) / (e * kf);
    2f64.powi(-((n as u64 / k) as i32)) <= rhs
}

/// `ceil(2^{n/2+1} sqrt(m) - m)`, computed as `ceil(sqrt(4 * 2^n * m)) - m`.
pub fn comp_lower_ceil(n: u32, m: u64) -> i64 {
    let radicand = BigUint::from(m) << (n as usize + 2);
    let mut root = radicand.sqrt();
    if &root * &root < radicand {
        root += 1u32;
    }
    root.to_i64().expect("fits for n <= 20") - m as i64
}

/// `2^{(n+3)/2} - 4 >= 2^{floor(n/2)} + 2^{ceil(n/2)} - 2`, decided exactly.
pub fn pair_sum_gap_holds(n: u32) -> bool {
    let r = (BigInt::one() << (n / 2) as usize) + (BigInt::one() << n.div_ceil(2) as usize) + 2;
    (BigInt::one() << (n as usize + 3)) >= &r * &r
}

/// Parity-matched offset `a` for the sum construction: the unique integer
/// with `a ≡ n (mod 2)` and `-1 < a - a* <= 1`, where
/// `2^{a*} = k 2^{k-1} / (2^{k-1} - 1)`.
pub fn sum_offset(n: u32, k: u64) -> i64 {
    assert!(k >= 2);
    // 2^{a*} = p / q exactly.
    let p = BigInt::from(k) << (k - 1) as usize;
    let q: BigInt = (BigInt::one() << (k - 1) as usize) - 1;
    // a - a* > -1  <=>  2^{a+1} q > p ;  a - a* <= 1  <=>  2^{a-1} q <= p.
    let gt_low = |a: i64| pow2(a + 1) * BigRational::from_integer(q.clone()) > BigRational::from_integer(p.clone());
    let le_high = |a: i64| pow2(a - 1) * BigRational::from_integer(q.clone()) <= BigRational::from_integer(p.clone());
    let approx = (k as f64).log2().floor() as i64;
    (approx - 3..=approx + 4)
        .filter(|a| a.rem_euclid(2) == n as i64 % 2)
        .find(|&a| gt_low(a) && le_high(a))
        .expect("a length-2 half-open window holds one integer of each parity")
}

/// Closed form for the comparability number of `{ {i} ∪ G : i < k }` with `|G| = l`.
pub fn antichain_comp_value(n: u32, k: u64, l: u32) -> BigRational {
    int(k as i64) * pow2(l as i64) + pow2(n as i64 - l as i64) * (int(1) - pow2(-(k as i64 - 1))) - int(k as i64 - 1)
}

fn value(id: BoundId, value: Number, applicable: bool, note: impl Into<String>) -> BoundValue {
    let note = if applicable { String::new() } else { note.into() };
    BoundValue { id, value, applicable, precondition_note: note }
}

fn undefined(id: BoundId, note: &str) -> BoundValue {
    value(id, Number::Approx(f64::NAN), false, note)
}

/// Evaluates one bound. `k_or_m` is `m` for `COMP_LOWER` and `k` otherwise;
/// `ell` is the tail-block size for `ANTICHAIN_COMP` (defaulting to the one
/// chosen by the sum construction).
pub fn eval_bound(id: BoundId, n: u32, k_or_m: u64, ell: Option<u32>) -> BoundValue {
    eval_bound_with(id, n, k_or_m, ell, SigmaLowerForm::default())
}

pub fn eval_bound_with(id: BoundId, n: u32, k_or_m: u64, ell: Option<u32>, form: SigmaLowerForm) -> BoundValue {
    let two_n = pow2(n as i64);
    let k = k_or_m;
    if id != BoundId::CompLower && k < 2 {
        return undefined(id, "requires k >= 2");
    }
    let ki = k as i64;
    let pair_note = "pair bound: requires k = 2";
    match id {
        BoundId::SeymourRhs => {
            let v = affine_sqrt(int(0), int(1), two_n);
            value(id, v, k == 2, pair_note)
        }
        BoundId::ProdPairUpper => value(id, Number::Exact(pow2(2 * n as i64 - 4)), k == 2, pair_note),
        BoundId::SumPairUpper => {
            let v = two_n - pow2((n / 2) as i64) - pow2(n.div_ceil(2) as i64) + int(2);
            value(id, Number::Exact(v), k == 2, pair_note)
        }
        BoundId::PiLowerAsym => {
            let kf = k as f64;
            let v = (kf * (n as f64 * std::f64::consts::LN_2 - 1.0 - kf.ln())).exp();
            let ok = product_threshold_holds(n, k) && asymptotic_threshold_holds(n, k);
            value(
                id,
                Number::Approx(v),
                ok,
                "needs n > k log2 k + k and 2^-floor(n/k) <= (e - (1 + 1/(k-1))^(k-1)) / (e k)",
            )
        }
        BoundId::PiLowerConstructive => {
            let mut lambda = ratio(1, ki);
            if !is_power_of_two(k) {
                lambda -= pow2(-((n as u64 / k) as i64));
            }
            let base = lambda * rpow(&ratio(ki - 1, ki), (k - 1) as u32);
            let v = rpow(&base, k as u32) * pow2(ki * n as i64);
            value(id, Number::Exact(v), product_threshold_holds(n, k), "needs n > k log2 k + k")
        }
        BoundId::PiUpper => {
            let (a, b) = (k / 2, k.div_ceil(2));
            let v = rpow(&(two_n / int(ki * ki)), k as u32)
                * rpow(&int(a as i64), a as u32)
                * rpow(&int(b as i64), b as u32);
            value(id, Number::Exact(v), true, "")
        }
        BoundId::SigmaLower => {
            let base = two_n.clone() + int(2 * (ki - 1));
            match form {
                SigmaLowerForm::Refined => {
                    // (3/sqrt 2) sqrt(2^n k (1 - 2^{-(k-1)})) = 3 sqrt(k (2^{k-1} - 1) 2^{n-k})
                    let radicand = int(ki) * (pow2(ki - 1) - int(1)) * pow2(n as i64 - ki);
                    let v = affine_sqrt(base, int(-3), radicand);
                    value(id, v, sum_lower_threshold_holds(n, k), "needs n >= 2k - 1 - log2 k")
                }
                SigmaLowerForm::Simplified => {
                    let radicand = int(ki) * pow2(n as i64 - 1);
                    let v = affine_sqrt(base, int(-3), radicand);
                    value(id, v, n as u64 >= 2 * k, "needs n >= 2k")
                }
            }
        }
        BoundId::SigmaLowerPow2 => {
            let base = two_n.clone() + int(2 * (ki - 1));
            let coef = int(-2) * (int(1) - pow2(-ki));
            let v = affine_sqrt(base, coef, two_n * int(ki));
            let ok = is_power_of_two(k) && {
                let a = k.trailing_zeros() as i64;
                a % 2 == n as i64 % 2 && n as i64 >= 2 * (ki - 1) - a
            };
            value(id, v, ok, "needs k = 2^a with a ≡ n (mod 2) and n >= 2(k-1) - a")
        }
        BoundId::SigmaUpper => {
            let base = two_n.clone() + int(2 * (ki - 1));
            let v = affine_sqrt(base, int(-2), two_n * int(ki - 1));
            value(id, v, sum_upper_threshold_holds(n, k), "needs 2^n >= (k-1)(1 + sqrt(k-1))^2")
        }
        BoundId::CompLower => {
            let m = k_or_m;
            let v = affine_sqrt(-int(m as i64), int(2), two_n * int(m as i64));
            let ok = m >= 1 && (m as u128) <= 1u128 << n;
            value(id, v, ok, "needs 1 <= m <= 2^n")
        }
        BoundId::AntichainComp => {
            let l = ell.or_else(|| {
                let a = sum_offset(n, k);
                (a <= n as i64).then(|| ((n as i64 - a) / 2) as u32)
            });
            match l {
                Some(l) => {
                    let ok = l <= n && (k - 1) <= (n - l) as u64;
                    value(id, Number::Exact(antichain_comp_value(n, k, l)), ok, "needs 0 <= l and k - 1 <= n - l")
                }
                None => undefined(id, "no feasible tail size l for this (n, k)"),
            }
        }
        BoundId::GerbnerConjUpper => {
            let l = lstar(k);
            let v = pow2(ki * (n as i64 - l as i64));
            value(id, Number::Exact(v), n >= l, "needs n >= l*(k)")
        }
        BoundId::ClosingConjAsym => {
            let c = rpow(&int(ki - 1), (k - 1) as u32) / rpow(&int(ki), k as u32);
            let v = rpow(&(c * two_n), k as u32);
            value(id, Number::Exact(v), product_threshold_holds(n, k), "asymptotic conjecture; needs n > k log2 k + k")
        }
    }
}

/// Every bound evaluated at one `(n, k)` (and optionally `m` for `COMP_LOWER`).
#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub n: u32,
    pub k: u64,
    pub m: Option<u64>,
    pub entries: BTreeMap<BoundId, BoundValue>,
}

pub fn bounds_report(n: u32, k: u64, m: Option<u64>) -> BoundsReport {
    let entries = BoundId::ALL
        .into_iter()
        .map(|id| {
            let v = match (id, m) {
                (BoundId::CompLower, Some(m)) => eval_bound(id, n, m, None),
                (BoundId::CompLower, None) => undefined(id, "no family size m given"),
                _ => eval_bound(id, n, k, None),
            };
            (id, v)
        })
        .collect();
    BoundsReport { n, k, m, entries }
}

impl BoundsReport {
    pub fn get(&self, id: BoundId) -> &BoundValue {
        &self.entries[&id]
    }

    /// Pairs `(lower, upper)` of applicable bounds on the same measure where the
    /// lower bound exceeds the upper one. Empty for a consistent report.
    pub fn inconsistencies(&self) -> Vec<(BoundId, BoundId)> {
        let applicable = |kind: BoundKind, measure: Measure| {
            self.entries.values().filter(move |v| v.applicable && v.id.kind() == kind && v.id.measure() == measure)
        };
        let mut bad = Vec::new();
        for measure in [Measure::Product, Measure::Sum] {
            for lo in applicable(BoundKind::Lower, measure) {
                for hi in applicable(BoundKind::Upper, measure) {
                    if lo.value.compare(&hi.value) == Some(Ordering::Greater) {
                        bad.push((lo.id, hi.id));
                    }
                }
            }
        }
        bad
    }
}
