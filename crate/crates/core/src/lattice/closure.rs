use num_rational::Ratio;

use super::{Direction, Family, LatticeError};

/// For bit `b < 6`: word positions whose index has bit `b` clear.
const LOW: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// In place: `words[idx | bit] |= words[idx]` for every bit (superset zeta sweep).
pub(crate) fn up_sweep(words: &mut [u64], n: u32) {
    for b in 0..n {
        if b < 6 {
            let s = 1u32 << b;
            for w in words.iter_mut() {
                *w |= (*w & LOW[b as usize]) << s;
            }
        } else {
            let stride = 1usize << (b - 6);
            for chunk in words.chunks_mut(2 * stride) {
                let (lo, hi) = chunk.split_at_mut(stride);
                for (l, h) in lo.iter().zip(hi.iter_mut()) {
                    *h |= *l;
                }
            }
        }
    }
}

/// In place: `words[idx] |= words[idx | bit]` for every bit (subset zeta sweep).
pub(crate) fn down_sweep(words: &mut [u64], n: u32) {
    for b in 0..n {
        if b < 6 {
            let s = 1u32 << b;
            for w in words.iter_mut() {
                *w |= (*w >> s) & LOW[b as usize];
            }
        } else {
            let stride = 1usize << (b - 6);
            for chunk in words.chunks_mut(2 * stride) {
                let (lo, hi) = chunk.split_at_mut(stride);
                for (l, h) in lo.iter_mut().zip(hi.iter()) {
                    *l |= *h;
                }
            }
        }
    }
}

/// Sets strictly above some member.
pub(crate) fn strict_up(f: &Family) -> Family {
    let n = f.ground().get();
    let src = f.words();
    let mut out = vec![0u64; src.len()];
    for b in 0..n {
        if b < 6 {
            let s = 1u32 << b;
            for (o, w) in out.iter_mut().zip(src) {
                *o |= (*w & LOW[b as usize]) << s;
            }
        } else {
            let stride = 1usize << (b - 6);
            for (chunk_out, chunk_src) in out.chunks_mut(2 * stride).zip(src.chunks(2 * stride)) {
                for (h, l) in chunk_out[stride..].iter_mut().zip(&chunk_src[..stride]) {
                    *h |= *l;
                }
            }
        }
    }
    up_sweep(&mut out, n);
    Family::from_words(f.ground(), out)
}

fn require_non_empty(f: &Family) -> Result<(), LatticeError> {
    if f.is_empty() {
        Err(LatticeError::EmptyFamily { index: 0 })
    } else {
        Ok(())
    }
}

fn sweep(f: &Family, d: Direction) -> Family {
    let mut out = f.clone();
    let n = f.ground().get();
    out.words_mut_and_recount(|w| match d {
        Direction::Up => up_sweep(w, n),
        Direction::Down => down_sweep(w, n),
    });
    out
}

/// All supersets (`Up`) or all subsets (`Down`) of members of `f`.
pub fn closure(f: &Family, d: Direction) -> Result<Family, LatticeError> {
    require_non_empty(f)?;
    Ok(sweep(f, d))
}

/// Every set sandwiched between two members: `up(f) ∩ down(f)`.
pub fn convex_hull(f: &Family) -> Result<Family, LatticeError> {
    require_non_empty(f)?;
    Ok(sweep(f, Direction::Up).intersection(&sweep(f, Direction::Down)))
}

/// Sets comparable to at least one member of `f`. Empty for an empty family.
pub fn comparable_set(f: &Family) -> Family {
    sweep(f, Direction::Up).union(&sweep(f, Direction::Down))
}

/// The comparability number `c(n, f)` together with the comparable sets.
pub fn comparability_number(f: &Family) -> Result<(usize, Family), LatticeError> {
    require_non_empty(f)?;
    let set = comparable_set(f);
    Ok((set.len(), set))
}

/// Sets comparable to no member of `f`.
pub fn incomparable_complement(f: &Family) -> Result<Family, LatticeError> {
    require_non_empty(f)?;
    Ok(comparable_set(f).complement())
}

pub fn is_upset(f: &Family) -> bool {
    sweep(f, Direction::Up) == *f
}

pub fn is_downset(f: &Family) -> bool {
    sweep(f, Direction::Down) == *f
}

/// Both sides of the Harris–Kleitman inequality for an upset and a downset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarrisKleitman {
    /// `|U ∩ D| / 2^n`
    pub lhs: Ratio<u64>,
    /// `(|U| / 2^n) (|D| / 2^n)`
    pub rhs: Ratio<u64>,
    pub holds: bool,
}

pub fn hk_check(up: &Family, down: &Family) -> Result<HarrisKleitman, LatticeError> {
    if !is_upset(up) {
        return Err(LatticeError::NotMonotone("first argument is not an upset"));
    }
    if !is_downset(down) {
        return Err(LatticeError::NotMonotone("second argument is not a downset"));
    }
    let universe = up.ground().universe() as u64;
    let meet = up.intersection_len(down) as u64;
    let (u, d) = (up.len() as u64, down.len() as u64);
    // |U ∩ D| * 2^n <= |U| * |D|, all below 2^41 for n <= 20.
    let holds = meet * universe <= u * d;
    Ok(HarrisKleitman { lhs: Ratio::new(meet, universe), rhs: Ratio::new(u * d, universe * universe), holds })
}
