use crate::lattice::{Family, GroundSize};

use super::{SearchError, EXACT_LIMIT};

fn check(n: u32) -> Result<GroundSize, SearchError> {
    if n > EXACT_LIMIT {
        return Err(SearchError::GroundTooLarge { n, limit: EXACT_LIMIT });
    }
    Ok(GroundSize::new(n)?)
}

fn upsets_rec(n: u32) -> Vec<u64> {
    if n == 0 {
        return vec![0, 1];
    }
    // Split on element n: U0 = members without n, U1 = members with n removed.
    // U is an upset iff both halves are upsets and U0 ⊆ U1.
    let lower = upsets_rec(n - 1);
    let half = 1u32 << (n - 1);
    let mut out = Vec::new();
    for &u1 in &lower {
        for &u0 in &lower {
            if u0 & !u1 == 0 {
                out.push(u0 | (u1 << half));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Every upset of `P([n])` as a single bitset word, ascending.
pub fn upset_words(n: u32) -> Result<Vec<u64>, SearchError> {
    check(n)?;
    Ok(upsets_rec(n))
}

/// The downset `{ [n] \ X : X ∈ U }` of an upset word: bit reversal within `2^n` bits.
pub fn dual_downset(word: u64, n: u32) -> u64 {
    word.reverse_bits() >> (64 - (1u32 << n))
}

/// All upsets of `P([n])`, each exactly once. Downsets follow from [`dual_downset`].
pub fn enumerate_monotone(n: u32) -> Result<impl Iterator<Item = Family>, SearchError> {
    let g = check(n)?;
    Ok(upsets_rec(n).into_iter().map(move |w| Family::from_word(g, w)))
}
