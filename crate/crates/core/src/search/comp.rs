use crate::bounds::comp_lower_ceil;
use crate::lattice::{Family, GroundSize, SetMask};
use crate::par::map_collect;

use super::monotone::{dual_downset, upset_words};
use super::SearchError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompRow {
    pub m: u64,
    pub c_exact: u64,
    /// `ceil(2^{n/2+1} sqrt(m) - m)`.
    pub lower_bound: i64,
    pub equality: bool,
    /// A convex family of size `m` attaining `c_exact`.
    pub witness: Family,
}

impl CompRow {
    pub fn bound_holds(&self) -> bool {
        self.c_exact as i64 >= self.lower_bound
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompTable {
    pub n: u32,
    /// Rows for `m = 1..=2^n`, in order.
    pub rows: Vec<CompRow>,
}

impl CompTable {
    pub fn row(&self, m: u64) -> Option<&CompRow> {
        m.checked_sub(1).and_then(|i| self.rows.get(i as usize))
    }
}

/// Best `(|U ∪ D|, upset index, downset index)` for each `t = |U ∩ D|`.
type Slots = Vec<Option<(u32, u32, u32)>>;

fn better(a: Option<(u32, u32, u32)>, b: Option<(u32, u32, u32)>) -> Option<(u32, u32, u32)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// `c(n, m)` for every `1 <= m <= 2^n`.
///
/// A family and its convex hull have the same comparable sets, and the hull
/// of a convex `F` is `U ∩ D` for `U = up(F)`, `D = down(F)`, whose comparable
/// sets are exactly `U ∪ D`. Shrinking a family never grows its comparable
/// set, so `c(n, m)` is the least `|U ∪ D|` over monotone pairs with
/// `|U ∩ D| >= m`.
pub fn exact_comp_table(n: u32, threads: usize) -> Result<CompTable, SearchError> {
    let ups = upset_words(n)?;
    let g = GroundSize::new(n)?;
    let universe = 1usize << n;
    let downs: Vec<u64> = ups.iter().map(|&u| dual_downset(u, n)).collect();

    let chunk = ups.len().div_ceil(64).max(1);
    let ranges: Vec<(usize, usize)> = (0..ups.len()).step_by(chunk).map(|s| (s, (s + chunk).min(ups.len()))).collect();
    let partial: Vec<Slots> = map_collect(threads, ranges, |(lo, hi)| {
        let mut slots: Slots = vec![None; universe + 1];
        for (iu, &u) in ups.iter().enumerate().take(hi).skip(lo) {
            let pu = u.count_ones();
            for (id, &d) in downs.iter().enumerate() {
                let t = (u & d).count_ones();
                let val = pu + d.count_ones() - t;
                let cand = (val, iu as u32, id as u32);
                let slot = &mut slots[t as usize];
                if slot.is_none_or(|s| cand < s) {
                    *slot = Some(cand);
                }
            }
        }
        slots
    });
    let mut slots: Slots = vec![None; universe + 1];
    for p in partial {
        for (s, q) in slots.iter_mut().zip(p) {
            *s = better(*s, q);
        }
    }
    // Suffix minimum: pairs with a larger intersection also serve smaller m.
    for t in (0..universe).rev() {
        slots[t] = better(slots[t], slots[t + 1]);
    }

    let rows = (1..=universe as u64)
        .map(|m| {
            let (val, iu, id) = slots[m as usize].expect("the full lattice meets itself in 2^n sets");
            let mut members: Vec<u32> =
                Family::from_word(g, ups[iu as usize] & downs[id as usize]).iter().map(SetMask::bits).collect();
            // The numerically largest member is inclusion-maximal; dropping it keeps convexity.
            members.truncate(m as usize);
            let witness = Family::from_masks(g, members.into_iter().map(SetMask)).expect("masks fit");
            let lower_bound = comp_lower_ceil(n, m);
            CompRow { m, c_exact: val as u64, lower_bound, equality: val as i64 == lower_bound, witness }
        })
        .collect();
    Ok(CompTable { n, rows })
}
