//! Branch-and-bound over label assignments.
//!
//! Masks are visited in a fixed order (middle layers first) and each gets a
//! label in `{unused, 0..k}`. A mask comparable to members of two different
//! families can only stay unused; one comparable to a single family can only
//! join that family. Families are opened in first-use order, and only maximal
//! tuples are scored (every unused mask must touch two families), since adding
//! a mask always raises both measures.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::constructions::{
    build_pair_product, build_pair_sum, build_product_tuple, build_sum_tuple, ProductParams, SumParams,
};
use crate::lattice::{comparable, Family, FamilyTuple, GroundSize, SetMask};
use crate::par::map_collect;

use super::{Objective, SearchConfig, SearchError, SearchResult, EXACT_LIMIT};

/// Decisions fixed before fanning out to workers.
const SPLIT_DEPTH: usize = 4;
const CHECK_EVERY: u64 = 4096;

type Key = Vec<Vec<u32>>;

struct Shared {
    best: AtomicU64,
    nodes: AtomicU64,
    stop: AtomicBool,
}

struct Engine<'a> {
    k: usize,
    objective: Objective,
    order: Vec<u32>,
    /// `comp[x]`: bitset of masks comparable to `x` (including `x`).
    comp: Vec<u64>,
    /// `rest[p]`: bitset of masks at order positions `>= p`.
    rest: Vec<u64>,
    max_nodes: u64,
    deadline: Instant,
    shared: &'a Shared,
}

struct Worker<'e, 'a> {
    e: &'e Engine<'a>,
    /// Per mask: 0 = unused, `j + 1` = family `j`.
    label: Vec<u8>,
    cover: Vec<u64>,
    size: Vec<u64>,
    pending: u64,
    found: Option<(u64, Key)>,
}

impl Engine<'_> {
    fn options(&self, x: u32, cover: &[u64], used: usize) -> Vec<u8> {
        let bit = 1u64 << x;
        let hits: Vec<usize> = (0..used).filter(|&j| cover[j] & bit != 0).collect();
        let mut out: Vec<u8> = match hits.len() {
            0 => (0..used.min(self.k) + usize::from(used < self.k)).map(|j| j as u8 + 1).collect(),
            1 => vec![hits[0] as u8 + 1],
            _ => vec![],
        };
        out.push(0);
        out
    }
}

impl Worker<'_, '_> {
    fn used(&self) -> usize {
        self.size.iter().take_while(|&&s| s > 0).count()
    }

    fn assign(&mut self, x: u32, l: u8) -> Option<u64> {
        self.label[x as usize] = l;
        if l == 0 {
            return None;
        }
        let j = l as usize - 1;
        let old = self.cover[j];
        self.cover[j] |= self.e.comp[x as usize];
        self.size[j] += 1;
        Some(old)
    }

    fn unassign(&mut self, x: u32, l: u8, old: Option<u64>) {
        self.label[x as usize] = 0;
        if let Some(old) = old {
            let j = l as usize - 1;
            self.cover[j] = old;
            self.size[j] -= 1;
        }
    }

    fn once_twice(&self, used: usize) -> (u64, u64) {
        let (mut once, mut twice) = (0u64, 0u64);
        for &c in &self.cover[..used] {
            twice |= once & c;
            once |= c;
        }
        (once, twice)
    }

    /// Optimistic value of any completion from position `pos`, or `None` when
    /// too few free masks remain to open the missing families.
    fn bound(&self, pos: usize, used: usize) -> Option<u64> {
        let undecided = self.e.rest[pos];
        let (once, twice) = self.once_twice(used);
        let free = (undecided & !once).count_ones() as u64;
        let missing = (self.e.k - used) as u64;
        if free < missing {
            return None;
        }
        let mut vals: Vec<u64> = (0..self.e.k)
            .map(|j| if j < used { self.size[j] + (self.cover[j] & undecided & !twice).count_ones() as u64 } else { 0 })
            .collect();
        Some(match self.e.objective {
            Objective::Sum => vals.iter().sum::<u64>() + free,
            Objective::Product => {
                for _ in 0..free {
                    let i = (0..vals.len()).min_by_key(|&i| vals[i]).unwrap();
                    vals[i] += 1;
                }
                vals.iter().product()
            }
        })
    }

    fn value(&self) -> u64 {
        match self.e.objective {
            Objective::Sum => self.size.iter().sum(),
            Objective::Product => self.size.iter().product(),
        }
    }

    fn key(&self) -> Key {
        let mut key: Key = vec![Vec::new(); self.e.k];
        for (x, &l) in self.label.iter().enumerate() {
            if l > 0 {
                key[l as usize - 1].push(x as u32);
            }
        }
        key.sort();
        key
    }

    fn tick(&mut self) -> bool {
        self.pending += 1;
        if self.pending >= CHECK_EVERY {
            let total = self.e.shared.nodes.fetch_add(self.pending, Ordering::Relaxed) + self.pending;
            self.pending = 0;
            if total >= self.e.max_nodes || Instant::now() >= self.e.deadline {
                self.e.shared.stop.store(true, Ordering::Relaxed);
            }
        }
        !self.e.shared.stop.load(Ordering::Relaxed)
    }

    fn leaf(&mut self) {
        if self.used() < self.e.k {
            return;
        }
        let (_, twice) = self.once_twice(self.e.k);
        let all = self.e.rest[0];
        let unused = self.label.iter().enumerate().filter(|&(_, &l)| l == 0).fold(0u64, |a, (x, _)| a | 1 << x) & all;
        if unused & !twice != 0 {
            return;
        }
        let v = self.value();
        if v < self.e.shared.best.load(Ordering::Relaxed) {
            return;
        }
        let better = match &self.found {
            None => true,
            Some((bv, bk)) => v > *bv || (v == *bv && self.key() < *bk),
        };
        if better {
            self.found = Some((v, self.key()));
            self.e.shared.best.fetch_max(v, Ordering::Relaxed);
        }
    }

    fn dfs(&mut self, pos: usize) {
        if !self.tick() {
            return;
        }
        if pos == self.e.order.len() {
            self.leaf();
            return;
        }
        let used = self.used();
        match self.bound(pos, used) {
            Some(b) if b >= self.e.shared.best.load(Ordering::Relaxed) => {}
            _ => return,
        }
        let x = self.e.order[pos];
        for l in self.e.options(x, &self.cover, used) {
            let old = self.assign(x, l);
            self.dfs(pos + 1);
            self.unassign(x, l, old);
        }
    }
}

fn masks_in_order(n: u32) -> Vec<u32> {
    let mut order: Vec<u32> = (0..1u32 << n).collect();
    order.sort_by_key(|&x| ((2 * x.count_ones() as i64 - n as i64).abs(), x));
    order
}

/// All label prefixes for the first `depth` positions allowed by propagation.
fn prefixes(e: &Engine<'_>, depth: usize) -> Vec<Vec<u8>> {
    fn rec(
        e: &Engine<'_>,
        pos: usize,
        depth: usize,
        cover: &mut Vec<u64>,
        used: usize,
        cur: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if pos == depth {
            out.push(cur.clone());
            return;
        }
        let x = e.order[pos];
        for l in e.options(x, cover, used) {
            cur.push(l);
            if l == 0 {
                rec(e, pos + 1, depth, cover, used, cur, out);
            } else {
                let j = l as usize - 1;
                let old = cover[j];
                cover[j] |= e.comp[x as usize];
                rec(e, pos + 1, depth, cover, used.max(j + 1), cur, out);
                cover[j] = old;
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(e, 0, depth.min(e.order.len()), &mut vec![0; e.k], 0, &mut Vec::new(), &mut out);
    out
}

/// Best known construction for the objective, used to seed pruning.
fn baseline(n: u32, k: usize, objective: Objective) -> Option<(u64, Key)> {
    let mut cands = Vec::new();
    match objective {
        Objective::Product => {
            if k == 2 {
                cands.push(build_pair_product(n).ok());
            }
            cands.push(ProductParams::new(n, k).ok().and_then(|p| build_product_tuple(&p).ok()));
        }
        Objective::Sum => {
            if k == 2 {
                cands.push(build_pair_sum(n).ok());
            }
            cands.push(SumParams::new(n, k).ok().and_then(|s| build_sum_tuple(&s).ok()));
        }
    }
    cands
        .into_iter()
        .flatten()
        .filter(|c| c.tuple.k() == k && c.tuple.is_cross_sperner().unwrap_or(false))
        .map(|c| (objective.of(&c.tuple).to_u64().expect("small ground"), c.tuple.canonical_key()))
        .min_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)))
}

fn pick(a: Option<(u64, Key)>, b: Option<(u64, Key)>) -> Option<(u64, Key)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

pub(super) fn tuple_from_key(n: GroundSize, key: &Key) -> Result<FamilyTuple, SearchError> {
    let families =
        key.iter().map(|ms| Family::from_masks(n, ms.iter().map(|&m| SetMask(m)))).collect::<Result<Vec<_>, _>>()?;
    Ok(FamilyTuple::new(families)?)
}

/// Exact optimum of `cfg.objective` by branch and bound. The value and the
/// canonical witness (least sorted member lists) do not depend on `threads`.
pub fn exact_search(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    cfg.validate(Some(EXACT_LIMIT))?;
    let start = Instant::now();
    let g = GroundSize::new(cfg.n)?;
    let order = masks_in_order(cfg.n);
    let comp: Vec<u64> = (0..1u32 << cfg.n)
        .map(|x| (0..1u32 << cfg.n).filter(|&y| comparable(SetMask(x), SetMask(y))).fold(0u64, |a, y| a | 1 << y))
        .collect();
    let mut rest = vec![0u64; order.len() + 1];
    for p in (0..order.len()).rev() {
        rest[p] = rest[p + 1] | 1 << order[p];
    }
    let seed = baseline(cfg.n, cfg.k, cfg.objective);
    let shared = Shared {
        best: AtomicU64::new(seed.as_ref().map_or(0, |s| s.0)),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
    };
    let engine = Engine {
        k: cfg.k,
        objective: cfg.objective,
        order,
        comp,
        rest,
        max_nodes: cfg.budget.nodes,
        deadline: start + cfg.budget.time,
        shared: &shared,
    };

    let tasks = prefixes(&engine, SPLIT_DEPTH);
    let found = map_collect(cfg.threads, tasks, |prefix| {
        let mut w = Worker {
            e: &engine,
            label: vec![0; engine.comp.len()],
            cover: vec![0; engine.k],
            size: vec![0; engine.k],
            pending: 0,
            found: None,
        };
        for (pos, &l) in prefix.iter().enumerate() {
            w.assign(engine.order[pos], l);
        }
        w.dfs(prefix.len());
        shared.nodes.fetch_add(w.pending, Ordering::Relaxed);
        w.found
    });

    let complete = !shared.stop.load(Ordering::Relaxed);
    let best = found.into_iter().fold(seed, pick);
    let nodes_explored = shared.nodes.load(Ordering::Relaxed);
    let (value, key) = match best {
        Some(b) => b,
        None if complete => return Err(SearchError::NoFeasibleTuple { n: cfg.n, k: cfg.k }),
        None => return Err(SearchError::NoWitnessWithinBudget),
    };
    Ok(SearchResult {
        objective: cfg.objective,
        value: BigUint::from(value),
        witness: tuple_from_key(g, &key)?,
        optimal: complete,
        nodes_explored,
        elapsed: start.elapsed(),
    })
}

pub fn exact_pi(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    exact_search(&SearchConfig { objective: Objective::Product, ..cfg.clone() })
}

pub fn exact_sigma(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    exact_search(&SearchConfig { objective: Objective::Sum, ..cfg.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{oracle_small, Budget, SearchMode};
    use std::time::Duration;

    fn cfg(n: u32, k: usize, objective: Objective) -> SearchConfig {
        SearchConfig::new(n, k, objective, SearchMode::Exact)
    }

    fn value(r: &SearchResult) -> u64 {
        r.value.to_u64().unwrap()
    }

    #[test]
    fn product_values() {
        let r = exact_pi(&cfg(4, 3, Objective::Product)).unwrap();
        assert_eq!(value(&r), 9);
        assert!(r.optimal && r.verify().unwrap());
        for n in 2..=4u32 {
            let r = exact_pi(&cfg(n, 2, Objective::Product)).unwrap();
            assert_eq!(value(&r), 1 << (2 * n - 4), "n={n}");
            assert!(r.verify().unwrap());
        }
    }

    #[test]
    fn sum_values() {
        for (n, k, want) in [(4, 2, 10), (4, 3, 8), (2, 2, 2)] {
            let r = exact_sigma(&cfg(n, k, Objective::Sum)).unwrap();
            assert_eq!(value(&r), want, "n={n} k={k}");
            assert!(r.optimal && r.verify().unwrap());
        }
    }

    #[test]
    fn agrees_with_oracle() {
        for n in 0..=3u32 {
            for k in 2..=3usize {
                for obj in [Objective::Product, Objective::Sum] {
                    let exact = exact_search(&cfg(n, k, obj)).map(|r| r.value);
                    assert_eq!(exact, oracle_small(n, k, obj), "n={n} k={k} {obj}");
                }
            }
        }
    }

    #[test]
    fn n4_matches_exhaustive_support_enumeration() {
        // Values from a separate enumeration of all 2^16 supports.
        for (k, pi, sigma) in [(2, 16, 10), (3, 9, 8), (4, 4, 7)] {
            assert_eq!(value(&exact_pi(&cfg(4, k, Objective::Product)).unwrap()), pi, "k={k}");
            assert_eq!(value(&exact_sigma(&cfg(4, k, Objective::Sum)).unwrap()), sigma, "k={k}");
        }
    }

    #[test]
    fn witness_is_independent_of_threads() {
        let one = exact_pi(&cfg(4, 3, Objective::Product).with_threads(1)).unwrap();
        let many = exact_pi(&cfg(4, 3, Objective::Product).with_threads(3)).unwrap();
        assert_eq!(one.witness, many.witness);
        assert_eq!(one.witness.canonical_key(), one.witness.canonical().canonical_key());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tight = Budget { nodes: 1, time: Duration::from_secs(10) };
        let r = exact_pi(&cfg(5, 3, Objective::Product).with_budget(tight)).unwrap();
        assert!(!r.optimal);
        assert!(r.verify().unwrap());
        assert!(matches!(exact_pi(&cfg(6, 3, Objective::Product)), Err(SearchError::GroundTooLarge { .. })));
    }
}
