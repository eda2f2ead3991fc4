//! Simulated annealing over cross-Sperner labelings.
//!
//! The state assigns each mask a label in `{unused, 0..k}` and keeps, for
//! every mask and family, how many members of that family are comparable to
//! it, so feasibility of a move is local. Moves:
//!
//! - kick: put a mask into a family, ejecting comparable members of other families;
//! - drop: remove a mask from its family;
//! - recolor: move a whole comparability component of the support to another family.
//!
//! Each restart starts from the product construction with perturbed segment
//! sizes (the first restart uses the unperturbed one).

use std::collections::VecDeque;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constructions::{build_product_tuple, ProductParams};
use crate::lattice::{FamilyTuple, GroundSize};
use crate::par::map_collect;

use super::exact::tuple_from_key;
use super::{Objective, SearchConfig, SearchError, SearchResult};

const RESTARTS: u64 = 8;
const T_START: f64 = 0.6;
const T_END: f64 = 0.01;

type Key = Vec<Vec<u32>>;

/// Calls `f` on every mask comparable to `x` except `x` itself.
fn for_each_comparable(x: u32, full: u32, mut f: impl FnMut(u32)) {
    let mut s = x;
    while s != 0 {
        s = (s - 1) & x;
        f(s);
    }
    let c = full & !x;
    let mut s = c;
    while s != 0 {
        f(x | s);
        s = (s - 1) & c;
    }
}

struct Chain<'a> {
    cfg: &'a SearchConfig,
    full: u32,
    k: usize,
    label: Vec<u8>,
    /// `cnt[x * k + j]`: members of family `j` comparable to or equal to `x`.
    cnt: Vec<u32>,
    size: Vec<u64>,
    rng: ChaCha8Rng,
}

impl Chain<'_> {
    fn score(&self, size: &[u64]) -> f64 {
        match self.cfg.objective {
            Objective::Sum => size.iter().sum::<u64>() as f64,
            Objective::Product => size.iter().map(|&s| (s as f64).ln()).sum(),
        }
    }

    fn exact_value(&self) -> BigUint {
        match self.cfg.objective {
            Objective::Sum => BigUint::from(self.size.iter().sum::<u64>()),
            Objective::Product => self.size.iter().map(|&s| BigUint::from(s)).product(),
        }
    }

    fn key(&self) -> Key {
        let mut key: Key = vec![Vec::new(); self.k];
        for (x, &l) in self.label.iter().enumerate() {
            if l > 0 {
                key[l as usize - 1].push(x as u32);
            }
        }
        key.sort();
        key
    }

    fn set(&mut self, x: u32, l: u8) {
        let k = self.k;
        let old = self.label[x as usize];
        if old == l {
            return;
        }
        if old > 0 {
            let j = old as usize - 1;
            self.size[j] -= 1;
            self.cnt[x as usize * k + j] -= 1;
            let cnt = &mut self.cnt;
            for_each_comparable(x, self.full, |y| cnt[y as usize * k + j] -= 1);
        }
        if l > 0 {
            let j = l as usize - 1;
            self.size[j] += 1;
            self.cnt[x as usize * k + j] += 1;
            let cnt = &mut self.cnt;
            for_each_comparable(x, self.full, |y| cnt[y as usize * k + j] += 1);
        }
        self.label[x as usize] = l;
    }

    fn reset(&mut self, key: &Key) {
        self.label.iter_mut().for_each(|l| *l = 0);
        self.cnt.iter_mut().for_each(|c| *c = 0);
        self.size.iter_mut().for_each(|s| *s = 0);
        for (j, members) in key.iter().enumerate() {
            for &x in members {
                self.set(x, j as u8 + 1);
            }
        }
    }

    /// Greedily adds unused masks that fit without conflicts.
    fn fill(&mut self) {
        for x in 0..=self.full {
            if self.label[x as usize] != 0 {
                continue;
            }
            let row = &self.cnt[x as usize * self.k..][..self.k];
            let hits: Vec<usize> = (0..self.k).filter(|&j| row[j] > 0).collect();
            if hits.len() == 1 {
                self.set(x, hits[0] as u8 + 1);
            }
        }
    }

    /// Proposed label changes for a move, or `None` if it would empty a family.
    fn propose(&mut self) -> Option<Vec<(u32, u8)>> {
        let x = self.rng.random_range(0..=self.full);
        let cur = self.label[x as usize];
        let roll: f64 = self.rng.random();
        let changes = if roll < 0.7 {
            let l = self.rng.random_range(1..=self.k as u8);
            if l == cur {
                return None;
            }
            let mut ch = vec![(x, l)];
            for_each_comparable(x, self.full, |y| {
                let ly = self.label[y as usize];
                if ly != 0 && ly != l {
                    ch.push((y, 0));
                }
            });
            ch
        } else if roll < 0.8 {
            if cur == 0 {
                return None;
            }
            vec![(x, 0)]
        } else {
            if cur == 0 {
                return None;
            }
            let mut l = self.rng.random_range(1..self.k as u8);
            if l >= cur {
                l += 1;
            }
            self.component(x).into_iter().map(|y| (y, l)).collect()
        };
        let mut size = self.size.clone();
        for &(y, l) in &changes {
            let old = self.label[y as usize];
            if old > 0 {
                size[old as usize - 1] -= 1;
            }
            if l > 0 {
                size[l as usize - 1] += 1;
            }
        }
        if size.contains(&0) {
            return None;
        }
        Some(changes)
    }

    fn component(&self, x: u32) -> Vec<u32> {
        let mut seen = vec![false; self.label.len()];
        let mut queue = VecDeque::from([x]);
        seen[x as usize] = true;
        let mut out = Vec::new();
        while let Some(y) = queue.pop_front() {
            out.push(y);
            for_each_comparable(y, self.full, |z| {
                if self.label[z as usize] != 0 && !seen[z as usize] {
                    seen[z as usize] = true;
                    queue.push_back(z);
                }
            });
        }
        out
    }

    fn start_key(&mut self, restart: u64) -> Option<Key> {
        let g = GroundSize::new(self.cfg.n).ok()?;
        if let Ok(mut p) = ProductParams::new(self.cfg.n, self.k) {
            if restart > 0 {
                let segs = p
                    .parts
                    .iter()
                    .zip(&p.segments)
                    .map(|(part, &t)| {
                        let hi = (1u64 << part.len()) - 1;
                        let delta = self.rng.random_range(-2i64..=2);
                        (t as i64 + delta).clamp(1, hi as i64) as u64
                    })
                    .collect();
                p = p.with_segments(segs).ok()?;
            }
            if let Ok(c) = build_product_tuple(&p) {
                return Some(c.tuple.canonical_key());
            }
        }
        // Fallback: k distinct middle-layer sets, one per family.
        let mid = self.cfg.n / 2;
        let mut layer: Vec<u32> = (0..1u32 << g.get()).filter(|x| x.count_ones() == mid).collect();
        if layer.len() < self.k {
            return None;
        }
        for i in 0..self.k {
            let j = self.rng.random_range(i..layer.len());
            layer.swap(i, j);
        }
        Some(layer[..self.k].iter().map(|&x| vec![x]).collect())
    }

    fn run(&mut self, deadline: Instant) -> Option<(BigUint, Key, u64)> {
        let per_restart = (self.cfg.budget.nodes / RESTARTS).max(1);
        let mut best: Option<(f64, BigUint, Key)> = None;
        let mut steps = 0u64;
        'restarts: for restart in 0..RESTARTS {
            let key = self.start_key(restart)?;
            self.reset(&key);
            self.fill();
            let mut current = self.score(&self.size);
            for it in 0..per_restart {
                if Self::improves(&best, current) {
                    let v = self.exact_value();
                    let k = self.key();
                    let replace = match &best {
                        None => true,
                        Some((_, bv, bk)) => v > *bv || (v == *bv && k < *bk),
                    };
                    if replace {
                        best = Some((current, v, k));
                    }
                    if let (Some(t), Some((_, bv, _))) = (&self.cfg.target, &best) {
                        if bv >= t {
                            break 'restarts;
                        }
                    }
                }
                steps += 1;
                if steps.is_multiple_of(1024) && Instant::now() >= deadline {
                    break 'restarts;
                }
                let frac = it as f64 / per_restart as f64;
                let temp = T_START * (T_END / T_START).powf(frac);
                let Some(changes) = self.propose() else { continue };
                let mut size = self.size.clone();
                for &(y, l) in &changes {
                    let old = self.label[y as usize];
                    if old > 0 {
                        size[old as usize - 1] -= 1;
                    }
                    if l > 0 {
                        size[l as usize - 1] += 1;
                    }
                }
                let next = self.score(&size);
                let accept = next >= current || self.rng.random::<f64>() < ((next - current) / temp).exp();
                if accept {
                    for &(y, l) in &changes {
                        if l == 0 {
                            self.set(y, 0);
                        }
                    }
                    for &(y, l) in &changes {
                        if l != 0 {
                            self.set(y, l);
                        }
                    }
                    self.fill();
                    current = self.score(&self.size);
                }
            }
        }
        best.map(|(_, v, k)| (v, k, steps))
    }

    fn improves(best: &Option<(f64, BigUint, Key)>, current: f64) -> bool {
        best.as_ref().is_none_or(|(s, _, _)| current >= *s - 1e-9)
    }
}

/// Seeded local search. Never claims optimality; the result is reproducible
/// for a fixed `(seed, threads)` unless the wall-clock limit cuts it short.
pub fn heuristic_search(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    cfg.validate(None)?;
    let start = Instant::now();
    let deadline = start + cfg.budget.time;
    let g = GroundSize::new(cfg.n)?;
    let full = g.full_mask().bits();
    let universe = g.universe();
    let chains: Vec<u64> = (0..cfg.threads.max(1) as u64).collect();
    let results = map_collect(cfg.threads, chains, |w| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(w);
        let mut chain = Chain {
            cfg,
            full,
            k: cfg.k,
            label: vec![0; universe],
            cnt: vec![0; universe * cfg.k],
            size: vec![0; cfg.k],
            rng,
        };
        chain.run(deadline)
    });
    let mut nodes = 0;
    let mut best: Option<(BigUint, Key)> = None;
    for (v, k, steps) in results.into_iter().flatten() {
        nodes += steps;
        let replace = match &best {
            None => true,
            Some((bv, bk)) => v > *bv || (v == *bv && k < *bk),
        };
        if replace {
            best = Some((v, k));
        }
    }
    let (value, key) = best.ok_or(SearchError::NoFeasibleTuple { n: cfg.n, k: cfg.k })?;
    let witness: FamilyTuple = tuple_from_key(g, &key)?;
    debug_assert!(witness.is_cross_sperner().unwrap_or(false));
    Ok(SearchResult {
        objective: cfg.objective,
        value,
        witness,
        optimal: false,
        nodes_explored: nodes,
        elapsed: start.elapsed(),
    })
}

pub fn heuristic_pi(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    heuristic_search(&SearchConfig { objective: Objective::Product, ..cfg.clone() })
}

pub fn heuristic_sigma(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    heuristic_search(&SearchConfig { objective: Objective::Sum, ..cfg.clone() })
}
