use num_bigint::BigUint;

use crate::lattice::{comparable, SetMask};

use super::{Objective, SearchError, ORACLE_LIMIT};

/// Exhaustive optimum for tiny grounds, independent of the DFS engine.
///
/// A cross-Sperner tuple is a support `S` whose comparability components are
/// split among `k` non-empty groups, so every support and every surjective
/// assignment of its components is tried.
pub fn oracle_small(n: u32, k: usize, objective: Objective) -> Result<BigUint, SearchError> {
    if n > ORACLE_LIMIT {
        return Err(SearchError::GroundTooLarge { n, limit: ORACLE_LIMIT });
    }
    if k < 2 {
        return Err(SearchError::BadK(k));
    }
    let universe = 1u32 << n;
    let mut best: Option<u64> = None;
    for support in 1u32..1 << universe {
        let members: Vec<u32> = (0..universe).filter(|x| support >> x & 1 == 1).collect();
        let sizes = component_sizes(&members);
        if sizes.len() < k {
            continue;
        }
        let total = (k as u64).pow(sizes.len() as u32);
        for code in 0..total {
            let mut groups = vec![0u64; k];
            let mut c = code;
            for &s in &sizes {
                groups[(c % k as u64) as usize] += s;
                c /= k as u64;
            }
            if groups.contains(&0) {
                continue;
            }
            let v = match objective {
                Objective::Product => groups.iter().product(),
                Objective::Sum => groups.iter().sum(),
            };
            best = best.max(Some(v));
        }
    }
    best.map(BigUint::from).ok_or(SearchError::NoFeasibleTuple { n, k })
}

/// Sizes of the connected components of the comparability graph on `members`.
fn component_sizes(members: &[u32]) -> Vec<u64> {
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            if comparable(SetMask(members[i]), SetMask(members[j])) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut sizes = vec![0u64; members.len()];
    for i in 0..members.len() {
        let r = find(&mut parent, i);
        sizes[r] += 1;
    }
    sizes.retain(|&s| s > 0);
    sizes
}
