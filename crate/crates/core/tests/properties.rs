use proptest::prelude::*;
use sperner::lattice::{
    closure, comparability_number, comparable, convex_hull, hk_check, merge_partition, Direction, Family, FamilyTuple,
    GroundSize, SetMask,
};

fn g(n: u32) -> GroundSize {
    GroundSize::new(n).unwrap()
}

/// Random non-empty family on `P([n])` for `n <= 6`.
fn family(n: u32) -> impl Strategy<Value = Family> {
    let bits = 1u32 << n;
    any::<u64>().prop_filter_map("non-empty", move |w| {
        let w = if bits == 64 { w } else { w & ((1u64 << bits) - 1) };
        (w != 0).then(|| Family::from_word(g(n), w))
    })
}

fn sized_family() -> impl Strategy<Value = Family> {
    (0u32..=6).prop_flat_map(family)
}

/// A random cross-Sperner tuple: components of a random support dealt out
/// to `k` families, retried until none is empty.
fn cross_sperner(n: u32, k: usize, support: u64, deal: &[usize]) -> Option<FamilyTuple> {
    let members: Vec<u32> = (0..1u32 << n).filter(|&x| support >> x & 1 == 1).collect();
    let mut comp: Vec<usize> = (0..members.len()).collect();
    for i in 0..members.len() {
        for j in 0..i {
            if comparable(SetMask(members[i]), SetMask(members[j])) {
                let (a, b) = (comp[i], comp[j]);
                comp.iter_mut().filter(|c| **c == a).for_each(|c| *c = b);
            }
        }
    }
    let mut fams = vec![Family::empty(g(n)); k];
    for (i, &x) in members.iter().enumerate() {
        fams[deal[comp[i] % deal.len()] % k].insert(SetMask(x));
    }
    if fams.iter().any(Family::is_empty) {
        return None;
    }
    FamilyTuple::new(fams).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn harris_kleitman_on_monotone_pairs(a in sized_family(), seed in any::<u64>()) {
        let n = a.ground().get();
        let bits = 1u32 << n;
        let w = if bits == 64 { seed } else { seed & ((1u64 << bits) - 1) };
        let b = Family::from_word(g(n), w | 1);
        let up = closure(&a, Direction::Up).unwrap();
        let down = closure(&b, Direction::Down).unwrap();
        let r = hk_check(&up, &down).unwrap();
        prop_assert!(r.holds);
        prop_assert!(r.lhs <= r.rhs);
    }

    #[test]
    fn hull_preserves_comparability(f in sized_family()) {
        let hull = convex_hull(&f).unwrap();
        prop_assert!(f.is_subset_of(&hull));
        prop_assert_eq!(comparability_number(&hull).unwrap(), comparability_number(&f).unwrap());
    }

    #[test]
    fn comparability_is_monotone(f in sized_family(), extra in any::<u32>()) {
        let n = f.ground();
        let mut bigger = f.clone();
        bigger.insert(SetMask(extra & n.full_mask().bits()));
        prop_assert!(comparability_number(&f).unwrap().0 <= comparability_number(&bigger).unwrap().0);
    }

    #[test]
    fn comparable_set_contains_closures(f in sized_family()) {
        let (_, set) = comparability_number(&f).unwrap();
        prop_assert!(closure(&f, Direction::Up).unwrap().is_subset_of(&set));
        prop_assert!(closure(&f, Direction::Down).unwrap().is_subset_of(&set));
    }

    #[test]
    fn merges_stay_cross_sperner(
        n in 2u32..=5,
        k in 2usize..=4,
        support in any::<u64>(),
        deal in prop::collection::vec(0usize..4, 1..8),
    ) {
        let support = support & ((1u64 << (1u32 << n)) - 1).max(1);
        if let Some(t) = cross_sperner(n, k, support, &deal) {
            prop_assert!(t.is_cross_sperner().unwrap());
            for j in 1..k {
                let merged = merge_partition(&t, j).unwrap();
                prop_assert!(merged.is_cross_sperner().unwrap());
                prop_assert_eq!(merged.sum(), t.sum());
            }
        }
    }
}
