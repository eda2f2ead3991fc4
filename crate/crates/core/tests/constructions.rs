use num_bigint::BigUint;
use num_rational::BigRational;
use sperner::bounds::{antichain_comp_value, eval_bound, sum_lower_threshold_holds, BoundId, Number};
use sperner::constructions::{
    build_conjecture_tuple, build_pair_product, build_pair_sum, build_product_tuple, build_sum_tuple, ConjectureParams,
    ProductParams, SumParams,
};
use sperner::lattice::{comparability_number, Family, GroundSize};

#[test]
fn product_sizes_match_lambda_expansion() {
    let mut checked = 0;
    for n in 2..=12u32 {
        for k in 2..=6usize {
            let Ok(base) = ProductParams::new(n, k) else { continue };
            let mut variants = vec![base.segments.clone()];
            variants.push(base.parts.iter().map(|_| 1).collect());
            variants.push(base.parts.iter().map(|p| (1u64 << p.len()) - 1).collect());
            for segs in variants {
                let p = base.clone().with_segments(segs).unwrap();
                let Ok(c) = build_product_tuple(&p) else { continue };
                let sizes: Vec<u64> = c.tuple.sizes().iter().map(|&s| s as u64).collect();
                assert_eq!(sizes, p.predicted_sizes(), "n={n} k={k}");
                let product = BigRational::from_integer(c.tuple.product().into());
                assert_eq!(product, p.lambda_product(), "n={n} k={k}");
                assert!(c.tuple.is_cross_sperner().unwrap());
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn sum_comparability_matches_closed_form() {
    let mut checked = 0;
    for n in 2..=12u32 {
        for k in 2..=6usize {
            let Ok(s) = SumParams::new(n, k) else { continue };
            let g = GroundSize::new(n).unwrap();
            let anti = Family::from_masks(g, s.antichain()).unwrap();
            let measured = comparability_number(&anti).unwrap().0 as u64;
            let closed = antichain_comp_value(n, k as u64, s.ell);
            assert_eq!(BigRational::from_integer(measured.into()), closed, "n={n} k={k}");
            assert_eq!(measured, s.predicted_comparability());
            // Degenerate parameters (every set hit by the antichain) are refused.
            let Ok(c) = build_sum_tuple(&s) else {
                assert_eq!(measured, 1u64 << n, "n={n} k={k}");
                continue;
            };
            assert_eq!(c.tuple.sum(), (k as u64 - 1) + (1u64 << n) - measured);
            assert!(c.tuple.is_cross_sperner().unwrap());
            if sum_lower_threshold_holds(n, k as u64) {
                let lower = eval_bound(BoundId::SigmaLower, n, k as u64, None);
                let sum = Number::Exact(BigRational::from_integer(c.tuple.sum().into()));
                assert_ne!(sum.compare(&lower.value), Some(std::cmp::Ordering::Less), "n={n} k={k}");
            }
            checked += 1;
        }
    }
    assert!(checked > 40);
}

#[test]
fn pair_and_conjecture_builders_verify() {
    for n in 2..=12u32 {
        let p = build_pair_product(n).unwrap();
        assert_eq!(p.tuple.product(), BigUint::from(1u64) << (2 * n as usize - 4));
        let s = build_pair_sum(n).unwrap();
        let expect = (1i64 << n) - (1 << (n / 2)) - (1 << n.div_ceil(2)) + 2;
        assert_eq!(s.tuple.sum() as i64, expect);
        for k in 2..=6usize {
            if let Ok(c) = ConjectureParams::new(n, k).and_then(|c| build_conjecture_tuple(&c)) {
                assert!(c.tuple.is_cross_sperner().unwrap());
                assert_eq!(c.tuple.sum(), c.predicted_sum());
            }
        }
    }
}

#[test]
fn construction_beats_conjectured_bound_at_twelve() {
    let c = build_product_tuple(&ProductParams::new(12, 3).unwrap()).unwrap();
    assert_eq!(c.tuple.sizes(), vec![605, 605, 605]);
    assert_eq!(c.tuple.product(), BigUint::from(221_445_125u64));
    let conj = eval_bound(BoundId::GerbnerConjUpper, 12, 3, None).value;
    let product = Number::Exact(BigRational::from_integer(c.tuple.product().into()));
    assert_eq!(product.compare(&conj), Some(std::cmp::Ordering::Greater));
}

#[test]
fn lower_bound_formula_versus_conjecture() {
    // The formula alone stays below 2^{k(n - l*)} at n = 12; the built tuple is what beats it.
    let at = |n| {
        let lo = eval_bound(BoundId::PiLowerConstructive, n, 3, None);
        let hi = eval_bound(BoundId::GerbnerConjUpper, n, 3, None);
        assert!(lo.applicable && hi.applicable);
        lo.value.compare(&hi.value).unwrap()
    };
    assert_eq!(at(12), std::cmp::Ordering::Less);
    for n in 15..=20 {
        assert_eq!(at(n), std::cmp::Ordering::Greater, "n={n}");
    }
}
