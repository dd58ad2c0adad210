mod common;

use std::collections::HashSet;

use bigdecimal::BigDecimal;
use betaqmc::numeration::*;
use betaqmc::precision;
use common::{for_each_string, shipped, sys};
use proptest::prelude::*;

#[test]
fn admissible_strings_biject_onto_initial_segments() {
    for s in shipped() {
        for k in 0..=12 {
            let mut values = HashSet::new();
            for_each_admissible(&s, k, |d| {
                let v = expansion_value(&DigitString::new(d.to_vec()), &s).unwrap();
                assert!(values.insert(v), "{} duplicate value {v}", s.coeffs());
            })
            .unwrap();
            let g = s.base_sequence()[k];
            assert_eq!(values.len() as u128, g, "{} K={k}", s.coeffs());
            assert!(values.iter().all(|&v| v < g));
        }
    }
}

#[test]
fn exhaustive_count_matches_base_sequence() {
    // independent of the pruned enumeration: filter all strings by the partial-sum test
    for s in shipped() {
        let a0 = s.coeffs().leading();
        for k in 0..=8 {
            let mut count = 0u128;
            for_each_string(k, a0 + 1, |d| {
                if is_admissible(&DigitString::new(d.to_vec()), &s).unwrap() {
                    count += 1;
                }
            });
            assert_eq!(count, s.base_sequence()[k], "{} K={k}", s.coeffs());
        }
    }
}

#[test]
fn greedy_round_trip_and_admissibility() {
    for s in shipped() {
        for n in 0..100_000u128 {
            let e = greedy_expansion(n, &s).unwrap();
            assert_eq!(expansion_value(&e, &s).unwrap(), n);
            assert!(is_admissible(&e, &s).unwrap(), "{} n={n}", s.coeffs());
        }
    }
}

#[test]
fn lexicographic_test_agrees_with_partial_sums() {
    for s in shipped() {
        let a0 = s.coeffs().leading();
        for len in 0..=12 {
            for_each_string(len, a0, |d| {
                let ds = DigitString::new(d.to_vec());
                let eq2 = is_admissible(&ds, &s).unwrap();
                assert_eq!(is_admissible_lexicographic(&ds, &s), eq2, "{} {ds}", s.coeffs());
                assert_eq!(s.automaton().run(d.iter().copied()).is_some(), eq2, "{} {ds}", s.coeffs());
            });
        }
    }
}

fn shipped_index() -> impl Strategy<Value = usize> {
    0..common::SHIPPED.len()
}

proptest! {
    #[test]
    fn large_digits_agree_too(i in shipped_index(), digits in prop::collection::vec(0u32..6, 0..13)) {
        let s = sys(common::SHIPPED[i]);
        let ds = DigitString::new(digits);
        let eq2 = is_admissible(&ds, &s).unwrap();
        prop_assert_eq!(is_admissible_lexicographic(&ds, &s), eq2);
        prop_assert_eq!(s.automaton().run(ds.as_slice().iter().copied()).is_some(), eq2);
    }

    #[test]
    fn greedy_of_large_integers(i in shipped_index(), n in any::<u64>()) {
        let s = sys(common::SHIPPED[i]);
        let e = greedy_expansion(u128::from(n), &s).unwrap();
        prop_assert_eq!(expansion_value(&e, &s).unwrap(), u128::from(n));
        prop_assert!(is_admissible(&e, &s).unwrap());
    }
}

#[test]
fn base_sequence_follows_the_recurrence() {
    for s in shipped() {
        let a = s.coeffs().as_slice();
        let d = a.len();
        let g = s.base_sequence();
        assert_eq!(g[0], 1);
        for k in 1..g.len() {
            let sum: u128 = (0..k.min(d)).map(|i| u128::from(a[i]) * g[k - 1 - i]).sum();
            assert_eq!(g[k], sum + u128::from(k < d));
            assert!(g[k] > g[k - 1]);
        }
    }
}

#[test]
fn root_residual_and_parry_identity() {
    for coeffs in [&[1, 1][..], &[2, 2], &[1, 1, 1], &[3, 3, 3], &[1, 0, 1], &[2, 1, 2], &[1, 2], &[3], &[1, 0, 1, 1]] {
        let s = sys(coeffs);
        let beta = s.beta();
        let d = coeffs.len() as i32;
        let tail: f64 = coeffs.iter().enumerate().map(|(i, &a)| f64::from(a) * beta.powi(d - 1 - i as i32)).sum();
        assert!((beta.powi(d) - tail).abs() < 1e-12 * beta.powi(d), "{coeffs:?}");

        let exact = precision::char_poly(coeffs, s.beta_high_precision());
        let bound = BigDecimal::try_from(1e-45).unwrap();
        assert!(exact.abs() < bound, "{coeffs:?} residual {exact}");

        if s.classification().admits_monna_map() && f64::from(coeffs[0]) == beta.floor() {
            let parry: f64 = coeffs.iter().enumerate().map(|(i, &a)| f64::from(a) / beta.powi(i as i32)).sum();
            assert!((beta - parry).abs() < 1e-12, "{coeffs:?}");
        }
    }
}

#[test]
fn pisot_flags() {
    for s in shipped() {
        assert!(s.pisot_verified(), "{}", s.coeffs());
        assert!(s.conjugates().iter().all(|z| z.norm() < 1.0 - 1e-9));
    }
    assert!(!sys(&[1, 2]).pisot_verified());
    assert!(!sys(&[1, 0, 1, 1]).pisot_verified());
}

/// `|G_n / beta^n - G_{n+1} / beta^{n+1}|` in high precision.
fn growth_steps(s: &NumerationSystem, upto: usize) -> Vec<f64> {
    let beta = s.beta_high_precision();
    let ratio = |n: usize| precision::div(&precision::from_u128(s.base_sequence()[n]), &precision::powi(beta, n));
    (0..upto).map(|n| precision::to_f64(&(ratio(n) - ratio(n + 1)).abs())).collect()
}

#[test]
fn growth_ratio_converges() {
    for s in shipped() {
        let d = s.degree();
        let steps = growth_steps(&s, 60);
        // complex conjugate pairs make single steps oscillate, so compare
        // maxima over consecutive windows of 2d steps
        let window = 2 * d;
        let maxima: Vec<f64> =
            steps[d..].chunks_exact(window).map(|w| w.iter().copied().fold(0.0, f64::max)).collect();
        for pair in maxima.windows(2) {
            assert!(pair[1] < pair[0], "{}: {maxima:?}", s.coeffs());
        }
        let c = s.growth_constant();
        let last = s.max_index();
        let tail = s.base_sequence()[last] as f64 / s.beta().powi(last as i32);
        assert!((c - tail).abs() < 1e-9 * c);
    }
    // real conjugates give monotone steps
    let fib = sys(&[1, 1]);
    let steps = growth_steps(&fib, 60);
    assert!(steps[2..].windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn composite_systems_classify_and_share_sequences() {
    let c = classify_coefficients(&CoefficientVector::new(vec![2, 1, 1, 2, 1, 2]).unwrap());
    assert_eq!(c.tag, ClassTag::CompositeCase);
    let c = classify_coefficients(&CoefficientVector::new(vec![1, 0, 1, 0, 1, 1]).unwrap());
    assert_eq!(c.composite.unwrap().repetitions, 2);
    let c = classify_coefficients(&CoefficientVector::new(vec![2, 2, 1, 2, 2, 2]).unwrap());
    assert_eq!(c.tag, ClassTag::CompositeCase);
    assert_eq!(
        classify_coefficients(&CoefficientVector::new(vec![2, 2, 3]).unwrap()).equivalent_base,
        Some(3)
    );
    // the b-adic case really is base a_0 + 1
    let s = sys(&[2, 2, 3]);
    assert!((s.beta() - 3.0).abs() < 1e-12);
    assert_eq!(&s.base_sequence()[..6], &[1, 3, 9, 27, 81, 243]);
}
