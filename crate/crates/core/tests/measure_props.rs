mod common;

use betaqmc::measure::*;
use betaqmc::numeration::*;
use common::{shipped, sys, CONSTANT};

fn cyl<'a>(d: &[u32], s: &'a NumerationSystem) -> CylinderSet<'a> {
    CylinderSet::new(DigitString::new(d.to_vec()), s).unwrap()
}

#[test]
fn mu_is_additive_over_refinements() {
    for s in shipped() {
        for k in 0..6 {
            for_each_admissible(&s, k, |d| {
                let parent = mu(&cyl(d, &s)).unwrap();
                let mut children = 0.0;
                for e in 0..=s.coeffs().leading() + 1 {
                    let mut child = d.to_vec();
                    child.push(e);
                    if let Ok(z) = CylinderSet::new(DigitString::new(child), &s) {
                        children += mu(&z).unwrap();
                    }
                }
                assert!((parent - children).abs() < 1e-12, "{} {d:?}", s.coeffs());
            })
            .unwrap();
        }
    }
}

#[test]
fn transport_for_constant_coefficient_systems() {
    for c in CONSTANT.iter().chain([&[1u32, 0, 1][..]].iter()) {
        let r = verify_transport(&sys(c), 8).unwrap();
        assert!(r.max_deviation <= 1e-10, "{c:?}: {}", r.max_deviation);
        assert!(r.max_mass_error() <= 1e-10);
        assert_eq!(r.closed_form_violations, 0);
    }
}

#[test]
fn transport_report_for_sandwich_system() {
    // transport is only proved for constant coefficients and (1,0,1)
    let r = verify_transport(&sys(&[2, 1, 2]), 6).unwrap();
    assert!(r.max_mass_error() < 1e-10);
    assert!(r.cylinders > 0);
}

/// The four digit patterns at the end of a depth-k prefix for `(1,0,1)` and
/// the exponent `e` with `mu = beta^{-e}`.
fn closed_form_cases(k: usize) -> Vec<(Vec<u32>, i32)> {
    let with_tail = |tail: &[u32]| {
        let mut d = vec![0u32; k - tail.len()];
        d.extend_from_slice(tail);
        d
    };
    vec![
        (with_tail(&[0, 0, 0]), k as i32),
        (with_tail(&[1, 0, 0]), k as i32),
        (with_tail(&[1, 0]), k as i32 + 1),
        (with_tail(&[1]), k as i32 + 2),
    ]
}

#[test]
fn sandwich_closed_forms() {
    let s = sys(&[1, 0, 1]);
    let beta = s.beta();
    for k in 3..=8 {
        for (d, e) in closed_form_cases(k) {
            let m = mu(&cyl(&d, &s)).unwrap();
            assert!((m - beta.powi(-e)).abs() < 1e-12, "k={k} {d:?}: {m}");
        }
    }
}

#[test]
fn closed_form_holds_for_any_admissible_head() {
    // the value only depends on the last three digits
    let s = sys(&[1, 0, 1]);
    let beta = s.beta();
    for k in 3..=8 {
        for_each_admissible(&s, k, |d| {
            let e = match (d[k - 3], d[k - 2], d[k - 1]) {
                (_, _, 1) => k + 2,
                (_, 1, 0) => k + 1,
                _ => k,
            };
            let m = mu(&cyl(d, &s)).unwrap();
            assert!((m - beta.powi(-(e as i32))).abs() < 1e-12, "{d:?}");
        })
        .unwrap();
    }
}

#[test]
fn spectrum_decay_for_fibonacci() {
    let fib = NumerationSystem::fibonacci();
    for l in 1..=3 {
        let p = eigenvalue_limit_check(SpectrumProbe::new(&fib, 1, 0, l), 60).unwrap();
        assert!(p.distances[30] < 1e-5);
        assert!(p.values[10..].windows(2).all(|w| w[1] < w[0]), "l={l}");
        assert!(p.values.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn count_prefix_dp_matches_enumeration() {
    for s in shipped() {
        let g = s.base_sequence();
        let m_max = g.iter().rposition(|&v| v <= 100_000).unwrap();
        let expansions: Vec<Vec<u32>> =
            (0..g[m_max]).map(|n| greedy_expansion(n, &s).unwrap().into_vec()).collect();
        for k in 0..=3 {
            for_each_admissible(&s, k, |d| {
                let z = cyl(d, &s);
                for m in k..=m_max {
                    let direct = expansions[..g[m] as usize]
                        .iter()
                        .filter(|e| d.iter().enumerate().all(|(j, &p)| e.get(j).copied().unwrap_or(0) == p))
                        .count() as u128;
                    assert_eq!(count_prefix(&z, m).unwrap(), direct, "{} {d:?} M={m}", s.coeffs());
                }
            })
            .unwrap();
        }
    }
}
