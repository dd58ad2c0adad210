mod common;

use betaqmc::mapping::{kakutani_fibonacci, UnitPoint};
use betaqmc::numeration::NumerationSystem;
use betaqmc::sequence::*;
use common::sys;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn d_star(ps: &PointSet, m: Method) -> f64 {
    star_discrepancy(ps, m).unwrap().d_star
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> PointSet {
    // a coarse lattice makes ties between coordinates likely
    let coarse = rng.random_bool(0.5);
    let coords = (0..n * dim)
        .map(|_| if coarse { f64::from(rng.random_range(0..16u32)) / 16.0 } else { rng.random::<f64>() })
        .collect();
    PointSet::new(dim, coords).unwrap()
}

#[test]
fn exact_1d_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let n = rng.random_range(1..=500);
        let ps = random_set(&mut rng, n, 1);
        assert!((d_star(&ps, Method::Exact1d) - d_star(&ps, Method::BruteForce)).abs() < 1e-12);
    }
    for coeffs in common::SHIPPED {
        let ps = generate_vdc(&sys(coeffs), 1, 500).unwrap();
        assert!((d_star(&ps, Method::Exact1d) - d_star(&ps, Method::BruteForce)).abs() < 1e-12);
    }
}

#[test]
fn exact_grid_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let n = rng.random_range(1..=64);
        let dim = rng.random_range(1..=3);
        let ps = random_set(&mut rng, n, dim);
        let (g, b) = (d_star(&ps, Method::ExactGrid), d_star(&ps, Method::BruteForce));
        assert!((g - b).abs() < 1e-12, "n={n} dim={dim}: {g} vs {b}");
    }
}

#[test]
fn koksma_hlawka_holds() {
    let fib = NumerationSystem::fibonacci();
    let cfg2 = HaltonConfig::new(vec![fib.clone(), sys(&[2])]).unwrap();
    let cfg3 = HaltonConfig::new(vec![fib.clone(), sys(&[2]), sys(&[3])]).unwrap();
    let sets = vec![
        generate_vdc(&fib, 1, 1000).unwrap(),
        generate_vdc(&sys(&[1, 0, 1]), 1, 777).unwrap(),
        generate_halton(&cfg2, 1, 1024).unwrap(),
        generate_halton(&cfg3, 1, 200).unwrap(),
    ];
    for ps in &sets {
        for f in TestFunction::suite() {
            let r = qmc_integrate(f, ps).unwrap();
            assert_eq!(r.kh_holds(), Some(true), "{f} on {}: {r:?}", ps.provenance);
        }
    }
}

#[test]
fn fibonacci_mean_is_within_discrepancy() {
    let ps = generate_vdc(&NumerationSystem::fibonacci(), 1, 1000).unwrap();
    let r = qmc_integrate(TestFunction::Sum, &ps).unwrap();
    assert!(r.error <= r.d_star.unwrap());
}

#[test]
fn halton_product_error_shrinks() {
    let cfg = HaltonConfig::new(vec![NumerationSystem::fibonacci(), sys(&[2])]).unwrap();
    let ps = generate_halton(&cfg, 1, 4096).unwrap();
    let small = qmc_integrate(TestFunction::Product, &ps.prefix(256)).unwrap();
    let large = qmc_integrate(TestFunction::Product, &ps).unwrap();
    assert!(large.error < small.error);
}

#[test]
fn one_dimensional_discrepancy_decays() {
    for coeffs in common::SHIPPED.iter().chain([&[2u32][..], &[1, 2]].iter()) {
        let ps = generate_vdc(&sys(coeffs), 1, 100_000).unwrap();
        let ds: Vec<f64> = [100, 1000, 10_000, 100_000].iter().map(|&n| d_star(&ps.prefix(n), Method::Exact1d)).collect();
        assert!(ds.windows(2).all(|w| w[1] < w[0]), "{coeffs:?}: {ds:?}");
    }
}

#[test]
fn vdc_equals_kakutani_orbit() {
    let fib = NumerationSystem::fibonacci();
    let ps = generate_vdc(&fib, 1, 9999).unwrap();
    let mut x = UnitPoint::ZERO;
    for &v in ps.coords() {
        x = kakutani_fibonacci(x);
        assert!((x.value() - v).abs() < 1e-9);
    }
}

#[test]
fn include_zero_starts_at_origin() {
    let ps = generate_vdc(&NumerationSystem::fibonacci(), 0, 3).unwrap();
    assert_eq!(ps.point(0), &[0.0]);
}
