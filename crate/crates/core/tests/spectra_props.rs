use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use tilescope_core::bundled;
use tilescope_core::fusion::{build_supertile, Patch, DEFAULT_TILE_BUDGET};
use tilescope_core::spectra::{
    integer_multiplier_lattice, integrality_check, integrate, occurrences, return_vectors, rs_average, spectrum_scan,
    CochainSpec, Template,
};
use tilescope_core::{Rational, Scalar};

/// All monotone staircase paths from `(x, y)` taking `a` steps right and `b`
/// steps up, as lattice polylines.
fn staircases(x: i64, y: i64, a: usize, b: usize) -> Vec<Vec<(i64, i64)>> {
    let mut out = Vec::new();
    for mask in 0u32..1 << (a + b) {
        if mask.count_ones() as usize != a {
            continue;
        }
        let mut p = vec![(x, y)];
        let (mut cx, mut cy) = (x, y);
        for bit in 0..a + b {
            if mask >> bit & 1 == 1 {
                cx += 1;
            } else {
                cy += 1;
            }
            p.push((cx, cy));
        }
        out.push(p);
    }
    out
}

fn assert_path_independent(c: &CochainSpec<Rational>, p: &Patch, x: i64, y: i64, a: usize, b: usize) {
    let paths = staircases(x, y, a, b);
    let first = integrate(c, p, &paths[0]).unwrap();
    for path in &paths[1..] {
        assert_eq!(integrate(c, p, path).unwrap(), first);
    }
}

#[test]
fn closed_kinds_are_path_independent() {
    let frank = build_supertile(&bundled::frank_dpv(), "a", 3).unwrap();
    let ex2 = build_supertile(&bundled::example2(), "a", 4).unwrap();
    let linear = CochainSpec::linear(Rational::ratio(2, 7), Rational::ratio(-5, 3));
    for a in 0..=4 {
        for b in 0..=4 {
            assert_path_independent(&linear, &frank, 3, 2, a, b);
            assert_path_independent(&CochainSpec::constant_dy(), &frank, 0, 0, a, b);
            for level in 1..=3 {
                assert_path_independent(&CochainSpec::bottom_row_counter(level), &ex2, 1, 3, a, b);
            }
        }
    }
}

#[test]
fn single_tile_occurrences_count_letters() {
    let p = build_supertile(&bundled::frank_dpv(), "a", 2).unwrap();
    let counts = p.label_counts(0).unwrap();
    for (label, &count) in counts.iter().enumerate() {
        let t = Template { width: 1, height: 1, labels: vec![label as u8] };
        assert_eq!(occurrences(&t, &p).unwrap().len() as u128, count);
    }
    let whole = Template::from_patch(&p, 0, 0, 7).unwrap();
    assert_eq!(occurrences(&whole, &p).unwrap(), vec![(0, 0)]);
    let absent = Template { width: 2, height: 1, labels: vec![0, 7] };
    assert!(occurrences(&absent, &p).unwrap().is_empty());
    let huge = Template { width: 8, height: 1, labels: vec![3; 8] };
    assert!(occurrences(&huge, &p).unwrap().is_empty());
}

#[test]
fn letter_return_vectors() {
    let p = build_supertile(&bundled::frank_dpv(), "a", 2).unwrap();
    let set = return_vectors(&p, 0, u64::MAX).unwrap();
    let grid = p.grid().unwrap();
    let w = p.width() as usize;
    let adjacent = grid.chunks(w).any(|row| row.windows(2).any(|c| c[0] == c[1]));
    assert_eq!(set.contains((1, 0)), adjacent);
    let mut naive = BTreeSet::new();
    for (i, &a) in grid.iter().enumerate() {
        for (j, &b) in grid.iter().enumerate() {
            if a == b {
                naive.insert(((j % w) as i64 - (i % w) as i64, (j / w) as i64 - (i / w) as i64));
            }
        }
    }
    assert_eq!(set.vectors.iter().copied().collect::<BTreeSet<_>>(), naive);
}

#[test]
fn survivors_shrink_as_templates_grow() {
    let p = build_supertile(&bundled::frank_dpv(), "a", 5).unwrap();
    let mut previous: Option<BTreeSet<(usize, usize)>> = None;
    for rho in 0..=4 {
        let set = return_vectors(&p, rho, u64::MAX).unwrap();
        if rho > 0 {
            let smaller = return_vectors(&p, rho - 1, u64::MAX).unwrap();
            assert!(set.vectors.iter().all(|&v| smaller.contains(v)));
        }
        let scan = spectrum_scan(&set, -2.0f64, 2.0, 0.05, 0.5).unwrap();
        let now: BTreeSet<_> = scan.survivors.iter().copied().collect();
        for i in [0usize, 20, 40, 60, 80] {
            for j in [0usize, 20, 40, 60, 80] {
                assert!(now.contains(&(i, j)), "integer point ({i},{j}) at rho={rho}");
            }
        }
        if let Some(prev) = &previous {
            assert!(now.is_subset(prev), "rho={rho}");
        }
        previous = Some(now);
    }
}

#[test]
fn counter_averages_converge() {
    let rule = Arc::new(bundled::example2());
    for n in 1..=4u32 {
        for big in n + 1..=10 {
            let p = Patch::build(Arc::clone(&rule), 0, big, DEFAULT_TILE_BUDGET).unwrap();
            let avg = rs_average(&CochainSpec::<Rational>::bottom_row_counter(n), &p).unwrap();
            assert!(avg.x.is_zero());
            let err = (avg.y.clone() - Rational::ratio(1, 1 << n)).approx().abs();
            assert!(err <= (1u64 << n) as f64 / p.height() as f64, "n={n} N={big}: {}", avg.y);
        }
    }
}

#[test]
fn table_cochains_report_missing_patterns() {
    let p = build_supertile(&bundled::frank_dpv(), "a", 4).unwrap();
    let empty = CochainSpec::<Rational>::table(1, HashMap::new());
    assert!(rs_average(&empty, &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_average_is_exact(mu in -20i64..20, nu in -20i64..20, q in 1i64..9, t in 0usize..4, n in 1u32..=5) {
        let rule = Arc::new(bundled::frank_dpv());
        let p = Patch::build(rule, t, n, DEFAULT_TILE_BUDGET).unwrap();
        let c = CochainSpec::linear(Rational::ratio(mu, q), Rational::ratio(nu, q));
        let avg = rs_average(&c, &p).unwrap();
        prop_assert_eq!((avg.x, avg.y), (Rational::ratio(mu, q), Rational::ratio(nu, q)));
    }

    #[test]
    fn integrality_matches_the_multiplier_lattice(num in 1i64..30, den in 1i64..30, rho in 0u32..=2) {
        let p = build_supertile(&bundled::frank_dpv(), "a", 4).unwrap();
        let xs: Vec<BigInt> = return_vectors(&p, rho, u64::MAX)
            .unwrap()
            .vectors
            .iter()
            .filter(|v| v.0 > 0)
            .map(|v| BigInt::from(v.0))
            .collect();
        let g = integer_multiplier_lattice(&xs).unwrap();
        let mu = Rational::ratio(num, den);
        let report = integrality_check(&CochainSpec::linear(mu.clone(), Rational::zero()), &p, rho).unwrap();
        prop_assert_eq!(report.passed(), (mu * Rational::from_integer(g)).is_integer());
    }
}
