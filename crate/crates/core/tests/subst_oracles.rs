use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use tilescope_core::bundled;
use tilescope_core::fusion::{build_supertile, Side};
use tilescope_core::subst::{eigenvalues, h1_report, two_letter_words, IntMatrix, IntPoly, Letter, Substitution};

/// Leibniz expansion of `det(x·I − A)`.
fn leibniz_char_value(a: &[Vec<i64>], x: i64) -> BigInt {
    let n = a.len();
    let entry = |i: usize, j: usize| BigInt::from(if i == j { x } else { 0 } - a[i][j]);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = BigInt::zero();
    fn visit(k: usize, perm: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if k == perm.len() {
            f(perm);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            visit(k + 1, perm, f);
            perm.swap(k, i);
        }
    }
    visit(0, &mut perm, &mut |p| {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let mut term: BigInt = (0..n).map(|i| entry(i, p[i])).product();
        if inversions % 2 == 1 {
            term = -term;
        }
        total += term;
    });
    total
}

/// Rank by Gaussian elimination over the rationals.
fn rational_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                let pivot = m[rank].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-3i64..=4, n), n))
}

/// Substitutions on 2–4 letters with nonempty images of length ≤ 4.
fn substitution_strategy() -> impl Strategy<Value = Substitution> {
    (2usize..=4).prop_flat_map(|k| {
        prop::collection::vec(prop::collection::vec(0..k as Letter, 1..=4), k).prop_map(move |images| {
            let alphabet = (0..k).map(|i| (b'a' + i as u8) as char).collect();
            Substitution::new(alphabet, images).expect("valid substitution")
        })
    })
}

proptest! {
    #[test]
    fn char_poly_matches_leibniz(a in matrix_strategy()) {
        let m = IntMatrix::from_rows(&a);
        let p = m.char_poly();
        prop_assert_eq!(p.degree(), a.len());
        for x in -3..=3 {
            prop_assert_eq!(p.eval(&BigInt::from(x)), leibniz_char_value(&a, x));
        }
        prop_assert_eq!(m.rank(), rational_rank(&m.rows()));
    }

    #[test]
    fn two_letter_words_match_iterates(s in substitution_strategy(), seed in 0u8..4) {
        let seed = seed % s.len() as Letter;
        let fast = two_letter_words(&s, seed);
        // oracle: pairs read off σᵏ(seed), k ≥ 1, until the (letters, pairs)
        // state of the iterate repeats
        let mut word = s.iterate(&[seed], 1).unwrap();
        let mut seen_states = HashSet::new();
        let mut brute = BTreeSet::new();
        let mut complete = false;
        while word.len() <= 2_000_000 {
            let letters: BTreeSet<Letter> = word.iter().copied().collect();
            let pairs: BTreeSet<(Letter, Letter)> = word.windows(2).map(|w| (w[0], w[1])).collect();
            brute.extend(pairs.iter().copied());
            if !seen_states.insert((letters, pairs)) {
                complete = true;
                break;
            }
            word = word.iter().flat_map(|&l| s.image(l).iter().copied()).collect();
        }
        prop_assert!(brute.is_subset(&fast));
        if complete {
            prop_assert_eq!(brute, fast);
        }
    }

    #[test]
    fn h1_bookkeeping_on_random_substitutions(s in substitution_strategy()) {
        let report = h1_report(&s, 0).unwrap();
        let at = s.abelianization().transpose();
        prop_assert_eq!(report.stable_rank, rational_rank(&at.pow(20).rows()));
        prop_assert_eq!(report.rank, rational_rank(&report.matrix.rows()));
        prop_assert_eq!(
            report.h1_rank + report.reduced_components,
            report.stable_rank + report.graph.cycles
        );
        prop_assert!(report.an_dimension <= report.stable_rank + report.graph.cycles);
    }
}

fn nonzero_eigen_count(p: &IntPoly) -> usize {
    eigenvalues::<f64>(p, 1e-9)
        .unwrap()
        .iter()
        .filter(|r| r.exact.as_ref().is_none_or(|q| !q.is_zero()))
        .map(|r| r.multiplicity)
        .sum()
}

#[test]
fn nonzero_eigenvalues_count_the_stable_rank() {
    for name in bundled::SUBST_NAMES {
        let s = bundled::substitution(name).unwrap();
        let m = s.abelianization();
        assert_eq!(nonzero_eigen_count(&m.char_poly()), m.stable_rank(), "{name}");
    }
}

#[test]
fn north_substitution_spectrum() {
    let s = bundled::north();
    let m = s.abelianization();
    assert_eq!(m.char_poly(), IntPoly::from_i64(&[0, -3, -4, 0, 1]));
    assert_eq!(m.rank(), 3);
    let roots = eigenvalues::<f64>(&m.char_poly(), 1e-9).unwrap();
    let r13 = 13f64.sqrt();
    for want in [(1.0 + r13) / 2.0, (1.0 - r13) / 2.0, -1.0, 0.0] {
        assert!(roots.iter().any(|r| (r.value.re - want).abs() < 1e-9 && r.value.im.abs() < 1e-9), "{want}");
    }
}

#[test]
fn boundary_substitutions_match_bundled_files() {
    let rule = bundled::frank_dpv();
    let (north, south) = (bundled::north(), bundled::south());
    for n in 0..=7 {
        for t in ["a", "b", "c", "d"] {
            let p = build_supertile(&rule, t, n + 1).unwrap();
            let render = |side| -> String {
                p.boundary_word(side, n).unwrap().iter().map(|&(l, _)| rule.label_name(l).chars().next().unwrap()).collect()
            };
            let letter = north.letter(t.chars().next().unwrap()).unwrap();
            assert_eq!(render(Side::Bottom), north.render(north.image(letter)), "bottom of P_{}({t})", n + 1);
            assert_eq!(render(Side::Top), south.render(south.image(letter)), "top of P_{}({t})", n + 1);
        }
    }
}

#[test]
fn iterate_lengths_follow_the_width_recurrence() {
    let s = bundled::north();
    let (a, d) = (s.letter('a').unwrap(), s.letter('d').unwrap());
    let (mut w, mut v) = (BigInt::one(), BigInt::one());
    for n in 0..=30u32 {
        assert_eq!(s.iterate_len(&[a], n), w, "n={n}");
        assert_eq!(s.iterate_len(&[d], n), v, "n={n}");
        assert!(w.is_positive());
        (w, v) = (&w + BigInt::from(3) * &v, w);
    }
}
