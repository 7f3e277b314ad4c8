mod common;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use common::{c, kron_word, max_abs_diff};
use qband::{BlochHamiltonian, PauliWord, SpectralDecomposition};

fn hermitian(n: usize, entries: &[f64]) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let a = DMatrix::from_fn(dim, dim, |i, j| c(entries[2 * (i * dim + j)], entries[2 * (i * dim + j) + 1]));
    &a + a.adjoint()
}

fn hermitian_strategy() -> impl Strategy<Value = (usize, DMatrix<Complex64>)> {
    (1usize..=3).prop_flat_map(|n| {
        let len = 2 * (1 << n) * (1 << n);
        prop::collection::vec(-5.0..5.0f64, len).prop_map(move |v| (n, hermitian(n, &v)))
    })
}

#[test]
fn word_matrices_match_kronecker_products() {
    for n in 1..=3 {
        for w in common::all_words(n) {
            let word: PauliWord = w.parse().unwrap();
            assert_eq!(word.to_string(), w);
            assert!(max_abs_diff(&word.matrix(), &kron_word(&w)) == 0.0, "{w}");
        }
    }
}

#[test]
fn two_by_two_closed_form_on_random_entries() {
    let mut rng = common::rng(3);
    for _ in 0..200 {
        use rand::Rng;
        let (a, b, cc, d): (f64, f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen(), rng.gen());
        let m = DMatrix::from_row_slice(2, 2, &[c(a, 0.0), c(b, -cc), c(b, cc), c(d, 0.0)]);
        let dec = SpectralDecomposition::decompose(&BlochHamiltonian::new(m).unwrap()).unwrap();
        let coef = |s: &str| dec.coefficient(&s.parse().unwrap());
        assert!((coef("I") - (a + d) / 2.0).abs() < 1e-14);
        assert!((coef("X") - b).abs() < 1e-14);
        assert!((coef("Y") - cc).abs() < 1e-14);
        assert!((coef("Z") - (a - d) / 2.0).abs() < 1e-14);
    }
}

#[test]
fn empty_decomposition_reconstructs_to_zero() {
    let d = SpectralDecomposition::new(2);
    assert!(d.to_matrix().iter().all(|z| *z == c(0.0, 0.0)));
    assert_eq!(d.to_matrix().nrows(), 4);
}

#[test]
fn gershgorin_shift_makes_every_level_negative() {
    let mut rng = common::rng(8);
    for n in 1..=3 {
        for _ in 0..20 {
            let h = BlochHamiltonian::new(common::random_hermitian(1 << n, &mut rng)).unwrap();
            let d = SpectralDecomposition::decompose(&h).unwrap();
            let shifted = d.shift_identity(h.gershgorin_upper_bound());
            let ev = common::jacobi_hermitian(&shifted.to_matrix());
            assert!(ev.iter().all(|&e| e <= 1e-12), "{ev:?}");
        }
    }
}

/// Random unitary from the QR factorisation of a random complex matrix.
fn random_unitary(dim: usize, rng: &mut impl rand::Rng) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    a.qr().q()
}

fn oracle_expectations(psi: &[Complex64], n: usize) -> BTreeMap<PauliWord, f64> {
    common::all_words(n)
        .into_iter()
        .map(|w| {
            let m = kron_word(&w);
            let v = nalgebra::DVector::from_column_slice(psi);
            let e = (v.adjoint() * &m * &v)[(0, 0)].re;
            (w.parse().unwrap(), e)
        })
        .collect()
}

#[test]
fn deflating_an_exact_pair_zeroes_only_that_level() {
    let mut rng = common::rng(19);
    for n in [1, 2, 3] {
        let dim = 1 << n;
        for trial in 0..10 {
            use rand::Rng;
            let u = random_unitary(dim, &mut rng);
            let mut levels: Vec<f64> = (0..dim).map(|_| rng.gen_range(-9.0..-1.0)).collect();
            levels.sort_by(|a, b| a.total_cmp(b));
            let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, levels.iter().map(|&e| c(e, 0.0))));
            let h = &u * lam * u.adjoint();
            let d = SpectralDecomposition::decompose(&BlochHamiltonian::new(h).unwrap()).unwrap();

            let j = trial % dim;
            let psi: Vec<Complex64> = u.column(j).iter().copied().collect();
            let deflated = d.deflate(levels[j], &oracle_expectations(&psi, n)).unwrap();

            let mut expected = levels.clone();
            expected[j] = 0.0;
            expected.sort_by(|a, b| a.total_cmp(b));
            let got = common::jacobi_hermitian(&deflated.to_matrix());
            for (g, e) in got.iter().zip(&expected) {
                assert!((g - e).abs() < 1e-10, "n={n}: {got:?} vs {expected:?}");
            }
        }
    }
}

proptest! {
    #[test]
    fn round_trip_is_identity((_n, h) in hermitian_strategy()) {
        let d = SpectralDecomposition::decompose(&BlochHamiltonian::new(h.clone()).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&d.to_matrix(), &h) <= 1e-12);
        prop_assert!(d.len() <= h.nrows() * h.nrows());
        prop_assert!(d.terms().all(|(_, c)| c.is_finite() && c.abs() >= qband::pauli::PRUNE_TOL));
    }

    #[test]
    fn coefficients_have_no_imaginary_part((_n, h) in hermitian_strategy()) {
        prop_assert!(SpectralDecomposition::imaginary_residue(&BlochHamiltonian::new(h).unwrap()) < 1e-13);
    }

    #[test]
    fn decomposition_is_linear(
        (n, h1) in hermitian_strategy(),
        seed in any::<u64>(),
        alpha in -3.0..3.0f64,
        beta in -3.0..3.0f64,
    ) {
        let h2 = common::random_hermitian(1 << n, &mut common::rng(seed));
        let combo = h1.map(|z| z * alpha) + h2.map(|z| z * beta);
        let d = |m: DMatrix<Complex64>| SpectralDecomposition::decompose(&BlochHamiltonian::new(m).unwrap()).unwrap();
        let (d1, d2, dc) = (d(h1), d(h2), d(combo));
        for w in PauliWord::all(n) {
            let lhs = dc.coefficient(&w);
            let rhs = alpha * d1.coefficient(&w) + beta * d2.coefficient(&w);
            prop_assert!((lhs - rhs).abs() <= 1e-12, "{}: {} vs {}", w, lhs, rhs);
        }
    }

    #[test]
    fn shift_lowers_every_level_by_s((n, h) in hermitian_strategy(), s in -20.0..20.0f64) {
        let d = SpectralDecomposition::decompose(&BlochHamiltonian::new(h.clone()).unwrap()).unwrap();
        let shifted = d.shift_identity(s);
        for w in PauliWord::all(n).filter(|w| !w.is_identity()) {
            prop_assert_eq!(shifted.coefficient(&w), d.coefficient(&w));
        }
        let before = common::jacobi_hermitian(&h);
        let after = common::jacobi_hermitian(&shifted.to_matrix());
        for (a, b) in after.iter().zip(&before) {
            prop_assert!((a - (b - s)).abs() <= 1e-9);
        }
    }
}
