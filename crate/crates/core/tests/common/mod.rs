//! Reference implementations shared by the integration tests. Nothing here
//! calls into the library's own numerics.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1]` (real and imaginary), then `A + A†`.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    &a + a.adjoint()
}

/// Cyclic Jacobi on a real symmetric matrix; eigenvalues ascending.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_symmetric(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Hermitian eigenvalues through the real embedding `[[Re, -Im], [Im, Re]]`,
/// whose spectrum is that of `h` with every value doubled.
pub fn jacobi_hermitian(h: &DMatrix<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    jacobi_symmetric(a).into_iter().step_by(2).collect()
}

pub fn pauli_2x2(letter: char) -> DMatrix<Complex64> {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match letter {
        'I' => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        'X' => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => panic!("not a Pauli letter: {letter}"),
    }
}

/// Matrix of a word written with the highest qubit on the left, built as the
/// Kronecker product of its letters in written order.
pub fn kron_word(word: &str) -> DMatrix<Complex64> {
    word.chars()
        .fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, ch| acc.kronecker(&pauli_2x2(ch)))
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// All `4^n` words over `IXYZ`, written highest qubit first.
pub fn all_words(n: usize) -> Vec<String> {
    (0..4usize.pow(n as u32))
        .map(|mut idx| {
            let mut s = vec!['I'; n];
            for pos in (0..n).rev() {
                s[pos] = ['I', 'X', 'Y', 'Z'][idx % 4];
                idx /= 4;
            }
            s.into_iter().collect()
        })
        .collect()
}
