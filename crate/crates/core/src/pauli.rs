//! Pauli-word algebra and the spectral decomposition of Hermitian matrices.
//!
//! A word on `n` qubits is stored as two bitmasks: bit `i - 1` of `x` is set
//! when qubit `i` carries X or Y, bit `i - 1` of `z` when it carries Z or Y.
//! Acting on a computational basis state,
//!
//! ```text
//! σ |b⟩ = i^{#Y} (-1)^{popcount(b & z)} |b ^ x⟩
//! ```
//!
//! which is all the decomposition and expectation code needs.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tightbinding::{BlochHamiltonian, KPoint};

/// Coefficients smaller than this are dropped from a decomposition.
pub const PRUNE_TOL: f64 = 1e-14;

/// Largest register the dense decomposition accepts (4^n words).
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn digit(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// 2×2 matrix of the single-qubit operator.
    pub fn matrix(self) -> DMatrix<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }
}

/// Tensor product of single-qubit Paulis on `n` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliWord {
    n: usize,
    x: u32,
    z: u32,
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        Self { n, x: 0, z: 0 }
    }

    /// Builds a word from letters listed for qubits `1..=n` in that order.
    pub fn from_qubit_letters(letters: &[Pauli]) -> Self {
        let mut word = Self::identity(letters.len());
        for (i, &p) in letters.iter().enumerate() {
            let (x, z) = p.bits();
            word.x |= (x as u32) << i;
            word.z |= (z as u32) << i;
        }
        word
    }

    /// Word with a single non-identity letter on `qubit` (1-based).
    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[qubit - 1] = letter;
        Self::from_qubit_letters(&letters)
    }

    /// Inverse of [`PauliWord::index`].
    pub fn from_index(n: usize, mut index: usize) -> Self {
        let mut letters = vec![Pauli::I; n];
        for letter in letters.iter_mut() {
            *letter = Pauli::ALL[index % 4];
            index /= 4;
        }
        Self::from_qubit_letters(&letters)
    }

    /// All 4^n words in index order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliWord> {
        (0..1usize << (2 * n)).map(move |i| PauliWord::from_index(n, i))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u32 {
        self.x
    }

    pub fn z_mask(&self) -> u32 {
        self.z
    }

    /// Letter on `qubit` (1-based; qubit 1 is the rightmost character).
    pub fn letter(&self, qubit: usize) -> Pauli {
        let bit = 1u32 << (qubit - 1);
        Pauli::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    /// Letters for qubits `1..=n`.
    pub fn letters(&self) -> Vec<Pauli> {
        (1..=self.n).map(|q| self.letter(q)).collect()
    }

    /// Base-4 position with qubit `n` as the most significant digit, so
    /// index order equals lexicographic order of the printed string.
    pub fn index(&self) -> usize {
        (1..=self.n)
            .rev()
            .fold(0, |acc, q| acc * 4 + self.letter(q).digit())
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// True when the word contains only I and Z.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `i^{#Y}` prefactor of the word.
    fn y_phase(&self) -> Complex64 {
        match self.y_count() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Image of basis state `b`: `σ|b⟩ = phase |b'⟩`.
    pub fn apply_to_basis(&self, b: usize) -> (usize, Complex64) {
        let sign = if (b as u32 & self.z).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        (b ^ self.x as usize, self.y_phase() * sign)
    }

    /// Dense 2^n × 2^n matrix.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for col in 0..dim {
            let (row, phase) = self.apply_to_basis(col);
            m[(row, col)] = phase;
        }
        m
    }
}

impl Ord for PauliWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.index().cmp(&other.index()))
    }
}

impl PartialOrd for PauliWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (1..=self.n).rev() {
            write!(f, "{}", self.letter(q).symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    /// Parses a string such as `"IXZ"`; the rightmost character is qubit 1.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.chars().count() > 32 {
            return Err(Error::InvalidPauliWord(s.to_string()));
        }
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars().rev() {
            letters.push(match c.to_ascii_uppercase() {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::InvalidPauliWord(s.to_string())),
            });
        }
        Ok(Self::from_qubit_letters(&letters))
    }
}

/// Real coefficients of a Hermitian operator over the Pauli basis.
/// Absent words have coefficient zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    n: usize,
    coeffs: BTreeMap<PauliWord, f64>,
    pub kpoint: Option<KPoint>,
}

impl SpectralDecomposition {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
            kpoint: None,
        }
    }

    /// Builds a decomposition from `(word, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliWord, f64)>,
    {
        let mut d = Self::new(n);
        for (word, c) in terms {
            if word.num_qubits() != n {
                return Err(Error::QubitMismatch {
                    expected: n,
                    actual: word.num_qubits(),
                });
            }
            *d.coeffs.entry(word).or_insert(0.0) += c;
        }
        d.prune();
        Ok(d)
    }

    /// Convenience for tests and examples: `&[("IZ", 0.5), ...]`.
    pub fn from_strs(terms: &[(&str, f64)]) -> Result<Self> {
        let mut parsed = Vec::with_capacity(terms.len());
        for (s, c) in terms {
            parsed.push((s.parse::<PauliWord>()?, *c));
        }
        let n = parsed.first().map(|(w, _)| w.num_qubits()).unwrap_or(1);
        Self::from_terms(n, parsed)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, word: &PauliWord) -> f64 {
        self.coeffs.get(word).copied().unwrap_or(0.0)
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.coefficient(&PauliWord::identity(self.n))
    }

    /// Non-zero terms in word order.
    pub fn terms(&self) -> impl Iterator<Item = (&PauliWord, f64)> {
        self.coeffs.iter().map(|(w, c)| (w, *c))
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.abs() >= PRUNE_TOL);
    }

    /// `c_i = Tr(H† σ_i) / 2^n` for every word.
    pub fn decompose(h: &BlochHamiltonian) -> Result<Self> {
        h.check_hermitian(1e-9)?;
        let dim = h.dim();
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::InvalidPauliWord(format!(
                "{n}-qubit decomposition exceeds the {MAX_QUBITS}-qubit limit"
            )));
        }
        let m = &h.matrix;
        let norm = dim as f64;
        let mut coeffs = BTreeMap::new();
        for word in PauliWord::all(n) {
            // Tr(H† σ) = Σ_c conj(H[r, c]) σ[r, c] with r = c ^ x.
            let mut trace = Complex64::new(0.0, 0.0);
            for col in 0..dim {
                let (row, phase) = word.apply_to_basis(col);
                trace += m[(row, col)].conj() * phase;
            }
            let c = trace.re / norm;
            if c.abs() >= PRUNE_TOL {
                coeffs.insert(word, c);
            }
        }
        Ok(Self {
            n,
            coeffs,
            kpoint: h.kpoint.clone(),
        })
    }

    /// Largest imaginary part of `Tr(H† σ_i) / 2^n` over all words.
    /// Zero up to rounding for Hermitian input.
    pub fn imaginary_residue(h: &BlochHamiltonian) -> f64 {
        let dim = h.dim();
        let n = dim.trailing_zeros() as usize;
        PauliWord::all(n)
            .map(|word| {
                let mut trace = Complex64::new(0.0, 0.0);
                for col in 0..dim {
                    let (row, phase) = word.apply_to_basis(col);
                    trace += h.matrix[(row, col)].conj() * phase;
                }
                (trace.im / dim as f64).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Dense matrix `Σ c_i σ_i`.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (word, c) in self.terms() {
            for col in 0..dim {
                let (row, phase) = word.apply_to_basis(col);
                m[(row, col)] += phase * c;
            }
        }
        m
    }

    pub fn reconstruct(&self) -> BlochHamiltonian {
        BlochHamiltonian {
            matrix: self.to_matrix(),
            kpoint: self.kpoint.clone(),
        }
    }

    /// Subtracts `s` times the identity. Only the identity coefficient moves.
    pub fn shift_identity(&self, s: f64) -> Self {
        let mut out = self.clone();
        if s != 0.0 {
            *out.coeffs.entry(PauliWord::identity(self.n)).or_insert(0.0) -= s;
            out.prune();
        }
        out
    }

    /// `c'_i = c_i - ε0 ⟨σ_i⟩ / 2^n`, i.e. `H' = H - ε0 |ψ0⟩⟨ψ0|` when the
    /// expectations are taken in `|ψ0⟩`.
    ///
    /// Every one of the 4^n words must have an expectation unless `ε0 == 0`.
    pub fn deflate(&self, eps0: f64, expectations: &BTreeMap<PauliWord, f64>) -> Result<Self> {
        if eps0 == 0.0 {
            return Ok(self.clone());
        }
        let norm = self.dim() as f64;
        let mut out = self.clone();
        for word in PauliWord::all(self.n) {
            let e = expectations
                .get(&word)
                .ok_or_else(|| Error::MissingExpectation(word.to_string()))?;
            *out.coeffs.entry(word).or_insert(0.0) -= eps0 * e / norm;
        }
        out.prune();
        Ok(out)
    }

    /// `Σ c_i ⟨σ_i⟩` from a table of word expectations; absent words count as 0.
    pub fn energy_from_expectations(&self, expectations: &BTreeMap<PauliWord, f64>) -> f64 {
        self.terms()
            .map(|(w, c)| c * expectations.get(w).copied().unwrap_or(0.0))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn word_string_roundtrip_and_convention() {
        let w: PauliWord = "IZZIZ".parse().unwrap();
        assert_eq!(w.num_qubits(), 5);
        assert_eq!(w.letter(1), Pauli::Z);
        assert_eq!(w.letter(2), Pauli::I);
        assert_eq!(w.letter(5), Pauli::I);
        assert_eq!(w.to_string(), "IZZIZ");
        assert!(w.is_diagonal());
        assert_eq!(w.weight(), 3);
        assert!("IXQ".parse::<PauliWord>().is_err());
        assert!("".parse::<PauliWord>().is_err());
    }

    #[test]
    fn index_order_is_lexicographic() {
        let words: Vec<String> = PauliWord::all(2).map(|w| w.to_string()).collect();
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
        assert_eq!(words.len(), 16);
        for (i, w) in PauliWord::all(3).enumerate() {
            assert_eq!(w.index(), i);
        }
    }

    #[test]
    fn multi_qubit_matrix_is_kronecker_with_qubit_one_last() {
        // "XZ" = X (qubit 2) ⊗ Z (qubit 1)
        let w: PauliWord = "XZ".parse().unwrap();
        let x = Pauli::X.matrix();
        let z = Pauli::Z.matrix();
        assert_eq!(w.matrix(), x.kronecker(&z));
        let y: PauliWord = "Y".parse().unwrap();
        assert_eq!(y.matrix(), Pauli::Y.matrix());
    }

    #[test]
    fn decompose_z() {
        let h = BlochHamiltonian::from_real_diagonal(&[1.0, -1.0]);
        let d = SpectralDecomposition::decompose(&h).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.coefficient(&"Z".parse().unwrap()), 1.0);
    }

    #[test]
    fn decompose_identity() {
        let h = BlochHamiltonian::from_real_diagonal(&[1.0, 1.0]);
        let d = SpectralDecomposition::decompose(&h).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.identity_coefficient(), 1.0);
    }

    #[test]
    fn decompose_general_2x2() {
        let (a, b, cc, dd) = (0.7, -1.3, 0.4, 2.2);
        let m = DMatrix::from_row_slice(2, 2, &[c(a, 0.0), c(b, -cc), c(b, cc), c(dd, 0.0)]);
        let d = SpectralDecomposition::decompose(&BlochHamiltonian::new(m).unwrap()).unwrap();
        let get = |s: &str| d.coefficient(&s.parse().unwrap());
        assert!((get("I") - (a + dd) / 2.0).abs() < 1e-15);
        assert!((get("X") - b).abs() < 1e-15);
        assert!((get("Y") - cc).abs() < 1e-15);
        assert!((get("Z") - (a - dd) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn decompose_rejects_non_power_of_two() {
        let h = BlochHamiltonian::from_real_diagonal(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            SpectralDecomposition::decompose(&h),
            Err(Error::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn reconstruct_simple() {
        let d = SpectralDecomposition::from_strs(&[("Z", 1.0)]).unwrap();
        assert_eq!(d.to_matrix(), Pauli::Z.matrix());
        let empty = SpectralDecomposition::new(2);
        assert!(empty.to_matrix().iter().all(|v| v.norm() == 0.0));
        assert_eq!(empty.to_matrix().nrows(), 4);
    }

    #[test]
    fn shift_moves_only_identity() {
        let d = SpectralDecomposition::from_strs(&[("Z", 1.0)]).unwrap();
        let s = d.shift_identity(2.0);
        assert_eq!(s.identity_coefficient(), -2.0);
        assert_eq!(s.coefficient(&"Z".parse().unwrap()), 1.0);
        assert_eq!(s.len(), 2);
        let diag: Vec<f64> = (0..2).map(|i| s.to_matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![-1.0, -3.0]);
        assert_eq!(d.shift_identity(0.0), d);
    }

    #[test]
    fn deflate_single_qubit_by_hand() {
        // H' = Z - (-1)|1><1| = diag(1, 0)
        let d = SpectralDecomposition::from_strs(&[("Z", 1.0)]).unwrap();
        let mut ex = BTreeMap::new();
        for (s, v) in [("I", 1.0), ("X", 0.0), ("Y", 0.0), ("Z", -1.0)] {
            ex.insert(s.parse().unwrap(), v);
        }
        let out = d.deflate(-1.0, &ex).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out.identity_coefficient() - 0.5).abs() < 1e-15);
        assert!((out.coefficient(&"Z".parse().unwrap()) - 0.5).abs() < 1e-15);
        let m = out.to_matrix();
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-15 && m[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn deflate_with_zero_energy_is_identity() {
        let d = SpectralDecomposition::from_strs(&[("XZ", 0.3), ("YY", -1.2)]).unwrap();
        assert_eq!(d.deflate(0.0, &BTreeMap::new()).unwrap(), d);
    }

    #[test]
    fn deflate_requires_every_expectation() {
        let d = SpectralDecomposition::from_strs(&[("Z", 1.0)]).unwrap();
        let mut ex = BTreeMap::new();
        ex.insert("I".parse().unwrap(), 1.0);
        ex.insert("Z".parse().unwrap(), -1.0);
        assert!(matches!(
            d.deflate(-1.0, &ex),
            Err(Error::MissingExpectation(w)) if w == "X"
        ));
    }

    #[test]
    fn pauli_orthogonality_exhaustive() {
        for n in 1..=3 {
            let mats: Vec<_> = PauliWord::all(n).map(|w| w.matrix()).collect();
            let dim = (1usize << n) as f64;
            for (i, a) in mats.iter().enumerate() {
                for (j, b) in mats.iter().enumerate() {
                    let tr = (a.adjoint() * b).trace();
                    let want = if i == j { dim } else { 0.0 };
                    assert!((tr - c(want, 0.0)).norm() < 1e-12, "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn mismatched_terms_rejected() {
        let r = SpectralDecomposition::from_terms(
            2,
            vec![("Z".parse::<PauliWord>().unwrap(), 1.0)],
        );
        assert!(matches!(r, Err(Error::QubitMismatch { .. })));
    }
}
