//! Exact statevector backend.
//!
//! Amplitude `b` belongs to the computational basis state whose bit `i - 1`
//! is the value of qubit `i`. Gates follow the usual conventions:
//! `RY(θ) = exp(-iθY/2)`, `RZ(φ) = exp(-iφZ/2)`, `S = diag(1, i)`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliWord, SpectralDecomposition};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Normalised complex amplitudes over 2^n basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Self { n, amps }
    }

    /// Normalises `amps`; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidCounts("state has zero norm".into()));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    fn check_qubit(&self, q: usize) -> Result<u32> {
        if q == 0 || q > self.n {
            return Err(Error::QubitOutOfRange {
                index: q,
                n: self.n,
            });
        }
        Ok(q as u32 - 1)
    }

    fn apply_single(&mut self, q: usize, u: [[Complex64; 2]; 2]) -> Result<()> {
        let bit = 1usize << self.check_qubit(q)?;
        for i0 in 0..self.amps.len() {
            if i0 & bit != 0 {
                continue;
            }
            let i1 = i0 | bit;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[i1] = u[1][0] * a0 + u[1][1] * a1;
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        match *gate {
            Gate::Cnot { control, target } => {
                let c = 1usize << self.check_qubit(control)?;
                let t = 1usize << self.check_qubit(target)?;
                if control == target {
                    return Err(Error::SameControlTarget(control));
                }
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
                Ok(())
            }
            _ => {
                let (q, u) = gate.single_qubit_matrix().expect("single-qubit gate");
                self.apply_single(q, u)
            }
        }
    }

    pub fn apply_all<'a, I>(&mut self, gates: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a Gate>,
    {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// `⟨ψ|σ|ψ⟩` for one Pauli word.
    pub fn pauli_expectation(&self, word: &PauliWord) -> Result<f64> {
        if word.num_qubits() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                actual: word.num_qubits(),
            });
        }
        let mut acc = ZERO;
        for (b, amp) in self.amps.iter().enumerate() {
            let (image, phase) = word.apply_to_basis(b);
            acc += self.amps[image].conj() * phase * amp;
        }
        Ok(acc.re)
    }

    /// `Σ c_i ⟨ψ|σ_i|ψ⟩`.
    pub fn exact_expectation(&self, decomp: &SpectralDecomposition) -> Result<f64> {
        if decomp.num_qubits() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                actual: decomp.num_qubits(),
            });
        }
        let mut e = 0.0;
        for (word, c) in decomp.terms() {
            e += c * self.pauli_expectation(word)?;
        }
        Ok(e)
    }

    /// `⟨σ_i⟩` for all 4^n words, identity included.
    pub fn exact_pauli_expectations(&self) -> BTreeMap<PauliWord, f64> {
        PauliWord::all(self.n)
            .map(|w| {
                let e = self.pauli_expectation(&w).expect("word width matches state");
                (w, e)
            })
            .collect()
    }

    /// `⟨ψ|M|ψ⟩` for a dense Hermitian matrix (real part).
    pub fn matrix_expectation(&self, m: &DMatrix<Complex64>) -> f64 {
        let dim = self.amps.len();
        let mut acc = ZERO;
        for r in 0..dim {
            let mut row = ZERO;
            for c in 0..dim {
                row += m[(r, c)] * self.amps[c];
            }
            acc += self.amps[r].conj() * row;
        }
        acc.re
    }

    /// `‖M|ψ⟩ - λ|ψ⟩‖`, how far the state is from an eigenvector of `M`.
    pub fn eigen_residual(&self, m: &DMatrix<Complex64>, lambda: f64) -> f64 {
        let dim = self.amps.len();
        (0..dim)
            .map(|r| {
                let mut row = -self.amps[r] * lambda;
                for c in 0..dim {
                    row += m[(r, c)] * self.amps[c];
                }
                row.norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Elementary gates. Qubit indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    H(usize),
    S(usize),
    Z(usize),
    X(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    fn single_qubit_matrix(&self) -> Option<(usize, [[Complex64; 2]; 2])> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Some(match *self {
            Gate::Ry { qubit, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let (s, c) = (Complex64::new(s, 0.0), Complex64::new(c, 0.0));
                (qubit, [[c, -s], [s, c]])
            }
            Gate::Rz { qubit, angle } => (
                qubit,
                [
                    [Complex64::from_polar(1.0, -angle / 2.0), ZERO],
                    [ZERO, Complex64::from_polar(1.0, angle / 2.0)],
                ],
            ),
            Gate::H(q) => (q, [[h, h], [h, -h]]),
            Gate::S(q) => (q, [[ONE, ZERO], [ZERO, I]]),
            Gate::Z(q) => (q, [[ONE, ZERO], [ZERO, -ONE]]),
            Gate::X(q) => (q, [[ZERO, ONE], [ONE, ZERO]]),
            Gate::Cnot { .. } => return None,
        })
    }

    /// 2×2 unitary of a single-qubit gate, `None` for CNOT.
    pub fn matrix(&self) -> Option<DMatrix<Complex64>> {
        self.single_qubit_matrix()
            .map(|(_, u)| DMatrix::from_row_slice(2, 2, &[u[0][0], u[0][1], u[1][0], u[1][1]]))
    }
}

/// Parameterised trial circuits.
///
/// `ThreeQubit` is a mirrored twelve-parameter circuit:
///
/// ```text
/// RY(θ1..θ3)  CNOT(1→2) CNOT(2→3)
/// RY(θ4..θ6)  RZ(θ7..θ9)
/// CNOT(2→3) CNOT(1→2)  RY(θ10..θ12)
/// ```
///
/// Twelve angles cannot reach every three-qubit state (that manifold has
/// fourteen real dimensions), but this layout does reach the eigenvectors of
/// the sp³ Bloch Hamiltonians. `Layered` stacks hardware-efficient layers
/// `RY×3, RZ×3, CNOT(1→2), CNOT(2→3)` and becomes universal from three layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ansatz {
    /// One qubit, `RY(θ)` then `RZ(φ)`; parameters `[θ, φ]`.
    MeanField,
    ThreeQubit,
    /// Three qubits, `6 * layers` parameters.
    Layered { layers: usize },
}

fn ry_layer(gates: &mut Vec<Gate>, angles: &[f64]) {
    for (q, &angle) in angles.iter().enumerate() {
        gates.push(Gate::Ry { qubit: q + 1, angle });
    }
}

fn rz_layer(gates: &mut Vec<Gate>, angles: &[f64]) {
    for (q, &angle) in angles.iter().enumerate() {
        gates.push(Gate::Rz { qubit: q + 1, angle });
    }
}

fn cnot(control: usize, target: usize) -> Gate {
    Gate::Cnot { control, target }
}

impl Ansatz {
    pub fn name(&self) -> &'static str {
        match self {
            Ansatz::MeanField => "mean-field",
            Ansatz::ThreeQubit => "three-qubit",
            Ansatz::Layered { .. } => "layered",
        }
    }

    pub fn num_params(&self) -> usize {
        match self {
            Ansatz::MeanField => 2,
            Ansatz::ThreeQubit => 12,
            Ansatz::Layered { layers } => 6 * layers,
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            Ansatz::MeanField => 1,
            Ansatz::ThreeQubit | Ansatz::Layered { .. } => 3,
        }
    }

    /// Default ansatz for a register of `n` qubits.
    pub fn for_qubits(n: usize) -> Option<Self> {
        match n {
            1 => Some(Ansatz::MeanField),
            3 => Some(Ansatz::ThreeQubit),
            _ => None,
        }
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return Err(Error::ParameterCount {
                kind: self.name(),
                expected: self.num_params(),
                actual: params.len(),
            });
        }
        Ok(())
    }

    /// Gate sequence applied to `|0...0⟩`.
    pub fn gates(&self, params: &[f64]) -> Result<Vec<Gate>> {
        self.check_params(params)?;
        let mut gates = Vec::new();
        match self {
            Ansatz::MeanField => {
                gates.push(Gate::Ry {
                    qubit: 1,
                    angle: params[0],
                });
                gates.push(Gate::Rz {
                    qubit: 1,
                    angle: params[1],
                });
            }
            Ansatz::ThreeQubit => {
                ry_layer(&mut gates, &params[0..3]);
                gates.extend([cnot(1, 2), cnot(2, 3)]);
                ry_layer(&mut gates, &params[3..6]);
                rz_layer(&mut gates, &params[6..9]);
                gates.extend([cnot(2, 3), cnot(1, 2)]);
                ry_layer(&mut gates, &params[9..12]);
            }
            Ansatz::Layered { .. } => {
                for layer in params.chunks(6) {
                    ry_layer(&mut gates, &layer[0..3]);
                    rz_layer(&mut gates, &layer[3..6]);
                    gates.extend([cnot(1, 2), cnot(2, 3)]);
                }
            }
        }
        Ok(gates)
    }

    pub fn prepare(&self, params: &[f64]) -> Result<StateVector> {
        match self {
            Ansatz::MeanField => {
                self.check_params(params)?;
                Ok(prepare_meanfield(params[0], params[1]))
            }
            _ => {
                let gates = self.gates(params)?;
                let mut state = StateVector::zero(self.num_qubits());
                state.apply_all(&gates)?;
                Ok(state)
            }
        }
    }
}

/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`, built as `RZ(φ)·RY(θ)|0⟩` times the
/// global phase `e^{iφ/2}`.
pub fn prepare_meanfield(theta: f64, phi: f64) -> StateVector {
    let mut state = StateVector::zero(1);
    state
        .apply_all(&Ansatz::MeanField.gates(&[theta, phi]).expect("two parameters"))
        .expect("qubit 1 exists");
    let phase = Complex64::from_polar(1.0, phi / 2.0);
    for a in state.amps.iter_mut() {
        *a *= phase;
    }
    state
}

/// Twelve-parameter three-qubit ansatz applied to `|000⟩`.
pub fn prepare_three_qubit(params: &[f64]) -> Result<StateVector> {
    Ansatz::ThreeQubit.prepare(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn approx(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn ry_pi_flips_zero() {
        let mut s = StateVector::zero(1);
        s.apply(&Gate::Ry { qubit: 1, angle: PI }).unwrap();
        assert!(s.overlap(&StateVector::basis(1, 1)) > 1.0 - 1e-12);
    }

    #[test]
    fn hadamard_makes_plus() {
        let mut s = StateVector::zero(1);
        s.apply(&Gate::H(1)).unwrap();
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        assert!(approx(s.amplitudes()[0], h) && approx(s.amplitudes()[1], h));
    }

    #[test]
    fn cnot_uses_qubit_one_as_low_bit() {
        // |01⟩: qubit 1 = 1, qubit 2 = 0
        let mut s = StateVector::basis(2, 0b01);
        s.apply(&Gate::Cnot {
            control: 1,
            target: 2,
        })
        .unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11));
    }

    #[test]
    fn gate_index_errors() {
        let mut s = StateVector::zero(2);
        assert!(matches!(
            s.apply(&Gate::H(3)),
            Err(Error::QubitOutOfRange { index: 3, n: 2 })
        ));
        assert!(s.apply(&Gate::X(0)).is_err());
        assert!(matches!(
            s.apply(&Gate::Cnot {
                control: 2,
                target: 2
            }),
            Err(Error::SameControlTarget(2))
        ));
    }

    #[test]
    fn meanfield_matches_closed_form() {
        assert!(approx(prepare_meanfield(0.0, 1.3).amplitudes()[0], ONE));
        let s = prepare_meanfield(PI, 0.0);
        assert!(approx(s.amplitudes()[1], ONE));
        let s = prepare_meanfield(FRAC_PI_2, FRAC_PI_2);
        let h = FRAC_1_SQRT_2;
        assert!(approx(s.amplitudes()[0], Complex64::new(h, 0.0)));
        assert!(approx(s.amplitudes()[1], Complex64::new(0.0, h)));
    }

    #[test]
    fn three_qubit_all_zero_angles() {
        let s = prepare_three_qubit(&[0.0; 12]).unwrap();
        assert_eq!(s, StateVector::zero(3));
    }

    #[test]
    fn three_qubit_first_rotation_propagates_through_entanglers() {
        // |001⟩ → |011⟩ → |111⟩, then the mirrored chain undoes it.
        let mut p = [0.0; 12];
        p[0] = PI;
        let s = prepare_three_qubit(&p).unwrap();
        assert!(s.overlap(&StateVector::basis(3, 0b001)) > 1.0 - 1e-12);
    }

    #[test]
    fn layered_counts_and_shape() {
        let a = Ansatz::Layered { layers: 3 };
        assert_eq!(a.num_params(), 18);
        assert_eq!(a.num_qubits(), 3);
        assert_eq!(a.gates(&[0.0; 18]).unwrap().len(), 24);
        let mut p = [0.0; 6];
        p[0] = PI;
        let s = Ansatz::Layered { layers: 1 }.prepare(&p).unwrap();
        assert!(s.overlap(&StateVector::basis(3, 0b111)) > 1.0 - 1e-12);
        assert!(Ansatz::Layered { layers: 2 }.prepare(&[0.0; 6]).is_err());
    }

    #[test]
    fn three_qubit_rejects_wrong_count() {
        assert!(matches!(
            prepare_three_qubit(&[0.0; 11]),
            Err(Error::ParameterCount {
                expected: 12,
                actual: 11,
                ..
            })
        ));
        assert!(Ansatz::MeanField.prepare(&[0.1]).is_err());
    }

    #[test]
    fn expectation_simple_cases() {
        let z = crate::pauli::SpectralDecomposition::from_strs(&[("Z", 1.0)]).unwrap();
        assert_eq!(StateVector::zero(1).exact_expectation(&z).unwrap(), 1.0);
        let mut plus = StateVector::zero(1);
        plus.apply(&Gate::H(1)).unwrap();
        assert!(plus.exact_expectation(&z).unwrap().abs() < 1e-15);
        let zz = crate::pauli::SpectralDecomposition::from_strs(&[("ZZ", 1.0)]).unwrap();
        assert!(plus.exact_expectation(&zz).is_err());
    }

    #[test]
    fn pauli_expectations_of_zero_state() {
        let ex = StateVector::zero(2).exact_pauli_expectations();
        assert_eq!(ex.len(), 16);
        for (w, v) in ex {
            let want = if w.is_diagonal() { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-15, "{w}");
        }
    }

    #[test]
    fn pauli_expectations_of_plus() {
        let mut plus = StateVector::zero(1);
        plus.apply(&Gate::H(1)).unwrap();
        let ex = plus.exact_pauli_expectations();
        let get = |s: &str| ex[&s.parse::<PauliWord>().unwrap()];
        assert!((get("I") - 1.0).abs() < 1e-15);
        assert!((get("X") - 1.0).abs() < 1e-15);
        assert!(get("Y").abs() < 1e-15);
        assert!(get("Z").abs() < 1e-15);
    }
}
