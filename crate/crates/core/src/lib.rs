//! Band structure of diamond-lattice silicon computed by a variational
//! hybrid quantum-classical pipeline.
//!
//! The flow for one k-point is:
//!
//! 1. [`tightbinding`] builds the Bloch Hamiltonian (2×2 s-block or full 8×8).
//! 2. [`pauli`] expands it over Pauli words.
//! 3. [`vqe`] minimises the energy of a parameterised circuit on either the
//!    exact [`qsim`] backend or the shot-sampling [`sampler`] backend, then
//!    shifts and deflates the Hamiltonian to walk up the spectrum.
//!
//! Qubits are numbered from 1, and qubit 1 is the least significant bit of
//! a basis-state index. Pauli words print with qubit 1 rightmost.

pub mod error;
pub mod pauli;
pub mod qsim;
pub mod rng;
pub mod sampler;
pub mod tightbinding;
pub mod vqe;

pub use error::{Error, Result};
pub use pauli::{Pauli, PauliWord, SpectralDecomposition};
pub use qsim::{Ansatz, Gate, StateVector};
pub use sampler::{BitstringCounts, MeasurementBasisChange, ReadoutNoiseModel};
pub use tightbinding::{BlochHamiltonian, KPath, KPoint, TbParameters};
pub use vqe::{Backend, OptimizerConfig, OptimizerMethod, SpectrumResult, VqeResult};
