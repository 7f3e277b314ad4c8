//! Variational driver: ground-state search, parameter-surface scans and
//! full-spectrum extraction by identity shift plus iterative deflation.

pub mod optimize;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliWord, SpectralDecomposition};
use crate::qsim::{prepare_meanfield, Ansatz, StateVector};
use crate::rng::{self, tag};
use crate::sampler::{self, NoisyDevice, ReadoutNoiseModel, DEFAULT_SHOTS};

pub use optimize::{optimize_direct, optimize_quasinewton, Minimum, Objective, StopRule};

/// Margin (eV) added to the Gershgorin bound when shifting the spectrum
/// below zero.
pub const SHIFT_MARGIN: f64 = 1.0;

/// Trials per state when estimating readout transition rates.
pub const DEFAULT_RATE_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerMethod {
    /// BFGS with central finite-difference gradients.
    #[serde(alias = "bfgs", alias = "quasi-newton")]
    QuasiNewtonGradient,
    /// Nelder–Mead simplex; never evaluates gradients.
    #[serde(alias = "nelder-mead", alias = "cobyla", alias = "direct")]
    DirectSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: OptimizerMethod,
    pub max_iter: usize,
    pub tol_ev: f64,
    pub fd_step: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl OptimizerConfig {
    /// Declared defaults: BFGS, 20 restarts for the three-qubit ansätze
    /// and 3 for mean-field, finite-difference step 1e-4 rad on the exact
    /// backend and π/32 with shots.
    pub fn defaults(ansatz: Ansatz, backend: &Backend) -> Self {
        let exact = matches!(backend, Backend::Exact);
        Self {
            method: OptimizerMethod::QuasiNewtonGradient,
            max_iter: if exact { 500 } else { 100 },
            tol_ev: if exact { 1e-12 } else { 1e-4 },
            fd_step: if exact { 1e-4 } else { PI / 32.0 },
            restarts: match ansatz {
                Ansatz::MeanField => 3,
                Ansatz::ThreeQubit | Ansatz::Layered { .. } => 20,
            },
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_ev > 0.0 && self.tol_ev.is_finite()) {
            return Err(Error::InvalidOptimizer(format!(
                "tol_ev must be positive, got {}",
                self.tol_ev
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidOptimizer("restarts must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidOptimizer("max_iter must be at least 1".into()));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Error::InvalidOptimizer(format!(
                "fd_step must be positive, got {}",
                self.fd_step
            )));
        }
        Ok(())
    }

    fn stop_rule(&self) -> StopRule {
        StopRule {
            max_iter: self.max_iter,
            tol: self.tol_ev,
            fd_step: self.fd_step,
        }
    }
}

/// Shot-sampling backend settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotSettings {
    /// Measurements per Pauli word per energy evaluation.
    pub shots: u64,
    /// Readout noise; `None` is a noiseless sampler.
    pub noise: Option<ReadoutNoiseModel>,
    /// Correct readout bias with estimated transition rates.
    pub mitigate: bool,
    /// Preparations per basis state when estimating rates.
    pub rate_trials: u64,
}

impl Default for ShotSettings {
    fn default() -> Self {
        Self {
            shots: DEFAULT_SHOTS,
            noise: None,
            mitigate: false,
            rate_trials: DEFAULT_RATE_TRIALS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    /// Statevector expectations, no sampling error.
    Exact,
    Shots(ShotSettings),
}

impl Backend {
    pub fn shots(shots: u64) -> Self {
        Backend::Shots(ShotSettings {
            shots,
            ..ShotSettings::default()
        })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Exact)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartTrace {
    pub initial: Vec<f64>,
    pub energy: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VqeResult {
    /// Backend energy at `params`, re-evaluated after optimisation.
    pub energy: f64,
    pub params: Vec<f64>,
    /// Objective evaluations summed over all restarts.
    pub evaluations: usize,
    pub restarts: Vec<RestartTrace>,
    pub converged: bool,
}

/// One energy level produced by [`full_spectrum`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelResult {
    /// Energy with the identity shift removed (eV).
    pub energy: f64,
    pub vqe: VqeResult,
    /// `‖H'ψ - εψ‖` on the deflated operator the level was found on.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// Ascending eigenvalue estimates (eV).
    pub energies: Vec<f64>,
    /// Levels in the order they were found.
    pub levels: Vec<LevelResult>,
    /// Identity shift applied before deflation.
    pub shift: f64,
}

/// Energy evaluator bound to one decomposition and backend.
struct EnergyObjective<'a> {
    ansatz: Ansatz,
    mode: EvalMode<'a>,
    seed: u64,
    evaluations: u64,
    last_error: Option<Error>,
}

enum EvalMode<'a> {
    Exact(DMatrix<Complex64>),
    Shots(ShotEvaluator<'a>),
}

struct ShotEvaluator<'a> {
    decomp: &'a SpectralDecomposition,
    settings: &'a ShotSettings,
    device: NoisyDevice,
    mitigation: Option<ReadoutNoiseModel>,
    drifting: bool,
    seed: u64,
}

impl ShotEvaluator<'_> {
    fn new<'a>(
        decomp: &'a SpectralDecomposition,
        settings: &'a ShotSettings,
        seed: u64,
    ) -> Result<ShotEvaluator<'a>> {
        let n = decomp.num_qubits();
        if settings.shots == 0 {
            return Err(Error::InvalidOptimizer("shot count must be at least 1".into()));
        }
        let noise = match &settings.noise {
            Some(model) => model.broadcast(n)?,
            None => ReadoutNoiseModel::noiseless(n),
        };
        let drifting = noise.drift.is_some();
        let device = NoisyDevice::new(noise)?;
        let mut eval = ShotEvaluator {
            decomp,
            settings,
            device,
            mitigation: None,
            drifting,
            seed,
        };
        eval.refresh_rates()?;
        Ok(eval)
    }

    fn refresh_rates(&mut self) -> Result<()> {
        if self.settings.mitigate {
            let model = self.device.estimate_transition_rates(
                self.settings.rate_trials,
                rng::derive_seed(self.seed, &[tag::RATES, self.device.clock()]),
            )?;
            model.check_mitigable()?;
            self.mitigation = Some(model);
        }
        Ok(())
    }

    /// Rates are re-estimated every iteration while they drift, once per
    /// run otherwise.
    fn advance(&mut self) -> Result<()> {
        if self.drifting {
            self.device.tick();
            self.refresh_rates()?;
        }
        Ok(())
    }

    fn energy(&self, state: &StateVector, stream: u64) -> Result<f64> {
        estimate_energy(
            state,
            self.decomp,
            self.settings.shots,
            &self.device,
            self.mitigation.as_ref(),
            stream,
        )
    }

    fn expectations(&self, state: &StateVector, stream: u64) -> Result<BTreeMap<PauliWord, f64>> {
        PauliWord::all(state.num_qubits())
            .enumerate()
            .map(|(i, w)| {
                let v = sampler::measure_word(
                    state,
                    &w,
                    self.settings.shots,
                    &self.device,
                    self.mitigation.as_ref(),
                    rng::derive_seed(stream, &[i as u64]),
                )?;
                Ok((w, v))
            })
            .collect()
    }
}

impl Objective for EnergyObjective<'_> {
    fn evaluate(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let state = match self.ansatz.prepare(x) {
            Ok(s) => s,
            Err(e) => {
                self.last_error.get_or_insert(e);
                return f64::INFINITY;
            }
        };
        match &self.mode {
            EvalMode::Exact(h) => state.matrix_expectation(h),
            EvalMode::Shots(eval) => {
                let stream = rng::derive_seed(self.seed, &[tag::EVALUATION, self.evaluations]);
                match eval.energy(&state, stream) {
                    Ok(e) => e,
                    Err(e) => {
                        self.last_error.get_or_insert(e);
                        f64::INFINITY
                    }
                }
            }
        }
    }

    fn end_iteration(&mut self) {
        if let EvalMode::Shots(eval) = &mut self.mode {
            if let Err(e) = eval.advance() {
                self.last_error.get_or_insert(e);
            }
        }
    }
}

/// Energy from shot-estimated word expectations:
/// `c_I + Σ_i c_i ⟨σ_i⟩`, each word measured with its own `shots` budget.
pub fn estimate_energy(
    state: &StateVector,
    decomp: &SpectralDecomposition,
    shots: u64,
    device: &NoisyDevice,
    mitigation: Option<&ReadoutNoiseModel>,
    seed: u64,
) -> Result<f64> {
    if decomp.num_qubits() != state.num_qubits() {
        return Err(Error::QubitMismatch {
            expected: state.num_qubits(),
            actual: decomp.num_qubits(),
        });
    }
    let mut energy = 0.0;
    for (word, c) in decomp.terms() {
        let value = if word.is_identity() {
            1.0
        } else {
            let seed = rng::derive_seed(seed, &[tag::EXPECTATION, word.index() as u64]);
            sampler::measure_word(state, word, shots, device, mitigation, seed)?
        };
        energy += c * value;
    }
    Ok(energy)
}

fn check_ansatz(decomp: &SpectralDecomposition, ansatz: Ansatz) -> Result<()> {
    if ansatz.num_qubits() != decomp.num_qubits() {
        return Err(Error::QubitMismatch {
            expected: ansatz.num_qubits(),
            actual: decomp.num_qubits(),
        });
    }
    Ok(())
}

fn build_objective<'a>(
    decomp: &'a SpectralDecomposition,
    ansatz: Ansatz,
    backend: &'a Backend,
    seed: u64,
) -> Result<EnergyObjective<'a>> {
    let mode = match backend {
        Backend::Exact => EvalMode::Exact(decomp.to_matrix()),
        Backend::Shots(settings) => EvalMode::Shots(ShotEvaluator::new(decomp, settings, seed)?),
    };
    Ok(EnergyObjective {
        ansatz,
        mode,
        seed,
        evaluations: 0,
        last_error: None,
    })
}

/// Best of `config.restarts` optimisations from uniform random angles in
/// `[-π, π)`. Ties in energy go to the restart with fewer evaluations.
pub fn minimize(
    decomp: &SpectralDecomposition,
    ansatz: Ansatz,
    backend: &Backend,
    config: &OptimizerConfig,
) -> Result<VqeResult> {
    check_ansatz(decomp, ansatz)?;
    config.validate()?;
    let mut objective = build_objective(decomp, ansatz, backend, config.seed)?;
    let rule = config.stop_rule();

    let mut traces = Vec::with_capacity(config.restarts);
    let mut best: Option<(Minimum, usize)> = None;
    for r in 0..config.restarts {
        let mut init_rng = rng::rng_from(config.seed, &[tag::RESTART, r as u64]);
        let x0: Vec<f64> = (0..ansatz.num_params())
            .map(|_| init_rng.gen_range(-PI..PI))
            .collect();
        let m = match config.method {
            OptimizerMethod::QuasiNewtonGradient => optimize_quasinewton(&mut objective, &x0, &rule)?,
            OptimizerMethod::DirectSearch => optimize_direct(&mut objective, &x0, &rule)?,
        };
        if let Some(e) = objective.last_error.take() {
            return Err(e);
        }
        traces.push(RestartTrace {
            initial: x0,
            energy: m.f,
            evaluations: m.evaluations,
            iterations: m.iterations,
            converged: m.converged,
        });
        let better = match &best {
            None => true,
            Some((b, _)) => m.f < b.f || (m.f == b.f && m.evaluations < b.evaluations),
        };
        if better {
            best = Some((m, r));
        }
    }

    let (best, _) = best.expect("at least one restart");
    let energy = match &objective.mode {
        EvalMode::Exact(h) => ansatz.prepare(&best.x)?.matrix_expectation(h),
        EvalMode::Shots(eval) => {
            let state = ansatz.prepare(&best.x)?;
            eval.energy(&state, rng::derive_seed(config.seed, &[tag::FINAL]))?
        }
    };
    Ok(VqeResult {
        energy,
        params: best.x,
        evaluations: traces.iter().map(|t| t.evaluations).sum(),
        converged: best.converged,
        restarts: traces,
    })
}

/// All `levels` lowest eigenvalues by shift + repeated minimise-and-deflate.
///
/// The spectrum is first pushed below zero by the Gershgorin bound plus
/// [`SHIFT_MARGIN`], so a deflated level (moved to 0) can never be mistaken
/// for an undiscovered one. A level that still lands within half the margin
/// of zero is reported as [`Error::ZeroCapture`].
pub fn full_spectrum(
    decomp: &SpectralDecomposition,
    levels: usize,
    ansatz: Ansatz,
    backend: &Backend,
    config: &OptimizerConfig,
) -> Result<SpectrumResult> {
    check_ansatz(decomp, ansatz)?;
    let available = decomp.dim();
    if levels > available {
        return Err(Error::TooManyLevels {
            requested: levels,
            available,
        });
    }
    let shift = decomp.reconstruct().gershgorin_upper_bound() + SHIFT_MARGIN;
    let mut current = decomp.shift_identity(shift);
    let mut found = Vec::with_capacity(levels);

    for level in 0..levels {
        let level_seed = rng::derive_seed(config.seed, &[tag::LEVEL, level as u64]);
        let cfg = config.with_seed(level_seed);
        let vqe = minimize(&current, ansatz, backend, &cfg)?;
        if vqe.energy > -0.5 * SHIFT_MARGIN {
            return Err(Error::ZeroCapture {
                level,
                energy: vqe.energy + shift,
            });
        }
        let state = ansatz.prepare(&vqe.params)?;
        let matrix = current.to_matrix();
        let residual = state.eigen_residual(&matrix, vqe.energy);
        let expectations = match backend {
            Backend::Exact => state.exact_pauli_expectations(),
            Backend::Shots(settings) => {
                let eval = ShotEvaluator::new(&current, settings, level_seed)?;
                eval.expectations(&state, rng::derive_seed(level_seed, &[tag::EXPECTATION]))?
            }
        };
        current = current.deflate(vqe.energy, &expectations)?;
        found.push(LevelResult {
            energy: vqe.energy + shift,
            vqe,
            residual,
        });
    }

    let mut energies: Vec<f64> = found.iter().map(|l| l.energy).collect();
    energies.sort_by(|a, b| a.total_cmp(b));
    Ok(SpectrumResult {
        energies,
        levels: found,
        shift,
    })
}

/// Energy surface of the mean-field ansatz on a `θ × φ` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSurface {
    /// Polar angles, `[0, π]` inclusive.
    pub thetas: Vec<f64>,
    /// Azimuthal angles, `[-π, π]` inclusive.
    pub phis: Vec<f64>,
    /// `values[i][j]` is the energy at `(thetas[i], phis[j])`.
    pub values: Vec<Vec<f64>>,
    /// `(theta index, phi index)` of the lowest node.
    pub argmin: (usize, usize),
}

impl ScanSurface {
    pub fn min(&self) -> f64 {
        self.values[self.argmin.0][self.argmin.1]
    }

    pub fn argmin_angles(&self) -> (f64, f64) {
        (self.thetas[self.argmin.0], self.phis[self.argmin.1])
    }

    /// Largest energy change between the argmin node and any node one grid
    /// step away (φ wraps around).
    pub fn local_variation(&self) -> f64 {
        let (i, j) = self.argmin;
        let (ni, nj) = (self.thetas.len() as isize, self.phis.len() as isize);
        let centre = self.min();
        let mut worst = 0.0f64;
        for di in -1isize..=1 {
            for dj in -1isize..=1 {
                let ti = i as isize + di;
                if ti < 0 || ti >= ni || (di == 0 && dj == 0) {
                    continue;
                }
                let pj = (j as isize + dj).rem_euclid(nj);
                worst = worst.max((self.values[ti as usize][pj as usize] - centre).abs());
            }
        }
        worst
    }
}

/// Evaluates the single-qubit energy at every node of a `theta_steps ×
/// phi_steps` grid. With shots, node `(i, j)` uses its own seed stream.
pub fn grid_scan(
    decomp: &SpectralDecomposition,
    theta_steps: usize,
    phi_steps: usize,
    backend: &Backend,
    seed: u64,
) -> Result<ScanSurface> {
    if decomp.num_qubits() != 1 {
        return Err(Error::ScanNeedsOneQubit(decomp.num_qubits()));
    }
    if theta_steps < 2 || phi_steps < 2 {
        return Err(Error::GridTooSmall);
    }
    let thetas: Vec<f64> = (0..theta_steps)
        .map(|i| PI * i as f64 / (theta_steps - 1) as f64)
        .collect();
    let phis: Vec<f64> = (0..phi_steps)
        .map(|j| -PI + 2.0 * PI * j as f64 / (phi_steps - 1) as f64)
        .collect();

    let shot_eval = match backend {
        Backend::Exact => None,
        Backend::Shots(settings) => Some(ShotEvaluator::new(decomp, settings, seed)?),
    };
    let mut values = Vec::with_capacity(theta_steps);
    for (i, &theta) in thetas.iter().enumerate() {
        let mut row = Vec::with_capacity(phi_steps);
        for (j, &phi) in phis.iter().enumerate() {
            let state = prepare_meanfield(theta, phi);
            let e = match &shot_eval {
                None => state.exact_expectation(decomp)?,
                Some(eval) => {
                    let stream = rng::derive_seed(seed, &[tag::GRID, i as u64, j as u64]);
                    eval.energy(&state, stream)?
                }
            };
            row.push(e);
        }
        values.push(row);
    }

    let mut argmin = (0, 0);
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < values[argmin.0][argmin.1] {
                argmin = (i, j);
            }
        }
    }
    Ok(ScanSurface {
        thetas,
        phis,
        values,
        argmin,
    })
}
