//! Shot-sampling backend: measurement-basis changes, bitstring sampling,
//! parity-rule estimation, readout bit-flip noise and its mitigation.
//!
//! All noise lives at readout. Each measured bit flips independently with
//! probability `w01` when its true value is 0 and `w10` when it is 1.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliWord};
use crate::qsim::{Gate, StateVector};
use crate::rng::{self, Rng};

/// Shot budget used per Pauli word unless configured otherwise.
pub const DEFAULT_SHOTS: u64 = 8192;

/// Renders basis index `b` as an `n`-character bitstring, qubit 1 rightmost.
pub fn bitstring(n: usize, b: usize) -> String {
    (1..=n)
        .rev()
        .map(|q| if b >> (q - 1) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(s: &str) -> Result<(usize, usize)> {
    let s = s.trim();
    if s.is_empty() || s.len() > 32 {
        return Err(Error::InvalidCounts(format!("bad bitstring {s:?}")));
    }
    let mut b = 0usize;
    for ch in s.chars() {
        b <<= 1;
        match ch {
            '0' => {}
            '1' => b |= 1,
            _ => return Err(Error::InvalidCounts(format!("bad bitstring {s:?}"))),
        }
    }
    Ok((s.len(), b))
}

/// Histogram of measured bitstrings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitstringCounts {
    n: usize,
    counts: BTreeMap<usize, u64>,
    shots: u64,
}

impl BitstringCounts {
    pub fn new(n: usize, counts: BTreeMap<usize, u64>) -> Result<Self> {
        if let Some(&b) = counts.keys().find(|&&b| b >> n != 0) {
            return Err(Error::InvalidCounts(format!(
                "outcome {b} does not fit in {n} bits"
            )));
        }
        let shots = counts.values().sum();
        Ok(Self { n, counts, shots })
    }

    /// From `("00101", count)` pairs; all strings must share one length.
    pub fn from_strings(entries: &[(&str, u64)]) -> Result<Self> {
        let mut n = None;
        let mut counts = BTreeMap::new();
        for (s, c) in entries {
            let (len, b) = parse_bitstring(s)?;
            if *n.get_or_insert(len) != len {
                return Err(Error::InvalidCounts("bitstrings differ in length".into()));
            }
            *counts.entry(b).or_insert(0) += c;
        }
        let n = n.ok_or_else(|| Error::InvalidCounts("no outcomes".into()))?;
        Self::new(n, counts)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn get(&self, b: usize) -> u64 {
        self.counts.get(&b).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(b, c)| (*b, *c))
    }

    /// `(bitstring, count)` rows in outcome order, for CSV export.
    pub fn rows(&self) -> Vec<(String, u64)> {
        self.iter().map(|(b, c)| (bitstring(self.n, b), c)).collect()
    }

    /// `bitstring,count` table with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (b, c) in self.rows() {
            out.push_str(&format!("{b},{c}\n"));
        }
        out
    }

    pub fn frequency(&self, b: usize) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        self.get(b) as f64 / self.shots as f64
    }
}

/// Readout transition rates of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitRates {
    /// Probability a true 0 is read as 1.
    pub w01: f64,
    /// Probability a true 1 is read as 0.
    pub w10: f64,
}

impl QubitRates {
    pub const NOISELESS: QubitRates = QubitRates { w01: 0.0, w10: 0.0 };

    /// `p⁺ = w10 + w01`.
    pub fn p_plus(&self) -> f64 {
        self.w10 + self.w01
    }

    /// `p⁻ = w10 - w01`.
    pub fn p_minus(&self) -> f64 {
        self.w10 - self.w01
    }
}

/// Sinusoidal modulation of every qubit's `w10`:
/// `w10(t) = w10 + amplitude · sin(2πt / period)`, clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    pub amplitude: f64,
    pub period: f64,
}

/// Per-qubit readout flip rates, optionally drifting with a trial clock.
///
/// JSON form: `{"qubits": [{"w01": .., "w10": ..}, ..]}` with optional
/// top-level `drift_amplitude` and `drift_period`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NoiseFile", into = "NoiseFile")]
pub struct ReadoutNoiseModel {
    pub qubits: Vec<QubitRates>,
    pub drift: Option<Drift>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseFile {
    qubits: Vec<QubitRates>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    drift_amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    drift_period: Option<f64>,
}

impl TryFrom<NoiseFile> for ReadoutNoiseModel {
    type Error = String;

    fn try_from(f: NoiseFile) -> std::result::Result<Self, String> {
        let drift = match (f.drift_amplitude, f.drift_period) {
            (None, None) => None,
            (Some(amplitude), Some(period)) => Some(Drift { amplitude, period }),
            _ => return Err("drift_amplitude and drift_period go together".into()),
        };
        Ok(Self {
            qubits: f.qubits,
            drift,
        })
    }
}

impl From<ReadoutNoiseModel> for NoiseFile {
    fn from(m: ReadoutNoiseModel) -> Self {
        Self {
            qubits: m.qubits,
            drift_amplitude: m.drift.map(|d| d.amplitude),
            drift_period: m.drift.map(|d| d.period),
        }
    }
}

impl ReadoutNoiseModel {
    pub fn noiseless(n: usize) -> Self {
        Self {
            qubits: vec![QubitRates::NOISELESS; n],
            drift: None,
        }
    }

    pub fn uniform(n: usize, w01: f64, w10: f64) -> Self {
        Self {
            qubits: vec![QubitRates { w01, w10 }; n],
            drift: None,
        }
    }

    pub fn with_drift(mut self, amplitude: f64, period: f64) -> Self {
        self.drift = Some(Drift { amplitude, period });
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_noiseless(&self) -> bool {
        self.drift.is_none() && self.qubits.iter().all(|r| *r == QubitRates::NOISELESS)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, r) in self.qubits.iter().enumerate() {
            for (name, w) in [("w01", r.w01), ("w10", r.w10)] {
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidNoise(format!(
                        "qubit {}: {name} = {w} outside [0, 1]",
                        i + 1
                    )));
                }
            }
        }
        if let Some(d) = self.drift {
            if !(d.amplitude.is_finite() && d.period.is_finite() && d.period > 0.0) {
                return Err(Error::InvalidNoise(format!(
                    "drift needs finite amplitude and positive period, got {d:?}"
                )));
            }
        }
        Ok(())
    }

    /// Repeats a single-qubit model across `n` qubits; otherwise the
    /// qubit count must already be `n`.
    pub fn broadcast(&self, n: usize) -> Result<Self> {
        match self.qubits.len() {
            len if len == n => Ok(self.clone()),
            1 => Ok(Self {
                qubits: vec![self.qubits[0]; n],
                drift: self.drift,
            }),
            len => Err(Error::InvalidNoise(format!(
                "model describes {len} qubits, register has {n}"
            ))),
        }
    }

    /// Static rates at trial time `t`.
    pub fn rates_at(&self, t: u64) -> Vec<QubitRates> {
        match self.drift {
            None => self.qubits.clone(),
            Some(d) => {
                let shift = d.amplitude * (2.0 * PI * t as f64 / d.period).sin();
                self.qubits
                    .iter()
                    .map(|r| QubitRates {
                        w01: r.w01,
                        w10: (r.w10 + shift).clamp(0.0, 1.0),
                    })
                    .collect()
            }
        }
    }

    /// Drift-free snapshot of the model at trial time `t`.
    pub fn at_time(&self, t: u64) -> Self {
        Self {
            qubits: self.rates_at(t),
            drift: None,
        }
    }

    /// Checks `1 - p⁺ > 0` on every qubit.
    pub fn check_mitigable(&self) -> Result<()> {
        for (i, r) in self.qubits.iter().enumerate() {
            if r.p_plus() >= 1.0 {
                return Err(Error::MitigationIllPosed {
                    qubit: i + 1,
                    p_plus: r.p_plus(),
                });
            }
        }
        Ok(())
    }
}

/// Gates that rotate a Pauli word onto its diagonal (I/Z) counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasisChange {
    pub source: PauliWord,
    /// `source` with every X and Y replaced by Z.
    pub diagonal: PauliWord,
    /// Circuit order, applied after state preparation.
    pub gates: Vec<Gate>,
}

/// X → `H`; Y → `Z`, `S`, `H` in circuit order (operator `U = H·S·Z`).
/// Then `U† Z U` equals the source letter on every qubit.
pub fn basis_change(word: &PauliWord) -> MeasurementBasisChange {
    let mut gates = Vec::new();
    let mut letters = word.letters();
    for (i, letter) in letters.iter_mut().enumerate() {
        let q = i + 1;
        match *letter {
            Pauli::X => gates.push(Gate::H(q)),
            Pauli::Y => gates.extend([Gate::Z(q), Gate::S(q), Gate::H(q)]),
            Pauli::I | Pauli::Z => continue,
        }
        *letter = Pauli::Z;
    }
    MeasurementBasisChange {
        source: *word,
        diagonal: PauliWord::from_qubit_letters(&letters),
        gates,
    }
}

/// Draws `shots` bitstrings from `|amplitude|²`, flipping each bit with the
/// rates in `noise` (if any). Deterministic for a fixed `seed`.
pub fn sample(
    state: &StateVector,
    shots: u64,
    noise: Option<&ReadoutNoiseModel>,
    seed: u64,
) -> Result<BitstringCounts> {
    let n = state.num_qubits();
    let rates = match noise {
        Some(model) => {
            let model = model.broadcast(n)?;
            model.validate()?;
            Some(model.rates_at(0))
        }
        None => None,
    };
    let mut rng = rng::rng_from(seed, &[]);
    sample_with(state, shots, rates.as_deref(), &mut rng)
}

pub(crate) fn sample_with(
    state: &StateVector,
    shots: u64,
    rates: Option<&[QubitRates]>,
    rng: &mut Rng,
) -> Result<BitstringCounts> {
    let n = state.num_qubits();
    let mut cumulative = Vec::with_capacity(1 << n);
    let mut acc = 0.0;
    for p in state.probabilities() {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let rates = rates.filter(|r| r.iter().any(|q| *q != QubitRates::NOISELESS));

    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let mut b = cumulative
            .partition_point(|&c| c <= u)
            .min(cumulative.len() - 1);
        if let Some(rates) = rates {
            for (i, r) in rates.iter().enumerate() {
                let bit = 1usize << i;
                let p = if b & bit == 0 { r.w01 } else { r.w10 };
                if p > 0.0 && rng.gen::<f64>() < p {
                    b ^= bit;
                }
            }
        }
        *counts.entry(b).or_insert(0u64) += 1;
    }
    BitstringCounts::new(n, counts)
}

fn check_counts_word(counts: &BitstringCounts, word: &PauliWord) -> Result<()> {
    if !word.is_diagonal() {
        return Err(Error::NonDiagonalWord(word.to_string()));
    }
    if word.num_qubits() != counts.num_qubits() {
        return Err(Error::QubitMismatch {
            expected: counts.num_qubits(),
            actual: word.num_qubits(),
        });
    }
    if counts.shots() == 0 {
        return Err(Error::InvalidCounts("no shots recorded".into()));
    }
    Ok(())
}

/// Parity rule: `Σ_z p(z) (-1)^{parity of z restricted to the Z positions}`.
pub fn expectation_from_counts(counts: &BitstringCounts, word: &PauliWord) -> Result<f64> {
    check_counts_word(counts, word)?;
    let mask = word.z_mask() as usize;
    let signed: i64 = counts
        .iter()
        .map(|(b, c)| {
            if (b & mask).count_ones().is_multiple_of(2) {
                c as i64
            } else {
                -(c as i64)
            }
        })
        .sum();
    Ok(signed as f64 / counts.shots() as f64)
}

/// Single-qubit correction `(⟨σ⟩ - p⁻) / (1 - p⁺)`, clamped to `[-1, 1]`.
pub fn mitigate_single(measured: f64, rates: QubitRates) -> Result<f64> {
    if rates.p_plus() >= 1.0 {
        return Err(Error::MitigationIllPosed {
            qubit: 1,
            p_plus: rates.p_plus(),
        });
    }
    Ok(((measured - rates.p_minus()) / (1.0 - rates.p_plus())).clamp(-1.0, 1.0))
}

/// Multi-qubit correction
/// `Σ_z p(z) Π_{i ∈ Z} ((-1)^{z_i} - p⁻_i) / (1 - p⁺_i)`, clamped to `[-1, 1]`.
pub fn mitigate_counts(
    counts: &BitstringCounts,
    model: &ReadoutNoiseModel,
    word: &PauliWord,
) -> Result<f64> {
    check_counts_word(counts, word)?;
    let model = model.broadcast(counts.num_qubits())?;
    let positions: Vec<usize> = (1..=word.num_qubits())
        .filter(|&q| word.letter(q) == Pauli::Z)
        .collect();
    for &q in &positions {
        let r = model.qubits[q - 1];
        if r.p_plus() >= 1.0 {
            return Err(Error::MitigationIllPosed {
                qubit: q,
                p_plus: r.p_plus(),
            });
        }
    }
    let shots = counts.shots() as f64;
    let value: f64 = counts
        .iter()
        .map(|(b, c)| {
            let factor: f64 = positions
                .iter()
                .map(|&q| {
                    let r = model.qubits[q - 1];
                    let eigen = if b >> (q - 1) & 1 == 0 { 1.0 } else { -1.0 };
                    (eigen - r.p_minus()) / (1.0 - r.p_plus())
                })
                .product();
            c as f64 / shots * factor
        })
        .sum();
    Ok(value.clamp(-1.0, 1.0))
}

/// Readout device with a trial clock driving optional rate drift.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyDevice {
    pub noise: ReadoutNoiseModel,
    clock: u64,
}

impl NoisyDevice {
    pub fn new(noise: ReadoutNoiseModel) -> Result<Self> {
        noise.validate()?;
        Ok(Self { noise, clock: 0 })
    }

    pub fn noiseless(n: usize) -> Self {
        Self {
            noise: ReadoutNoiseModel::noiseless(n),
            clock: 0,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.noise.num_qubits()
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn set_clock(&mut self, t: u64) {
        self.clock = t;
    }

    pub fn tick(&mut self) {
        self.clock += 1;
    }

    /// Rates in force at the current clock value.
    pub fn current_rates(&self) -> Vec<QubitRates> {
        self.noise.rates_at(self.clock)
    }

    pub fn sample(&self, state: &StateVector, shots: u64, seed: u64) -> Result<BitstringCounts> {
        let model = self.noise.broadcast(state.num_qubits())?;
        let rates = model.rates_at(self.clock);
        let mut rng = rng::rng_from(seed, &[]);
        sample_with(state, shots, Some(&rates), &mut rng)
    }

    /// Prepares `|0...0⟩` and `|1...1⟩` `trials` times each and returns the
    /// observed flip fractions per qubit, as a drift-free model.
    pub fn estimate_transition_rates(&self, trials: u64, seed: u64) -> Result<ReadoutNoiseModel> {
        if trials == 0 {
            return Err(Error::InvalidNoise("need at least one trial".into()));
        }
        let n = self.num_qubits();
        let zeros = self.sample(
            &StateVector::zero(n),
            trials,
            rng::derive_seed(seed, &[rng::tag::RATES, 0]),
        )?;
        let mut ones_state = StateVector::zero(n);
        for q in 1..=n {
            ones_state.apply(&Gate::X(q))?;
        }
        let ones = self.sample(
            &ones_state,
            trials,
            rng::derive_seed(seed, &[rng::tag::RATES, 1]),
        )?;
        let qubits = (0..n)
            .map(|i| {
                let flipped = |counts: &BitstringCounts, from: usize| -> f64 {
                    counts
                        .iter()
                        .filter(|(b, _)| (b >> i) & 1 != from)
                        .map(|(_, c)| c)
                        .sum::<u64>() as f64
                        / trials as f64
                };
                QubitRates {
                    w01: flipped(&zeros, 0),
                    w10: flipped(&ones, 1),
                }
            })
            .collect();
        Ok(ReadoutNoiseModel {
            qubits,
            drift: None,
        })
    }
}

/// Estimates `⟨σ⟩` with `shots` measurements: basis change, sampling, parity
/// rule, and optional readout mitigation with `mitigation` rates.
pub fn measure_word(
    state: &StateVector,
    word: &PauliWord,
    shots: u64,
    device: &NoisyDevice,
    mitigation: Option<&ReadoutNoiseModel>,
    seed: u64,
) -> Result<f64> {
    if word.num_qubits() != state.num_qubits() {
        return Err(Error::QubitMismatch {
            expected: state.num_qubits(),
            actual: word.num_qubits(),
        });
    }
    if word.is_identity() {
        return Ok(1.0);
    }
    let change = basis_change(word);
    let mut rotated = state.clone();
    rotated.apply_all(&change.gates)?;
    let counts = device.sample(&rotated, shots, seed)?;
    match mitigation {
        Some(model) => mitigate_counts(&counts, model, &change.diagonal),
        None => expectation_from_counts(&counts, &change.diagonal),
    }
}
