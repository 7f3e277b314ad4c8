//! Command-line pipeline around the `qband` library.
//!
//! Four subcommands, each writing CSV tables whose first line is a
//! `#`-prefixed JSON header carrying the tool version, the SHA-256 digest of
//! the resolved configuration and the master seed:
//!
//! * `bands` sweeps a k-path and writes `bands.csv` plus `bands_summary.csv`
//! * `scan` evaluates the mean-field energy surface at one k-point
//! * `rates` repeats transition-rate estimation on a drifting device
//! * `decompose` prints the Pauli coefficients of a matrix file

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod bands;
pub mod config;
pub mod decompose;
pub mod fit;
pub mod output;
pub mod rates;
pub mod scan;

pub use config::{AnsatzChoice, BackendKind, Mode, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "qband", version, about = "Variational band structures of sp3 silicon")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// VQE band structure along a k-path, with the dense-solver reference.
    Bands(BandsArgs),
    /// Mean-field energy surface over (θ, φ) at one k-point.
    Scan(ScanArgs),
    /// Repeated transition-rate estimation on a (drifting) noisy device.
    Rates(RatesArgs),
    /// Pauli decomposition of a Hermitian matrix file.
    Decompose(DecomposeArgs),
}

/// Backend and model flags shared by `bands` and `scan`.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Tight-binding parameter JSON; built-in silicon values when absent.
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::TwoBand)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = BackendKind::Exact)]
    pub backend: BackendKind,
    /// Shots per Pauli word per energy evaluation.
    #[arg(long, default_value_t = qband::sampler::DEFAULT_SHOTS)]
    pub shots: u64,
    /// Readout-noise JSON (`{"qubits": [{"w01": .., "w10": ..}]}` plus optional
    /// `drift_amplitude` and `drift_period`).
    #[arg(long, value_name = "FILE")]
    pub noise: Option<PathBuf>,
    /// Correct readout bias with estimated transition rates.
    #[arg(long)]
    pub mitigate: bool,
    /// Preparations per basis state when estimating rates for mitigation.
    #[arg(long, default_value_t = qband::vqe::DEFAULT_RATE_TRIALS)]
    pub rate_trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BandsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// High-symmetry names joined by `-` (`X-G-L`) or `;`-separated
    /// fractional triples (`1,0,0;0,0,0;0.5,0.5,0.5`).
    #[arg(long, default_value = "X-G-L")]
    pub kpath: String,
    /// Points per segment, counting the start anchor.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Circuit; mean-field for 2band and three-qubit for 8band by default.
    #[arg(long, value_enum)]
    pub ansatz: Option<AnsatzChoice>,
    /// Layer count for `--ansatz layered`.
    #[arg(long, default_value_t = 3)]
    pub layers: usize,
    /// Optimizer JSON; missing keys keep the backend defaults.
    #[arg(long, value_name = "FILE")]
    pub optimizer: Option<PathBuf>,
    /// Worker threads for k-points (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Fractional k-point in units of 2π/a.
    #[arg(long, default_value = "0.125,0.125,0.125")]
    pub k: String,
    #[arg(long, default_value_t = 32)]
    pub theta_steps: usize,
    #[arg(long, default_value_t = 64)]
    pub phi_steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RatesArgs {
    #[arg(long, value_name = "FILE")]
    pub noise: PathBuf,
    /// Preparations of each basis state per estimate.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Number of successive estimates (one clock tick each).
    #[arg(long, default_value_t = 100)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    /// JSON rows of numbers or `[re, im]` pairs, or CSV of complex cells
    /// such as `1.5` or `0.5-2i`.
    #[arg(long, value_name = "FILE")]
    pub matrix: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Bands(args) => {
            let report = bands::run_bands(&args)?;
            for line in report.summary_lines() {
                eprintln!("{line}");
            }
        }
        Command::Scan(args) => {
            let report = scan::run_scan(&args)?;
            eprintln!(
                "min {:.9} eV at θ={:.4} φ={:.4}; oracle ground {:.9} eV",
                report.surface.min(),
                report.surface.argmin_angles().0,
                report.surface.argmin_angles().1,
                report.oracle_ground
            );
            if let Some(m) = &report.refined {
                eprintln!("refined {:.12} eV at θ={:.6} φ={:.6}", m.f, m.x[0], m.x[1]);
            }
        }
        Command::Rates(args) => {
            let rows = rates::run_rates(&args)?;
            eprintln!("wrote {} rate estimates", rows.len());
        }
        Command::Decompose(args) => {
            let d = decompose::run_decompose(&args)?;
            eprintln!("{} Pauli terms on {} qubits", d.len(), d.num_qubits());
        }
    }
    Ok(())
}
