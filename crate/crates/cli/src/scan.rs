use anyhow::{bail, Result};
use serde::Serialize;

use qband::tightbinding::{build_s_block, diagonalize_classical, KPoint};
use qband::qsim::prepare_meanfield;
use qband::vqe::{grid_scan, optimize_quasinewton, Minimum, ScanSurface, StopRule};
use qband::{Backend, SpectralDecomposition};

use crate::config::{parse_kpoint, ModelConfig, Mode};
use crate::output::{num, write_table, Header};
use crate::ScanArgs;

#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub k: KPoint,
    pub theta_steps: usize,
    pub phi_steps: usize,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub config: ScanConfig,
    pub header: Header,
    pub decomposition: SpectralDecomposition,
    pub surface: ScanSurface,
    /// Quasi-Newton polish started at the grid argmin (exact backend only).
    pub refined: Option<Minimum>,
    pub oracle_ground: f64,
}

const REFINE_RULE: StopRule = StopRule {
    max_iter: 500,
    tol: 1e-15,
    fd_step: 1e-5,
};

fn refine(decomposition: &SpectralDecomposition, surface: &ScanSurface) -> Result<Minimum> {
    let (theta, phi) = surface.argmin_angles();
    let mut energy = |x: &[f64]| {
        prepare_meanfield(x[0], x[1])
            .exact_expectation(decomposition)
            .unwrap_or(f64::INFINITY)
    };
    Ok(optimize_quasinewton(&mut energy, &[theta, phi], &REFINE_RULE)?)
}

/// Mean-field surface of the s-block at one k-point.
///
/// Writes `scan.csv` (one row per node, θ outer) and `scan_summary.csv`
/// (argmin node, its one-step variation, the polished minimum when the
/// backend is exact, and the reference ground energy).
pub fn run_scan(args: &ScanArgs) -> Result<ScanReport> {
    if args.model.mode != Mode::TwoBand {
        bail!("scan runs the one-qubit mean-field surface; use --mode 2band");
    }
    let model = ModelConfig::resolve(&args.model, None)?;
    let config = ScanConfig {
        k: parse_kpoint(&args.k)?,
        theta_steps: args.theta_steps,
        phi_steps: args.phi_steps,
        model,
    };
    let header = Header::new("scan", &config, config.model.seed)?;

    let h = build_s_block(&config.model.params, &config.k)?;
    let oracle_ground = diagonalize_classical(&h)?[0];
    let decomposition = SpectralDecomposition::decompose(&h)?;
    let surface = grid_scan(
        &decomposition,
        config.theta_steps,
        config.phi_steps,
        &config.model.backend(),
        config.model.seed,
    )?;
    let refined = match config.model.backend() {
        Backend::Exact => Some(refine(&decomposition, &surface)?),
        Backend::Shots(_) => None,
    };

    let mut rows = Vec::with_capacity(config.theta_steps * config.phi_steps);
    for (i, &theta) in surface.thetas.iter().enumerate() {
        for (j, &phi) in surface.phis.iter().enumerate() {
            rows.push(vec![
                i.to_string(),
                j.to_string(),
                num(theta),
                num(phi),
                num(surface.values[i][j]),
            ]);
        }
    }
    let out = &args.model.out;
    write_table(out, "scan.csv", &header, &["theta_index", "phi_index", "theta", "phi", "energy"], &rows)?;
    let (theta, phi) = surface.argmin_angles();
    let polished = match &refined {
        Some(m) => vec![num(m.x[0]), num(m.x[1]), num(m.f)],
        None => vec![String::new(); 3],
    };
    let mut summary = vec![num(theta), num(phi), num(surface.min()), num(surface.local_variation())];
    summary.extend(polished);
    summary.push(num(oracle_ground));
    write_table(
        out,
        "scan_summary.csv",
        &header,
        &[
            "theta",
            "phi",
            "min_energy",
            "local_variation",
            "refined_theta",
            "refined_phi",
            "refined_energy",
            "oracle_ground",
        ],
        &[summary],
    )?;
    Ok(ScanReport {
        config,
        header,
        decomposition,
        surface,
        refined,
        oracle_ground,
    })
}
