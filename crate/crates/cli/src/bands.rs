use std::path::PathBuf;

use anyhow::{Context, Result};
use rayon::prelude::*;

use qband::rng::{derive_seed, tag};
use qband::tightbinding::{
    build_full_hamiltonian, build_s_block, diagonalize_classical, make_kpath, KPoint,
};
use qband::vqe::{full_spectrum, Backend};
use qband::SpectralDecomposition;

use crate::config::{Mode, RunConfig};
use crate::output::{num, write_table, Header};
use crate::BandsArgs;

/// VQE and reference energies at one k-point, bands ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct BandRecord {
    pub k_index: usize,
    pub kpoint: KPoint,
    pub coordinate: f64,
    pub energies: Vec<f64>,
    pub oracle: Vec<f64>,
    pub evaluations: Vec<usize>,
    pub converged: Vec<bool>,
    pub residual: Vec<f64>,
}

impl BandRecord {
    pub fn abs_errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.energies.iter().zip(&self.oracle).map(|(e, o)| (e - o).abs())
    }
}

/// Error statistics of one band over the converged entries.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSummary {
    pub band: usize,
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
    pub converged: usize,
    pub nonconverged: usize,
}

#[derive(Debug, Clone)]
pub struct BandsReport {
    pub config: RunConfig,
    pub header: Header,
    pub records: Vec<BandRecord>,
    pub summary: Vec<BandSummary>,
    pub bands_path: PathBuf,
    pub summary_path: PathBuf,
}

impl BandsReport {
    pub fn summary_lines(&self) -> Vec<String> {
        self.summary
            .iter()
            .map(|s| {
                if s.converged == 0 {
                    return format!("band {}: no converged entries, {} non-converged", s.band, s.nonconverged);
                }
                format!(
                    "band {}: max |dE| {:.3e} eV, mean {:.3e} eV, {} non-converged",
                    s.band, s.max_abs_error, s.mean_abs_error, s.nonconverged
                )
            })
            .collect()
    }
}

/// Solves one k-point: build, decompose, shift and deflate, then compare
/// with dense diagonalisation.
pub fn solve_kpoint(config: &RunConfig, backend: &Backend, k_index: usize, k: &KPoint) -> Result<BandRecord> {
    let params = &config.model.params;
    let h = match config.model.mode {
        Mode::TwoBand => build_s_block(params, k)?,
        Mode::EightBand => build_full_hamiltonian(params, k)?,
    };
    let oracle = diagonalize_classical(&h)?;
    let decomp = SpectralDecomposition::decompose(&h)?;
    let cfg = config
        .optimizer
        .with_seed(derive_seed(config.model.seed, &[tag::KPOINT, k_index as u64]));
    let spectrum = full_spectrum(&decomp, config.model.mode.num_bands(), config.ansatz, backend, &cfg)?;

    let mut levels = spectrum.levels;
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(BandRecord {
        k_index,
        kpoint: k.clone(),
        coordinate: 0.0,
        energies: levels.iter().map(|l| l.energy).collect(),
        oracle,
        evaluations: levels.iter().map(|l| l.vqe.evaluations).collect(),
        converged: levels.iter().map(|l| l.vqe.converged).collect(),
        residual: levels.iter().map(|l| l.residual).collect(),
    })
}

pub fn summarize(records: &[BandRecord], bands: usize) -> Vec<BandSummary> {
    (0..bands)
        .map(|b| {
            let errors: Vec<f64> = records
                .iter()
                .filter(|r| r.converged[b])
                .map(|r| (r.energies[b] - r.oracle[b]).abs())
                .collect();
            BandSummary {
                band: b + 1,
                max_abs_error: if errors.is_empty() {
                    f64::NAN
                } else {
                    errors.iter().copied().fold(0.0, f64::max)
                },
                mean_abs_error: if errors.is_empty() {
                    f64::NAN
                } else {
                    errors.iter().sum::<f64>() / errors.len() as f64
                },
                converged: errors.len(),
                nonconverged: records.len() - errors.len(),
            }
        })
        .collect()
}

pub fn run_bands(args: &BandsArgs) -> Result<BandsReport> {
    let config = RunConfig::resolve(args)?;
    let header = Header::new("bands", &config, config.model.seed)?;
    let path = make_kpath(&config.anchors, config.points_per_segment)?;
    let backend = config.model.backend();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build()
        .context("building worker pool")?;
    let mut records = pool.install(|| {
        path.points
            .par_iter()
            .enumerate()
            .map(|(i, k)| solve_kpoint(&config, &backend, i, k).with_context(|| format!("k-point {i} {:?}", k.frac)))
            .collect::<Result<Vec<_>>>()
    })?;
    for (r, &c) in records.iter_mut().zip(&path.coordinates) {
        r.coordinate = c;
    }

    let nb = config.model.mode.num_bands();
    let summary = summarize(&records, nb);
    let out = &args.model.out;
    let bands_path = write_table(out, "bands.csv", &header, &band_columns(nb).iter().map(String::as_str).collect::<Vec<_>>(), &band_rows(&records))?;
    let summary_rows: Vec<Vec<String>> = summary
        .iter()
        .map(|s| {
            vec![
                s.band.to_string(),
                num(s.max_abs_error),
                num(s.mean_abs_error),
                s.converged.to_string(),
                s.nonconverged.to_string(),
            ]
        })
        .collect();
    let summary_path = write_table(
        out,
        "bands_summary.csv",
        &header,
        &["band", "max_abs_error", "mean_abs_error", "converged", "nonconverged"],
        &summary_rows,
    )?;
    Ok(BandsReport {
        config,
        header,
        records,
        summary,
        bands_path,
        summary_path,
    })
}

pub fn band_columns(bands: usize) -> Vec<String> {
    let mut cols: Vec<String> = ["k_index", "kx", "ky", "kz", "label", "path"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for prefix in ["energy", "oracle", "evaluations", "converged", "residual"] {
        cols.extend((1..=bands).map(|b| format!("{prefix}_{b}")));
    }
    cols
}

fn band_rows(records: &[BandRecord]) -> Vec<Vec<String>> {
    records
        .iter()
        .map(|r| {
            let mut row = vec![
                r.k_index.to_string(),
                num(r.kpoint.frac[0]),
                num(r.kpoint.frac[1]),
                num(r.kpoint.frac[2]),
                r.kpoint.label.clone().unwrap_or_default(),
                num(r.coordinate),
            ];
            row.extend(r.energies.iter().map(|&e| num(e)));
            row.extend(r.oracle.iter().map(|&e| num(e)));
            row.extend(r.evaluations.iter().map(|e| e.to_string()));
            row.extend(r.converged.iter().map(|c| c.to_string()));
            row.extend(r.residual.iter().map(|&e| num(e)));
            row
        })
        .collect()
}
