use anyhow::Result;
use serde::Serialize;

use qband::rng::{derive_seed, tag};
use qband::sampler::{NoisyDevice, ReadoutNoiseModel};

use crate::config::load_noise;
use crate::output::{num, write_table, Header};
use crate::RatesArgs;

#[derive(Debug, Clone, Serialize)]
pub struct RatesConfig {
    pub noise: ReadoutNoiseModel,
    pub trials: u64,
    pub samples: u64,
    pub seed: u64,
}

/// One estimate for one qubit, next to the rates actually injected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub sample: u64,
    pub qubit: usize,
    pub w01: f64,
    pub w10: f64,
    pub true_w01: f64,
    pub true_w10: f64,
}

/// Estimates transition rates `samples` times, advancing the device clock
/// by one between estimates.
pub fn rate_series(config: &RatesConfig) -> Result<Vec<RateRow>> {
    let mut device = NoisyDevice::new(config.noise.clone())?;
    let mut rows = Vec::new();
    for s in 0..config.samples {
        device.set_clock(s);
        let truth = device.current_rates();
        let est = device.estimate_transition_rates(config.trials, derive_seed(config.seed, &[tag::RATES, s]))?;
        for (q, (e, t)) in est.qubits.iter().zip(&truth).enumerate() {
            rows.push(RateRow {
                sample: s,
                qubit: q + 1,
                w01: e.w01,
                w10: e.w10,
                true_w01: t.w01,
                true_w10: t.w10,
            });
        }
    }
    Ok(rows)
}

pub fn run_rates(args: &RatesArgs) -> Result<Vec<RateRow>> {
    let config = RatesConfig {
        noise: load_noise(&args.noise)?,
        trials: args.trials,
        samples: args.samples,
        seed: args.seed,
    };
    let header = Header::new("rates", &config, config.seed)?;
    let rows = rate_series(&config)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.sample.to_string(),
                r.qubit.to_string(),
                num(r.w01),
                num(r.w10),
                num(r.true_w01),
                num(r.true_w10),
            ]
        })
        .collect();
    write_table(
        &args.out,
        "rates.csv",
        &header,
        &["sample", "qubit", "w01", "w10", "true_w01", "true_w10"],
        &table,
    )?;
    Ok(rows)
}
