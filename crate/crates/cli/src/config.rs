use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use qband::sampler::ReadoutNoiseModel;
use qband::tightbinding::KPoint;
use qband::vqe::{Backend, OptimizerConfig, OptimizerMethod, ShotSettings};
use qband::{Ansatz, TbParameters};

use crate::{BandsArgs, ModelArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Mode {
    /// s-orbital block, one qubit.
    #[value(name = "2band")]
    #[serde(rename = "2band")]
    TwoBand,
    /// Full sp³ Hamiltonian, three qubits.
    #[value(name = "8band")]
    #[serde(rename = "8band")]
    EightBand,
}

impl Mode {
    pub fn num_qubits(self) -> usize {
        match self {
            Mode::TwoBand => 1,
            Mode::EightBand => 3,
        }
    }

    pub fn num_bands(self) -> usize {
        1 << self.num_qubits()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Exact,
    Shots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnsatzChoice {
    MeanField,
    ThreeQubit,
    Layered,
}

/// Backend settings after files are read and defaults applied.
#[derive(Debug, Clone, Serialize)]
pub struct ModelConfig {
    pub params: TbParameters,
    pub mode: Mode,
    pub backend: BackendKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<ReadoutNoiseModel>,
    pub mitigate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_trials: Option<u64>,
    pub seed: u64,
}

impl ModelConfig {
    pub fn resolve(args: &ModelArgs, optimizer_seed: Option<u64>) -> Result<Self> {
        let params = match &args.params {
            Some(path) => load_params(path)?,
            None => TbParameters::silicon(),
        };
        let n = args.mode.num_qubits();
        let noise = match &args.noise {
            Some(path) => Some(load_noise(path)?.broadcast(n)?),
            None => None,
        };
        let shots_backend = args.backend == BackendKind::Shots;
        if !shots_backend && (noise.is_some() || args.mitigate) {
            bail!("--noise and --mitigate need --backend shots");
        }
        if shots_backend && args.shots == 0 {
            bail!("--shots must be positive");
        }
        if let Some(model) = noise.as_ref().filter(|_| args.mitigate) {
            model.at_time(0).check_mitigable()?;
        }
        Ok(Self {
            params,
            mode: args.mode,
            backend: args.backend,
            shots: shots_backend.then_some(args.shots),
            noise,
            mitigate: args.mitigate,
            rate_trials: (shots_backend && args.mitigate).then_some(args.rate_trials),
            seed: args.seed.or(optimizer_seed).unwrap_or(0),
        })
    }

    pub fn backend(&self) -> Backend {
        match self.backend {
            BackendKind::Exact => Backend::Exact,
            BackendKind::Shots => Backend::Shots(ShotSettings {
                shots: self.shots.unwrap_or(qband::sampler::DEFAULT_SHOTS),
                noise: self.noise.clone(),
                mitigate: self.mitigate,
                rate_trials: self.rate_trials.unwrap_or(qband::vqe::DEFAULT_RATE_TRIALS),
            }),
        }
    }
}

/// Resolved `bands` configuration; its JSON form is what the digest covers.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub anchors: Vec<KPoint>,
    pub points_per_segment: usize,
    pub ansatz: Ansatz,
    pub optimizer: OptimizerConfig,
}

impl RunConfig {
    pub fn resolve(args: &BandsArgs) -> Result<Self> {
        let overrides = match &args.optimizer {
            Some(path) => load_optimizer(path)?,
            None => OptimizerOverrides::default(),
        };
        let model = ModelConfig::resolve(&args.model, overrides.seed)?;
        let ansatz = pick_ansatz(model.mode, args.ansatz, args.layers)?;
        let optimizer = overrides.apply(OptimizerConfig::defaults(ansatz, &model.backend()), model.seed);
        optimizer.validate()?;
        let anchors = parse_kpath(&args.kpath)?;
        if args.points == 0 {
            bail!("--points must be at least 1");
        }
        Ok(Self {
            model,
            anchors,
            points_per_segment: args.points,
            ansatz,
            optimizer,
        })
    }
}

fn pick_ansatz(mode: Mode, choice: Option<AnsatzChoice>, layers: usize) -> Result<Ansatz> {
    let choice = choice.unwrap_or(match mode {
        Mode::TwoBand => AnsatzChoice::MeanField,
        Mode::EightBand => AnsatzChoice::ThreeQubit,
    });
    match (mode, choice) {
        (Mode::TwoBand, AnsatzChoice::MeanField) => Ok(Ansatz::MeanField),
        (Mode::EightBand, AnsatzChoice::ThreeQubit) => Ok(Ansatz::ThreeQubit),
        (Mode::EightBand, AnsatzChoice::Layered) if layers > 0 => Ok(Ansatz::Layered { layers }),
        (Mode::EightBand, AnsatzChoice::Layered) => bail!("--layers must be at least 1"),
        (mode, choice) => bail!(
            "{} mode cannot run the {:?} ansatz",
            serde_json::to_value(mode)?.as_str().unwrap_or("?"),
            choice
        ),
    }
}

/// Optimizer JSON with every key optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerOverrides {
    pub method: Option<OptimizerMethod>,
    pub max_iter: Option<usize>,
    pub tol_ev: Option<f64>,
    pub fd_step: Option<f64>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
}

impl OptimizerOverrides {
    pub fn apply(&self, base: OptimizerConfig, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            method: self.method.unwrap_or(base.method),
            max_iter: self.max_iter.unwrap_or(base.max_iter),
            tol_ev: self.tol_ev.unwrap_or(base.tol_ev),
            fd_step: self.fd_step.unwrap_or(base.fd_step),
            restarts: self.restarts.unwrap_or(base.restarts),
            seed,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_params(path: &Path) -> Result<TbParameters> {
    let p: TbParameters = serde_json::from_str(&read(path)?)
        .with_context(|| format!("parsing parameters in {}", path.display()))?;
    p.validate()?;
    Ok(p)
}

pub fn load_noise(path: &Path) -> Result<ReadoutNoiseModel> {
    let m: ReadoutNoiseModel = serde_json::from_str(&read(path)?)
        .with_context(|| format!("parsing noise model in {}", path.display()))?;
    m.validate()?;
    Ok(m)
}

pub fn load_optimizer(path: &Path) -> Result<OptimizerOverrides> {
    serde_json::from_str(&read(path)?)
        .with_context(|| format!("parsing optimizer config in {}", path.display()))
}

/// `"0.5,0.5,0.5"` or a high-symmetry name.
pub fn parse_kpoint(spec: &str) -> Result<KPoint> {
    let spec = spec.trim();
    if let Some(k) = KPoint::named(spec) {
        return Ok(k);
    }
    let coords: Vec<f64> = spec
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("k-point {spec:?} is neither a name nor x,y,z"))?;
    match coords.as_slice() {
        &[x, y, z] if coords.iter().all(|c| c.is_finite()) => Ok(KPoint::new([x, y, z])),
        _ => bail!("k-point {spec:?} needs three finite coordinates"),
    }
}

/// Names joined by `-`, or any anchors separated by `;`.
pub fn parse_kpath(spec: &str) -> Result<Vec<KPoint>> {
    let parts: Vec<&str> = if spec.contains(';') {
        spec.split(';').collect()
    } else {
        spec.split('-').collect()
    };
    let anchors = parts
        .into_iter()
        .map(parse_kpoint)
        .collect::<Result<Vec<_>>>()?;
    if anchors.len() < 2 {
        bail!("k-path {spec:?} needs at least two anchors");
    }
    Ok(anchors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kpath_forms() {
        let named = parse_kpath("X-G-L").unwrap();
        assert_eq!(named.len(), 3);
        assert_eq!(named[1].frac, [0.0; 3]);
        let explicit = parse_kpath("1,0,0; 0,0,0;-0.5,0.5,0.5").unwrap();
        assert_eq!(explicit[2].frac, [-0.5, 0.5, 0.5]);
        assert!(parse_kpath("X").is_err());
        assert!(parse_kpath("X-Q").is_err());
        assert!(parse_kpoint("1,2").is_err());
    }

    #[test]
    fn overrides_keep_defaults() {
        let o: OptimizerOverrides = serde_json::from_str(r#"{"restarts": 4}"#).unwrap();
        let base = OptimizerConfig::defaults(Ansatz::ThreeQubit, &Backend::Exact);
        let c = o.apply(base, 9);
        assert_eq!(c.restarts, 4);
        assert_eq!(c.max_iter, base.max_iter);
        assert_eq!(c.seed, 9);
        assert!(serde_json::from_str::<OptimizerOverrides>(r#"{"restart": 4}"#).is_err());
    }

    #[test]
    fn ansatz_pairing() {
        assert_eq!(pick_ansatz(Mode::TwoBand, None, 3).unwrap(), Ansatz::MeanField);
        assert_eq!(pick_ansatz(Mode::EightBand, None, 3).unwrap(), Ansatz::ThreeQubit);
        assert!(pick_ansatz(Mode::TwoBand, Some(AnsatzChoice::ThreeQubit), 3).is_err());
        assert!(pick_ansatz(Mode::EightBand, Some(AnsatzChoice::MeanField), 3).is_err());
        assert!(pick_ansatz(Mode::EightBand, Some(AnsatzChoice::Layered), 0).is_err());
        assert_eq!(
            pick_ansatz(Mode::EightBand, Some(AnsatzChoice::Layered), 4).unwrap(),
            Ansatz::Layered { layers: 4 }
        );
    }
}
