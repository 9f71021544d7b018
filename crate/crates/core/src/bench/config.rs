//! Benchmark configuration file.
//!
//! A TOML document with one table per block. Every table is optional; missing
//! fields take the defaults below. See `docs/bench.toml` for an annotated
//! example.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hw::{ComparatorConfig, DacDecayCurve, HwConfig, HwSetup, NoiseDacConfig, NoiseTopology};
use crate::sb::{DecayLaw, NoiseKind, NoiseSchedule, SbParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    Ideal,
    Hardware,
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EngineKind::Ideal => "ideal",
            EngineKind::Hardware => "hardware",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub engine: EngineKind,
    pub trials: usize,
    pub iterations: usize,
    pub base_seed: u64,
    /// Die sample for the hardware engine.
    pub process_seed: u64,
    pub thresholds: Vec<f64>,
    pub instances: Vec<PathBuf>,
    pub out_dir: PathBuf,
    /// Drive the ideal engine from the hardware PRBS with hardware-equivalent
    /// gains, and require the hardware block to be variation-free.
    pub lockstep: bool,
    /// Compute a GW reference line per instance.
    pub gw: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            engine: EngineKind::Ideal,
            trials: 100,
            iterations: 20,
            base_seed: 0,
            process_seed: 0,
            thresholds: vec![0.90, 0.92, 0.95],
            instances: Vec::new(),
            out_dir: PathBuf::from("out"),
            lockstep: false,
            gw: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub n: usize,
    pub density: f64,
    pub count: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayKind {
    Hyperbolic,
    /// The `[dac]` block's resistive decay curve.
    Dac,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    pub amplitude0: f64,
    pub decay: DecayKind,
    pub decay_rate: f64,
    pub levels: u32,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            kind: NoiseKind::UniformDecaying,
            amplitude0: 4.0,
            decay: DecayKind::Hyperbolic,
            decay_rate: 0.2,
            levels: 16,
        }
    }
}

impl NoiseConfig {
    pub fn schedule(&self, dac: &NoiseDacConfig) -> NoiseSchedule {
        let decay = match self.decay {
            DecayKind::Hyperbolic => DecayLaw::Hyperbolic {
                rate: self.decay_rate,
            },
            DecayKind::Dac => DecayLaw::Dac(DacDecayCurve::from_config(dac)),
        };
        NoiseSchedule {
            kind: self.kind,
            amplitude0: self.amplitude0,
            decay,
            levels: self.levels,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SbBlock {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for SbBlock {
    fn default() -> Self {
        let d = SbParams::default();
        Self {
            alpha: d.alpha,
            beta: d.beta,
        }
    }
}

/// Parameter grid for `sweep`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub decay_rates: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            alphas: vec![1.0],
            betas: vec![0.0, 0.05, 0.08, 0.1, 0.12],
            amplitudes: vec![2.0, 3.0, 4.0, 5.0],
            decay_rates: vec![0.15, 0.2, 0.25],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub bench: RunConfig,
    pub generate: Option<GenerateConfig>,
    pub sb: SbBlock,
    pub noise: NoiseConfig,
    pub hw: HwConfig,
    pub dac: NoiseDacConfig,
    pub comparator: ComparatorConfig,
    pub sweep: SweepConfig,
}

impl BenchConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.bench;
        if b.trials == 0 {
            return Err(Error::invalid("bench.trials", "must be >= 1"));
        }
        if b.iterations == 0 {
            return Err(Error::invalid("bench.iterations", "must be >= 1"));
        }
        if let Some(t) = b.thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::invalid("bench.thresholds", format!("{t} outside [0, 1]")));
        }
        if let Some(g) = &self.generate {
            if g.count == 0 {
                return Err(Error::invalid("generate.count", "must be >= 1"));
            }
        }
        self.sb_params().validate()?;
        self.schedule().validate()?;
        self.hw_setup().validate()?;
        if b.lockstep {
            if self.dac.topology != NoiseTopology::PerColumnMagnitude {
                return Err(Error::invalid(
                    "dac.topology",
                    "lockstep needs per-column-magnitude",
                ));
            }
            if self.hw.sigma_cell != 0.0
                || self.hw.i_leak_amperes != 0.0
                || self.comparator.sigma_off_volts != 0.0
            {
                return Err(Error::invalid(
                    "bench.lockstep",
                    "needs sigma_cell = 0, i_leak_amperes = 0 and sigma_off_volts = 0",
                ));
            }
        }
        Ok(())
    }

    pub fn sb_params(&self) -> SbParams {
        SbParams {
            alpha: self.sb.alpha,
            beta: self.sb.beta,
            iterations: self.bench.iterations,
            seed: self.bench.base_seed,
        }
    }

    pub fn schedule(&self) -> NoiseSchedule {
        self.noise.schedule(&self.dac)
    }

    pub fn hw_setup(&self) -> HwSetup {
        HwSetup {
            array: self.hw.clone(),
            dac: self.dac.clone(),
            comparator: self.comparator.clone(),
        }
    }
}
