//! Behavioral model of the SRAM compute-in-memory SB chip.
//!
//! One iteration takes three clock cycles: precharge and DAC sampling,
//! wordline pulse (cell and noise currents discharge the bitline pairs), and
//! comparator latch. The model is synchronous and linear in the cell
//! currents, so with variation disabled it reduces to the ideal update rule
//! under `alpha = i_fb * t / C`, `beta = i_c * t / C`.

pub mod array;
pub mod bias;
pub mod comparator;
pub mod config;
pub mod dac;
pub mod prbs;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use array::{bitline_discharge, cell_currents, ColumnCurrents, Discharge, Mismatch};
pub use bias::{bias_to_current, SquareLaw};
pub use comparator::{calibrate_offsets, comparator_decide, ComparatorBank};
pub use config::{HwConfig, NoiseDacConfig, NoiseTopology};
pub use dac::{DacDecayCurve, DacSample, NoiseDac};
pub use prbs::Prbs;

use crate::error::{Error, Result};
use crate::ising::{CouplingMatrix, ProblemInstance, SpinVector};
use crate::sb::{
    initial_spins, run_engine, trial_seed, DecayLaw, IdealEngine, NoiseSchedule, SbParams,
    SpinEngine, TrialResult,
};
use crate::seed::{self, stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComparatorConfig {
    pub sigma_off_volts: f64,
    pub trim_lsb_volts: f64,
    pub calibrate: bool,
}

impl Default for ComparatorConfig {
    fn default() -> Self {
        Self {
            sigma_off_volts: 5e-3,
            trim_lsb_volts: 1e-3,
            calibrate: true,
        }
    }
}

impl ComparatorConfig {
    pub fn ideal() -> Self {
        Self {
            sigma_off_volts: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_off_volts >= 0.0 && self.sigma_off_volts.is_finite()) {
            return Err(Error::invalid("sigma_off_volts", "must be >= 0"));
        }
        if !(self.trim_lsb_volts > 0.0 && self.trim_lsb_volts.is_finite()) {
            return Err(Error::invalid("trim_lsb_volts", "must be > 0"));
        }
        Ok(())
    }
}

/// Everything needed to instantiate the hardware engine.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HwSetup {
    pub array: HwConfig,
    pub dac: NoiseDacConfig,
    pub comparator: ComparatorConfig,
}

impl HwSetup {
    pub fn validate(&self) -> Result<()> {
        self.array.validate()?;
        self.dac.validate()?;
        self.comparator.validate()
    }

    /// Variation-free setup whose arithmetic is exact in binary floating
    /// point: pulse width and bitline capacitance are powers of two, so every
    /// current-to-voltage conversion is an exact scaling and the hardware
    /// engine reproduces the ideal engine bit for bit.
    pub fn lockstep() -> Self {
        let i_unit = (-20f64).exp2();
        Self {
            array: HwConfig {
                i_fb_amperes: 10.0 * i_unit,
                i_c_amperes: i_unit,
                c_bl_farads: (-42f64).exp2(),
                t_pulse_seconds: (-28f64).exp2(),
                sigma_cell: 0.0,
                i_leak_amperes: 0.0,
                ..HwConfig::default()
            },
            dac: NoiseDacConfig {
                cell_gain: 0.125,
                topology: NoiseTopology::PerColumnMagnitude,
                ..NoiseDacConfig::default()
            },
            comparator: ComparatorConfig::ideal(),
        }
    }

    /// Ideal-engine parameters realized by this setup.
    pub fn ideal_equivalent(&self, iterations: usize) -> (SbParams, NoiseSchedule) {
        let (alpha, beta) = self.array.ideal_gains();
        let params = SbParams {
            alpha,
            beta,
            iterations,
            seed: 0,
        };
        let schedule = if self.dac.enabled {
            NoiseSchedule {
                levels: self.dac.levels(),
                ..NoiseSchedule::decaying(
                    self.dac.full_scale_cell_current() * self.array.volts_per_amp(),
                    DecayLaw::Dac(DacDecayCurve::from_config(&self.dac)),
                )
            }
        } else {
            NoiseSchedule::none()
        };
        (params, schedule)
    }
}

/// Frozen process-variation sample: cell mismatch and comparator offsets.
#[derive(Clone, Debug, PartialEq)]
pub struct Die {
    pub mismatch: Mismatch,
    pub bank: ComparatorBank,
}

impl Die {
    pub fn ideal(n: usize) -> Self {
        Self {
            mismatch: Mismatch::ideal(n),
            bank: ComparatorBank::ideal(n),
        }
    }

    pub fn sample(n: usize, setup: &HwSetup, process_seed: u64) -> Result<Self> {
        let mismatch = Mismatch::sample(
            n,
            setup.array.sigma_cell,
            seed::split(process_seed, stream::MISMATCH),
        )?;
        let raw = ComparatorBank::sample(
            n,
            setup.comparator.sigma_off_volts,
            seed::split(process_seed, stream::OFFSET),
        )?;
        let bank = if setup.comparator.calibrate {
            calibrate_offsets(&raw, setup.comparator.trim_lsb_volts)?
        } else {
            raw
        };
        Ok(Self { mismatch, bank })
    }
}

/// One hardware SB iteration.
///
/// Computes the cell currents of every column, adds the noise-cell current on
/// BLB for positive polarity and on BL for negative, discharges both
/// bitlines, and latches `v_bl - v_blb` against each column's comparator.
/// Returns the new state and the number of bitlines that hit ground.
pub fn hw_step(
    j: &CouplingMatrix,
    x: &SpinVector,
    cfg: &HwConfig,
    dac: &mut NoiseDac,
    die: &Die,
    k: usize,
) -> Result<(SpinVector, usize)> {
    let n = j.n();
    let mut columns = cell_currents(j, x, cfg, &die.mismatch)?;
    if die.bank.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: die.bank.len(),
        });
    }
    if dac.config().enabled {
        for (col, (i_noise, sign)) in columns.iter_mut().zip(dac.column_noise(k, n)) {
            if sign > 0 {
                col.i_blb += i_noise;
            } else {
                col.i_bl += i_noise;
            }
        }
    }
    let xs = x.as_slice();
    let mut saturated = 0;
    let next = columns
        .iter()
        .enumerate()
        .map(|(c, col)| {
            let bl = bitline_discharge(col.i_bl, cfg);
            let blb = bitline_discharge(col.i_blb, cfg);
            saturated += bl.saturated as usize + blb.saturated as usize;
            // v_bl - v_blb, taken from the drops to avoid cancelling against
            // the precharge level
            die.bank.decide_differential(blb.delta_v - bl.delta_v, c, xs[c])
        })
        .collect();
    Ok((SpinVector::from_raw(next), saturated))
}

/// Hardware engine state for one trial.
pub struct HwEngine<'a> {
    pub cfg: &'a HwConfig,
    pub dac: NoiseDac,
    pub die: &'a Die,
    /// Bitline clamp events so far.
    pub saturations: usize,
}

impl<'a> HwEngine<'a> {
    pub fn new(setup: &'a HwSetup, die: &'a Die, trial_seed: u64) -> Result<Self> {
        let prbs = Prbs::from_seed(setup.dac.prbs_width, seed::split(trial_seed, stream::PRBS))?;
        Ok(Self {
            cfg: &setup.array,
            dac: NoiseDac::new(setup.dac.clone(), prbs),
            die,
            saturations: 0,
        })
    }
}

impl SpinEngine for HwEngine<'_> {
    fn step(&mut self, j: &CouplingMatrix, x: &SpinVector, k: usize) -> Result<SpinVector> {
        let (next, sat) = hw_step(j, x, self.cfg, &mut self.dac, self.die, k)?;
        self.saturations += sat;
        Ok(next)
    }
}

pub fn run_hw_trial(
    instance: &ProblemInstance,
    setup: &HwSetup,
    die: &Die,
    iterations: usize,
    trial_seed: u64,
) -> Result<TrialResult> {
    setup.validate()?;
    if iterations == 0 {
        return Err(Error::invalid("iterations", "must be >= 1"));
    }
    let j = &instance.coupling;
    setup.array.check_headroom(j.n())?;
    let mut engine = HwEngine::new(setup, die, trial_seed)?;
    let result = run_engine(&mut engine, j, initial_spins(j.n(), trial_seed), iterations, trial_seed)?;
    if engine.saturations > 0 {
        log::debug!("trial {trial_seed:#x}: {} bitline clamp events", engine.saturations);
    }
    Ok(result)
}

pub fn run_hw_trials(
    instance: &ProblemInstance,
    setup: &HwSetup,
    die: &Die,
    iterations: usize,
    n_trials: usize,
    base_seed: u64,
) -> Result<Vec<TrialResult>> {
    if n_trials == 0 {
        return Err(Error::invalid("n_trials", "must be >= 1"));
    }
    (0..n_trials as u64)
        .into_par_iter()
        .map(|t| run_hw_trial(instance, setup, die, iterations, trial_seed(base_seed, t)))
        .collect()
}

/// Ideal-engine trial driven by the same PRBS stream the hardware engine
/// would use for `trial_seed`.
pub fn run_lockstep_ideal_trial(
    instance: &ProblemInstance,
    setup: &HwSetup,
    iterations: usize,
    trial_seed: u64,
) -> Result<TrialResult> {
    if setup.dac.topology != NoiseTopology::PerColumnMagnitude {
        return Err(Error::invalid(
            "topology",
            "lockstep comparison needs per-column-magnitude noise",
        ));
    }
    let (params, schedule) = setup.ideal_equivalent(iterations);
    params.validate()?;
    let j = &instance.coupling;
    let mut engine = IdealEngine {
        params: &params,
        schedule: &schedule,
        noise: Prbs::from_seed(setup.dac.prbs_width, seed::split(trial_seed, stream::PRBS))?,
    };
    run_engine(&mut engine, j, initial_spins(j.n(), trial_seed), iterations, trial_seed)
}
