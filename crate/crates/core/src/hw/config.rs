use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Electrical parameters of the SRAM array and its bitlines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HwConfig {
    /// Feedback-cell unit current.
    pub i_fb_amperes: f64,
    /// Coupling-cell unit current.
    pub i_c_amperes: f64,
    pub c_bl_farads: f64,
    pub t_pulse_seconds: f64,
    pub v_precharge_volts: f64,
    /// Relative per-cell current mismatch (standard deviation).
    pub sigma_cell: f64,
    /// Off-state leakage per cell.
    pub i_leak_amperes: f64,
    pub clock_hz: f64,
    pub cycles_per_iteration: u32,
}

impl Default for HwConfig {
    fn default() -> Self {
        Self {
            i_fb_amperes: 5e-6,
            i_c_amperes: 0.5e-6,
            c_bl_farads: 200e-15,
            t_pulse_seconds: 4e-9,
            v_precharge_volts: 1.8,
            sigma_cell: 0.0,
            i_leak_amperes: 0.0,
            clock_hz: 100e6,
            cycles_per_iteration: 3,
        }
    }
}

impl HwConfig {
    pub fn validate(&self) -> Result<()> {
        positive("i_fb_amperes", self.i_fb_amperes)?;
        positive("i_c_amperes", self.i_c_amperes)?;
        positive("c_bl_farads", self.c_bl_farads)?;
        positive("t_pulse_seconds", self.t_pulse_seconds)?;
        positive("v_precharge_volts", self.v_precharge_volts)?;
        positive("clock_hz", self.clock_hz)?;
        non_negative("sigma_cell", self.sigma_cell)?;
        non_negative("i_leak_amperes", self.i_leak_amperes)?;
        if self.sigma_cell >= 0.5 {
            return Err(Error::invalid(
                "sigma_cell",
                format!("{} too large for a positive multiplicative factor", self.sigma_cell),
            ));
        }
        if self.cycles_per_iteration == 0 {
            return Err(Error::invalid("cycles_per_iteration", "must be >= 1"));
        }
        Ok(())
    }

    /// Volts of bitline swing per ampere of pulse current.
    #[inline]
    pub fn volts_per_amp(&self) -> f64 {
        self.t_pulse_seconds / self.c_bl_farads
    }

    /// `(alpha, beta)` in volts realized by the cell currents.
    pub fn ideal_gains(&self) -> (f64, f64) {
        (
            self.i_fb_amperes * self.volts_per_amp(),
            self.i_c_amperes * self.volts_per_amp(),
        )
    }

    /// Reject configurations whose all-active column would discharge a bitline
    /// below ground for an `n`-node array.
    pub fn check_headroom(&self, n: usize) -> Result<()> {
        let worst = (self.i_fb_amperes + n as f64 * self.i_c_amperes) * self.volts_per_amp();
        if worst > self.v_precharge_volts {
            return Err(Error::Validation(format!(
                "worst-case bitline swing {worst:.4} V for n = {n} exceeds precharge {} V",
                self.v_precharge_volts
            )));
        }
        Ok(())
    }

    /// Latency of one SB iteration in seconds.
    pub fn iteration_latency(&self) -> f64 {
        self.cycles_per_iteration as f64 / self.clock_hz
    }

    /// Hardware-equivalent time to run `iterations` SB cycles.
    pub fn time_to_solution(&self, iterations: usize) -> f64 {
        (iterations as u64 * self.cycles_per_iteration as u64) as f64 / self.clock_hz
    }
}

/// How the noise DAC magnitude is shared across columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseTopology {
    /// One magnitude per iteration for the whole array, independent polarity per column.
    SharedMagnitude,
    /// Independent magnitude and polarity per column.
    PerColumnMagnitude,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseDacConfig {
    pub enabled: bool,
    /// DAC full-scale reference current.
    pub i_ref_amperes: f64,
    /// Noise-cell current per ampere of DAC output.
    pub cell_gain: f64,
    pub mirror_bits: u32,
    pub decay_bits: u32,
    pub counter_bits: u32,
    /// Decay codes advanced per iteration.
    pub decay_rate: f64,
    pub branch_doubling: bool,
    pub topology: NoiseTopology,
    /// PRBS register width.
    pub prbs_width: u32,
}

impl Default for NoiseDacConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            i_ref_amperes: 300e-6,
            cell_gain: 1.0 / 16.0,
            mirror_bits: 4,
            decay_bits: 8,
            counter_bits: 12,
            decay_rate: 0.25,
            branch_doubling: true,
            topology: NoiseTopology::SharedMagnitude,
            prbs_width: 23,
        }
    }
}

impl NoiseDacConfig {
    pub fn validate(&self) -> Result<()> {
        non_negative("i_ref_amperes", self.i_ref_amperes)?;
        non_negative("cell_gain", self.cell_gain)?;
        non_negative("decay_rate", self.decay_rate)?;
        if !(1..=16).contains(&self.mirror_bits) {
            return Err(Error::invalid("mirror_bits", "must be in 1..=16"));
        }
        if !(1..=16).contains(&self.decay_bits) {
            return Err(Error::invalid("decay_bits", "must be in 1..=16"));
        }
        if !(1..=32).contains(&self.counter_bits) {
            return Err(Error::invalid("counter_bits", "must be in 1..=32"));
        }
        super::prbs::taps_for_width(self.prbs_width)?;
        Ok(())
    }

    /// Number of magnitude levels, `2^mirror_bits`.
    pub fn levels(&self) -> u32 {
        1 << self.mirror_bits
    }

    /// Noise-cell current at full DAC scale and zero decay.
    pub fn full_scale_cell_current(&self) -> f64 {
        self.i_ref_amperes * self.cell_gain
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be > 0, got {v}")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be >= 0, got {v}")))
    }
}
