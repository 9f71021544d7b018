//! PRBS-driven noise DAC with resistive decay.
//!
//! A binary-weighted current mirror turns `mirror_bits` PRBS bits into a
//! magnitude code `m`. A resistive divider attenuates the output as the
//! iteration counter advances: the counter is mapped to a decay code `d`, and
//! each set bit `b` of `d` enables a branch of conductance `2^b` units in
//! parallel with the unit base branch, giving `gain(d) = 1 / (1 + d)`. Without
//! branch doubling the divider is modeled as a linear ladder,
//! `gain(d) = 1 - d / 2^decay_bits`.

use serde::{Deserialize, Serialize};

use super::config::{NoiseDacConfig, NoiseTopology};
use super::prbs::Prbs;
use crate::sb::{NoiseDraw, NoiseSource};

/// Counter-to-attenuation map of the decay DAC.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DacDecayCurve {
    pub decay_rate: f64,
    pub decay_bits: u32,
    pub counter_bits: u32,
    pub branch_doubling: bool,
}

impl DacDecayCurve {
    pub fn from_config(cfg: &NoiseDacConfig) -> Self {
        Self {
            decay_rate: cfg.decay_rate,
            decay_bits: cfg.decay_bits,
            counter_bits: cfg.counter_bits,
            branch_doubling: cfg.branch_doubling,
        }
    }

    pub fn max_code(&self) -> u32 {
        (1 << self.decay_bits) - 1
    }

    pub fn counter_overflows(&self, k: usize) -> bool {
        (k as u64) >= 1u64 << self.counter_bits
    }

    /// Decay code for iteration `k`; saturates at the maximum code once the
    /// iteration counter overflows.
    pub fn counter_to_decay(&self, k: usize) -> u32 {
        if self.counter_overflows(k) {
            return self.max_code();
        }
        let code = (k as f64 * self.decay_rate).floor();
        if code >= self.max_code() as f64 {
            self.max_code()
        } else {
            code as u32
        }
    }

    /// Resistive-divider attenuation for decay code `d`.
    pub fn decay_gain(&self, d: u32) -> f64 {
        if self.branch_doubling {
            1.0 / (1.0 + d as f64)
        } else {
            1.0 - d as f64 / (1u64 << self.decay_bits) as f64
        }
    }

    pub fn gain_at(&self, k: usize) -> f64 {
        self.decay_gain(self.counter_to_decay(k))
    }
}

/// One DAC output sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DacSample {
    /// Output current magnitude in amperes.
    pub magnitude: f64,
    pub sign: i8,
    pub code: u32,
}

/// Noise DAC with its PRBS source and iteration counter.
#[derive(Clone, Debug)]
pub struct NoiseDac {
    cfg: NoiseDacConfig,
    curve: DacDecayCurve,
    prbs: Prbs,
    warned: bool,
}

impl NoiseDac {
    pub fn new(cfg: NoiseDacConfig, prbs: Prbs) -> Self {
        let curve = DacDecayCurve::from_config(&cfg);
        Self {
            cfg,
            curve,
            prbs,
            warned: false,
        }
    }

    pub fn config(&self) -> &NoiseDacConfig {
        &self.cfg
    }

    pub fn curve(&self) -> &DacDecayCurve {
        &self.curve
    }

    pub fn prbs(&self) -> &Prbs {
        &self.prbs
    }

    /// Output current per magnitude code at iteration `k`.
    pub fn lsb_current(&mut self, k: usize) -> f64 {
        if self.curve.counter_overflows(k) && !self.warned {
            log::warn!(
                "iteration counter overflowed {} bits at k = {k}; decay saturated",
                self.curve.counter_bits
            );
            self.warned = true;
        }
        let full = self.cfg.i_ref_amperes * self.curve.gain_at(k);
        full / (self.cfg.levels() - 1) as f64
    }

    /// Draw a magnitude code and a polarity bit and return the resulting
    /// DAC current for iteration `k`.
    pub fn noise_dac_current(&mut self, k: usize) -> DacSample {
        let lsb = self.lsb_current(k);
        let NoiseDraw { sign, level } = self.prbs.draw(self.cfg.levels());
        DacSample {
            magnitude: level as f64 * lsb,
            sign,
            code: level,
        }
    }

    /// Signed noise-cell currents for `columns` bitline pairs at iteration `k`.
    pub fn column_noise(&mut self, k: usize, columns: usize) -> Vec<(f64, i8)> {
        let lsb = self.lsb_current(k);
        let gain = self.cfg.cell_gain;
        let levels = self.cfg.levels();
        match self.cfg.topology {
            NoiseTopology::PerColumnMagnitude => (0..columns)
                .map(|_| {
                    let d = self.prbs.draw(levels);
                    (gain * (d.level as f64 * lsb), d.sign)
                })
                .collect(),
            NoiseTopology::SharedMagnitude => {
                let level = self.prbs.next_bits(self.cfg.mirror_bits);
                let magnitude = gain * (level as f64 * lsb);
                (0..columns)
                    .map(|_| (magnitude, if self.prbs.next_bit() { 1 } else { -1 }))
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dac(cfg: NoiseDacConfig) -> NoiseDac {
        NoiseDac::new(cfg, Prbs::new(16, 0xACE1).unwrap())
    }

    #[test]
    fn zero_code_gives_zero_current() {
        let curve = DacDecayCurve::from_config(&NoiseDacConfig::default());
        let mut d = dac(NoiseDacConfig::default());
        for k in 0..200 {
            let s = d.noise_dac_current(k % 40);
            if s.code == 0 {
                assert_eq!(s.magnitude, 0.0);
            }
        }
        assert_eq!(curve.decay_gain(0), 1.0);
    }

    #[test]
    fn full_scale_at_zero_decay() {
        let cfg = NoiseDacConfig::default();
        let mut d = dac(cfg.clone());
        let s = (0..100)
            .map(|_| d.noise_dac_current(0))
            .find(|s| s.code == 15)
            .unwrap();
        assert!((s.magnitude - cfg.i_ref_amperes).abs() <= 1e-18);
    }

    #[test]
    fn gain_strictly_decreasing_in_code() {
        for doubling in [true, false] {
            let curve = DacDecayCurve {
                branch_doubling: doubling,
                ..DacDecayCurve::from_config(&NoiseDacConfig::default())
            };
            for c in 0..curve.max_code() {
                assert!(curve.decay_gain(c + 1) < curve.decay_gain(c));
            }
            assert!(curve.decay_gain(curve.max_code()) > 0.0);
        }
    }

    #[test]
    fn counter_mapping_saturates() {
        let curve = DacDecayCurve::from_config(&NoiseDacConfig {
            decay_rate: 8.0,
            ..NoiseDacConfig::default()
        });
        assert_eq!(curve.counter_to_decay(0), 0);
        assert_eq!(curve.counter_to_decay(1), 8);
        assert_eq!(curve.counter_to_decay(31), 248);
        assert_eq!(curve.counter_to_decay(32), 255);
        assert_eq!(curve.counter_to_decay(4095), 255);
        assert!(curve.counter_overflows(4096));
        assert_eq!(curve.counter_to_decay(1 << 20), 255);

        let slow = DacDecayCurve::from_config(&NoiseDacConfig::default());
        assert_eq!(slow.counter_to_decay(3), 0);
        assert_eq!(slow.counter_to_decay(4), 1);
        assert_eq!(slow.counter_to_decay(4095), 255);
    }

    #[test]
    fn overflow_saturates_current() {
        let mut d = dac(NoiseDacConfig::default());
        let sat = d.lsb_current(4096);
        assert_eq!(sat, d.lsb_current(4095));
        assert!(d.warned);
    }

    #[test]
    fn shared_topology_shares_magnitude() {
        let mut d = dac(NoiseDacConfig::default());
        for k in 0..10 {
            let col = d.column_noise(k, 60);
            assert!(col.iter().all(|&(m, _)| m == col[0].0));
        }
    }
}
