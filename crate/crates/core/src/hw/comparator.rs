//! Strong-arm latch comparators with trimmed input offsets.

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::sb::decide;
use crate::seed;

#[derive(Clone, Debug, PartialEq)]
pub struct ComparatorBank {
    /// Input-referred offset per column, volts.
    pub offsets: Vec<f64>,
    /// Calibration voltage per column, volts.
    pub trims: Vec<f64>,
    pub sigma_off: f64,
}

impl ComparatorBank {
    pub fn ideal(n: usize) -> Self {
        Self {
            offsets: vec![0.0; n],
            trims: vec![0.0; n],
            sigma_off: 0.0,
        }
    }

    /// Offsets drawn from `N(0, sigma_off)`, untrimmed.
    pub fn sample(n: usize, sigma_off: f64, seed: u64) -> Result<Self> {
        if sigma_off == 0.0 {
            return Ok(Self::ideal(n));
        }
        let normal = Normal::new(0.0, sigma_off)
            .map_err(|e| Error::invalid("sigma_off_volts", e.to_string()))?;
        let mut rng = seed::rng(seed);
        Ok(Self {
            offsets: (0..n).map(|_| normal.sample(&mut rng)).collect(),
            trims: vec![0.0; n],
            sigma_off,
        })
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    #[inline]
    pub fn residual(&self, column: usize) -> f64 {
        self.offsets[column] - self.trims[column]
    }

    /// Post-calibration sanity bound: every residual within `5 * sigma_off`.
    pub fn residuals_bounded(&self) -> bool {
        (0..self.len()).all(|c| self.residual(c).abs() <= 5.0 * self.sigma_off)
    }

    /// Latch decision on the differential input `v_bl - v_blb`.
    #[inline]
    pub fn decide_differential(&self, dv: f64, column: usize, prev_spin: i8) -> i8 {
        decide(dv + self.residual(column), prev_spin)
    }
}

/// Resolve one column: `+1` when BL sits above BLB after offset correction,
/// `-1` when below, and the previous spin on an exact tie.
pub fn comparator_decide(
    v_bl: f64,
    v_blb: f64,
    column: usize,
    bank: &ComparatorBank,
    prev_spin: i8,
) -> i8 {
    bank.decide_differential(v_bl - v_blb, column, prev_spin)
}

/// Set every trim to the multiple of `trim_lsb` nearest its offset.
pub fn calibrate_offsets(bank: &ComparatorBank, trim_lsb: f64) -> Result<ComparatorBank> {
    if !(trim_lsb > 0.0 && trim_lsb.is_finite()) {
        return Err(Error::invalid("trim_lsb_volts", format!("must be > 0, got {trim_lsb}")));
    }
    Ok(ComparatorBank {
        trims: bank
            .offsets
            .iter()
            .map(|&o| (o / trim_lsb).round() * trim_lsb)
            .collect(),
        ..bank.clone()
    })
}
