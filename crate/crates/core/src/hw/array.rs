//! Current-domain MAC on the 10-T cell array.
//!
//! Column `c` computes the update of spin `c`. Coupling cell `(m, c)` storing
//! `J_mc = 1` sinks current from BL when `x_m = +1` and from BLB when
//! `x_m = -1`. The feedback cell of column `c` does the opposite: it sinks BLB
//! when `x_c = +1`. The comparator resolves `v_bl - v_blb`, so coupling pushes
//! the spin away from its neighbors and feedback holds it in place.

use rand_distr::{Distribution, Normal};

use super::config::HwConfig;
use crate::error::{Error, Result};
use crate::ising::{CouplingMatrix, SpinVector};
use crate::seed;

/// Frozen per-cell multiplicative current factors for one die.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    n: usize,
    coupling: Vec<f64>,
    feedback: Vec<f64>,
}

impl Mismatch {
    pub fn ideal(n: usize) -> Self {
        Self {
            n,
            coupling: vec![1.0; n * n],
            feedback: vec![1.0; n],
        }
    }

    /// Factors drawn from `N(1, sigma)`, redrawn until positive.
    pub fn sample(n: usize, sigma: f64, seed: u64) -> Result<Self> {
        if sigma == 0.0 {
            return Ok(Self::ideal(n));
        }
        let normal = Normal::new(1.0, sigma)
            .map_err(|e| Error::invalid("sigma_cell", e.to_string()))?;
        let mut rng = seed::rng(seed);
        let mut draw = || loop {
            let f: f64 = normal.sample(&mut rng);
            if f > 0.0 {
                return f;
            }
        };
        let coupling = (0..n * n).map(|_| draw()).collect();
        let feedback = (0..n).map(|_| draw()).collect();
        Ok(Self {
            n,
            coupling,
            feedback,
        })
    }

    pub fn from_factors(n: usize, coupling: Vec<f64>, feedback: Vec<f64>) -> Result<Self> {
        if coupling.len() != n * n || feedback.len() != n {
            return Err(Error::Validation(format!(
                "mismatch tables sized {}/{} do not match n = {n}",
                coupling.len(),
                feedback.len()
            )));
        }
        if coupling.iter().chain(&feedback).any(|&f| f.is_nan() || f <= 0.0) {
            return Err(Error::Validation("mismatch factors must be positive".into()));
        }
        Ok(Self {
            n,
            coupling,
            feedback,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Factor of the coupling cell in row `m`, column `c`.
    #[inline]
    pub fn coupling(&self, m: usize, c: usize) -> f64 {
        self.coupling[m * self.n + c]
    }

    #[inline]
    pub fn feedback(&self, c: usize) -> f64 {
        self.feedback[c]
    }
}

/// Bitline pair currents of one column, in amperes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ColumnCurrents {
    pub i_bl: f64,
    pub i_blb: f64,
}

/// Summed cell currents on every bitline pair for state `x`.
pub fn cell_currents(
    j: &CouplingMatrix,
    x: &SpinVector,
    cfg: &HwConfig,
    mismatch: &Mismatch,
) -> Result<Vec<ColumnCurrents>> {
    let n = j.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    if mismatch.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: mismatch.n(),
        });
    }
    let xs = x.as_slice();
    Ok((0..n)
        .map(|c| {
            let mut col = ColumnCurrents::default();
            let fb = cfg.i_fb_amperes * mismatch.feedback(c);
            if xs[c] > 0 {
                col.i_blb += fb;
            } else {
                col.i_bl += fb;
            }
            for m in (0..n).filter(|&m| m != c) {
                let i = if j.get(m, c) != 0 {
                    cfg.i_c_amperes * mismatch.coupling(m, c)
                } else {
                    cfg.i_leak_amperes
                };
                if xs[m] > 0 {
                    col.i_bl += i;
                } else {
                    col.i_blb += i;
                }
            }
            col
        })
        .collect())
}

/// Result of discharging one precharged bitline for one wordline pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Discharge {
    /// Voltage drop, clamped to the precharge level.
    pub delta_v: f64,
    /// Bitline voltage after the pulse.
    pub v_final: f64,
    /// The linear model asked for a drop below ground.
    pub saturated: bool,
}

/// Constant-current discharge: `dV = I * t_pulse / C_bl`, clamped at ground.
pub fn bitline_discharge(i: f64, cfg: &HwConfig) -> Discharge {
    debug_assert!(i >= 0.0);
    let dv = i * cfg.volts_per_amp();
    if dv > cfg.v_precharge_volts {
        Discharge {
            delta_v: cfg.v_precharge_volts,
            v_final: 0.0,
            saturated: true,
        }
    } else {
        Discharge {
            delta_v: dv,
            v_final: cfg.v_precharge_volts - dv,
            saturated: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::random_graph;

    #[test]
    fn ten_microamps_for_four_ns_on_200ff() {
        let cfg = HwConfig::default();
        let d = bitline_discharge(10e-6, &cfg);
        assert_eq!(d.delta_v, 0.2);
        assert!(!d.saturated);
        assert_eq!(bitline_discharge(0.0, &cfg).delta_v, 0.0);
    }

    #[test]
    fn overdrive_clamps_at_ground() {
        let cfg = HwConfig::default();
        let d = bitline_discharge(1e-3, &cfg);
        assert!(d.saturated);
        assert_eq!(d.delta_v, 1.8);
        assert_eq!(d.v_final, 0.0);
    }

    #[test]
    fn fully_connected_column_matches_measured_cell_test() {
        // Array programmed with ones, all spins +1: 59 C cells sink BL and the
        // single FB cell sinks BLB.
        let p = random_graph(60, 1.0, 0).unwrap();
        let cfg = HwConfig::default();
        let x = SpinVector::uniform(60, 1);
        let cols = cell_currents(&p.coupling, &x, &cfg, &Mismatch::ideal(60)).unwrap();
        for col in cols {
            assert!((col.i_bl - 59.0 * cfg.i_c_amperes).abs() < 1e-18);
            assert_eq!(col.i_blb, cfg.i_fb_amperes);
            assert!(bitline_discharge(col.i_bl, &cfg).delta_v > bitline_discharge(col.i_blb, &cfg).delta_v);
        }
    }

    #[test]
    fn empty_array_carries_only_feedback() {
        let j = CouplingMatrix::from_edges(4, &[]).unwrap();
        let cfg = HwConfig::default();
        let x = SpinVector::new(vec![1, -1, 1, -1]).unwrap();
        let cols = cell_currents(&j, &x, &cfg, &Mismatch::ideal(4)).unwrap();
        for (c, col) in cols.iter().enumerate() {
            if x[c] > 0 {
                assert_eq!((col.i_bl, col.i_blb), (0.0, cfg.i_fb_amperes));
            } else {
                assert_eq!((col.i_bl, col.i_blb), (cfg.i_fb_amperes, 0.0));
            }
        }
    }

    #[test]
    fn leakage_flows_through_off_cells() {
        let j = CouplingMatrix::from_edges(3, &[]).unwrap();
        let cfg = HwConfig {
            i_leak_amperes: 1e-9,
            ..HwConfig::default()
        };
        let x = SpinVector::uniform(3, 1);
        let cols = cell_currents(&j, &x, &cfg, &Mismatch::ideal(3)).unwrap();
        assert!((cols[0].i_bl - 2e-9).abs() < 1e-24);
    }

    #[test]
    fn mismatch_factors_positive_and_frozen() {
        let a = Mismatch::sample(20, 0.05, 3).unwrap();
        let b = Mismatch::sample(20, 0.05, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.coupling.iter().all(|&f| f > 0.0));
        assert!(Mismatch::from_factors(2, vec![1.0; 4], vec![1.0, -0.1]).is_err());
    }
}
