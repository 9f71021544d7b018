//! Bias-voltage to cell-current mapping.
//!
//! The cell bias sits at the source of the current-setting device, so the
//! effective overdrive shrinks as the bias approaches the rail. The mapping is
//! a power law in the remaining headroom:
//!
//! ```text
//! I(V) = i_max * ((v_rail - V) / v_rail)^exponent
//! ```
//!
//! The constants are modeling choices, not fitted to silicon.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SquareLaw {
    /// Current at zero bias.
    pub i_max_amperes: f64,
    pub exponent: f64,
    pub v_rail_volts: f64,
}

impl Default for SquareLaw {
    fn default() -> Self {
        Self {
            i_max_amperes: 10e-6,
            exponent: 2.0,
            v_rail_volts: 1.8,
        }
    }
}

pub fn bias_to_current(v_bias: f64, law: &SquareLaw) -> Result<f64> {
    if !(v_bias > 0.0 && v_bias <= law.v_rail_volts) {
        return Err(Error::invalid(
            "v_bias",
            format!("{v_bias} V outside (0, {}] V", law.v_rail_volts),
        ));
    }
    let headroom = (law.v_rail_volts - v_bias) / law.v_rail_volts;
    Ok(law.i_max_amperes * headroom.powf(law.exponent))
}
