//! Galois linear-feedback shift register.

use crate::error::{Error, Result};
use crate::sb::{NoiseDraw, NoiseSource};
use crate::seed;

/// Toggle masks of maximal-length Galois LFSRs, indexed by register width.
const MAXIMAL_TAPS: &[(u32, u32)] = &[
    (16, 0xD008),
    (17, 0x1_2000),
    (18, 0x2_0400),
    (19, 0x4_0023),
    (20, 0x9_0000),
    (21, 0x14_0000),
    (22, 0x30_0000),
    (23, 0x42_0000),
    (24, 0xE1_0000),
];

pub(crate) fn taps_for_width(width: u32) -> Result<u32> {
    MAXIMAL_TAPS
        .iter()
        .find(|(w, _)| *w == width)
        .map(|&(_, t)| t)
        .ok_or_else(|| Error::invalid("prbs_width", format!("no maximal taps for width {width}; use 16..=24")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prbs {
    state: u32,
    taps: u32,
    width: u32,
}

impl Prbs {
    pub fn new(width: u32, state: u32) -> Result<Self> {
        let taps = taps_for_width(width)?;
        Self::with_taps(width, taps, state)
    }

    pub fn with_taps(width: u32, taps: u32, state: u32) -> Result<Self> {
        if !(2..=32).contains(&width) {
            return Err(Error::invalid("prbs_width", format!("{width} outside 2..=32")));
        }
        let mask = Self::mask(width);
        if state & mask == 0 {
            return Err(Error::invalid("prbs_state", "register must be nonzero"));
        }
        Ok(Self {
            state: state & mask,
            taps: taps & mask,
            width,
        })
    }

    /// Register seeded from a 64-bit seed; never all-zeros.
    pub fn from_seed(width: u32, seed: u64) -> Result<Self> {
        let s = (seed::splitmix64(seed) as u32) & Self::mask(width);
        Self::new(width, if s == 0 { 1 } else { s })
    }

    fn mask(width: u32) -> u32 {
        if width == 32 {
            u32::MAX
        } else {
            (1 << width) - 1
        }
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Shift once and return the output bit.
    #[inline]
    pub fn next_bit(&mut self) -> bool {
        let out = self.state & 1 == 1;
        self.state >>= 1;
        if out {
            self.state ^= self.taps;
        }
        out
    }

    /// `count` bits, first bit most significant.
    pub fn next_bits(&mut self, count: u32) -> u32 {
        (0..count).fold(0, |acc, _| (acc << 1) | self.next_bit() as u32)
    }
}

impl NoiseSource for Prbs {
    /// `log2(levels)` magnitude bits followed by one polarity bit.
    fn draw(&mut self, levels: u32) -> NoiseDraw {
        assert!(levels.is_power_of_two(), "PRBS noise needs a power-of-two level count");
        let level = self.next_bits(levels.trailing_zeros());
        let sign = if self.next_bit() { 1 } else { -1 };
        NoiseDraw { sign, level }
    }
}
