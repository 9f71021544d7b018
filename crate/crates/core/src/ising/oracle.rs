//! Exhaustive ground-state search.
//!
//! The last spin is pinned to +1 (a cut is invariant under global flip), and
//! the remaining `n - 1` spins are enumerated in Gray-code order so each step
//! flips exactly one spin and updates the cut in O(degree). The space is split
//! into fixed prefix chunks that run on the rayon pool; the reduction breaks
//! ties by chunk index, so the witness does not depend on thread count.

use rayon::prelude::*;

use super::{CouplingMatrix, SpinVector};
use crate::error::{Error, Result};

/// Largest instance the exhaustive oracle accepts.
pub const BRUTE_FORCE_CAP: usize = 26;

const PREFIX_BITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundState {
    pub cut: u64,
    pub spins: SpinVector,
}

pub fn brute_force_ground_state(j: &CouplingMatrix) -> Result<GroundState> {
    let n = j.n();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge {
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let free = n - 1;
    let prefix = free.min(PREFIX_BITS);
    let low = free - prefix;

    let (cut, chunk, gray) = (0..1u64 << prefix)
        .into_par_iter()
        .map(|chunk| {
            let (cut, gray) = search_chunk(j, chunk, low);
            (cut, chunk, gray)
        })
        .reduce(
            || (0, u64::MAX, 0),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );

    let bits = (chunk << low) | gray;
    Ok(GroundState {
        cut,
        spins: SpinVector::from_bits(n, bits),
    })
}

/// Best cut within one prefix chunk, with the low-bit pattern reaching it.
fn search_chunk(j: &CouplingMatrix, chunk: u64, low: usize) -> (u64, u64) {
    let n = j.n();
    let mut x = SpinVector::from_bits(n, chunk << low).0;
    let mut field: Vec<i32> = (0..n).map(|i| j.local_field(i, &x)).collect();
    let mut cut = super::cut_unchecked(j, &x) as i64;

    let mut best = cut;
    let mut best_pattern = 0u64;
    for t in 1u64..(1u64 << low) {
        let i = t.trailing_zeros() as usize;
        let old = x[i];
        cut += (old as i64) * (field[i] as i64);
        x[i] = -old;
        let delta = -2 * old as i32;
        for &m in j.neighbors(i) {
            field[m as usize] += delta;
        }
        if cut > best {
            best = cut;
            best_pattern = t ^ (t >> 1);
        }
    }
    (best as u64, best_pattern)
}
