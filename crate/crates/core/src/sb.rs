//! Discrete simulated bifurcation.
//!
//! One iteration maps the spin vector through
//!
//! ```text
//! y_i    = alpha * x_i - beta * sum_m J_im x_m + zeta_{k,i}
//! x'_i   = sign(y_i)      (x'_i = x_i when y_i == 0)
//! ```
//!
//! with every `y_i` computed from the old state (synchronous update). The
//! injected noise `zeta_{k,i}` is uniform over `2L` symmetric levels spanning
//! `[-A_k, +A_k]`, drawn independently per node, with an amplitude `A_k` that
//! may decay with the iteration index.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hw::dac::DacDecayCurve;
use crate::ising::{cut_size, CouplingMatrix, ProblemInstance, SpinVector};
use crate::seed::{self, stream};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbParams {
    /// Self-feedback gain.
    pub alpha: f64,
    /// Coupling gain.
    pub beta: f64,
    /// Number of SB cycles per trial.
    pub iterations: usize,
    /// Base seed from which per-trial seeds are split.
    #[serde(default)]
    pub seed: u64,
}

impl SbParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("must be > 0, got {}", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid("beta", format!("must be >= 0, got {}", self.beta)));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iterations", "must be >= 1"));
        }
        Ok(())
    }
}

impl Default for SbParams {
    /// Single tuning point used across the 60-node benchmark set.
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.1,
            iterations: 20,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    None,
    UniformConstant,
    UniformDecaying,
}

/// Attenuation applied to the initial noise amplitude as a function of `k`.
#[derive(Clone)]
pub enum DecayLaw {
    /// `A_k = A_0 / (1 + rate * k)`.
    Hyperbolic { rate: f64 },
    /// The noise DAC's resistive-branch attenuation curve.
    Dac(DacDecayCurve),
    /// Any non-increasing gain with `gain(0) = 1`.
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl DecayLaw {
    pub fn gain(&self, k: usize) -> f64 {
        match self {
            DecayLaw::Hyperbolic { rate } => 1.0 / (1.0 + rate * k as f64),
            DecayLaw::Dac(curve) => curve.gain_at(k),
            DecayLaw::Custom(f) => f(k),
        }
    }
}

impl fmt::Debug for DecayLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayLaw::Hyperbolic { rate } => f.debug_struct("Hyperbolic").field("rate", rate).finish(),
            DecayLaw::Dac(c) => f.debug_tuple("Dac").field(c).finish(),
            DecayLaw::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NoiseSchedule {
    pub kind: NoiseKind,
    /// Initial half-range `A_0`, in the same units as `alpha * x`.
    pub amplitude0: f64,
    pub decay: DecayLaw,
    /// Number of magnitude levels `L`.
    pub levels: u32,
}

impl NoiseSchedule {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            amplitude0: 0.0,
            decay: DecayLaw::Hyperbolic { rate: 0.0 },
            levels: 16,
        }
    }

    /// Schedule paired with `SbParams::default()`.
    pub fn tuned() -> Self {
        Self::decaying(4.0, DecayLaw::Hyperbolic { rate: 0.2 })
    }

    pub fn constant(amplitude0: f64) -> Self {
        Self {
            kind: NoiseKind::UniformConstant,
            amplitude0,
            ..Self::none()
        }
    }

    pub fn decaying(amplitude0: f64, decay: DecayLaw) -> Self {
        Self {
            kind: NoiseKind::UniformDecaying,
            amplitude0,
            decay,
            levels: 16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude0 >= 0.0 && self.amplitude0.is_finite()) {
            return Err(Error::invalid(
                "amplitude0",
                format!("must be finite and >= 0, got {}", self.amplitude0),
            ));
        }
        if self.levels < 2 {
            return Err(Error::invalid("levels", format!("must be >= 2, got {}", self.levels)));
        }
        if let DecayLaw::Hyperbolic { rate } = self.decay {
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(Error::invalid("decay_rate", format!("must be >= 0, got {rate}")));
            }
        }
        Ok(())
    }

    /// Half-range `A_k` at iteration `k`.
    pub fn amplitude(&self, k: usize) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::UniformConstant => self.amplitude0,
            NoiseKind::UniformDecaying => self.amplitude0 * self.decay.gain(k),
        }
    }

    /// Spacing between adjacent magnitude levels at iteration `k`.
    pub fn level_step(&self, k: usize) -> f64 {
        self.amplitude(k) / (self.levels - 1) as f64
    }

    pub fn is_enabled(&self) -> bool {
        self.kind != NoiseKind::None
    }
}

/// One quantized noise draw: a polarity and a magnitude level index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseDraw {
    pub sign: i8,
    pub level: u32,
}

/// Supplier of quantized noise draws.
pub trait NoiseSource {
    /// Draw a level uniform on `0..levels` and an independent fair sign.
    fn draw(&mut self, levels: u32) -> NoiseDraw;
}

impl<N: NoiseSource + ?Sized> NoiseSource for &mut N {
    fn draw(&mut self, levels: u32) -> NoiseDraw {
        (**self).draw(levels)
    }
}

/// Noise drawn from a seeded ChaCha stream.
pub struct RngNoise(pub seed::Rng);

impl RngNoise {
    pub fn new(seed: u64) -> Self {
        Self(seed::rng(seed))
    }
}

impl NoiseSource for RngNoise {
    fn draw(&mut self, levels: u32) -> NoiseDraw {
        let level = self.0.random_range(0..levels);
        let sign = if self.0.random::<bool>() { 1 } else { -1 };
        NoiseDraw { sign, level }
    }
}

/// Sample `zeta_k` for one node: `sign * level * A_k / (L - 1)`.
pub fn noise_sample<N: NoiseSource>(schedule: &NoiseSchedule, k: usize, source: &mut N) -> f64 {
    if !schedule.is_enabled() {
        return 0.0;
    }
    let d = source.draw(schedule.levels);
    quantized_noise(d, schedule.level_step(k))
}

#[inline]
pub(crate) fn quantized_noise(d: NoiseDraw, step: f64) -> f64 {
    d.sign as f64 * (d.level as f64 * step)
}

/// One synchronous SB iteration.
pub fn sb_step<N: NoiseSource>(
    j: &CouplingMatrix,
    x: &SpinVector,
    params: &SbParams,
    schedule: &NoiseSchedule,
    k: usize,
    noise: &mut N,
) -> Result<SpinVector> {
    if x.len() != j.n() {
        return Err(Error::DimensionMismatch {
            expected: j.n(),
            actual: x.len(),
        });
    }
    let xs = x.as_slice();
    let step = schedule.level_step(k);
    let next = (0..j.n())
        .map(|i| {
            let field = j.local_field(i, xs) as f64;
            let zeta = if schedule.is_enabled() {
                quantized_noise(noise.draw(schedule.levels), step)
            } else {
                0.0
            };
            let y = params.alpha * xs[i] as f64 - params.beta * field + zeta;
            decide(y, xs[i])
        })
        .collect();
    Ok(SpinVector::from_raw(next))
}

/// Sign with hold-on-zero.
#[inline]
pub(crate) fn decide(y: f64, prev: i8) -> i8 {
    if y > 0.0 {
        1
    } else if y < 0.0 {
        -1
    } else {
        prev
    }
}

/// A synchronous spin-update engine.
pub trait SpinEngine {
    fn step(&mut self, j: &CouplingMatrix, x: &SpinVector, k: usize) -> Result<SpinVector>;
}

/// The ideal-math engine: exact evaluation of the SB update rule.
pub struct IdealEngine<'a, N> {
    pub params: &'a SbParams,
    pub schedule: &'a NoiseSchedule,
    pub noise: N,
}

impl<N: NoiseSource> SpinEngine for IdealEngine<'_, N> {
    fn step(&mut self, j: &CouplingMatrix, x: &SpinVector, k: usize) -> Result<SpinVector> {
        sb_step(j, x, self.params, self.schedule, k, &mut self.noise)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    pub final_spins: SpinVector,
    pub best_cut: u64,
    /// Trajectory index (0-based) at which `best_cut` first occurred.
    pub best_iteration: usize,
    /// Cut after each iteration.
    pub trajectory: Vec<u64>,
    pub seed: u64,
}

impl TrialResult {
    /// Best cut found within the first `iterations` steps.
    pub fn best_within(&self, iterations: usize) -> u64 {
        let end = iterations.min(self.trajectory.len());
        self.trajectory[..end].iter().copied().max().unwrap_or(0)
    }

    /// Running maximum of the trajectory.
    pub fn best_so_far(&self) -> Vec<u64> {
        self.trajectory
            .iter()
            .scan(0u64, |best, &c| {
                *best = (*best).max(c);
                Some(*best)
            })
            .collect()
    }
}

/// Initial spin state for a trial.
pub fn initial_spins(n: usize, trial_seed: u64) -> SpinVector {
    SpinVector::random(n, &mut seed::rng(seed::split(trial_seed, stream::INIT)))
}

/// Run `iterations` steps of `engine` from `x0`, recording the cut after each.
pub fn run_engine<E: SpinEngine>(
    engine: &mut E,
    j: &CouplingMatrix,
    x0: SpinVector,
    iterations: usize,
    trial_seed: u64,
) -> Result<TrialResult> {
    let mut x = x0;
    let mut trajectory = Vec::with_capacity(iterations);
    let mut best_cut = 0;
    let mut best_iteration = 0;
    for k in 0..iterations {
        x = engine.step(j, &x, k)?;
        let cut = cut_size(j, &x)?;
        if trajectory.is_empty() || cut > best_cut {
            best_cut = cut;
            best_iteration = k;
        }
        trajectory.push(cut);
    }
    Ok(TrialResult {
        final_spins: x,
        best_cut,
        best_iteration,
        trajectory,
        seed: trial_seed,
    })
}

/// One ideal-engine trial from a uniformly random initial state.
pub fn run_trial(
    instance: &ProblemInstance,
    params: &SbParams,
    schedule: &NoiseSchedule,
    trial_seed: u64,
) -> Result<TrialResult> {
    params.validate()?;
    schedule.validate()?;
    let j = &instance.coupling;
    let mut engine = IdealEngine {
        params,
        schedule,
        noise: RngNoise::new(seed::split(trial_seed, stream::NOISE)),
    };
    let x0 = initial_spins(j.n(), trial_seed);
    run_engine(&mut engine, j, x0, params.iterations, trial_seed)
}

/// Seed of trial `t` under `base_seed`.
pub fn trial_seed(base_seed: u64, t: u64) -> u64 {
    seed::split(base_seed, t)
}

pub fn run_trials(
    instance: &ProblemInstance,
    params: &SbParams,
    schedule: &NoiseSchedule,
    n_trials: usize,
    base_seed: u64,
) -> Result<Vec<TrialResult>> {
    if n_trials == 0 {
        return Err(Error::invalid("n_trials", "must be >= 1"));
    }
    run_trial_range(instance, params, schedule, 0..n_trials as u64, base_seed)
}

/// Trials with indices in `range`; `0..a` followed by `a..b` equals `0..b`.
pub fn run_trial_range(
    instance: &ProblemInstance,
    params: &SbParams,
    schedule: &NoiseSchedule,
    range: Range<u64>,
    base_seed: u64,
) -> Result<Vec<TrialResult>> {
    range
        .into_par_iter()
        .map(|t| run_trial(instance, params, schedule, trial_seed(base_seed, t)))
        .collect()
}
