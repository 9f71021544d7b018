use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{BenchConfig, EngineKind};
use crate::error::{Error, Result};
use crate::hw::{run_hw_trial, run_lockstep_ideal_trial, Die, HwSetup};
use crate::ising::{load_instance, ProblemInstance, Provenance};
use crate::sb::{run_trial, trial_seed, NoiseSchedule, SbParams, TrialResult};

/// A loaded instance with the identifier used in every output row.
#[derive(Clone, Debug)]
pub struct NamedInstance {
    pub id: String,
    pub path: PathBuf,
    pub instance: ProblemInstance,
}

impl NamedInstance {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Ok(Self {
            id,
            path: path.to_path_buf(),
            instance: load_instance(path)?,
        })
    }

    pub fn denominator(&self) -> Result<Denominator> {
        let best = self
            .instance
            .best_known
            .as_ref()
            .ok_or_else(|| Error::MissingDenominator(self.path.display().to_string()))?;
        if best.cut == 0 {
            return Err(Error::Validation(format!(
                "{}: best-known cut is 0, accuracy undefined",
                self.id
            )));
        }
        Ok(Denominator {
            cut: best.cut,
            provenance: best.provenance.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Denominator {
    pub cut: u64,
    pub provenance: Option<Provenance>,
}

impl Denominator {
    pub fn label(&self) -> String {
        self.provenance
            .as_ref()
            .map_or_else(|| "unspecified".to_string(), |p| p.to_string())
    }

    /// Provenance class; aggregates may only combine one class.
    pub fn class(&self) -> &'static str {
        match self.provenance {
            Some(Provenance::Exact) => "exact",
            Some(Provenance::LocalSearch { .. }) => "local-search",
            Some(Provenance::Gw) => "gw",
            None => "unspecified",
        }
    }
}

/// Reject a set of denominators drawn from different provenance classes.
pub fn check_provenance_mix<'a>(
    items: impl IntoIterator<Item = (&'a str, &'a Denominator)>,
) -> Result<&'static str> {
    let mut class: Option<(&str, &'static str)> = None;
    for (id, d) in items {
        match class {
            None => class = Some((id, d.class())),
            Some((first, c)) if c != d.class() => {
                return Err(Error::Validation(format!(
                    "cannot aggregate denominators of different provenance: {first} is {c}, {id} is {}",
                    d.class()
                )))
            }
            _ => {}
        }
    }
    Ok(class.map_or("unspecified", |(_, c)| c))
}

/// One trial as written to the JSON-lines stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord<'a> {
    pub instance_id: &'a str,
    pub trial_seed: u64,
    pub trajectory: &'a [u64],
    pub best_cut: u64,
    pub best_iteration: usize,
}

impl<'a> TrialRecord<'a> {
    pub fn new(instance_id: &'a str, t: &'a TrialResult) -> Self {
        Self {
            instance_id,
            trial_seed: t.seed,
            trajectory: &t.trajectory,
            best_cut: t.best_cut,
            best_iteration: t.best_iteration,
        }
    }
}

/// Engine selection resolved from a config.
#[derive(Clone, Debug)]
pub struct Solver {
    pub engine: EngineKind,
    pub params: SbParams,
    pub schedule: NoiseSchedule,
    pub setup: HwSetup,
    pub process_seed: u64,
    pub lockstep: bool,
}

impl Solver {
    pub fn from_config(cfg: &BenchConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            engine: cfg.bench.engine,
            params: cfg.sb_params(),
            schedule: cfg.schedule(),
            setup: cfg.hw_setup(),
            process_seed: cfg.bench.process_seed,
            lockstep: cfg.bench.lockstep,
        })
    }

    pub fn iterations(&self) -> usize {
        self.params.iterations
    }

    /// Hardware-equivalent time of `iterations` SB cycles.
    pub fn hardware_time(&self, iterations: usize) -> f64 {
        self.setup.array.time_to_solution(iterations)
    }

    /// `n_trials` trials with seeds split from `base_seed`, in trial order.
    pub fn run(&self, instance: &ProblemInstance, n_trials: usize, base_seed: u64) -> Result<Vec<TrialResult>> {
        if n_trials == 0 {
            return Err(Error::invalid("trials", "must be >= 1"));
        }
        let iters = self.iterations();
        let n = instance.n();
        let die = match self.engine {
            EngineKind::Hardware if self.lockstep => Some(Die::ideal(n)),
            EngineKind::Hardware => Some(Die::sample(n, &self.setup, self.process_seed)?),
            EngineKind::Ideal => None,
        };
        (0..n_trials as u64)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(base_seed, t);
                match (&die, self.lockstep) {
                    (Some(die), _) => run_hw_trial(instance, &self.setup, die, iters, seed),
                    (None, true) => run_lockstep_ideal_trial(instance, &self.setup, iters, seed),
                    (None, false) => run_trial(instance, &self.params, &self.schedule, seed),
                }
            })
            .collect()
    }
}
