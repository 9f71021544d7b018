//! Experiment harness: configuration, engine dispatch, aggregation and the
//! subcommands behind the `sbcim` binary.

pub mod commands;
pub mod config;
pub mod report;
pub mod run;

pub use commands::{
    cmd_baseline, cmd_bench, cmd_gen, cmd_oracle, cmd_solve, cmd_sweep, BaselineRecord, Manifest, OracleMethod,
    OracleRecord, SolveSummary, SweepReport,
};
pub use config::{BenchConfig, EngineKind, GenerateConfig};
pub use report::{BenchReport, InstanceReport, IterationStats};
pub use run::{Denominator, NamedInstance, Solver, TrialRecord};
