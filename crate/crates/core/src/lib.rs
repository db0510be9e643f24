//! Simulator for Bell-CHSH experiments under relativistic timing.
//!
//! Three causal models are compared:
//!
//! - a local deterministic model, outcomes fixed by the local setting and a
//!   shared source variable;
//! - the quantum singlet correlations, independent of timing;
//! - a time-ordered nonlocal (Suarez-Scarani) model, where a device that
//!   measures second in its own rest frame answers as a function of the
//!   earlier outcome.
//!
//! Run in the standard geometry (devices at rest, one measures first) and in
//! the before-before geometry (each device first in its own frame), the
//! nonlocal model reproduces the quantum violation in the first case and
//! falls back to local correlations in the second, whereas the quantum
//! prediction is the same in both.

pub mod cli;
pub mod harness;
pub mod kinematics;
pub mod models;
pub mod statistics;

pub use harness::{
    run_discrimination_suite, run_experiment, ExperimentConfig, ExperimentReport, SuiteReport, Verdict,
};
pub use kinematics::{classify_timing, ExperimentGeometry, Party, TimingClass};
pub use models::{CausalModel, HiddenState, ModelId, Outcome, Setting};
