//! Reproducible experiment runs and the standard-vs-before-before
//! discrimination suite.
//!
//! Randomness comes from two families of ChaCha8 streams derived from the
//! config seed: one for hidden states, one for the order in which setting
//! pairs are presented. The two never share state, so setting choices are
//! independent of the hidden variables by construction.
//!
//! Trials are cut into fixed blocks of [`BLOCK_TRIALS_PER_PAIR`] trials per
//! setting pair. Each block owns its substreams (keyed by seed and block
//! index), so any number of workers reproduces the same counts.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::kinematics::{self, ExperimentGeometry, KinematicsError, Party, TimingClass};
use crate::models::{CausalModel, HiddenState, ModelError, ModelId, Setting};
use crate::statistics::{self, ChshResult, CorrelationEstimate, JointCounts, StatsError, LOCAL_BOUND};

/// Trials per setting pair in one independently seeded block.
pub const BLOCK_TRIALS_PER_PAIR: u64 = 16_384;

/// Slack above the local bound still accepted as "no violation".
pub const NO_VIOLATION_MARGIN: f64 = 0.05;

/// Minimum trials per pair at which suite verdicts are meaningful.
pub const MIN_VERDICT_TRIALS: u64 = 100_000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("invalid config: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
enum StreamLabel {
    Hidden = 1,
    Settings = 2,
    Probe = 3,
}

fn stream(seed: u64, label: StreamLabel, tag: u32, block: u64) -> ChaCha8Rng {
    debug_assert!(tag < 1 << 24 && block < 1 << 32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((label as u64) << 56 | (tag as u64) << 32 | block);
    rng
}

fn block_count(trials_per_pair: u64) -> u64 {
    trials_per_pair.div_ceil(BLOCK_TRIALS_PER_PAIR)
}

fn block_len(trials_per_pair: u64, block: u64) -> u64 {
    BLOCK_TRIALS_PER_PAIR.min(trials_per_pair - block * BLOCK_TRIALS_PER_PAIR)
}

/// Execution knobs that never change results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses all cores, `Some(1)` runs inline.
    pub workers: Option<usize>,
}

fn map_reduce<T, F, R>(blocks: u64, opts: RunOptions, map: F, reduce: R, identity: T) -> T
where
    T: Send + Sync + Clone,
    F: Fn(u64) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if opts.workers != Some(1) {
            use rayon::prelude::*;
            let run = || {
                (0..blocks)
                    .into_par_iter()
                    .map(&map)
                    .reduce(|| identity.clone(), &reduce)
            };
            return match opts.workers {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .expect("thread pool")
                    .install(run),
                None => run(),
            };
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = opts;
    (0..blocks).map(map).fold(identity, reduce)
}

/// Counts `n` trials of one setting pair in a fixed timing class, drawing
/// hidden states from the probe stream family tagged with `tag`.
pub fn sample_counts(
    model: ModelId,
    timing: TimingClass,
    a: Setting,
    b: Setting,
    n: u64,
    seed: u64,
    tag: u32,
) -> JointCounts {
    let m = model.model();
    map_reduce(
        block_count(n),
        RunOptions::default(),
        |block| {
            let mut rng = stream(seed, StreamLabel::Probe, tag, block);
            let mut counts = JointCounts::empty(a, b);
            for _ in 0..block_len(n, block) {
                let h = HiddenState::sample(&mut rng);
                let (x, y) = m.respond(a, b, timing, &h);
                counts.record(x, y);
            }
            counts
        },
        |mut acc, c| {
            acc.merge(&c);
            acc
        },
        JointCounts::empty(a, b),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub geometry: ExperimentGeometry,
    pub model: ModelId,
    pub alice_settings: [Setting; 2],
    pub bob_settings: [Setting; 2],
    pub trials_per_pair: u64,
    pub seed: u64,
    pub epsilon: f64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials_per_pair == 0 {
            return Err(HarnessError::InvalidConfig {
                field: "trials_per_pair",
                reason: "must be at least 1".into(),
            });
        }
        if block_count(self.trials_per_pair) >= 1 << 32 {
            return Err(HarnessError::InvalidConfig {
                field: "trials_per_pair",
                reason: "too large".into(),
            });
        }
        self.geometry.validate()?;
        Ok(())
    }

    /// Setting pairs in CHSH order: `(a1,b1), (a1,b2), (a2,b1), (a2,b2)`.
    pub fn pairs(&self) -> [(Setting, Setting); 4] {
        let [a1, a2] = self.alice_settings;
        let [b1, b2] = self.bob_settings;
        [(a1, b1), (a1, b2), (a2, b1), (a2, b2)]
    }

    /// Same experiment with Alice and Bob exchanged.
    pub fn swapped(&self) -> Self {
        ExperimentConfig {
            geometry: self.geometry.swapped(),
            alice_settings: self.bob_settings,
            bob_settings: self.alice_settings,
            ..self.clone()
        }
    }
}

/// Standard CHSH angles: `a ∈ {0, π/2}`, `b ∈ {π/4, -π/4}`.
pub fn chsh_settings() -> ([Setting; 2], [Setting; 2]) {
    let s = |x: f64| Setting::new(x).expect("finite");
    ([s(0.0), s(FRAC_PI_2)], [s(FRAC_PI_4), s(-FRAC_PI_4)])
}

pub const PAIR_LABELS: [&str; 4] = ["a1b1", "a1b2", "a2b1", "a2b2"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub label: &'static str,
    pub counts: JointCounts,
    pub estimate: CorrelationEstimate,
}

/// Marginal z statistics. `alice[i]` compares Alice's `P(+1)` at `a_i`
/// across `b1`/`b2`; `bob[j]` compares Bob's at `b_j` across `a1`/`a2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoSignalingMatrix {
    pub alice: [f64; 2],
    pub bob: [f64; 2],
}

impl NoSignalingMatrix {
    pub fn max_abs(&self) -> f64 {
        self.alice.iter().chain(&self.bob).fold(0.0, |m, z| m.max(z.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub timing_class: TimingClass,
    pub pairs: Vec<PairReport>,
    pub chsh: ChshResult,
    pub nosignaling: NoSignalingMatrix,
    pub config: ExperimentConfig,
    pub seed: u64,
}

fn run_block(
    cfg: &ExperimentConfig,
    model: &dyn CausalModel,
    timing: TimingClass,
    block: u64,
    mut visit: impl FnMut(usize, &HiddenState, (crate::models::Outcome, crate::models::Outcome)),
) {
    let pairs = cfg.pairs();
    let per_pair = block_len(cfg.trials_per_pair, block) as usize;
    let mut schedule: Vec<u8> = (0..4u8).flat_map(|p| std::iter::repeat_n(p, per_pair)).collect();
    schedule.shuffle(&mut stream(cfg.seed, StreamLabel::Settings, 0, block));

    let mut hidden = stream(cfg.seed, StreamLabel::Hidden, 0, block);
    for p in schedule {
        let p = p as usize;
        let h = HiddenState::sample(&mut hidden);
        let (a, b) = pairs[p];
        visit(p, &h, model.respond(a, b, timing, &h));
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    run_experiment_with(cfg, RunOptions::default())
}

pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    opts: RunOptions,
) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    let timing = kinematics::classify_timing(&cfg.geometry, cfg.epsilon)?;
    let model = cfg.model.model();
    let empty = cfg.pairs().map(|(a, b)| JointCounts::empty(a, b));

    let counts = map_reduce(
        block_count(cfg.trials_per_pair),
        opts,
        |block| {
            let mut counts = empty;
            run_block(cfg, model, timing, block, |p, _, (x, y)| counts[p].record(x, y));
            counts
        },
        |mut acc, c| {
            for (a, c) in acc.iter_mut().zip(&c) {
                a.merge(c);
            }
            acc
        },
        empty,
    );

    let estimates = counts
        .iter()
        .map(statistics::estimate_correlation)
        .collect::<Result<Vec<_>, _>>()?;
    let chsh = statistics::chsh(estimates[0], estimates[1], estimates[2], estimates[3]);
    let z = |i: usize, j: usize, party| statistics::nosignaling_test(&counts[i], &counts[j], party);
    let nosignaling = NoSignalingMatrix {
        alice: [z(0, 1, Party::Alice)?, z(2, 3, Party::Alice)?],
        bob: [z(0, 2, Party::Bob)?, z(1, 3, Party::Bob)?],
    };
    let pairs = counts
        .iter()
        .zip(&estimates)
        .zip(PAIR_LABELS)
        .map(|((c, e), label)| PairReport { label, counts: *c, estimate: *e })
        .collect();

    Ok(ExperimentReport {
        timing_class: timing,
        pairs,
        chsh,
        nosignaling,
        config: cfg.clone(),
        seed: cfg.seed,
    })
}

/// One trial as scheduled by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub pair: usize,
    pub hidden: HiddenState,
}

/// The first `max_trials` trials of `cfg` in schedule order.
pub fn trial_trace(cfg: &ExperimentConfig, max_trials: usize) -> Result<Vec<TrialRecord>, HarnessError> {
    cfg.validate()?;
    let timing = kinematics::classify_timing(&cfg.geometry, cfg.epsilon)?;
    let model = cfg.model.model();
    let mut out = Vec::with_capacity(max_trials);
    for block in 0..block_count(cfg.trials_per_pair) {
        if out.len() >= max_trials {
            break;
        }
        run_block(cfg, model, timing, block, |pair, h, _| {
            if out.len() < max_trials {
                out.push(TrialRecord { pair, hidden: *h });
            }
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "violation")]
    Violation,
    #[serde(rename = "no-violation")]
    NoViolation,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Verdict {
    /// `|S| - 3σ > 2` is a violation, `|S| + 3σ < 2 + margin` is not.
    pub fn of(chsh: &ChshResult) -> Verdict {
        let spread = 3.0 * chsh.stderr;
        if chsh.s.abs() - spread > LOCAL_BOUND {
            Verdict::Violation
        } else if chsh.s.abs() + spread < LOCAL_BOUND + NO_VIOLATION_MARGIN {
            Verdict::NoViolation
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Violation => "violation",
            Verdict::NoViolation => "no-violation",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Model order and expected `[standard, before-before]` verdicts.
pub const EXPECTED_VERDICTS: [(ModelId, [Verdict; 2]); 3] = [
    (ModelId::Quantum, [Verdict::Violation, Verdict::Violation]),
    (ModelId::SuarezScarani, [Verdict::Violation, Verdict::NoViolation]),
    (ModelId::Local, [Verdict::NoViolation, Verdict::NoViolation]),
];

/// What the real before-before experiments reported: the violation persists.
pub const OBSERVED_EXPERIMENT: [Verdict; 2] = [Verdict::Violation, Verdict::Violation];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteCell {
    pub timing: TimingClass,
    pub s: f64,
    pub stderr: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub model: ModelId,
    pub standard: SuiteCell,
    pub before_before: SuiteCell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub trials_per_pair: u64,
    pub seed: u64,
    pub rows: Vec<SuiteRow>,
    pub observed_experiment: [Verdict; 2],
}

impl SuiteReport {
    pub fn verdicts(&self) -> Vec<(ModelId, [Verdict; 2])> {
        self.rows
            .iter()
            .map(|r| (r.model, [r.standard.verdict, r.before_before.verdict]))
            .collect()
    }

    pub fn has_inconclusive(&self) -> bool {
        self.verdicts().iter().any(|(_, v)| v.contains(&Verdict::Inconclusive))
    }

    pub fn matches_expected(&self) -> bool {
        self.verdicts() == EXPECTED_VERDICTS
    }

    /// Models that violate in the standard configuration but not in the
    /// before-before one, contradicting the observed experiment.
    pub fn refuted_by_before_before(&self) -> Vec<ModelId> {
        self.verdicts()
            .into_iter()
            .filter(|(_, v)| *v == [Verdict::Violation, Verdict::NoViolation])
            .map(|(m, _)| m)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOptions {
    /// Exchange Alice and Bob (geometry and settings) in every run.
    pub swap_parties: bool,
    pub run: RunOptions,
}

pub fn run_discrimination_suite(trials_per_pair: u64, seed: u64) -> Result<SuiteReport, HarnessError> {
    run_discrimination_suite_with(trials_per_pair, seed, SuiteOptions::default())
}

pub fn run_discrimination_suite_with(
    trials_per_pair: u64,
    seed: u64,
    opts: SuiteOptions,
) -> Result<SuiteReport, HarnessError> {
    let (alice_settings, bob_settings) = chsh_settings();
    let cell = |model: ModelId, geometry: ExperimentGeometry| -> Result<SuiteCell, HarnessError> {
        let mut cfg = ExperimentConfig {
            geometry,
            model,
            alice_settings,
            bob_settings,
            trials_per_pair,
            seed,
            epsilon: kinematics::DEFAULT_EPSILON,
        };
        if opts.swap_parties {
            cfg = cfg.swapped();
        }
        let report = run_experiment_with(&cfg, opts.run)?;
        Ok(SuiteCell {
            timing: report.timing_class,
            s: report.chsh.s,
            stderr: report.chsh.stderr,
            verdict: Verdict::of(&report.chsh),
        })
    };

    let rows = EXPECTED_VERDICTS
        .iter()
        .map(|&(model, _)| {
            Ok(SuiteRow {
                model,
                standard: cell(model, ExperimentGeometry::standard())?,
                before_before: cell(model, ExperimentGeometry::before_before())?,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    Ok(SuiteReport { trials_per_pair, seed, rows, observed_experiment: OBSERVED_EXPERIMENT })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(model: ModelId, trials_per_pair: u64, seed: u64) -> ExperimentConfig {
        let (alice_settings, bob_settings) = chsh_settings();
        ExperimentConfig {
            geometry: ExperimentGeometry::standard(),
            model,
            alice_settings,
            bob_settings,
            trials_per_pair,
            seed,
            epsilon: kinematics::DEFAULT_EPSILON,
        }
    }

    #[test]
    fn counts_are_conserved() {
        for n in [1, 7, BLOCK_TRIALS_PER_PAIR, BLOCK_TRIALS_PER_PAIR + 3, 50_000] {
            let r = run_experiment(&cfg(ModelId::Quantum, n, 9)).unwrap();
            for p in &r.pairs {
                assert_eq!(p.counts.total(), n);
            }
        }
    }

    #[test]
    fn identical_configs_give_identical_reports() {
        let c = cfg(ModelId::SuarezScarani, 40_000, 11);
        assert_eq!(run_experiment(&c).unwrap(), run_experiment(&c).unwrap());
        let other = run_experiment(&ExperimentConfig { seed: 12, ..c.clone() }).unwrap();
        assert_ne!(run_experiment(&c).unwrap().pairs, other.pairs);
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        let c = cfg(ModelId::Local, 3 * BLOCK_TRIALS_PER_PAIR + 11, 5);
        let inline = run_experiment_with(&c, RunOptions { workers: Some(1) }).unwrap();
        let sharded = run_experiment_with(&c, RunOptions { workers: Some(3) }).unwrap();
        assert_eq!(inline, sharded);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(matches!(
            run_experiment(&cfg(ModelId::Local, 0, 1)),
            Err(HarnessError::InvalidConfig { field: "trials_per_pair", .. })
        ));
    }

    #[test]
    fn degenerate_timing_propagates() {
        let mut c = cfg(ModelId::Local, 10, 1);
        c.geometry = ExperimentGeometry { alice_beta: 0.0, bob_beta: 0.0, ..ExperimentGeometry::before_before() };
        assert!(matches!(
            run_experiment(&c),
            Err(HarnessError::Kinematics(KinematicsError::TimingDegenerate { .. }))
        ));
    }

    #[test]
    fn trace_follows_schedule() {
        let c = cfg(ModelId::Local, 100, 3);
        let trace = trial_trace(&c, 1000).unwrap();
        assert_eq!(trace.len(), 400);
        for p in 0..4 {
            assert_eq!(trace.iter().filter(|t| t.pair == p).count(), 100);
        }
        assert_eq!(trial_trace(&c, 10).unwrap(), trace[..10]);
    }

    #[test]
    fn verdict_thresholds() {
        let mk = |s: f64, stderr: f64| ChshResult {
            s,
            stderr,
            estimates: [CorrelationEstimate { e_hat: 0.0, stderr: 0.0, n: 1 }; 4],
            violates_local_bound: false,
        };
        assert_eq!(Verdict::of(&mk(-2.8, 0.003)), Verdict::Violation);
        assert_eq!(Verdict::of(&mk(-2.0, 0.003)), Verdict::NoViolation);
        assert_eq!(Verdict::of(&mk(2.03, 0.015)), Verdict::Inconclusive);
        assert_eq!(Verdict::of(&mk(2.005, 0.003)), Verdict::NoViolation);
        assert_eq!(Verdict::of(&mk(-2.0, 0.2)), Verdict::Inconclusive);
    }

    #[test]
    fn tiny_suite_keeps_shape() {
        let r = run_discrimination_suite(100, 1).unwrap();
        assert_eq!(r.rows.len(), 3);
        let models: Vec<_> = r.rows.iter().map(|r| r.model).collect();
        assert_eq!(models, [ModelId::Quantum, ModelId::SuarezScarani, ModelId::Local]);
        for row in &r.rows {
            assert_eq!(row.standard.timing, TimingClass::AliceFirstConsistent);
            assert_eq!(row.before_before.timing, TimingClass::BeforeBefore);
        }
        assert!(r.has_inconclusive());
        assert!(!r.matches_expected());
    }
}
