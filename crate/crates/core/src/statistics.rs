//! Correlation estimates, CHSH, the deterministic local bound and the
//! hypothesis tests for non-signaling and timing dependence.

use serde::Serialize;
use thiserror::Error;

use crate::harness;
use crate::kinematics::{Party, TimingClass};
use crate::models::{ModelId, Outcome, Setting};

/// Smallest trial count accepted by [`timing_dependence_test`].
pub const MIN_TIMING_TEST_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("no trials in count table")]
    EmptyCounts,
    #[error("fixed {party} setting differs between count tables ({first} vs {second} rad)")]
    MismatchedSettings { party: Party, first: f64, second: f64 },
    #[error("need at least {min} trials, got {got}")]
    InsufficientTrials { min: u64, got: u64 },
}

/// Outcome counts for one setting pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointCounts {
    pub a: Setting,
    pub b: Setting,
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
}

impl JointCounts {
    pub fn empty(a: Setting, b: Setting) -> Self {
        JointCounts { a, b, n_pp: 0, n_pm: 0, n_mp: 0, n_mm: 0 }
    }

    pub fn record(&mut self, x: Outcome, y: Outcome) {
        match (x, y) {
            (Outcome::Plus, Outcome::Plus) => self.n_pp += 1,
            (Outcome::Plus, Outcome::Minus) => self.n_pm += 1,
            (Outcome::Minus, Outcome::Plus) => self.n_mp += 1,
            (Outcome::Minus, Outcome::Minus) => self.n_mm += 1,
        }
    }

    /// Adds another table for the same setting pair.
    pub fn merge(&mut self, other: &JointCounts) {
        debug_assert!(self.a == other.a && self.b == other.b);
        self.n_pp += other.n_pp;
        self.n_pm += other.n_pm;
        self.n_mp += other.n_mp;
        self.n_mm += other.n_mm;
    }

    pub fn total(&self) -> u64 {
        self.n_pp + self.n_pm + self.n_mp + self.n_mm
    }

    /// Number of trials where `party` saw `+1`.
    pub fn plus_count(&self, party: Party) -> u64 {
        match party {
            Party::Alice => self.n_pp + self.n_pm,
            Party::Bob => self.n_pp + self.n_mp,
        }
    }

    /// Empirical joint distribution in `(++, +-, -+, --)` order.
    pub fn frequencies(&self) -> Result<[f64; 4], StatsError> {
        let n = self.total();
        if n == 0 {
            return Err(StatsError::EmptyCounts);
        }
        let n = n as f64;
        Ok([self.n_pp, self.n_pm, self.n_mp, self.n_mm].map(|c| c as f64 / n))
    }

    fn setting(&self, party: Party) -> Setting {
        match party {
            Party::Alice => self.a,
            Party::Bob => self.b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub e_hat: f64,
    pub stderr: f64,
    pub n: u64,
}

pub fn estimate_correlation(c: &JointCounts) -> Result<CorrelationEstimate, StatsError> {
    let n = c.total();
    if n == 0 {
        return Err(StatsError::EmptyCounts);
    }
    let same = (c.n_pp + c.n_mm) as i128;
    let diff = (c.n_pm + c.n_mp) as i128;
    let e_hat = (same - diff) as f64 / n as f64;
    // clamp guards rounding just past |e| = 1
    let stderr = ((1.0 - e_hat * e_hat).max(0.0) / n as f64).sqrt();
    Ok(CorrelationEstimate { e_hat, stderr, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshResult {
    pub s: f64,
    pub stderr: f64,
    pub estimates: [CorrelationEstimate; 4],
    pub violates_local_bound: bool,
}

/// Local-realist bound on `|S|`.
pub const LOCAL_BOUND: f64 = 2.0;

/// `S = E11 + E12 + E21 - E22`, violation declared at `|S| - 3σ > 2`.
pub fn chsh(
    e11: CorrelationEstimate,
    e12: CorrelationEstimate,
    e21: CorrelationEstimate,
    e22: CorrelationEstimate,
) -> ChshResult {
    let s = e11.e_hat + e12.e_hat + e21.e_hat - e22.e_hat;
    let stderr = [e11, e12, e21, e22].iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt();
    ChshResult {
        s,
        stderr,
        estimates: [e11, e12, e21, e22],
        violates_local_bound: s.abs() - 3.0 * stderr > LOCAL_BOUND,
    }
}

/// CHSH value of one deterministic strategy `[x(a1), x(a2), y(b1), y(b2)]`.
pub fn strategy_chsh(strategy: [i8; 4]) -> i32 {
    let [x1, x2, y1, y2] = strategy.map(i32::from);
    x1 * y1 + x1 * y2 + x2 * y1 - x2 * y2
}

/// Maximum `|S|` over all 16 deterministic local strategies.
///
/// The settings only label the strategy table: a deterministic strategy
/// fixes one outcome per setting whatever the angle is.
pub fn local_bound_bruteforce(_a1: Setting, _a2: Setting, _b1: Setting, _b2: Setting) -> i32 {
    (0u8..16)
        .map(|bits| {
            let strategy = [0, 1, 2, 3].map(|k| if bits >> k & 1 == 1 { -1 } else { 1 });
            strategy_chsh(strategy).abs()
        })
        .max()
        .expect("16 strategies")
}

/// Pooled two-proportion z statistic for `k1/n1` vs `k2/n2`.
pub fn two_proportion_z(k1: u64, n1: u64, k2: u64, n2: u64) -> Result<f64, StatsError> {
    if n1 == 0 || n2 == 0 {
        return Err(StatsError::EmptyCounts);
    }
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let p1 = k1 as f64 / n1f;
    let p2 = k2 as f64 / n2f;
    let pooled = (k1 + k2) as f64 / (n1f + n2f);
    let var = pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f);
    if var <= 0.0 {
        // both samples all +1 or all -1: the proportions agree
        return Ok(0.0);
    }
    Ok((p1 - p2) / var.sqrt())
}

/// Tests whether `party`'s marginal `P(+1)` moves when only the other
/// party's setting changes between `c1` and `c2`.
pub fn nosignaling_test(c1: &JointCounts, c2: &JointCounts, party: Party) -> Result<f64, StatsError> {
    let (s1, s2) = (c1.setting(party), c2.setting(party));
    if s1 != s2 {
        return Err(StatsError::MismatchedSettings {
            party,
            first: s1.radians(),
            second: s2.radians(),
        });
    }
    two_proportion_z(c1.plus_count(party), c1.total(), c2.plus_count(party), c2.total())
}

/// Total-variation distance between two empirical joint distributions.
pub fn total_variation(c1: &JointCounts, c2: &JointCounts) -> Result<f64, StatsError> {
    let (p, q) = (c1.frequencies()?, c2.frequencies()?);
    Ok(0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Largest TV distance, over `settings`, between the model's joint
/// distributions in the Alice-first and before-before timing classes.
///
/// Both classes are sampled from independent streams derived from `seed`.
pub fn timing_dependence_test(
    model: ModelId,
    settings: &[(Setting, Setting)],
    n: u64,
    seed: u64,
) -> Result<f64, StatsError> {
    if n < MIN_TIMING_TEST_TRIALS {
        return Err(StatsError::InsufficientTrials { min: MIN_TIMING_TEST_TRIALS, got: n });
    }
    let mut worst = 0.0f64;
    for (k, &(a, b)) in settings.iter().enumerate() {
        let tag = 2 * k as u32;
        let ordered = harness::sample_counts(model, TimingClass::AliceFirstConsistent, a, b, n, seed, tag);
        let bb = harness::sample_counts(model, TimingClass::BeforeBefore, a, b, n, seed, tag + 1);
        worst = worst.max(total_variation(&ordered, &bb)?);
    }
    Ok(worst)
}
