//! The three causal models as interchangeable outcome generators.
//!
//! Every model is a deterministic function of the two settings, the timing
//! class and a [`HiddenState`]; all randomness is injected through the
//! hidden state by the caller.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{Party, TimingClass};

/// Sign of the singlet correlation `E(a, b) = SINGLET_SIGN * cos(a - b)`.
///
/// Bob's local response carries the same sign so that the local and
/// nonlocal branches share one convention.
pub const SINGLET_SIGN: f64 = -1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("setting angle {0} is not finite")]
    NonFiniteSetting(f64),
    #[error("unknown model `{0}` (expected one of: local, quantum, suarez-scarani)")]
    UnknownModel(String),
}

/// Measurement setting: an angle in radians, canonicalized to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Setting(f64);

impl Setting {
    pub fn new(angle: f64) -> Result<Self, ModelError> {
        if !angle.is_finite() {
            return Err(ModelError::NonFiniteSetting(angle));
        }
        let mut canon = angle.rem_euclid(TAU);
        if canon >= TAU {
            canon = 0.0;
        }
        Ok(Setting(canon))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// Measurement outcome `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    /// `sgn(v)` with `sgn(0) = +1`.
    pub fn sign_of(v: f64) -> Self {
        if v >= 0.0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

/// Per-trial randomness: the shared source variable `lambda` and two
/// auxiliary uniforms consumed by the stochastic branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HiddenState {
    pub lambda: f64,
    pub aux: [f64; 2],
}

impl HiddenState {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut lambda = TAU * rng.random::<f64>();
        if lambda >= TAU {
            lambda = 0.0;
        }
        HiddenState { lambda, aux: [rng.random(), rng.random()] }
    }
}

/// An outcome generator for one run of a Bell experiment.
pub trait CausalModel: Send + Sync {
    fn id(&self) -> ModelId;

    fn respond(
        &self,
        a: Setting,
        b: Setting,
        timing: TimingClass,
        h: &HiddenState,
    ) -> (Outcome, Outcome);
}

/// Singlet correlation `-cos(a - b)` targeted by every nonlocal branch.
pub fn singlet_correlation(a: Setting, b: Setting) -> f64 {
    SINGLET_SIGN * (a.0 - b.0).cos()
}

/// Angular distance between two settings, in `[0, π]`.
pub fn angular_distance(a: Setting, b: Setting) -> f64 {
    let d = (a.0 - b.0).abs();
    d.min(TAU - d)
}

/// Closed-form correlation of the sign-function local model.
pub fn local_correlation(a: Setting, b: Setting) -> f64 {
    SINGLET_SIGN * (1.0 - 2.0 * angular_distance(a, b) / PI)
}

fn alice_local(a: Setting, h: &HiddenState) -> Outcome {
    Outcome::sign_of((h.lambda - a.0).cos())
}

fn bob_local(b: Setting, h: &HiddenState) -> Outcome {
    Outcome::sign_of(SINGLET_SIGN * (h.lambda - b.0).cos())
}

/// Draws the later outcome given the earlier one, `P(later = v | earlier) = (1 + earlier*v*E) / 2`.
fn conditional_response(earlier: Outcome, correlation: f64, u: f64) -> Outcome {
    if u < 0.5 * (1.0 + correlation) {
        earlier
    } else {
        earlier.flip()
    }
}

fn quantum_joint(a: Setting, b: Setting, h: &HiddenState) -> (Outcome, Outcome) {
    let x = if h.aux[0] < 0.5 { Outcome::Plus } else { Outcome::Minus };
    let y = conditional_response(x, singlet_correlation(a, b), h.aux[1]);
    (x, y)
}

/// Local deterministic model: each outcome depends only on the local setting
/// and the shared source variable.
#[derive(Debug, Clone, Copy, Default)]
pub struct LocalModel;

impl CausalModel for LocalModel {
    fn id(&self) -> ModelId {
        ModelId::Local
    }

    fn respond(&self, a: Setting, b: Setting, _: TimingClass, h: &HiddenState) -> (Outcome, Outcome) {
        (alice_local(a, h), bob_local(b, h))
    }
}

/// Samples the singlet joint distribution regardless of timing.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuantumModel;

impl CausalModel for QuantumModel {
    fn id(&self) -> ModelId {
        ModelId::Quantum
    }

    fn respond(&self, a: Setting, b: Setting, _: TimingClass, h: &HiddenState) -> (Outcome, Outcome) {
        quantum_joint(a, b, h)
    }
}

/// Time-ordered nonlocal model.
///
/// A device that is first in its own rest frame answers locally. A device
/// that is second answers as a function of both settings and the earlier
/// outcome, reproducing the singlet correlation. When both devices are
/// first the nonlocal dependency never applies and only local correlations
/// remain. When both are second the quantum joint is sampled.
#[derive(Debug, Clone, Copy, Default)]
pub struct SuarezScaraniModel;

impl CausalModel for SuarezScaraniModel {
    fn id(&self) -> ModelId {
        ModelId::SuarezScarani
    }

    fn respond(&self, a: Setting, b: Setting, timing: TimingClass, h: &HiddenState) -> (Outcome, Outcome) {
        match timing {
            TimingClass::AliceFirstConsistent => {
                let x = alice_local(a, h);
                (x, conditional_response(x, singlet_correlation(a, b), h.aux[1]))
            }
            TimingClass::BobFirstConsistent => {
                let y = bob_local(b, h);
                (conditional_response(y, singlet_correlation(a, b), h.aux[0]), y)
            }
            TimingClass::BeforeBefore => (alice_local(a, h), bob_local(b, h)),
            TimingClass::AfterAfter => quantum_joint(a, b, h),
        }
    }
}

/// String-selectable model identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelId {
    #[serde(rename = "local")]
    Local,
    #[serde(rename = "quantum")]
    Quantum,
    #[serde(rename = "suarez-scarani")]
    SuarezScarani,
}

impl ModelId {
    pub const ALL: [ModelId; 3] = [ModelId::Local, ModelId::Quantum, ModelId::SuarezScarani];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Local => "local",
            ModelId::Quantum => "quantum",
            ModelId::SuarezScarani => "suarez-scarani",
        }
    }

    pub fn model(self) -> &'static dyn CausalModel {
        match self {
            ModelId::Local => &LocalModel,
            ModelId::Quantum => &QuantumModel,
            ModelId::SuarezScarani => &SuarezScaraniModel,
        }
    }

    /// Exact correlation `E(a, b)` the model produces in `timing`.
    pub fn analytic_correlation(self, a: Setting, b: Setting, timing: TimingClass) -> f64 {
        let nonlocal = match self {
            ModelId::Local => false,
            ModelId::Quantum => true,
            ModelId::SuarezScarani => !(timing.is_first(Party::Alice) && timing.is_first(Party::Bob)),
        };
        if nonlocal {
            singlet_correlation(a, b)
        } else {
            local_correlation(a, b)
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ModelError::UnknownModel(s.to_owned()))
    }
}
