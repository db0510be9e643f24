//! Measurement events in 1+1D Minkowski spacetime (c = 1) and the
//! classification of their time order in each apparatus rest frame.
//!
//! Times are in seconds, positions in light-seconds. The two measurement
//! events are the arrivals of the photons emitted by the source; each
//! apparatus compares the time coordinates of both events in its own rest
//! frame, obtained by boosting the lab frame with the apparatus velocity.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance (seconds) under which two frame times count as simultaneous.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("non-finite coordinate in spacetime event (t = {t}, z = {z})")]
    NonFiniteEvent { t: f64, z: f64 },
    #[error("`{field}` = {beta} is not a subluminal velocity (need |beta| < 1)")]
    Superluminal { field: &'static str, beta: f64 },
    #[error("invalid geometry: {field}: {reason}")]
    InvalidGeometry { field: &'static str, reason: String },
    #[error("measurement events are simultaneous in {frame}'s rest frame (|dt| = {dt:e} < epsilon = {epsilon:e})")]
    TimingDegenerate { frame: Party, dt: f64, epsilon: f64 },
    #[error("measurement events are not spacelike separated (interval^2 = {interval_squared})")]
    NotSpacelike { interval_squared: f64 },
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
}

/// One of the two measuring parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        })
    }
}

/// A point `(t, z)` in 1+1D spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub z: f64,
}

impl SpacetimeEvent {
    pub fn new(t: f64, z: f64) -> Result<Self, KinematicsError> {
        if !t.is_finite() || !z.is_finite() {
            return Err(KinematicsError::NonFiniteEvent { t, z });
        }
        Ok(SpacetimeEvent { t, z })
    }
}

/// Inertial frame moving at `beta` (fraction of c) along z relative to the lab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InertialFrame {
    beta: f64,
}

impl InertialFrame {
    pub const LAB: InertialFrame = InertialFrame { beta: 0.0 };

    pub fn new(beta: f64) -> Result<Self, KinematicsError> {
        check_velocity("beta", beta)?;
        Ok(InertialFrame { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Lorentz factor `1 / sqrt(1 - beta^2)`.
    pub fn gamma(&self) -> f64 {
        1.0 / ((1.0 - self.beta) * (1.0 + self.beta)).sqrt()
    }
}

fn check_velocity(field: &'static str, beta: f64) -> Result<(), KinematicsError> {
    if beta.is_finite() && beta.abs() < 1.0 {
        Ok(())
    } else {
        Err(KinematicsError::Superluminal { field, beta })
    }
}

/// Coordinates of `e` as seen from `frame`.
pub fn boost(e: SpacetimeEvent, frame: InertialFrame) -> SpacetimeEvent {
    let gamma = frame.gamma();
    let beta = frame.beta;
    SpacetimeEvent {
        t: gamma * (e.t - beta * e.z),
        z: gamma * (e.z - beta * e.t),
    }
}

/// Squared interval `dt^2 - dz^2`: negative for spacelike, zero for
/// lightlike and positive for timelike separation.
pub fn interval_squared(e1: SpacetimeEvent, e2: SpacetimeEvent) -> f64 {
    let dt = e2.t - e1.t;
    let dz = e2.z - e1.z;
    // factored form keeps the relative error small near the light cone
    (dt - dz) * (dt + dz)
}

/// Collinear source and two measuring devices, with the devices' velocities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGeometry {
    pub source_z: f64,
    pub alice_z: f64,
    pub bob_z: f64,
    pub alice_beta: f64,
    pub bob_beta: f64,
    pub emission_t: f64,
}

impl ExperimentGeometry {
    /// Devices at rest, Alice's arm 0.9 and Bob's 1.0 light-seconds on
    /// opposite sides of the source: Alice measures a bit before Bob.
    pub fn standard() -> Self {
        ExperimentGeometry {
            source_z: 0.0,
            alice_z: 0.9,
            bob_z: -1.0,
            alice_beta: 0.0,
            bob_beta: 0.0,
            emission_t: 0.0,
        }
    }

    /// Symmetric 1 light-second arms with both devices receding at 0.1 c,
    /// so that each device measures first in its own rest frame.
    pub fn before_before() -> Self {
        ExperimentGeometry {
            source_z: 0.0,
            alice_z: -1.0,
            bob_z: 1.0,
            alice_beta: -0.1,
            bob_beta: 0.1,
            emission_t: 0.0,
        }
    }

    /// Exchanges the roles of Alice and Bob.
    pub fn swapped(&self) -> Self {
        ExperimentGeometry {
            alice_z: self.bob_z,
            bob_z: self.alice_z,
            alice_beta: self.bob_beta,
            bob_beta: self.alice_beta,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        for (field, v) in [
            ("source_z", self.source_z),
            ("alice_z", self.alice_z),
            ("bob_z", self.bob_z),
            ("emission_t", self.emission_t),
        ] {
            if !v.is_finite() {
                return Err(KinematicsError::InvalidGeometry {
                    field,
                    reason: format!("{v} is not finite"),
                });
            }
        }
        check_velocity("alice_beta", self.alice_beta)?;
        check_velocity("bob_beta", self.bob_beta)?;
        if self.alice_z == self.source_z {
            return Err(KinematicsError::InvalidGeometry {
                field: "alice_z",
                reason: "coincides with the source".into(),
            });
        }
        if self.bob_z == self.source_z {
            return Err(KinematicsError::InvalidGeometry {
                field: "bob_z",
                reason: "coincides with the source".into(),
            });
        }
        if self.alice_z == self.bob_z {
            return Err(KinematicsError::InvalidGeometry {
                field: "bob_z",
                reason: "coincides with alice_z".into(),
            });
        }
        Ok(())
    }

    pub fn frame_of(&self, party: Party) -> InertialFrame {
        let beta = match party {
            Party::Alice => self.alice_beta,
            Party::Bob => self.bob_beta,
        };
        InertialFrame { beta }
    }
}

/// Photon arrival events at Alice's and Bob's devices, in the lab frame.
pub fn measurement_events(
    g: &ExperimentGeometry,
) -> Result<(SpacetimeEvent, SpacetimeEvent), KinematicsError> {
    g.validate()?;
    let alice = SpacetimeEvent::new(g.emission_t + (g.alice_z - g.source_z).abs(), g.alice_z)?;
    let bob = SpacetimeEvent::new(g.emission_t + (g.bob_z - g.source_z).abs(), g.bob_z)?;
    Ok((alice, bob))
}

/// Which measurement comes first in each apparatus's own rest frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TimingClass {
    /// Alice's event is earlier in both rest frames.
    AliceFirstConsistent,
    /// Bob's event is earlier in both rest frames.
    BobFirstConsistent,
    /// Each device measures first in its own rest frame.
    BeforeBefore,
    /// Each device measures second in its own rest frame.
    AfterAfter,
}

impl TimingClass {
    pub const ALL: [TimingClass; 4] = [
        TimingClass::AliceFirstConsistent,
        TimingClass::BobFirstConsistent,
        TimingClass::BeforeBefore,
        TimingClass::AfterAfter,
    ];

    /// Builds the class from whether each party's own event is first in its own frame.
    pub fn from_self_orderings(alice_first_for_alice: bool, bob_first_for_bob: bool) -> Self {
        match (alice_first_for_alice, bob_first_for_bob) {
            (true, false) => TimingClass::AliceFirstConsistent,
            (false, true) => TimingClass::BobFirstConsistent,
            (true, true) => TimingClass::BeforeBefore,
            (false, false) => TimingClass::AfterAfter,
        }
    }

    /// Whether `party` measures first in its own rest frame.
    pub fn is_first(self, party: Party) -> bool {
        match (self, party) {
            (TimingClass::BeforeBefore, _) => true,
            (TimingClass::AfterAfter, _) => false,
            (TimingClass::AliceFirstConsistent, p) => p == Party::Alice,
            (TimingClass::BobFirstConsistent, p) => p == Party::Bob,
        }
    }

    /// The class seen after exchanging Alice and Bob.
    pub fn swapped(self) -> Self {
        match self {
            TimingClass::AliceFirstConsistent => TimingClass::BobFirstConsistent,
            TimingClass::BobFirstConsistent => TimingClass::AliceFirstConsistent,
            other => other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TimingClass::AliceFirstConsistent => "AliceFirstConsistent",
            TimingClass::BobFirstConsistent => "BobFirstConsistent",
            TimingClass::BeforeBefore => "BeforeBefore",
            TimingClass::AfterAfter => "AfterAfter",
        }
    }
}

impl fmt::Display for TimingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TimingClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TimingClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown timing class `{s}`"))
    }
}

/// Event times of both measurements as seen from one apparatus frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameTimes {
    pub beta: f64,
    pub alice_t: f64,
    pub bob_t: f64,
}

/// Full breakdown behind a [`TimingClass`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingAnalysis {
    pub alice_event: SpacetimeEvent,
    pub bob_event: SpacetimeEvent,
    pub interval_squared: f64,
    pub in_alice_frame: FrameTimes,
    pub in_bob_frame: FrameTimes,
    pub class: TimingClass,
}

pub fn analyze_timing(
    g: &ExperimentGeometry,
    epsilon: f64,
) -> Result<TimingAnalysis, KinematicsError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(KinematicsError::InvalidEpsilon(epsilon));
    }
    let (alice_event, bob_event) = measurement_events(g)?;
    let s2 = interval_squared(alice_event, bob_event);
    if s2 >= 0.0 {
        return Err(KinematicsError::NotSpacelike { interval_squared: s2 });
    }

    let times_in = |party: Party| -> Result<FrameTimes, KinematicsError> {
        let frame = g.frame_of(party);
        let ft = FrameTimes {
            beta: frame.beta(),
            alice_t: boost(alice_event, frame).t,
            bob_t: boost(bob_event, frame).t,
        };
        let dt = ft.bob_t - ft.alice_t;
        if dt.abs() < epsilon {
            return Err(KinematicsError::TimingDegenerate { frame: party, dt: dt.abs(), epsilon });
        }
        Ok(ft)
    };
    let in_alice_frame = times_in(Party::Alice)?;
    let in_bob_frame = times_in(Party::Bob)?;

    let class = TimingClass::from_self_orderings(
        in_alice_frame.alice_t < in_alice_frame.bob_t,
        in_bob_frame.bob_t < in_bob_frame.alice_t,
    );
    Ok(TimingAnalysis {
        alice_event,
        bob_event,
        interval_squared: s2,
        in_alice_frame,
        in_bob_frame,
        class,
    })
}

pub fn classify_timing(g: &ExperimentGeometry, epsilon: f64) -> Result<TimingClass, KinematicsError> {
    analyze_timing(g, epsilon).map(|a| a.class)
}
