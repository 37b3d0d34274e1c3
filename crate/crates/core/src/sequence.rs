//! Pulse sequences, error models and the sequence file format.
//!
//! All angles are stored as multiples of π (a π-pulse has `angle = 1`) and
//! converted to radians only where a computation needs them. Time is measured
//! in units of `1/Ω₀`, so a step of angle `a` lasts `a·π`.
//!
//! # File format
//!
//! Sequence files are TOML documents:
//!
//! ```toml
//! name = "knill"
//!
//! [intended_net_effect]
//! axis = [-0.8660254037844386, 0.5, 0.0]
//! angle_over_pi = 1.0
//!
//! [[steps]]
//! phase_over_pi = 0.16666666666666666
//! angle_over_pi = 1.0
//!
//! [[steps]]
//! phase_over_pi = 0.0
//! angle_over_pi = 1.0
//! ```
//!
//! `phase_over_pi` is wrapped into `(-1, 1]` on load; `angle_over_pi` must lie
//! in `(0, 2]`. `axis` need not be normalized but must be nonzero.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{PulseError, Result};
use crate::geom::{wrap_half_turns, Rotation, Vec3};

/// One resonant pulse `R_φ^θ`: phase `φ` of the transverse field and area `θ`,
/// both in units of π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseStep {
    phase: f64,
    angle: f64,
}

impl PulseStep {
    pub fn new(phase_over_pi: f64, angle_over_pi: f64) -> Result<Self> {
        Self::checked(0, phase_over_pi, angle_over_pi)
    }

    /// A π-pulse with the given phase.
    pub fn pi(phase_over_pi: f64) -> Self {
        Self {
            phase: wrap_half_turns(phase_over_pi),
            angle: 1.0,
        }
    }

    fn checked(index: usize, phase: f64, angle: f64) -> Result<Self> {
        if !phase.is_finite() {
            return Err(PulseError::InvalidStep {
                index,
                field: "phase_over_pi",
                reason: "must be finite".into(),
            });
        }
        if !(angle.is_finite() && angle > 0.0 && angle <= 2.0) {
            return Err(PulseError::InvalidStep {
                index,
                field: "angle_over_pi",
                reason: format!("must lie in (0, 2], got {angle}"),
            });
        }
        Ok(Self {
            phase: wrap_half_turns(phase),
            angle,
        })
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn phase_radians(&self) -> f64 {
        self.phase * PI
    }

    /// Duration of the step in dimensionless time.
    pub fn duration(&self) -> f64 {
        self.angle * PI
    }

    /// Unit direction of the control field in the lab frame.
    pub fn direction(&self) -> Vec3 {
        Vec3::planar(self.phase_radians())
    }

    pub fn is_pi(&self) -> bool {
        (self.angle - 1.0).abs() < 1e-12
    }

    /// The error-free rotation produced by this step.
    pub fn rotation(&self) -> Rotation {
        Rotation::about_unit(self.direction(), self.duration())
    }
}

/// Target rotation of a sequence: `angle` (units of π) about `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetEffect {
    pub axis: Vec3,
    pub angle_over_pi: f64,
}

impl NetEffect {
    pub fn new(axis: Vec3, angle_over_pi: f64) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(PulseError::InvalidField {
                field: "intended_net_effect.axis".into(),
                reason: "must be nonzero".into(),
            });
        }
        let axis = if (n - 1.0).abs() < 4.0 * f64::EPSILON {
            axis
        } else {
            axis / n
        };
        if !angle_over_pi.is_finite() {
            return Err(PulseError::InvalidField {
                field: "intended_net_effect.angle_over_pi".into(),
                reason: "must be finite".into(),
            });
        }
        Ok(Self { axis, angle_over_pi })
    }

    /// A π rotation about the horizontal axis at `phase_over_pi`.
    pub fn pi_about_phase(phase_over_pi: f64) -> Self {
        Self {
            axis: Vec3::planar(phase_over_pi * PI),
            angle_over_pi: 1.0,
        }
    }

    pub fn rotation(&self) -> Rotation {
        Rotation::about_unit(self.axis, self.angle_over_pi * PI)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    name: String,
    steps: Vec<PulseStep>,
    intended: NetEffect,
}

impl Sequence {
    pub fn new(name: impl Into<String>, steps: Vec<PulseStep>, intended: NetEffect) -> Result<Self> {
        if steps.is_empty() {
            return Err(PulseError::EmptySequence);
        }
        Ok(Self {
            name: name.into(),
            steps,
            intended,
        })
    }

    /// A π-pulse train with the intended net effect taken from the closed form
    /// of its error-free propagator (see [`pi_train_net_effect`]).
    pub fn pi_train(name: impl Into<String>, phases_over_pi: &[f64]) -> Result<Self> {
        let steps: Vec<PulseStep> = phases_over_pi.iter().map(|&p| PulseStep::pi(p)).collect();
        let intended = pi_train_net_effect(&steps)?;
        Self::new(name, steps, intended)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn steps(&self) -> &[PulseStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn intended_net_effect(&self) -> NetEffect {
        self.intended
    }

    pub fn phases(&self) -> Vec<f64> {
        self.steps.iter().map(PulseStep::phase).collect()
    }

    pub fn is_pi_train(&self) -> bool {
        self.steps.iter().all(PulseStep::is_pi)
    }

    /// Index of the first step that is not a π-pulse, if any.
    pub fn first_non_pi(&self) -> Option<usize> {
        self.steps.iter().position(|s| !s.is_pi())
    }

    pub fn total_duration(&self) -> f64 {
        self.steps.iter().map(PulseStep::duration).sum()
    }

    /// Start time of every step followed by the final time.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut t = 0.0;
        out.push(t);
        for s in &self.steps {
            t += s.duration();
            out.push(t);
        }
        out
    }

    /// Same sequence with every lab phase shifted by `offset_over_pi`.
    pub fn with_phase_offset(&self, offset_over_pi: f64) -> Sequence {
        let steps = self
            .steps
            .iter()
            .map(|s| PulseStep {
                phase: wrap_half_turns(s.phase + offset_over_pi),
                angle: s.angle,
            })
            .collect();
        let shift = Rotation::about_unit(Vec3::Z, offset_over_pi * PI);
        Sequence {
            name: self.name.clone(),
            steps,
            intended: NetEffect {
                axis: shift.apply(self.intended.axis),
                angle_over_pi: self.intended.angle_over_pi,
            },
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn to_toml(&self) -> String {
        let doc = SequenceDoc {
            name: self.name.clone(),
            intended_net_effect: NetEffectDoc {
                axis: self.intended.axis.to_array(),
                angle_over_pi: self.intended.angle_over_pi,
            },
            steps: self
                .steps
                .iter()
                .map(|s| StepDoc {
                    phase_over_pi: s.phase,
                    angle_over_pi: s.angle,
                })
                .collect(),
        };
        toml::to_string(&doc).expect("sequence documents always serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: SequenceDoc = toml::from_str(text).map_err(|e| PulseError::Parse(e.to_string()))?;
        if doc.steps.is_empty() {
            return Err(PulseError::InvalidField {
                field: "steps".into(),
                reason: "must contain at least one step".into(),
            });
        }
        let steps = doc
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| PulseStep::checked(i, s.phase_over_pi, s.angle_over_pi))
            .collect::<Result<Vec<_>>>()?;
        let intended = NetEffect::new(
            Vec3::from_array(doc.intended_net_effect.axis),
            doc.intended_net_effect.angle_over_pi,
        )?;
        Self::new(doc.name, steps, intended)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceDoc {
    name: String,
    intended_net_effect: NetEffectDoc,
    steps: Vec<StepDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetEffectDoc {
    axis: [f64; 3],
    angle_over_pi: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    phase_over_pi: f64,
    angle_over_pi: f64,
}

/// Error-free net rotation of a π-pulse train in closed form.
///
/// A π-pulse about the horizontal axis at angle `a` acts on the plane as the
/// reflection `b ↦ 2a − b`. Two of them compose to a z-rotation by `2(a₂ − a₁)`
/// and an odd train collapses to a single π-pulse about
/// `φ₁ − φ₂ + φ₃ − … + φ_N`. An even train is a pure z-rotation by
/// `2(φ_N − φ_{N−1} + … + φ₂ − φ₁)`.
pub fn pi_train_net_effect(steps: &[PulseStep]) -> Result<NetEffect> {
    if let Some(index) = steps.iter().position(|s| !s.is_pi()) {
        return Err(PulseError::UnsupportedPulseArea {
            index,
            angle_over_pi: steps[index].angle,
        });
    }
    if steps.is_empty() {
        return Err(PulseError::EmptySequence);
    }
    let alternating: f64 = steps
        .iter()
        .enumerate()
        .map(|(j, s)| if j % 2 == 0 { s.phase } else { -s.phase })
        .sum();
    if steps.len() % 2 == 1 {
        Ok(NetEffect::pi_about_phase(wrap_half_turns(alternating)))
    } else {
        Ok(NetEffect {
            axis: Vec3::Z,
            angle_over_pi: wrap_half_turns(-2.0 * alternating),
        })
    }
}

/// Which systematic error a walk or slope scan refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Amplitude,
    Detuning,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::Amplitude, Channel::Detuning];

    /// Error model with only this channel switched on at strength `value`.
    pub fn model(self, value: f64) -> ErrorModel {
        match self {
            Channel::Amplitude => ErrorModel::amplitude(value),
            Channel::Detuning => ErrorModel::detuning(value),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Amplitude => "amplitude",
            Channel::Detuning => "detuning",
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Channel {
    type Err = PulseError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "amplitude" | "amp" => Ok(Channel::Amplitude),
            "detuning" | "det" => Ok(Channel::Detuning),
            other => Err(PulseError::InvalidArgument(format!("unknown channel `{other}`"))),
        }
    }
}

/// Constant systematic errors: fractional amplitude error `ε` and detuning `Δ`
/// (in units of the nominal Rabi frequency).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorModel {
    pub epsilon: f64,
    pub delta: f64,
}

impl ErrorModel {
    pub const NONE: ErrorModel = ErrorModel {
        epsilon: 0.0,
        delta: 0.0,
    };

    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let m = Self { epsilon, delta };
        m.validate()?;
        Ok(m)
    }

    pub fn amplitude(epsilon: f64) -> Self {
        Self { epsilon, delta: 0.0 }
    }

    pub fn detuning(delta: f64) -> Self {
        Self { epsilon: 0.0, delta }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon.abs() < 1.0) {
            return Err(PulseError::ErrorModel(format!("|ε| must be < 1, got {}", self.epsilon)));
        }
        if !(self.delta.is_finite() && self.delta.abs() < 1.0) {
            return Err(PulseError::ErrorModel(format!("|Δ| must be < 1, got {}", self.delta)));
        }
        Ok(())
    }

    /// The single active channel, or `None` for zero or mixed errors.
    pub fn single_channel(&self) -> Option<Channel> {
        match (self.epsilon != 0.0, self.delta != 0.0) {
            (true, false) => Some(Channel::Amplitude),
            (false, true) => Some(Channel::Detuning),
            _ => None,
        }
    }

    /// Lab-frame error field `ε·Ω + Δ·ẑ` for a unit control direction `omega`.
    pub fn field(&self, omega: Vec3) -> Vec3 {
        omega * self.epsilon + Vec3::Z * self.delta
    }

    /// `max_t |Ω₁(t)|`. Control directions are transverse, so this is
    /// `√(ε² + Δ²)` for every sequence.
    pub fn max_error_rate(&self) -> f64 {
        self.epsilon.hypot(self.delta)
    }
}
