//! Lab ↔ toggling frame transforms.
//!
//! The toggling frame co-rotates with the error-free evolution `R̂(t)`, which
//! obeys `dR̂/dt = [Ω(t)]× R̂` with `R̂(0) = I`. In that frame only the error
//! field `Ω₁′(t) = R̂⁻¹(t) Ω₁(t)` moves the Bloch vector.

use crate::error::{PulseError, Result};
use crate::geom::{wrap_half_turns, Rotation, Vec3};
use crate::sequence::{ErrorModel, Sequence};

/// Toggling-frame pulse directions of a π-pulse train, in units of π and
/// wrapped into `(-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TogglingPhases {
    phases: Vec<f64>,
}

impl TogglingPhases {
    /// Wraps already-known toggling phases.
    pub fn new(phases: Vec<f64>) -> Self {
        Self {
            phases: phases.into_iter().map(wrap_half_turns).collect(),
        }
    }

    /// `φ′_j = −(−1)^j φ_j − Σ_{k<j} (−1)^k 2φ_k` (1-based `j`).
    pub fn from_lab(lab: &[f64]) -> Self {
        Self::new(transform(lab))
    }

    /// Inverse transform. The map is an involution, so this is the same
    /// formula applied to the toggling phases.
    pub fn to_lab(&self) -> Vec<f64> {
        transform(&self.phases).into_iter().map(wrap_half_turns).collect()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Directions of the detuning error-integral steps,
    /// `φ″_j = φ′_j + (−1)^{j+1} π/2` (1-based `j`), in units of π.
    pub fn detuning_directions(&self) -> Vec<f64> {
        self.phases
            .iter()
            .enumerate()
            .map(|(i, p)| wrap_half_turns(if i % 2 == 0 { p + 0.5 } else { p - 0.5 }))
            .collect()
    }
}

fn transform(src: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(src.len());
    // running Σ_{k<j} (−1)^k 2φ_k with 1-based k
    let mut acc = 0.0;
    for (i, &phi) in src.iter().enumerate() {
        let odd = i % 2 == 0;
        let own = if odd { phi } else { -phi };
        out.push(own - acc);
        acc += if odd { -2.0 * phi } else { 2.0 * phi };
    }
    out
}

/// Toggling-frame phases of a π-pulse train.
pub fn toggle_phases(seq: &Sequence) -> Result<TogglingPhases> {
    if let Some(index) = seq.first_non_pi() {
        return Err(PulseError::UnsupportedPulseArea {
            index,
            angle_over_pi: seq.steps()[index].angle(),
        });
    }
    Ok(TogglingPhases::from_lab(&seq.phases()))
}

/// Error-free frame rotation `R̂(t)` of a sequence with the per-step boundary
/// rotations cached, plus closed-form toggling-frame error quantities.
#[derive(Debug, Clone)]
pub struct NominalFrame {
    boundaries: Vec<f64>,
    directions: Vec<Vec3>,
    durations: Vec<f64>,
    starts: Vec<Rotation>,
    final_rotation: Rotation,
    /// `p(t_m)` for unit amplitude error.
    amp_nodes: Vec<Vec3>,
    /// `p(t_m)` for unit detuning.
    det_nodes: Vec<Vec3>,
}

impl NominalFrame {
    pub fn new(seq: &Sequence) -> Self {
        let n = seq.len();
        let boundaries = seq.boundaries();
        let mut directions = Vec::with_capacity(n);
        let mut durations = Vec::with_capacity(n);
        let mut starts = Vec::with_capacity(n);
        let mut amp_nodes = Vec::with_capacity(n + 1);
        let mut det_nodes = Vec::with_capacity(n + 1);
        let mut frame = Rotation::IDENTITY;
        let (mut pa, mut pd) = (Vec3::ZERO, Vec3::ZERO);
        amp_nodes.push(pa);
        det_nodes.push(pd);
        for step in seq.steps() {
            let dir = step.direction();
            let tau = step.duration();
            starts.push(frame);
            directions.push(dir);
            durations.push(tau);
            pa += frame.apply_inverse(amp_local(dir, tau));
            pd += frame.apply_inverse(det_local(dir, tau));
            amp_nodes.push(pa);
            det_nodes.push(pd);
            frame = step.rotation().then_after(&frame);
        }
        Self {
            boundaries,
            directions,
            durations,
            starts,
            final_rotation: frame,
            amp_nodes,
            det_nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        *self.boundaries.last().expect("at least one boundary")
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn step_duration(&self, m: usize) -> f64 {
        self.durations[m]
    }

    /// `R̂(t_m)` at the start of step `m`.
    pub fn step_start(&self, m: usize) -> &Rotation {
        &self.starts[m]
    }

    pub fn final_rotation(&self) -> &Rotation {
        &self.final_rotation
    }

    /// Control direction of step `m` seen from the toggling frame,
    /// `R̂⁻¹(t_m) Ω_m`. It is constant over the step.
    pub fn toggling_direction(&self, m: usize) -> Vec3 {
        self.starts[m].apply_inverse(self.directions[m])
    }

    /// Lab `ẑ` seen from the toggling frame at the start of step `m`.
    pub fn toggling_z(&self, m: usize) -> Vec3 {
        self.starts[m].apply_inverse(Vec3::Z)
    }

    /// Step index containing `t` and the local time within it. Boundary
    /// instants belong to the later step, except `t_f` which closes the last.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let tf = self.total_duration();
        let slack = 1e-12 * tf.max(1.0);
        if !(t >= -slack && t <= tf + slack) {
            return Err(PulseError::TimeOutOfRange { t, t_final: tf });
        }
        let t = t.clamp(0.0, tf);
        let m = match self.boundaries.partition_point(|&b| b <= t) {
            0 => 0,
            k => (k - 1).min(self.len() - 1),
        };
        Ok((m, t - self.boundaries[m]))
    }

    pub fn rotation_at(&self, t: f64) -> Result<Rotation> {
        let (m, tau) = self.locate(t)?;
        Ok(self.rotation_in_step(m, tau))
    }

    /// `R̂(t_m + τ) = exp([Ω_m]× τ) R̂(t_m)`.
    pub fn rotation_in_step(&self, m: usize, tau: f64) -> Rotation {
        Rotation::about_unit(self.directions[m], tau).then_after(&self.starts[m])
    }

    /// `Ω₁′ = R̂⁻¹(t)(εΩ(t) + Δẑ)`.
    pub fn error_field(&self, err: &ErrorModel, t: f64) -> Result<Vec3> {
        let (m, tau) = self.locate(t)?;
        Ok(self.error_field_in_step(err, m, tau))
    }

    pub fn error_field_in_step(&self, err: &ErrorModel, m: usize, tau: f64) -> Vec3 {
        let dir = self.directions[m];
        let local = dir * err.epsilon + Rotation::about_unit(dir, -tau).apply(Vec3::Z) * err.delta;
        self.starts[m].apply_inverse(local)
    }

    /// Error integral `p(t) = ∫₀ᵗ Ω₁′(s) ds` in closed form.
    pub fn error_integral(&self, err: &ErrorModel, t: f64) -> Result<Vec3> {
        let (m, tau) = self.locate(t)?;
        Ok(self.error_integral_in_step(err, m, tau))
    }

    pub fn error_integral_in_step(&self, err: &ErrorModel, m: usize, tau: f64) -> Vec3 {
        let dir = self.directions[m];
        let local = amp_local(dir, tau) * err.epsilon + det_local(dir, tau) * err.delta;
        self.node(err, m) + self.starts[m].apply_inverse(local)
    }

    /// `p(t_m)` at the start of step `m` (`m = len` gives `p(t_f)`).
    pub fn node(&self, err: &ErrorModel, m: usize) -> Vec3 {
        self.amp_nodes[m] * err.epsilon + self.det_nodes[m] * err.delta
    }

    /// Per-step increments `p_i` for the given error.
    pub fn step_integrals(&self, err: &ErrorModel) -> Vec<Vec3> {
        (0..self.len())
            .map(|m| self.node(err, m + 1) - self.node(err, m))
            .collect()
    }
}

/// `∫₀^τ Ω ds` for a unit amplitude error in the step's own frame.
fn amp_local(dir: Vec3, tau: f64) -> Vec3 {
    dir * tau
}

/// `∫₀^τ exp(−[Ω]× s) ẑ ds` for a transverse unit direction `Ω`.
fn det_local(dir: Vec3, tau: f64) -> Vec3 {
    Vec3::Z * tau.sin() - dir.cross(Vec3::Z) * (1.0 - tau.cos())
}

pub fn nominal_rotation(seq: &Sequence, t: f64) -> Result<Rotation> {
    NominalFrame::new(seq).rotation_at(t)
}

pub fn error_in_toggling_frame(seq: &Sequence, err: &ErrorModel, t: f64) -> Result<Vec3> {
    NominalFrame::new(seq).error_field(err, t)
}
