//! Error-integral walks.
//!
//! The error integral `p(t) = ∫₀ᵗ Ω₁′ ds` of a pulse sequence traces a curve in
//! the toggling frame. Its per-step increments `p_i` placed head to tail form
//! the walk; a closed walk cancels first-order error for every initial state,
//! and a closed walk of zero vector area `½∮p×dp` cancels second order too.
//!
//! Geometry is stored with the error strength scaled out:
//! amplitude walks in units of `επ` (a π-pulse step has length 1),
//! detuning walks in units of `Δ` (a π-pulse step is a semicircle of radius 1
//! whose chord has length 2).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{PulseError, Result};
use crate::geom::{Rotation, Vec3};
use crate::sequence::{Channel, ErrorModel, Sequence};
use crate::toggling::{NominalFrame, TogglingPhases};

/// Residual below which a walk counts as closed (scaled units).
pub const CLOSURE_TOL: f64 = 1e-9;
/// Vector-area magnitude below which a closed walk counts as second-order
/// compensating (scaled units).
pub const AREA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Segment {
    Line {
        start: Vec3,
        end: Vec3,
    },
    /// Circular arc: `start` rotated about `center` by `sweep` radians,
    /// right-handed about the unit `axis`.
    Arc {
        center: Vec3,
        axis: Vec3,
        start: Vec3,
        sweep: f64,
    },
}

impl Segment {
    pub fn start(&self) -> Vec3 {
        match *self {
            Segment::Line { start, .. } | Segment::Arc { start, .. } => start,
        }
    }

    pub fn end(&self) -> Vec3 {
        self.point_at(1.0)
    }

    /// Point at fraction `u ∈ [0, 1]` of the segment's duration.
    pub fn point_at(&self, u: f64) -> Vec3 {
        match *self {
            Segment::Line { start, end } => start + (end - start) * u,
            Segment::Arc {
                center,
                axis,
                start,
                sweep,
            } => center + Rotation::about_unit(axis, sweep * u).apply(start - center),
        }
    }

    /// Chord term `½ s × e` of the shoelace sum.
    pub fn chord_area(&self) -> Vec3 {
        self.start().cross(self.end()) * 0.5
    }

    /// Vector area between the curve and its chord, `½∮(p − s) × dp` over the
    /// segment closed by the chord. Zero for lines.
    pub fn lune_area(&self) -> Vec3 {
        match *self {
            Segment::Line { .. } => Vec3::ZERO,
            Segment::Arc {
                center,
                axis,
                start,
                sweep,
            } => {
                let end = self.end();
                let r2 = (start - center).norm_sq();
                (center - start).cross(end - start) * 0.5 + axis * (0.5 * sweep * r2)
            }
        }
    }

    /// `½∫ p × dp` along the segment, measured from the origin.
    pub fn area_contribution(&self) -> Vec3 {
        self.chord_area() + self.lune_area()
    }

    /// Offset of the curve midpoint from the chord midpoint; its z-sign tells
    /// whether an arc threads above or below the plane of its chord.
    pub fn bulge(&self) -> Vec3 {
        self.point_at(0.5) - (self.start() + self.end()) * 0.5
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Walk {
    kind: Channel,
    steps: Vec<Vec3>,
    curve: Vec<Segment>,
    durations: Vec<f64>,
    closure_residual: Vec3,
}

impl Walk {
    fn from_curve(kind: Channel, curve: Vec<Segment>, durations: Vec<f64>) -> Self {
        let steps: Vec<Vec3> = curve.iter().map(|s| s.end() - s.start()).collect();
        let closure_residual = curve.last().map(Segment::end).unwrap_or(Vec3::ZERO);
        Self {
            kind,
            steps,
            curve,
            durations,
            closure_residual,
        }
    }

    /// Walk of any sequence, built from its nominal frame.
    pub fn from_sequence(seq: &Sequence, kind: Channel) -> Self {
        let frame = NominalFrame::new(seq);
        let mut curve = Vec::with_capacity(frame.len());
        let mut at = Vec3::ZERO;
        for (m, step) in seq.steps().iter().enumerate() {
            let n = frame.toggling_direction(m);
            let seg = match kind {
                Channel::Amplitude => Segment::Line {
                    start: at,
                    end: at + n * step.angle(),
                },
                Channel::Detuning => arc_from(at, n, frame.toggling_z(m), step.duration()),
            };
            at = seg.end();
            curve.push(seg);
        }
        Self::from_curve(
            kind,
            curve,
            frame.boundaries().windows(2).map(|w| w[1] - w[0]).collect(),
        )
    }

    pub fn kind(&self) -> Channel {
        self.kind
    }

    /// Step vectors `p_i` in scaled units.
    pub fn steps(&self) -> &[Vec3] {
        &self.steps
    }

    pub fn curve(&self) -> &[Segment] {
        &self.curve
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn closure_residual(&self) -> Vec3 {
        self.closure_residual
    }

    pub fn is_closed(&self) -> bool {
        self.closure_residual.norm() < CLOSURE_TOL
    }

    /// Factor converting scaled geometry to a physical error integral.
    pub fn scale(&self, err: &ErrorModel) -> f64 {
        match self.kind {
            Channel::Amplitude => err.epsilon * PI,
            Channel::Detuning => err.delta,
        }
    }

    /// `½∫₀^{t_f} p × dp` from the origin, defined for open walks too.
    pub fn area_integral(&self) -> Vec3 {
        self.curve.iter().map(Segment::area_contribution).sum()
    }

    /// Vector area `½∮ p × dp` of a closed walk.
    pub fn vector_area(&self) -> Result<Vec3> {
        let residual = self.closure_residual.norm();
        if residual >= CLOSURE_TOL {
            return Err(PulseError::OpenWalk { residual });
        }
        Ok(self.area_integral())
    }

    /// Samples `(t, p(t), step)` with `per_step` intervals per step, scaled
    /// units, time in units of `1/Ω₀`.
    pub fn samples(&self, per_step: usize) -> Vec<(f64, Vec3, usize)> {
        let per_step = per_step.max(1);
        let mut out = Vec::with_capacity(self.curve.len() * per_step + 1);
        let mut t0 = 0.0;
        for (i, (seg, dur)) in self.curve.iter().zip(&self.durations).enumerate() {
            let first = if i == 0 { 0 } else { 1 };
            for k in first..=per_step {
                let u = k as f64 / per_step as f64;
                out.push((t0 + u * dur, seg.point_at(u), i));
            }
            t0 += dur;
        }
        out
    }
}

/// Arc traced by `p` during a step with transverse toggling direction `n`,
/// starting at `at`, with the detuning field initially along `w`.
///
/// `Ω₁′(τ) = R(n, −τ) w`, so `p` circles the center `at − n × w` with radius
/// `|w|`, turning right-handed about `−n`.
fn arc_from(at: Vec3, n: Vec3, w: Vec3, sweep: f64) -> Segment {
    Segment::Arc {
        center: at - n.cross(w),
        axis: -n,
        start: at,
        sweep,
    }
}

/// Planar amplitude walk from toggling phases and pulse areas (units of π):
/// `p_j = area_j · (cos φ′_j, sin φ′_j, 0)`.
pub fn amplitude_walk(tphases: &TogglingPhases, areas: &[f64]) -> Result<Walk> {
    if tphases.is_empty() {
        return Err(PulseError::EmptySequence);
    }
    if areas.len() != tphases.len() {
        return Err(PulseError::InvalidArgument(format!(
            "{} areas for {} phases",
            areas.len(),
            tphases.len()
        )));
    }
    let mut at = Vec3::ZERO;
    let curve = tphases
        .phases()
        .iter()
        .zip(areas)
        .map(|(phi, area)| {
            let end = at + Vec3::planar(phi * PI) * *area;
            let seg = Segment::Line { start: at, end };
            at = end;
            seg
        })
        .collect();
    Ok(Walk::from_curve(
        Channel::Amplitude,
        curve,
        areas.iter().map(|a| a * PI).collect(),
    ))
}

/// Detuning walk of a π-pulse train from its toggling phases.
///
/// Step `j` is a semicircle of radius 1 whose chord is `2·(cos φ″_j, sin φ″_j, 0)`;
/// odd steps (1-based) rise above the plane and even steps dip below it.
pub fn detuning_walk(tphases: &TogglingPhases) -> Result<Walk> {
    if tphases.is_empty() {
        return Err(PulseError::EmptySequence);
    }
    let mut at = Vec3::ZERO;
    let curve = tphases
        .phases()
        .iter()
        .enumerate()
        .map(|(i, phi)| {
            let w = if i % 2 == 0 { Vec3::Z } else { -Vec3::Z };
            let seg = arc_from(at, Vec3::planar(phi * PI), w, PI);
            at = seg.end();
            seg
        })
        .collect();
    Ok(Walk::from_curve(Channel::Detuning, curve, vec![PI; tphases.len()]))
}

/// `Σ_j Σ_{k<j} sin(ψ_j − ψ_k)` with `ψ = φ′` for amplitude and `ψ = φ″` for
/// detuning.
pub fn pairwise_sine_sum(tphases: &TogglingPhases, kind: Channel) -> f64 {
    let dirs: Vec<f64> = match kind {
        Channel::Amplitude => tphases.phases().to_vec(),
        Channel::Detuning => tphases.detuning_directions(),
    };
    let mut sum = 0.0;
    for j in 0..dirs.len() {
        for k in 0..j {
            sum += ((dirs[j] - dirs[k]) * PI).sin();
        }
    }
    sum
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondOrderReport {
    pub vector_area: Vec3,
    /// Only defined for π-pulse trains.
    pub pairwise_sine_sum: Option<f64>,
    pub fully_compensating: bool,
    /// Initial states along this axis see no second-order error.
    pub preserved_axis: Option<Vec3>,
}

impl SecondOrderReport {
    pub fn new(walk: &Walk, tphases: Option<&TogglingPhases>) -> Result<Self> {
        let vector_area = walk.vector_area()?;
        let fully_compensating = vector_area.norm() < AREA_TOL;
        Ok(Self {
            vector_area,
            pairwise_sine_sum: tphases.map(|tp| pairwise_sine_sum(tp, walk.kind())),
            fully_compensating,
            preserved_axis: if fully_compensating {
                None
            } else {
                vector_area.normalized()
            },
        })
    }
}
