//! Exact Bloch-vector evolution under nominal plus error fields.
//!
//! During step `m` the total field `(1+ε)Ω_m + Δẑ` is constant, so each step is
//! one exact rotation about it. No ODE stepping is involved.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PulseError, Result};
use crate::geom::{Rotation, Vec3};
use crate::par::Exec;
use crate::sequence::{Channel, ErrorModel, Sequence};
use crate::toggling::NominalFrame;

/// Seed for the random part of the default initial-state set.
pub const DEFAULT_SEED: u64 = 0x5EED_0B10C;
/// Number of random unit vectors added to the six axis states.
pub const RANDOM_STATES: usize = 20;
/// Default slope-fit window and resolution.
pub const DEFAULT_RANGE: (f64, f64) = (1e-4, 1e-2);
pub const DEFAULT_POINTS: usize = 7;
/// Deviations below this are treated as numerical zero in slope fits.
pub const DEVIATION_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub final_lab: Vec3,
    pub final_toggling: Vec3,
    pub ideal: Vec3,
    pub deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<(f64, Vec3)>>,
}

/// Rotation applied by step `step` under error `err`.
fn step_rotation(dir: Vec3, duration: f64, err: &ErrorModel) -> Rotation {
    let field = dir * (1.0 + err.epsilon) + Vec3::Z * err.delta;
    Rotation::from_rotation_vector(field * duration)
}

/// Full lab-frame propagator of a sequence under `err`.
pub fn propagator(seq: &Sequence, err: &ErrorModel) -> Rotation {
    seq.steps().iter().fold(Rotation::IDENTITY, |acc, s| {
        step_rotation(s.direction(), s.duration(), err).then_after(&acc)
    })
}

fn check_unit(r0: Vec3) -> Result<()> {
    if (r0.norm() - 1.0).abs() > 1e-9 || !r0.is_finite() {
        return Err(PulseError::InvalidArgument(format!(
            "initial Bloch vector must be a unit vector, |r0| = {}",
            r0.norm()
        )));
    }
    Ok(())
}

pub fn evolve(seq: &Sequence, err: &ErrorModel, r0: Vec3) -> Result<SimResult> {
    evolve_sampled(seq, err, r0, 0)
}

/// Like [`evolve`], additionally recording `per_step` samples per step when
/// `per_step > 0`.
pub fn evolve_sampled(seq: &Sequence, err: &ErrorModel, r0: Vec3, per_step: usize) -> Result<SimResult> {
    check_unit(r0)?;
    err.validate()?;
    let mut r = r0;
    let mut t = 0.0;
    let mut trajectory = (per_step > 0).then(|| vec![(0.0, r0)]);
    for s in seq.steps() {
        let dur = s.duration();
        if let Some(traj) = trajectory.as_mut() {
            for k in 1..=per_step {
                let tau = dur * k as f64 / per_step as f64;
                traj.push((t + tau, step_rotation(s.direction(), tau, err).apply(r)));
            }
        }
        r = step_rotation(s.direction(), dur, err).apply(r);
        t += dur;
    }
    let frame = NominalFrame::new(seq);
    let ideal = seq.intended_net_effect().rotation().apply(r0);
    Ok(SimResult {
        final_lab: r,
        final_toggling: frame.final_rotation().apply_inverse(r),
        ideal,
        deviation: (r - ideal).norm(),
        trajectory,
    })
}

/// `±x̂, ±ŷ, ±ẑ` followed by [`RANDOM_STATES`] uniform random unit vectors.
pub fn default_initial_states(seed: u64) -> Vec<Vec3> {
    let mut states = axis_states().to_vec();
    states.extend(random_unit_vectors(seed, RANDOM_STATES));
    states
}

pub fn axis_states() -> [Vec3; 6] {
    [Vec3::X, -Vec3::X, Vec3::Y, -Vec3::Y, Vec3::Z, -Vec3::Z]
}

/// Uniform on the sphere via uniform `z` and azimuth.
pub fn random_unit_vectors(seed: u64, n: usize) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..=1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let rho = (1.0 - z * z).max(0.0).sqrt();
            Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeReport {
    pub error_values: Vec<f64>,
    pub deviations: Vec<f64>,
    /// `None` when too few deviations clear [`DEVIATION_FLOOR`].
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if n == 1 {
                lo
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Ordinary least squares of `ln y` on `ln x`: `(slope, intercept, r²)`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y >= DEVIATION_FLOOR)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, intercept, r2))
}

/// Worst-case deviation over `r0_set` for each error strength.
pub fn worst_case_deviations(
    seq: &Sequence,
    channel: Channel,
    r0_set: &[Vec3],
    errors: &[f64],
    exec: Exec,
) -> Result<Vec<f64>> {
    for r0 in r0_set {
        check_unit(*r0)?;
    }
    let grid: Vec<(usize, Vec3)> = (0..errors.len())
        .flat_map(|i| r0_set.iter().map(move |r| (i, *r)))
        .collect();
    let devs = exec.map(&grid, |&(i, r0)| {
        evolve(seq, &channel.model(errors[i]), r0).map(|s| s.deviation)
    });
    let mut worst = vec![0.0_f64; errors.len()];
    for ((i, _), d) in grid.iter().zip(devs) {
        worst[*i] = worst[*i].max(d?);
    }
    Ok(worst)
}

pub fn scaling_slope(
    seq: &Sequence,
    channel: Channel,
    r0_set: &[Vec3],
    range: (f64, f64),
    n_points: usize,
) -> Result<SlopeReport> {
    scaling_slope_with(seq, channel, r0_set, range, n_points, Exec::default())
}

pub fn scaling_slope_with(
    seq: &Sequence,
    channel: Channel,
    r0_set: &[Vec3],
    (lo, hi): (f64, f64),
    n_points: usize,
    exec: Exec,
) -> Result<SlopeReport> {
    if !(lo > 0.0 && lo < hi && hi <= 0.05) {
        return Err(PulseError::InvalidArgument(format!(
            "slope range must satisfy 0 < lo < hi ≤ 0.05, got [{lo}, {hi}]"
        )));
    }
    if n_points < 5 {
        return Err(PulseError::InvalidArgument(format!(
            "slope fit needs at least 5 points, got {n_points}"
        )));
    }
    if r0_set.is_empty() {
        return Err(PulseError::InvalidArgument("empty initial-state set".into()));
    }
    let error_values = log_space(lo, hi, n_points);
    let deviations = worst_case_deviations(seq, channel, r0_set, &error_values, exec)?;
    let fit = fit_loglog(&error_values, &deviations);
    Ok(SlopeReport {
        slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
        r_squared: fit.map(|f| f.2),
        error_values,
        deviations,
    })
}
