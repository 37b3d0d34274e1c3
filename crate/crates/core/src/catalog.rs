//! Built-in sequences, one-parameter families and the magic-angle solver.
//!
//! Family parameters (`α`, `θ`) are in radians.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bloch::{default_initial_states, scaling_slope, DEFAULT_POINTS, DEFAULT_RANGE, DEFAULT_SEED};
use crate::error::{PulseError, Result};
use crate::geom::{wrap_half_turns, Vec3};
use crate::par::Exec;
use crate::perturbation::certify_order;
use crate::sequence::{Channel, NetEffect, PulseStep, Sequence};
use crate::toggling::{toggle_phases, TogglingPhases};
use crate::walk::{amplitude_walk, detuning_walk, SecondOrderReport, Walk, AREA_TOL};

/// Tolerance in α for the magic-angle root.
pub const MAGIC_TOL: f64 = 1e-10;

pub const NAMES: [&str; 9] = [
    "single_pi",
    "spin_echo",
    "three_step_amplitude",
    "three_step_detuning",
    "knill",
    "knill_family(α)",
    "magic_detuning",
    "magic_amplitude",
    "theta_family(θ,α)",
];

fn pi_train(name: &str, phases: &[f64]) -> Sequence {
    Sequence::pi_train(name, phases).expect("built-in π-pulse trains are valid")
}

pub fn single_pi() -> Sequence {
    pi_train("single_pi", &[0.0])
}

/// `R₀^{π/2} → R_{π/2}^π → R₀^{π/2}`, a net π rotation about `y`.
pub fn spin_echo() -> Sequence {
    let steps = vec![
        PulseStep::new(0.0, 0.5).unwrap(),
        PulseStep::pi(0.5),
        PulseStep::new(0.0, 0.5).unwrap(),
    ];
    Sequence::new("spin_echo", steps, NetEffect::pi_about_phase(0.5)).unwrap()
}

/// `R₀^π → R_{2π/3}^π → R₀^π`.
pub fn three_step_amplitude() -> Sequence {
    pi_train("three_step_amplitude", &[0.0, 2.0 / 3.0, 0.0])
}

/// `R₀^π → R_{π/3}^π → R₀^π`.
pub fn three_step_detuning() -> Sequence {
    pi_train("three_step_detuning", &[0.0, 1.0 / 3.0, 0.0])
}

/// `R_{π/6}^π → R₀^π → R_{π/2}^π → R₀^π → R_{π/6}^π`.
pub fn knill() -> Sequence {
    pi_train("knill", &[1.0 / 6.0, 0.0, 0.5, 0.0, 1.0 / 6.0])
}

/// Lab phases (radians) `(π/6 + 2α, α, π/2, −α, π/6 − 2α)`.
pub fn knill_family_phases(alpha: f64) -> [f64; 5] {
    [PI / 6.0 + 2.0 * alpha, alpha, PI / 2.0, -alpha, PI / 6.0 - 2.0 * alpha]
}

/// The first-order compensating Knill-like family; `α = 0` is Knill.
pub fn knill_family(alpha: f64) -> Sequence {
    let phases: Vec<f64> = knill_family_phases(alpha).iter().map(|p| p / PI).collect();
    pi_train(&format!("knill_family({alpha})"), &phases)
}

/// The propagator-derived parametrization
/// `(π + 2α′, α′, −π/3, −5π/3 − α′, −7π/3 − 2α′)` (radians).
pub fn jones_family_phases(alpha_prime: f64) -> [f64; 5] {
    let a = alpha_prime;
    [
        PI + 2.0 * a,
        a,
        -PI / 3.0,
        -5.0 * PI / 3.0 - a,
        -7.0 * PI / 3.0 - 2.0 * a,
    ]
}

/// Toggling phases of a Knill-family member in the canonical orientation
/// `(π/6, π/3 + α, 5π/6, −2π/3 + α, −π/2)`, units of π.
pub fn knill_family_toggling(alpha: f64) -> TogglingPhases {
    let a = alpha / PI;
    TogglingPhases::new(vec![1.0 / 6.0, 1.0 / 3.0 + a, 5.0 / 6.0, -2.0 / 3.0 + a, -0.5])
}

/// z-component of the vector area of the family walk for `channel`
/// (units of `(επ)²` or `Δ²`).
pub fn family_area_z(alpha: f64, channel: Channel) -> f64 {
    let tp = toggle_phases(&knill_family(alpha)).expect("family members are π-pulse trains");
    let walk = match channel {
        Channel::Amplitude => amplitude_walk(&tp, &[1.0; 5]),
        Channel::Detuning => detuning_walk(&tp),
    }
    .expect("five-step walk");
    walk.area_integral().z
}

/// Bisection for a sign change of `f` on `[lo, hi]` to width `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(PulseError::NoSignChange { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Positive α at which the family walk for `channel` has zero vector area.
pub fn solve_magic_angle(channel: Channel) -> Result<f64> {
    solve_magic_angle_in(channel, 0.0, PI)
}

pub fn solve_magic_angle_in(channel: Channel, lo: f64, hi: f64) -> Result<f64> {
    bisect(|a| family_area_z(a, channel), lo, hi, 0.1 * MAGIC_TOL)
}

pub fn magic_detuning() -> Result<Sequence> {
    Ok(knill_family(solve_magic_angle(Channel::Detuning)?).renamed("magic_detuning"))
}

pub fn magic_amplitude() -> Result<Sequence> {
    Ok(knill_family(solve_magic_angle(Channel::Amplitude)?).renamed("magic_amplitude"))
}

/// `γ` solving `cos γ cos α = −θ/(4π)` on the positive branch.
pub fn theta_family_gamma(theta: f64, alpha: f64) -> Result<f64> {
    let c = -theta / (4.0 * PI * alpha.cos());
    if !c.is_finite() || c.abs() > 1.0 {
        return Err(PulseError::Infeasible { theta, alpha });
    }
    Ok(c.acos())
}

/// Four π-pulses netting to identity followed by `R₀^θ`.
///
/// The toggling phases `(α+γ, α−γ, −α−γ, −α+γ)` make the four equal sides
/// and the final side of length `θ/π` close; they are mapped back to lab
/// phases through the π-pulse toggling transform.
pub fn theta_family(theta: f64, alpha: f64) -> Result<Sequence> {
    if !(theta > 0.0 && theta <= 2.0 * PI) {
        return Err(PulseError::InvalidArgument(format!(
            "θ must lie in (0, 2π], got {theta}"
        )));
    }
    let gamma = theta_family_gamma(theta, alpha)?;
    let toggling = TogglingPhases::new(
        [alpha + gamma, alpha - gamma, -alpha - gamma, -alpha + gamma]
            .iter()
            .map(|p| p / PI)
            .collect(),
    );
    let mut steps: Vec<PulseStep> = toggling.to_lab().into_iter().map(PulseStep::pi).collect();
    steps.push(PulseStep::new(0.0, theta / PI)?);
    Sequence::new(
        format!("theta_family({theta},{alpha})"),
        steps,
        NetEffect::new(Vec3::X, theta / PI)?,
    )
}

/// Lab phases (units of π) from the closed form `α(1,1,−1,−1,0) + γ(1,3,3,1,0)`.
pub fn theta_family_closed_form(theta: f64, alpha: f64) -> Result<[f64; 5]> {
    let g = theta_family_gamma(theta, alpha)?;
    let a = [1.0, 1.0, -1.0, -1.0, 0.0];
    let c = [1.0, 3.0, 3.0, 1.0, 0.0];
    let mut out = [0.0; 5];
    for i in 0..5 {
        out[i] = wrap_half_turns((alpha * a[i] + g * c[i]) / PI);
    }
    Ok(out)
}

/// Looks up a built-in sequence. Parameterized entries take radians, written
/// as plain numbers or with a `pi` factor: `knill_family(pi/3)`,
/// `theta_family(pi/2, pi)`, `knill_family(-0.25pi)`.
pub fn catalog(name: &str) -> Result<Sequence> {
    let name = name.trim();
    let (head, args) = match name.find('(') {
        Some(i) if name.ends_with(')') => {
            let args: Vec<&str> = name[i + 1..name.len() - 1].split(',').map(str::trim).collect();
            (&name[..i], Some(args))
        }
        Some(_) => return Err(PulseError::UnknownSequence(name.to_string())),
        None => (name, None),
    };
    let nums = |n: usize| -> Result<Vec<f64>> {
        let args = args.as_deref().unwrap_or(&[]);
        if args.len() != n {
            return Err(PulseError::InvalidArgument(format!(
                "`{head}` takes {n} argument(s), got {}",
                args.len()
            )));
        }
        args.iter().map(|a| parse_angle(a)).collect()
    };
    match (head, args.is_some()) {
        ("single_pi", false) => Ok(single_pi()),
        ("spin_echo", false) => Ok(spin_echo()),
        ("three_step_amplitude", false) => Ok(three_step_amplitude()),
        ("three_step_detuning", false) => Ok(three_step_detuning()),
        ("knill", false) => Ok(knill()),
        ("magic_detuning", false) => magic_detuning(),
        ("magic_amplitude", false) => magic_amplitude(),
        ("knill_family", true) => Ok(knill_family(nums(1)?[0])),
        ("theta_family", true) => {
            let v = nums(2)?;
            theta_family(v[0], v[1])
        }
        _ => Err(PulseError::UnknownSequence(name.to_string())),
    }
}

/// Parses `1.5`, `pi`, `-pi/3`, `0.25pi`, `2pi/3`, `0.5*pi` as radians.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || PulseError::Parse(format!("cannot read angle `{text}`"));
    let t: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.as_str()),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d.parse::<f64>().map_err(|_| bad())?)),
        None => (body, None),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = if coef.is_empty() {
                1.0
            } else {
                coef.parse::<f64>().map_err(|_| bad())?
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let value = sign * value / den.unwrap_or(1.0);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub sequence: String,
    pub channel: Channel,
    /// Scaled units (`επ` or `Δ`).
    pub closure_residual: Vec3,
    pub first_order: bool,
    /// Present when the walk is closed.
    pub second_order_detail: Option<SecondOrderReport>,
    pub second_order: bool,
    /// Initial states along these axes are protected beyond the certified
    /// order.
    pub preserved_axes: Vec<Vec3>,
    /// Order certified from the perturbation terms at a probe error of 1e−3.
    pub perturbative_order: u8,
    pub slope: Option<f64>,
}

impl VerifyReport {
    pub fn certified_order(&self) -> u8 {
        match (self.first_order, self.second_order) {
            (true, true) => 2,
            (true, false) => 1,
            _ => 0,
        }
    }
}

pub const PROBE_ERROR: f64 = 1e-3;

pub fn verify(seq: &Sequence, channel: Channel) -> Result<VerifyReport> {
    let walk = Walk::from_sequence(seq, channel);
    let tphases = toggle_phases(seq).ok();
    let residual = walk.closure_residual();
    let first_order = walk.is_closed();
    let detail = if first_order {
        Some(SecondOrderReport::new(&walk, tphases.as_ref())?)
    } else {
        None
    };
    let second_order = detail.as_ref().is_some_and(|d| d.fully_compensating);
    let preserved_axes = match &detail {
        None => residual.normalized().into_iter().collect(),
        Some(d) => d.preserved_axis.into_iter().collect(),
    };
    let slope = scaling_slope(
        seq,
        channel,
        &default_initial_states(DEFAULT_SEED),
        DEFAULT_RANGE,
        DEFAULT_POINTS,
    )?
    .slope;
    Ok(VerifyReport {
        sequence: seq.name().to_string(),
        channel,
        closure_residual: residual,
        first_order,
        second_order,
        second_order_detail: detail,
        preserved_axes,
        perturbative_order: certify_order(seq, &channel.model(PROBE_ERROR)),
        slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaScanRow {
    pub alpha: f64,
    /// `|closure residual|`, scaled units.
    pub residual: f64,
    pub area_z: f64,
}

/// Closure residual and area of `knill_family(α)` over `n` evenly spaced α.
pub fn scan_alpha(channel: Channel, lo: f64, hi: f64, n: usize, exec: Exec) -> Result<Vec<AlphaScanRow>> {
    if n < 2 || lo >= hi || !lo.is_finite() || !hi.is_finite() {
        return Err(PulseError::InvalidArgument(format!(
            "α scan needs lo < hi and at least 2 points, got [{lo}, {hi}] with {n}"
        )));
    }
    let alphas: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    Ok(exec.map(&alphas, |&alpha| {
        let walk = Walk::from_sequence(&knill_family(alpha), channel);
        AlphaScanRow {
            alpha,
            residual: walk.closure_residual().norm(),
            area_z: walk.area_integral().z,
        }
    }))
}

/// Whether a family member's area for `channel` is below [`AREA_TOL`].
pub fn family_is_second_order(alpha: f64, channel: Channel) -> bool {
    family_area_z(alpha, channel).abs() < AREA_TOL
}
