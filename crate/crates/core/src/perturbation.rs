//! Toggling-frame perturbation series.
//!
//! With `r′(t) = r₀ + r′₁(t) + r′₂(t) + …` and `dr′_n/dt = Ω₁′ × r′_{n−1}`:
//!
//! * `r′₁(t_f) = p(t_f) × r₀`
//! * `r′₂(t_f) = ∫ Ω₁′(s) × r′₁(s) ds`, which reduces to `r₀ × ½∮p×dp` when the
//!   walk is closed.
//!
//! Each term is bounded by `(‖Ω₁′‖_max t_f)ⁿ / n!`.

use serde::Serialize;

use crate::bloch::axis_states;
use crate::error::Result;
use crate::geom::Vec3;
use crate::quad::integrate_piecewise;
use crate::sequence::{ErrorModel, Sequence};
use crate::toggling::NominalFrame;
use crate::walk::Walk;

/// Absolute tolerance of the perturbation quadratures.
pub const QUAD_TOL: f64 = 1e-10;
/// Relative tolerance (against `xⁿ`, `x = ‖Ω₁‖ t_f`) for order certification.
pub const CERT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub r1: Vec3,
    pub r2: Vec3,
    pub tail_bound: f64,
    pub order_certified: u8,
}

/// `p(t_f)`: from the walk geometry for a single error channel, by quadrature
/// of `Ω₁′` otherwise.
pub fn final_error_integral(seq: &Sequence, err: &ErrorModel) -> Vec3 {
    match err.single_channel() {
        Some(ch) => {
            let w = Walk::from_sequence(seq, ch);
            w.closure_residual() * w.scale(err)
        }
        None => {
            let frame = NominalFrame::new(seq);
            integrate_piecewise(
                |m, t| frame.error_field_in_step(err, m, t - frame.boundaries()[m]),
                frame.boundaries(),
                QUAD_TOL,
            )
        }
    }
}

pub fn compute_r1(seq: &Sequence, err: &ErrorModel, r0: Vec3) -> Vec3 {
    final_error_integral(seq, err).cross(r0)
}

/// `∫₀^{t_f} Ω₁′(s) × (p(s) × r₀) ds` by adaptive quadrature, split at the
/// pulse boundaries.
pub fn compute_r2(seq: &Sequence, err: &ErrorModel, r0: Vec3) -> Vec3 {
    let frame = NominalFrame::new(seq);
    r2_with_frame(&frame, err, r0)
}

fn r2_with_frame(frame: &NominalFrame, err: &ErrorModel, r0: Vec3) -> Vec3 {
    let b = frame.boundaries();
    integrate_piecewise(
        |m, t| {
            let tau = t - b[m];
            let p = frame.error_integral_in_step(err, m, tau);
            frame.error_field_in_step(err, m, tau).cross(p.cross(r0))
        },
        b,
        QUAD_TOL,
    )
}

/// Sum of the exponential majorant beyond order `n`:
/// `xⁿ⁺¹/(n+1)! · eˣ` with `x = ‖Ω₁‖_max t_f`.
pub fn truncation_bound(seq: &Sequence, err: &ErrorModel, n: u32) -> f64 {
    let x = err.max_error_rate() * seq.total_duration();
    term_bound(x, n + 1) * x.exp()
}

/// `xⁿ / n!`.
pub fn term_bound(x: f64, n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * x / k as f64)
}

/// Perturbation terms at `r0` plus the suppression order certified over the
/// six axis states (`r′₁` is linear in `r₀` and `r′₂` is too, so the axes span
/// every initial state).
pub fn report(seq: &Sequence, err: &ErrorModel, r0: Vec3) -> Result<PerturbationReport> {
    err.validate()?;
    let frame = NominalFrame::new(seq);
    let p_final = final_error_integral(seq, err);
    let x = err.max_error_rate() * seq.total_duration();
    let order = certify_with(&frame, err, p_final, x);
    Ok(PerturbationReport {
        r1: p_final.cross(r0),
        r2: r2_with_frame(&frame, err, r0),
        tail_bound: truncation_bound(seq, err, 2),
        order_certified: order,
    })
}

pub fn certify_order(seq: &Sequence, err: &ErrorModel) -> u8 {
    let frame = NominalFrame::new(seq);
    let x = err.max_error_rate() * seq.total_duration();
    certify_with(&frame, err, final_error_integral(seq, err), x)
}

fn certify_with(frame: &NominalFrame, err: &ErrorModel, p_final: Vec3, x: f64) -> u8 {
    let axes = axis_states();
    let tol1 = CERT_TOL * x;
    if axes.iter().any(|r0| p_final.cross(*r0).norm() > tol1) {
        return 0;
    }
    // quadrature noise sits at QUAD_TOL regardless of x
    let tol2 = (CERT_TOL * x * x).max(10.0 * QUAD_TOL);
    if axes.iter().any(|r0| r2_with_frame(frame, err, *r0).norm() > tol2) {
        return 1;
    }
    2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::f64::consts::PI;

    #[test]
    fn closed_walk_kills_r1() {
        let seq = catalog::knill();
        for r0 in axis_states() {
            assert!(compute_r1(&seq, &ErrorModel::amplitude(0.01), r0).norm() < 1e-15);
            assert!(compute_r1(&seq, &ErrorModel::detuning(0.01), r0).norm() < 1e-15);
        }
    }

    #[test]
    fn spin_echo_r1_vanishes_only_along_z() {
        let seq = catalog::spin_echo();
        let err = ErrorModel::amplitude(0.01);
        assert!(compute_r1(&seq, &err, Vec3::Z).norm() < 1e-17);
        assert!(compute_r1(&seq, &err, Vec3::X).norm() > 1e-2);
    }

    #[test]
    fn single_pi_detuning_r1() {
        let d = 1e-3;
        let r1 = compute_r1(&catalog::single_pi(), &ErrorModel::detuning(d), Vec3::X);
        assert!(r1.max_abs_diff(-Vec3::Z * (2.0 * d)) < 1e-17);
    }

    #[test]
    fn mixed_errors_use_quadrature_and_agree_with_linearity() {
        let seq = catalog::spin_echo();
        let mixed = ErrorModel::new(0.01, 0.02).unwrap();
        let sum = final_error_integral(&seq, &ErrorModel::amplitude(0.01))
            + final_error_integral(&seq, &ErrorModel::detuning(0.02));
        assert!(final_error_integral(&seq, &mixed).max_abs_diff(sum) < 1e-12);
    }

    #[test]
    fn three_step_amplitude_r2() {
        let seq = catalog::three_step_amplitude();
        let eps = 0.01;
        let err = ErrorModel::amplitude(eps);
        assert!(compute_r2(&seq, &err, Vec3::Z).norm() < 1e-12);
        let r2 = compute_r2(&seq, &err, Vec3::X);
        let expect = 3f64.sqrt() / 4.0 * (eps * PI).powi(2);
        assert!((r2.norm() - expect).abs() < 1e-12);
    }

    #[test]
    fn bound_formula() {
        let seq = catalog::single_pi();
        assert_eq!(truncation_bound(&seq, &ErrorModel::NONE, 2), 0.0);
        let b = truncation_bound(&seq, &ErrorModel::amplitude(0.01), 2);
        let direct = (0.01 * PI).powi(3) / 6.0 * (0.01 * PI).exp();
        assert!((b - direct).abs() < 1e-18);
    }

    #[test]
    fn certification_levels() {
        assert_eq!(certify_order(&catalog::single_pi(), &ErrorModel::amplitude(1e-3)), 0);
        assert_eq!(certify_order(&catalog::knill(), &ErrorModel::amplitude(1e-3)), 1);
        assert_eq!(
            certify_order(&catalog::magic_amplitude().unwrap(), &ErrorModel::amplitude(1e-3)),
            2
        );
        let rep = report(&catalog::knill(), &ErrorModel::detuning(1e-3), Vec3::Y).unwrap();
        assert_eq!(rep.order_certified, 1);
        assert!(rep.r1.norm() < 1e-15);
    }
}
