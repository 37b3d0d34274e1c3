//! SU(2) propagators and the first two Magnus terms of the error propagator.
//!
//! The spin propagator obeys `i dU/dt = [(Ω + Ω₁)·σ/2] U`. Splitting
//! `U = U₀ V` leaves `dV/dt = −i(Ω₁′·σ/2) V` in the toggling frame, and the
//! Magnus expansion `V = exp(Φ₁ + Φ₂ + …)` has vector coefficients
//!
//! * `Φ₁ = −i p(t_f)·σ/2`
//! * `Φ₂ = −i (½∫dt₁∫^{t₁}dt₂ Ω₁′(t₁) × Ω₁′(t₂))·σ/2 = −i(−½∫p×dp)·σ/2`
//!
//! The second vector is the negative of the walk's vector area: the nested
//! integral puts the later time on the left of the cross product.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{PulseError, Result};
use crate::geom::{Rotation, Vec3};
use crate::quad::integrate_piecewise;
use crate::sequence::{ErrorModel, Sequence};
use crate::toggling::{NominalFrame, TogglingPhases};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Quadrature tolerance for the Magnus integrals.
pub const MAGNUS_TOL: f64 = 1e-11;

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn sigma_x() -> Mat2 {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Mat2 {
        Mat2([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> Mat2 {
        Mat2([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `v·σ`.
    pub fn pauli(v: Vec3) -> Mat2 {
        Mat2([
            [C64::new(v.z, 0.0), C64::new(v.x, -v.y)],
            [C64::new(v.x, v.y), C64::new(-v.z, 0.0)],
        ])
    }

    /// `−i v·σ/2`, the generator form used throughout.
    pub fn generator(v: Vec3) -> Mat2 {
        Mat2::pauli(v).scale(C64::new(0.0, -0.5))
    }

    pub fn scale(self, s: C64) -> Mat2 {
        let m = self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn dagger(self) -> Mat2 {
        let m = self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(self) -> C64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn commutator(self, o: Mat2) -> Mat2 {
        self * o - o * self
    }

    pub fn max_abs_diff(self, o: Mat2) -> f64 {
        let d = (self - o).0;
        d.iter().flatten().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Coefficient vector `a` of a traceless anti-Hermitian `−i a·σ/2`.
    pub fn generator_vector(self) -> Vec3 {
        let m = self.0;
        // −i a·σ/2 = [[−i a_z, −i a_x − a_y], [−i a_x + a_y, i a_z]] / 2
        Vec3::new(
            -(m[0][1].im + m[1][0].im),
            m[1][0].re - m[0][1].re,
            m[1][1].im - m[0][0].im,
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

/// Element of SU(2), `exp(−i a·σ/2)` up to the sign that SU(2) carries over
/// SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Operator {
    m: Mat2,
}

impl Su2Operator {
    pub const IDENTITY: Su2Operator = Su2Operator { m: Mat2::IDENTITY };

    /// `exp(−i a·σ/2) = cos(|a|/2) I − i sin(|a|/2) â·σ`.
    pub fn from_rotation_vector(a: Vec3) -> Self {
        let theta = a.norm();
        let (s, c) = (0.5 * theta).sin_cos();
        let n = a.normalized().unwrap_or(Vec3::ZERO);
        Su2Operator {
            m: Mat2::IDENTITY.scale(C64::new(c, 0.0)) + Mat2::pauli(n).scale(C64::new(0.0, -s)),
        }
    }

    pub fn matrix(&self) -> Mat2 {
        self.m
    }

    pub fn dagger(&self) -> Su2Operator {
        Su2Operator { m: self.m.dagger() }
    }

    /// Product `self · other` (`other` acts first).
    pub fn then_after(&self, other: &Su2Operator) -> Su2Operator {
        Su2Operator { m: self.m * other.m }
    }

    /// Largest entry of `|U U† − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.m * self.m.dagger()).max_abs_diff(Mat2::IDENTITY)
    }

    pub fn det(&self) -> C64 {
        self.m.det()
    }

    /// Quaternion `(w, v)` with `U = w I − i v·σ`, sign fixed so `w ≥ 0`.
    fn quaternion(&self) -> (f64, Vec3) {
        let m = self.m.0;
        let w = 0.5 * (m[0][0].re + m[1][1].re);
        let v = Vec3::new(
            -0.5 * (m[0][1].im + m[1][0].im),
            0.5 * (m[1][0].re - m[0][1].re),
            0.5 * (m[1][1].im - m[0][0].im),
        );
        if w < 0.0 {
            (-w, -v)
        } else {
            (w, v)
        }
    }

    /// The vector `a` of `U = ±exp(−i a·σ/2)` with `|a| ∈ [0, π]`; the overall
    /// sign is quotiented out.
    pub fn axis_angle_vector(&self) -> Vec3 {
        let (w, v) = self.quaternion();
        let s = v.norm();
        match v.normalized() {
            Some(n) => n * (2.0 * s.atan2(w)),
            None => Vec3::ZERO,
        }
    }

    /// Projective distance `min(‖U − V‖, ‖U + V‖)` (max-entry norm).
    pub fn projective_distance(&self, o: &Su2Operator) -> f64 {
        let plus = self.m.max_abs_diff(o.m);
        let minus = self.m.max_abs_diff(o.m.scale(-ONE));
        plus.min(minus)
    }

    /// Image in SO(3): `R_ij = ½ tr(σ_i U σ_j U†)`.
    pub fn to_rotation(&self) -> Rotation {
        let sig = [Mat2::sigma_x(), Mat2::sigma_y(), Mat2::sigma_z()];
        let ud = self.m.dagger();
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = 0.5 * (sig[i] * self.m * sig[j] * ud).trace().re;
            }
        }
        Rotation::from_matrix(r)
    }
}

/// Full propagator `U(t_f)` as a product of exact per-step exponentials.
pub fn propagate(seq: &Sequence, err: &ErrorModel) -> Su2Operator {
    seq.steps().iter().fold(Su2Operator::IDENTITY, |acc, s| {
        let field = s.direction() * (1.0 + err.epsilon) + Vec3::Z * err.delta;
        Su2Operator::from_rotation_vector(field * s.duration()).then_after(&acc)
    })
}

/// `V = U₀† U`, whose axis-angle vector measures the total error.
pub fn error_propagator(seq: &Sequence, err: &ErrorModel) -> Su2Operator {
    let u0 = propagate(seq, &ErrorModel::NONE);
    u0.dagger().then_after(&propagate(seq, err))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagnusTerms {
    pub phi1_vector: Vec3,
    pub phi2_vector: Vec3,
}

impl MagnusTerms {
    /// `exp(Φ₁ + Φ₂)`, the second-order Magnus approximation of `V`.
    pub fn approximate_propagator(&self) -> Su2Operator {
        Su2Operator::from_rotation_vector(self.phi1_vector + self.phi2_vector)
    }
}

/// `Φ₁` from quadrature of `Ω₁′`; `Φ₂` from the single integral
/// `½∫ Ω₁′ × p dt`, with `p` in closed form.
pub fn magnus_terms(seq: &Sequence, err: &ErrorModel) -> MagnusTerms {
    let frame = NominalFrame::new(seq);
    let b = frame.boundaries();
    let phi1_vector = integrate_piecewise(|m, t| frame.error_field_in_step(err, m, t - b[m]), b, MAGNUS_TOL);
    let phi2_vector = integrate_piecewise(
        |m, t| {
            let tau = t - b[m];
            frame
                .error_field_in_step(err, m, tau)
                .cross(frame.error_integral_in_step(err, m, tau))
                * 0.5
        },
        b,
        MAGNUS_TOL,
    );
    MagnusTerms {
        phi1_vector,
        phi2_vector,
    }
}

/// Pauli-coefficient sums of the first-order constraints, as planar vectors
/// `(σ_x, σ_y)` coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JonesSums {
    /// `Σ_j σ_{φ′_j}`
    pub amplitude_sum: [f64; 2],
    /// `Σ_j σ_{φ″_j}`
    pub detuning_sum: [f64; 2],
}

pub fn jones_constraints(tphases: &TogglingPhases) -> Result<JonesSums> {
    if tphases.is_empty() {
        return Err(PulseError::EmptySequence);
    }
    let sum = |dirs: &[f64]| {
        dirs.iter().fold([0.0, 0.0], |acc, p| {
            let (s, c) = (p * std::f64::consts::PI).sin_cos();
            [acc[0] + c, acc[1] + s]
        })
    };
    Ok(JonesSums {
        amplitude_sum: sum(tphases.phases()),
        detuning_sum: sum(&tphases.detuning_directions()),
    })
}
