//! Cross-checks against independent numerical oracles: an explicit ODE solver,
//! brute-force quadrature and a double-integral Magnus term.

mod common;

use approx::assert_abs_diff_eq;
use pulsewalk::bloch::{axis_states, evolve, propagator};
use pulsewalk::catalog;
use pulsewalk::magnus::{error_propagator, magnus_terms, propagate};
use pulsewalk::toggling::{error_in_toggling_frame, NominalFrame};
use pulsewalk::walk::Walk;
use pulsewalk::{Channel, ErrorModel, Sequence, Vec3};
use rand::Rng;

/// Classical fourth-order Runge–Kutta for `dr/dt = f(t) × r` on `[a, b]`.
fn rk4(f: &dyn Fn(f64) -> Vec3, r0: Vec3, a: f64, b: f64, steps: usize) -> Vec3 {
    let h = (b - a) / steps as f64;
    let mut r = r0;
    for k in 0..steps {
        let t = a + k as f64 * h;
        let k1 = f(t).cross(r);
        let k2 = f(t + h / 2.0).cross(r + k1 * (h / 2.0));
        let k3 = f(t + h / 2.0).cross(r + k2 * (h / 2.0));
        let k4 = f(t + h).cross(r + k3 * h);
        r += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    r
}

/// Composite Simpson rule on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> Vec3, a: f64, b: f64, n: usize) -> Vec3 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + k as f64 * h) * w;
    }
    s * (h / 3.0)
}

/// Clamps `t` strictly inside `[lo, hi]` so the field is read from one step.
fn inside(t: f64, lo: f64, hi: f64) -> f64 {
    let nudge = 1e-13 * hi.max(1.0);
    t.clamp(lo + nudge, hi - nudge)
}

fn toggling_field<'a>(seq: &'a Sequence, err: &ErrorModel) -> impl Fn(f64) -> Vec3 + 'a {
    let err = *err;
    let tf = seq.total_duration();
    move |t| error_in_toggling_frame(seq, &err, t.min(tf)).unwrap()
}

#[test]
fn toggling_ode_matches_exact_evolution() {
    let mut rng = common::rng(1);
    for _ in 0..10 {
        let n = rng.random_range(2..=5);
        let seq = common::random_train(&mut rng, n);
        let err = ErrorModel::new(0.02, -0.03).unwrap();
        let r0 = common::random_unit(&mut rng);
        let b = seq.boundaries();
        let f = toggling_field(&seq, &err);
        let mut r = r0;
        for m in 0..seq.len() {
            let g = |t: f64| f(inside(t, b[m], b[m + 1]));
            r = rk4(&g, r, b[m], b[m + 1], 400);
        }
        let exact = evolve(&seq, &err, r0).unwrap().final_toggling;
        assert!((r - exact).norm() < 1e-8, "{:?} vs {:?}", r, exact);
    }
}

#[test]
fn quadrature_of_error_field_matches_walk_steps() {
    let mut rng = common::rng(2);
    for _ in 0..50 {
        let n = rng.random_range(3..=7);
        let seq = common::random_train(&mut rng, n);
        for ch in Channel::BOTH {
            let err = ch.model(0.01);
            let walk = Walk::from_sequence(&seq, ch);
            let b = seq.boundaries();
            let f = toggling_field(&seq, &err);
            for (m, p) in walk.steps().iter().enumerate() {
                let g = |t: f64| f(inside(t, b[m], b[m + 1]));
                let q = simpson(&g, b[m], b[m + 1], 400);
                assert!((q - *p * walk.scale(&err)).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn second_magnus_term_matches_double_integral() {
    // Φ₂ = ½ ∫₀^T dt ∫₀^t ds Ω′(t) × Ω′(s), evaluated with nested Simpson rules
    for (seq, ch) in [
        (catalog::three_step_amplitude(), Channel::Amplitude),
        (catalog::knill(), Channel::Detuning),
        (catalog::spin_echo(), Channel::Amplitude),
    ] {
        let err = ch.model(0.01);
        let b = seq.boundaries();
        let f = toggling_field(&seq, &err);
        let mut total = Vec3::ZERO;
        for m in 0..seq.len() {
            let inner = |t: f64| {
                let mut acc = Vec3::ZERO;
                for k in 0..m {
                    acc += simpson(&|s| f(inside(s, b[k], b[k + 1])), b[k], b[k + 1], 60);
                }
                acc + simpson(&|s| f(inside(s, b[m], b[m + 1])), b[m], t, 60)
            };
            let outer = |t: f64| {
                let tt = inside(t, b[m], b[m + 1]);
                f(tt).cross(inner(tt)) * 0.5
            };
            total += simpson(&outer, b[m], b[m + 1], 60);
        }
        let phi2 = magnus_terms(&seq, &err).phi2_vector;
        assert!(
            (phi2 - total).norm() < 1e-9,
            "{}: {:?} vs {:?}",
            seq.name(),
            phi2,
            total
        );
    }
}

#[test]
fn su2_maps_onto_bloch_propagator() {
    let mut rng = common::rng(3);
    for _ in 0..30 {
        let n = rng.random_range(1..=7);
        let seq = common::random_train(&mut rng, n);
        let err = ErrorModel::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1)).unwrap();
        let so3 = propagate(&seq, &err).to_rotation();
        assert!(so3.max_abs_diff(&propagator(&seq, &err)) < 1e-10);
    }
}

#[test]
fn second_order_magnus_approximates_error_propagator() {
    let seq = catalog::knill();
    for ch in Channel::BOTH {
        let mut prev = f64::NAN;
        for e in [1e-2, 5e-3] {
            let err = ch.model(e);
            let v = error_propagator(&seq, &err);
            let approx = magnus_terms(&seq, &err).approximate_propagator();
            let d = v.projective_distance(&approx);
            // residual is third order: halving the error cuts it about eightfold
            if prev.is_finite() {
                assert!(d < prev / 6.0, "{d} vs {prev}");
            }
            prev = d;
        }
    }
}

#[test]
fn toggling_frame_undoes_nominal_rotation() {
    let seq = catalog::knill();
    let frame = NominalFrame::new(&seq);
    let r0 = Vec3::new(0.6, 0.0, 0.8);
    for r in axis_states() {
        let sim = evolve(&seq, &ErrorModel::NONE, r).unwrap();
        assert_abs_diff_eq!(sim.final_toggling.x, r.x, epsilon = 1e-14);
        assert_abs_diff_eq!(sim.final_toggling.y, r.y, epsilon = 1e-14);
        assert_abs_diff_eq!(sim.final_toggling.z, r.z, epsilon = 1e-14);
    }
    let sim = evolve(&seq, &ErrorModel::NONE, r0).unwrap();
    assert!((frame.final_rotation().apply(r0) - sim.final_lab).norm() < 1e-14);
}
