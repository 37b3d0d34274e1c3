//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.
//!
//! Integrands here are piecewise analytic with kinks at pulse boundaries, so
//! callers split the domain at those boundaries and integrate each smooth
//! piece separately.

#![allow(clippy::excessive_precision)]

use crate::geom::Vec3;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 40;

/// One 15-point Kronrod estimate and its difference from the embedded
/// 7-point Gauss rule.
fn gk15<F: Fn(f64) -> Vec3>(f: &F, a: f64, b: f64) -> (Vec3, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kron += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

fn adapt<F: Fn(f64) -> Vec3>(f: &F, a: f64, b: f64, whole: Vec3, err: f64, tol: f64, depth: u32) -> Vec3 {
    if err <= tol || depth >= MAX_DEPTH || (b - a).abs() < 1e-15 {
        return whole;
    }
    let m = 0.5 * (a + b);
    let (l, el) = gk15(f, a, m);
    let (r, er) = gk15(f, m, b);
    adapt(f, a, m, l, el, 0.5 * tol, depth + 1) + adapt(f, m, b, r, er, 0.5 * tol, depth + 1)
}

/// `∫_a^b f(t) dt` to absolute tolerance `tol` (Euclidean norm).
pub fn integrate<F: Fn(f64) -> Vec3>(f: F, a: f64, b: f64, tol: f64) -> Vec3 {
    if a == b {
        return Vec3::ZERO;
    }
    let (whole, err) = gk15(&f, a, b);
    adapt(&f, a, b, whole, err, tol, 0)
}

/// Sums [`integrate`] over consecutive pieces `[knots[i], knots[i+1]]`,
/// sharing the tolerance evenly.
pub fn integrate_piecewise<F: Fn(usize, f64) -> Vec3>(f: F, knots: &[f64], tol: f64) -> Vec3 {
    let pieces = knots.len().saturating_sub(1).max(1) as f64;
    knots
        .windows(2)
        .enumerate()
        .map(|(i, w)| integrate(|t| f(i, t), w[0], w[1], tol / pieces))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|t| Vec3::new(1.0, t, t * t * t * t), 0.0, 2.0, 1e-14);
        assert!((v.x - 2.0).abs() < 1e-14);
        assert!((v.y - 2.0).abs() < 1e-14);
        assert!((v.z - 32.0 / 5.0).abs() < 1e-13);
    }

    #[test]
    fn trig_over_half_period() {
        let v = integrate(
            |t| Vec3::new(t.sin(), t.cos(), (10.0 * t).sin().powi(2)),
            0.0,
            PI,
            1e-12,
        );
        assert!((v.x - 2.0).abs() < 1e-12);
        assert!(v.y.abs() < 1e-12);
        assert!((v.z - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn kink_is_handled_by_knots() {
        let v = integrate_piecewise(|_, t| Vec3::new((t - 1.0).abs(), 0.0, 0.0), &[0.0, 1.0, 3.0], 1e-13);
        assert!((v.x - 2.5).abs() < 1e-13);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|_| Vec3::X, 1.0, 1.0, 1e-10), Vec3::ZERO);
    }
}
