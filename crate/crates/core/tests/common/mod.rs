#![allow(dead_code)]

use pulsewalk::toggling::TogglingPhases;
use pulsewalk::{Channel, Sequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// π-pulse train with uniformly random lab phases (units of π).
pub fn random_train(rng: &mut ChaCha8Rng, n: usize) -> Sequence {
    let phases: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    Sequence::pi_train("random", &phases).unwrap()
}

/// π-pulse train whose walk for `channel` closes by construction.
///
/// Amplitude: toggling phases come in antiparallel pairs. Detuning: adjacent
/// equal toggling phases, whose ±90° rotated directions cancel.
pub fn closed_train(rng: &mut ChaCha8Rng, pairs: usize, channel: Channel) -> Sequence {
    let mut tp = Vec::with_capacity(2 * pairs);
    for _ in 0..pairs {
        let a: f64 = rng.random_range(-1.0..1.0);
        match channel {
            Channel::Amplitude => {
                tp.push(a);
                tp.push(a + 1.0);
            }
            Channel::Detuning => {
                tp.push(a);
                tp.push(a);
            }
        }
    }
    if channel == Channel::Amplitude {
        // shuffle pair members so the walk is not a simple back-and-forth
        for i in (1..tp.len()).rev() {
            let j = rng.random_range(0..=i);
            tp.swap(i, j);
        }
    }
    let lab = TogglingPhases::new(tp).to_lab();
    Sequence::pi_train("closed", &lab).unwrap()
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> pulsewalk::Vec3 {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    pulsewalk::Vec3::new(s * phi.cos(), s * phi.sin(), z)
}
