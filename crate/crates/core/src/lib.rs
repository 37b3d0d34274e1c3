//! Design and verification of composite pulse sequences that cancel systematic
//! amplitude and detuning errors in single-qubit rotations.
//!
//! The library works in the toggling frame of the error-free evolution. There
//! the error field integrates to a curve `p(t)`; a closed curve means
//! first-order compensation, and a closed curve with zero vector area means
//! second-order compensation. The same quantities are recovered from the SU(2)
//! propagator via its Magnus expansion, and checked against exact Bloch
//! evolution.
//!
//! Modules:
//! - [`geom`]: vectors and rotations
//! - [`sequence`]: pulse steps, sequences, error models, the sequence file format
//! - [`toggling`]: lab ↔ toggling frame
//! - [`walk`]: error-integral walks and vector areas
//! - [`bloch`]: exact evolution and error-scaling slopes
//! - [`perturbation`]: series terms and truncation bounds
//! - [`magnus`]: SU(2) propagators and Magnus terms
//! - [`catalog`]: built-in sequences, families and the magic-angle solver

pub mod bloch;
pub mod catalog;
pub mod error;
pub mod export;
pub mod geom;
pub mod magnus;
pub mod par;
pub mod perturbation;
pub mod quad;
pub mod sequence;
pub mod toggling;
pub mod walk;

pub use error::{PulseError, Result};
pub use geom::{compose, rotate, Rotation, Vec3};
pub use par::Exec;
pub use sequence::{Channel, ErrorModel, NetEffect, PulseStep, Sequence};
