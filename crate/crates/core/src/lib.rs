//! Optimal single-qubit state estimation, checked against the no-signaling
//! constraint.
//!
//! A sender prepares a pure qubit along an isotropically chosen Bloch
//! direction; the receiver outputs a guessed direction. Any isotropic
//! estimator that cannot be used to tell apart two ensemble decompositions
//! of the same density operator must have a guessing density of the form
//!
//! ```text
//! P(m|r) = A cos²(θ/2) + B sin²(θ/2) = α + β cos θ
//! ```
//!
//! where θ is the angle between guess and input. This crate provides the
//! pieces to reproduce that statement numerically:
//!
//! - [`bloch`]: Bloch vectors, kets, density operators and isotropic sampling.
//! - [`ensembles`]: the shared entangled state, its two decompositions of the
//!   receiver's mixture, and the rotated measurement basis that steers between them.
//! - [`estimator`]: estimation strategies (random-axis measurement, the AB family,
//!   tabulated densities), guessing densities and θ-histograms.
//! - [`nosignal`]: the mixture-equality residual, AB-form derivation and fitting,
//!   and a Monte Carlo signaling detector.
//! - [`merit`]: figures of merit, their averages over the AB family, and the optimum.
//! - [`cli`]: reproducible report generation behind the `qubit-nosig` binary.
//!
//! All Monte Carlo drivers take an explicit `(seed, workers)` pair and are
//! bit-reproducible for a fixed worker count.
//!
//! ```
//! use qubit_nosig::estimator::GuessingForm;
//! use qubit_nosig::merit::{average_merit, MeritFunction};
//!
//! let optimum = GuessingForm::massar_popescu();
//! let fidelity = average_merit(&optimum, &MeritFunction::Fidelity);
//! assert!((fidelity - 2.0 / 3.0).abs() < 1e-10);
//! ```

pub mod bloch;
pub mod cli;
pub mod ensembles;
mod error;
pub mod estimator;
pub mod merit;
pub mod nosignal;
pub mod quad;
pub mod rng;

pub use error::{Error, Result};
