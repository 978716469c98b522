//! Simulation and exact harmonic modeling of receiver saturation driven by
//! strong radio-frequency interference.
//!
//! The crate is organised bottom-up:
//!
//! * [`signals`] generates LFM echo and interference pulses and handles the
//!   `CSIG1` binary / CSV sample formats.
//! * [`saturation`] holds the component-wise hard clip, the `tanh` soft clip
//!   and the integral representation of the clip used for verification.
//! * [`special_fn`] evaluates Bessel functions of the first kind, Jacobi-Anger
//!   partial sums and the oscillatory Bessel-product integral `A2(m, n)`.
//! * [`harmonic_model`] turns `A2` into the two-phase harmonic decomposition of
//!   the clipped echo-plus-interference signal, reconstructs individual
//!   harmonics and carries the brute-force phase-average oracle.
//! * [`analysis`] provides spectra, STFT maps, band power and cancellation
//!   reports.
//! * [`scenario`] and [`verify`] wire everything into the experiment pipeline
//!   used by the `satharm` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod harmonic_model;
pub mod saturation;
pub mod scenario;
pub mod signals;
pub mod special_fn;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
