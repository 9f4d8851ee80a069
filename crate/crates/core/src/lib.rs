//! Blind source separation by constant modulus (CM) minimization using
//! Jacobi-style sweeps of elementary two-row transforms.
//!
//! * [`separators::run_gcma`]: prewhitening followed by complex Givens
//!   rotations, each chosen to minimize the CM cost exactly.
//! * [`separators::run_hgcma`]: Shear (hyperbolic) rotations, Givens
//!   rotations and row normalizations, which also repair an imperfect
//!   prewhitening when few samples are available.
//! * [`adaptive::AdaptiveState`]: a sliding-window tracker applying a few of
//!   those transforms per received sample.
//!
//! [`signal`] provides the MIMO model (sources, channels, noisy observations)
//! and the SINR / SER scoring used to evaluate the separators.

pub mod adaptive;
pub mod block;
pub mod error;
pub mod linalg;
pub mod rotations;
pub mod separators;
pub mod signal;
pub mod whitening;

pub use block::{ComplexBlock, C64};
pub use error::{Error, Result};
