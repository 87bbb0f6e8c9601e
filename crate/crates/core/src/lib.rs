//! Interacting spots with oscillatory tails in a nonlocal two-component
//! reaction-diffusion system.
//!
//! The crate is organised bottom-up:
//!
//! - [`profile`]: homogeneous state, radial single-spot profile, numeric
//!   interaction function and the saturation coefficient `Q`.
//! - [`kernel`]: closed-form oscillatory interaction kernel, fitting and zeros.
//! - [`rings`]: stationary, traveling and rotating N-spot ring equilibria.
//! - [`stability`]: per-Fourier-mode stability matrices and verdicts.
//! - [`odesim`]: time integration of the reduced particle models.
//! - [`pdesim`]: pseudo-spectral solver for the full field equations.
//! - [`reproduce`]: table and curve regeneration plus cross-validation.

pub mod dopri;
pub mod eig;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod odesim;
pub mod params;
pub mod pdesim;
pub mod profile;
pub mod reproduce;
pub mod rings;
pub mod roots;
pub mod spline;
pub mod stability;

pub use error::{Error, Result};
pub use kernel::KernelParams;
pub use params::{PdeParams, ReducedParams};
pub use rings::{RingKind, RingSolution};
pub use stability::{StabilityReport, Verdict};
pub use num_complex::Complex64;
