//! Helpers shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use nalgebra::DMatrix;
use spot_rings::odesim::{numerical_jacobian, Model, SpotEnsemble};
use spot_rings::{Complex64, KernelParams, ReducedParams, Result, RingKind, RingSolution};

pub const FD_STEP: f64 = 1e-6;

pub fn model_for(kind: RingKind) -> Model {
    match kind {
        RingKind::Stationary => Model::First,
        _ => Model::Second,
    }
}

/// Eigenvalues of the finite-difference Jacobian of the full reduced model
/// at the ring, in the frame co-rotating with it.
pub fn fd_spectrum(ring: &RingSolution, params: &ReducedParams, kernel: &KernelParams) -> Result<Vec<Complex64>> {
    let model = model_for(ring.kind);
    let state = SpotEnsemble::from_ring(ring, model, kernel)?.to_state();
    let omega = if ring.kind == RingKind::Rotating { ring.omega0 } else { 0.0 };
    let jac = numerical_jacobian(model, &state, params, kernel, omega, FD_STEP)?;
    let dim = state.len();
    let m = DMatrix::from_row_slice(dim, dim, &jac);
    Ok(m.complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect())
}

/// Exactly-zero eigenvalues of the full Jacobian implied by the symmetries:
/// translations and rotation, plus for traveling rings the rotation of the
/// velocity, which forms a Jordan chain with translation. In the rotating
/// frame translations appear at `+/- i omega`, leaving only rotation.
pub fn symmetry_zero_count(kind: RingKind, n: usize) -> usize {
    match kind {
        RingKind::Stationary => 3,
        RingKind::Traveling => 4 + usize::from(n == 2),
        RingKind::Rotating => 1,
    }
}
