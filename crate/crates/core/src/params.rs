//! Parameter records for the field equations and the reduced particle models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Saturation ratio `Q` of the Fig. 1 parameter set, computed once by the
/// profile pipeline (`profile::compute_q` on the default radial solve) and
/// pinned here so reductions do not have to re-solve the profile.
pub const FIG1_Q: f64 = 2001.234;

/// Coefficients of the two-component nonlocal system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeParams {
    pub d_u: f64,
    pub d_w: f64,
    pub k1: f64,
    pub k3: f64,
    pub k4: f64,
    pub kappa: f64,
    pub tau: f64,
}

impl PdeParams {
    /// The reference parameter set used throughout, at `tau = 0.1`.
    pub fn fig1() -> Self {
        PdeParams {
            d_u: 1.1e-4,
            d_w: 9.64e-4,
            k1: 1.01,
            k3: 0.3,
            k4: 1.0,
            kappa: -0.1,
            tau: 0.1,
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    /// Drift bifurcation point `1/k3`.
    pub fn tau_c(&self) -> f64 {
        1.0 / self.k3
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.d_u, self.d_w, self.k1, self.k3, self.k4, self.kappa, self.tau,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite coefficient".into()));
        }
        if self.d_u <= 0.0 || self.d_w <= 0.0 {
            return Err(Error::InvalidParams(
                "diffusion coefficients must be positive".into(),
            ));
        }
        if self.tau <= 0.0 {
            return Err(Error::InvalidParams("tau must be positive".into()));
        }
        if self.k3 == 0.0 {
            return Err(Error::InvalidParams("k3 must be nonzero".into()));
        }
        Ok(())
    }
}

impl Default for PdeParams {
    fn default() -> Self {
        Self::fig1()
    }
}

/// Coefficients of the reduced particle models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    /// Linear drift coefficient `k3^2 (tau - 1/k3)`.
    pub m1: f64,
    /// Cubic saturation coefficient `Q / k3`.
    pub m2: f64,
    pub k3: f64,
    pub tau: f64,
}

impl ReducedParams {
    /// Build from kinetic data and the saturation ratio `Q`.
    pub fn new(k3: f64, tau: f64, q: f64) -> Self {
        ReducedParams {
            m1: k3 * k3 * (tau - 1.0 / k3),
            m2: q / k3,
            k3,
            tau,
        }
    }

    pub fn from_pde(params: &PdeParams, q: f64) -> Self {
        Self::new(params.k3, params.tau, q)
    }

    /// Reference set with the pinned `Q`.
    pub fn fig1(tau: f64) -> Self {
        Self::new(PdeParams::fig1().k3, tau, FIG1_Q)
    }

    /// Time-scale factor `1/(1 - tau k3)` of the first-order model.
    pub fn prefactor(&self) -> f64 {
        1.0 / (1.0 - self.tau * self.k3)
    }

    pub fn tau_c(&self) -> f64 {
        1.0 / self.k3
    }

    /// The first-order model is only meaningful below the bifurcation.
    pub fn check_first_order(&self) -> Result<()> {
        if self.tau * self.k3 >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "first-order model needs tau < 1/k3 (tau = {}, 1/k3 = {})",
                self.tau,
                self.tau_c()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_tracks_bifurcation_side() {
        let k3 = 0.3;
        let above = ReducedParams::new(k3, 1.0 / k3 + 0.01, 2000.0);
        assert!((above.m1 - 9e-4).abs() < 1e-15);
        let below = ReducedParams::new(k3, 0.1, 2000.0);
        assert!(below.m1 < 0.0);
        assert!((below.prefactor() - 1.0 / 0.97).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = PdeParams::fig1();
        p.d_u = 0.0;
        assert!(p.validate().is_err());
        let mut p = PdeParams::fig1();
        p.k3 = 0.0;
        assert!(p.validate().is_err());
        assert!(PdeParams::fig1().validate().is_ok());
    }
}
