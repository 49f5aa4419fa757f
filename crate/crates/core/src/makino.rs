//! Makino variables and the Euler-Poisson-Makino system.
//!
//! For the barotropic law `p = K rho^gamma` the substitution
//! `w = 2 sqrt(K gamma) / (gamma - 1) * rho^((gamma - 1) / 2)` turns the
//! Euler-Poisson equations into a symmetric hyperbolic system for
//! `(w, v^1, .., v^d)` that stays regular where the density vanishes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::elliptic;
use crate::error::{Error, Result};
use crate::field::{MatrixField, RealField, SmallMatrix};
use crate::solver::SystemModel;

/// Largest negative excursion of `w` tolerated before a run is aborted.
pub const VACUUM_TOLERANCE: f64 = 1e-8;

/// Equation-of-state constants `K` and `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpmParams {
    pub k: f64,
    pub gamma: f64,
}

impl EpmParams {
    pub fn new(k: f64, gamma: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("K must be positive, got {k}")));
        }
        if !(gamma > 1.0 && gamma <= 3.0) {
            return Err(Error::InvalidParameter(format!("gamma must lie in (1, 3], got {gamma}")));
        }
        Ok(Self { k, gamma })
    }

    /// `beta = 2 / (gamma - 1)`.
    pub fn beta(&self) -> f64 {
        2.0 / (self.gamma - 1.0)
    }

    /// `w / rho^((gamma-1)/2)`.
    pub fn makino_factor(&self) -> f64 {
        2.0 * (self.k * self.gamma).sqrt() / (self.gamma - 1.0)
    }

    /// `c = 4 pi ((gamma - 1) / (2 sqrt(K gamma)))^beta`, so that `c w^beta = 4 pi rho`.
    pub fn c_k_gamma(&self) -> f64 {
        4.0 * PI * (1.0 / self.makino_factor()).powf(self.beta())
    }
}

pub fn makino_from_density(rho: &RealField, params: &EpmParams) -> Result<RealField> {
    let min = rho.min_value();
    if min < 0.0 {
        return Err(Error::Negative { field: "density", value: min });
    }
    let (a, e) = (params.makino_factor(), 0.5 * (params.gamma - 1.0));
    Ok(rho.map(|r| a * r.powf(e)))
}

pub fn density_from_makino(w: &RealField, params: &EpmParams) -> Result<RealField> {
    let min = w.min_value();
    if min < 0.0 {
        return Err(Error::Negative { field: "Makino variable", value: min });
    }
    let (a, b) = (params.makino_factor(), params.beta());
    Ok(w.map(|v| (v / a).powf(b)))
}

/// Mean-value form of the power difference:
/// returns `beta * int_0^1 (tau w + (1 - tau) w_hat)^(beta - 1) dtau * (w - w_hat)`
/// by double-exponential quadrature in `tau`.
pub fn power_difference_quadrature(w: f64, w_hat: f64, beta: f64) -> f64 {
    let out = quadrature::double_exponential::integrate(
        |tau| (tau * w + (1.0 - tau) * w_hat).max(0.0).powf(beta - 1.0),
        0.0,
        1.0,
        1e-14,
    );
    beta * out.integral * (w - w_hat)
}

/// The averaged-powers form `beta * int_0^1 (tau w^(beta-1) + (1 - tau) w_hat^(beta-1)) dtau * (w - w_hat)`,
/// which reduces to `beta/2 (w^(beta-1) + w_hat^(beta-1)) (w - w_hat)`.
/// It agrees with `w^beta - w_hat^beta` only for `beta` in {1, 2}.
pub fn power_difference_averaged(w: f64, w_hat: f64, beta: f64) -> f64 {
    0.5 * beta * (w.powf(beta - 1.0) + w_hat.powf(beta - 1.0)) * (w - w_hat)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpmDomain {
    /// Periodic box; the Poisson source is projected to zero mean.
    Torus,
    /// Centered box with a compactly supported density and the isolated
    /// Green's function.
    FreeSpace,
}

/// Euler-Poisson-Makino system with unknowns `(w, v^1, .., v^d)`.
#[derive(Debug, Clone)]
pub struct EpmSystem {
    pub params: EpmParams,
    pub domain: EpmDomain,
    pub dim: usize,
}

pub fn epm_system(params: EpmParams, domain: EpmDomain, dim: usize) -> Result<EpmSystem> {
    let params = EpmParams::new(params.k, params.gamma)?;
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    Ok(EpmSystem { params, domain, dim })
}

impl EpmSystem {
    /// `c w_+^beta`, the right-hand side of `Delta phi = c w^beta`.
    pub fn poisson_source(&self, state: &RealField) -> RealField {
        let (c, b) = (self.params.c_k_gamma(), self.params.beta());
        state.extract(0).map(|w| c * w.max(0.0).powf(b))
    }

    /// `grad phi` and the mean removed from the source (zero in free space).
    pub fn potential_gradient(&self, state: &RealField) -> Result<(Vec<RealField>, f64)> {
        let f = self.poisson_source(state);
        match self.domain {
            EpmDomain::Torus => {
                let (f, means) = elliptic::project_zero_mean(&f);
                Ok((elliptic::grad_inv_laplacian(&f)?, means[0]))
            }
            EpmDomain::FreeSpace => Ok((elliptic::grad_inv_laplacian(&f)?, 0.0)),
        }
    }
}

impl SystemModel for EpmSystem {
    fn name(&self) -> &str {
        match self.domain {
            EpmDomain::Torus => "epm_torus",
            EpmDomain::FreeSpace => "epm_compact",
        }
    }

    fn components(&self) -> usize {
        1 + self.dim
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn flux(&self, axis: usize, state: &RealField, _t: f64) -> MatrixField {
        let n = self.components();
        let half = 0.5 * (self.params.gamma - 1.0);
        let w = state.component(0);
        let va = state.component(1 + axis);
        MatrixField::from_fn(w.len(), |p| {
            let mut m = SmallMatrix::zeros(n);
            for b in 0..n {
                m.a[b][b] = va[p];
            }
            m.a[0][1 + axis] = half * w[p];
            m.a[1 + axis][0] = half * w[p];
            m
        })
    }

    fn flux_vanishes_at_zero(&self) -> bool {
        true
    }

    fn source(&self, state: &RealField, _t: f64) -> Result<Option<RealField>> {
        let (grad, _) = self.potential_gradient(state)?;
        let mut g = RealField::zeros(*state.grid(), self.components());
        for (a, ga) in grad.iter().enumerate() {
            for (dst, src) in g.component_mut(1 + a).iter_mut().zip(ga.values()) {
                *dst = -src;
            }
        }
        Ok(Some(g))
    }

    fn admissible(&self, state: &RealField, _t: f64) -> std::result::Result<(), String> {
        let min = state.component(0).iter().copied().fold(f64::INFINITY, f64::min);
        if min < -VACUUM_TOLERANCE {
            return Err(format!("Makino variable went negative ({min:e})"));
        }
        Ok(())
    }

    fn diagnostics(&self, state: &RealField, _t: f64) -> Vec<(String, f64)> {
        let (a, b) = (self.params.makino_factor(), self.params.beta());
        let mass = state.component(0).iter().map(|w| (w.max(0.0) / a).powf(b)).sum::<f64>()
            * state.grid().cell_volume();
        let mut out = vec![("mass".to_string(), mass)];
        if self.domain == EpmDomain::Torus {
            out.push(("source_mean".to_string(), self.poisson_source(state).means()[0]));
        }
        out
    }
}
