//! Newtonian cosmological background and the comoving perturbation system.
//!
//! The background is a homogeneous dust ball with scale factor `R(t)`,
//! `R'' = -(4 pi / 3) C R^-2` and density `rho_hat = C R^-3`. Perturbations
//! `(sigma, V)` of density and velocity are evolved on the comoving torus.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::elliptic;
use crate::error::{Error, Result};
use crate::field::{MatrixField, RealField, SmallMatrix};
use crate::solver::SystemModel;

/// Relative radius below which the background counts as collapsed.
pub const COLLAPSE_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackgroundState {
    pub t: f64,
    pub r: f64,
    pub rdot: f64,
    pub c_mass: f64,
}

impl BackgroundState {
    pub fn rho_hat(&self) -> f64 {
        self.c_mass / self.r.powi(3)
    }

    pub fn acceleration(&self) -> f64 {
        -(4.0 * PI / 3.0) * self.c_mass / (self.r * self.r)
    }

    /// First integral `Rdot^2 / 2 - (4 pi / 3) C / R`.
    pub fn energy(&self) -> f64 {
        0.5 * self.rdot * self.rdot - (4.0 * PI / 3.0) * self.c_mass / self.r
    }

    /// Hubble rate `Rdot / R`.
    pub fn hubble(&self) -> f64 {
        self.rdot / self.r
    }

    fn rk4(&self, h: f64) -> Self {
        let c = self.c_mass;
        let acc = |r: f64| -(4.0 * PI / 3.0) * c / (r * r);
        let (r, v) = (self.r, self.rdot);
        let (k1r, k1v) = (v, acc(r));
        let (k2r, k2v) = (v + 0.5 * h * k1v, acc(r + 0.5 * h * k1r));
        let (k3r, k3v) = (v + 0.5 * h * k2v, acc(r + 0.5 * h * k2r));
        let (k4r, k4v) = (v + h * k3v, acc(r + h * k3r));
        Self {
            t: self.t + h,
            r: r + h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
            rdot: v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
            c_mass: c,
        }
    }
}

/// RK4 integration of the background with `C = 1`, sampled at every step.
pub fn integrate_background(r0: f64, rdot0: f64, t_final: f64, dt: f64) -> Result<Vec<BackgroundState>> {
    if !(r0 > 0.0) || !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::InvalidParameter(format!("need R0 > 0, dt > 0, T >= 0 (R0 = {r0}, dt = {dt}, T = {t_final})")));
    }
    let steps = (t_final / dt - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { dt } else { t_final / steps as f64 };
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = BackgroundState { t: 0.0, r: r0, rdot: rdot0, c_mass: 1.0 };
    out.push(s);
    for i in 0..steps {
        s = s.rk4(h);
        s.t = (i + 1) as f64 * h;
        if !(s.r > COLLAPSE_RADIUS * r0) {
            return Err(Error::Collapse { t: s.t, r: s.r });
        }
        out.push(s);
    }
    Ok(out)
}

/// Background evaluable at arbitrary times: a cached RK4 trajectory whose
/// nodes are advanced by one partial RK4 step to the requested time.
#[derive(Debug, Clone)]
pub struct BackgroundCurve {
    nodes: Vec<BackgroundState>,
    dt: f64,
}

impl BackgroundCurve {
    pub fn new(r0: f64, rdot0: f64, t_final: f64, dt: f64) -> Result<Self> {
        let nodes = integrate_background(r0, rdot0, t_final, dt)?;
        let dt = if nodes.len() > 1 { nodes[1].t } else { dt };
        Ok(Self { nodes, dt })
    }

    pub fn nodes(&self) -> &[BackgroundState] {
        &self.nodes
    }

    pub fn at(&self, t: f64) -> BackgroundState {
        let k = ((t / self.dt).floor().max(0.0) as usize).min(self.nodes.len() - 1);
        let mut s = self.nodes[k];
        while t - s.t > self.dt {
            s = s.rk4(self.dt);
        }
        let h = t - s.t;
        if h > 0.0 {
            s = s.rk4(h);
            s.t = t;
        }
        s
    }
}

/// Pressure law `f(rho) = k rho^gamma`; `g' = f'(rho_hat + sigma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EosModel {
    pub k: f64,
    pub gamma: f64,
}

impl Default for EosModel {
    fn default() -> Self {
        Self { k: 1.0, gamma: 2.0 }
    }
}

impl EosModel {
    pub fn f(&self, rho: f64) -> f64 {
        self.k * rho.powf(self.gamma)
    }

    pub fn f_prime(&self, rho: f64) -> f64 {
        self.k * self.gamma * rho.powf(self.gamma - 1.0)
    }

    /// `g = f(rho_hat + sigma) - f(rho_hat)`.
    pub fn g(&self, rho_hat: f64, sigma: f64) -> f64 {
        self.f(rho_hat + sigma) - self.f(rho_hat)
    }

    pub fn g_prime(&self, rho_hat: f64, sigma: f64) -> f64 {
        self.f_prime(rho_hat + sigma)
    }
}

/// Comoving perturbation system with unknowns `(sigma, V^1, .., V^d)` on the torus.
#[derive(Debug, Clone)]
pub struct CosmoSystem {
    pub eos: EosModel,
    pub background: Arc<BackgroundCurve>,
    pub dim: usize,
}

pub fn cosmo_system(eos: EosModel, background: Arc<BackgroundCurve>, dim: usize) -> Result<CosmoSystem> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    if !(eos.k > 0.0 && eos.gamma > 1.0) {
        return Err(Error::InvalidParameter("pressure law needs k > 0 and gamma > 1".into()));
    }
    Ok(CosmoSystem { eos, background, dim })
}

impl CosmoSystem {
    /// `(g'/(rho_hat+sigma)^2, g'/(rho_hat+sigma))` at one node.
    fn weights(&self, rho_hat: f64, sigma: f64) -> (f64, f64) {
        let rho = rho_hat + sigma;
        let gp = self.eos.g_prime(rho_hat, sigma);
        (gp / (rho * rho), gp / rho)
    }
}

impl SystemModel for CosmoSystem {
    fn name(&self) -> &str {
        "cosmo"
    }

    fn components(&self) -> usize {
        1 + self.dim
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn a0(&self, state: &RealField, t: f64) -> Option<MatrixField> {
        let rho_hat = self.background.at(t).rho_hat();
        let n = self.components();
        let sigma = state.component(0);
        Some(MatrixField::from_fn(sigma.len(), |p| {
            let mut m = SmallMatrix::identity(n);
            m.a[0][0] = self.weights(rho_hat, sigma[p]).0;
            m
        }))
    }

    fn flux(&self, axis: usize, state: &RealField, t: f64) -> MatrixField {
        let bg = self.background.at(t);
        let (rho_hat, inv_r) = (bg.rho_hat(), 1.0 / bg.r);
        let n = self.components();
        let sigma = state.component(0);
        let vk = state.component(1 + axis);
        MatrixField::from_fn(sigma.len(), |p| {
            let (w2, w1) = self.weights(rho_hat, sigma[p]);
            let mut m = SmallMatrix::zeros(n);
            m.a[0][0] = inv_r * w2 * vk[p];
            for b in 1..n {
                m.a[b][b] = inv_r * vk[p];
            }
            m.a[0][1 + axis] = inv_r * w1;
            m.a[1 + axis][0] = inv_r * w1;
            m
        })
    }

    fn damping(&self, state: &RealField, t: f64) -> Option<MatrixField> {
        let bg = self.background.at(t);
        let (rho_hat, hubble) = (bg.rho_hat(), bg.hubble());
        let n = self.components();
        let sigma = state.component(0);
        Some(MatrixField::from_fn(sigma.len(), |p| {
            let mut m = SmallMatrix::identity(n);
            for b in 1..n {
                m.a[b][b] = hubble;
            }
            m.a[0][0] = 3.0 * hubble * self.weights(rho_hat, sigma[p]).1;
            m
        }))
    }

    /// `G = (0, -grad Phi)` with `Delta Phi = 4 pi R^2 sigma`; the (small)
    /// mean of `sigma` is projected out before the solve.
    fn source(&self, state: &RealField, t: f64) -> Result<Option<RealField>> {
        let r = self.background.at(t).r;
        let rhs = state.extract(0).scaled(4.0 * PI * r * r);
        let (rhs, _) = elliptic::project_zero_mean(&rhs);
        let grad = elliptic::grad_inv_laplacian(&rhs)?;
        let mut g = RealField::zeros(*state.grid(), self.components());
        for (a, ga) in grad.iter().enumerate() {
            for (dst, src) in g.component_mut(1 + a).iter_mut().zip(ga.values()) {
                *dst = -src;
            }
        }
        Ok(Some(g))
    }

    fn admissible(&self, state: &RealField, t: f64) -> std::result::Result<(), String> {
        let rho_hat = self.background.at(t).rho_hat();
        for &s in state.component(0) {
            if !(rho_hat + s > 0.0) {
                return Err(format!("total density rho_hat + sigma = {} is not positive", rho_hat + s));
            }
            if !(self.eos.g_prime(rho_hat, s) > 0.0) {
                return Err("g' is not positive".into());
            }
        }
        Ok(())
    }

    fn diagnostics(&self, state: &RealField, t: f64) -> Vec<(String, f64)> {
        let bg = self.background.at(t);
        vec![
            ("sigma_integral".to_string(), state.integrals()[0]),
            ("R".to_string(), bg.r),
            ("rho_hat".to_string(), bg.rho_hat()),
        ]
    }
}
