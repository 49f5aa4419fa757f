use serde::{Deserialize, Serialize};

use super::matrix_hs_norm;
use crate::error::{Error, Result};
use crate::norms::hs_norm;
use crate::solver::{FrozenLinearSystem, SystemModel, Trajectory};

/// Which energy lemma the margin is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lemma {
    /// `A0 = Id`: `a_s = C sum_a ||A^a||_{H^s} + 1`.
    Identity,
    /// `A0 != Id`: `a_m = C ||A0||_{H^m} sum_a ||A^a||_{H^m} + ||d_t A0||_inf`.
    WeightedA0,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginPoint {
    pub t: f64,
    /// `||U(t)||_{H^{s-1}}^2`
    pub lhs: f64,
    /// Integral of the part of `a` multiplied by `C`.
    pub growth: f64,
    /// Integral of the `C`-independent part of `a`.
    pub offset: f64,
    /// `||u0||^2 + int ||F||^2`.
    pub data: f64,
}

impl MarginPoint {
    /// Right-hand side of the lemma for the constant `c`.
    pub fn rhs(&self, c: f64) -> f64 {
        self.data * (c * self.growth + self.offset).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyMargin {
    pub c_min: f64,
    pub lemma: Lemma,
    pub s: f64,
    pub profile: Vec<MarginPoint>,
}

impl EnergyMargin {
    /// Whether the inequality holds at every recorded time with constant `c`.
    pub fn holds_with(&self, c: f64) -> bool {
        self.profile.iter().all(|p| p.lhs <= p.rhs(c) * (1.0 + 1e-12))
    }
}

fn cumulative_trapezoid(t: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; t.len()];
    for k in 1..t.len() {
        out[k] = out[k - 1] + 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
    }
    out
}

/// Smallest constant `C >= 0` for which the low-regularity energy estimate
/// `||U(t)||_{H^{s-1}}^2 <= exp(int_0^t a) (||u0||_{H^{s-1}}^2 + int_0^t ||F||_{H^{s-1}}^2)`
/// holds at every recorded time of `traj`, a solve of the frozen system.
///
/// The lemma with `||d_t A0||_inf` is used whenever the base model has a
/// non-identity `A0`; the time derivative is a centred difference of the
/// frozen coefficients. Integrals use the trapezoidal rule on the recorded times.
pub fn energy_inequality_margin(traj: &Trajectory, system: &FrozenLinearSystem, s: f64) -> Result<EnergyMargin> {
    if traj.states.len() != traj.times.len() {
        return Err(Error::InvalidParameter("the trajectory must keep every recorded state".into()));
    }
    let times = &traj.times;
    let grid = *traj.states[0].grid();
    let nc = system.components();
    let dt = if times.len() > 1 { times[1] - times[0] } else { 1e-3 };
    let lemma = if system.a0(&traj.states[0], 0.0).is_some() { Lemma::WeightedA0 } else { Lemma::Identity };

    let mut lhs = Vec::with_capacity(times.len());
    let mut growth = Vec::with_capacity(times.len());
    let mut base = Vec::with_capacity(times.len());
    let mut forcing = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let u = &traj.states[k];
        lhs.push(hs_norm(u, s - 1.0).powi(2));
        let flux: f64 = (0..system.dim()).map(|a| matrix_hs_norm(&system.flux(a, u, t), grid, nc, s)).sum();
        match lemma {
            Lemma::Identity => {
                growth.push(flux);
                base.push(1.0);
            }
            Lemma::WeightedA0 => {
                let a0 = system.a0(u, t).expect("A0 present");
                growth.push(matrix_hs_norm(&a0, grid, nc, s) * flux);
                base.push(system.a0_rate(t, 0.25 * dt));
            }
        }
        forcing.push(match system.source(u, t)? {
            Some(f) => hs_norm(&f, s - 1.0).powi(2),
            None => 0.0,
        });
    }
    let i1 = cumulative_trapezoid(times, &growth);
    let i0 = cumulative_trapezoid(times, &base);
    let q: Vec<f64> = cumulative_trapezoid(times, &forcing).iter().map(|f| lhs[0] + f).collect();

    let mut c_min = 0.0f64;
    for k in 0..times.len() {
        let room = q[k] * i0[k].exp();
        if lhs[k] <= room * (1.0 + 1e-12) {
            continue;
        }
        if i1[k] <= 0.0 || q[k] <= 0.0 {
            return Err(Error::Unsatisfiable(times[k]));
        }
        c_min = c_min.max(((lhs[k] / q[k]).ln() - i0[k]) / i1[k]);
    }
    let profile = (0..times.len())
        .map(|k| MarginPoint { t: times[k], lhs: lhs[k], growth: i1[k], offset: i0[k], data: q[k] })
        .collect();
    Ok(EnergyMargin { c_min, lemma, s, profile })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GronwallReport {
    /// `y(t) <= exp(int a) (y(0) + int b)` at every sample (up to `1e-8` relative).
    pub holds: bool,
    /// `min_t (bound - y)`.
    pub margin: f64,
    /// Whether the samples satisfy the differential inequality by finite differences.
    pub premise: bool,
}

/// Checks the integral form of Gronwall's inequality on sampled `y`, `a`, `b`.
pub fn gronwall_check(t: &[f64], y: &[f64], a: &[f64], b: &[f64]) -> Result<GronwallReport> {
    let n = t.len();
    if y.len() != n || a.len() != n || b.len() != n || n == 0 {
        return Err(Error::InvalidParameter("samples must share one time grid".into()));
    }
    if a.iter().chain(b).any(|v| *v < 0.0) {
        return Err(Error::InvalidParameter("a and b must be nonnegative".into()));
    }
    let ia = cumulative_trapezoid(t, a);
    let ib = cumulative_trapezoid(t, b);
    let mut holds = true;
    let mut margin = f64::INFINITY;
    for k in 0..n {
        let bound = ia[k].exp() * (y[0] + ib[k]);
        margin = margin.min(bound - y[k]);
        holds &= y[k] <= bound + 1e-8 * bound.abs().max(1.0);
    }
    let premise = (1..n).all(|k| {
        let h = t[k] - t[k - 1];
        let slope = (y[k] - y[k - 1]) / h;
        let rhs = 0.5 * (a[k] * y[k] + a[k - 1] * y[k - 1] + b[k] + b[k - 1]);
        slope <= rhs + 1e-6 * rhs.abs().max(1.0)
    });
    Ok(GronwallReport { holds, margin, premise })
}
