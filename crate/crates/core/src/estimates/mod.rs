//! Empirical constants for the classical inequalities.
//!
//! Each `*_ratio` function returns left side over right side of one
//! inequality for concrete fields. The constants themselves are unknown, so
//! the suite reports the largest ratio over seeded samples together with its
//! change under grid doubling.

mod energy;
mod suite;

pub use energy::{energy_inequality_margin, gronwall_check, EnergyMargin, GronwallReport, Lemma, MarginPoint};
pub use suite::{run_estimate_suite, EstimateEntry, SuiteConfig, SuiteReport};

use crate::error::{Error, Result};
use crate::field::{MatrixField, RealField};
use crate::norms::{hs_norm, weighted_norm, DyadicPartition, NormSpec};
use crate::solver::SystemModel;
use crate::spectral;

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ConstraintViolated(what.to_string()))
    }
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if num == 0.0 {
        return Ok(0.0);
    }
    if den == 0.0 {
        return Err(Error::Unsatisfiable(num));
    }
    Ok(num / den)
}

fn gradient_sup(f: &RealField) -> f64 {
    let grads = spectral::gradient(f);
    let n = f.grid().len();
    let mut sup = 0.0f64;
    for c in 0..f.components() {
        for p in 0..n {
            let g2: f64 = grads.iter().map(|g| g.component(c)[p].powi(2)).sum();
            sup = sup.max(g2.sqrt());
        }
    }
    sup
}

/// Commutator ratio
/// `||P(fg) - f P(g)||_{L2} / (||Df||_inf ||g||_{H^{s-1}} + ||f||_{H^s} ||g||_inf)`
/// for the order-`s` operator `P = Lambda^{s-1} d_axis`.
pub fn kato_ponce_ratio(s: f64, f: &RealField, g: &RealField, axis: usize) -> Result<f64> {
    f.check_compatible(g)?;
    let p = |u: &RealField| -> Result<RealField> { Ok(spectral::lambda_s(&spectral::partial_derivative(u, axis)?, s - 1.0)) };
    let fg = spectral::padded_product(f, g)?;
    let f_pg = spectral::padded_product(f, &p(g)?)?;
    let lhs = p(&fg)?.sub(&f_pg)?.l2_norm();
    let bracket = gradient_sup(f) * hs_norm(g, s - 1.0) + hs_norm(f, s) * g.max_abs();
    ratio(lhs, bracket)
}

/// Optional weight indices `(delta, delta1, delta2)` of the weighted product estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedIndices {
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub partition: DyadicPartition,
}

/// `||uv|| / (||u|| ||v||)` in `H^s x H^{s1} x H^{s2}` or their weighted versions.
pub fn multiplication_ratio(
    u: &RealField,
    v: &RealField,
    s: f64,
    s1: f64,
    s2: f64,
    weighted: Option<WeightedIndices>,
) -> Result<f64> {
    let d = u.grid().dim() as f64;
    require(s <= s1.min(s2), "s <= min(s1, s2)")?;
    require(s + 0.5 * d < s1 + s2, "s + d/2 < s1 + s2")?;
    require(s1 + s2 >= 0.0, "0 <= s1 + s2")?;
    let uv = u.mul(v)?;
    match weighted {
        None => ratio(hs_norm(&uv, s), hs_norm(u, s1) * hs_norm(v, s2)),
        Some(w) => {
            require(w.delta - 0.5 * d <= w.delta1 + w.delta2, "delta - d/2 <= delta1 + delta2")?;
            let n = |f: &RealField, s: f64, delta: f64| weighted_norm(f, &NormSpec::new(s, delta), &w.partition);
            ratio(n(&uv, s, w.delta)?, n(u, s1, w.delta1)? * n(v, s2, w.delta2)?)
        }
    }
}

/// Improved multiplication: `||u_1 ... u_m||_{H_{s,delta}} / prod ||u_i||_{H_{s,delta_i}}`
/// under `s > d/2` and `delta <= sum delta_i + (m-1) d/2`.
pub fn improved_multiplication_ratio(
    factors: &[RealField],
    s: f64,
    deltas: &[f64],
    delta: f64,
    partition: &DyadicPartition,
) -> Result<f64> {
    require(!factors.is_empty() && factors.len() == deltas.len(), "one weight index per factor")?;
    let d = factors[0].grid().dim() as f64;
    let m = factors.len() as f64;
    require(s > 0.5 * d, "s > d/2")?;
    require(delta <= deltas.iter().sum::<f64>() + (m - 1.0) * 0.5 * d, "delta <= sum delta_i + (m-1) d/2")?;
    let mut prod = factors[0].clone();
    for f in &factors[1..] {
        prod = prod.mul(f)?;
    }
    let num = weighted_norm(&prod, &NormSpec::new(s, delta), partition)?;
    let mut den = 1.0;
    for (f, &di) in factors.iter().zip(deltas) {
        den *= weighted_norm(f, &NormSpec::new(s, di), partition)?;
    }
    ratio(num, den)
}

fn check_nonnegative(u: &RealField) -> Result<()> {
    let min = u.min_value();
    if min < 0.0 {
        return Err(Error::Negative { field: "power base", value: min });
    }
    Ok(())
}

/// `||u^beta|| / ||u||` in `H^s` (`0 < s < beta + 1/2`) or in `H_{s,delta}`
/// (`d/2 < s < beta + 1/2`) for `u >= 0`.
pub fn power_estimate_ratio(
    u: &RealField,
    beta: f64,
    s: f64,
    weighted: Option<(f64, DyadicPartition)>,
) -> Result<f64> {
    check_nonnegative(u)?;
    require(beta >= 1.0, "beta >= 1")?;
    require(s < beta + 0.5, "s < beta + 1/2")?;
    let ub = u.map(|v| v.powf(beta));
    match weighted {
        None => {
            require(s > 0.0, "0 < s")?;
            ratio(hs_norm(&ub, s), hs_norm(u, s))
        }
        Some((delta, partition)) => {
            require(s > 0.5 * u.grid().dim() as f64, "d/2 < s")?;
            let spec = NormSpec::new(s, delta);
            ratio(weighted_norm(&ub, &spec, &partition)?, weighted_norm(u, &spec, &partition)?)
        }
    }
}

/// Nonlinear power estimate for integer `beta >= 3`:
/// `||w^{beta-1}||_{H_{s-1,delta+1}} / ||w||_{H_{s,delta}}^{beta-1}`,
/// under `s > d/2` and `delta >= 1/(beta-2) - d/2`.
pub fn nonlinear_power_ratio(w: &RealField, beta: u32, s: f64, delta: f64, partition: &DyadicPartition) -> Result<f64> {
    check_nonnegative(w)?;
    let d = w.grid().dim() as f64;
    require(beta >= 3, "beta >= 3")?;
    require(s > 0.5 * d, "s > d/2")?;
    require(delta >= 1.0 / (beta as f64 - 2.0) - 0.5 * d, "delta >= 1/(beta-2) - d/2")?;
    let wb = w.map(|v| v.powi(beta as i32 - 1));
    let num = weighted_norm(&wb, &NormSpec::new(s - 1.0, delta + 1.0), partition)?;
    let den = weighted_norm(w, &NormSpec::new(s, delta), partition)?.powi(beta as i32 - 1);
    ratio(num, den)
}

/// `||F(u) - F(v)||_{H^s} / ((1 + ||u||_{H^s} + ||v||_{H^s}) ||u - v||_{H^s})`.
pub fn difference_estimate_ratio(map: impl Fn(f64) -> f64, u: &RealField, v: &RealField, s: f64) -> Result<f64> {
    let diff = u.sub(v)?;
    let lhs = hs_norm(&u.map(&map).sub(&v.map(&map))?, s);
    ratio(lhs, (1.0 + hs_norm(u, s) + hs_norm(v, s)) * hs_norm(&diff, s))
}

/// `||M||_{H^s} = (sum_{ij} ||M_ij||_{H^s}^2)^{1/2}` for a matrix field on `grid`.
pub fn matrix_hs_norm(m: &MatrixField, grid: crate::grid::Grid, n: usize, s: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            total += hs_norm(&m.entry_field(grid, i, j), s).powi(2);
        }
    }
    total.sqrt()
}

/// Empirical Lipschitz constant of the source term:
/// `max ||D_x[G(u) - G(v)]||_{H^{s-1}} / ||u - v||_{H^{s-1}}` over the given pairs.
pub fn lipschitz_estimate(system: &dyn SystemModel, pairs: &[(RealField, RealField)], s: f64, t: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for (u, v) in pairs {
        let gu = system.source(u, t)?;
        let gv = system.source(v, t)?;
        let (Some(gu), Some(gv)) = (gu, gv) else { continue };
        let dg = gu.sub(&gv)?;
        let num = spectral::gradient(&dg).iter().map(|g| hs_norm(g, s - 1.0).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(ratio(num, hs_norm(&u.sub(v)?, s - 1.0))?);
    }
    Ok(worst)
}
