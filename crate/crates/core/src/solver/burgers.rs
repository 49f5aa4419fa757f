use num_complex::Complex64;

use super::SystemModel;
use crate::error::{Error, Result};
use crate::field::{MatrixField, RealField, SmallMatrix};
use crate::grid::Grid;
use crate::spectral;

/// Inviscid Burgers `u_t + u u_x = 0` on a one-dimensional grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct Burgers;

impl SystemModel for Burgers {
    fn name(&self) -> &str {
        "burgers"
    }

    fn components(&self) -> usize {
        1
    }

    fn dim(&self) -> usize {
        1
    }

    fn flux(&self, _axis: usize, state: &RealField, _t: f64) -> MatrixField {
        let u = state.component(0);
        MatrixField::from_fn(u.len(), |p| SmallMatrix::diagonal(&[u[p]]))
    }

    fn flux_vanishes_at_zero(&self) -> bool {
        true
    }
}

/// Constant-coefficient advection `u_t + sum_a c_a d_a u = 0`, componentwise.
#[derive(Debug, Clone)]
pub struct Advection {
    pub speeds: Vec<f64>,
    pub components: usize,
}

impl Advection {
    pub fn new(speeds: &[f64], components: usize) -> Self {
        Self { speeds: speeds.to_vec(), components }
    }
}

impl SystemModel for Advection {
    fn name(&self) -> &str {
        "advection"
    }

    fn components(&self) -> usize {
        self.components
    }

    fn dim(&self) -> usize {
        self.speeds.len()
    }

    fn flux(&self, axis: usize, _state: &RealField, _t: f64) -> MatrixField {
        MatrixField::Uniform(SmallMatrix::diagonal(&vec![self.speeds[axis]; self.components]))
    }
}

/// Fourier interpolant of a 1-D scalar field; evaluates value and slope.
struct Interpolant {
    x0: f64,
    modes: Vec<(f64, Complex64)>,
}

impl Interpolant {
    fn new(u0: &RealField) -> Self {
        let grid = *u0.grid();
        let spec = spectral::transform(u0);
        let modes = (0..grid.points())
            .map(|slot| {
                let c = spec.coefficients()[slot];
                // The Nyquist mode is kept as a real cosine.
                let c = if grid.is_nyquist(slot) { Complex64::new(c.re, 0.0) } else { c };
                (grid.wavenumber(0, slot), c)
            })
            .collect();
        Self { x0: grid.origin(0), modes }
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let (mut v, mut dv) = (0.0, 0.0);
        for &(k, c) in &self.modes {
            let e = Complex64::from_polar(1.0, k * (x - self.x0));
            let z = c * e;
            v += z.re;
            dv -= k * z.im;
        }
        (v, dv)
    }
}

fn check_scalar_1d(u0: &RealField) -> Result<Grid> {
    let grid = *u0.grid();
    if grid.dim() != 1 || u0.components() != 1 {
        return Err(Error::InvalidParameter("Burgers data must be a scalar field in one dimension".into()));
    }
    Ok(grid)
}

/// Breaking time `1 / max(-u0')` of the Fourier interpolant (infinite when
/// `u0` is nowhere decreasing). The slope is sampled on a 4x refined grid.
pub fn shock_time(u0: &RealField) -> Result<f64> {
    let grid = check_scalar_1d(u0)?;
    let interp = Interpolant::new(u0);
    let m = 4 * grid.points();
    let h = grid.length(0) / m as f64;
    let worst = (0..m).map(|i| -interp.eval(grid.origin(0) + i as f64 * h).1).fold(0.0, f64::max);
    Ok(if worst > 0.0 { 1.0 / worst } else { f64::INFINITY })
}

/// Exact pre-shock Burgers solution by characteristics: solves
/// `x = xi + t u0(xi)` at every node with safeguarded Newton iteration and
/// returns `u0(xi)`.
pub fn burgers_characteristics_oracle(u0: &RealField, t: f64) -> Result<RealField> {
    let grid = check_scalar_1d(u0)?;
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let ts = shock_time(u0)?;
    if t >= ts || t < 0.0 {
        return Err(Error::BeyondShock { t, t_shock: ts });
    }
    let interp = Interpolant::new(u0);
    let reach = t * (1.05 * u0.max_abs() + 1e-12);
    let mut out = RealField::zeros(grid, 1);
    for (i, x) in grid.axis_coords(0).into_iter().enumerate() {
        // F(xi) = xi + t u0(xi) - x is increasing before the shock.
        let f = |xi: f64| {
            let (v, dv) = interp.eval(xi);
            (xi + t * v - x, 1.0 + t * dv, v)
        };
        let (mut lo, mut hi) = (x - reach, x + reach);
        let mut xi = x - t * interp.eval(x).0;
        let mut value = None;
        for _ in 0..100 {
            let (fx, dfx, v) = f(xi);
            if fx.abs() <= 1e-14 * (1.0 + x.abs()) {
                value = Some(v);
                break;
            }
            if fx > 0.0 {
                hi = hi.min(xi);
            } else {
                lo = lo.max(xi);
            }
            let mut next = xi - fx / dfx;
            if !(next > lo && next < hi) || dfx <= 0.0 {
                next = 0.5 * (lo + hi);
            }
            if (next - xi).abs() <= 1e-15 * (1.0 + xi.abs()) {
                value = Some(f(next).2);
                break;
            }
            xi = next;
        }
        out.component_mut(0)[i] = value.ok_or(Error::NewtonFailure(x))?;
    }
    Ok(out)
}
