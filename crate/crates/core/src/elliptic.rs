//! Poisson solvers and order-zero multipliers for the gravitational source.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{RealField, SpectralField};
use crate::grid::Grid;
use crate::spectral;

/// Relative mean (against the L2 norm) tolerated by the torus solver.
pub const MEAN_TOLERANCE: f64 = 1e-10;

fn check_zero_mean(f: &RealField) -> Result<()> {
    let norm = f.l2_norm();
    for mean in f.means() {
        if mean.abs() > MEAN_TOLERANCE * norm {
            return Err(Error::NonzeroMean { mean, norm });
        }
    }
    Ok(())
}

/// Removes the mean of every component; returns the subtracted means.
pub fn project_zero_mean(f: &RealField) -> (RealField, Vec<f64>) {
    let means = f.means();
    let mut out = f.clone();
    for (c, m) in means.iter().enumerate() {
        for v in out.component_mut(c) {
            *v -= m;
        }
    }
    (out, means)
}

/// Solves `Delta phi = f` on the torus for zero-mean `f`, with `phi` of zero mean.
pub fn poisson_torus_zero_mean(f: &RealField) -> Result<RealField> {
    check_zero_mean(f)?;
    Ok(spectral::apply_multiplier(f, |k| {
        let k2: f64 = k.iter().map(|v| v * v).sum();
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-1.0 / k2, 0.0)
        }
    }))
}

/// `grad Delta^{-1} f` on the torus, one scalar field per axis.
fn grad_inv_laplacian_torus(f: &RealField) -> Result<Vec<RealField>> {
    check_zero_mean(f)?;
    let grid = *f.grid();
    let spec = spectral::transform(f);
    Ok((0..grid.dim())
        .map(|axis| {
            let mut s = spec.clone();
            let len = grid.len();
            for idx in 0..len {
                let ix = grid.unravel(idx);
                let k2 = grid.k_squared(idx);
                let factor = if k2 == 0.0 || grid.is_nyquist(ix[axis]) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -grid.wavenumber(axis, ix[axis]) / k2)
                };
                for c in 0..f.components() {
                    s.coefficients_mut()[c * len + idx] *= factor;
                }
            }
            spectral::inverse_transform(&s)
        })
        .collect())
}

/// `-d_i d_j Delta^{-1}` on the torus: the multiplier `-k_i k_j / |k|^2`, with
/// the zero mode mapped to zero. This is the spatial derivative of the
/// gravitational force `-grad Delta^{-1}`.
pub fn zero_order_operator(f: &RealField, i: usize, j: usize) -> Result<RealField> {
    let dim = f.grid().dim();
    for axis in [i, j] {
        if axis >= dim {
            return Err(Error::AxisOutOfRange { axis, dim });
        }
    }
    Ok(spectral::apply_multiplier(f, |k| {
        let k2: f64 = k.iter().map(|v| v * v).sum();
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-k[i] * k[j] / k2, 0.0)
        }
    }))
}

/// Average of `1/|x|` over the unit cube centred at the origin.
fn unit_cube_inverse_distance() -> f64 {
    let s3 = 3f64.sqrt();
    3.0 * ((s3 + 1.0) / (s3 - 1.0)).ln() - 0.5 * PI
}

/// Average of `ln |x|` over the unit square centred at the origin.
fn unit_square_log_distance() -> f64 {
    0.25 * PI - 1.5 - 0.5 * 2f64.ln()
}

/// Free-space convolution `out(x) = sum_y f(y) K(x - y) dV` on a zero-padded
/// doubled grid, with `kernel(r, origin)` giving the kernel at offset `r`.
fn free_space_convolve(f: &RealField, kernel: impl Fn(&[f64]) -> f64) -> Result<RealField> {
    check_padding(f)?;
    convolve_padded(f, kernel)
}

fn check_padding(f: &RealField) -> Result<()> {
    if f.grid().is_periodic() {
        return Err(Error::InvalidParameter("free-space solves need a centered grid".into()));
    }
    let band = f.boundary_band_ratio();
    if band > crate::norms::BOUNDARY_TOLERANCE {
        return Err(Error::InsufficientPadding { amplitude: band });
    }
    Ok(())
}

fn convolve_padded(f: &RealField, kernel: impl Fn(&[f64]) -> f64) -> Result<RealField> {
    let grid = *f.grid();
    let n = grid.points();
    let dim = grid.dim();
    let doubled_lengths: Vec<f64> = grid.lengths().iter().map(|l| 2.0 * l).collect();
    let big = Grid::new(dim, 2 * n, &doubled_lengths, true)?;
    let big_len = big.len();

    let mut kvals = vec![0.0; big_len];
    for (idx, kv) in kvals.iter_mut().enumerate() {
        let ix = big.unravel(idx);
        let mut r = [0.0; 3];
        for a in 0..dim {
            let m = big.mode(ix[a]);
            r[a] = m as f64 * grid.spacing(a);
        }
        *kv = kernel(&r[..dim]);
    }
    let kspec = spectral::transform(&RealField::from_values(big, 1, kvals)?);
    let dv = grid.cell_volume();
    let big_n = big_len as f64;

    let mut out = RealField::zeros(grid, f.components());
    for c in 0..f.components() {
        let mut padded = vec![0.0; big_len];
        for p in 0..grid.len() {
            let ix = grid.unravel(p);
            padded[big.ravel(ix)] = f.component(c)[p];
        }
        let mut fs = spectral::transform(&RealField::from_values(big, 1, padded)?);
        for (z, k) in fs.coefficients_mut().iter_mut().zip(kspec.coefficients()) {
            *z *= k * big_n * dv;
        }
        let conv = spectral::inverse_transform(&SpectralField::new(big, 1, fs.coefficients().to_vec()));
        let dst = out.component_mut(c);
        for (p, d) in dst.iter_mut().enumerate() {
            let ix = grid.unravel(p);
            *d = conv.values()[big.ravel(ix)];
        }
    }
    Ok(out)
}

/// Green's function `G` of the Laplacian (`Delta G = delta`), cell-averaged at
/// the origin. Supports `d = 1, 2, 3`; the origin correction assumes cubic cells.
fn laplace_green(grid: &Grid) -> impl Fn(&[f64]) -> f64 {
    let h = grid.spacing(0);
    let dim = grid.dim();
    move |r: &[f64]| {
        let rr = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        match dim {
            1 => {
                if rr == 0.0 {
                    0.5 * h / 4.0
                } else {
                    0.5 * rr
                }
            }
            2 => {
                let l = if rr == 0.0 { h.ln() + unit_square_log_distance() } else { rr.ln() };
                l / (2.0 * PI)
            }
            _ => {
                let inv = if rr == 0.0 { unit_cube_inverse_distance() / h } else { 1.0 / rr };
                -inv / (4.0 * PI)
            }
        }
    }
}

/// Solves `Delta phi = 4 pi rho` in free space for compactly supported `rho`,
/// i.e. `phi = -int rho(y) / |x - y| dy` in three dimensions.
pub fn poisson_free_space(rho: &RealField) -> Result<RealField> {
    let green = laplace_green(rho.grid());
    free_space_convolve(rho, |r| 4.0 * PI * green(r))
}

/// `grad Delta^{-1} f`: zero-mean torus solve on periodic grids; in free space
/// the Green's function is convolved with the spectral gradient of the
/// compactly supported source.
pub fn grad_inv_laplacian(f: &RealField) -> Result<Vec<RealField>> {
    let grid = *f.grid();
    if grid.is_periodic() {
        return grad_inv_laplacian_torus(f);
    }
    check_padding(f)?;
    let green = laplace_green(&grid);
    (0..grid.dim())
        .map(|axis| convolve_padded(&spectral::partial_derivative(f, axis)?, &green))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{self, LowPassSpec};

    fn torus3(n: usize) -> Grid {
        Grid::periodic(3, n, 2.0 * PI).unwrap()
    }

    #[test]
    fn zero_source_zero_potential() {
        let g = torus3(8);
        assert_eq!(poisson_torus_zero_mean(&RealField::zeros(g, 1)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn cosine_source() {
        let g = torus3(16);
        let f = RealField::scalar(g, |x| x[0].cos());
        let phi = poisson_torus_zero_mean(&f).unwrap();
        for (a, b) in phi.values().iter().zip(f.values()) {
            assert!((a + b).abs() < 1e-13);
        }
        let grad = grad_inv_laplacian(&f).unwrap();
        let expect = RealField::scalar(g, |x| x[0].sin());
        assert!(grad[0].sub(&expect).unwrap().max_abs() < 1e-13);
        assert!(grad[1].max_abs() < 1e-13 && grad[2].max_abs() < 1e-13);
    }

    #[test]
    fn nonzero_mean_rejected() {
        let g = torus3(8);
        let f = RealField::scalar(g, |x| 1.0 + x[0].cos());
        assert!(matches!(poisson_torus_zero_mean(&f), Err(Error::NonzeroMean { .. })));
    }

    #[test]
    fn divergence_of_gradient_recovers_source() {
        let g = torus3(16);
        let f = random::low_pass_field(&mut random::rng(11), g, 1, &LowPassSpec { kmax: 5, ..Default::default() });
        let grad = grad_inv_laplacian(&f).unwrap();
        let mut div = RealField::zeros(g, 1);
        for (a, ga) in grad.iter().enumerate() {
            div.axpy(1.0, &spectral::partial_derivative(ga, a).unwrap());
        }
        assert!(div.sub(&f).unwrap().max_abs() < 1e-10 * f.max_abs());
    }

    #[test]
    fn zero_order_trace_and_orthogonal_axes() {
        let g = torus3(16);
        let f = random::low_pass_field(&mut random::rng(5), g, 1, &LowPassSpec::default());
        let mut trace = RealField::zeros(g, 1);
        for i in 0..3 {
            trace.axpy(1.0, &zero_order_operator(&f, i, i).unwrap());
        }
        assert!(trace.add(&f).unwrap().max_abs() < 1e-12 * f.max_abs());
        let single = RealField::scalar(g, |x| (2.0 * x[0]).cos());
        assert!(zero_order_operator(&single, 1, 2).unwrap().max_abs() < 1e-14);
        assert!(zero_order_operator(&single, 1, 3).is_err());
    }

    #[test]
    fn origin_constants() {
        assert!((unit_cube_inverse_distance() - 2.380077363979557).abs() < 1e-12);
        assert!((unit_square_log_distance() + 1.0611754268825242).abs() < 1e-12);
    }

    #[test]
    fn free_space_1d_matches_closed_form() {
        // Delta phi = 4 pi rho in 1-D for a bump: check phi'' = 4 pi rho away from the edges.
        let g = Grid::centered(1, 512, 16.0).unwrap();
        let b = random::Bump { center: [0.5, 0.0, 0.0], radius: 2.0, amplitude: 1.0 };
        let rho = b.sample(g);
        let phi = poisson_free_space(&rho).unwrap();
        let h = g.spacing(0);
        for p in 100..412 {
            let d2 = (phi.values()[p + 1] - 2.0 * phi.values()[p] + phi.values()[p - 1]) / (h * h);
            assert!((d2 - 4.0 * PI * rho.values()[p]).abs() < 1e-2, "p = {p}");
        }
    }
}
