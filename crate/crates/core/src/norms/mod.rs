//! Sobolev norms and inner products on periodic and truncated grids.

mod dyadic;

pub use dyadic::{weighted_inner, weighted_norm, weighted_terms, DyadicPartition, NormSpec};

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::grid::Grid;
use crate::spectral;

/// Relative boundary-band amplitude above which a field counts as touching the box edge.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;

/// `||u||_{H^s} = ||Lambda^s u||_{L^2}`, summed over components.
pub fn hs_norm(field: &RealField, s: f64) -> f64 {
    let spec = spectral::transform(field);
    let grid = *field.grid();
    let n = grid.len();
    let weights: Vec<f64> = (0..n).map(|i| (1.0 + grid.k_squared(i)).powf(s)).collect();
    let mut total = 0.0;
    for c in 0..field.components() {
        total += spec.component(c).iter().zip(&weights).map(|(z, w)| w * z.norm_sqr()).sum::<f64>();
    }
    (total * grid.volume()).sqrt()
}

/// `<u, v>_s = <Lambda^s u, Lambda^s v>_{L^2}`.
pub fn hs_inner(u: &RealField, v: &RealField, s: f64) -> Result<f64> {
    u.check_compatible(v)?;
    let grid = *u.grid();
    let su = spectral::transform(u);
    let sv = spectral::transform(v);
    let n = grid.len();
    let mut total = 0.0;
    for c in 0..u.components() {
        let (a, b) = (su.component(c), sv.component(c));
        for i in 0..n {
            total += (1.0 + grid.k_squared(i)).powf(s) * (a[i] * b[i].conj()).re;
        }
    }
    Ok(total * grid.volume())
}

/// Every multi-index `alpha` in `dim` variables with `|alpha| <= m`.
pub fn multi_indices(dim: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == dim {
            out.push(prefix.clone());
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            rec(dim, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, m, &mut Vec::new(), &mut out);
    out
}

/// Integer-order norm `(sum_{|alpha| <= m} ||d^alpha u||^2)^{1/2}` evaluated
/// spectrally (exact Parseval form of the direct derivative sum).
pub fn integer_norm(field: &RealField, m: usize) -> f64 {
    let grid = *field.grid();
    let spec = spectral::transform(field);
    let alphas = multi_indices(grid.dim(), m);
    let weights: Vec<f64> = (0..grid.len())
        .map(|idx| {
            let ix = grid.unravel(idx);
            alphas
                .iter()
                .map(|alpha| {
                    let mut w = 1.0;
                    for (a, &o) in alpha.iter().enumerate() {
                        if o % 2 == 1 && grid.is_nyquist(ix[a]) {
                            return 0.0;
                        }
                        w *= grid.wavenumber(a, ix[a]).powi(2 * o as i32);
                    }
                    w
                })
                .sum()
        })
        .collect();
    let mut total = 0.0;
    for c in 0..field.components() {
        total += spec.component(c).iter().zip(&weights).map(|(z, w)| w * z.norm_sqr()).sum::<f64>();
    }
    (total * grid.volume()).sqrt()
}

/// Distance of a node from the box midpoint.
pub(crate) fn centered_radius(grid: &Grid, p: usize) -> f64 {
    let x = grid.position(p);
    (0..grid.dim())
        .map(|a| {
            let mid = grid.origin(a) + 0.5 * grid.length(a);
            (x[a] - mid).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn check_compact(field: &RealField) -> Result<()> {
    let ratio = field.boundary_band_ratio();
    if ratio > BOUNDARY_TOLERANCE {
        return Err(Error::SupportTouchesBoundary { amplitude: ratio });
    }
    Ok(())
}

/// `||(1 + |x|)^delta u||_{L^2}` with `|x|` measured from the box midpoint.
pub fn l2_delta_norm(field: &RealField, delta: f64) -> Result<f64> {
    check_compact(field)?;
    let grid = *field.grid();
    let weights: Vec<f64> = (0..grid.len()).map(|p| (1.0 + centered_radius(&grid, p)).powf(2.0 * delta)).collect();
    let mut total = 0.0;
    for c in 0..field.components() {
        total += field.component(c).iter().zip(&weights).map(|(u, w)| w * u * u).sum::<f64>();
    }
    Ok((total * grid.cell_volume()).sqrt())
}

/// Direct integer-order weighted norm
/// `(sum_{|alpha| <= m} int (1 + |x|)^{2 delta} |d^alpha u|^2 dx)^{1/2}`
/// by grid quadrature of spectral derivatives.
pub fn weighted_norm_direct(field: &RealField, m: usize, delta: f64) -> Result<f64> {
    check_compact(field)?;
    let grid = *field.grid();
    let weights: Vec<f64> = (0..grid.len()).map(|p| (1.0 + centered_radius(&grid, p)).powf(2.0 * delta)).collect();
    let mut total = 0.0;
    for alpha in multi_indices(grid.dim(), m) {
        let d = spectral::derivative(field, &alpha)?;
        total += d
            .values()
            .chunks_exact(grid.len())
            .map(|comp| comp.iter().zip(&weights).map(|(u, w)| w * u * u).sum::<f64>())
            .sum::<f64>();
    }
    Ok((total * grid.cell_volume()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{self, LowPassSpec};
    use std::f64::consts::PI;

    #[test]
    fn zero_and_l2_cases() {
        let g = Grid::periodic(2, 16, 2.0 * PI).unwrap();
        assert_eq!(hs_norm(&RealField::zeros(g, 1), 3.0), 0.0);
        let u = random::low_pass_field(&mut random::rng(1), g, 2, &LowPassSpec::default());
        assert!((hs_norm(&u, 0.0) - u.l2_norm()).abs() < 1e-12 * u.l2_norm());
    }

    #[test]
    fn sine_h1_norm() {
        let g = Grid::periodic(1, 32, 2.0 * PI).unwrap();
        let u = RealField::scalar(g, |x| x[0].sin());
        assert!((hs_norm(&u, 1.0) - (2.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sine_cosine_orthogonal_for_all_s() {
        let g = Grid::periodic(1, 32, 2.0 * PI).unwrap();
        let s_ = RealField::scalar(g, |x| x[0].sin());
        let c_ = RealField::scalar(g, |x| x[0].cos());
        for s in [-1.0, 0.0, 0.5, 2.0, 3.7] {
            assert!(hs_inner(&s_, &c_, s).unwrap().abs() < 1e-13);
            assert_eq!(hs_inner(&s_, &RealField::zeros(g, 1), s).unwrap(), 0.0);
        }
    }

    #[test]
    fn inner_rejects_mismatch() {
        let g = Grid::periodic(1, 32, 1.0).unwrap();
        let h = Grid::periodic(1, 16, 1.0).unwrap();
        assert!(hs_inner(&RealField::zeros(g, 1), &RealField::zeros(h, 1), 1.0).is_err());
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(1, 3).len(), 4);
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(3, 3).len(), 20);
    }

    #[test]
    fn integer_norm_m1_matches_h1() {
        let g = Grid::periodic(3, 16, 2.0 * PI).unwrap();
        let u = random::low_pass_field(&mut random::rng(3), g, 1, &LowPassSpec { kmax: 4, ..Default::default() });
        assert!((integer_norm(&u, 1) - hs_norm(&u, 1.0)).abs() < 1e-12 * hs_norm(&u, 1.0));
    }

    #[test]
    fn l2_delta_requires_compact_support() {
        let g = Grid::centered(1, 64, 8.0).unwrap();
        let u = RealField::scalar(g, |_| 1.0);
        assert!(matches!(l2_delta_norm(&u, 1.0), Err(Error::SupportTouchesBoundary { .. })));
    }

    #[test]
    fn direct_norm_m0_is_l2_delta_and_monotone() {
        let g = Grid::centered(1, 256, 16.0).unwrap();
        let b = random::Bump { center: [2.0, 0.0, 0.0], radius: 1.5, amplitude: 1.0 };
        let u = b.sample(g);
        let l2d = l2_delta_norm(&u, 0.7).unwrap();
        assert!((weighted_norm_direct(&u, 0, 0.7).unwrap() - l2d).abs() < 1e-14 * l2d);
        let mut prev = 0.0;
        for m in 0..4 {
            let v = weighted_norm_direct(&u, m, 0.7).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }
}
