use serde::{Deserialize, Serialize};

use super::SystemModel;
use crate::error::Result;
use crate::field::{MatrixField, RealField, SmallMatrix};
use crate::norms::multi_indices;
use crate::spectral;

/// Sampled structural report of one model at one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// `max |A^a - (A^a)^T|` per axis.
    pub flux_asymmetry: Vec<f64>,
    pub a0_asymmetry: f64,
    pub a0_min_eigenvalue: f64,
    pub a0_max_eigenvalue: f64,
    /// Smallest `C >= 1` with `C^-1 <= eig(A0) <= C` at every node.
    pub constant: f64,
    /// `max |A^a(0)|` when the model declares vanishing fluxes at zero.
    pub flux_at_zero: Option<f64>,
}

fn asymmetry(m: &MatrixField, points: usize) -> f64 {
    m.max_asymmetry(points)
}

/// Checks pointwise symmetry of `A^a` and the eigenvalue envelope of `A0`.
pub fn check_symmetry_positivity(system: &dyn SystemModel, state: &RealField, t: f64) -> SymmetryReport {
    let n = state.grid().len();
    let nc = system.components();
    let flux_asymmetry = (0..system.dim()).map(|a| asymmetry(&system.flux(a, state, t), n)).collect();
    let (mut lo, mut hi, mut asym) = (1.0f64, 1.0f64, 0.0f64);
    if let Some(a0) = system.a0(state, t) {
        lo = f64::INFINITY;
        hi = f64::NEG_INFINITY;
        asym = asymmetry(&a0, n);
        let mut visit = |m: &SmallMatrix| {
            let e = m.symmetric_eigenvalues();
            lo = lo.min(e[0]);
            hi = hi.max(e[e.len() - 1]);
        };
        match &a0 {
            MatrixField::Uniform(m) => visit(m),
            MatrixField::PerPoint(ms) => ms.iter().for_each(&mut visit),
        }
    }
    let constant = if lo > 0.0 { hi.max(1.0 / lo).max(1.0) } else { f64::INFINITY };
    let flux_at_zero = system.flux_vanishes_at_zero().then(|| {
        let zero = RealField::zeros(*state.grid(), nc);
        (0..system.dim())
            .map(|a| {
                let f = system.flux(a, &zero, t);
                (0..n).map(|p| f.at(p).inf_norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    });
    SymmetryReport {
        flux_asymmetry,
        a0_asymmetry: asym,
        a0_min_eigenvalue: lo,
        a0_max_eigenvalue: hi,
        constant,
        flux_at_zero,
    }
}

/// `E_m = sum_{|alpha| <= m} <d^alpha U, A0 d^alpha U>_{L2}` by grid quadrature.
pub fn weighted_energy(state: &RealField, system: &dyn SystemModel, t: f64, m: usize) -> Result<f64> {
    let grid = *state.grid();
    let nc = state.components();
    let a0 = system.a0(state, t);
    let mut total = 0.0;
    let (mut v, mut w) = ([0.0; 4], [0.0; 4]);
    for alpha in multi_indices(grid.dim(), m) {
        let d = spectral::derivative(state, &alpha)?;
        match &a0 {
            None => total += d.dot(&d),
            Some(a0) => {
                let mut acc = 0.0;
                for p in 0..grid.len() {
                    d.point(p, &mut v);
                    a0.at(p).matvec(&v[..nc], &mut w[..nc]);
                    acc += (0..nc).map(|c| v[c] * w[c]).sum::<f64>();
                }
                total += acc * grid.cell_volume();
            }
        }
    }
    Ok(total.max(0.0))
}
