//! Dyadic weighted norm `H_{s,delta}`.
//!
//! `||u||^2 = sum_j 2^{2j(delta + d/2)} ||(psi_j u)(2^j .)||_{H^s}^2`, where each
//! localized and rescaled piece is evaluated on its own centered box of
//! half-width 4.

use serde::{Deserialize, Serialize};

use super::hs_norm;
use crate::error::{Error, Result};
use crate::field::RealField;
use crate::grid::Grid;
use crate::spectral;

/// Half-width of the box on which each rescaled piece is measured.
const PIECE_HALF_WIDTH: f64 = 4.0;
/// Largest node count allowed for a single piece grid.
const MAX_PIECE_NODES: usize = 1 << 24;

/// `exp(-1/t)`-based smooth step: 0 for `t <= 0`, 1 for `t >= 1`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Radial cutoff family `psi_j`, smooth in `log2 |x|`.
///
/// `psi_0` equals 1 on `|x| <= 1` and vanishes for `|x| >= 2`. For `j >= 1`,
/// `psi_j` rises on `[2^{j-2}, 2^{j-1}]`, equals 1 on `[2^{j-1}, 2^j]` and falls
/// on `[2^j, 2^{j+1}]`. Every `psi_j` with `j >= 1` is the same profile in
/// `log2 |x| - j`, which gives the `2^{-|alpha| j}` derivative decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicPartition {
    pub j_max: usize,
}

impl Default for DyadicPartition {
    fn default() -> Self {
        Self { j_max: 6 }
    }
}

impl DyadicPartition {
    pub fn new(j_max: usize) -> Self {
        Self { j_max }
    }

    /// `psi_j` as a function of the radius.
    pub fn psi(&self, j: usize, r: f64) -> f64 {
        if r <= 0.0 {
            return if j == 0 { 1.0 } else { 0.0 };
        }
        let l = r.log2();
        if j == 0 {
            1.0 - smooth_step(l)
        } else {
            let j = j as f64;
            smooth_step(l - (j - 2.0)) * (1.0 - smooth_step(l - j))
        }
    }

    /// Inner and outer radius of `supp psi_j`.
    pub fn support(&self, j: usize) -> (f64, f64) {
        if j == 0 {
            (0.0, 2.0)
        } else {
            (2f64.powi(j as i32 - 2), 2f64.powi(j as i32 + 1))
        }
    }

    /// Radius beyond which a field must vanish so that every `psi_j` with
    /// `j > j_max` annihilates it.
    pub fn admissible_radius(&self) -> f64 {
        2f64.powi(self.j_max as i32 - 1)
    }

    /// Numerical derivative-decay constants `C_alpha` for `|alpha| = 0, 1, 2`:
    /// `max_j 2^{|alpha| j} sup |d^alpha psi_j|`, with the second-order bound
    /// covering both `psi''` and `psi'/r` (the Cartesian Hessian terms).
    pub fn decay_constants(&self) -> [f64; 3] {
        let mut c = [0.0f64; 3];
        for j in 0..=self.j_max + 1 {
            let (lo, hi) = self.support(j);
            let lo = lo.max(1e-3);
            let samples = 4000;
            let scale = 2f64.powi(j as i32);
            for i in 0..=samples {
                let r = lo * (hi / lo).powf(i as f64 / samples as f64);
                let h = 1e-4 * r;
                let f0 = self.psi(j, r);
                let fp = self.psi(j, r + h);
                let fm = self.psi(j, r - h);
                let d1 = (fp - fm) / (2.0 * h);
                let d2 = (fp - 2.0 * f0 + fm) / (h * h);
                c[0] = c[0].max(f0.abs());
                c[1] = c[1].max(scale * d1.abs());
                c[2] = c[2].max(scale * scale * d2.abs().max(d1.abs() / r));
            }
        }
        c
    }
}

/// Indices of the weighted norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub s: f64,
    pub delta: f64,
    /// Minimum points per axis of each piece grid.
    pub local_points: usize,
}

impl NormSpec {
    pub fn new(s: f64, delta: f64) -> Self {
        Self { s, delta, local_points: 64 }
    }
}

fn piece_grid(src: &Grid, j: usize, local_points: usize) -> Result<Grid> {
    let dim = src.dim();
    let length = 2.0 * PIECE_HALF_WIDTH;
    let needed = length * 2f64.powi(j as i32) / src.min_spacing();
    let points = ((needed - 1e-9).ceil() as usize).next_power_of_two().max(local_points.next_power_of_two());
    if points.pow(dim as u32) > MAX_PIECE_NODES {
        return Err(Error::InvalidParameter(format!(
            "piece grid for j = {j} needs {points} points per axis"
        )));
    }
    Grid::centered(dim, points, length)
}

fn check_admissible(field: &RealField, partition: &DyadicPartition) -> Result<()> {
    let grid = *field.grid();
    if grid.is_periodic() {
        return Err(Error::InvalidParameter("weighted norms need a centered (non-periodic) grid".into()));
    }
    let peak = field.max_abs();
    let radius = partition.admissible_radius();
    let mut outside = 0.0f64;
    for p in 0..grid.len() {
        if grid.radius(p) > radius {
            for c in 0..field.components() {
                outside = outside.max(field.component(c)[p].abs());
            }
        }
    }
    if peak > 0.0 && outside > 1e-12 * peak {
        return Err(Error::SupportExceeds { radius, amplitude: outside / peak });
    }
    Ok(())
}

fn localized(field: &RealField, partition: &DyadicPartition, j: usize) -> Option<RealField> {
    let grid = *field.grid();
    let cut: Vec<f64> = (0..grid.len()).map(|p| partition.psi(j, grid.radius(p))).collect();
    let mut piece = field.clone();
    let n = grid.len();
    let mut any = false;
    for (i, v) in piece.values_mut().iter_mut().enumerate() {
        *v *= cut[i % n];
        any |= *v != 0.0;
    }
    any.then_some(piece)
}

/// Rescaled localized pieces `(psi_j u)(2^j .)` on their own grids, with the weight exponent.
fn pieces(field: &RealField, spec: &NormSpec, partition: &DyadicPartition) -> Result<Vec<(usize, f64, RealField)>> {
    check_admissible(field, partition)?;
    let grid = *field.grid();
    let d = grid.dim() as f64;
    let mut out = Vec::new();
    for j in 0..=partition.j_max {
        let Some(piece) = localized(field, partition, j) else { continue };
        let dest = piece_grid(&grid, j, spec.local_points)?;
        let scaled = spectral::rescale(&piece, 2f64.powi(j as i32), &dest)?;
        let weight = 2f64.powf(2.0 * j as f64 * (spec.delta + 0.5 * d));
        out.push((j, weight, scaled));
    }
    Ok(out)
}

/// Per-`j` contributions `2^{2j(delta+d/2)} ||(psi_j u)_{2^j}||_{H^s}^2`.
pub fn weighted_terms(field: &RealField, spec: &NormSpec, partition: &DyadicPartition) -> Result<Vec<(usize, f64)>> {
    Ok(pieces(field, spec, partition)?
        .into_iter()
        .map(|(j, w, piece)| (j, w * hs_norm(&piece, spec.s).powi(2)))
        .collect())
}

/// The dyadic weighted norm `||u||_{H_{s,delta}}`.
pub fn weighted_norm(field: &RealField, spec: &NormSpec, partition: &DyadicPartition) -> Result<f64> {
    Ok(weighted_terms(field, spec, partition)?.iter().map(|(_, t)| t).sum::<f64>().sqrt())
}

/// The matching inner product `<u, v>_{s,delta}`.
pub fn weighted_inner(u: &RealField, v: &RealField, spec: &NormSpec, partition: &DyadicPartition) -> Result<f64> {
    u.check_compatible(v)?;
    check_admissible(u, partition)?;
    check_admissible(v, partition)?;
    let grid = *u.grid();
    let d = grid.dim() as f64;
    let mut total = 0.0;
    for j in 0..=partition.j_max {
        let (Some(pu), Some(pv)) = (localized(u, partition, j), localized(v, partition, j)) else { continue };
        let dest = piece_grid(&grid, j, spec.local_points)?;
        let eps = 2f64.powi(j as i32);
        let su = spectral::rescale(&pu, eps, &dest)?;
        let sv = spectral::rescale(&pv, eps, &dest)?;
        total += 2f64.powf(2.0 * j as f64 * (spec.delta + 0.5 * d)) * super::hs_inner(&su, &sv, spec.s)?;
    }
    Ok(total)
}
