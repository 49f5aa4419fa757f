use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform collocation lattice.
///
/// A periodic grid is the torus `[0, L)^d`. A non-periodic grid stands in for
/// a truncated `R^d`: coordinates run over `[-L/2, L/2)` so that the origin is
/// the box midpoint, and fields living on it are expected to be compactly
/// supported away from the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points: usize,
    lengths: [f64; 3],
    periodic: bool,
}

impl Grid {
    pub fn new(dim: usize, points: usize, lengths: &[f64], periodic: bool) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        if lengths.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} box lengths, got {}",
                lengths.len()
            )));
        }
        let mut l = [1.0; 3];
        for (a, &len) in lengths.iter().enumerate() {
            if !(len > 0.0 && len.is_finite()) {
                return Err(Error::InvalidGrid(format!("box length {len} must be positive")));
            }
            l[a] = len;
        }
        Ok(Self { dim, points, lengths: l, periodic })
    }

    /// Torus `[0, L)^d` with the same length on every axis.
    pub fn periodic(dim: usize, points: usize, length: f64) -> Result<Self> {
        Self::new(dim, points, &vec![length; dim], true)
    }

    /// Centered box `[-L/2, L/2)^d` for compactly supported fields.
    pub fn centered(dim: usize, points: usize, length: f64) -> Result<Self> {
        Self::new(dim, points, &vec![length; dim], false)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.lengths[axis]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths[..self.dim]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.points as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.lengths().iter().product()
    }

    /// Quadrature weight of a single node.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Coordinate of the first node along an axis.
    pub fn origin(&self, axis: usize) -> f64 {
        if self.periodic {
            0.0
        } else {
            -0.5 * self.lengths[axis]
        }
    }

    /// Node coordinates along one axis.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing(axis);
        let x0 = self.origin(axis);
        (0..self.points).map(|i| x0 + i as f64 * h).collect()
    }

    /// Multi-index of a flat node index (last axis fastest).
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for a in (0..self.dim).rev() {
            out[a] = idx % self.points;
            idx /= self.points;
        }
        out
    }

    pub fn ravel(&self, ix: [usize; 3]) -> usize {
        (0..self.dim).fold(0, |acc, a| acc * self.points + ix[a])
    }

    /// Physical position of a node.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.origin(a) + ix[a] as f64 * self.spacing(a);
        }
        x
    }

    /// Euclidean distance of a node from the coordinate origin.
    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.position(idx);
        x[..self.dim].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Signed integer mode number for an FFT slot (Nyquist reported as `-N/2`).
    pub fn mode(&self, slot: usize) -> i64 {
        let n = self.points as i64;
        let s = slot as i64;
        if s < n / 2 {
            s
        } else {
            s - n
        }
    }

    pub fn is_nyquist(&self, slot: usize) -> bool {
        slot == self.points / 2
    }

    /// Physical wavenumber `2 pi m / L` for a slot along an axis.
    pub fn wavenumber(&self, axis: usize, slot: usize) -> f64 {
        2.0 * PI * self.mode(slot) as f64 / self.lengths[axis]
    }

    /// Wavenumber vector of a flat spectral index.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let mut k = [0.0; 3];
        for a in 0..self.dim {
            k[a] = self.wavenumber(a, ix[a]);
        }
        k
    }

    /// Squared wavenumber magnitude of a flat spectral index.
    pub fn k_squared(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        k[..self.dim].iter().map(|v| v * v).sum()
    }

    /// Same lattice with every axis refined by a factor of two.
    pub fn refined(&self) -> Self {
        Self { points: self.points * 2, ..*self }
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && self.periodic == other.periodic
            && self
                .lengths()
                .iter()
                .zip(other.lengths())
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }
}
