//! Seeded test-field families.
//!
//! Random periodic fields are low-pass Gaussian noise: every integer mode
//! vector `m` with `0 < max_a |m_a| <= kmax` receives independent standard
//! normal cosine and sine amplitudes scaled by `(1 + |m|^2)^(-decay/2)`.
//! Coefficients are drawn in a fixed mode order, so the same seed yields the
//! same continuum function on every resolution that resolves `kmax`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::field::{RealField, SpectralField};
use crate::grid::Grid;
use crate::spectral;

/// Spectrum of a random band-limited field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowPassSpec {
    pub kmax: usize,
    pub decay: f64,
    /// Target peak amplitude after normalization (`0` keeps the raw draw).
    pub amplitude: f64,
    pub zero_mean: bool,
}

impl Default for LowPassSpec {
    fn default() -> Self {
        Self { kmax: 6, decay: 2.0, amplitude: 1.0, zero_mean: true }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Half-space of nonzero mode vectors with `max |m_a| <= kmax`, in a fixed order.
fn half_modes(dim: usize, kmax: usize) -> Vec<[i64; 3]> {
    let k = kmax as i64;
    let mut out = Vec::new();
    let range: Vec<i64> = (-k..=k).collect();
    let ax = |a: usize| if a < dim { range.clone() } else { vec![0] };
    for &m0 in &ax(0) {
        for &m1 in &ax(1) {
            for &m2 in &ax(2) {
                let m = [m0, m1, m2];
                let first = m.iter().find(|&&v| v != 0);
                if matches!(first, Some(&v) if v > 0) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Draws a random band-limited field on `grid` with `components` components.
pub fn low_pass_field<R: Rng>(rng: &mut R, grid: Grid, components: usize, spec: &LowPassSpec) -> RealField {
    assert!(2 * spec.kmax < grid.points(), "grid does not resolve kmax");
    let modes = half_modes(grid.dim(), spec.kmax);
    let n = grid.points() as i64;
    let len = grid.len();
    let mut coefficients = vec![Complex64::default(); len * components];
    for c in 0..components {
        if !spec.zero_mean {
            let a: f64 = rng.sample(StandardNormal);
            coefficients[c * len] = Complex64::new(a, 0.0);
        }
        for m in &modes {
            let m2 = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64;
            let w = (1.0 + m2).powf(-0.5 * spec.decay);
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(a, -b) * (0.5 * w);
            let slot = |v: i64| (((v % n) + n) % n) as usize;
            let mut ix = [0usize; 3];
            let mut jx = [0usize; 3];
            for a in 0..grid.dim() {
                ix[a] = slot(m[a]);
                jx[a] = slot(-m[a]);
            }
            coefficients[c * len + grid.ravel(ix)] = z;
            coefficients[c * len + grid.ravel(jx)] = z.conj();
        }
    }
    let mut field = spectral::inverse_transform(&SpectralField::new(grid, components, coefficients));
    if spec.amplitude > 0.0 {
        let peak = field.max_abs();
        if peak > 0.0 {
            field = field.scaled(spec.amplitude / peak);
        }
    }
    field
}

/// Smooth compactly supported bump `A exp(1 - 1/(1 - |x - c|^2 / r^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 3],
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        let t = r2 / (self.radius * self.radius);
        if t < 1.0 {
            self.amplitude * (1.0 - 1.0 / (1.0 - t)).exp()
        } else {
            0.0
        }
    }

    /// Largest `|x|` inside the support.
    pub fn outer_radius(&self) -> f64 {
        self.center.iter().map(|v| v * v).sum::<f64>().sqrt() + self.radius
    }

    pub fn sample(&self, grid: Grid) -> RealField {
        RealField::scalar(grid, |x| self.eval(x))
    }

    /// Random bump whose centre sits at distance `distance` from the origin
    /// and whose radius is `width_fraction * max(distance, min_radius)`.
    pub fn random<R: Rng>(rng: &mut R, dim: usize, distance: f64, width_fraction: f64, min_radius: f64) -> Self {
        let mut dir = [0.0; 3];
        loop {
            let mut n2 = 0.0;
            for d in dir.iter_mut().take(dim) {
                *d = rng.sample::<f64, _>(StandardNormal);
                n2 += *d * *d;
            }
            if n2 > 1e-8 {
                let nrm = n2.sqrt();
                for d in dir.iter_mut().take(dim) {
                    *d *= distance / nrm;
                }
                break;
            }
        }
        let radius = width_fraction * distance.max(min_radius);
        let amplitude = 0.5 + rng.random::<f64>();
        Self { center: dir, radius, amplitude }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_function_across_resolutions() {
        let spec = LowPassSpec { kmax: 4, decay: 1.0, amplitude: 0.0, zero_mean: true };
        let g = Grid::periodic(2, 16, 6.0).unwrap();
        let a = low_pass_field(&mut rng(7), g, 1, &spec);
        let b = low_pass_field(&mut rng(7), g.refined(), 1, &spec);
        for p in 0..g.len() {
            let ix = g.unravel(p);
            let q = g.refined().ravel([2 * ix[0], 2 * ix[1], 0]);
            assert!((a.values()[p] - b.values()[q]).abs() < 1e-12);
        }
        assert!(a.means()[0].abs() < 1e-14);
    }

    #[test]
    fn bump_support() {
        let b = Bump { center: [1.0, 0.0, 0.0], radius: 0.5, amplitude: 2.0 };
        assert_eq!(b.eval(&[1.6]), 0.0);
        assert!((b.eval(&[1.0]) - 2.0).abs() < 1e-15);
        assert!((b.outer_radius() - 1.5).abs() < 1e-15);
    }
}
