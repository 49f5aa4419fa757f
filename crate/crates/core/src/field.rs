use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// An N-component real function sampled on a [`Grid`].
///
/// Storage is component-major: component `c` occupies
/// `values[c * grid.len() .. (c + 1) * grid.len()]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealField {
    grid: Grid,
    components: usize,
    values: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        Self { grid, components, values: vec![0.0; grid.len() * components] }
    }

    pub fn from_values(grid: Grid, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != grid.len() * components {
            return Err(Error::GridMismatch(format!(
                "expected {} values for {components} components, got {}",
                grid.len() * components,
                values.len()
            )));
        }
        Ok(Self { grid, components, values })
    }

    /// Samples `f(x)` at every node; `f` returns all components at once.
    pub fn from_fn(grid: Grid, components: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let n = grid.len();
        let mut values = vec![0.0; n * components];
        for p in 0..n {
            let x = grid.position(p);
            let v = f(&x[..grid.dim()]);
            for c in 0..components {
                values[c * n + p] = v[c];
            }
        }
        Self { grid, components, values }
    }

    /// Single-component convenience constructor.
    pub fn scalar(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, 1, |x| vec![f(x)])
    }

    /// Stacks single-component fields into one multi-component field.
    pub fn stack(parts: &[RealField]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty stack".into()))?;
        let grid = first.grid;
        let mut values = Vec::new();
        let mut components = 0;
        for p in parts {
            if !p.grid.same_shape(&grid) {
                return Err(Error::GridMismatch("stacked fields live on different grids".into()));
            }
            values.extend_from_slice(&p.values);
            components += p.components;
        }
        Ok(Self { grid, components, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.len();
        &mut self.values[c * n..(c + 1) * n]
    }

    /// Copy of a single component as its own field.
    pub fn extract(&self, c: usize) -> RealField {
        RealField { grid: self.grid, components: 1, values: self.component(c).to_vec() }
    }

    /// All components at node `p`.
    pub fn point(&self, p: usize, out: &mut [f64]) {
        let n = self.grid.len();
        for c in 0..self.components {
            out[c] = self.values[c * n + p];
        }
    }

    pub fn check_compatible(&self, other: &RealField) -> Result<()> {
        if !self.grid.same_shape(&other.grid) || self.components != other.components {
            return Err(Error::GridMismatch(format!(
                "fields differ: {} vs {} components on {:?} vs {:?}",
                self.components, other.components, self.grid, other.grid
            )));
        }
        Ok(())
    }

    pub fn check_finite(&self, name: &str) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(name.to_string()))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField {
            grid: self.grid,
            components: self.components,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<RealField> {
        self.check_compatible(other)?;
        Ok(RealField {
            grid: self.grid,
            components: self.components,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn scaled(&self, s: f64) -> RealField {
        self.map(|v| s * v)
    }

    pub fn add(&self, other: &RealField) -> Result<RealField> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealField) -> Result<RealField> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Pointwise product of two fields with equal component counts.
    pub fn mul(&self, other: &RealField) -> Result<RealField> {
        self.zip_map(other, |a, b| a * b)
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &RealField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Grid quadrature of each component.
    pub fn integrals(&self) -> Vec<f64> {
        let dv = self.grid.cell_volume();
        (0..self.components).map(|c| self.component(c).iter().sum::<f64>() * dv).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        let n = self.grid.len() as f64;
        (0..self.components).map(|c| self.component(c).iter().sum::<f64>() / n).collect()
    }

    /// L2 norm by grid quadrature, summed over components.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// L2 inner product by grid quadrature.
    pub fn dot(&self, other: &RealField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
            * self.grid.cell_volume()
    }

    /// Peak amplitude in the outer band of the box, relative to the global peak.
    ///
    /// The band is `max(2, N/32)` cells deep on every face. Used to monitor
    /// wrap-around for compactly supported fields on a truncated box.
    pub fn boundary_band_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.grid.points();
        let band = (n / 32).max(2);
        let dim = self.grid.dim();
        let mut edge = 0.0f64;
        for p in 0..self.grid.len() {
            let ix = self.grid.unravel(p);
            if ix[..dim].iter().any(|&i| i < band || i >= n - band) {
                for c in 0..self.components {
                    edge = edge.max(self.component(c)[p].abs());
                }
            }
        }
        edge / peak
    }
}

/// Fourier coefficients of a [`RealField`].
///
/// Coefficients are normalized as Fourier-series coefficients,
/// `c_k = N^{-d} sum_x u(x) exp(-i k (x - x0))`, so that
/// `u(x) = sum_k c_k exp(i k (x - x0))` with `x0` the first node.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub(crate) fn new(grid: Grid, components: usize, coefficients: Vec<Complex64>) -> Self {
        debug_assert_eq!(coefficients.len(), grid.len() * components);
        Self { grid, components, coefficients }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.coefficients[c * n..(c + 1) * n]
    }

    /// Multiplies every mode by `m(k)` (applied to all components).
    pub fn apply_multiplier(&mut self, m: impl Fn(&[f64]) -> Complex64) {
        let n = self.grid.len();
        let dim = self.grid.dim();
        let factors: Vec<Complex64> = (0..n)
            .map(|idx| {
                let k = self.grid.wavevector(idx);
                m(&k[..dim])
            })
            .collect();
        for c in 0..self.components {
            for (z, f) in self.coefficients[c * n..(c + 1) * n].iter_mut().zip(&factors) {
                *z *= f;
            }
        }
    }

    /// Largest violation of `c_{-k} = conj(c_k)` over all modes.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.points();
        let dim = self.grid.dim();
        let len = self.grid.len();
        let mut worst = 0.0f64;
        for c in 0..self.components {
            let coef = self.component(c);
            for idx in 0..len {
                let ix = self.grid.unravel(idx);
                let mut mirror = [0usize; 3];
                for a in 0..dim {
                    mirror[a] = (n - ix[a]) % n;
                }
                let j = self.grid.ravel(mirror);
                worst = worst.max((coef[idx] - coef[j].conj()).norm());
            }
        }
        worst
    }
}

/// Small dense matrix used for pointwise coefficient evaluation (N <= 4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallMatrix {
    pub n: usize,
    pub a: [[f64; 4]; 4],
}

impl SmallMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= 4, "small matrices hold at most 4 rows");
        Self { n, a: [[0.0; 4]; 4] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i][i] = 1.0;
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.a[i][i] = v;
        }
        m
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = (0..self.n).map(|j| self.a[i][j] * x[j]).sum();
        }
    }

    pub fn asymmetry(&self) -> f64 {
        let mut w = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                w = w.max((self.a[i][j] - self.a[j][i]).abs());
            }
        }
        w
    }

    /// Maximum absolute row sum; bounds the spectral radius.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.a[i][j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.a[i][j] == 0.0))
    }

    /// Cholesky factor of a symmetric matrix; `None` if not positive definite
    /// beyond `tol`. Returns the factor and the smallest pivot.
    pub fn cholesky(&self, tol: f64) -> std::result::Result<(SmallMatrix, f64), f64> {
        let n = self.n;
        let mut l = SmallMatrix::zeros(n);
        let mut min_pivot = f64::INFINITY;
        for j in 0..n {
            let mut d = self.a[j][j];
            for k in 0..j {
                d -= l.a[j][k] * l.a[j][k];
            }
            min_pivot = min_pivot.min(d);
            if d <= tol {
                return Err(d);
            }
            let djj = d.sqrt();
            l.a[j][j] = djj;
            for i in (j + 1)..n {
                let mut s = self.a[i][j];
                for k in 0..j {
                    s -= l.a[i][k] * l.a[j][k];
                }
                l.a[i][j] = s / djj;
            }
        }
        Ok((l, min_pivot))
    }

    /// Solves `L L^T x = b` in place given a Cholesky factor.
    pub fn cholesky_solve(l: &SmallMatrix, b: &mut [f64]) {
        let n = l.n;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= l.a[i][k] * b[k];
            }
            b[i] = s / l.a[i][i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= l.a[k][i] * b[k];
            }
            b[i] = s / l.a[i][i];
        }
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (self.a[i][j] + self.a[j][i]));
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}

/// An N x N matrix at every node of a grid.
#[derive(Debug, Clone)]
pub enum MatrixField {
    /// Same matrix everywhere.
    Uniform(SmallMatrix),
    /// One matrix per node.
    PerPoint(Vec<SmallMatrix>),
}

impl MatrixField {
    pub fn at(&self, p: usize) -> &SmallMatrix {
        match self {
            MatrixField::Uniform(m) => m,
            MatrixField::PerPoint(v) => &v[p],
        }
    }

    pub fn from_fn(points: usize, f: impl Fn(usize) -> SmallMatrix) -> Self {
        MatrixField::PerPoint((0..points).map(f).collect())
    }

    /// Entry `(i, j)` as a scalar field on `grid`.
    pub fn entry_field(&self, grid: Grid, i: usize, j: usize) -> RealField {
        let n = grid.len();
        let values = (0..n).map(|p| self.at(p).a[i][j]).collect();
        RealField::from_values(grid, 1, values).expect("matrix field size matches grid")
    }

    pub fn max_asymmetry(&self, points: usize) -> f64 {
        match self {
            MatrixField::Uniform(m) => m.asymmetry(),
            MatrixField::PerPoint(_) => (0..points).map(|p| self.at(p).asymmetry()).fold(0.0, f64::max),
        }
    }
}
