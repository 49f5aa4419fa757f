//! Discrete Fourier machinery on uniform grids.
//!
//! Transforms are full complex FFTs applied axis by axis. Plans are cached in
//! a thread-local planner, so concurrently running solves never share plan
//! state.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::{RealField, SpectralField};
use crate::grid::Grid;

/// Default fraction of the resolved band kept by [`dealias`].
pub const TWO_THIRDS: f64 = 2.0 / 3.0;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_axis(data: &mut [Complex64], grid: &Grid, axis: usize, inverse: bool) {
    let n = grid.points();
    let dim = grid.dim();
    let stride = n.pow((dim - 1 - axis) as u32);
    let outer = n.pow(axis as u32);
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
    if stride == 1 {
        for line in data.chunks_exact_mut(n) {
            plan.process_with_scratch(line, &mut scratch);
        }
        return;
    }
    let mut buf = vec![Complex64::default(); n];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * n * stride + inner;
            for i in 0..n {
                buf[i] = data[base + i * stride];
            }
            plan.process_with_scratch(&mut buf, &mut scratch);
            for i in 0..n {
                data[base + i * stride] = buf[i];
            }
        }
    }
}

fn fft_nd(data: &mut [Complex64], grid: &Grid, inverse: bool) {
    for axis in 0..grid.dim() {
        fft_axis(data, grid, axis, inverse);
    }
}

/// Forward transform to normalized Fourier-series coefficients.
pub fn transform(field: &RealField) -> SpectralField {
    let grid = *field.grid();
    let n = grid.len();
    let scale = 1.0 / n as f64;
    let mut coefficients: Vec<Complex64> =
        field.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for chunk in coefficients.chunks_exact_mut(n) {
        fft_nd(chunk, &grid, false);
        for z in chunk.iter_mut() {
            *z *= scale;
        }
    }
    SpectralField::new(grid, field.components(), coefficients)
}

/// Inverse transform; the imaginary residue of non-Hermitian input is dropped.
pub fn inverse_transform(spec: &SpectralField) -> RealField {
    let grid = *spec.grid();
    let n = grid.len();
    let mut data = spec.coefficients().to_vec();
    for chunk in data.chunks_exact_mut(n) {
        fft_nd(chunk, &grid, true);
    }
    let values = data.into_iter().map(|z| z.re).collect();
    RealField::from_values(grid, spec.components(), values).expect("shape preserved")
}

/// Applies a Fourier multiplier `m(k)` to every component.
pub fn apply_multiplier(field: &RealField, m: impl Fn(&[f64]) -> Complex64) -> RealField {
    let mut spec = transform(field);
    spec.apply_multiplier(m);
    inverse_transform(&spec)
}

/// Bessel potential `Lambda^s = F^{-1} (1 + |k|^2)^{s/2} F`.
pub fn lambda_s(field: &RealField, s: f64) -> RealField {
    if s == 0.0 {
        return field.clone();
    }
    apply_multiplier(field, |k| {
        let k2: f64 = k.iter().map(|v| v * v).sum();
        Complex64::new((1.0 + k2).powf(0.5 * s), 0.0)
    })
}

/// Spectral derivative for a multi-index `alpha` (one entry per axis).
///
/// Odd-order derivatives annihilate the Nyquist slot of their axis so that the
/// result stays real.
pub fn derivative(field: &RealField, alpha: &[usize]) -> Result<RealField> {
    let grid = *field.grid();
    if alpha.len() > grid.dim() {
        return Err(Error::AxisOutOfRange { axis: alpha.len() - 1, dim: grid.dim() });
    }
    if alpha.iter().all(|&a| a == 0) {
        return Ok(field.clone());
    }
    let mut spec = transform(field);
    let len = grid.len();
    let factors: Vec<Complex64> = (0..len)
        .map(|idx| {
            let ix = grid.unravel(idx);
            let mut f = Complex64::new(1.0, 0.0);
            for (a, &order) in alpha.iter().enumerate() {
                if order == 0 {
                    continue;
                }
                if order % 2 == 1 && grid.is_nyquist(ix[a]) {
                    return Complex64::new(0.0, 0.0);
                }
                let ik = Complex64::new(0.0, grid.wavenumber(a, ix[a]));
                f *= ik.powu(order as u32);
            }
            f
        })
        .collect();
    for c in 0..spec.components() {
        for (z, f) in spec.coefficients_mut()[c * len..(c + 1) * len].iter_mut().zip(&factors) {
            *z *= f;
        }
    }
    Ok(inverse_transform(&spec))
}

/// First derivative along `axis`: multiplication by `i k_axis`.
pub fn partial_derivative(field: &RealField, axis: usize) -> Result<RealField> {
    let dim = field.grid().dim();
    if axis >= dim {
        return Err(Error::AxisOutOfRange { axis, dim });
    }
    let mut alpha = vec![0; dim];
    alpha[axis] = 1;
    derivative(field, &alpha)
}

/// Gradient of every component, one field per axis.
pub fn gradient(field: &RealField) -> Vec<RealField> {
    (0..field.grid().dim())
        .map(|a| partial_derivative(field, a).expect("axis in range"))
        .collect()
}

/// Zeroes every mode with some `|m_a| > rule * N/2`.
pub fn dealias(spec: &SpectralField, rule: f64) -> SpectralField {
    let grid = *spec.grid();
    let cutoff = rule * (grid.points() / 2) as f64;
    let mut out = spec.clone();
    let len = grid.len();
    let dim = grid.dim();
    let keep: Vec<bool> = (0..len)
        .map(|idx| {
            let ix = grid.unravel(idx);
            (0..dim).all(|a| (grid.mode(ix[a]).abs() as f64) <= cutoff + 1e-12)
        })
        .collect();
    for c in 0..spec.components() {
        for (z, &k) in out.coefficients_mut()[c * len..(c + 1) * len].iter_mut().zip(&keep) {
            if !k {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }
    out
}

/// Physical-space convenience wrapper around [`dealias`].
pub fn dealias_field(field: &RealField, rule: f64) -> RealField {
    if rule >= 1.0 {
        return field.clone();
    }
    inverse_transform(&dealias(&transform(field), rule))
}

/// Per-axis evaluation operator: either plain node selection or a dense
/// trigonometric-interpolation matrix.
enum AxisMap {
    Select(Vec<Option<usize>>),
    Dense(Vec<Complex64>),
}

fn axis_map(src: &Grid, axis: usize, targets: &[f64]) -> AxisMap {
    let n = src.points();
    let h = src.spacing(axis);
    let x0 = src.origin(axis);
    let len = src.length(axis);
    let periodic = src.is_periodic();
    let locate = |y: f64| -> Option<f64> {
        let mut r = y - x0;
        if periodic {
            r = r.rem_euclid(len);
        } else if r < -1e-9 * h || r >= len - 1e-9 * h {
            return None;
        }
        Some(r)
    };
    let aligned = targets.iter().all(|&y| match locate(y) {
        None => true,
        Some(r) => ((r / h) - (r / h).round()).abs() < 1e-9,
    });
    if aligned {
        return AxisMap::Select(
            targets
                .iter()
                .map(|&y| locate(y).map(|r| ((r / h).round() as usize) % n))
                .collect(),
        );
    }
    let mut m = vec![Complex64::default(); targets.len() * n];
    for (t, &y) in targets.iter().enumerate() {
        let Some(r) = locate(y) else { continue };
        for slot in 0..n {
            let k = src.wavenumber(axis, slot);
            m[t * n + slot] = if src.is_nyquist(slot) {
                Complex64::new((k * r).cos(), 0.0)
            } else {
                Complex64::from_polar(1.0, k * r)
            };
        }
    }
    AxisMap::Dense(m)
}

/// Contracts axis `axis` of a row-major tensor of shape `shape` with an
/// `m x shape[axis]` matrix.
fn contract(data: &[Complex64], shape: &[usize], axis: usize, mat: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![Complex64::default(); outer * m * inner];
    for o in 0..outer {
        for t in 0..m {
            let row = &mat[t * n..(t + 1) * n];
            let dst = &mut out[(o * m + t) * inner..(o * m + t + 1) * inner];
            for (s, &w) in row.iter().enumerate() {
                if w == Complex64::default() {
                    continue;
                }
                let src = &data[(o * n + s) * inner..(o * n + s + 1) * inner];
                for (d, v) in dst.iter_mut().zip(src) {
                    *d += w * v;
                }
            }
        }
    }
    out
}

/// Evaluates the trigonometric interpolant of `field` on the tensor product of
/// per-axis target coordinates. Targets outside a non-periodic source box
/// evaluate to zero.
pub fn evaluate_on_tensor(field: &RealField, targets: &[Vec<f64>]) -> Result<Vec<f64>> {
    let grid = *field.grid();
    let dim = grid.dim();
    if targets.len() != dim {
        return Err(Error::GridMismatch(format!("need {dim} target axes, got {}", targets.len())));
    }
    let maps: Vec<AxisMap> = (0..dim).map(|a| axis_map(&grid, a, &targets[a])).collect();
    let out_len: usize = targets.iter().map(|t| t.len()).product();
    let mut out = Vec::with_capacity(out_len * field.components());

    if maps.iter().all(|m| matches!(m, AxisMap::Select(_))) {
        let sel: Vec<&Vec<Option<usize>>> = maps
            .iter()
            .map(|m| match m {
                AxisMap::Select(s) => s,
                AxisMap::Dense(_) => unreachable!(),
            })
            .collect();
        let shape: Vec<usize> = targets.iter().map(|t| t.len()).collect();
        for c in 0..field.components() {
            let comp = field.component(c);
            for flat in 0..out_len {
                let mut rem = flat;
                let mut ix = [0usize; 3];
                let mut inside = true;
                for a in (0..dim).rev() {
                    let t = rem % shape[a];
                    rem /= shape[a];
                    match sel[a][t] {
                        Some(i) => ix[a] = i,
                        None => inside = false,
                    }
                }
                out.push(if inside { comp[grid.ravel(ix)] } else { 0.0 });
            }
        }
        return Ok(out);
    }

    let spec = transform(field);
    let n = grid.points();
    for c in 0..field.components() {
        let mut data = spec.component(c).to_vec();
        let mut shape = vec![n; dim];
        for (a, map) in maps.iter().enumerate() {
            let m = targets[a].len();
            let dense = match map {
                AxisMap::Dense(d) => d.clone(),
                AxisMap::Select(sel) => {
                    // Node-aligned axis inside a spectral contraction.
                    let mut d = vec![Complex64::default(); m * n];
                    for (t, s) in sel.iter().enumerate() {
                        if let Some(i) = s {
                            let r = *i as f64 * grid.spacing(a);
                            for slot in 0..n {
                                let k = grid.wavenumber(a, slot);
                                d[t * n + slot] = if grid.is_nyquist(slot) {
                                    Complex64::new((k * r).cos(), 0.0)
                                } else {
                                    Complex64::from_polar(1.0, k * r)
                                };
                            }
                        }
                    }
                    d
                }
            };
            data = contract(&data, &shape, a, &dense, m);
            shape[a] = m;
        }
        out.extend(data.into_iter().map(|z| z.re));
    }
    Ok(out)
}

/// Samples `u(epsilon x)` on the nodes of `dest`.
///
/// The source must be compactly supported so that its support, scaled by
/// `1/epsilon`, lies inside the destination box.
pub fn rescale(field: &RealField, epsilon: f64, dest: &Grid) -> Result<RealField> {
    let src = *field.grid();
    if dest.dim() != src.dim() {
        return Err(Error::GridMismatch("rescale between grids of different dimension".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("scaling factor {epsilon} must be positive")));
    }
    let dim = src.dim();
    let peak = field.max_abs();
    if peak > 0.0 {
        let mut escape = 0.0f64;
        for p in 0..src.len() {
            let x = src.position(p);
            let outside = (0..dim).any(|a| {
                let y = x[a] / epsilon;
                let lo = dest.origin(a);
                let hi = lo + dest.length(a) - dest.spacing(a);
                y < lo - 1e-12 || y > hi + 1e-12
            });
            if outside {
                for c in 0..field.components() {
                    escape = escape.max(field.component(c)[p].abs());
                }
            }
        }
        if escape > 1e-10 * peak {
            return Err(Error::SupportEscapes { amplitude: escape / peak });
        }
    }
    let targets: Vec<Vec<f64>> = (0..dim)
        .map(|a| dest.axis_coords(a).into_iter().map(|y| epsilon * y).collect())
        .collect();
    let values = evaluate_on_tensor(field, &targets)?;
    RealField::from_values(*dest, field.components(), values)
}

/// Alias-free product through the spectrum: both factors are zero-padded to
/// twice the points per axis, multiplied there, and the result is truncated
/// back to the modes of the source grid.
pub fn padded_product(u: &RealField, v: &RealField) -> Result<RealField> {
    u.check_compatible(v)?;
    let grid = *u.grid();
    let big = grid.refined();
    let (len, big_len) = (grid.len(), big.len());
    let n = grid.points() as i64;
    let big_n = big.points() as i64;
    let to_big: Vec<usize> = (0..len)
        .map(|idx| {
            let ix = grid.unravel(idx);
            let mut jx = [0usize; 3];
            for a in 0..grid.dim() {
                let m = grid.mode(ix[a]);
                jx[a] = (((m % big_n) + big_n) % big_n) as usize;
            }
            big.ravel(jx)
        })
        .collect();
    let lift = |f: &RealField| {
        let spec = transform(f);
        let mut coefficients = vec![Complex64::default(); big_len * f.components()];
        for c in 0..f.components() {
            for (idx, z) in spec.component(c).iter().enumerate() {
                coefficients[c * big_len + to_big[idx]] = *z;
            }
        }
        inverse_transform(&SpectralField::new(big, f.components(), coefficients))
    };
    let prod = lift(u).mul(&lift(v))?;
    let spec = transform(&prod);
    let mut coefficients = vec![Complex64::default(); len * u.components()];
    for c in 0..u.components() {
        for idx in 0..len {
            let ix = grid.unravel(idx);
            // The Nyquist slot keeps the symmetric average so the result stays real.
            let nyq = (0..grid.dim()).any(|a| grid.mode(ix[a]).abs() == n / 2);
            let z = spec.component(c)[to_big[idx]];
            coefficients[c * len + idx] = if nyq { Complex64::new(z.re, 0.0) } else { z };
        }
    }
    Ok(inverse_transform(&SpectralField::new(grid, u.components(), coefficients)))
}
