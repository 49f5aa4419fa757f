use std::sync::Arc;

use super::{SystemModel, Trajectory};
use crate::error::Result;
use crate::field::{MatrixField, RealField};

/// A field-valued function of time.
pub type TimeDependentField = Arc<dyn Fn(f64) -> RealField + Send + Sync>;

/// Linear system obtained by freezing the coefficients of `base` along a
/// prescribed reference path `W(t)`:
///
/// `A0(W) dU/dt + sum_a A^a(W) d_a U + B(W) U = F(t)`.
#[derive(Clone)]
pub struct FrozenLinearSystem {
    pub base: Arc<dyn SystemModel>,
    pub reference: TimeDependentField,
    pub forcing: Option<TimeDependentField>,
    pub keep_damping: bool,
}

impl FrozenLinearSystem {
    pub fn new(base: Arc<dyn SystemModel>, reference: TimeDependentField) -> Self {
        Self { base, reference, forcing: None, keep_damping: true }
    }

    pub fn with_forcing(mut self, forcing: TimeDependentField) -> Self {
        self.forcing = Some(forcing);
        self
    }

    /// `sup_x |d/dt A0(W(t))|` by a centred difference with step `h`.
    pub fn a0_rate(&self, t: f64, h: f64) -> f64 {
        let lo = (t - h).max(0.0);
        let hi = t + h;
        let (wl, wh) = ((self.reference)(lo), (self.reference)(hi));
        match (self.base.a0(&wl, lo), self.base.a0(&wh, hi)) {
            (Some(a), Some(b)) => {
                let n = wl.grid().len();
                let nc = self.base.components();
                let mut sup = 0.0f64;
                for p in 0..n {
                    let (ma, mb) = (a.at(p), b.at(p));
                    for i in 0..nc {
                        for j in 0..nc {
                            sup = sup.max((mb.a[i][j] - ma.a[i][j]).abs());
                        }
                    }
                }
                sup / (hi - lo)
            }
            _ => 0.0,
        }
    }
}

impl SystemModel for FrozenLinearSystem {
    fn name(&self) -> &str {
        "frozen-linear"
    }

    fn components(&self) -> usize {
        self.base.components()
    }

    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn a0(&self, _state: &RealField, t: f64) -> Option<MatrixField> {
        self.base.a0(&(self.reference)(t), t)
    }

    fn flux(&self, axis: usize, _state: &RealField, t: f64) -> MatrixField {
        self.base.flux(axis, &(self.reference)(t), t)
    }

    fn damping(&self, _state: &RealField, t: f64) -> Option<MatrixField> {
        if self.keep_damping {
            self.base.damping(&(self.reference)(t), t)
        } else {
            None
        }
    }

    fn source(&self, _state: &RealField, t: f64) -> Result<Option<RealField>> {
        Ok(self.forcing.as_ref().map(|f| f(t)))
    }
}

/// Piecewise-linear-in-time interpolation of the recorded states.
///
/// Panics at evaluation if the trajectory keeps no states.
pub fn reference_from_trajectory(traj: &Trajectory) -> TimeDependentField {
    let times = traj.times.clone();
    let states = traj.states.clone();
    Arc::new(move |t: f64| {
        let k = times.partition_point(|&s| s <= t);
        if k == 0 {
            return states[0].clone();
        }
        if k >= times.len() {
            return states[states.len() - 1].clone();
        }
        let (t0, t1) = (times[k - 1], times[k]);
        let w = (t - t0) / (t1 - t0);
        let mut out = states[k - 1].scaled(1.0 - w);
        out.axpy(w, &states[k]);
        out
    })
}
