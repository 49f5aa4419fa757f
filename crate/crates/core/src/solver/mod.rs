//! Method-of-lines integration of quasilinear symmetric hyperbolic systems
//!
//! `A0(U;t) dU/dt + sum_a A^a(U;t) d_a U + B(U;t) U = G(U;t)`
//!
//! with pseudo-spectral derivatives, pointwise products dealiased by the 2/3
//! rule, and classical RK4 in time.

mod burgers;
mod checks;
mod frozen;

pub use burgers::{burgers_characteristics_oracle, shock_time, Advection, Burgers};
pub use checks::{check_symmetry_positivity, weighted_energy, SymmetryReport};
pub use frozen::{reference_from_trajectory, FrozenLinearSystem, TimeDependentField};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{MatrixField, RealField, SmallMatrix};
use crate::norms::hs_norm;
use crate::spectral;

/// Evaluation contract of one symmetric hyperbolic system.
///
/// Coefficients are evaluated on whole fields so that models may depend on
/// position (frozen linear systems) or invoke nonlocal solves (gravity).
pub trait SystemModel: Send + Sync {
    fn name(&self) -> &str;

    /// Number of unknowns `N` (at most 4).
    fn components(&self) -> usize;

    fn dim(&self) -> usize;

    /// `A0(U;t)`; `None` stands for the identity.
    fn a0(&self, _state: &RealField, _t: f64) -> Option<MatrixField> {
        None
    }

    /// `A^a(U;t)` for `axis = a - 1`.
    fn flux(&self, axis: usize, state: &RealField, t: f64) -> MatrixField;

    /// `B(U;t)`; `None` stands for zero.
    fn damping(&self, _state: &RealField, _t: f64) -> Option<MatrixField> {
        None
    }

    /// `G(U;t)`; `None` stands for zero.
    fn source(&self, _state: &RealField, _t: f64) -> Result<Option<RealField>> {
        Ok(None)
    }

    /// Whether the model declares `A^a(0) = 0`.
    fn flux_vanishes_at_zero(&self) -> bool {
        false
    }

    /// Model-specific state constraints; an `Err` aborts the run.
    fn admissible(&self, _state: &RealField, _t: f64) -> std::result::Result<(), String> {
        Ok(())
    }

    /// Extra scalars recorded with every diagnostic sample.
    fn diagnostics(&self, _state: &RealField, _t: f64) -> Vec<(String, f64)> {
        Vec::new()
    }
}

/// Solver knobs; defaults follow the documented experiment settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Record a sample every this many steps (the final time is always recorded).
    pub record_every: usize,
    pub cfl: f64,
    pub dealias: f64,
    /// Blow-up sentinel: abort when `|U|_inf` or `|dU|_inf` exceed this factor
    /// times their initial values.
    pub blowup_factor: f64,
    /// Smallest admissible Cholesky pivot of `A0`.
    pub pd_tolerance: f64,
    /// Order `m` of the `A0`-weighted energy recorded with each sample.
    pub energy_order: Option<usize>,
    /// Keep the sampled states in the trajectory.
    pub keep_states: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            record_every: 1,
            cfl: 0.4,
            dealias: spectral::TWO_THIRDS,
            blowup_factor: 1e3,
            pd_tolerance: 1e-12,
            energy_order: None,
            keep_states: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RunStatus {
    Completed,
    Aborted { t: f64, reason: String },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }

    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::Aborted { .. } => "aborted",
        }
    }
}

/// Per-sample diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub hs_norm: f64,
    pub energy: Option<f64>,
    /// Grid integral of every component.
    pub integrals: Vec<f64>,
    pub extra: Vec<(String, f64)>,
}

/// Time-stamped solver output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<RealField>,
    pub diagnostics: Vec<DiagnosticRecord>,
    pub status: RunStatus,
    /// Step actually used (`T / ceil(T / dt)`).
    pub dt: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> Option<&RealField> {
        self.states.last()
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}

/// Right-hand side `dU/dt = A0^{-1} [G - B U - sum_a A^a d_a U]`, dealiased.
/// Also returns the CFL wave-speed bound and `|dU|_inf`.
struct Rhs {
    value: RealField,
    speed: f64,
    grad_sup: f64,
}

fn evaluate_rhs(system: &dyn SystemModel, state: &RealField, t: f64, config: &SolverConfig) -> Result<Rhs> {
    let grid = *state.grid();
    let n = grid.len();
    let nc = state.components();
    let dim = grid.dim();

    let grads = spectral::gradient(state);
    let grad_sup = grads.iter().map(|g| g.max_abs()).fold(0.0, f64::max);

    let fluxes: Vec<MatrixField> = (0..dim).map(|a| system.flux(a, state, t)).collect();
    let a0 = system.a0(state, t);
    let damping = system.damping(state, t);
    let source = system.source(state, t)?;

    let mut out = RealField::zeros(grid, nc);
    let mut u = [0.0; 4];
    let mut du = [0.0; 4];
    let mut tmp = [0.0; 4];
    let mut r = [0.0; 4];
    let mut speed = 0.0f64;
    for p in 0..n {
        state.point(p, &mut u);
        for c in 0..nc {
            r[c] = source.as_ref().map_or(0.0, |g| g.component(c)[p]);
        }
        if let Some(b) = &damping {
            b.at(p).matvec(&u[..nc], &mut tmp[..nc]);
            for c in 0..nc {
                r[c] -= tmp[c];
            }
        }
        for (axis, fl) in fluxes.iter().enumerate() {
            grads[axis].point(p, &mut du);
            fl.at(p).matvec(&du[..nc], &mut tmp[..nc]);
            for c in 0..nc {
                r[c] -= tmp[c];
            }
        }
        match &a0 {
            None => {
                for fl in &fluxes {
                    speed = speed.max(fl.at(p).inf_norm());
                }
            }
            Some(a0f) => {
                let m = a0f.at(p);
                let (l, _) = m
                    .cholesky(config.pd_tolerance)
                    .map_err(|pivot| Error::NotPositiveDefinite { t, min_eigen: pivot })?;
                SmallMatrix::cholesky_solve(&l, &mut r[..nc]);
                for fl in &fluxes {
                    // ||A0^{-1} A^a||_inf bounds the characteristic speed.
                    let mut prod = SmallMatrix::zeros(nc);
                    for j in 0..nc {
                        let mut col = [0.0; 4];
                        for i in 0..nc {
                            col[i] = fl.at(p).a[i][j];
                        }
                        SmallMatrix::cholesky_solve(&l, &mut col[..nc]);
                        for i in 0..nc {
                            prod.a[i][j] = col[i];
                        }
                    }
                    speed = speed.max(prod.inf_norm());
                }
            }
        }
        for c in 0..nc {
            out.component_mut(c)[p] = r[c];
        }
    }
    let value = spectral::dealias_field(&out, config.dealias);
    Ok(Rhs { value, speed, grad_sup })
}

fn record(system: &dyn SystemModel, state: &RealField, t: f64, s_diag: f64, config: &SolverConfig) -> Result<DiagnosticRecord> {
    let energy = match config.energy_order {
        Some(m) => Some(weighted_energy(state, system, t, m)?),
        None => None,
    };
    Ok(DiagnosticRecord {
        t,
        hs_norm: hs_norm(state, s_diag),
        energy,
        integrals: state.integrals(),
        extra: system.diagnostics(state, t),
    })
}

/// Integrates the system from `u0` to `t_final` with classical RK4.
///
/// The step is shrunk to `T / ceil(T / dt)` so that the final time is hit
/// exactly. Sentinel aborts and model admissibility failures return the
/// partial trajectory flagged as [`RunStatus::Aborted`]; CFL violations, loss
/// of positive definiteness and NaNs are errors.
pub fn solve(
    system: &dyn SystemModel,
    u0: &RealField,
    t_final: f64,
    dt: f64,
    s_diag: f64,
    config: &SolverConfig,
) -> Result<Trajectory> {
    if u0.components() != system.components() || u0.grid().dim() != system.dim() {
        return Err(Error::GridMismatch(format!(
            "initial data has {} components in {} dimensions, model `{}` expects {} in {}",
            u0.components(),
            u0.grid().dim(),
            system.name(),
            system.components(),
            system.dim()
        )));
    }
    if system.components() > 4 {
        return Err(Error::InvalidParameter("at most 4 components are supported".into()));
    }
    if !(t_final >= 0.0 && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("need T >= 0 and dt > 0, got T = {t_final}, dt = {dt}")));
    }
    u0.check_finite("u0")?;
    let steps = if t_final == 0.0 { 0 } else { (t_final / dt - 1e-9).ceil().max(1.0) as usize };
    let h = if steps == 0 { dt } else { t_final / steps as f64 };
    let dx = u0.grid().min_spacing();
    let record_every = config.record_every.max(1);

    let mut u = spectral::dealias_field(u0, config.dealias);
    let u_sup0 = u.max_abs();
    let mut grad_sup0 = None;

    let mut traj = Trajectory {
        times: vec![0.0],
        states: if config.keep_states { vec![u.clone()] } else { Vec::new() },
        diagnostics: vec![record(system, &u, 0.0, s_diag, config)?],
        status: RunStatus::Completed,
        dt: h,
        steps,
    };
    if let Err(reason) = system.admissible(&u, 0.0) {
        traj.status = RunStatus::Aborted { t: 0.0, reason };
        return Ok(traj);
    }

    for step in 0..steps {
        let t = step as f64 * h;
        let k1 = evaluate_rhs(system, &u, t, config)?;
        if k1.speed > 0.0 {
            let limit = config.cfl * dx / k1.speed;
            if h > limit * (1.0 + 1e-12) {
                return Err(Error::CflViolation { t, dt: h, limit });
            }
        }
        let g0 = *grad_sup0.get_or_insert(k1.grad_sup);
        if config.blowup_factor.is_finite() {
            let blown_u = u_sup0 > 0.0 && u.max_abs() > config.blowup_factor * u_sup0;
            let blown_g = g0 > 0.0 && k1.grad_sup > config.blowup_factor * g0;
            if blown_u || blown_g {
                traj.status = RunStatus::Aborted { t, reason: "blow-up sentinel".into() };
                return Ok(traj);
            }
        }

        let mut stage = u.clone();
        stage.axpy(0.5 * h, &k1.value);
        let k2 = evaluate_rhs(system, &stage, t + 0.5 * h, config)?.value;
        let mut stage = u.clone();
        stage.axpy(0.5 * h, &k2);
        let k3 = evaluate_rhs(system, &stage, t + 0.5 * h, config)?.value;
        let mut stage = u.clone();
        stage.axpy(h, &k3);
        let k4 = evaluate_rhs(system, &stage, t + h, config)?.value;

        u.axpy(h / 6.0, &k1.value);
        u.axpy(h / 3.0, &k2);
        u.axpy(h / 3.0, &k3);
        u.axpy(h / 6.0, &k4);

        let t_next = (step + 1) as f64 * h;
        if u.values().iter().any(|v| v.is_nan()) {
            return Err(Error::NanDetected(t_next));
        }
        if let Err(reason) = system.admissible(&u, t_next) {
            traj.status = RunStatus::Aborted { t: t_next, reason };
            return Ok(traj);
        }
        if (step + 1) % record_every == 0 || step + 1 == steps {
            traj.times.push(t_next);
            traj.diagnostics.push(record(system, &u, t_next, s_diag, config)?);
            if config.keep_states {
                traj.states.push(u.clone());
            }
        }
    }
    if !config.keep_states {
        traj.states.push(u);
    }
    Ok(traj)
}
