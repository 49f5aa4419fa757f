use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentNorm, ModelId, Prepared};
use crate::error::{Error, Result};
use crate::solver::{RunStatus, Trajectory};

/// One perturbation amplitude of a flow-map experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowmapRow {
    pub n: usize,
    pub eps: f64,
    /// `||u0^n - u0||` in the configured norm.
    pub d0_norm: f64,
    /// `D_n = sup_t ||U^n(t) - U(t)||` over the common recorded times.
    pub sup_diff: f64,
    pub status: String,
    /// Last time reached by the perturbed run.
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowmapRecord {
    /// Full configuration echo; seeds of the random fields live inside.
    pub config: ExperimentConfig,
    pub model: String,
    pub config_hash: String,
    pub s: f64,
    pub base_status: RunStatus,
    pub rows: Vec<FlowmapRow>,
    /// Least-squares slope of `ln D_n` against `ln ||u0^n - u0||`.
    pub theta: Option<f64>,
    pub times: Vec<f64>,
    /// `||U^n(t) - U(t)||` at every recorded time, one series per row.
    pub series: Vec<Vec<f64>>,
}

impl FlowmapRecord {
    /// `D_n` is nonincreasing in `n` over the completed rows.
    pub fn monotone(&self) -> bool {
        let d: Vec<f64> = self.rows.iter().filter(|r| r.status == "completed").map(|r| r.sup_diff).collect();
        d.windows(2).all(|w| w[1] <= w[0])
    }

    /// `D_{n_max} / D_0`, when both are finite and `D_0 > 0`.
    pub fn decay_ratio(&self) -> Option<f64> {
        let (first, last) = (self.rows.first()?, self.rows.last()?);
        (first.sup_diff > 0.0).then(|| last.sup_diff / first.sup_diff)
    }
}

/// Slope of the least-squares line through `(ln x, ln y)` over strictly
/// positive finite pairs; `None` with fewer than two such pairs.
pub fn fit_exponent(pairs: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Differences of one perturbed run against the base, for several norms.
struct PerturbedRun {
    status: RunStatus,
    t_end: f64,
    d0: Vec<f64>,
    sup: Vec<f64>,
    /// Series in the first norm.
    series: Vec<f64>,
}

fn compare(prep: &Prepared, base: &Trajectory, eps: f64, norms: &[ExperimentNorm]) -> Result<PerturbedRun> {
    let u0 = prep.perturbed(eps);
    let diff0 = u0.sub(&prep.u0)?;
    let d0 = norms.iter().map(|nm| nm.eval(&diff0)).collect::<Result<Vec<_>>>()?;
    let traj = prep.solve(&u0)?;
    let common = traj.states.len().min(base.states.len());
    let mut sup = vec![0.0f64; norms.len()];
    let mut series = Vec::with_capacity(common);
    for k in 0..common {
        let diff = traj.states[k].sub(&base.states[k])?;
        for (i, nm) in norms.iter().enumerate() {
            let v = nm.eval(&diff)?;
            sup[i] = sup[i].max(v);
            if i == 0 {
                series.push(v);
            }
        }
    }
    Ok(PerturbedRun { status: traj.status.clone(), t_end: traj.final_time(), d0, sup, series })
}

fn base_run(prep: &Prepared) -> Result<Trajectory> {
    let base = prep.solve(&prep.u0)?;
    match &base.status {
        RunStatus::Completed => Ok(base),
        RunStatus::Aborted { t, reason } => Err(Error::Aborted(format!("base solve stopped at t = {t}: {reason}"))),
    }
}

fn perturbed_runs(prep: &Prepared, base: &Trajectory, eps: &[f64], norms: &[ExperimentNorm]) -> Result<Vec<PerturbedRun>> {
    eps.par_iter().map(|&e| compare(prep, base, e, norms)).collect()
}

/// Runs the base solution and one perturbed solution per amplitude
/// `eps_n = eps0 2^-n`, measuring `D_n` in the configured norm.
///
/// A base solve that aborts is an error. Aborted perturbed solves keep their
/// row (flagged, with `D_n` over the reached times) but are left out of the fit.
pub fn run_flowmap(cfg: &ExperimentConfig) -> Result<FlowmapRecord> {
    let prep = Prepared::new(cfg)?;
    let base = base_run(&prep)?;
    let eps = cfg.perturbation.amplitudes();
    let norms = [ExperimentNorm::from_config(&cfg.norm)];
    let runs = perturbed_runs(&prep, &base, &eps, &norms)?;
    let rows: Vec<FlowmapRow> = runs
        .iter()
        .zip(&eps)
        .enumerate()
        .map(|(n, (r, &e))| FlowmapRow {
            n,
            eps: e,
            d0_norm: r.d0[0],
            sup_diff: r.sup[0],
            status: r.status.label().to_string(),
            t_end: r.t_end,
        })
        .collect();
    let pairs: Vec<(f64, f64)> = rows.iter().filter(|r| r.status == "completed").map(|r| (r.d0_norm, r.sup_diff)).collect();
    Ok(FlowmapRecord {
        config: cfg.clone(),
        model: cfg.model.as_str().to_string(),
        config_hash: cfg.hash(),
        s: cfg.norm.s,
        base_status: base.status.clone(),
        theta: fit_exponent(&pairs),
        times: base.times.clone(),
        series: runs.into_iter().map(|r| r.series).collect(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderRow {
    pub s: f64,
    pub theta: Option<f64>,
    /// `(eps_n, ||u0^n - u0||_{H^s}, D_n)` over completed runs.
    pub samples: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub config: ExperimentConfig,
    pub model: String,
    pub config_hash: String,
    pub rows: Vec<HolderRow>,
}

/// Fits the Hölder exponent of the flow map in `H^s` for every `s` in
/// `orders`, reusing one set of solves. Restricted to the scalar models.
pub fn run_holder_probe(cfg: &ExperimentConfig, orders: &[f64]) -> Result<HolderReport> {
    if !matches!(cfg.model, ModelId::Burgers | ModelId::Advection) {
        return Err(Error::Config(format!("the Hölder probe supports burgers and advection, not {}", cfg.model.as_str())));
    }
    if orders.is_empty() {
        return Err(Error::Config("no Sobolev orders given".into()));
    }
    let prep = Prepared::new(cfg)?;
    let base = base_run(&prep)?;
    let eps = cfg.perturbation.amplitudes();
    let norms: Vec<ExperimentNorm> = orders.iter().map(|&s| ExperimentNorm::with_order(&cfg.norm, s)).collect();
    let runs = perturbed_runs(&prep, &base, &eps, &norms)?;
    let rows = orders
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let samples: Vec<(f64, f64, f64)> = runs
                .iter()
                .zip(&eps)
                .filter(|(r, _)| r.status.is_completed())
                .map(|(r, &e)| (e, r.d0[i], r.sup[i]))
                .collect();
            let pairs: Vec<(f64, f64)> = samples.iter().map(|&(_, d0, d)| (d0, d)).collect();
            HolderRow { s, theta: fit_exponent(&pairs), samples }
        })
        .collect();
    Ok(HolderReport { config: cfg.clone(), model: cfg.model.as_str().to_string(), config_hash: cfg.hash(), rows })
}
