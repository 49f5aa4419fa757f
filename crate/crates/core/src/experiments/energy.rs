use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ModelId, Prepared};
use crate::error::Result;
use crate::estimates::{energy_inequality_margin, Lemma};
use crate::solver::{reference_from_trajectory, FrozenLinearSystem, RunStatus, SolverConfig};

/// Ratio within which `C_min` must agree between a grid and its refinement.
pub const REFINEMENT_FACTOR: f64 = 2.0;

/// Values of `C_min` below this are treated as zero.
const C_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheckEntry {
    /// Order `s` passed to the margin; the inequality controls `H^{s-1}`.
    pub s: f64,
    pub lemma: Lemma,
    pub c_min: f64,
    pub c_min_refined: f64,
    pub finite: bool,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheckReport {
    pub config: ExperimentConfig,
    pub model: String,
    pub config_hash: String,
    pub points: usize,
    pub reference_status: RunStatus,
    pub entries: Vec<EnergyCheckEntry>,
}

/// Within `factor` of each other, or both negligible.
pub fn refinement_stable(a: f64, b: f64, factor: f64) -> bool {
    if !(a.is_finite() && b.is_finite()) {
        return false;
    }
    if a <= C_FLOOR && b <= C_FLOOR {
        return true;
    }
    a <= factor * b && b <= factor * a
}

/// Freezes the model along its own base solution, solves the linear system
/// from the perturbation direction and returns `C_min` at `s` and `s - 1`.
fn margins(cfg: &ExperimentConfig, prep: &Prepared) -> Result<(RunStatus, Vec<(f64, Lemma, f64)>)> {
    let every = SolverConfig { record_every: 1, ..prep.solver };
    let reference = crate::solver::solve(prep.system.as_ref(), &prep.u0, prep.t_final, prep.dt, prep.s, &every)?;
    let mut frozen = FrozenLinearSystem::new(prep.system.clone(), reference_from_trajectory(&reference));
    // The weighted lemma is stated without the zero-order term.
    frozen.keep_damping = cfg.model != ModelId::Cosmo;
    let traj = crate::solver::solve(&frozen, &prep.direction, reference.final_time(), prep.dt, prep.s, &every)?;
    let mut out = Vec::new();
    for s in [cfg.norm.s, cfg.norm.s - 1.0] {
        let m = energy_inequality_margin(&traj, &frozen, s)?;
        out.push((s, m.lemma, m.c_min));
    }
    Ok((reference.status, out))
}

/// `C_min` of the energy inequality at `s` and `s - 1`, on the configured
/// grid and its refinement.
pub fn run_energy_check(cfg: &ExperimentConfig) -> Result<EnergyCheckReport> {
    let prep = Prepared::new(cfg)?;
    let fine = Prepared::on_grid(cfg, prep.grid.refined())?;
    let (coarse, refined) = rayon::join(|| margins(cfg, &prep), || margins(cfg, &fine));
    let (status, coarse) = coarse?;
    let (_, refined) = refined?;
    let entries = coarse
        .iter()
        .zip(&refined)
        .map(|(&(s, lemma, c), &(_, _, r))| EnergyCheckEntry {
            s,
            lemma,
            c_min: c,
            c_min_refined: r,
            finite: c.is_finite() && r.is_finite(),
            stable: refinement_stable(c, r, REFINEMENT_FACTOR),
        })
        .collect();
    Ok(EnergyCheckReport {
        config: cfg.clone(),
        model: cfg.model.as_str().to_string(),
        config_hash: cfg.hash(),
        points: cfg.grid.points,
        reference_status: status,
        entries,
    })
}
