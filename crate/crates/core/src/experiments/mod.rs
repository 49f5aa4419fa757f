//! Reproducible experiment runners driven by [`ExperimentConfig`].
//!
//! All runs are deterministic for a fixed configuration. Independent solves
//! are spread over a rayon pool whose size is read from `HYPERFLOW_THREADS`;
//! the deterministic mode runs them on one thread.

mod config;
mod emit;
mod energy;
mod flowmap;

pub use config::{
    DataKind, DataSpec, ExperimentConfig, GridSpec, ModelId, ModelParams, NormConfig, OutputSpec, PerturbationSpec,
    TimeSpec,
};
pub use emit::{write_flowmap_csv, write_json};
pub use energy::{refinement_stable, run_energy_check, EnergyCheckEntry, EnergyCheckReport, REFINEMENT_FACTOR};
pub use flowmap::{fit_exponent, run_flowmap, run_holder_probe, FlowmapRecord, FlowmapRow, HolderReport, HolderRow};

use std::sync::Arc;

use crate::cosmology::{cosmo_system, BackgroundCurve, EosModel};
use crate::error::{Error, Result};
use crate::field::RealField;
use crate::grid::Grid;
use crate::makino::{epm_system, EpmDomain, EpmParams};
use crate::norms::{hs_norm, weighted_norm, DyadicPartition, NormSpec};
use crate::solver::{solve, Advection, Burgers, SolverConfig, SystemModel, Trajectory};

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "HYPERFLOW_THREADS";

/// Runs `f` inside a rayon pool sized by `HYPERFLOW_THREADS` (all cores when
/// unset), or on a single worker when `deterministic` is set.
pub fn with_pool<T: Send>(deterministic: bool, f: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = if deterministic {
        1
    } else {
        match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?,
            Err(_) => 0,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}

/// Builds the model named in the configuration.
pub fn build_system(cfg: &ExperimentConfig) -> Result<Arc<dyn SystemModel>> {
    let dim = cfg.grid.dim;
    let p = &cfg.params;
    Ok(match cfg.model {
        ModelId::Burgers => Arc::new(Burgers),
        ModelId::Advection => Arc::new(Advection::new(&vec![p.speed; dim], 1)),
        ModelId::EpmTorus => Arc::new(epm_system(EpmParams::new(p.k, p.gamma)?, EpmDomain::Torus, dim)?),
        ModelId::EpmCompact => Arc::new(epm_system(EpmParams::new(p.k, p.gamma)?, EpmDomain::FreeSpace, dim)?),
        ModelId::Cosmo => {
            let bg_dt = (cfg.time.dt / 4.0).min(1e-3);
            let bg = BackgroundCurve::new(p.r0, p.rdot0, cfg.time.t_final, bg_dt)?;
            Arc::new(cosmo_system(EosModel { k: p.k, gamma: p.gamma }, Arc::new(bg), dim)?)
        }
    })
}

/// Norm in which flow-map differences are measured.
#[derive(Debug, Clone)]
pub enum ExperimentNorm {
    Sobolev(f64),
    Weighted(NormSpec, DyadicPartition),
}

impl ExperimentNorm {
    pub fn from_config(norm: &NormConfig) -> Self {
        Self::with_order(norm, norm.s)
    }

    pub fn with_order(norm: &NormConfig, s: f64) -> Self {
        if norm.weighted {
            ExperimentNorm::Weighted(NormSpec::new(s, norm.delta), DyadicPartition::new(norm.j_max))
        } else {
            ExperimentNorm::Sobolev(s)
        }
    }

    pub fn eval(&self, f: &RealField) -> Result<f64> {
        match self {
            ExperimentNorm::Sobolev(s) => Ok(hs_norm(f, *s)),
            ExperimentNorm::Weighted(spec, partition) => weighted_norm(f, spec, partition),
        }
    }
}

/// Model, grid, base data and perturbation direction of one configuration.
pub(crate) struct Prepared {
    pub system: Arc<dyn SystemModel>,
    pub grid: Grid,
    pub u0: RealField,
    pub direction: RealField,
    pub solver: SolverConfig,
    pub t_final: f64,
    pub dt: f64,
    pub s: f64,
}

impl Prepared {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        Self::on_grid(cfg, cfg.grid()?)
    }

    pub fn on_grid(cfg: &ExperimentConfig, grid: Grid) -> Result<Self> {
        let nc = cfg.components();
        let system = build_system(cfg)?;
        let u0 = cfg.data.sample(grid, nc)?;
        let direction = cfg.perturbation.direction.sample(grid, nc)?;
        let solver = SolverConfig { record_every: cfg.time.record_every.max(1), ..SolverConfig::default() };
        Ok(Self { system, grid, u0, direction, solver, t_final: cfg.time.t_final, dt: cfg.time.dt, s: cfg.norm.s })
    }

    pub fn solve(&self, u0: &RealField) -> Result<Trajectory> {
        solve(self.system.as_ref(), u0, self.t_final, self.dt, self.s, &self.solver)
    }

    pub fn perturbed(&self, eps: f64) -> RealField {
        let mut u = self.u0.clone();
        u.axpy(eps, &self.direction);
        u
    }
}
