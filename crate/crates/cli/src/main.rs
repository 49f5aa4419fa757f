//! `hyperflow` command line tool.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hyperflow::cosmology::integrate_background;
use hyperflow::estimates::{run_estimate_suite, SuiteConfig};
use hyperflow::experiments::{
    build_system, run_energy_check, run_flowmap, run_holder_probe, with_pool, write_flowmap_csv, write_json,
    ExperimentConfig, ModelId,
};
use hyperflow::norms::{hs_norm, integer_norm, weighted_norm, DyadicPartition, NormSpec};
use hyperflow::solver::{solve, SolverConfig};

#[derive(Parser)]
#[command(name = "hyperflow", version, about = "Flow-map and Sobolev-estimate experiments for symmetric hyperbolic systems")]
struct Cli {
    /// Run independent solves one after another (bit-reproducible).
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the base problem of a config and write diagnostics.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Diagnostics CSV (t, hs_norm, energy, integrals, model scalars).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Norms of the base data (or perturbation direction) of a config.
    Norm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::Data)]
        field: Which,
        /// Override the order from the config.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Flow-map continuity experiment.
    Flowmap {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Hölder exponent of the flow map across Sobolev orders.
    Holder {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated orders.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0, 3.0])]
        orders: Vec<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Energy-inequality constants of the frozen linearization.
    EnergyCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Randomized sweep over the Sobolev estimate ratios.
    Estimates {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 20240901)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Integrate the background scale factor.
    CosmoBackground {
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long, default_value_t = 3.0)]
        rdot0: f64,
        #[arg(long, default_value_t = 1.0)]
        t_final: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Columns t, R, Rdot, rho_hat, energy.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the shipped default config of a model as TOML.
    DefaultConfig {
        #[arg(value_enum)]
        model: Model,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Data,
    Perturbation,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Burgers,
    Advection,
    EpmTorus,
    EpmCompact,
    Cosmo,
}

impl From<Model> for ModelId {
    fn from(m: Model) -> Self {
        match m {
            Model::Burgers => ModelId::Burgers,
            Model::Advection => ModelId::Advection,
            Model::EpmTorus => ModelId::EpmTorus,
            Model::EpmCompact => ModelId::EpmCompact,
            Model::Cosmo => ModelId::Cosmo,
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => write_json(value, p).with_context(|| format!("writing {}", p.display())),
        None => Ok(()),
    }
}

fn config_path(cli: Option<PathBuf>, config: &Option<String>) -> Option<PathBuf> {
    cli.or_else(|| config.as_ref().map(PathBuf::from))
}

fn cmd_solve(config: &Path, csv_path: Option<PathBuf>) -> Result<()> {
    let cfg = load(config)?;
    let system = build_system(&cfg)?;
    let u0 = cfg.data.sample(cfg.grid()?, cfg.components())?;
    let solver = SolverConfig { record_every: cfg.time.record_every.max(1), keep_states: false, ..SolverConfig::default() };
    let traj = solve(system.as_ref(), &u0, cfg.time.t_final, cfg.time.dt, cfg.norm.s, &solver)?;
    println!("model {} steps {} dt {:e} status {}", cfg.model.as_str(), traj.steps, traj.dt, traj.status.label());
    if let hyperflow::solver::RunStatus::Aborted { t, reason } = &traj.status {
        println!("aborted at t = {t}: {reason}");
    }
    if let Some(last) = traj.diagnostics.last() {
        println!("t = {} |U|_H^{} = {:e}", last.t, cfg.norm.s, last.hs_norm);
    }
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        let first = &traj.diagnostics[0];
        let mut header = vec!["t".to_string(), "hs_norm".to_string(), "energy".to_string()];
        header.extend((0..first.integrals.len()).map(|c| format!("integral_{c}")));
        header.extend(first.extra.iter().map(|(k, _)| k.clone()));
        w.write_record(&header)?;
        for d in &traj.diagnostics {
            let mut row = vec![format!("{:e}", d.t), format!("{:e}", d.hs_norm), d.energy.map(|e| format!("{e:e}")).unwrap_or_default()];
            row.extend(d.integrals.iter().map(|v| format!("{v:e}")));
            row.extend(d.extra.iter().map(|(_, v)| format!("{v:e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct NormReport {
    s: f64,
    l2: f64,
    hs: f64,
    integer: Option<f64>,
    weighted: Option<f64>,
}

fn cmd_norm(config: &Path, which: Which, s: Option<f64>) -> Result<()> {
    let cfg = load(config)?;
    let spec = match which {
        Which::Data => &cfg.data,
        Which::Perturbation => &cfg.perturbation.direction,
    };
    let f = spec.sample(cfg.grid()?, cfg.components())?;
    let s = s.unwrap_or(cfg.norm.s);
    let integer = (s >= 0.0 && s.fract() == 0.0).then(|| integer_norm(&f, s as usize));
    let weighted = if cfg.grid()?.is_periodic() {
        None
    } else {
        Some(weighted_norm(&f, &NormSpec::new(s, cfg.norm.delta), &DyadicPartition::new(cfg.norm.j_max))?)
    };
    let report = NormReport { s, l2: f.l2_norm(), hs: hs_norm(&f, s), integer, weighted };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_flowmap(config: &Path, csv_path: Option<PathBuf>, json: Option<PathBuf>, deterministic: bool) -> Result<()> {
    let cfg = load(config)?;
    let rec = with_pool(deterministic, || run_flowmap(&cfg))??;
    println!("model {} s {} config {}", rec.model, rec.s, rec.config_hash);
    println!("{:>3} {:>12} {:>12} {:>12}  status", "n", "eps", "d0_norm", "sup_diff");
    for r in &rec.rows {
        println!("{:>3} {:>12.4e} {:>12.4e} {:>12.4e}  {}", r.n, r.eps, r.d0_norm, r.sup_diff, r.status);
    }
    match rec.theta {
        Some(t) => println!("theta {t:.4}"),
        None => println!("theta undetermined"),
    }
    if let Some(ratio) = rec.decay_ratio() {
        println!("D_last/D_0 {ratio:.4e} monotone {}", rec.monotone());
    }
    if let Some(p) = config_path(csv_path, &cfg.output.csv) {
        write_flowmap_csv(&rec, &p).with_context(|| format!("writing {}", p.display()))?;
    }
    emit_json(&rec, config_path(json, &cfg.output.json).as_deref())
}

fn cmd_holder(config: &Path, orders: &[f64], json: Option<PathBuf>, deterministic: bool) -> Result<()> {
    let cfg = load(config)?;
    let rep = with_pool(deterministic, || run_holder_probe(&cfg, orders))??;
    println!("{:>6} {:>10}", "s", "theta");
    for row in &rep.rows {
        let theta = row.theta.map(|t| format!("{t:.4}")).unwrap_or_else(|| "-".into());
        println!("{:>6} {:>10}", row.s, theta);
    }
    emit_json(&rep, json.as_deref())
}

fn cmd_energy(config: &Path, json: Option<PathBuf>, deterministic: bool) -> Result<()> {
    let cfg = load(config)?;
    let rep = with_pool(deterministic, || run_energy_check(&cfg))??;
    println!("model {} reference {}", rep.model, rep.reference_status.label());
    println!("{:>6} {:>12} {:>12} {:>12}  stable", "s", "lemma", "C_min", "refined");
    for e in &rep.entries {
        println!("{:>6} {:>12} {:>12.4e} {:>12.4e}  {}", e.s, format!("{:?}", e.lemma), e.c_min, e.c_min_refined, e.stable);
    }
    emit_json(&rep, json.as_deref())
}

fn cmd_estimates(samples: usize, seed: u64, json: Option<PathBuf>, deterministic: bool) -> Result<()> {
    if samples == 0 {
        bail!("at least one sample is needed");
    }
    let cfg = SuiteConfig { samples, seed, parallel: !deterministic, ..SuiteConfig::default() };
    let rep = with_pool(deterministic, || run_estimate_suite(&cfg))??;
    println!("{:<26} {:>12} {:>12} {:>10}", "estimate", "max_ratio", "refined", "change");
    for e in &rep.entries {
        println!("{:<26} {:>12.4e} {:>12.4e} {:>10.3}", e.name, e.max_ratio, e.max_ratio_refined, e.relative_change);
    }
    println!("finite {} stable {}", rep.all_finite, rep.all_stable);
    emit_json(&rep, json.as_deref())
}

fn cmd_background(r0: f64, rdot0: f64, t_final: f64, dt: f64, csv_path: Option<PathBuf>) -> Result<()> {
    let states = integrate_background(r0, rdot0, t_final, dt)?;
    let (first, last) = (states[0], states[states.len() - 1]);
    println!("t {} R {:.10} Rdot {:.10} energy drift {:e}", last.t, last.r, last.rdot, (last.energy() - first.energy()).abs());
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["t", "R", "Rdot", "rho_hat", "energy"])?;
        for s in &states {
            w.write_record([s.t, s.r, s.rdot, s.rho_hat(), s.energy()].map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let det = cli.deterministic;
    match cli.command {
        Command::Solve { config, csv } => cmd_solve(&config, csv),
        Command::Norm { config, field, s } => cmd_norm(&config, field, s),
        Command::Flowmap { config, csv, json } => cmd_flowmap(&config, csv, json, det),
        Command::Holder { config, orders, json } => cmd_holder(&config, &orders, json, det),
        Command::EnergyCheck { config, json } => cmd_energy(&config, json, det),
        Command::Estimates { samples, seed, json } => cmd_estimates(samples, seed, json, det),
        Command::CosmoBackground { r0, rdot0, t_final, dt, csv } => cmd_background(r0, rdot0, t_final, dt, csv),
        Command::DefaultConfig { model } => {
            print!("{}", ExperimentConfig::default_for(model.into()).to_toml());
            Ok(())
        }
    }
}
