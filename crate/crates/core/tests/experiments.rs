use hyperflow::experiments::*;
use hyperflow::solver::RunStatus;

fn burgers() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default_for(ModelId::Burgers);
    cfg.perturbation.n_max = 3;
    cfg.time.t_final = 0.5;
    cfg
}

#[test]
fn toml_roundtrip_preserves_config_and_hash() {
    for m in [ModelId::Burgers, ModelId::Advection, ModelId::EpmTorus, ModelId::EpmCompact, ModelId::Cosmo] {
        let cfg = ExperimentConfig::default_for(m);
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }
}

#[test]
fn hash_changes_with_config() {
    let a = burgers();
    let mut b = a.clone();
    b.data.seed += 1;
    assert_ne!(a.hash(), b.hash());
}

#[test]
fn minimal_toml_uses_defaults() {
    let text = r#"
model = "advection"
[grid]
dim = 1
points = 32
[norm]
s = 2.0
[data]
kind = "sine"
amplitude = 0.5
[perturbation]
kind = "cosine"
eps0 = 0.1
n_max = 2
[time]
t_final = 0.5
dt = 0.05
"#;
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    assert_eq!(cfg.params, ModelParams::default());
    assert!((cfg.grid.length - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(cfg.perturbation.amplitudes(), vec![0.1, 0.05, 0.025]);
}

#[test]
fn invalid_configs_rejected() {
    assert!(ExperimentConfig::from_toml("model = \"nope\"").is_err());
    let mut cfg = burgers();
    cfg.grid.points = 48;
    assert!(cfg.validate().is_err());
    let mut cfg = burgers();
    cfg.grid.dim = 2;
    assert!(cfg.validate().is_err());
    let mut cfg = burgers();
    cfg.perturbation.eps0 = -1.0;
    assert!(cfg.validate().is_err());
    let mut cfg = burgers();
    cfg.norm.weighted = true;
    assert!(cfg.validate().is_err());
}

#[test]
fn zero_amplitude_gives_zero_distances() {
    let mut cfg = burgers();
    cfg.perturbation.eps0 = 0.0;
    let rec = run_flowmap(&cfg).unwrap();
    assert!(rec.rows.iter().all(|r| r.sup_diff == 0.0 && r.d0_norm == 0.0));
    assert_eq!(rec.theta, None);
}

#[test]
fn advection_flow_map_is_an_isometry() {
    let cfg = ExperimentConfig::default_for(ModelId::Advection);
    let rec = run_flowmap(&cfg).unwrap();
    for r in &rec.rows {
        assert!((r.sup_diff - r.d0_norm).abs() <= 1e-10 * r.d0_norm, "{r:?}");
    }
    assert!((rec.theta.unwrap() - 1.0).abs() < 1e-10);
    assert!(rec.monotone());
}

#[test]
fn burgers_flow_map_is_lipschitz_before_shock() {
    let rec = run_flowmap(&burgers()).unwrap();
    assert_eq!(rec.base_status, RunStatus::Completed);
    assert!(rec.monotone());
    assert!((rec.theta.unwrap() - 1.0).abs() < 1e-2);
    assert_eq!(rec.series.len(), rec.rows.len());
    assert_eq!(rec.series[0].len(), rec.times.len());
}

#[test]
fn runs_are_deterministic_across_pools() {
    let cfg = burgers();
    let a = with_pool(true, || run_flowmap(&cfg)).unwrap().unwrap();
    let b = with_pool(false, || run_flowmap(&cfg)).unwrap().unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn csv_and_json_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let rec = run_flowmap(&burgers()).unwrap();
    let csv_path = dir.path().join("f.csv");
    write_flowmap_csv(&rec, &csv_path).unwrap();
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,eps,d0_norm,sup_diff,status"));
    assert_eq!(lines.count(), rec.rows.len());
    let json_path = dir.path().join("f.json");
    write_json(&rec, &json_path).unwrap();
    let back: FlowmapRecord = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(back, rec);
}

#[test]
fn holder_probe_fits_each_order() {
    let cfg = ExperimentConfig::default_for(ModelId::Advection);
    let rep = run_holder_probe(&cfg, &[0.0, 1.0, 2.0]).unwrap();
    assert_eq!(rep.rows.len(), 3);
    for row in &rep.rows {
        assert!((row.theta.unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(row.samples.len(), 7);
    }
    let torus = ExperimentConfig::default_for(ModelId::EpmTorus);
    assert!(run_holder_probe(&torus, &[1.0]).is_err());
}

#[test]
fn energy_check_reports_both_orders() {
    let rep = run_energy_check(&burgers()).unwrap();
    assert_eq!(rep.entries.len(), 2);
    assert_eq!(rep.entries[0].s, 3.0);
    assert_eq!(rep.entries[1].s, 2.0);
    assert!(rep.entries.iter().all(|e| e.finite && e.stable));
}

#[test]
fn refinement_stability_rule() {
    assert!(refinement_stable(0.0, 1e-12, 2.0));
    assert!(refinement_stable(1.0, 1.9, 2.0));
    assert!(!refinement_stable(1.0, 2.1, 2.0));
    assert!(!refinement_stable(f64::NAN, 1.0, 2.0));
}

#[test]
fn perturbed_data_follows_schedule() {
    let cfg = burgers();
    let rec = run_flowmap(&cfg).unwrap();
    for w in rec.rows.windows(2) {
        assert!((w[0].d0_norm / w[1].d0_norm - 2.0).abs() < 1e-12);
        assert!((w[0].eps / w[1].eps - 2.0).abs() < 1e-15);
    }
}

#[test]
fn burgers_sequence_strictly_decreasing_and_fit_consistent() {
    let cfg = ExperimentConfig::default_for(ModelId::Burgers);
    let rec = run_flowmap(&cfg).unwrap();
    for w in rec.rows.windows(2) {
        assert!(w[1].sup_diff < w[0].sup_diff);
    }
    let theta = rec.theta.unwrap();
    let last = rec.rows.last().unwrap();
    assert!(last.sup_diff < 10.0 * last.eps.powf(theta));
}

#[test]
fn cosmo_fixed_point_base_measures_perturbation_itself() {
    let mut cfg = ExperimentConfig::default_for(ModelId::Cosmo);
    cfg.grid.dim = 1;
    cfg.grid.points = 32;
    cfg.data = DataSpec::new(DataKind::Zero, 0.0);
    cfg.perturbation.n_max = 2;
    let rec = run_flowmap(&cfg).unwrap();
    let base_sup = rec.series.iter().map(|s| s.iter().cloned().fold(0.0, f64::max)).collect::<Vec<_>>();
    for (r, sup) in rec.rows.iter().zip(base_sup) {
        assert!(r.sup_diff > 0.0);
        assert_eq!(r.sup_diff, sup);
    }
}

#[test]
fn aborted_base_is_an_error() {
    // One-dimensional gravity on a periodic box has a jump at the boundary;
    // the resulting undershoot drives the vacuum below tolerance.
    let mut cfg = ExperimentConfig::default_for(ModelId::EpmCompact);
    cfg.grid.dim = 1;
    cfg.grid.points = 256;
    cfg.time.t_final = 0.5;
    cfg.time.dt = 0.01;
    let err = run_flowmap(&cfg).unwrap_err();
    assert!(matches!(err, hyperflow::Error::Aborted(_)), "{err}");
}

#[test]
fn burgers_l2_holder_exponent_near_one() {
    let rep = run_holder_probe(&burgers(), &[0.0]).unwrap();
    assert!((rep.rows[0].theta.unwrap() - 1.0).abs() < 0.1);
}

#[test]
fn static_advection_has_zero_energy_constant() {
    let mut cfg = ExperimentConfig::default_for(ModelId::Advection);
    cfg.params.speed = 0.0;
    let rep = run_energy_check(&cfg).unwrap();
    assert!(rep.entries.iter().all(|e| e.c_min == 0.0 && e.c_min_refined == 0.0));
    cfg.params.speed = 1.0;
    let rep = run_energy_check(&cfg).unwrap();
    assert!(rep.entries.iter().all(|e| e.c_min == 0.0 && e.stable));
}

#[test]
fn empty_record_gives_header_only_csv() {
    let mut rec = run_flowmap(&burgers()).unwrap();
    rec.rows.clear();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    write_flowmap_csv(&rec, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "n,eps,d0_norm,sup_diff,status\n");
}

#[test]
fn json_echo_reproduces_config_hash() {
    let rec = run_flowmap(&burgers()).unwrap();
    let back: FlowmapRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!(back.config.hash(), rec.config_hash);
}

#[test]
fn equal_seeds_give_identical_csv() {
    let cfg = ExperimentConfig::default_for(ModelId::Advection);
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_flowmap_csv(&run_flowmap(&cfg).unwrap(), &a).unwrap();
    write_flowmap_csv(&run_flowmap(&cfg).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
