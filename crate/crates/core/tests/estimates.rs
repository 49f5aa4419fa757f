use std::f64::consts::PI;
use std::sync::Arc;

use hyperflow::estimates::*;
use hyperflow::norms::DyadicPartition;
use hyperflow::random::{low_pass_field, rng, LowPassSpec};
use hyperflow::solver::{solve, Advection, Burgers, FrozenLinearSystem, SolverConfig};
use hyperflow::spectral::padded_product;
use hyperflow::{Error, Grid, RealField};

fn torus(n: usize) -> Grid {
    Grid::periodic(1, n, 2.0 * PI).unwrap()
}

fn field(seed: u64, g: Grid) -> RealField {
    low_pass_field(&mut rng(seed), g, 1, &LowPassSpec { amplitude: 0.0, zero_mean: false, ..LowPassSpec::default() })
}

#[test]
fn kato_ponce_trivial_cases_and_scaling() {
    let g = torus(64);
    let f = field(1, g);
    let c = RealField::scalar(g, |_| 2.5);
    assert!(kato_ponce_ratio(3.0, &c, &f, 0).unwrap() < 1e-10);
    assert_eq!(kato_ponce_ratio(3.0, &f, &RealField::zeros(g, 1), 0).unwrap(), 0.0);
    let h = field(2, g);
    let r = kato_ponce_ratio(3.0, &f, &h, 0).unwrap();
    let r2 = kato_ponce_ratio(3.0, &f.scaled(7.0), &h.scaled(0.3), 0).unwrap();
    assert!(r.is_finite() && r > 0.0);
    assert!((r - r2).abs() < 1e-10 * r);
}

#[test]
fn multiplication_single_mode_closed_form() {
    let g = torus(32);
    let u = RealField::scalar(g, |x| x[0].sin());
    let (s, s1, s2) = (1.5, 2.0, 2.0);
    let r = multiplication_ratio(&u, &u, s, s1, s2, None).unwrap();
    // sin^2 = 1/2 - cos(2x)/2
    let num = (2.0 * PI * 0.25 + PI * 0.25 * 5f64.powf(s)).sqrt();
    let den = PI * 2f64.powf(s1);
    assert!((r - num / den).abs() < 1e-8);
    assert_eq!(multiplication_ratio(&u, &RealField::zeros(g, 1), s, s1, s2, None).unwrap(), 0.0);
    let v = field(4, g);
    let a = multiplication_ratio(&u, &v, 1.0, 1.0, 1.0, None).unwrap();
    let b = multiplication_ratio(&u.scaled(3.0), &v.scaled(0.1), 1.0, 1.0, 1.0, None).unwrap();
    assert!((a - b).abs() < 1e-10 * a);
}

#[test]
fn constraints_are_named() {
    let g = torus(32);
    let u = field(3, g);
    match multiplication_ratio(&u, &u, 2.0, 1.0, 3.0, None) {
        Err(Error::ConstraintViolated(msg)) => assert!(msg.contains("min")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(power_estimate_ratio(&u.map(f64::abs), 2.0, 3.0, None), Err(Error::ConstraintViolated(_))));
    assert!(matches!(power_estimate_ratio(&u, 2.0, 1.0, None), Err(Error::Negative { .. })));
}

#[test]
fn power_ratio_trivial_and_dual_path() {
    let g = torus(64);
    let u = field(5, g).map(|v| v.abs() + 0.1);
    let smooth = field(6, g).map(|v| v + 5.0);
    assert_eq!(power_estimate_ratio(&smooth, 1.0, 1.0, None).unwrap(), 1.0);
    let pointwise = smooth.map(|v| v * v);
    let spectral = padded_product(&smooth, &smooth).unwrap();
    for (a, b) in pointwise.values().iter().zip(spectral.values()) {
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }
    assert!(power_estimate_ratio(&u, 4.0, 2.0, None).unwrap().is_finite());
}

#[test]
fn difference_ratio_cases() {
    let g = torus(64);
    let u = field(7, g);
    let v = field(8, g);
    assert_eq!(difference_estimate_ratio(|x| x * x * x, &u, &u, 2.0).unwrap(), 0.0);
    // Linear map: ratio = |a| / (1 + ||u|| + ||v||) exactly.
    let r = difference_estimate_ratio(|x| 3.0 * x, &u, &v, 2.0).unwrap();
    let norm = |f: &RealField| hyperflow::norms::hs_norm(f, 2.0);
    assert!((r - 3.0 / (1.0 + norm(&u) + norm(&v))).abs() < 1e-12);
}

#[test]
fn gronwall_cases() {
    let t: Vec<f64> = (0..=1000).map(|k| k as f64 * 1e-3).collect();
    let zero = vec![0.0; t.len()];
    let y: Vec<f64> = t.iter().map(|s| 2.0 - s).collect();
    let rep = gronwall_check(&t, &y, &zero, &zero).unwrap();
    assert!(rep.holds && rep.premise);
    let y: Vec<f64> = t.iter().map(|s| s.exp()).collect();
    let one = vec![1.0; t.len()];
    let rep = gronwall_check(&t, &y, &one, &zero).unwrap();
    assert!(rep.holds && rep.margin.abs() < 1e-8);
    let mut r = rng(9);
    for _ in 0..20 {
        let a0 = rand::Rng::random_range(&mut r, 0.0..2.0);
        let b0 = rand::Rng::random_range(&mut r, 0.0..1.0);
        // y' = a0 y + b0 - 0.5 sin^2 satisfies the premise.
        let a = vec![a0; t.len()];
        let b = vec![b0; t.len()];
        let mut y = vec![1.0; t.len()];
        for k in 1..t.len() {
            let h = t[k] - t[k - 1];
            let s = t[k - 1];
            y[k] = y[k - 1] + h * (a0 * y[k - 1] + b0 - 0.5 * (5.0 * s).sin().powi(2));
        }
        let rep = gronwall_check(&t, &y, &a, &b).unwrap();
        assert!(rep.holds && rep.margin >= -1e-8);
    }
}

fn frozen_advection(g: Grid) -> (FrozenLinearSystem, RealField) {
    let reference = Arc::new(move |_t: f64| RealField::zeros(g, 1));
    let sys = FrozenLinearSystem::new(Arc::new(Advection::new(&[0.0], 1)), reference);
    (sys, RealField::scalar(g, |x| x[0].sin() + 0.3 * (3.0 * x[0]).cos()))
}

#[test]
fn margin_zero_for_trivial_and_advection() {
    let g = torus(32);
    let (frozen, u0) = frozen_advection(g);
    let traj = solve(&frozen, &u0, 1.0, 0.05, 0.0, &SolverConfig::default()).unwrap();
    let m = energy_inequality_margin(&traj, &frozen, 3.0).unwrap();
    assert_eq!(m.c_min, 0.0);
    assert_eq!(m.lemma, Lemma::Identity);

    let reference = Arc::new(move |_t: f64| RealField::zeros(g, 1));
    let adv = FrozenLinearSystem::new(Arc::new(Advection::new(&[1.3], 1)), reference);
    let traj = solve(&adv, &u0, 1.0, 0.02, 0.0, &SolverConfig::default()).unwrap();
    let m = energy_inequality_margin(&traj, &adv, 3.0).unwrap();
    assert_eq!(m.c_min, 0.0);
}

fn linearized_burgers_c(n: usize) -> f64 {
    let g = torus(n);
    let w0 = RealField::scalar(g, |x| 0.3 * x[0].sin() + 0.1 * (2.0 * x[0]).cos());
    let reference = solve(&Burgers, &w0, 1.0, 0.01, 0.0, &SolverConfig::default()).unwrap();
    let frozen = FrozenLinearSystem::new(Arc::new(Burgers), hyperflow::solver::reference_from_trajectory(&reference));
    let u0 = RealField::scalar(g, |x| (2.0 * x[0]).sin() + 0.5 * x[0].cos());
    let traj = solve(&frozen, &u0, 1.0, 0.01, 0.0, &SolverConfig::default()).unwrap();
    let m = energy_inequality_margin(&traj, &frozen, 3.0).unwrap();
    // The feasible constants form [C_min, inf).
    assert!(m.holds_with(m.c_min) && m.holds_with(2.0 * m.c_min + 1.0));
    if m.c_min > 0.0 {
        assert!(!m.holds_with(0.9 * m.c_min));
    }
    m.c_min
}

#[test]
fn margin_finite_and_stable_for_linearized_burgers() {
    let a = linearized_burgers_c(64);
    let b = linearized_burgers_c(128);
    assert!(a.is_finite() && b.is_finite());
    assert!(b <= 2.0 * a && a <= 2.0 * b, "{a} vs {b}");
}

#[test]
fn suite_small_run_reports_every_estimate() {
    let config = SuiteConfig { samples: 5, ..SuiteConfig::default() };
    let rep = run_estimate_suite(&config).unwrap();
    assert_eq!(rep.entries.len(), 8);
    assert!(rep.all_finite);
    let json = rep.to_json();
    let back: SuiteReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rep);
    let _ = DyadicPartition::default();
}
