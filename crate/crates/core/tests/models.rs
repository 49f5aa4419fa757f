use std::f64::consts::PI;
use std::sync::Arc;

use hyperflow::cosmology::{cosmo_system, BackgroundCurve, EosModel};
use hyperflow::makino::{
    density_from_makino, epm_system, makino_from_density, power_difference_quadrature, EpmDomain, EpmParams,
};
use hyperflow::norms::integer_norm;
use hyperflow::random::{low_pass_field, rng, LowPassSpec};
use hyperflow::solver::{check_symmetry_positivity, solve, weighted_energy, SolverConfig, SystemModel};
use hyperflow::{Error, Grid, RealField};
use rand::Rng;

fn torus(dim: usize, n: usize) -> Grid {
    Grid::periodic(dim, n, 2.0 * PI).unwrap()
}

#[test]
fn makino_arithmetic_and_roundtrip() {
    let p = EpmParams::new(1.0, 2.0).unwrap();
    let g = torus(1, 16);
    let one = RealField::scalar(g, |_| 1.0);
    let w = makino_from_density(&one, &p).unwrap();
    assert!(w.values().iter().all(|v| (v - 8f64.sqrt()).abs() < 1e-14));
    let back = density_from_makino(&w, &p).unwrap();
    assert!(back.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    let zero = RealField::zeros(g, 1);
    assert_eq!(makino_from_density(&zero, &p).unwrap().max_abs(), 0.0);
    assert_eq!(density_from_makino(&zero, &p).unwrap().max_abs(), 0.0);
    let neg = RealField::scalar(g, |x| x[0].sin());
    assert!(matches!(makino_from_density(&neg, &p), Err(Error::Negative { .. })));
    assert!(matches!(density_from_makino(&neg, &p), Err(Error::Negative { .. })));
}

#[test]
fn makino_roundtrip_random_positive() {
    let mut r = rng(11);
    let g = torus(1, 64);
    for &(k, gamma) in &[(1.0, 1.5), (1.0, 2.0), (2.0, 5.0 / 3.0), (0.3, 3.0)] {
        let p = EpmParams::new(k, gamma).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|_| r.random_range(1e-3..5.0)).collect();
        let rho = RealField::from_values(g, 1, vals).unwrap();
        let again = density_from_makino(&makino_from_density(&rho, &p).unwrap(), &p).unwrap();
        for (a, b) in again.values().iter().zip(rho.values()) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }
}

#[test]
fn power_difference_by_quadrature() {
    let mut r = rng(5);
    for gamma in [1.5, 2.0, 5.0 / 3.0, 1.2] {
        let beta = 2.0 / (gamma - 1.0);
        for _ in 0..20 {
            let w: f64 = r.random_range(0.0..3.0);
            let wh: f64 = r.random_range(0.0..3.0);
            let exact = w.powf(beta) - wh.powf(beta);
            let q = power_difference_quadrature(w, wh, beta);
            assert!((q - exact).abs() <= 1e-8 * exact.abs(), "beta {beta}: {q} vs {exact}");
        }
    }
}

#[test]
fn epm_vacuum_is_fixed() {
    let p = EpmParams::new(1.0, 2.0).unwrap();
    let sys = epm_system(p, EpmDomain::Torus, 3).unwrap();
    let u0 = RealField::zeros(torus(3, 8), 4);
    let traj = solve(&sys, &u0, 0.2, 0.05, 0.0, &SolverConfig::default()).unwrap();
    assert!(traj.status.is_completed());
    assert_eq!(traj.final_state().unwrap().max_abs(), 0.0);
    let rep = check_symmetry_positivity(&sys, &u0, 0.0);
    assert_eq!(rep.flux_at_zero, Some(0.0));
}

#[test]
fn epm_torus_conserves_mass() {
    let p = EpmParams::new(1.0, 2.0).unwrap();
    let sys = epm_system(p, EpmDomain::Torus, 3).unwrap();
    let g = torus(3, 16);
    let u0 = RealField::from_fn(g, 4, |x| {
        vec![
            1.0 + 0.1 * x[0].sin() * x[1].cos(),
            0.05 * x[2].cos(),
            0.05 * (x[0] + x[2]).sin(),
            0.0,
        ]
    });
    let traj = solve(&sys, &u0, 0.5, 0.02, 0.0, &SolverConfig::default()).unwrap();
    assert!(traj.status.is_completed());
    let mass = |k: usize| traj.diagnostics[k].extra.iter().find(|(n, _)| n == "mass").unwrap().1;
    let m0 = mass(0);
    for k in 0..traj.diagnostics.len() {
        assert!((mass(k) - m0).abs() < 1e-6 * m0.max(1.0), "{} vs {}", mass(k), m0);
    }
    let rep = check_symmetry_positivity(&sys, traj.final_state().unwrap(), 0.5);
    assert!(rep.flux_asymmetry.iter().all(|&a| a < 1e-13));
}

#[test]
fn epm_gravity_points_inward_for_gaussian() {
    let p = EpmParams::new(1.0, 2.0).unwrap();
    let sys = epm_system(p, EpmDomain::FreeSpace, 3).unwrap();
    let g = Grid::centered(3, 64, 16.0).unwrap();
    let mass = 1.0;
    let norm = mass / (2.0 * PI).powf(1.5);
    // rho = w^2 / 8 is a unit-width Gaussian of the given mass.
    let u0 = RealField::from_fn(g, 4, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        vec![(8.0 * norm).sqrt() * (-r2 / 4.0).exp(), 0.0, 0.0, 0.0]
    });
    let src = sys.source(&u0, 0.0).unwrap().unwrap();
    for idx in 0..g.len() {
        let x = g.position(idx);
        let r = g.radius(idx);
        if !(1.0..=5.0).contains(&r) {
            continue;
        }
        let dphi = mass * libm_erf(r / 2f64.sqrt()) / (r * r) - mass * (2.0 / PI).sqrt() * (-r * r / 2.0).exp() / r;
        for a in 0..3 {
            let expected = -dphi * x[a] / r;
            let got = src.component(1 + a)[idx];
            assert!((got - expected).abs() < 1e-2 * dphi, "r = {r}: {got} vs {expected}");
            assert!(got * x[a] <= 1e-12);
        }
    }
}

fn libm_erf(x: f64) -> f64 {
    statrs::function::erf::erf(x)
}

fn expanding() -> Arc<BackgroundCurve> {
    Arc::new(BackgroundCurve::new(1.0, 3.0, 1.0, 1e-3).unwrap())
}

#[test]
fn cosmo_zero_perturbation_is_stationary() {
    let sys = cosmo_system(EosModel::default(), expanding(), 3).unwrap();
    let u0 = RealField::zeros(torus(3, 8), 4);
    let traj = solve(&sys, &u0, 1.0, 0.02, 0.0, &SolverConfig::default()).unwrap();
    assert!(traj.status.is_completed());
    assert!(traj.final_state().unwrap().max_abs() < 1e-10);
    let rep = check_symmetry_positivity(&sys, &u0, 0.0);
    // rho_hat = 1 at t = 0, g' = 2, first eigenvalue 2.
    assert!((rep.a0_max_eigenvalue - 2.0).abs() < 1e-14);
    assert!((rep.a0_min_eigenvalue - 1.0).abs() < 1e-14);
    let later = check_symmetry_positivity(&sys, &u0, 0.5);
    let rho_hat = sys.background.at(0.5).rho_hat();
    assert!((later.a0_min_eigenvalue - (2.0 / rho_hat).min(1.0)).abs() < 1e-12);
}

fn random_cosmo_state(seed: u64, g: Grid, amp: f64) -> RealField {
    let spec = LowPassSpec { kmax: 3, amplitude: amp, ..LowPassSpec::default() };
    low_pass_field(&mut rng(seed), g, 4, &spec)
}

/// The damping entry `3 (R'/R) g'/(rho_hat + sigma)` divided by `A0_00` gives
/// `3 (R'/R) (rho_hat + sigma) sigma`, so `d/dt int sigma = -3 (R'/R) int sigma^2`
/// for zero-mean data: the mean drift is quadratic in the amplitude.
#[test]
fn cosmo_mean_drift_is_quadratic() {
    let sys = cosmo_system(EosModel::default(), expanding(), 3).unwrap();
    let g = torus(3, 16);
    let drift = |amp: f64| {
        let u0 = random_cosmo_state(3, g, amp);
        assert!(u0.integrals()[0].abs() < 1e-12);
        let traj = solve(&sys, &u0, 0.05, 0.005, 0.0, &SolverConfig::default()).unwrap();
        assert!(traj.status.is_completed());
        let s2 = u0.extract(0).l2_norm().powi(2);
        (traj.diagnostics.last().unwrap().integrals[0], s2)
    };
    let (d1, s2) = drift(0.02);
    let (d2, _) = drift(0.01);
    let ratio = d1 / d2;
    assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    assert!(d1 < 0.0 && d1.abs() < 0.45 * s2);
}

#[test]
fn cosmo_energy_sandwich() {
    let sys = cosmo_system(EosModel::default(), expanding(), 3).unwrap();
    let g = torus(3, 8);
    for seed in 0..20 {
        let u = random_cosmo_state(100 + seed, g, 0.2);
        let t = 0.05 * seed as f64;
        let rep = check_symmetry_positivity(&sys, &u, t);
        assert!(rep.flux_asymmetry.iter().all(|&a| a < 1e-13));
        assert!(rep.a0_asymmetry < 1e-13);
        for m in 0..3 {
            let e = weighted_energy(&u, &sys, t, m).unwrap();
            let h = integer_norm(&u, m).powi(2);
            assert!(e >= h / rep.constant * (1.0 - 1e-12) && e <= h * rep.constant * (1.0 + 1e-12));
        }
    }
}
