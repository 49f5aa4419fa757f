use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::*;
use crate::grid::Grid;
use crate::random::{self, low_pass_field, Bump, LowPassSpec};

/// Sampling set-up of the estimate suite. All fields are one-dimensional:
/// periodic fields live on `[0, 2 pi)`, compact bumps on a centered box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    /// Coarse points for periodic fields (refined run uses twice as many).
    pub periodic_points: usize,
    /// Coarse points for compactly supported fields.
    pub compact_points: usize,
    pub compact_length: f64,
    pub j_max: usize,
    pub parallel: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 20240901,
            periodic_points: 64,
            compact_points: 256,
            compact_length: 16.0,
            j_max: 3,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateEntry {
    pub name: String,
    pub samples: usize,
    pub max_ratio: f64,
    pub max_ratio_refined: f64,
    /// `|refined - coarse| / coarse`.
    pub relative_change: f64,
    pub finite: bool,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub entries: Vec<EstimateEntry>,
    pub all_finite: bool,
    pub all_stable: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Relative max-ratio change tolerated under grid doubling.
pub const STABILITY_TOLERANCE: f64 = 0.25;

struct Ctx {
    periodic: Grid,
    compact: Grid,
    partition: DyadicPartition,
}

fn raw_spec() -> LowPassSpec {
    LowPassSpec { kmax: 6, decay: 2.0, amplitude: 0.0, zero_mean: false }
}

fn periodic_pair(ctx: &Ctx, seed: u64) -> (RealField, RealField) {
    let mut r = random::rng(seed);
    let f = low_pass_field(&mut r, ctx.periodic, 1, &raw_spec());
    let g = low_pass_field(&mut r, ctx.periodic, 1, &raw_spec());
    (f, g)
}

fn bumps(ctx: &Ctx, seed: u64, count: usize) -> Vec<RealField> {
    let mut r = random::rng(seed);
    (0..count)
        .map(|_| {
            let distance = 2.0 * rand::Rng::random::<f64>(&mut r);
            Bump::random(&mut r, 1, distance, 0.5, 1.0).sample(ctx.compact)
        })
        .collect()
}

/// Nonnegative bump of radius in `[2, 2.5]` centred within `0.5` of the torus midpoint.
fn periodic_bump(ctx: &Ctx, seed: u64) -> RealField {
    let mut r = random::rng(seed);
    let shift = rand::Rng::random_range(&mut r, -0.5..0.5);
    let radius = rand::Rng::random_range(&mut r, 2.0..2.5);
    let amplitude = rand::Rng::random_range(&mut r, 0.5..1.5);
    let b = Bump { center: [PI + shift, 0.0, 0.0], radius, amplitude };
    RealField::scalar(ctx.periodic, |x| b.eval(x))
}

type Estimate = fn(&Ctx, u64) -> Result<f64>;

fn estimates() -> Vec<(&'static str, Estimate)> {
    vec![
        ("kato_ponce", |c, s| {
            let (f, g) = periodic_pair(c, s);
            kato_ponce_ratio(3.0, &f, &g, 0)
        }),
        ("multiplication", |c, s| {
            let (u, v) = periodic_pair(c, s);
            multiplication_ratio(&u, &v, 1.0, 1.0, 1.0, None)
        }),
        ("multiplication_weighted", |c, s| {
            let b = bumps(c, s, 2);
            let w = WeightedIndices { delta: 0.0, delta1: 0.0, delta2: 0.0, partition: c.partition };
            multiplication_ratio(&b[0], &b[1], 1.0, 1.0, 1.0, Some(w))
        }),
        ("multiplication_improved", |c, s| {
            let b = bumps(c, s, 3);
            improved_multiplication_ratio(&b, 1.0, &[0.0, 0.0, 0.0], 0.0, &c.partition)
        }),
        ("power", |c, s| power_estimate_ratio(&periodic_bump(c, s), 4.0, 3.0, None)),
        ("power_weighted", |c, s| power_estimate_ratio(&bumps(c, s, 1)[0], 4.0, 1.0, Some((0.0, c.partition)))),
        ("power_nonlinear", |c, s| nonlinear_power_ratio(&bumps(c, s, 1)[0], 3, 1.0, 0.5, &c.partition)),
        ("difference", |c, s| {
            let (u, v) = periodic_pair(c, s);
            difference_estimate_ratio(|x| x * x * x, &u, &v, 2.0)
        }),
    ]
}

fn max_ratio(ctx: &Ctx, f: Estimate, config: &SuiteConfig, salt: u64) -> Result<f64> {
    let seeds: Vec<u64> = (0..config.samples as u64).map(|i| config.seed ^ (salt << 32) ^ i).collect();
    let ratios: Vec<Result<f64>> = if config.parallel {
        seeds.par_iter().map(|&s| f(ctx, s)).collect()
    } else {
        seeds.iter().map(|&s| f(ctx, s)).collect()
    };
    let mut worst = 0.0f64;
    for r in ratios {
        let r = r?;
        if !r.is_finite() {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Runs every ratio estimate on `samples` seeded inputs at two resolutions.
pub fn run_estimate_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let coarse = Ctx {
        periodic: Grid::periodic(1, config.periodic_points, 2.0 * PI)?,
        compact: Grid::centered(1, config.compact_points, config.compact_length)?,
        partition: DyadicPartition::new(config.j_max),
    };
    let fine = Ctx { periodic: coarse.periodic.refined(), compact: coarse.compact.refined(), partition: coarse.partition };
    let mut entries = Vec::new();
    for (salt, (name, f)) in estimates().into_iter().enumerate() {
        let a = max_ratio(&coarse, f, config, salt as u64)?;
        let b = max_ratio(&fine, f, config, salt as u64)?;
        let finite = a.is_finite() && b.is_finite();
        let change = if a > 0.0 { (b - a).abs() / a } else if b == 0.0 { 0.0 } else { f64::INFINITY };
        entries.push(EstimateEntry {
            name: name.to_string(),
            samples: config.samples,
            max_ratio: a,
            max_ratio_refined: b,
            relative_change: change,
            finite,
            stable: finite && change < STABILITY_TOLERANCE,
        });
    }
    let all_finite = entries.iter().all(|e| e.finite);
    let all_stable = entries.iter().all(|e| e.stable);
    Ok(SuiteReport { config: *config, entries, all_finite, all_stable })
}
