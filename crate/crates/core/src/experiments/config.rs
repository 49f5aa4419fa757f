//! Experiment configuration: one TOML file with a flat section per concern.
//!
//! ```toml
//! model = "burgers"            # burgers | advection | epm_torus | epm_compact | cosmo
//!
//! [grid]
//! dim = 1
//! points = 64
//! length = 6.283185307179586
//!
//! [norm]
//! s = 3.0
//! weighted = false             # dyadic H_{s,delta} norm (epm_compact only)
//! delta = 0.0
//! j_max = 6
//!
//! [data]                        # base initial data u0
//! kind = "sine"                # zero | sine | cosine | low_pass | gaussian
//! amplitude = 0.1
//!
//! [perturbation]                # direction v and amplitudes eps_n = eps0 2^-n
//! kind = "cosine"
//! amplitude = 1.0
//! eps0 = 0.01
//! n_max = 6
//!
//! [time]
//! t_final = 1.0
//! dt = 0.01
//! record_every = 1
//!
//! [params]
//! gamma = 2.0
//! ```

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::random::{self, Bump, LowPassSpec};
use crate::field::RealField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    Burgers,
    Advection,
    EpmTorus,
    EpmCompact,
    Cosmo,
}

impl ModelId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::Burgers => "burgers",
            ModelId::Advection => "advection",
            ModelId::EpmTorus => "epm_torus",
            ModelId::EpmCompact => "epm_compact",
            ModelId::Cosmo => "cosmo",
        }
    }

    /// Unknowns per grid point in `dim` dimensions.
    pub fn components(&self, dim: usize) -> usize {
        match self {
            ModelId::Burgers | ModelId::Advection => 1,
            _ => 1 + dim,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub points: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
}

fn two_pi() -> f64 {
    2.0 * PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub s: f64,
    #[serde(default)]
    pub weighted: bool,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_j_max")]
    pub j_max: usize,
}

fn default_j_max() -> usize {
    6
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    Zero,
    /// `amplitude * sin(mode x_1)`
    Sine,
    /// `amplitude * cos(mode x_1)`
    Cosine,
    /// Seeded low-pass noise scaled to peak `amplitude`.
    LowPass,
    /// `amplitude * exp(-|x|^2 / (2 width^2))` centred in the box.
    Gaussian,
    /// Compact bump of radius `width` centred in the box.
    Bump,
}

/// One family of fields; `apply_to` selects the components that receive the
/// family (default: the first component, or all for `low_pass`), and `offset`
/// adds a constant per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub kind: DataKind,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "one_usize")]
    pub mode: usize,
    #[serde(default = "default_kmax")]
    pub kmax: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub width: f64,
    #[serde(default)]
    pub offset: Vec<f64>,
    #[serde(default)]
    pub apply_to: Option<Vec<usize>>,
    /// Remove the mean of every perturbed component.
    #[serde(default)]
    pub zero_mean: bool,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn default_kmax() -> usize {
    3
}

impl DataSpec {
    pub fn new(kind: DataKind, amplitude: f64) -> Self {
        Self {
            kind,
            amplitude,
            mode: 1,
            kmax: default_kmax(),
            seed: 0,
            width: 1.0,
            offset: Vec::new(),
            apply_to: None,
            zero_mean: false,
        }
    }

    /// Samples the family on `grid` with `components` components.
    pub fn sample(&self, grid: Grid, components: usize) -> Result<RealField> {
        let targets = self.apply_to.clone().unwrap_or_else(|| match self.kind {
            DataKind::LowPass => (0..components).collect(),
            _ => vec![0],
        });
        if let Some(&bad) = targets.iter().find(|&&c| c >= components) {
            return Err(Error::Config(format!("apply_to names component {bad} of {components}")));
        }
        let mut out = RealField::zeros(grid, components);
        let mut rng = random::rng(self.seed);
        for &c in &targets {
            let comp = match self.kind {
                DataKind::Zero => RealField::zeros(grid, 1),
                DataKind::Sine => RealField::scalar(grid, |x| self.amplitude * (self.mode as f64 * x[0]).sin()),
                DataKind::Cosine => RealField::scalar(grid, |x| self.amplitude * (self.mode as f64 * x[0]).cos()),
                DataKind::LowPass => {
                    if 2 * self.kmax >= grid.points() {
                        return Err(Error::Config(format!("kmax = {} is not resolved by {} points", self.kmax, grid.points())));
                    }
                    let spec = LowPassSpec { kmax: self.kmax, amplitude: self.amplitude, zero_mean: false, ..LowPassSpec::default() };
                    random::low_pass_field(&mut rng, grid, 1, &spec)
                }
                DataKind::Gaussian => {
                    let mid = midpoint(&grid);
                    RealField::scalar(grid, |x| {
                        let r2: f64 = (0..grid.dim()).map(|a| (x[a] - mid[a]).powi(2)).sum();
                        self.amplitude * (-r2 / (2.0 * self.width * self.width)).exp()
                    })
                }
                DataKind::Bump => {
                    let b = Bump { center: midpoint(&grid), radius: self.width, amplitude: self.amplitude };
                    b.sample(grid)
                }
            };
            let mean = if self.zero_mean { comp.means()[0] } else { 0.0 };
            for (dst, src) in out.component_mut(c).iter_mut().zip(comp.values()) {
                *dst = src - mean;
            }
        }
        for (c, off) in self.offset.iter().enumerate().take(components) {
            for v in out.component_mut(c) {
                *v += off;
            }
        }
        Ok(out)
    }
}

fn midpoint(grid: &Grid) -> [f64; 3] {
    let mut m = [0.0; 3];
    for (a, v) in m.iter_mut().enumerate().take(grid.dim()) {
        *v = grid.origin(a) + 0.5 * grid.length(a);
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    #[serde(flatten)]
    pub direction: DataSpec,
    pub eps0: f64,
    pub n_max: usize,
}

impl PerturbationSpec {
    /// `eps_n = eps0 2^-n` for `n = 0..=n_max`.
    pub fn amplitudes(&self) -> Vec<f64> {
        (0..=self.n_max).map(|n| self.eps0 * 2f64.powi(-(n as i32))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_final: f64,
    pub dt: f64,
    #[serde(default = "one_usize")]
    pub record_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default = "two")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub r0: f64,
    #[serde(default = "three")]
    pub rdot0: f64,
    #[serde(default = "one")]
    pub speed: f64,
}

fn two() -> f64 {
    2.0
}

fn three() -> f64 {
    3.0
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { k: 1.0, gamma: 2.0, r0: 1.0, rdot0: 3.0, speed: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub json: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelId,
    pub grid: GridSpec,
    pub norm: NormConfig,
    pub data: DataSpec,
    pub perturbation: PerturbationSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Periodic box for every model but `epm_compact`, which uses a centered box.
    pub fn grid(&self) -> Result<Grid> {
        let g = &self.grid;
        match self.model {
            ModelId::EpmCompact => Grid::centered(g.dim, g.points, g.length),
            _ => Grid::periodic(g.dim, g.points, g.length),
        }
    }

    pub fn components(&self) -> usize {
        self.model.components(self.grid.dim)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if matches!(self.model, ModelId::Burgers) && self.grid.dim != 1 {
            return Err(Error::Config("burgers runs in one dimension".into()));
        }
        let p = &self.perturbation;
        if !(p.eps0 >= 0.0 && p.eps0.is_finite()) {
            return Err(Error::Config(format!("eps0 must be nonnegative, got {}", p.eps0)));
        }
        if !(self.time.t_final > 0.0 && self.time.dt > 0.0) {
            return Err(Error::Config("t_final and dt must be positive".into()));
        }
        if self.norm.weighted && self.model != ModelId::EpmCompact {
            return Err(Error::Config("weighted norms need the compact (non-periodic) model".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// Shipped default configuration for a model.
    pub fn default_for(model: ModelId) -> Self {
        let time = |t_final: f64, dt: f64, record_every: usize| TimeSpec { t_final, dt, record_every };
        let perturbation = |direction: DataSpec| PerturbationSpec { direction, eps0: 1e-2, n_max: 6 };
        let norm = NormConfig { s: 3.0, weighted: false, delta: 0.0, j_max: 6 };
        match model {
            ModelId::Burgers => Self {
                model,
                grid: GridSpec { dim: 1, points: 64, length: two_pi() },
                norm,
                data: DataSpec::new(DataKind::Sine, 0.1),
                perturbation: perturbation(DataSpec::new(DataKind::Cosine, 1.0)),
                time: time(1.0, 0.01, 1),
                params: ModelParams::default(),
                output: OutputSpec::default(),
            },
            ModelId::Advection => Self {
                model,
                grid: GridSpec { dim: 1, points: 64, length: two_pi() },
                norm,
                data: DataSpec::new(DataKind::Sine, 0.1),
                perturbation: perturbation(DataSpec::new(DataKind::Cosine, 1.0)),
                time: time(1.0, 0.01, 1),
                params: ModelParams::default(),
                output: OutputSpec::default(),
            },
            ModelId::EpmTorus => {
                let mut data = DataSpec::new(DataKind::LowPass, 0.1);
                data.kmax = 2;
                data.seed = 1;
                data.offset = vec![1.0];
                let mut dir = DataSpec::new(DataKind::LowPass, 1.0);
                dir.kmax = 2;
                dir.seed = 2;
                Self {
                    model,
                    grid: GridSpec { dim: 3, points: 32, length: two_pi() },
                    norm,
                    data,
                    perturbation: perturbation(dir),
                    time: time(0.5, 0.02, 5),
                    params: ModelParams::default(),
                    output: OutputSpec::default(),
                }
            }
            ModelId::EpmCompact => {
                let mut data = DataSpec::new(DataKind::Gaussian, 0.1);
                data.width = 0.8;
                let mut dir = DataSpec::new(DataKind::Gaussian, 0.1);
                dir.width = 0.6;
                Self {
                    model,
                    grid: GridSpec { dim: 2, points: 64, length: 16.0 },
                    norm,
                    data,
                    perturbation: perturbation(dir),
                    time: time(0.2, 0.02, 1),
                    params: ModelParams::default(),
                    output: OutputSpec::default(),
                }
            }
            ModelId::Cosmo => {
                let mut data = DataSpec::new(DataKind::LowPass, 0.05);
                data.kmax = 2;
                data.seed = 3;
                data.zero_mean = true;
                let mut dir = DataSpec::new(DataKind::LowPass, 1.0);
                dir.kmax = 2;
                dir.seed = 4;
                dir.zero_mean = true;
                Self {
                    model,
                    grid: GridSpec { dim: 3, points: 32, length: two_pi() },
                    norm,
                    data,
                    perturbation: perturbation(dir),
                    time: time(1.0, 0.02, 5),
                    params: ModelParams::default(),
                    output: OutputSpec::default(),
                }
            }
        }
    }
}
