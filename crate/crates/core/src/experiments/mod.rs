//! Scripted experiments with machine-readable verdicts.

mod audits;
mod equivariance;
mod self_similar;
mod stability;
mod sweep;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::littlewood_paley::{DyadicPartition, Measure, ShellDecomposition};
use crate::report::{Extended, Series};
use crate::solver::{random_state, EmpiricalConstants, SolverConfig, StatePair};

pub use audits::{bernstein_experiment, heat_experiment, product_experiment};
pub use equivariance::{equivariance_experiment, EquivarianceReport, EquivarianceRun};
pub use self_similar::{homogeneous_data, profile_samples, self_similar_experiment, ProfileRun, SelfSimilarReport};
pub use stability::{stability_experiment, StabilityReport, StabilityRow};
pub use sweep::{threshold_sweep, SweepPoint, SweepReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SelfSimilar,
    Equivariance,
    Stability,
    ThresholdSweep,
    ProductAudit,
    HeatAudit,
    BernsteinAudit,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::SelfSimilar,
        ExperimentKind::Equivariance,
        ExperimentKind::Stability,
        ExperimentKind::ThresholdSweep,
        ExperimentKind::ProductAudit,
        ExperimentKind::HeatAudit,
        ExperimentKind::BernsteinAudit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SelfSimilar => "self_similar",
            ExperimentKind::Equivariance => "equivariance",
            ExperimentKind::Stability => "stability",
            ExperimentKind::ThresholdSweep => "threshold_sweep",
            ExperimentKind::ProductAudit => "product_audit",
            ExperimentKind::HeatAudit => "heat_audit",
            ExperimentKind::BernsteinAudit => "bernstein_audit",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment kind {s:?}")))
    }
}

/// Everything an experiment needs. Kind-specific parameters are optional here
/// and checked by [`ExperimentSpec::validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub dim: usize,
    pub points: usize,
    pub box_length: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Critical norm of the data (normalized measure), or the profile amplitude for `self_similar`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Relative perturbation sizes for `stability`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbations: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_values: Option<Vec<Extended>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shells: Option<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Extended>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Extended>,
    /// Anisotropy `c` of the homogeneous data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrupole: Option<f64>,
    /// Sample times of the profile collapse.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    /// Radius of the profile window in similarity variables `y = x/√t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    /// Points of the smaller comparison box (same spacing).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bisection_steps: Option<usize>,
}

impl ExperimentSpec {
    fn base(kind: ExperimentKind, dim: usize, points: usize, box_length: f64, solver: SolverConfig) -> Self {
        Self {
            kind,
            seed: 0,
            dim,
            points,
            box_length,
            solver,
            amplitude: None,
            tolerance: None,
            linear_amplitude: None,
            linear_tolerance: None,
            trials: None,
            perturbations: None,
            r_values: None,
            horizons: None,
            shells: None,
            s: None,
            p: None,
            q: None,
            quadrupole: None,
            times: None,
            window: None,
            refinement_points: None,
            bisection_steps: None,
        }
    }

    /// Complete desk-scale parameters for `kind`.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let two_pi = 2.0 * PI;
        let solver = |dt: f64, horizon: f64| SolverConfig { dt, horizon, ..Default::default() };
        match kind {
            ExperimentKind::SelfSimilar => Self {
                amplitude: Some(5.0),
                quadrupole: Some(0.5),
                times: Some(vec![10.0, 20.0, 40.0, 80.0]),
                window: Some(4.0),
                refinement_points: Some(128),
                tolerance: Some(0.05),
                trials: Some(4),
                ..Self::base(kind, 2, 256, 256.0, SolverConfig { snapshot_every: 40, ..solver(0.25, 80.0) })
            },
            ExperimentKind::Equivariance => Self {
                amplitude: Some(0.2),
                tolerance: Some(1e-6),
                linear_amplitude: Some(1e-12),
                linear_tolerance: Some(1e-10),
                ..Self::base(kind, 2, 64, two_pi, solver(0.01, 0.5))
            },
            ExperimentKind::Stability => Self {
                amplitude: Some(2.0),
                perturbations: Some(vec![1e-3, 1e-4, 1e-5, 1e-6]),
                r_values: Some(vec![Extended(3.0), Extended(6.0), Extended(f64::INFINITY)]),
                tolerance: Some(2.0),
                ..Self::base(kind, 2, 64, two_pi, SolverConfig { picard_tol: 1e-13, ..solver(0.01, 0.5) })
            },
            ExperimentKind::ThresholdSweep => Self {
                trials: Some(4),
                bisection_steps: Some(6),
                ..Self::base(kind, 2, 32, two_pi, solver(0.1, 50.0))
            },
            ExperimentKind::ProductAudit => Self {
                p: Some(Extended(2.0)),
                q: Some(Extended(2.0)),
                trials: Some(100),
                ..Self::base(kind, 2, 64, two_pi, SolverConfig::default())
            },
            ExperimentKind::HeatAudit => Self {
                r_values: Some(vec![Extended(2.0), Extended(4.0), Extended(f64::INFINITY)]),
                horizons: Some(vec![0.1, 1.0, 10.0]),
                shells: Some(vec![2, 3]),
                trials: Some(50),
                ..Self::base(kind, 2, 64, two_pi, SolverConfig::default())
            },
            ExperimentKind::BernsteinAudit => Self {
                s: Some(1.0),
                p: Some(Extended(2.0)),
                q: Some(Extended(2.0)),
                shells: Some(vec![1, 2, 3, 4]),
                trials: Some(50),
                ..Self::base(kind, 2, 256, 8.0 * PI, SolverConfig::default())
            },
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.points, self.box_length)
    }

    fn required(&self) -> Vec<(&'static str, bool)> {
        let has_amp = self.amplitude.is_some();
        let has_tol = self.tolerance.is_some();
        let has_trials = self.trials.is_some();
        match self.kind {
            ExperimentKind::SelfSimilar => vec![
                ("amplitude", has_amp),
                ("quadrupole", self.quadrupole.is_some()),
                ("times", self.times.is_some()),
                ("window", self.window.is_some()),
                ("refinement_points", self.refinement_points.is_some()),
                ("tolerance", has_tol),
                ("trials", has_trials),
            ],
            ExperimentKind::Equivariance => vec![
                ("amplitude", has_amp),
                ("tolerance", has_tol),
                ("linear_amplitude", self.linear_amplitude.is_some()),
                ("linear_tolerance", self.linear_tolerance.is_some()),
            ],
            ExperimentKind::Stability => vec![
                ("amplitude", has_amp),
                ("perturbations", self.perturbations.is_some()),
                ("r_values", self.r_values.is_some()),
                ("tolerance", has_tol),
            ],
            ExperimentKind::ThresholdSweep => {
                vec![("trials", has_trials), ("bisection_steps", self.bisection_steps.is_some())]
            }
            ExperimentKind::ProductAudit => {
                vec![("p", self.p.is_some()), ("q", self.q.is_some()), ("trials", has_trials)]
            }
            ExperimentKind::HeatAudit => vec![
                ("r_values", self.r_values.is_some()),
                ("horizons", self.horizons.is_some()),
                ("shells", self.shells.is_some()),
                ("trials", has_trials),
            ],
            ExperimentKind::BernsteinAudit => vec![
                ("s", self.s.is_some()),
                ("p", self.p.is_some()),
                ("q", self.q.is_some()),
                ("shells", self.shells.is_some()),
                ("trials", has_trials),
            ],
        }
    }

    /// Checks grid, solver and the parameters `kind` needs, before anything runs.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        self.solver.validate(grid.dim())?;
        let missing: Vec<&str> = self.required().into_iter().filter(|(_, ok)| !ok).map(|(k, _)| k).collect();
        if !missing.is_empty() {
            return Err(Error::InvalidConfig(format!("{} needs {}", self.kind, missing.join(", "))));
        }
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0) => Err(Error::InvalidConfig(format!("{name} must be positive, got {x}"))),
            _ => Ok(()),
        };
        positive("tolerance", self.tolerance)?;
        positive("linear_tolerance", self.linear_tolerance)?;
        positive("window", self.window)?;
        if let Some(a) = self.amplitude {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::InvalidConfig(format!("amplitude must be finite and >= 0, got {a}")));
            }
        }
        if self.trials == Some(0) {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        for (name, list) in [("perturbations", &self.perturbations), ("horizons", &self.horizons), ("times", &self.times)] {
            if let Some(xs) = list {
                if xs.is_empty() || xs.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                    return Err(Error::InvalidConfig(format!("{name} must be a non-empty list of positive numbers")));
                }
            }
        }
        if let Some(rs) = &self.r_values {
            if rs.is_empty() || rs.iter().any(|r| !(r.0 >= 1.0)) {
                return Err(Error::InvalidConfig("r_values must be a non-empty list of exponents >= 1".into()));
            }
        }
        if let Some(m) = self.refinement_points {
            if m >= self.points {
                return Err(Error::InvalidConfig(format!(
                    "refinement_points ({m}) must be smaller than points ({})",
                    self.points
                )));
            }
            Grid::new(self.dim, m, self.box_length * m as f64 / self.points as f64)?;
        }
        Ok(())
    }
}

/// Outcome of one experiment. `series` and `wall_time_seconds` stay out of the
/// JSON so that identical specs produce identical files.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub kind: ExperimentKind,
    pub spec: ExperimentSpec,
    pub constants: BTreeMap<String, f64>,
    pub metrics: serde_json::Value,
    pub passed: bool,
    #[serde(skip)]
    pub series: Vec<Series>,
    #[serde(skip)]
    pub wall_time_seconds: f64,
}

/// Validates `spec` and runs the experiment it names.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Verdict> {
    spec.validate()?;
    let started = Instant::now();
    let mut verdict = match spec.kind {
        ExperimentKind::SelfSimilar => {
            let r = self_similar_experiment(spec)?;
            let series = r.series();
            finish(spec, r.constants(), &r, r.passed, series)?
        }
        ExperimentKind::Equivariance => {
            let r = equivariance_experiment(spec)?;
            finish(spec, BTreeMap::new(), &r, r.passed, Vec::new())?
        }
        ExperimentKind::Stability => {
            let r = stability_experiment(spec)?;
            let series = r.series();
            finish(spec, BTreeMap::new(), &r, r.passed, series)?
        }
        ExperimentKind::ThresholdSweep => {
            let r = threshold_sweep(spec)?;
            let series = r.series();
            finish(spec, r.constants(), &r, r.passed, series)?
        }
        ExperimentKind::ProductAudit => {
            let r = product_experiment(spec)?;
            let constants = BTreeMap::from([("product_max_ratio".to_string(), r.max_ratio)]);
            finish(spec, constants, &r, r.bounded, Vec::new())?
        }
        ExperimentKind::HeatAudit => {
            let r = heat_experiment(spec)?;
            let constants = BTreeMap::from([("heat_max_ratio".to_string(), r.max_ratio)]);
            finish(spec, constants, &r, r.bounded && r.stable, Vec::new())?
        }
        ExperimentKind::BernsteinAudit => {
            let r = bernstein_experiment(spec)?;
            let constants = BTreeMap::from([("bernstein_max_ratio".to_string(), r.max_ratio)]);
            finish(spec, constants, &r, r.stable, Vec::new())?
        }
    };
    verdict.wall_time_seconds = started.elapsed().as_secs_f64();
    Ok(verdict)
}

fn finish<T: Serialize>(
    spec: &ExperimentSpec,
    constants: BTreeMap<String, f64>,
    report: &T,
    passed: bool,
    series: Vec<Series>,
) -> Result<Verdict> {
    Ok(Verdict {
        kind: spec.kind,
        spec: spec.clone(),
        constants,
        metrics: serde_json::to_value(report)?,
        passed,
        series,
        wall_time_seconds: 0.0,
    })
}

pub(crate) fn constants_map(c: &EmpiricalConstants) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("c0".to_string(), c.c0),
        ("c1".to_string(), c.c1),
        ("c2".to_string(), c.c2),
        ("working_epsilon".to_string(), c.working_epsilon()),
        ("predicted_threshold".to_string(), c.predicted_threshold()),
    ])
}

/// `(v₀, w₀)` of the critical data norm `cfg.critical_index` in the given measure.
pub(crate) fn critical_pair_norm(data: &StatePair, cfg: &SolverConfig, measure: Measure) -> f64 {
    let shells = ShellDecomposition::new(data.grid(), DyadicPartition::new());
    let idx = cfg.critical_index(data.grid().dim());
    shells.besov_norm_in(&data.v, &idx, measure) + shells.besov_norm_in(&data.w, &idx, measure)
}

/// Heat-smoothed random neutral data with unit critical norm.
pub fn unit_random_data(grid: &Grid, cfg: &SolverConfig, seed: u64) -> Result<StatePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_state(grid, &mut rng).heat(SMOOTHING_TIME * grid.box_length().powi(2) / (4.0 * PI * PI))?;
    let norm = critical_pair_norm(&d, cfg, Measure::Normalized);
    Ok(d.scale(1.0 / norm))
}

/// Heat smoothing of random data, for a box of side `2π`.
pub const SMOOTHING_TIME: f64 = 0.05;
