//! TOML run configuration: `[grid]`, `[solver]`, `[data]` and `[experiment]` sections.

use std::path::{Path, PathBuf};

use besov_dh::experiments::{unit_random_data, ExperimentKind, ExperimentSpec};
use besov_dh::report::Extended;
use besov_dh::solver::{SolverConfig, StatePair};
use besov_dh::{dhf, Grid, SpectralField};
use serde::Deserialize;

pub const SEED_ENV: &str = "BESOV_DH_SEED";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub grid: Option<GridSection>,
    /// Typed so that bad `[solver]` keys are reported with line numbers.
    #[allow(dead_code)]
    solver: Option<SolverConfig>,
    pub data: Option<DataSection>,
    pub experiment: Option<ExperimentSection>,
    /// Raw `[solver]` table, overlaid on per-kind defaults.
    #[serde(skip)]
    solver_table: Option<toml::Table>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: Option<usize>,
    pub points: Option<usize>,
    pub box_length: Option<f64>,
}

/// Initial data: two DHF1 files, or seeded random data of a given critical norm.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub v: Option<PathBuf>,
    pub w: Option<PathBuf>,
    pub amplitude: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: Option<ExperimentKind>,
    pub amplitude: Option<f64>,
    pub tolerance: Option<f64>,
    pub linear_amplitude: Option<f64>,
    pub linear_tolerance: Option<f64>,
    pub trials: Option<usize>,
    pub perturbations: Option<Vec<f64>>,
    pub r_values: Option<Vec<Extended>>,
    pub horizons: Option<Vec<f64>>,
    pub shells: Option<Vec<i32>>,
    pub s: Option<f64>,
    pub p: Option<Extended>,
    pub q: Option<Extended>,
    pub quadrupole: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub window: Option<f64>,
    pub refinement_points: Option<usize>,
    pub bisection_steps: Option<usize>,
}

/// Usage and configuration problems; these exit with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg: RunConfig =
            toml::from_str(text).map_err(|e| ConfigError(format!("{origin}: {e}")))?;
        let raw: toml::Table = toml::from_str(text).map_err(|e| ConfigError(format!("{origin}: {e}")))?;
        cfg.solver_table = raw.get("solver").and_then(|v| v.as_table()).cloned();
        if let Some(x) = cfg.grid.as_ref().and_then(|g| g.box_length) {
            if !(x > 0.0 && x.is_finite()) {
                return Err(ConfigError(format!("{origin}: [grid] box_length must be positive, got {x}")));
            }
        }
        if let Some(data) = &cfg.data {
            if data.w.is_some() && data.v.is_none() {
                return Err(ConfigError(format!("{origin}: [data] w given without v")));
            }
            if let Some(a) = data.amplitude {
                if !(a >= 0.0 && a.is_finite()) {
                    return Err(ConfigError(format!("{origin}: [data] amplitude must be >= 0, got {a}")));
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        match path {
            None => Ok(Self::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
                Self::parse(&text, &path.display().to_string())
            }
        }
    }

    /// Flag, then config, then `BESOV_DH_SEED`, then 0.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64, ConfigError> {
        if let Some(s) = flag.or(self.seed) {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(text) => text
                .trim()
                .parse()
                .map_err(|_| ConfigError(format!("{SEED_ENV} must be an unsigned integer, got {text:?}"))),
            Err(_) => Ok(0),
        }
    }

    /// `[solver]` keys overlaid on `base`.
    pub fn solver_over(&self, base: &SolverConfig) -> Result<SolverConfig, ConfigError> {
        let Some(table) = &self.solver_table else { return Ok(base.clone()) };
        let mut merged = toml::Table::try_from(base).map_err(|e| ConfigError(e.to_string()))?;
        for (k, v) in table {
            merged.insert(k.clone(), v.clone());
        }
        merged.try_into().map_err(|e: toml::de::Error| ConfigError(format!("[solver]: {e}")))
    }

    pub fn grid_over(&self, dim: usize, points: usize, box_length: f64) -> Result<Grid, ConfigError> {
        let g = self.grid.as_ref();
        let dim = g.and_then(|g| g.dim).unwrap_or(dim);
        let points = g.and_then(|g| g.points).unwrap_or(points);
        let box_length = g.and_then(|g| g.box_length).unwrap_or(box_length);
        Grid::new(dim, points, box_length).map_err(|e| ConfigError(format!("[grid]: {e}")))
    }

    /// Defaults for `kind`, then the config sections, then the seed.
    pub fn experiment_spec(&self, kind: ExperimentKind, seed: u64) -> Result<ExperimentSpec, ConfigError> {
        if let Some(k) = self.experiment.as_ref().and_then(|e| e.kind) {
            if k != kind {
                return Err(ConfigError(format!("config names experiment {k}, command asks for {kind}")));
            }
        }
        let mut spec = ExperimentSpec::defaults(kind).with_seed(seed);
        let grid = self.grid_over(spec.dim, spec.points, spec.box_length)?;
        spec.dim = grid.dim();
        spec.points = grid.points();
        spec.box_length = grid.box_length();
        spec.solver = self.solver_over(&spec.solver)?;
        if let Some(e) = &self.experiment {
            macro_rules! overlay {
                ($($field:ident),*) => { $( if e.$field.is_some() { spec.$field = e.$field.clone(); } )* };
            }
            overlay!(
                amplitude, tolerance, linear_amplitude, linear_tolerance, trials, perturbations, r_values, horizons,
                shells, s, p, q, quadrupole, times, window, refinement_points, bisection_steps
            );
        }
        spec.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(spec)
    }

    /// Grid, solver and data for `evolve` / `picard`.
    pub fn problem(&self, seed: u64) -> Result<(SolverConfig, StatePair), ConfigError> {
        let solver = self.solver_over(&SolverConfig::default())?;
        let data = self.data.as_ref();
        let pair = match data.and_then(|d| d.v.as_ref()) {
            Some(v_path) => {
                let load = |p: &Path| dhf::load(p).map_err(|e| ConfigError(format!("{}: {e}", p.display())));
                let v = load(v_path)?;
                let w = match data.and_then(|d| d.w.as_ref()) {
                    Some(p) => load(p)?,
                    None => SpectralField::zeros(v.grid()),
                };
                if self.grid.is_some() {
                    let g = self.grid_over(2, 64, 2.0 * std::f64::consts::PI)?;
                    if &g != v.grid() {
                        return Err(ConfigError(format!("[grid] does not match the grid of {}", v_path.display())));
                    }
                }
                StatePair::new(v, w).map_err(|e| ConfigError(e.to_string()))?
            }
            None => {
                let grid = self.grid_over(2, 64, 2.0 * std::f64::consts::PI)?;
                let amplitude = data.and_then(|d| d.amplitude).unwrap_or(0.1);
                unit_random_data(&grid, &solver, seed).map_err(|e| ConfigError(e.to_string()))?.scale(amplitude)
            }
        };
        solver.validate(pair.grid().dim()).map_err(|e| ConfigError(e.to_string()))?;
        Ok((solver, pair))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_carry_line_numbers() {
        let err = RunConfig::parse("seed = 1\n[solver]\ndt = 0.1\nbogus = 2\n", "c.toml").unwrap_err();
        assert!(err.0.contains("line 4"), "{err}");
        assert!(err.0.contains("bogus"), "{err}");
    }

    #[test]
    fn solver_keys_overlay_kind_defaults() {
        let cfg = RunConfig::parse("[solver]\ndt = 0.5\n", "c").unwrap();
        let spec = cfg.experiment_spec(ExperimentKind::SelfSimilar, 3).unwrap();
        assert_eq!(spec.solver.dt, 0.5);
        assert_eq!(spec.solver.snapshot_every, 40);
        assert_eq!(spec.seed, 3);
    }

    #[test]
    fn experiment_section_is_checked() {
        let cfg = RunConfig::parse("[experiment]\nkind = \"stability\"\ntolerance = -1.0\n", "c").unwrap();
        assert!(cfg.experiment_spec(ExperimentKind::Stability, 0).is_err());
        assert!(cfg.experiment_spec(ExperimentKind::Equivariance, 0).is_err());
        let cfg = RunConfig::parse("[experiment]\nr_values = [2, \"inf\"]\n", "c").unwrap();
        let spec = cfg.experiment_spec(ExperimentKind::Stability, 0).unwrap();
        assert!(spec.r_values.unwrap()[1].0.is_infinite());
    }

    #[test]
    fn grid_constraints_are_enforced() {
        let cfg = RunConfig::parse("[grid]\npoints = 7\n", "c").unwrap();
        assert!(cfg.problem(0).is_err());
        assert!(RunConfig::parse("[grid]\nbox_length = -1.0\n", "c").is_err());
    }
}
