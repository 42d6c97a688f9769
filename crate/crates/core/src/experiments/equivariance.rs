//! Paired runs under `(v, w) ↦ λ²(v, w)(λx, λ²t)` with `λ = 2`.

use serde::Serialize;

use super::{unit_random_data, ExperimentSpec};
use crate::error::Result;
use crate::littlewood_paley::dyadic_dilation;
use crate::solver::{evolve, SolverConfig, StatePair};

#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceRun {
    pub amplitude: f64,
    pub tolerance: f64,
    /// `max_t max_k |λ²û_L(t) - û_{L/λ}(t/λ²)| / max_t max_k |û_{L/λ}|`.
    pub max_relative_deviation: f64,
    pub snapshots: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceReport {
    pub lambda: f64,
    pub steps: usize,
    pub linear: EquivarianceRun,
    pub nonlinear: EquivarianceRun,
    pub passed: bool,
}

fn dilate(s: &StatePair) -> Result<StatePair> {
    StatePair::new(dyadic_dilation(&s.v, 1)?, dyadic_dilation(&s.w, 1)?)
}

/// Runs `data` on its box and the dilated data on the half box with a quarter of
/// the time step, then compares mode by mode at every snapshot.
pub fn paired_deviation(data: &StatePair, cfg: &SolverConfig) -> Result<(f64, usize)> {
    let small = dilate(data)?;
    let small_cfg = cfg.with_steps(cfg.horizon / 4.0, cfg.steps());
    let (big, small) = rayon::join(|| evolve(data, cfg), || evolve(&small, &small_cfg));
    let (big, small) = (big?, small?);
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (a, b) in big.states().iter().zip(small.states()) {
        let a = dilate(a)?;
        diff = diff.max(a.sub(b)?.max_abs_coeff());
        scale = scale.max(b.max_abs_coeff());
    }
    let deviation = if scale == 0.0 { diff } else { diff / scale };
    Ok((deviation, big.len()))
}

fn run(spec: &ExperimentSpec, amplitude: f64, tolerance: f64) -> Result<EquivarianceRun> {
    let grid = spec.grid()?;
    let data = unit_random_data(&grid, &spec.solver, spec.seed)?.scale(amplitude);
    let (max_relative_deviation, snapshots) = paired_deviation(&data, &spec.solver)?;
    Ok(EquivarianceRun {
        amplitude,
        tolerance,
        max_relative_deviation,
        snapshots,
        passed: max_relative_deviation <= tolerance,
    })
}

/// Linear-regime and small-data runs on the same random direction.
pub fn equivariance_experiment(spec: &ExperimentSpec) -> Result<EquivarianceReport> {
    spec.validate()?;
    let linear = run(spec, spec.linear_amplitude.expect("validated"), spec.linear_tolerance.expect("validated"))?;
    let nonlinear = run(spec, spec.amplitude.expect("validated"), spec.tolerance.expect("validated"))?;
    Ok(EquivarianceReport {
        lambda: 2.0,
        steps: spec.solver.steps(),
        passed: linear.passed && nonlinear.passed,
        linear,
        nonlinear,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentKind;

    fn small_spec() -> ExperimentSpec {
        let mut spec = ExperimentSpec::defaults(ExperimentKind::Equivariance).with_seed(5);
        spec.points = 16;
        spec.solver = SolverConfig { dt: 0.05, horizon: 0.5, ..Default::default() };
        spec
    }

    #[test]
    fn zero_data_agrees_exactly() {
        let spec = small_spec();
        let (dev, _) = paired_deviation(&StatePair::zeros(&spec.grid().unwrap()), &spec.solver).unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn paired_runs_agree() {
        let report = equivariance_experiment(&small_spec()).unwrap();
        assert!(report.linear.max_relative_deviation < 1e-10, "{report:?}");
        assert!(report.nonlinear.max_relative_deviation < 1e-6, "{report:?}");
        assert!(report.passed);
    }

    #[test]
    fn mismatched_time_scaling_is_detected() {
        // Halving instead of quartering the time breaks the pairing.
        let spec = small_spec();
        let grid = spec.grid().unwrap();
        let data = unit_random_data(&grid, &spec.solver, 1).unwrap().scale(0.2);
        let small_cfg = spec.solver.with_steps(spec.solver.horizon / 2.0, spec.solver.steps());
        let a = evolve(&data, &spec.solver).unwrap();
        let b = evolve(&dilate(&data).unwrap(), &small_cfg).unwrap();
        let diff = dilate(a.last()).unwrap().sub(b.last()).unwrap().max_abs_coeff();
        assert!(diff > 1e-3 * b.last().max_abs_coeff());
    }
}
