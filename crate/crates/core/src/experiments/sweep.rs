//! Bisection for the largest data norm at which the fixed point converges on a long horizon.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::{constants_map, unit_random_data, ExperimentSpec};
use crate::error::{Error, Result};
use crate::random::derive_seed;
use crate::report::Series;
use crate::solver::{fixed_point_solve, EmpiricalConstants, SolverConfig, StatePair};

/// Horizon standing in for `T = ∞`, in diffusion times `L²/(4π²)` of the lowest shell.
pub const LONG_HORIZON_DIFFUSION_TIMES: f64 = 50.0;

/// Factor between successive amplitudes while bracketing.
const BRACKET_FACTOR: f64 = 2.0;
const MAX_BRACKET_STEPS: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    /// Critical norm of the data.
    pub amplitude: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub horizon: f64,
    pub horizon_diffusion_times: f64,
    pub steps: usize,
    pub constants: EmpiricalConstants,
    /// `1/(4Ĉ₀Ĉ₁)`.
    pub predicted_threshold: f64,
    /// Geometric midpoint of the final bracket.
    pub empirical_threshold: Option<f64>,
    pub bracket: Option<[f64; 2]>,
    pub ratio: Option<f64>,
    /// No convergent amplitude lies above a divergent one.
    pub monotone: bool,
    pub points: Vec<SweepPoint>,
    pub passed: bool,
}

impl SweepReport {
    pub fn constants(&self) -> BTreeMap<String, f64> {
        constants_map(&self.constants)
    }

    pub fn series(&self) -> Vec<Series> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| a.amplitude.total_cmp(&b.amplitude));
        vec![Series {
            name: "converged".into(),
            x: pts.iter().map(|p| p.amplitude).collect(),
            y: pts.iter().map(|p| if p.converged { 1.0 } else { 0.0 }).collect(),
        }]
    }
}

fn probe(direction: &StatePair, amplitude: f64, cfg: &SolverConfig) -> Result<SweepPoint> {
    match fixed_point_solve(&direction.scale(amplitude), cfg) {
        Ok((_, report)) => Ok(SweepPoint { amplitude, converged: true, iterations: report.iterations.len() - 1 }),
        Err(Error::NotConverged(report)) => {
            Ok(SweepPoint { amplitude, converged: false, iterations: report.iterations.len() - 1 })
        }
        Err(e) => Err(e),
    }
}

/// `a → 0` probe, bracket around the prediction by factors of 2, then geometric bisection.
pub fn threshold_sweep(spec: &ExperimentSpec) -> Result<SweepReport> {
    spec.validate()?;
    let grid = spec.grid()?;
    let diffusion_time = grid.box_length().powi(2) / (4.0 * PI * PI);
    let cfg = spec.solver.with_horizon(LONG_HORIZON_DIFFUSION_TIMES * diffusion_time);
    let constants =
        EmpiricalConstants::measure(&grid, &cfg, spec.trials.expect("validated"), derive_seed(spec.seed, &[0]))?;
    let predicted = constants.predicted_threshold();
    let direction = unit_random_data(&grid, &cfg, derive_seed(spec.seed, &[1]))?;

    let mut points = vec![probe(&direction, 1e-6 * predicted, &cfg)?];
    let first = probe(&direction, predicted, &cfg)?;
    let (mut lo, mut hi) = if first.converged { (Some(predicted), None) } else { (None, Some(predicted)) };
    points.push(first);
    let mut a = predicted;
    for _ in 0..MAX_BRACKET_STEPS {
        if lo.is_some() && hi.is_some() {
            break;
        }
        a = if hi.is_none() { a * BRACKET_FACTOR } else { a / BRACKET_FACTOR };
        let p = probe(&direction, a, &cfg)?;
        if p.converged {
            lo = Some(a);
        } else {
            hi = Some(a);
        }
        points.push(p);
    }
    let bracket = match (lo, hi) {
        (Some(mut lo), Some(mut hi)) => {
            for _ in 0..spec.bisection_steps.expect("validated") {
                let mid = (lo * hi).sqrt();
                let p = probe(&direction, mid, &cfg)?;
                if p.converged {
                    lo = mid;
                } else {
                    hi = mid;
                }
                points.push(p);
            }
            Some([lo, hi])
        }
        _ => None,
    };

    let mut sorted = points.clone();
    sorted.sort_by(|a, b| a.amplitude.total_cmp(&b.amplitude));
    let first_failure = sorted.iter().position(|p| !p.converged).unwrap_or(sorted.len());
    let monotone = sorted[first_failure..].iter().all(|p| !p.converged);

    let empirical_threshold = bracket.map(|[lo, hi]| (lo * hi).sqrt());
    let ratio = empirical_threshold.map(|e| e / predicted);
    let passed = monotone && points[0].converged && ratio.is_some_and(|r| (0.1..=10.0).contains(&r));
    Ok(SweepReport {
        horizon: cfg.horizon,
        horizon_diffusion_times: LONG_HORIZON_DIFFUSION_TIMES,
        steps: cfg.steps(),
        constants,
        predicted_threshold: predicted,
        empirical_threshold,
        bracket,
        ratio,
        monotone,
        points,
        passed,
    })
}
