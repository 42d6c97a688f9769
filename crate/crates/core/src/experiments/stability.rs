//! Lipschitz dependence of the fixed point on the data.

use rayon::prelude::*;
use serde::Serialize;

use super::{critical_pair_norm, unit_random_data, ExperimentSpec};
use crate::chemin_lerner::{chemin_lerner_norm, FieldSelector};
use crate::error::Result;
use crate::littlewood_paley::{DyadicPartition, Measure, ShellDecomposition};
use crate::random::derive_seed;
use crate::report::{extended_f64, Extended, Series};
use crate::solver::fixed_point_solve;

#[derive(Clone, Debug, Serialize)]
pub struct StabilityRow {
    /// `‖δ‖ / ‖d‖`.
    pub relative_size: f64,
    /// `‖δ‖_{Ḃ^{-2+n/p}_{p,q}}`.
    pub data_difference: f64,
    /// `‖u - ũ‖_{𝔏^r(Ḃ^{-2+n/p+2/r})} / ‖δ‖` for each `r`.
    pub ratios: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub amplitude: f64,
    pub r_values: Vec<Extended>,
    pub rows: Vec<StabilityRow>,
    /// `max / min` of the ratio across perturbation sizes, per `r`.
    pub variation: Vec<f64>,
    pub max_variation: f64,
    #[serde(with = "extended_f64")]
    pub max_ratio: f64,
    pub tolerance: f64,
    pub picard_iterations: usize,
    pub passed: bool,
}

impl StabilityReport {
    pub fn series(&self) -> Vec<Series> {
        self.r_values
            .iter()
            .enumerate()
            .map(|(i, r)| Series {
                name: format!("ratio r={}", r.0),
                x: self.rows.iter().map(|row| row.relative_size).collect(),
                y: self.rows.iter().map(|row| row.ratios[i]).collect(),
            })
            .collect()
    }
}

/// Solves for `d` and `d + δ` along one random direction, for each relative size.
pub fn stability_experiment(spec: &ExperimentSpec) -> Result<StabilityReport> {
    spec.validate()?;
    let grid = spec.grid()?;
    let cfg = &spec.solver;
    let amplitude = spec.amplitude.expect("validated");
    let r_values = spec.r_values.clone().expect("validated");
    let sizes = spec.perturbations.clone().expect("validated");
    let tolerance = spec.tolerance.expect("validated");

    let data = unit_random_data(&grid, cfg, derive_seed(spec.seed, &[0]))?.scale(amplitude);
    let direction = unit_random_data(&grid, cfg, derive_seed(spec.seed, &[1]))?;
    let shells = ShellDecomposition::new(&grid, DyadicPartition::new());
    let critical = cfg.critical_index(grid.dim());
    let (base, base_report) = fixed_point_solve(&data, cfg)?;

    let rows = sizes
        .par_iter()
        .map(|&size| {
            let delta = direction.scale(size * amplitude);
            let (perturbed, _) = fixed_point_solve(&data.add(&delta)?, cfg)?;
            let data_difference = critical_pair_norm(&delta, cfg, Measure::Normalized);
            let diff = base.difference(&perturbed)?;
            let ratios = r_values
                .iter()
                .map(|r| {
                    let idx = critical.with_regularity(critical.s + 2.0 / r.0);
                    Ok(chemin_lerner_norm(&diff, &shells, FieldSelector::Pair, r.0, &idx)? / data_difference)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(StabilityRow { relative_size: size, data_difference, ratios })
        })
        .collect::<Result<Vec<_>>>()?;

    let variation: Vec<f64> = (0..r_values.len())
        .map(|i| {
            let col = rows.iter().map(|row| row.ratios[i]);
            let max = col.clone().fold(0.0, f64::max);
            let min = col.fold(f64::INFINITY, f64::min);
            max / min
        })
        .collect();
    let max_variation = variation.iter().copied().fold(1.0, f64::max);
    let max_ratio = rows.iter().flat_map(|row| row.ratios.iter().copied()).fold(0.0, f64::max);
    Ok(StabilityReport {
        amplitude,
        r_values,
        rows,
        passed: max_ratio.is_finite() && max_variation < tolerance,
        variation,
        max_variation,
        max_ratio,
        tolerance,
        picard_iterations: base_report.iterations.len() - 1,
    })
}
