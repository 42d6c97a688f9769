//! Fixed-point driver for `u = y + B(u, u)` with contraction monitoring.

use std::time::Instant;

use serde::Serialize;

use super::config::SolverConfig;
use super::duhamel::{heat_flow, picard_map};
use super::state::StatePair;
use crate::chemin_lerner::{chemin_lerner_norm, FieldSelector, Trajectory};
use crate::error::{Error, Result};
use crate::littlewood_paley::{BesovIndex, DyadicPartition, ShellDecomposition};

/// Iterates whose norm exceeds this multiple of `‖y‖` are treated as divergent.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Clone, Debug, Serialize)]
pub struct IterateRecord {
    pub iteration: usize,
    /// `‖u^m‖_X`.
    pub monitor_norm: f64,
    /// `‖u^m - u^{m-1}‖_X`.
    pub difference_norm: Option<f64>,
    /// `‖u^m - u^{m-1}‖ / ‖u^{m-1} - u^{m-2}‖`.
    pub contraction_ratio: Option<f64>,
    /// `‖u^m‖ <= 2‖y‖`.
    pub inside_ball: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub monitor_index: BesovIndex,
    pub r1: f64,
    pub steps: usize,
    pub dt: f64,
    pub horizon: f64,
    /// `‖y‖_X` for the heat flow `y` of the data.
    pub data_norm: f64,
    pub ball_radius: f64,
    pub iterations: Vec<IterateRecord>,
    pub all_inside_ball: bool,
    /// Largest contraction ratio among iterates above the roundoff floor.
    pub max_contraction_ratio: Option<f64>,
    pub final_relative_change: f64,
    /// Kept out of the JSON so reports are reproducible.
    #[serde(skip)]
    pub wall_time_seconds: f64,
}

impl ConvergenceReport {
    /// Ratio `‖u^m - u^{m-1}‖ / ‖u^{m-1} - u^{m-2}‖` for every `m >= 2`.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.iterations.iter().filter_map(|r| r.contraction_ratio).collect()
    }
}

pub(crate) fn prepare_data(data: &StatePair, cfg: &SolverConfig) -> Result<StatePair> {
    if cfg.auto_neutralize {
        Ok(data.neutralize().0)
    } else {
        data.ensure_neutral()?;
        Ok(data.clone())
    }
}

/// Monitor norm `‖(v, w)‖_X = ‖v‖_X + ‖w‖_X`.
pub fn monitor_norm(traj: &Trajectory, cfg: &SolverConfig) -> Result<f64> {
    let shells = ShellDecomposition::new(traj.grid(), DyadicPartition::new());
    monitor_norm_with(traj, &shells, cfg)
}

fn monitor_norm_with(traj: &Trajectory, shells: &ShellDecomposition, cfg: &SolverConfig) -> Result<f64> {
    chemin_lerner_norm(traj, shells, FieldSelector::Pair, cfg.r1, &cfg.monitor_index(traj.grid().dim()))
}

/// Picard iteration `u⁰ = e^{tΔ}u₀`, `u^{m+1} = 𝒢(u^m)`.
///
/// Stops when `‖u^{m+1} - u^m‖_X < picard_tol · ‖u^{m+1}‖_X`. Divergence or
/// exhausting `picard_max_iter` yields [`Error::NotConverged`] with the history.
pub fn fixed_point_solve(data: &StatePair, cfg: &SolverConfig) -> Result<(Trajectory, ConvergenceReport)> {
    let started = Instant::now();
    let grid = data.grid().clone();
    cfg.validate(grid.dim())?;
    let data = prepare_data(data, cfg)?;
    let shells = ShellDecomposition::new(&grid, DyadicPartition::new());
    let y = heat_flow(&data, &cfg.times())?;
    let data_norm = monitor_norm_with(&y, &shells, cfg)?;
    let mut report = ConvergenceReport {
        converged: false,
        monitor_index: cfg.monitor_index(grid.dim()),
        r1: cfg.r1,
        steps: cfg.steps(),
        dt: cfg.step(),
        horizon: cfg.horizon,
        data_norm,
        ball_radius: 2.0 * data_norm,
        iterations: vec![IterateRecord {
            iteration: 0,
            monitor_norm: data_norm,
            difference_norm: None,
            contraction_ratio: None,
            inside_ball: true,
        }],
        all_inside_ball: true,
        max_contraction_ratio: None,
        final_relative_change: 0.0,
        wall_time_seconds: 0.0,
    };
    let ball_slack = 1.0 + 1e-12;
    let mut u = y;
    if data_norm == 0.0 {
        report.converged = true;
        report.wall_time_seconds = started.elapsed().as_secs_f64();
        return Ok((u, report));
    }
    let mut last_diff: Option<f64> = None;
    for iteration in 1..=cfg.picard_max_iter {
        let next = picard_map(&u, &data, cfg)?;
        let diff = monitor_norm_with(&u.difference(&next)?, &shells, cfg)?;
        let norm = monitor_norm_with(&next, &shells, cfg)?;
        let ratio = last_diff.filter(|&d| d > 0.0).map(|d| diff / d);
        let inside = norm <= report.ball_radius * ball_slack;
        report.all_inside_ball &= inside;
        if let Some(r) = ratio {
            // Ratios between differences at the roundoff floor carry no information.
            if last_diff.unwrap_or(0.0) > 1e-12 * norm {
                report.max_contraction_ratio = Some(report.max_contraction_ratio.map_or(r, |m: f64| m.max(r)));
            }
        }
        report.iterations.push(IterateRecord {
            iteration,
            monitor_norm: norm,
            difference_norm: Some(diff),
            contraction_ratio: ratio,
            inside_ball: inside,
        });
        report.final_relative_change = if norm > 0.0 { diff / norm } else { 0.0 };
        u = next;
        if !(norm.is_finite() && diff.is_finite()) || norm > DIVERGENCE_FACTOR * data_norm {
            break;
        }
        if report.final_relative_change < cfg.picard_tol {
            report.converged = true;
            break;
        }
        last_diff = Some(diff);
    }
    report.wall_time_seconds = started.elapsed().as_secs_f64();
    if report.converged {
        Ok((u, report))
    } else {
        Err(Error::NotConverged(Box::new(report)))
    }
}
