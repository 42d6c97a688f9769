//! Frequency cutoff and local horizon for large data.

use serde::Serialize;

use super::audits::EmpiricalConstants;
use super::config::SolverConfig;
use super::duhamel::heat_flow;
use super::picard::{monitor_norm, prepare_data};
use super::state::StatePair;
use crate::error::{Error, Result};
use crate::littlewood_paley::{frequency_split, DyadicPartition, ShellDecomposition};

/// Largest number of horizon halvings tried when the certificate fails.
pub const MAX_HALVINGS: usize = 40;

#[derive(Clone, Debug, Serialize)]
pub struct LocalHorizon {
    /// Split `|k| > 2^N` (high) / `|k| <= 2^N` (low).
    pub cutoff: i32,
    pub horizon: f64,
    pub eps: f64,
    /// Critical norm of the high part.
    pub high_norm: f64,
    /// Critical norm of the low part.
    pub low_norm: f64,
    /// Horizon from the low-frequency bound, before capping and halving.
    pub predicted_horizon: f64,
    pub halvings: usize,
    /// Measured `‖(e^{tΔ}v₀, e^{tΔ}w₀)‖_{X_T}`.
    pub certificate: f64,
    pub certificate_holds: bool,
}

fn pair_norm(shells: &ShellDecomposition, s: &StatePair, cfg: &SolverConfig) -> f64 {
    let idx = cfg.critical_index(s.grid().dim());
    shells.besov_norm(&s.v, &idx) + shells.besov_norm(&s.w, &idx)
}

/// Smallest `N` with `Ĉ₁‖high_N‖ <= ε/2`, then the largest `T <= cfg.horizon`
/// with `Ĉ₂ 2^{2N/r₁} T^{1/r₁} ‖low_N‖ <= ε/2`. The heat-flow norm on `[0, T]`
/// is then measured directly; `T` is halved until it is at most `ε`.
///
/// The certificate uses `cfg`'s step count on `[0, T]`.
pub fn select_local_horizon(
    data: &StatePair,
    cfg: &SolverConfig,
    eps: f64,
    constants: &EmpiricalConstants,
) -> Result<LocalHorizon> {
    let grid = data.grid().clone();
    cfg.validate(grid.dim())?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig(format!("smallness target must be positive, got {eps}")));
    }
    let data = prepare_data(data, cfg)?;
    let shells = ShellDecomposition::new(&grid, DyadicPartition::new());
    let (lo, hi) = shells.range();
    let split = |n: i32| -> Result<(StatePair, StatePair)> {
        let (hv, lv) = frequency_split(&data.v, n);
        let (hw, lw) = frequency_split(&data.w, n);
        Ok((StatePair::new(hv, hw)?, StatePair::new(lv, lw)?))
    };
    let mut chosen = None;
    for n in lo - 1..=hi {
        let (high, low) = split(n)?;
        let high_norm = pair_norm(&shells, &high, cfg);
        if constants.c1 * high_norm <= 0.5 * eps {
            chosen = Some((n, high_norm, pair_norm(&shells, &low, cfg)));
            break;
        }
    }
    let (cutoff, high_norm, low_norm) = chosen.ok_or_else(|| {
        Error::NoAdmissibleCutoff(format!("no N in [{}, {hi}] makes the high part small enough", lo - 1))
    })?;
    let predicted_horizon = if low_norm == 0.0 {
        f64::INFINITY
    } else {
        (0.5 * eps / (constants.c2 * 2f64.powf(2.0 * cutoff as f64 / cfg.r1) * low_norm)).powf(cfg.r1)
    };
    let mut horizon = predicted_horizon.min(cfg.horizon);
    let steps = cfg.steps();
    let mut halvings = 0;
    loop {
        let local = cfg.with_steps(horizon, steps);
        let certificate = monitor_norm(&heat_flow(&data, &local.times())?, &local)?;
        let certificate_holds = certificate <= eps;
        if certificate_holds || halvings == MAX_HALVINGS {
            return Ok(LocalHorizon {
                cutoff,
                horizon,
                eps,
                high_norm,
                low_norm,
                predicted_horizon,
                halvings,
                certificate,
                certificate_holds,
            });
        }
        horizon *= 0.5;
        halvings += 1;
    }
}
