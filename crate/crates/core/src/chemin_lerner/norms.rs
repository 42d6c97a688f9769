//! Chemin-Lerner norms `𝔏^r(0,T; Ḃ^s_{p,q})` and ordinary `L^r(0,T; Ḃ^s_{p,q})` norms.
//!
//! Time integrals use the composite trapezoid rule on the trajectory's own
//! samples; `r = ∞` takes the max over samples.

use serde::Serialize;

use super::trajectory::{Species, Trajectory};
use crate::error::{Error, Result};
use crate::littlewood_paley::{lq_sum, BesovIndex, Measure, ShellDecomposition};
use crate::report::extended_f64;

/// Which field(s) a norm measures. `Pair` is `‖v‖ + ‖w‖`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSelector {
    V,
    W,
    Pair,
}

/// Slack allowed when checking the Minkowski ordering.
pub const MINKOWSKI_SLACK: f64 = 1e-10;

/// `‖a‖_{L^r(0,T)}` by trapezoid (`r = ∞` → max).
pub fn time_lr_norm(times: &[f64], values: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        return values.iter().fold(0.0, |a, &b| a.max(b.abs()));
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, a)| 0.5 * (t[1] - t[0]) * (a[0].abs().powf(r) + a[1].abs().powf(r)))
        .sum();
    integral.powf(1.0 / r)
}

fn check_time_exponent(r: f64) -> Result<()> {
    if r >= 1.0 && !r.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("time exponent r = {r} not in [1, ∞]")))
    }
}

fn species_of(selector: FieldSelector) -> &'static [Species] {
    match selector {
        FieldSelector::V => &[Species::V],
        FieldSelector::W => &[Species::W],
        FieldSelector::Pair => &[Species::V, Species::W],
    }
}

/// `(Σ_j 2^{jsq} ‖Δ_j f‖^q_{L^r(0,T;L^p)})^{1/q}`.
///
/// `r = 1` is accepted for intermediate bookkeeping; the solution class uses `r > 1`.
pub fn chemin_lerner_norm(
    traj: &Trajectory,
    shells: &ShellDecomposition,
    selector: FieldSelector,
    r: f64,
    idx: &BesovIndex,
) -> Result<f64> {
    chemin_lerner_norm_in(traj, shells, selector, r, idx, Measure::Normalized)
}

pub fn chemin_lerner_norm_in(
    traj: &Trajectory,
    shells: &ShellDecomposition,
    selector: FieldSelector,
    r: f64,
    idx: &BesovIndex,
    measure: Measure,
) -> Result<f64> {
    check_time_exponent(r)?;
    let factor = measure.factor(shells.grid(), idx.p);
    let mut total = 0.0;
    for &species in species_of(selector) {
        let table = traj.shell_table(shells, species, idx.p)?;
        let time_norms: Vec<f64> = table.iter().map(|row| time_lr_norm(traj.times(), row, r)).collect();
        total += shells.combine(&time_norms, idx) * factor;
    }
    Ok(total)
}

/// `(∫₀ᵀ (Σ_j 2^{jsq} ‖Δ_j f‖^q_{L^p})^{r/q} dt)^{1/r}`.
pub fn lr_besov_norm(
    traj: &Trajectory,
    shells: &ShellDecomposition,
    selector: FieldSelector,
    r: f64,
    idx: &BesovIndex,
) -> Result<f64> {
    check_time_exponent(r)?;
    let mut total = 0.0;
    for &species in species_of(selector) {
        let table = traj.shell_table(shells, species, idx.p)?;
        let besov_in_time: Vec<f64> = (0..traj.len())
            .map(|t| {
                lq_sum(shells.shells().zip(&table).map(|(j, row)| 2f64.powf(j as f64 * idx.s) * row[t]), idx.q)
            })
            .collect();
        total += time_lr_norm(traj.times(), &besov_in_time, r);
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct MinkowskiReport {
    #[serde(with = "extended_f64")]
    pub r: f64,
    #[serde(with = "extended_f64")]
    pub q: f64,
    pub chemin_lerner: f64,
    pub lr_besov: f64,
    /// `"cl<=lr"`, `"lr<=cl"` or `"equal"` (for `r = q`).
    pub expected: String,
    pub holds: bool,
}

/// Checks `𝔏 <= L` for `r <= q` and `L <= 𝔏` for `q <= r` with relative slack.
pub fn minkowski_ordering_audit(
    traj: &Trajectory,
    shells: &ShellDecomposition,
    selector: FieldSelector,
    r: f64,
    idx: &BesovIndex,
) -> Result<MinkowskiReport> {
    let cl = chemin_lerner_norm(traj, shells, selector, r, idx)?;
    let lr = lr_besov_norm(traj, shells, selector, r, idx)?;
    let slack = MINKOWSKI_SLACK * cl.max(lr).max(f64::MIN_POSITIVE);
    let (expected, holds) = if r == idx.q {
        ("equal", (cl - lr).abs() <= slack)
    } else if r < idx.q {
        ("cl<=lr", cl <= lr + slack)
    } else {
        ("lr<=cl", lr <= cl + slack)
    };
    Ok(MinkowskiReport { r, q: idx.q, chemin_lerner: cl, lr_besov: lr, expected: expected.into(), holds })
}
