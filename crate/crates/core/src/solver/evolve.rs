//! Direct time stepping with second-order exponential time differencing.

use serde::Serialize;

use super::config::SolverConfig;
use super::etd::ExpTables;
use super::nonlinear::pair_nonlinearity;
use super::picard::prepare_data;
use super::state::StatePair;
use crate::chemin_lerner::Trajectory;
use crate::error::{Error, Result};
use crate::field::SpectralField;

/// Coefficient amplitude treated as blow-up even while still finite.
pub const BLOW_UP_AMPLITUDE: f64 = 1e100;

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct AmplitudeSample {
    pub t: f64,
    pub max_abs_coeff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowUpDiagnostic {
    pub last_finite_time: f64,
    /// Extrapolated from `1/A(t)` over the last two finite samples, when it is decreasing.
    pub blow_up_time_estimate: Option<f64>,
    pub amplitude_history: Vec<AmplitudeSample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveDiagnostics {
    pub steps: usize,
    pub dt: f64,
    /// Largest single-step change of the zero mode of `v` or `w`.
    pub max_zero_mode_drift: f64,
    /// `max |mean(t) - mean(0)|` over the run.
    pub total_zero_mode_drift: f64,
    pub amplitude_history: Vec<AmplitudeSample>,
}

fn apply(tables_e: &[f64], u: &SpectralField) -> Vec<num_complex::Complex64> {
    u.coeffs().iter().zip(tables_e).map(|(c, e)| c * e).collect()
}

/// One ETD-RK2 step: `a = e^{hΔ}u + hφ₁N(u)`, `u⁺ = a + hφ₂(N(a) - N(u))`.
fn etd_step(u: &StatePair, t: &ExpTables, dealias: bool) -> Result<StatePair> {
    let nu = pair_nonlinearity(u, u, dealias)?;
    let stage = |x: &SpectralField, n: &SpectralField| {
        let mut c = apply(&t.e, x);
        for ((ci, ni), w) in c.iter_mut().zip(n.coeffs()).zip(&t.hphi1) {
            *ci += ni * w;
        }
        SpectralField::from_coeffs(x.grid(), c)
    };
    let a = StatePair::new(stage(&u.v, &nu.v)?, stage(&u.w, &nu.w)?)?;
    let na = pair_nonlinearity(&a, &a, dealias)?;
    let correct = |x: &SpectralField, n1: &SpectralField, n0: &SpectralField| {
        let mut c = x.coeffs().to_vec();
        for (((ci, a1), a0), w) in c.iter_mut().zip(n1.coeffs()).zip(n0.coeffs()).zip(&t.hphi2) {
            *ci += (a1 - a0) * w;
        }
        SpectralField::from_coeffs(x.grid(), c)
    };
    StatePair::new(correct(&a.v, &na.v, &nu.v)?, correct(&a.w, &na.w, &nu.w)?)
}

fn blow_up_estimate(history: &[AmplitudeSample]) -> Option<f64> {
    let [.., a, b] = history else { return None };
    let (ia, ib) = (1.0 / a.max_abs_coeff, 1.0 / b.max_abs_coeff);
    if !(ib < ia) || b.t <= a.t {
        return None;
    }
    Some(b.t + ib * (b.t - a.t) / (ia - ib))
}

/// Trajectory sampled every `snapshot_every` steps (and at the final time).
pub fn evolve(data: &StatePair, cfg: &SolverConfig) -> Result<Trajectory> {
    evolve_with_diagnostics(data, cfg).map(|(traj, _)| traj)
}

pub fn evolve_with_diagnostics(data: &StatePair, cfg: &SolverConfig) -> Result<(Trajectory, EvolveDiagnostics)> {
    cfg.validate(data.grid().dim())?;
    let mut u = prepare_data(data, cfg)?;
    let steps = cfg.steps();
    let h = cfg.step();
    let tables = ExpTables::new(u.grid(), h);
    let means0 = (u.v.coeffs()[0], u.w.coeffs()[0]);
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    let mut history = vec![AmplitudeSample { t: 0.0, max_abs_coeff: u.max_abs_coeff() }];
    let mut max_step_drift: f64 = 0.0;
    let mut total_drift: f64 = 0.0;
    for step in 1..=steps {
        let t = if step == steps { cfg.horizon } else { step as f64 * h };
        let next = etd_step(&u, &tables, cfg.dealias)?;
        let amplitude = next.max_abs_coeff();
        if !next.is_finite() || !(amplitude < BLOW_UP_AMPLITUDE) {
            let last_finite_time = t - h;
            return Err(Error::BlowUp(Box::new(BlowUpDiagnostic {
                last_finite_time,
                blow_up_time_estimate: blow_up_estimate(&history),
                amplitude_history: history,
            })));
        }
        max_step_drift = max_step_drift
            .max((next.v.coeffs()[0] - u.v.coeffs()[0]).norm())
            .max((next.w.coeffs()[0] - u.w.coeffs()[0]).norm());
        total_drift = total_drift
            .max((next.v.coeffs()[0] - means0.0).norm())
            .max((next.w.coeffs()[0] - means0.1).norm());
        u = next;
        if step % cfg.snapshot_every == 0 || step == steps {
            times.push(t);
            states.push(u.clone());
            history.push(AmplitudeSample { t, max_abs_coeff: amplitude });
        }
    }
    let diagnostics = EvolveDiagnostics {
        steps,
        dt: h,
        max_zero_mode_drift: max_step_drift,
        total_zero_mode_drift: total_drift,
        amplitude_history: history,
    };
    Ok((Trajectory::new(times, states)?, diagnostics))
}
