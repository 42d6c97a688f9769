//! Mild formulation: heat flow of the data, the Duhamel bilinear form `B`
//! and the Picard map `𝒢(u) = e^{tΔ}u₀ + B(u, u)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::SolverConfig;
use super::etd::ExpTables;
use super::nonlinear::pair_nonlinearity;
use super::state::StatePair;
use crate::chemin_lerner::{chemin_lerner_norm, FieldSelector, Trajectory};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::littlewood_paley::{DyadicPartition, ShellDecomposition};

/// `t ↦ (e^{tΔ}v₀, e^{tΔ}w₀)` sampled at `times`.
pub fn heat_flow(data: &StatePair, times: &[f64]) -> Result<Trajectory> {
    let states = times.par_iter().map(|&t| data.heat(t)).collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), states)
}

fn uniform_step(traj: &Trajectory) -> Result<f64> {
    match traj.uniform_step() {
        Some(h) => Ok(h),
        None if traj.len() == 1 => Ok(0.0),
        None => Err(Error::InvalidTrajectory("Duhamel quadrature needs uniform samples".into())),
    }
}

fn combine(out: &mut [Complex64], terms: &[(&[f64], &[Complex64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = terms.iter().map(|(w, c)| c[i] * w[i]).sum();
    }
}

fn zip_species(
    a: &StatePair,
    f: impl Fn(&SpectralField, usize) -> Result<SpectralField>,
) -> Result<StatePair> {
    StatePair::new(f(&a.v, 0)?, f(&a.w, 1)?)
}

/// `D(t_i) = ∫₀^{t_i} e^{(t_i-τ)Δ} N(τ) dτ` with `N` linear between samples
/// and the heat factor integrated exactly (exponential trapezoid).
pub fn duhamel_integral(sources: &[StatePair], h: f64) -> Result<Vec<StatePair>> {
    let Some(first) = sources.first() else {
        return Ok(Vec::new());
    };
    let grid = first.grid().clone();
    let tables = ExpTables::new(&grid, h);
    let w0: Vec<f64> = tables.hphi1.iter().zip(&tables.hphi2).map(|(a, b)| a - b).collect();
    let mut out = Vec::with_capacity(sources.len());
    out.push(StatePair::zeros(&grid));
    for i in 0..sources.len() - 1 {
        let prev = &out[i];
        let (n0, n1) = (&sources[i], &sources[i + 1]);
        let next = zip_species(prev, |d, sp| {
            let pick = |s: &StatePair| if sp == 0 { s.v.coeffs().to_vec() } else { s.w.coeffs().to_vec() };
            let (c0, c1) = (pick(n0), pick(n1));
            let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
            combine(&mut coeffs, &[(&tables.e, d.coeffs()), (&w0, &c0), (&tables.hphi2, &c1)]);
            SpectralField::from_coeffs(&grid, coeffs)
        })?;
        out.push(next);
    }
    Ok(out)
}

fn nonlinear_samples(a: &Trajectory, b: &Trajectory, dealias: bool) -> Result<Vec<StatePair>> {
    if a.times() != b.times() {
        return Err(Error::InvalidTrajectory("bilinear form needs a common time grid".into()));
    }
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let same = std::ptr::eq(a, b);
    a.states()
        .par_iter()
        .zip(b.states())
        .map(|(x, y)| {
            if same {
                pair_nonlinearity(x, x, dealias)
            } else {
                let xy = pair_nonlinearity(x, y, dealias)?;
                let yx = pair_nonlinearity(y, x, dealias)?;
                Ok(xy.add(&yx)?.scale(0.5))
            }
        })
        .collect()
}

/// Symmetrized Duhamel bilinear form
/// `B(a, b)(t) = ∫₀ᵗ e^{(t-τ)Δ} ½[Ñ(a, b) + Ñ(b, a)](τ) dτ`.
pub fn bilinear_b(a: &Trajectory, b: &Trajectory, dealias: bool) -> Result<Trajectory> {
    let h = uniform_step(a)?;
    let sources = nonlinear_samples(a, b, dealias)?;
    Trajectory::new(a.times().to_vec(), duhamel_integral(&sources, h)?)
}

fn check_schedule(traj: &Trajectory, cfg: &SolverConfig) -> Result<()> {
    let steps = cfg.steps();
    if traj.len() != steps + 1 || (traj.horizon() - cfg.horizon).abs() > 1e-9 * cfg.horizon {
        return Err(Error::InvalidTrajectory(format!(
            "trajectory has {} samples on [0, {}], configuration expects {} on [0, {}]",
            traj.len(),
            traj.horizon(),
            steps + 1,
            cfg.horizon
        )));
    }
    Ok(())
}

/// `𝒢(u) = e^{tΔ}u₀ + B(u, u)`, sampled on `cfg`'s uniform grid.
pub fn picard_map(traj: &Trajectory, data: &StatePair, cfg: &SolverConfig) -> Result<Trajectory> {
    check_schedule(traj, cfg)?;
    let heat = heat_flow(data, traj.times())?;
    let b = bilinear_b(traj, traj, cfg.dealias)?;
    let states = heat.states().iter().zip(b.states()).map(|(y, d)| y.add(d)).collect::<Result<Vec<_>>>()?;
    Trajectory::new(traj.times().to_vec(), states)
}

/// Piecewise-quadratic exponential quadrature of the Duhamel integral, one
/// order above the trapezoid rule used by `picard_map`.
fn duhamel_integral_quadratic(sources: &[StatePair], h: f64) -> Result<Vec<StatePair>> {
    if sources.len() < 3 {
        return duhamel_integral(sources, h);
    }
    let grid = sources[0].grid().clone();
    let t = ExpTables::new(&grid, h);
    let n = grid.len();
    // Weights for nodes (-h, 0, h) and (0, h, 2h) in terms of hφ₁, hφ₂, hφ₃.
    let mut centred = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut forward = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let (p1, p2, p3) = (t.hphi1[i], t.hphi2[i], t.hphi3[i]);
        centred[0][i] = -0.5 * p2 + p3;
        centred[1][i] = p1 - 2.0 * p3;
        centred[2][i] = 0.5 * p2 + p3;
        forward[0][i] = p1 - 1.5 * p2 + p3;
        forward[1][i] = 2.0 * p2 - 2.0 * p3;
        forward[2][i] = -0.5 * p2 + p3;
    }
    let mut out = Vec::with_capacity(sources.len());
    out.push(StatePair::zeros(&grid));
    for i in 0..sources.len() - 1 {
        let (nodes, weights) = if i == 0 {
            ([&sources[0], &sources[1], &sources[2]], &forward)
        } else {
            ([&sources[i - 1], &sources[i], &sources[i + 1]], &centred)
        };
        let next = zip_species(&out[i], |d, sp| {
            let pick = |s: &StatePair| if sp == 0 { s.v.coeffs().to_vec() } else { s.w.coeffs().to_vec() };
            let c: Vec<Vec<Complex64>> = nodes.iter().map(|s| pick(s)).collect();
            let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
            combine(
                &mut coeffs,
                &[(&t.e, d.coeffs()), (&weights[0], &c[0]), (&weights[1], &c[1]), (&weights[2], &c[2])],
            );
            SpectralField::from_coeffs(&grid, coeffs)
        })?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MildResidual {
    /// `‖u - e^{tΔ}u₀ - B_quad(u, u)‖` in the monitor norm.
    pub absolute: f64,
    pub relative: f64,
}

/// Residual of the mild formulation evaluated with a higher-order quadrature.
///
/// For a fixed point of `picard_map` this measures the trapezoid quadrature
/// error, so it falls by about 4 when the step is halved.
pub fn mild_residual(traj: &Trajectory, data: &StatePair, cfg: &SolverConfig) -> Result<MildResidual> {
    let h = uniform_step(traj)?;
    let heat = heat_flow(data, traj.times())?;
    let sources = nonlinear_samples(traj, traj, cfg.dealias)?;
    let duhamel = duhamel_integral_quadratic(&sources, h)?;
    let residual = traj
        .states()
        .iter()
        .zip(heat.states())
        .zip(&duhamel)
        .map(|((u, y), d)| u.sub(y)?.sub(d))
        .collect::<Result<Vec<_>>>()?;
    let residual = Trajectory::new(traj.times().to_vec(), residual)?;
    let shells = ShellDecomposition::new(traj.grid(), DyadicPartition::new());
    let idx = cfg.monitor_index(traj.grid().dim());
    let absolute = chemin_lerner_norm(&residual, &shells, FieldSelector::Pair, cfg.r1, &idx)?;
    let norm = chemin_lerner_norm(traj, &shells, FieldSelector::Pair, cfg.r1, &idx)?;
    Ok(MildResidual { absolute, relative: if norm > 0.0 { absolute / norm } else { absolute } })
}
