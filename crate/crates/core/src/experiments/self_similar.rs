//! Profile collapse `t·v(y√t, t) ≈ V(y)` for data homogeneous of degree `-2`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{constants_map, critical_pair_norm, ExperimentSpec};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::littlewood_paley::Measure;
use crate::random::derive_seed;
use crate::report::Series;
use crate::solver::{evolve, EmpiricalConstants, SolverConfig, StatePair};

/// Spectral mollifier: one below `|k| = 1.5/h`, zero above `|k| = 2/h`.
const CUTOFF_START: f64 = 1.5;
const CUTOFF_END: f64 = 2.0;
/// Lattice points per unit of `y` along each axis.
const PROFILE_DENSITY: f64 = 4.0;

fn smooth_step(t: f64) -> f64 {
    let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let t = t.clamp(0.0, 1.0);
    f(t) / (f(t) + f(1.0 - t))
}

/// Spectrally mollified data homogeneous of degree `-2`:
/// `v̂ = a L⁻ⁿ |k|^{2-n} (1 + c Q(k)) η(|k|)`, `ŵ` with `-c`, where
/// `Q = (k₁² - k₂²)/|k|²`.
///
/// In two dimensions this is `a(δ + c·K)` with `K` the degree `-2` kernel of `Q`,
/// so the nonlinearity sees `v - w = 2acK`. The `δ` keeps its mass `a` there (equal
/// means, so still neutral); for `n >= 3` the zero mode is dropped.
pub fn homogeneous_data(grid: &Grid, amplitude: f64, quadrupole: f64) -> Result<StatePair> {
    let h = grid.spacing();
    let n = grid.dim() as i32;
    let volume = grid.box_length().powi(n);
    let symbol = |k: &[f64], sign: f64| -> f64 {
        let k2: f64 = k.iter().map(|x| x * x).sum();
        if k2 == 0.0 {
            return if n == 2 { amplitude / volume } else { 0.0 };
        }
        let r = k2.sqrt();
        let eta = 1.0 - smooth_step((r * h - CUTOFF_START) / (CUTOFF_END - CUTOFF_START));
        let q = (k[0] * k[0] - k[1] * k[1]) / k2;
        amplitude / volume * r.powi(2 - n) * (1.0 + sign * quadrupole * q) * eta
    };
    let build = |sign: f64| -> Result<SpectralField> {
        let coeffs = (0..grid.len()).map(|flat| symbol(&grid.wavevector(flat), sign).into()).collect();
        SpectralField::from_coeffs(grid, coeffs)
    };
    StatePair::new(build(1.0)?, build(-1.0)?)
}

/// Lattice `y ∈ [-W, W]ⁿ ∩ {|y| <= W}` with `PROFILE_DENSITY` points per unit.
fn profile_lattice(dim: usize, window: f64) -> Vec<Vec<f64>> {
    let per_side = (window * PROFILE_DENSITY).round() as i64;
    let step = if per_side > 0 { window / per_side as f64 } else { 0.0 };
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-per_side..=per_side).map(move |i| {
                    let mut q = p.clone();
                    q.push(i as f64 * step);
                    q
                })
            })
            .collect();
    }
    out.retain(|y| y.iter().map(|c| c * c).sum::<f64>() <= window * window * (1.0 + 1e-12));
    out
}

/// `t·f(y√t)` over the profile lattice, summing only modes above roundoff.
pub fn profile_samples(f: &SpectralField, t: f64, window: f64) -> Vec<f64> {
    let grid = f.grid();
    let cmax = f.max_abs_coeff();
    let modes: Vec<(Vec<f64>, num_complex::Complex64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 1e-18 * cmax)
        .map(|(flat, &c)| (grid.wavevector(flat), c))
        .collect();
    let root = t.sqrt();
    profile_lattice(grid.dim(), window)
        .par_iter()
        .map(|y| {
            let sum: f64 = modes
                .iter()
                .map(|(k, c)| {
                    let phase: f64 = k.iter().zip(y).map(|(a, b)| a * b * root).sum();
                    c.re * phase.cos() - c.im * phase.sin()
                })
                .sum();
            t * sum
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TimeDeviation {
    pub t: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRun {
    pub points: usize,
    pub box_length: f64,
    /// `Ḃ^{-2+n/p}_{p,∞}` norm of the data, Lebesgue measure.
    pub critical_norm: f64,
    /// Deviation of each profile from the one at the last time, relative to its maximum.
    pub deviations: Vec<TimeDeviation>,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfSimilarReport {
    pub amplitude: f64,
    pub quadrupole: f64,
    pub spacing: f64,
    pub window: f64,
    pub times: Vec<f64>,
    pub constants: EmpiricalConstants,
    /// Data norm above which the experiment refuses to run.
    pub refusal_threshold: f64,
    /// The same deviation for the pure heat flow of the data.
    pub linear_control_deviation: f64,
    pub run: ProfileRun,
    /// Smaller box at the same spacing.
    pub refinement: ProfileRun,
    pub decreasing_under_refinement: bool,
    pub tolerance: f64,
    pub passed: bool,
}

impl SelfSimilarReport {
    pub fn constants(&self) -> BTreeMap<String, f64> {
        let mut m = constants_map(&self.constants);
        m.insert("refusal_threshold".into(), self.refusal_threshold);
        m
    }

    pub fn series(&self) -> Vec<Series> {
        [(&self.run, "deviation"), (&self.refinement, "deviation (small box)")]
            .into_iter()
            .map(|(run, name)| Series {
                name: name.into(),
                x: run.deviations.iter().map(|d| d.t).collect(),
                y: run.deviations.iter().map(|d| d.deviation).collect(),
            })
            .collect()
    }
}

fn collapse(profiles: &[(f64, Vec<f64>)]) -> (Vec<TimeDeviation>, f64) {
    let (_, reference) = profiles.last().expect("at least one time");
    let scale = reference.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let deviations: Vec<TimeDeviation> = profiles
        .iter()
        .map(|(t, p)| {
            let diff = p.iter().zip(reference).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            TimeDeviation { t: *t, deviation: if scale > 0.0 { diff / scale } else { diff } }
        })
        .collect();
    let max = deviations.iter().map(|d| d.deviation).fold(0.0, f64::max);
    (deviations, max)
}

/// Profiles of `v` and `w` at each time; deviations take the worse species.
fn profile_run(states: &[(f64, StatePair)], window: f64) -> (Vec<TimeDeviation>, f64) {
    let per_species = |pick: fn(&StatePair) -> &SpectralField| {
        let profiles: Vec<(f64, Vec<f64>)> =
            states.iter().map(|(t, s)| (*t, profile_samples(pick(s), *t, window))).collect();
        collapse(&profiles)
    };
    let (dv, mv) = per_species(|s| &s.v);
    let (dw, mw) = per_species(|s| &s.w);
    let merged = dv
        .into_iter()
        .zip(dw)
        .map(|(a, b)| TimeDeviation { t: a.t, deviation: a.deviation.max(b.deviation) })
        .collect();
    (merged, mv.max(mw))
}

fn snapshots_at(data: &StatePair, cfg: &SolverConfig, times: &[f64]) -> Result<Vec<(f64, StatePair)>> {
    let traj = evolve(data, cfg)?;
    times
        .iter()
        .map(|&t| {
            let i = traj
                .times()
                .iter()
                .position(|&s| (s - t).abs() <= 1e-9 * t)
                .ok_or_else(|| Error::InvalidConfig(format!("time {t} is not a snapshot time")))?;
            Ok((t, traj.states()[i].clone()))
        })
        .collect()
}

fn critical_norm(data: &StatePair, cfg: &SolverConfig) -> f64 {
    let cfg = SolverConfig { q: f64::INFINITY, ..cfg.clone() };
    critical_pair_norm(data, &cfg, Measure::Lebesgue)
}

fn run_on(grid: &Grid, spec: &ExperimentSpec, times: &[f64], window: f64) -> Result<ProfileRun> {
    let data = homogeneous_data(grid, spec.amplitude.expect("validated"), spec.quadrupole.expect("validated"))?;
    let (deviations, max_deviation) = profile_run(&snapshots_at(&data, &spec.solver, times)?, window);
    Ok(ProfileRun {
        points: grid.points(),
        box_length: grid.box_length(),
        critical_norm: critical_norm(&data, &spec.solver),
        deviations,
        max_deviation,
    })
}

/// Measures the refusal threshold on a `32ⁿ` box of side `2π` with a long horizon.
/// The Lebesgue critical norm is dilation invariant, so it transfers to any box.
fn refusal_threshold(spec: &ExperimentSpec) -> Result<(EmpiricalConstants, f64)> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let grid = Grid::new(spec.dim, 32, two_pi)?;
    let cfg = SolverConfig { dt: 0.1, horizon: 50.0, q: f64::INFINITY, ..spec.solver.clone() };
    let constants =
        EmpiricalConstants::measure(&grid, &cfg, spec.trials.expect("validated"), derive_seed(spec.seed, &[0]))?;
    let lebesgue = two_pi.powf(spec.dim as f64 / cfg.p);
    Ok((constants, constants.predicted_threshold() * lebesgue))
}

/// Evolves homogeneous data on two boxes of the same spacing and compares
/// rescaled profiles at `times`, against a pure heat-flow control.
pub fn self_similar_experiment(spec: &ExperimentSpec) -> Result<SelfSimilarReport> {
    spec.validate()?;
    let grid = spec.grid()?;
    if grid.dim() < 2 {
        return Err(Error::InvalidConfig("self-similar data needs n >= 2".into()));
    }
    let window = spec.window.expect("validated");
    let times = spec.times.clone().expect("validated");
    let t_max = times.iter().copied().fold(0.0, f64::max);
    if window * t_max.sqrt() > 0.25 * grid.box_length() {
        return Err(Error::InvalidConfig(format!(
            "window {window} at t = {t_max} leaves the inner half of a box of side {}",
            grid.box_length()
        )));
    }
    let (constants, threshold) = refusal_threshold(spec)?;
    let amplitude = spec.amplitude.expect("validated");
    let quadrupole = spec.quadrupole.expect("validated");
    let data = homogeneous_data(&grid, amplitude, quadrupole)?;
    let norm = critical_norm(&data, &spec.solver);
    if norm > threshold {
        return Err(Error::Refused(format!(
            "data norm {norm:.4e} exceeds the measured smallness threshold {threshold:.4e}"
        )));
    }

    let m = spec.refinement_points.expect("validated");
    let small = Grid::new(grid.dim(), m, grid.spacing() * m as f64)?;
    let (run, refinement) = rayon::join(|| run_on(&grid, spec, &times, window), || run_on(&small, spec, &times, window));
    let (run, refinement) = (run?, refinement?);

    let linear: Vec<(f64, StatePair)> =
        times.iter().map(|&t| Ok((t, data.heat(t)?))).collect::<Result<_>>()?;
    let (_, linear_control_deviation) = profile_run(&linear, window);

    let tolerance = spec.tolerance.expect("validated");
    let decreasing_under_refinement = run.max_deviation < refinement.max_deviation;
    Ok(SelfSimilarReport {
        amplitude,
        quadrupole,
        spacing: grid.spacing(),
        window,
        times,
        constants,
        refusal_threshold: threshold,
        linear_control_deviation,
        passed: run.max_deviation < tolerance && decreasing_under_refinement,
        run,
        refinement,
        decreasing_under_refinement,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentKind;
    use std::f64::consts::PI;

    #[test]
    fn data_is_homogeneous_of_degree_minus_two() {
        // On a box twice as large with the same spacing ratio, λ²v(λx) on shared modes.
        let a = Grid::new(2, 32, 32.0).unwrap();
        let b = Grid::new(2, 32, 16.0).unwrap();
        let da = homogeneous_data(&a, 0.3, 0.5).unwrap();
        let db = homogeneous_data(&b, 0.3, 0.5).unwrap();
        let dil = crate::littlewood_paley::dyadic_dilation(&da.v, 1).unwrap();
        let err = dil.try_sub(&db.v).unwrap().max_abs_coeff();
        assert!(err < 1e-15 * db.v.max_abs_coeff(), "{err}");
        assert!(da.is_neutral());
    }

    #[test]
    fn heat_kernel_collapses_exactly() {
        let g = Grid::new(2, 64, 64.0).unwrap();
        let data = homogeneous_data(&g, 1.0, 0.0).unwrap();
        let states: Vec<(f64, StatePair)> =
            [10.0, 20.0, 40.0].iter().map(|&t| (t, data.heat(t).unwrap())).collect();
        let (_, dev) = profile_run(&states, 1.5);
        assert!(dev < 1e-8, "{dev}");
        // The profile at y = 0 is the heat kernel peak 1/4π.
        let p = profile_samples(&states[0].1.v, 10.0, 0.0)[0];
        let expected = 1.0 / (4.0 * PI);
        assert!((p - expected).abs() < 1e-8, "{p} vs {expected}");
    }

    #[test]
    fn lattice_is_a_ball() {
        let pts = profile_lattice(2, 1.0);
        assert!(pts.iter().all(|y| y[0] * y[0] + y[1] * y[1] <= 1.0 + 1e-12));
        assert!(pts.iter().any(|y| y == &vec![0.0, 0.0]));
        assert_eq!(profile_lattice(3, 0.5).len(), profile_lattice(3, 0.5).iter().filter(|y| y.len() == 3).count());
    }

    #[test]
    fn large_amplitude_is_refused() {
        let mut spec = ExperimentSpec::defaults(ExperimentKind::SelfSimilar);
        spec.points = 64;
        spec.box_length = 64.0;
        spec.refinement_points = Some(32);
        spec.times = Some(vec![5.0, 10.0]);
        spec.window = Some(2.0);
        spec.trials = Some(2);
        spec.solver = SolverConfig { dt: 0.25, horizon: 10.0, snapshot_every: 20, ..Default::default() };
        spec.amplitude = Some(1e3);
        assert!(matches!(self_similar_experiment(&spec), Err(Error::Refused(_))));
    }
}
