//! Empirical audit of the Bernstein inequality
//! `‖D^s f‖_{L^q} <= C 2^{js + jn(1/p - 1/q)} ‖f‖_{L^p}` for `supp f̂ ⊂ {|ξ| <= 2^j}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::index::check_exponent;
use super::shells::lp_norm_of_samples;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::random::{bump_field, derive_seed};
use crate::report::extended_f64;

/// Maximum ratio spread (max/min - 1) across shells still counted as stable.
pub const BERNSTEIN_STABILITY: f64 = 0.2;

#[derive(Clone, Debug, Serialize)]
pub struct ShellRatio {
    pub j: i32,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BernsteinReport {
    pub seed: u64,
    pub trials: usize,
    pub s: f64,
    #[serde(with = "extended_f64")]
    pub p: f64,
    #[serde(with = "extended_f64")]
    pub q: f64,
    pub per_shell: Vec<ShellRatio>,
    pub max_ratio: f64,
    /// `max_j / min_j - 1` of the per-shell maxima.
    pub spread: f64,
    pub stable: bool,
}

/// Runs `trials` random low-pass fields per shell `j ∈ shells`.
///
/// Test fields are sums of up to three translated, dilated bumps with spectrum
/// in `|k| <= 2^j`, so the ratio is scale-free and the per-shell maxima can be
/// compared across `j`.
pub fn bernstein_audit(
    grid: &Grid,
    s: f64,
    p: f64,
    q: f64,
    shells: &[i32],
    trials: usize,
    seed: u64,
) -> Result<BernsteinReport> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if p > q {
        return Err(Error::InvalidExponent(format!("Bernstein audit needs p <= q, got p = {p}, q = {q}")));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidExponent(format!("derivative order must be >= 0, got {s}")));
    }
    if trials == 0 || shells.is_empty() {
        return Err(Error::InvalidExponent("Bernstein audit needs at least one trial and shell".into()));
    }
    let n = grid.dim() as f64;
    let per_shell: Vec<ShellRatio> = shells
        .iter()
        .map(|&j| {
            let max_ratio = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[j as i64 as u64, trial as u64]));
                    let f = bump_field(grid, &mut rng, j);
                    let deriv = if s == 0.0 { f.clone() } else { f.apply_radial(|k| k.powf(s), 0.0) };
                    let top = lp_norm_of_samples(&deriv.to_physical(), q);
                    let bottom = lp_norm_of_samples(&f.to_physical(), p);
                    let scale = 2f64.powf(j as f64 * s + j as f64 * n * (1.0 / p - 1.0 / q));
                    top / (scale * bottom)
                })
                .reduce(|| 0.0, f64::max);
            ShellRatio { j, max_ratio }
        })
        .collect();
    let max_ratio = per_shell.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    let min_ratio = per_shell.iter().map(|r| r.max_ratio).fold(f64::INFINITY, f64::min);
    let spread = max_ratio / min_ratio - 1.0;
    Ok(BernsteinReport {
        seed,
        trials,
        s,
        p,
        q,
        per_shell,
        max_ratio,
        spread,
        stable: spread <= BERNSTEIN_STABILITY,
    })
}

/// Bernstein ratio of a single prepared field at shell `j`.
pub fn bernstein_ratio(f: &crate::field::SpectralField, j: i32, s: f64, p: f64, q: f64) -> f64 {
    let n = f.grid().dim() as f64;
    let deriv = f.apply_radial(|k| k.powf(s), 0.0);
    let top = lp_norm_of_samples(&deriv.to_physical(), q);
    let bottom = lp_norm_of_samples(&f.to_physical(), p);
    top / (2f64.powf(j as f64 * s + j as f64 * n * (1.0 / p - 1.0 / q)) * bottom)
}
