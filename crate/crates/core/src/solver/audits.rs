//! Empirical constants: the bilinear constant `Ĉ₀`, heat-smoothing `Ĉ₁`,
//! low-frequency growth `Ĉ₂` and the product-estimate constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::SolverConfig;
use super::duhamel::{bilinear_b, heat_flow};
use super::picard::monitor_norm;
use super::state::StatePair;
use crate::chemin_lerner::time_lr_norm;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::littlewood_paley::{BesovIndex, DyadicPartition, ShellDecomposition};
use crate::random::{derive_seed, random_field, shell_localized_field};
use crate::report::extended_f64;

/// Relative spread `(max - min) / max` across horizons still counted as stable.
pub const HEAT_STABILITY: f64 = 0.3;
/// Ratios above this are not counted as bounded.
pub const RATIO_CEILING: f64 = 1e3;

/// Zero-mean random pair band-limited to the dealiased range `|k| <= (2/3)·πM/L`.
pub fn random_state<R: Rng>(grid: &Grid, rng: &mut R) -> StatePair {
    let kmax = grid.nyquist() * 2.0 / 3.0;
    let kmin = 0.5 * grid.fundamental();
    StatePair::new(random_field(grid, rng, kmin, kmax), random_field(grid, rng, kmin, kmax))
        .expect("same grid")
}

/// `0, t₁, t₁g, t₁g², …` with every horizon in `stops` inserted as a node.
pub fn graded_times(first: f64, growth: f64, stops: &[f64]) -> Vec<f64> {
    let end = stops.iter().cloned().fold(0.0, f64::max);
    let mut times = vec![0.0];
    let mut t = first;
    while t < end {
        times.push(t);
        t *= growth;
    }
    times.extend_from_slice(stops);
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    times
}

/// `max ‖B(y, y)‖_X / ‖y‖²_X` over heat flows `y` of random data on `cfg`'s time grid.
pub fn estimate_c0(grid: &Grid, cfg: &SolverConfig, trials: usize, seed: u64) -> Result<f64> {
    cfg.validate(grid.dim())?;
    if trials == 0 {
        return Err(Error::InvalidConfig("estimate_c0 needs at least one trial".into()));
    }
    let times = cfg.times();
    let mut best: f64 = 0.0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[trial as u64]));
        let y = heat_flow(&random_state(grid, &mut rng), &times)?;
        let norm = monitor_norm(&y, cfg)?;
        if norm == 0.0 {
            continue;
        }
        let b = bilinear_b(&y, &y, cfg.dealias)?;
        best = best.max(monitor_norm(&b, cfg)? / (norm * norm));
    }
    Ok(best)
}

/// Which random data the heat audit uses.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditData {
    /// White noise over the dealiased band.
    Broadband,
    /// Data concentrated on one of the listed dyadic shells.
    ShellLocalized(Vec<i32>),
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatAuditConfig {
    pub index: BesovIndex,
    pub r_values: Vec<f64>,
    pub horizons: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub data: AuditData,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatAuditEntry {
    #[serde(with = "extended_f64")]
    pub r: f64,
    pub horizon: f64,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatSpread {
    #[serde(with = "extended_f64")]
    pub r: f64,
    /// `(max_T - min_T) / max_T` of the per-horizon maxima.
    pub spread: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatAuditReport {
    pub config: HeatAuditConfig,
    pub time_samples: usize,
    pub entries: Vec<HeatAuditEntry>,
    pub spreads: Vec<HeatSpread>,
    /// Largest ratio over all `(r, T)`: the constant `Ĉ₁`.
    pub max_ratio: f64,
    pub bounded: bool,
    pub stable: bool,
}

/// Audits `‖e^{tΔ}f‖_{𝔏^r(0,T; Ḃ^{s+2/r})} / ‖f‖_{Ḃ^s}` over random data.
///
/// Times are geometrically graded from a step resolving the largest
/// wavenumber, so one table per draw serves every horizon.
pub fn heat_smoothing_audit(grid: &Grid, cfg: &HeatAuditConfig) -> Result<HeatAuditReport> {
    if cfg.trials == 0 || cfg.r_values.is_empty() || cfg.horizons.is_empty() {
        return Err(Error::InvalidConfig("heat audit needs trials, r values and horizons".into()));
    }
    if cfg.r_values.iter().any(|&r| !(r >= 1.0)) || cfg.horizons.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidConfig("heat audit needs r >= 1 and positive horizons".into()));
    }
    let shells = ShellDecomposition::new(grid, DyadicPartition::new());
    let kmax2 = grid.max_wavenumber().powi(2);
    let times = graded_times(0.01 / kmax2, 1.03, &cfg.horizons);
    let idx = cfg.index;

    // ratios[trial][r][T]
    let ratios: Vec<Vec<Vec<f64>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[trial as u64]));
            let f = match &cfg.data {
                AuditData::Broadband => {
                    random_field(grid, &mut rng, 0.5 * grid.fundamental(), grid.nyquist() * 2.0 / 3.0)
                }
                AuditData::ShellLocalized(list) => {
                    let j = list[rng.random_range(0..list.len())];
                    shell_localized_field(grid, &mut rng, j)
                }
            };
            let base = shells.besov_norm(&f, &idx);
            // table[shell][time]
            let per_time: Vec<Vec<f64>> =
                times.iter().map(|&t| Ok(shells.shell_lp_norms(&f.heat(t)?, idx.p))).collect::<Result<_>>()?;
            let n_shells = per_time[0].len();
            let table: Vec<Vec<f64>> = (0..n_shells).map(|j| per_time.iter().map(|row| row[j]).collect()).collect();
            let by_r = cfg
                .r_values
                .iter()
                .map(|&r| {
                    let gain = if r.is_infinite() { 0.0 } else { 2.0 / r };
                    let target = idx.with_regularity(idx.s + gain);
                    cfg.horizons
                        .iter()
                        .map(|&horizon| {
                            let end = times.iter().position(|&t| t >= horizon * (1.0 - 1e-12)).expect("horizon is a node");
                            let norms: Vec<f64> =
                                table.iter().map(|row| time_lr_norm(&times[..=end], &row[..=end], r)).collect();
                            shells.combine(&norms, &target) / base
                        })
                        .collect()
                })
                .collect();
            Ok(by_r)
        })
        .collect::<Result<_>>()?;

    let mut entries = Vec::new();
    let mut spreads = Vec::new();
    for (ri, &r) in cfg.r_values.iter().enumerate() {
        let maxima: Vec<f64> = (0..cfg.horizons.len())
            .map(|ti| ratios.iter().map(|tr| tr[ri][ti]).fold(0.0, f64::max))
            .collect();
        for (&horizon, &max_ratio) in cfg.horizons.iter().zip(&maxima) {
            entries.push(HeatAuditEntry { r, horizon, max_ratio });
        }
        let hi = maxima.iter().cloned().fold(0.0, f64::max);
        let lo = maxima.iter().cloned().fold(f64::INFINITY, f64::min);
        spreads.push(HeatSpread { r, spread: if hi > 0.0 { (hi - lo) / hi } else { 0.0 } });
    }
    let max_ratio = entries.iter().map(|e| e.max_ratio).fold(0.0, f64::max);
    Ok(HeatAuditReport {
        config: cfg.clone(),
        time_samples: times.len(),
        bounded: max_ratio.is_finite() && max_ratio <= RATIO_CEILING,
        stable: spreads.iter().all(|s| s.spread <= HEAT_STABILITY),
        entries,
        spreads,
        max_ratio,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductBand {
    /// Largest wavenumber of the inputs in this band.
    pub kmax: f64,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductAuditReport {
    pub seed: u64,
    pub trials: usize,
    pub s1: f64,
    pub s2: f64,
    pub target_s: f64,
    #[serde(with = "extended_f64")]
    pub p: f64,
    #[serde(with = "extended_f64")]
    pub q: f64,
    pub bands: Vec<ProductBand>,
    pub max_ratio: f64,
    /// Finite, below the ceiling and not growing with the frequency band.
    pub bounded: bool,
}

/// Audits `‖fg‖_{Ḃ^{s₁+s₂-n/p}} <= C ‖f‖_{Ḃ^{s₁}} ‖g‖_{Ḃ^{s₂}}` with
/// `s₁ = -2+n/p+2/r₁`, `s₂ = -1+n/p+2/r₁`.
///
/// Inputs are band-limited to `|k_l| < M/4` so the grid product is exact.
/// Trials cycle through frequency bands and random spectral slopes.
pub fn product_audit(grid: &Grid, p: f64, q: f64, r1: f64, trials: usize, seed: u64) -> Result<ProductAuditReport> {
    let n = grid.dim() as f64;
    let s1 = -2.0 + n / p + 2.0 / r1;
    let s2 = -1.0 + n / p + 2.0 / r1;
    if !(s1 < n / p && s2 < n / p && s1 + s2 > 0.0) {
        return Err(Error::InvalidExponent(format!("product estimate needs s1, s2 < n/p and s1 + s2 > 0, got {s1}, {s2}")));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("product audit needs at least one trial".into()));
    }
    let shells = ShellDecomposition::new(grid, DyadicPartition::new());
    let target_s = s1 + s2 - n / p;
    let (i1, i2, it) = (BesovIndex::new(s1, p, q)?, BesovIndex::new(s2, p, q)?, BesovIndex::new(target_s, p, q)?);
    let top = (grid.points() / 4 - 1) as f64 * grid.fundamental();
    let bands: Vec<f64> = (0..4).map(|b| top / 2f64.powi(b)).filter(|&k| k >= 2.0 * grid.fundamental()).rev().collect();
    let ratios: Vec<(usize, f64)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let band = trial % bands.len();
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[trial as u64]));
            let draw = |rng: &mut ChaCha8Rng| -> SpectralField {
                let slope: f64 = rng.random_range(-2.0..1.0);
                random_field(grid, rng, grid.fundamental() * 0.5, bands[band]).apply_radial(|k| k.powf(slope), 0.0)
            };
            let f = draw(&mut rng);
            let g = draw(&mut rng);
            let fg = f.product(&g)?;
            let ratio = shells.besov_norm(&fg, &it) / (shells.besov_norm(&f, &i1) * shells.besov_norm(&g, &i2));
            Ok((band, ratio))
        })
        .collect::<Result<_>>()?;
    let bands: Vec<ProductBand> = bands
        .iter()
        .enumerate()
        .map(|(b, &kmax)| ProductBand {
            kmax,
            max_ratio: ratios.iter().filter(|(i, _)| *i == b).map(|r| r.1).fold(0.0, f64::max),
        })
        .collect();
    let max_ratio = bands.iter().map(|b| b.max_ratio).fold(0.0, f64::max);
    let first = bands.first().map_or(0.0, |b| b.max_ratio);
    let not_growing = bands.last().is_none_or(|b| b.max_ratio <= 2.0 * first);
    Ok(ProductAuditReport {
        seed,
        trials,
        s1,
        s2,
        target_s,
        p,
        q,
        bounded: max_ratio.is_finite() && max_ratio <= RATIO_CEILING && not_growing,
        bands,
        max_ratio,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LowFrequencyReport {
    pub cutoffs: Vec<i32>,
    pub horizons: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// `Ĉ₂`.
    pub max_ratio: f64,
}

/// Audits `‖e^{tΔ}f‖_{𝔏^{r₁}(0,T; Ḃ^{s+2/r₁})} <= C₂ 2^{2N/r₁} T^{1/r₁} ‖f‖_{Ḃ^s}`
/// for random `f` supported in `|k| <= 2^N`.
pub fn low_frequency_audit(
    grid: &Grid,
    index: &BesovIndex,
    r1: f64,
    cutoffs: &[i32],
    horizons: &[f64],
    trials: usize,
    seed: u64,
) -> Result<LowFrequencyReport> {
    if cutoffs.is_empty() || horizons.is_empty() || trials == 0 {
        return Err(Error::InvalidConfig("low-frequency audit needs cutoffs, horizons and trials".into()));
    }
    let shells = ShellDecomposition::new(grid, DyadicPartition::new());
    let target = index.with_regularity(index.s + 2.0 / r1);
    let mut jobs = Vec::new();
    for &n in cutoffs {
        for &t in horizons {
            for trial in 0..trials {
                jobs.push((n, t, trial));
            }
        }
    }
    let ratios: Vec<f64> = jobs
        .into_par_iter()
        .map(|(n, horizon, trial)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[n as i64 as u64, horizon.to_bits(), trial as u64]));
            let f = random_field(grid, &mut rng, 0.5 * grid.fundamental(), 2f64.powi(n));
            let base = shells.besov_norm(&f, index);
            if base == 0.0 {
                return Ok(0.0);
            }
            let times: Vec<f64> = (0..=200).map(|i| horizon * i as f64 / 200.0).collect();
            let per_time: Vec<Vec<f64>> =
                times.iter().map(|&t| Ok(shells.shell_lp_norms(&f.heat(t)?, index.p))).collect::<Result<_>>()?;
            let norms: Vec<f64> = (0..per_time[0].len())
                .map(|j| time_lr_norm(&times, &per_time.iter().map(|row| row[j]).collect::<Vec<_>>(), r1))
                .collect();
            let scale = 2f64.powf(2.0 * n as f64 / r1) * horizon.powf(1.0 / r1) * base;
            Ok(shells.combine(&norms, &target) / scale)
        })
        .collect::<Result<_>>()?;
    Ok(LowFrequencyReport {
        cutoffs: cutoffs.to_vec(),
        horizons: horizons.to_vec(),
        trials,
        seed,
        max_ratio: ratios.into_iter().fold(0.0, f64::max),
    })
}

/// The measured stand-ins for the constants of the existence argument.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct EmpiricalConstants {
    /// Bilinear bound `‖B(u, u)‖_X <= Ĉ₀ ‖u‖²_X`.
    pub c0: f64,
    /// Heat smoothing `‖e^{tΔ}u₀‖_X <= Ĉ₁ ‖u₀‖_{Ḃ^{-2+n/p}}`.
    pub c1: f64,
    /// Low-frequency bound `‖e^{tΔ}u₀‖_X <= Ĉ₂ 2^{2N/r₁} T^{1/r₁} ‖u₀‖`.
    pub c2: f64,
    pub seed: u64,
}

impl EmpiricalConstants {
    /// Runs the three audits on `grid` with `cfg`'s monitor space and horizon.
    pub fn measure(grid: &Grid, cfg: &SolverConfig, trials: usize, seed: u64) -> Result<Self> {
        cfg.validate(grid.dim())?;
        let c0 = estimate_c0(grid, cfg, trials, derive_seed(seed, &[0]))?;
        let critical = cfg.critical_index(grid.dim());
        let heat = heat_smoothing_audit(
            grid,
            &HeatAuditConfig {
                index: critical,
                r_values: vec![cfg.r1],
                horizons: vec![cfg.horizon],
                trials,
                seed: derive_seed(seed, &[1]),
                data: AuditData::Broadband,
            },
        )?;
        let (lo, hi) = crate::littlewood_paley::representable_range(grid);
        let cutoffs: Vec<i32> = (lo.max(0)..=hi - 2).collect();
        let low = low_frequency_audit(
            grid,
            &critical,
            cfg.r1,
            if cutoffs.is_empty() { &[0] } else { &cutoffs },
            &[cfg.horizon * 0.01, cfg.horizon],
            trials.min(8),
            derive_seed(seed, &[2]),
        )?;
        Ok(Self { c0, c1: heat.max_ratio, c2: low.max_ratio, seed })
    }

    /// `ε = 1/(8Ĉ₀)`, half the contraction limit `1/(4Ĉ₀)`.
    pub fn working_epsilon(&self) -> f64 {
        1.0 / (8.0 * self.c0)
    }

    /// Predicted critical data norm `1/(4 Ĉ₀ Ĉ₁)`.
    pub fn predicted_threshold(&self) -> f64 {
        1.0 / (4.0 * self.c0 * self.c1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn graded_grid_contains_horizons() {
        let t = graded_times(1e-3, 1.5, &[0.1, 1.0]);
        assert_eq!(t[0], 0.0);
        assert!(t.contains(&0.1) && t.contains(&1.0));
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*t.last().unwrap(), 1.0);
    }

    #[test]
    fn c0_is_finite_and_positive() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let cfg = SolverConfig { dt: 0.05, horizon: 0.5, ..Default::default() };
        let c0 = estimate_c0(&g, &cfg, 2, 1).unwrap();
        assert!(c0.is_finite() && c0 > 0.0);
        assert!(estimate_c0(&g, &cfg, 0, 1).is_err());
    }

    #[test]
    fn heat_audit_r_infinity_is_identity() {
        // sup_t of each shell norm is attained at t = 0, so the ratio is exactly 1.
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let cfg = HeatAuditConfig {
            index: BesovIndex::new(-1.0, 2.0, 2.0).unwrap(),
            r_values: vec![f64::INFINITY, 2.0],
            horizons: vec![0.5, 1.0],
            trials: 3,
            seed: 4,
            data: AuditData::Broadband,
        };
        let report = heat_smoothing_audit(&g, &cfg).unwrap();
        for e in report.entries.iter().filter(|e| e.r.is_infinite()) {
            assert!((e.max_ratio - 1.0).abs() < 1e-12);
        }
        assert!(report.bounded);
    }

    #[test]
    fn product_audit_reports_finite_ratio() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let report = product_audit(&g, 2.0, 2.0, 3.0, 8, 5).unwrap();
        assert!(report.max_ratio.is_finite() && report.max_ratio > 0.0);
        assert!(product_audit(&g, 2.0, 2.0, 1.5, 8, 5).is_err());
    }

    #[test]
    fn low_frequency_constant_is_order_one() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let idx = BesovIndex::new(-1.0, 2.0, 2.0).unwrap();
        let report = low_frequency_audit(&g, &idx, 3.0, &[1, 2], &[0.1, 1.0], 3, 6).unwrap();
        // For p = 2 each block norm is non-increasing in time and 2^{2j/r₁} <= 2^{2N/r₁}.
        assert!(report.max_ratio > 0.0 && report.max_ratio <= 1.0 + 1e-12);
    }
}
