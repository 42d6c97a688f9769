//! Dyadic blocks, low-pass filters and homogeneous Besov norms on a grid.
//!
//! Shells act on the raw wavenumber magnitude `|k|`. The zero mode belongs to
//! no block; it is the discrete stand-in for the quotient by polynomials and
//! is reported separately.

use num_complex::Complex64;
use serde::Serialize;

use super::index::{check_exponent, BesovIndex};
use super::partition::DyadicPartition;
use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::Grid;

/// Which measure the `L^p` norms use on the box.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Probability measure `L^{-n} dx`: a constant `c` has every `L^p` norm `|c|`.
    #[default]
    Normalized,
    /// Lebesgue measure on the box. Scales like `L^p(ℝⁿ)` under dilation.
    Lebesgue,
}

impl Measure {
    /// Factor converting a normalized `L^p` norm into this measure.
    pub fn factor(self, grid: &Grid, p: f64) -> f64 {
        match self {
            Measure::Normalized => 1.0,
            Measure::Lebesgue if p.is_infinite() => 1.0,
            Measure::Lebesgue => grid.box_length().powf(grid.dim() as f64 / p),
        }
    }
}

/// Normalized `L^p` norm of physical samples; `p = ∞` is the max norm.
pub fn lp_norm_of_samples(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |a, &b| a.max(b.abs()));
    }
    let n = values.len() as f64;
    if p == 2.0 {
        return (values.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    }
    if p == 1.0 {
        return values.iter().map(|x| x.abs()).sum::<f64>() / n;
    }
    (values.iter().map(|x| x.abs().powf(p)).sum::<f64>() / n).powf(1.0 / p)
}

/// `‖f‖_{L^p}` with the normalized measure.
pub fn lp_norm(f: &SpectralField, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    if p == 2.0 {
        return Ok(f.energy().sqrt());
    }
    Ok(lp_norm_of_samples(&f.to_physical(), p))
}

/// `ℓ^q` combination of weighted shell norms; `q = ∞` is the sup.
pub(crate) fn lq_sum(weighted: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else if q == 1.0 {
        weighted.sum()
    } else {
        weighted.map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// One row of a Besov norm report.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ShellRow {
    pub j: i32,
    pub shell_lp_norm: f64,
    pub weight_2js: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BesovReport {
    pub index: BesovIndex,
    pub measure: Measure,
    pub norm: f64,
    /// The excluded zero mode.
    pub mean: f64,
    pub shell_range: (i32, i32),
    pub shells: Vec<ShellRow>,
}

impl BesovReport {
    /// CSV rows `j, shell_lp_norm, weight_2js` and a summary row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,shell_lp_norm,weight_2js\n");
        for row in &self.shells {
            out.push_str(&format!("{},{:e},{:e}\n", row.j, row.shell_lp_norm, row.weight_2js));
        }
        out.push_str(&format!(
            "# norm={:e},s={},p={},q={},mean={:e},shells={}..={}\n",
            self.norm, self.index.s, self.index.p, self.index.q, self.mean, self.shell_range.0, self.shell_range.1
        ));
        out
    }
}

/// Precomputed block symbols for one grid.
#[derive(Clone, Debug)]
pub struct ShellDecomposition {
    grid: Grid,
    partition: DyadicPartition,
    j_min: i32,
    j_max: i32,
    /// Sparse `(flat index, φ(2^{-j}|k|))` per shell, `j_min..=j_max`.
    blocks: Vec<Vec<(usize, f64)>>,
}

impl ShellDecomposition {
    pub fn new(grid: &Grid, partition: DyadicPartition) -> Self {
        let (j_min, j_max) = representable_range(grid);
        let mut blocks = vec![Vec::new(); (j_max - j_min + 1) as usize];
        for flat in 1..grid.len() {
            let k = grid.kmag(flat);
            for j in partition.touching_shells(k) {
                if j < j_min || j > j_max {
                    continue;
                }
                let w = partition.block_symbol(j, k);
                if w > 0.0 {
                    blocks[(j - j_min) as usize].push((flat, w));
                }
            }
        }
        Self { grid: grid.clone(), partition, j_min, j_max, blocks }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.partition
    }

    /// Inclusive shell range.
    pub fn range(&self) -> (i32, i32) {
        (self.j_min, self.j_max)
    }

    pub fn shells(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    fn block_weights(&self, j: i32) -> &[(usize, f64)] {
        if j < self.j_min || j > self.j_max {
            &[]
        } else {
            &self.blocks[(j - self.j_min) as usize]
        }
    }

    /// `Δ_j f`. Out-of-range shells give the zero field.
    pub fn block(&self, f: &SpectralField, j: i32) -> SpectralField {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for &(flat, w) in self.block_weights(j) {
            coeffs[flat] = f.coeffs()[flat] * w;
        }
        SpectralField::from_coeffs(&self.grid, coeffs).expect("length matches grid")
    }

    /// `S_j f`, multiplier `ψ(2^{-j}|k|)` (keeps the mean).
    pub fn low_pass(&self, f: &SpectralField, j: i32) -> SpectralField {
        let part = self.partition;
        f.apply_radial(|k| part.low_pass_symbol(j, k), 1.0)
    }

    /// `‖Δ_j f‖_{L^p}` (normalized measure).
    pub fn shell_lp_norm(&self, f: &SpectralField, j: i32, p: f64) -> f64 {
        let weights = self.block_weights(j);
        if weights.is_empty() {
            return 0.0;
        }
        if p == 2.0 {
            return weights.iter().map(|&(i, w)| (f.coeffs()[i] * w).norm_sqr()).sum::<f64>().sqrt();
        }
        lp_norm_of_samples(&self.block(f, j).to_physical(), p)
    }

    /// Shell `L^p` norms for every representable shell, in order.
    pub fn shell_lp_norms(&self, f: &SpectralField, p: f64) -> Vec<f64> {
        self.shells().map(|j| self.shell_lp_norm(f, j, p)).collect()
    }

    /// Homogeneous Besov norm with the normalized measure.
    pub fn besov_norm(&self, f: &SpectralField, idx: &BesovIndex) -> f64 {
        self.besov_norm_in(f, idx, Measure::Normalized)
    }

    pub fn besov_norm_in(&self, f: &SpectralField, idx: &BesovIndex, measure: Measure) -> f64 {
        let norms = self.shell_lp_norms(f, idx.p);
        self.combine(&norms, idx) * measure.factor(&self.grid, idx.p)
    }

    /// `(Σ_j (2^{js} a_j)^q)^{1/q}` over the representable shells.
    pub fn combine(&self, shell_norms: &[f64], idx: &BesovIndex) -> f64 {
        lq_sum(self.shells().zip(shell_norms).map(|(j, &a)| 2f64.powf(j as f64 * idx.s) * a), idx.q)
    }

    pub fn besov_report(&self, f: &SpectralField, idx: &BesovIndex, measure: Measure) -> BesovReport {
        let factor = measure.factor(&self.grid, idx.p);
        let norms = self.shell_lp_norms(f, idx.p);
        let shells = self
            .shells()
            .zip(&norms)
            .map(|(j, &a)| ShellRow { j, shell_lp_norm: a * factor, weight_2js: 2f64.powf(j as f64 * idx.s) })
            .collect();
        BesovReport {
            index: *idx,
            measure,
            norm: self.combine(&norms, idx) * factor,
            mean: f.mean(),
            shell_range: self.range(),
            shells,
        }
    }

    /// Split at `|k| = 2^N`: `(high, low)` with `high` on `|k| > 2^N`.
    pub fn frequency_split(&self, f: &SpectralField, cutoff_exponent: i32) -> (SpectralField, SpectralField) {
        frequency_split(f, cutoff_exponent)
    }
}

/// `[⌈log₂(3/4 · 2π/L)⌉ - 1, ⌊log₂(8/3 · πM/L)⌋ + 1]`.
pub fn representable_range(grid: &Grid) -> (i32, i32) {
    let lo = (0.75 * grid.fundamental()).log2().ceil() as i32 - 1;
    let hi = (8.0 / 3.0 * grid.nyquist()).log2().floor() as i32 + 1;
    (lo, hi)
}

/// `(high, low)` with `high` supported on `|k| > 2^N` and `low` on `|k| <= 2^N`.
pub fn frequency_split(f: &SpectralField, cutoff_exponent: i32) -> (SpectralField, SpectralField) {
    let cutoff = 2f64.powi(cutoff_exponent);
    let grid = f.grid();
    let mut high = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut low = high.clone();
    for (flat, &c) in f.coeffs().iter().enumerate() {
        if grid.kmag(flat) > cutoff {
            high[flat] = c;
        } else {
            low[flat] = c;
        }
    }
    (
        SpectralField::from_coeffs(grid, high).expect("length matches grid"),
        SpectralField::from_coeffs(grid, low).expect("length matches grid"),
    )
}

/// Dyadic dilation `f_λ(x) = λ² f(λx)` with `λ = 2^m`, realized on the
/// companion box of side `L/λ` with the same samples scaled by `λ²`. Every
/// wavenumber doubles per octave, so shell `j` of `f_λ` is shell `j - m` of `f`.
pub fn dyadic_dilation(f: &SpectralField, octaves: i32) -> Result<SpectralField> {
    let lambda = 2f64.powi(octaves);
    let grid = f.grid().with_box_length(f.grid().box_length() / lambda)?;
    let coeffs = f.coeffs().iter().map(|c| c * (lambda * lambda)).collect();
    SpectralField::from_coeffs(&grid, coeffs)
}
