//! Real scalar fields stored by their full complex Fourier spectrum.
//!
//! Normalization: the forward transform divides by `M^n`, so the zero-mode
//! coefficient is the spatial mean and `Σ|c_k|^2` is the mean of `f^2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), coeffs: vec![ZERO; grid.len()] }
    }

    /// Wrap raw coefficients. The caller is responsible for conjugate symmetry.
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), actual: coeffs.len() });
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// Forward transform of physical samples (row-major, last axis fastest).
    pub fn forward(grid: &Grid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), actual: values.len() });
        }
        let scale = 1.0 / grid.len() as f64;
        let mut coeffs: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        grid.fft_in_place(&mut coeffs, false);
        for c in &mut coeffs {
            *c *= scale;
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// Build from a function of position.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
        Self::forward(grid, &values).expect("length matches grid")
    }

    /// A single real Fourier mode `amplitude * cos(k·x)` for the signed mode index.
    pub fn cosine_mode(grid: &Grid, mode: &[i64], amplitude: f64) -> Self {
        let mut out = Self::zeros(grid);
        let plus = grid.flat_of_mode(mode);
        let neg: Vec<i64> = mode.iter().map(|i| -i).collect();
        let minus = grid.flat_of_mode(&neg);
        if plus == minus {
            out.coeffs[plus] += Complex64::new(amplitude, 0.0);
        } else {
            out.coeffs[plus] += Complex64::new(0.5 * amplitude, 0.0);
            out.coeffs[minus] += Complex64::new(0.5 * amplitude, 0.0);
        }
        out
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        let mut out = Self::zeros(grid);
        out.coeffs[0] = Complex64::new(value, 0.0);
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Spatial mean (the zero-mode coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Physical samples. The imaginary residue is discarded.
    pub fn to_physical(&self) -> Vec<f64> {
        self.to_physical_complex().into_iter().map(|c| c.re).collect()
    }

    pub(crate) fn to_physical_complex(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        self.grid.fft_in_place(&mut buf, true);
        buf
    }

    /// Largest violation of `c(-k) = conj(c(k))`, relative to the largest coefficient.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let scale = self.max_abs_coeff().max(f64::MIN_POSITIVE);
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[self.grid.negated(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ |c_k|^2`, equal to the mean of `f^2` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.zip_with(other, |a, b| a + b * alpha))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|c| c * alpha).collect() }
    }

    /// Field with its zero mode removed.
    pub fn without_mean(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = ZERO;
        out
    }

    /// `coeff_out(k) = m(k) coeff_in(k)`.
    ///
    /// A non-finite multiplier at `k = 0` zeroes the mean; anywhere else it is an error.
    pub fn apply_multiplier(&self, m: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (flat, &c) in self.coeffs.iter().enumerate() {
            let k = self.grid.wavevector(flat);
            let value = m(&k);
            if !(value.re.is_finite() && value.im.is_finite()) {
                if flat == 0 {
                    coeffs.push(ZERO);
                    continue;
                }
                return Err(Error::NonFiniteMultiplier { wavevector: k });
            }
            coeffs.push(value * c);
        }
        Ok(Self { grid: self.grid.clone(), coeffs })
    }

    /// Radial real multiplier `m(|k|)`, with the zero mode mapped by `zero_mode`.
    pub fn apply_radial(&self, m: impl Fn(f64) -> f64, zero_mode: f64) -> Self {
        let ksq = self.grid.ksq();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if i == 0 { c * zero_mode } else { c * m(ksq[i].sqrt()) })
            .collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Heat semigroup `e^{tΔ}`: multiplies each mode by `exp(-|k|^2 t)`.
    pub fn heat(&self, t: f64) -> Result<Self> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        let ksq = self.grid.ksq();
        let coeffs = self.coeffs.iter().zip(ksq).map(|(&c, &k2)| c * (-k2 * t).exp()).collect();
        Ok(Self { grid: self.grid.clone(), coeffs })
    }

    /// Partial derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        let m = self.grid.points();
        let stride = m.pow((self.grid.dim() - 1 - axis) as u32);
        let k = self.grid.k1d_odd();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(flat, &c)| c * Complex64::new(0.0, k[(flat / stride) % m]))
            .collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.grid.dim()).map(|a| self.derivative(a)).collect()
    }

    pub fn laplacian(&self) -> Self {
        let ksq = self.grid.ksq();
        let coeffs = self.coeffs.iter().zip(ksq).map(|(&c, &k2)| -c * k2).collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// `(-Δ)^{-1}` with the zero mode mapped to 0.
    pub fn inverse_neg_laplacian(&self) -> Self {
        let ksq = self.grid.ksq();
        let coeffs = self
            .coeffs
            .iter()
            .zip(ksq)
            .map(|(&c, &k2)| if k2 == 0.0 { ZERO } else { c / k2 })
            .collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// `∇(-Δ)^{-1} f`: component `l` carries `i k_l / |k|^2`, zero at `k = 0`.
    pub fn inverse_laplacian_gradient(&self) -> Vec<Self> {
        self.inverse_neg_laplacian().gradient()
    }

    /// Zero every coefficient with some `|k_l| >= (2/3)·(πM/L)`, i.e. `3|i_l| >= M`.
    pub fn dealias(&self) -> Self {
        let mut out = self.clone();
        dealias_in_place(&self.grid, &mut out.coeffs);
        out
    }

    /// Pointwise product evaluated on the grid (aliasing not removed).
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let values: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Self::forward(&self.grid, &values)
    }

    /// Evaluate the trigonometric interpolant at an arbitrary point.
    pub fn evaluate_at(&self, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (flat, c) in self.coeffs.iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let k = self.grid.wavevector(flat);
            let phase: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
            sum += c.re * phase.cos() - c.im * phase.sin();
        }
        sum
    }
}

pub(crate) fn dealias_in_place(grid: &Grid, coeffs: &mut [Complex64]) {
    let m = grid.points();
    let dim = grid.dim();
    // 3|i| >= M in integer units is |k_l| >= (2/3)·(πM/L); strict so M divisible by 3 stays alias-free.
    let keep: Vec<bool> = (0..m)
        .map(|i| {
            let signed = if i < m / 2 { i as f64 } else { i as f64 - m as f64 };
            3.0 * signed.abs() < m as f64
        })
        .collect();
    for (flat, c) in coeffs.iter_mut().enumerate() {
        let mut rest = flat;
        for _ in 0..dim {
            if !keep[rest % m] {
                *c = ZERO;
                break;
            }
            rest /= m;
        }
    }
}

/// Divergence of a vector field.
pub fn divergence(components: &[SpectralField]) -> Result<SpectralField> {
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidGrid("divergence of an empty vector field".into()))?;
    let mut out = SpectralField::zeros(first.grid());
    for (axis, c) in components.iter().enumerate() {
        out = out.try_add(&c.derivative(axis))?;
    }
    Ok(out)
}

/// `⟨f, g⟩` as the mean of `f g` over the torus.
pub fn inner_product(f: &SpectralField, g: &SpectralField) -> Result<f64> {
    f.check_same_grid(g)?;
    Ok(f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| (a * b.conj()).re).sum())
}
