//! Uniform periodic grids on the torus `[0, L)^n`.
//!
//! A [`Grid`] owns the wavenumber tables and FFT plans shared by every field
//! living on it. Cloning is cheap (one `Arc`).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct GridInner {
    dim: usize,
    points: usize,
    box_length: f64,
    /// Signed wavenumber for each 1D index, in FFT order.
    k1d: Vec<f64>,
    /// Same as `k1d` with the Nyquist entry zeroed, for odd-order operators.
    k1d_odd: Vec<f64>,
    /// `|k|^2` for every flat index.
    ksq: Vec<f64>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.inner.dim)
            .field("points", &self.inner.points)
            .field("box_length", &self.inner.box_length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.dim == other.inner.dim
                && self.inner.points == other.inner.points
                && self.inner.box_length == other.inner.box_length)
    }
}

impl Grid {
    /// Square grid with `points` samples per dimension on a box of side `box_length`.
    pub fn new(dim: usize, points: usize, box_length: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{2, 3}}")));
        }
        if points < 8 || !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be even and >= 8, got {points}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {box_length}")));
        }

        let dk = 2.0 * PI / box_length;
        let half = points / 2;
        let k1d: Vec<f64> = (0..points)
            .map(|i| if i < half { i as f64 * dk } else { (i as f64 - points as f64) * dk })
            .collect();
        let mut k1d_odd = k1d.clone();
        k1d_odd[half] = 0.0;

        let total = points.pow(dim as u32);
        let mut ksq = vec![0.0; total];
        let mut multi = vec![0usize; dim];
        for (flat, slot) in ksq.iter_mut().enumerate() {
            unflatten(flat, points, &mut multi);
            *slot = multi.iter().map(|&i| k1d[i] * k1d[i]).sum();
        }

        let mut planner = FftPlanner::new();
        let fft_forward = planner.plan_fft_forward(points);
        let fft_inverse = planner.plan_fft_inverse(points);

        Ok(Self {
            inner: Arc::new(GridInner {
                dim,
                points,
                box_length,
                k1d,
                k1d_odd,
                ksq,
                fft_forward,
                fft_inverse,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn points(&self) -> usize {
        self.inner.points
    }

    pub fn box_length(&self) -> f64 {
        self.inner.box_length
    }

    /// Total number of grid points, `M^n`.
    pub fn len(&self) -> usize {
        self.inner.ksq.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.inner.box_length / self.inner.points as f64
    }

    /// Smallest nonzero wavenumber magnitude, `2π/L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.inner.box_length
    }

    /// One-dimensional Nyquist wavenumber, `πM/L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.inner.points as f64 / self.inner.box_length
    }

    /// Largest `|k|` on the grid (the Nyquist corner).
    pub fn max_wavenumber(&self) -> f64 {
        self.nyquist() * (self.inner.dim as f64).sqrt()
    }

    pub fn ksq(&self) -> &[f64] {
        &self.inner.ksq
    }

    pub fn kmag(&self, flat: usize) -> f64 {
        self.inner.ksq[flat].sqrt()
    }

    /// Signed 1D wavenumber table (FFT order).
    pub fn k1d(&self) -> &[f64] {
        &self.inner.k1d
    }

    /// 1D wavenumbers for odd-order derivatives: Nyquist entry is zero so that
    /// derivatives of real fields stay real.
    pub fn k1d_odd(&self) -> &[f64] {
        &self.inner.k1d_odd
    }

    /// Wavevector of a flat index.
    pub fn wavevector(&self, flat: usize) -> Vec<f64> {
        let mut multi = vec![0usize; self.inner.dim];
        unflatten(flat, self.inner.points, &mut multi);
        multi.iter().map(|&i| self.inner.k1d[i]).collect()
    }

    /// Signed integer mode index per axis, in `[-M/2, M/2)`.
    pub fn mode_index(&self, flat: usize) -> Vec<i64> {
        let m = self.inner.points;
        let mut multi = vec![0usize; self.inner.dim];
        unflatten(flat, m, &mut multi);
        multi
            .iter()
            .map(|&i| if i < m / 2 { i as i64 } else { i as i64 - m as i64 })
            .collect()
    }

    /// Flat index of a signed mode (taken modulo `M`).
    pub fn flat_of_mode(&self, mode: &[i64]) -> usize {
        let m = self.inner.points as i64;
        mode.iter().fold(0usize, |acc, &i| acc * m as usize + i.rem_euclid(m) as usize)
    }

    /// Flat index of `-k`.
    pub fn negated(&self, flat: usize) -> usize {
        let modes: Vec<i64> = self.mode_index(flat).iter().map(|i| -i).collect();
        self.flat_of_mode(&modes)
    }

    /// Physical coordinates of a flat index.
    pub fn position(&self, flat: usize) -> Vec<f64> {
        let mut multi = vec![0usize; self.inner.dim];
        unflatten(flat, self.inner.points, &mut multi);
        let h = self.spacing();
        multi.iter().map(|&i| i as f64 * h).collect()
    }

    /// Same sample layout on a box of a different size.
    pub fn with_box_length(&self, box_length: f64) -> Result<Self> {
        Self::new(self.inner.dim, self.inner.points, box_length)
    }

    /// In-place n-dimensional FFT over a row-major buffer of length `M^n`.
    pub(crate) fn fft_in_place(&self, data: &mut [Complex64], inverse: bool) {
        let m = self.inner.points;
        let dim = self.inner.dim;
        let fft = if inverse { &self.inner.fft_inverse } else { &self.inner.fft_forward };

        // Last axis is contiguous.
        fft.process(data);

        if dim == 1 {
            return;
        }
        let total = data.len();
        let mut lines = vec![Complex64::new(0.0, 0.0); total];
        for axis in 0..dim - 1 {
            let stride = m.pow((dim - 1 - axis) as u32);
            let block = stride * m;
            // Gather each line along `axis` into contiguous storage.
            let mut line = 0;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    let dst = &mut lines[line * m..(line + 1) * m];
                    for (t, slot) in dst.iter_mut().enumerate() {
                        *slot = data[base + t * stride];
                    }
                    line += 1;
                }
            }
            fft.process(&mut lines);
            let mut line = 0;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    let src = &lines[line * m..(line + 1) * m];
                    for (t, value) in src.iter().enumerate() {
                        data[base + t * stride] = *value;
                    }
                    line += 1;
                }
            }
        }
    }
}

fn unflatten(mut flat: usize, m: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % m;
        flat /= m;
    }
}
