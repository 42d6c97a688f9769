use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;

/// Tolerance on `|mean(v) - mean(w)|` for a state to count as neutral.
pub const NEUTRALITY_TOL: f64 = 1e-12;

/// Electron and hole density deviations. The potential is always derived.
#[derive(Clone, Debug)]
pub struct StatePair {
    pub v: SpectralField,
    pub w: SpectralField,
}

/// What the neutrality projection removed.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Neutralization {
    /// Shared mean of `v` and `w` after projection.
    pub shared_mean: f64,
    /// `mean(v) - mean(w)` before projection.
    pub removed_net_charge: f64,
}

impl StatePair {
    pub fn new(v: SpectralField, w: SpectralField) -> Result<Self> {
        if v.grid() != w.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { v, w })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self { v: SpectralField::zeros(grid), w: SpectralField::zeros(grid) }
    }

    pub fn grid(&self) -> &Grid {
        self.v.grid()
    }

    pub fn net_charge(&self) -> f64 {
        self.v.mean() - self.w.mean()
    }

    pub fn is_neutral(&self) -> bool {
        self.net_charge().abs() <= NEUTRALITY_TOL * (1.0 + self.v.mean().abs().max(self.w.mean().abs()))
    }

    pub fn ensure_neutral(&self) -> Result<()> {
        if self.is_neutral() {
            Ok(())
        } else {
            Err(Error::NotNeutral { net_charge: self.net_charge() })
        }
    }

    /// Shift both means to their average so that `mean(v) = mean(w)`.
    pub fn neutralize(&self) -> (Self, Neutralization) {
        let shared = 0.5 * (self.v.mean() + self.w.mean());
        let mut out = self.clone();
        out.v.coeffs_mut()[0].re = shared;
        out.v.coeffs_mut()[0].im = 0.0;
        out.w.coeffs_mut()[0].re = shared;
        out.w.coeffs_mut()[0].im = 0.0;
        (out, Neutralization { shared_mean: shared, removed_net_charge: self.net_charge() })
    }

    pub fn map(&self, f: impl Fn(&SpectralField) -> SpectralField) -> Self {
        Self { v: f(&self.v), w: f(&self.w) }
    }

    pub fn try_map(&self, f: impl Fn(&SpectralField) -> Result<SpectralField>) -> Result<Self> {
        Ok(Self { v: f(&self.v)?, w: f(&self.w)? })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { v: self.v.try_add(&other.v)?, w: self.w.try_add(&other.w)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { v: self.v.try_sub(&other.v)?, w: self.w.try_sub(&other.w)? })
    }

    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        Ok(Self { v: self.v.axpy(alpha, &other.v)?, w: self.w.axpy(alpha, &other.w)? })
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|f| f.scale(alpha))
    }

    pub fn heat(&self, t: f64) -> Result<Self> {
        self.try_map(|f| f.heat(t))
    }

    pub fn dealias(&self) -> Self {
        self.map(|f| f.dealias())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.v.max_abs_coeff().max(self.w.max_abs_coeff())
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.w.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neutralization_equalizes_means() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let s = StatePair::new(SpectralField::constant(&g, 3.0), SpectralField::constant(&g, 1.0)).unwrap();
        assert!(matches!(s.ensure_neutral(), Err(Error::NotNeutral { .. })));
        let (n, report) = s.neutralize();
        assert!(n.is_neutral());
        assert_eq!(n.v.mean(), 2.0);
        assert_eq!(report.removed_net_charge, 2.0);
        assert_eq!(report.shared_mean, 2.0);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = Grid::new(2, 8, 1.0).unwrap();
        let b = Grid::new(2, 8, 2.0).unwrap();
        assert!(StatePair::new(SpectralField::zeros(&a), SpectralField::zeros(&b)).is_err());
    }
}
