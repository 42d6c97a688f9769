//! Smooth dyadic partition of unity.
//!
//! `χ` is a radial cutoff equal to 1 on `|ξ| <= 1` and 0 on `|ξ| >= 4/3`,
//! built from the exponential mollifier `e^{-1/t}`. The annulus bump is
//! `φ₀(ξ) = χ(ξ/2) - χ(ξ)` (support `[1, 8/3]`), normalized by its dyadic
//! sum, and the ball bump is `ψ = 1 - Σ_{j>=0} φ(2^{-j}·)`.

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`.
fn smooth_step(t: f64) -> f64 {
    fn h(t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (-1.0 / t).exp()
        }
    }
    let a = h(t);
    let b = h(1.0 - t);
    a / (a + b)
}

/// Inner radius where `φ` becomes positive.
pub const ANNULUS_INNER: f64 = 1.0;
/// Outer radius of the annulus support.
pub const ANNULUS_OUTER: f64 = 8.0 / 3.0;
/// Radius of the ball support of `ψ`.
pub const BALL_OUTER: f64 = 4.0 / 3.0;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DyadicPartition;

impl DyadicPartition {
    pub fn new() -> Self {
        Self
    }

    /// Cutoff `χ(r)`: 1 on `[0, 1]`, 0 on `[4/3, ∞)`.
    pub fn chi(&self, r: f64) -> f64 {
        smooth_step((BALL_OUTER - r) * 3.0)
    }

    fn phi_raw(&self, r: f64) -> f64 {
        self.chi(0.5 * r) - self.chi(r)
    }

    /// Annulus bump `φ(r)`, supported in `[1, 8/3] ⊂ [3/4, 8/3]`.
    pub fn phi(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= ANNULUS_INNER || r >= ANNULUS_OUTER {
            return 0.0;
        }
        let raw = self.phi_raw(r);
        if raw == 0.0 {
            return 0.0;
        }
        raw / self.raw_dyadic_sum(r)
    }

    /// `Σ_j φ₀(2^{-j} r)`, over the few shells that can be nonzero.
    fn raw_dyadic_sum(&self, r: f64) -> f64 {
        let top = r.log2().floor() as i32;
        (top - 2..=top + 1).map(|j| self.phi_raw(r * 2f64.powi(-j))).sum()
    }

    /// Shell indices `j` with `φ(2^{-j} r)` possibly nonzero.
    pub fn touching_shells(&self, r: f64) -> std::ops::RangeInclusive<i32> {
        let top = r.log2().floor() as i32;
        top - 2..=top + 1
    }

    /// Ball bump `ψ(r) = 1 - Σ_{j>=0} φ(2^{-j} r)`.
    pub fn psi(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= ANNULUS_INNER {
            return 1.0;
        }
        let shells = self.touching_shells(r);
        let sum: f64 =
            shells.filter(|&j| j >= 0).map(|j| self.phi(r * 2f64.powi(-j))).sum();
        1.0 - sum
    }

    /// `φ(2^{-j} r)`: the symbol of `Δ_j`.
    pub fn block_symbol(&self, j: i32, r: f64) -> f64 {
        self.phi(r * 2f64.powi(-j))
    }

    /// `ψ(2^{-j} r)`: the symbol of `S_j`.
    pub fn low_pass_symbol(&self, j: i32, r: f64) -> f64 {
        self.psi(r * 2f64.powi(-j))
    }
}
