//! Potential and drift nonlinearity of the Debye-Hückel system.

use super::state::StatePair;
use crate::error::Result;
use crate::field::{dealias_in_place, divergence, SpectralField};

/// `φ = (-Δ)^{-1}(w - v)`, so `Δφ = v - w` on the nonzero modes.
pub fn potential(state: &StatePair) -> Result<SpectralField> {
    state.ensure_neutral()?;
    Ok(state.w.try_sub(&state.v)?.inverse_neg_laplacian())
}

/// Tendencies `(-∇·(v∇φ), +∇·(w∇φ))`. Both have zero mean.
pub fn rhs(state: &StatePair, dealias: bool) -> Result<StatePair> {
    state.ensure_neutral()?;
    pair_nonlinearity(state, state, dealias)
}

/// `Ñ(a, b) = (-∇·(a_v ∇ψ_b), +∇·(a_w ∇ψ_b))` with `ψ_b = (-Δ)^{-1}(b_w - b_v)`.
///
/// `rhs(u) = Ñ(u, u)`. Products are formed on the grid; with `dealias` the
/// inputs and fluxes are truncated by the 2/3 rule.
pub fn pair_nonlinearity(a: &StatePair, b: &StatePair, dealias: bool) -> Result<StatePair> {
    let grid = a.grid().clone();
    if b.grid() != &grid {
        return Err(crate::error::Error::GridMismatch);
    }
    let prep = |f: &SpectralField| if dealias { f.dealias() } else { f.clone() };
    let psi = prep(&b.w.try_sub(&b.v)?).inverse_neg_laplacian();
    let grad_psi: Vec<Vec<f64>> = psi.gradient().iter().map(SpectralField::to_physical).collect();

    let drift = |density: &SpectralField, sign: f64| -> Result<SpectralField> {
        let rho = prep(density).to_physical();
        let mut flux = Vec::with_capacity(grad_psi.len());
        for g in &grad_psi {
            let values: Vec<f64> = rho.iter().zip(g).map(|(r, g)| sign * r * g).collect();
            let mut f = SpectralField::forward(&grid, &values)?;
            if dealias {
                dealias_in_place(&grid, f.coeffs_mut());
            }
            flux.push(f);
        }
        divergence(&flux)
    };
    let (v, w) = rayon::join(|| drift(&a.v, -1.0), || drift(&a.w, 1.0));
    StatePair::new(v?, w?)
}
