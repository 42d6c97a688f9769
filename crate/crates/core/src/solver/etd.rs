//! `φ`-functions of the heat symbol for exponential integrators.

use crate::grid::Grid;

/// `φ_k(z) = Σ_{m≥0} z^m / (m+k)!`, so `φ₀ = e^z` and `φ_{k+1}(z) = (φ_k(z) - 1/k!) / z`.
pub fn phi(k: u32, z: f64) -> f64 {
    if z.abs() < 1.0 {
        // Taylor series; 22 terms reach machine precision for |z| < 1.
        let mut term = 1.0 / factorial(k);
        let mut sum = term;
        for m in 1..22 {
            term *= z / (m + k) as f64;
            sum += term;
        }
        return sum;
    }
    let mut value = z.exp();
    for j in 0..k {
        value = (value - 1.0 / factorial(j)) / z;
    }
    value
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Per-mode `e^{-|k|²h}` and `h φ_k(-|k|²h)` for `k = 1, 2, 3`.
#[derive(Clone, Debug)]
pub struct ExpTables {
    pub h: f64,
    pub e: Vec<f64>,
    pub hphi1: Vec<f64>,
    pub hphi2: Vec<f64>,
    pub hphi3: Vec<f64>,
}

impl ExpTables {
    pub fn new(grid: &Grid, h: f64) -> Self {
        let n = grid.len();
        let mut t = Self { h, e: vec![0.0; n], hphi1: vec![0.0; n], hphi2: vec![0.0; n], hphi3: vec![0.0; n] };
        for (i, &k2) in grid.ksq().iter().enumerate() {
            let z = -k2 * h;
            t.e[i] = z.exp();
            t.hphi1[i] = h * phi(1, z);
            t.hphi2[i] = h * phi(2, z);
            t.hphi3[i] = h * phi(3, z);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_closed_forms() {
        for &z in &[-1e-8, -0.3, -0.999, -1.0, -1.5, -10.0, -700.0, 0.0, 0.5] {
            let e = f64::exp(z);
            let phi1 = if z == 0.0 { 1.0 } else { (e - 1.0) / z };
            assert!((phi(0, z) - e).abs() < 1e-15);
            assert!((phi(1, z) - phi1).abs() < 1e-8 * phi1.abs().max(1e-300) + 1e-15, "z={z}");
        }
        assert_eq!(phi(1, 0.0), 1.0);
        assert_eq!(phi(2, 0.0), 0.5);
        assert!((phi(3, 0.0) - 1.0 / 6.0).abs() < 1e-16);
        // Continuity across the series / recursion switch.
        for k in 1..=3 {
            let a = phi(k, -1.0 + 1e-12);
            let b = phi(k, -1.0 - 1e-12);
            assert!((a - b).abs() < 1e-11);
        }
        // Large negative arguments: φ₂(z) = (1 + 1/z) / (-z) once e^z underflows.
        assert!((phi(2, -1e6) - (1e-6 - 1e-12)).abs() < 1e-18);
    }
}
