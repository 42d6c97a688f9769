//! Seeded random fields used by audits, experiments and tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::field::SpectralField;
use crate::grid::Grid;

/// Real field with standard-normal coefficients on `kmin <= |k| <= kmax`.
///
/// The zero mode is included only when `kmin == 0`; Nyquist modes are never
/// populated so odd derivatives stay exact.
pub fn random_field<R: Rng>(grid: &Grid, rng: &mut R, kmin: f64, kmax: f64) -> SpectralField {
    let half = (grid.points() / 2) as i64;
    let raw: Vec<Complex64> = (0..grid.len())
        .map(|flat| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let k = grid.kmag(flat);
            let nyquist = grid.mode_index(flat).iter().any(|&i| i == -half);
            let inside = k >= kmin && k <= kmax && (flat != 0 || kmin == 0.0);
            if inside && !nyquist {
                Complex64::new(re, im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    symmetrize(grid, raw)
}

/// Random field whose spectrum is concentrated on the dyadic shell
/// `2^shell <= |k| < 2^{shell+1}` with a smooth random radial envelope.
pub fn shell_localized_field<R: Rng>(grid: &Grid, rng: &mut R, shell: i32) -> SpectralField {
    let lo = 2f64.powi(shell);
    let f = random_field(grid, rng, lo, 2.0 * lo);
    let centre: f64 = rng.random_range(1.1..1.9);
    f.apply_radial(|k| (-((k / lo - centre) / 0.4).powi(2)).exp(), 0.0)
}

/// Field with a random number of randomly scaled bumps `ĝ(|k| / (β 2^j))`,
/// each translated to a random grid point. Spectrum lies in `|k| <= 2^j`.
pub fn bump_field<R: Rng>(grid: &Grid, rng: &mut R, j: i32) -> SpectralField {
    let radius = 2f64.powi(j);
    let count = rng.random_range(1..=3usize);
    let dim = grid.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for _ in 0..count {
        let beta: f64 = rng.random_range(0.5..1.0);
        let amplitude: f64 = rng.sample(StandardNormal);
        let centre: Vec<f64> = (0..dim)
            .map(|_| rng.random_range(0..grid.points()) as f64 * grid.spacing())
            .collect();
        for (flat, c) in coeffs.iter_mut().enumerate() {
            let k = grid.kmag(flat);
            let profile = smooth_bump(k / (beta * radius));
            if profile == 0.0 {
                continue;
            }
            let kv = grid.wavevector(flat);
            let phase: f64 = -kv.iter().zip(&centre).map(|(a, b)| a * b).sum::<f64>();
            *c += Complex64::from_polar(amplitude * profile, phase);
        }
    }
    let half = (grid.points() / 2) as i64;
    for (flat, c) in coeffs.iter_mut().enumerate() {
        if grid.mode_index(flat).iter().any(|&i| i == -half) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    symmetrize(grid, coeffs)
}

/// Independent stream seed from a base seed and a path of indices (splitmix64).
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    path.iter().fold(mix(seed), |acc, &x| mix(acc ^ mix(x)))
}

/// `exp(1 - 1/(1 - t^2))` on `|t| < 1`, zero outside.
pub fn smooth_bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

fn symmetrize(grid: &Grid, raw: Vec<Complex64>) -> SpectralField {
    let coeffs: Vec<Complex64> =
        (0..raw.len()).map(|i| 0.5 * (raw[i] + raw[grid.negated(i)].conj())).collect();
    SpectralField::from_coeffs(grid, coeffs).expect("length matches grid")
}
