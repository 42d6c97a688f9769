use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regularity `s`, integrability `p` and summability `q` of a homogeneous
/// Besov space. `f64::INFINITY` encodes `∞` for `p` and `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    #[serde(with = "crate::report::extended_f64")]
    pub p: f64,
    #[serde(with = "crate::report::extended_f64")]
    pub q: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        if !s.is_finite() {
            return Err(Error::InvalidExponent(format!("s must be finite, got {s}")));
        }
        Ok(Self { s, p, q })
    }

    /// Critical index `s = -2 + n/p` for `2 <= p < 2n`, `1 <= q <= ∞`.
    pub fn critical(dim: usize, p: f64, q: f64) -> Result<Self> {
        let n = dim as f64;
        if !(2.0..2.0 * n).contains(&p) {
            return Err(Error::InvalidExponent(format!(
                "p = {p} outside the admissible range [2, {})",
                2 * dim
            )));
        }
        check_exponent("q", q)?;
        Ok(Self { s: -2.0 + n / p, p, q })
    }

    /// Inverse of the critical relation: `p = n/(s+2)` for `-3/2 < s <= -2 + n/2`.
    pub fn critical_from_regularity(dim: usize, s: f64, q: f64) -> Result<Self> {
        let n = dim as f64;
        if !(s > -1.5 && s <= -2.0 + n / 2.0) {
            return Err(Error::InvalidExponent(format!(
                "s = {s} outside (-3/2, {}]",
                -2.0 + n / 2.0
            )));
        }
        Self::critical(dim, n / (s + 2.0), q)
    }

    pub fn with_regularity(self, s: f64) -> Self {
        Self { s, ..self }
    }
}

pub(crate) fn check_exponent(name: &str, value: f64) -> Result<()> {
    if value >= 1.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("{name} = {value} not in [1, ∞]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_range() {
        let idx = BesovIndex::critical(2, 2.0, 2.0).unwrap();
        assert_eq!(idx.s, -1.0);
        let idx = BesovIndex::critical(3, 4.0, f64::INFINITY).unwrap();
        assert_eq!(idx.s, -1.25);
        assert!(BesovIndex::critical(2, 4.0, 1.0).is_err());
        assert!(BesovIndex::critical(3, 1.5, 1.0).is_err());
        assert!(BesovIndex::critical(3, 2.0, 0.5).is_err());
    }

    #[test]
    fn regularity_round_trip() {
        for dim in [2usize, 3] {
            for &p in &[2.0, 2.5, 3.0, 2.0 * dim as f64 - 0.1] {
                let idx = BesovIndex::critical(dim, p, 1.0).unwrap();
                let back = BesovIndex::critical_from_regularity(dim, idx.s, 1.0).unwrap();
                assert!((back.p - p).abs() < 1e-12);
                assert!(idx.s > -1.5 && idx.s <= -2.0 + dim as f64 / 2.0);
            }
        }
        assert!(BesovIndex::critical_from_regularity(2, -1.5, 1.0).is_err());
        assert!(BesovIndex::critical_from_regularity(2, -0.9, 1.0).is_err());
    }
}
