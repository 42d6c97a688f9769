use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::BesovIndex;
use crate::report::extended_f64;

/// Time grid, Picard controls and the monitor space `𝔏^{r₁}(0,T; Ḃ^{-2+n/p+2/r₁}_{p,q})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Upper bound on the step; the effective step is `horizon / steps()`.
    pub dt: f64,
    pub horizon: f64,
    pub dealias: bool,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub r1: f64,
    #[serde(with = "extended_f64")]
    pub p: f64,
    #[serde(with = "extended_f64")]
    pub q: f64,
    /// Project non-neutral data instead of rejecting it.
    pub auto_neutralize: bool,
    /// Keep every `snapshot_every`-th step in `evolve` trajectories.
    pub snapshot_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            horizon: 1.0,
            dealias: true,
            picard_tol: 1e-10,
            picard_max_iter: 60,
            r1: 3.0,
            p: 2.0,
            q: 2.0,
            auto_neutralize: false,
            snapshot_every: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.picard_tol > 0.0) {
            return bad(format!("picard_tol must be positive, got {}", self.picard_tol));
        }
        if self.picard_max_iter == 0 || self.snapshot_every == 0 {
            return bad("picard_max_iter and snapshot_every must be at least 1".into());
        }
        if !(self.r1 > 2.0 && self.r1.is_finite()) {
            return bad(format!("r1 must lie in (2, ∞), got {}", self.r1));
        }
        BesovIndex::new(0.0, self.p, self.q).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if 2.0 / self.r1 + dim as f64 / self.p <= 1.5 {
            return bad(format!("2/r1 + n/p = {} must exceed 3/2", 2.0 / self.r1 + dim as f64 / self.p));
        }
        Ok(())
    }

    /// `Ḃ^{-2+n/p+2/r₁}_{p,q}`, the spatial index of the monitor space.
    pub fn monitor_index(&self, dim: usize) -> BesovIndex {
        BesovIndex { s: -2.0 + dim as f64 / self.p + 2.0 / self.r1, p: self.p, q: self.q }
    }

    /// `Ḃ^{-2+n/p}_{p,q}`, the critical data space.
    pub fn critical_index(&self, dim: usize) -> BesovIndex {
        BesovIndex { s: -2.0 + dim as f64 / self.p, p: self.p, q: self.q }
    }

    pub fn steps(&self) -> usize {
        ((self.horizon / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    /// Effective uniform step.
    pub fn step(&self) -> f64 {
        self.horizon / self.steps() as f64
    }

    /// Uniform sample times `0, h, …, T`.
    pub fn times(&self) -> Vec<f64> {
        let n = self.steps();
        let h = self.step();
        (0..=n).map(|i| if i == n { self.horizon } else { i as f64 * h }).collect()
    }

    pub fn with_horizon(&self, horizon: f64) -> Self {
        Self { horizon, ..self.clone() }
    }

    pub fn with_steps(&self, horizon: f64, steps: usize) -> Self {
        Self { horizon, dt: horizon / steps.max(1) as f64, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_and_defaults() {
        let cfg = SolverConfig::default();
        cfg.validate(2).unwrap();
        cfg.validate(3).unwrap();
        assert!((cfg.monitor_index(2).s + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(cfg.critical_index(2).s, -1.0);
        assert!(SolverConfig { r1: 2.0, ..cfg.clone() }.validate(2).is_err());
        assert!(SolverConfig { dt: -1.0, ..cfg.clone() }.validate(2).is_err());
        // 2/r1 + n/p = 2/8 + 2/4 < 3/2.
        assert!(SolverConfig { r1: 8.0, p: 4.0, ..cfg.clone() }.validate(2).is_err());
    }

    #[test]
    fn step_count_covers_horizon() {
        let cfg = SolverConfig { dt: 0.3, horizon: 1.0, ..Default::default() };
        assert_eq!(cfg.steps(), 4);
        assert_eq!(*cfg.times().last().unwrap(), 1.0);
        let cfg = SolverConfig { dt: 0.1, horizon: 1.0, ..Default::default() };
        assert_eq!(cfg.steps(), 10);
        assert_eq!(cfg.with_steps(2.0, 8).steps(), 8);
    }
}
