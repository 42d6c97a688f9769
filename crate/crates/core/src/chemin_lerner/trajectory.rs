use std::path::Path;

use serde::Serialize;

use crate::dhf;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::littlewood_paley::ShellDecomposition;
use crate::solver::StatePair;

/// Which density a norm is taken of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    V,
    W,
}

/// Cached `‖Δ_j f(t)‖_{L^p}` per species, indexed `[shell][time]`.
#[derive(Clone, Debug, Serialize)]
pub struct ShellNormCache {
    #[serde(with = "crate::report::extended_f64")]
    pub p: f64,
    pub shell_range: (i32, i32),
    pub v: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
}

impl ShellNormCache {
    pub fn table(&self, species: Species) -> &[Vec<f64>] {
        match species {
            Species::V => &self.v,
            Species::W => &self.w,
        }
    }
}

/// Time-stamped states on `[0, T]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<StatePair>,
    cache: Option<ShellNormCache>,
}

impl Trajectory {
    /// `times[0] = 0`, strictly increasing, one state per time, one grid.
    pub fn new(times: Vec<f64>, states: Vec<StatePair>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidTrajectory("empty trajectory".into()));
        }
        if times.len() != states.len() {
            return Err(Error::InvalidTrajectory(format!(
                "{} times but {} states",
                times.len(),
                states.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidTrajectory(format!("first time is {} instead of 0", times[0])));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTrajectory("times are not strictly increasing".into()));
        }
        let grid = states[0].grid();
        if states.iter().any(|s| s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { times, states, cache: None })
    }

    /// Uniform samples `t_i = i dt`.
    pub fn uniform(dt: f64, states: Vec<StatePair>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidTrajectory(format!("time step must be positive, got {dt}")));
        }
        let times = (0..states.len()).map(|i| i as f64 * dt).collect();
        Self::new(times, states)
    }

    /// The same state at every time.
    pub fn constant(state: StatePair, times: Vec<f64>) -> Result<Self> {
        let states = vec![state; times.len()];
        Self::new(times, states)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StatePair] {
        &self.states
    }

    pub fn into_states(self) -> Vec<StatePair> {
        self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    pub fn grid(&self) -> &Grid {
        self.states[0].grid()
    }

    pub fn last(&self) -> &StatePair {
        self.states.last().expect("nonempty")
    }

    /// Uniform step, if the samples are uniform to relative 1e-9.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.len() < 2 {
            return None;
        }
        let dt = self.horizon() / (self.len() - 1) as f64;
        let uniform = self.times.iter().enumerate().all(|(i, &t)| (t - i as f64 * dt).abs() <= 1e-9 * self.horizon());
        uniform.then_some(dt)
    }

    /// Prefix up to and including sample `index`.
    pub fn truncated(&self, index: usize) -> Self {
        let end = (index + 1).min(self.len());
        Self { times: self.times[..end].to_vec(), states: self.states[..end].to_vec(), cache: None }
    }

    /// Every `stride`-th sample (always starting at `t = 0`).
    pub fn subsampled(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        let idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        Self {
            times: idx.iter().map(|&i| self.times[i]).collect(),
            states: idx.iter().map(|&i| self.states[i].clone()).collect(),
            cache: None,
        }
    }

    /// Sample-wise difference of two trajectories on the same times.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.times != other.times {
            return Err(Error::InvalidTrajectory("difference of trajectories on different times".into()));
        }
        let states = self.states.iter().zip(&other.states).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Self::new(self.times.clone(), states)
    }

    /// Compute and attach the shell-norm cache for `p`.
    pub fn with_shell_cache(mut self, shells: &ShellDecomposition, p: f64) -> Result<Self> {
        if shells.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        self.cache = Some(ShellNormCache {
            p,
            shell_range: shells.range(),
            v: self.compute_table(shells, Species::V, p),
            w: self.compute_table(shells, Species::W, p),
        });
        Ok(self)
    }

    pub fn cache(&self) -> Option<&ShellNormCache> {
        self.cache.as_ref()
    }

    fn compute_table(&self, shells: &ShellDecomposition, species: Species, p: f64) -> Vec<Vec<f64>> {
        use rayon::prelude::*;
        let per_time: Vec<Vec<f64>> = self
            .states
            .par_iter()
            .map(|s| {
                let f = match species {
                    Species::V => &s.v,
                    Species::W => &s.w,
                };
                shells.shell_lp_norms(f, p)
            })
            .collect();
        let n_shells = (shells.range().1 - shells.range().0 + 1) as usize;
        (0..n_shells).map(|j| per_time.iter().map(|row| row[j]).collect()).collect()
    }

    /// Shell-norm table `[shell][time]`, from the cache when it matches.
    pub fn shell_table(&self, shells: &ShellDecomposition, species: Species, p: f64) -> Result<Vec<Vec<f64>>> {
        if shells.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        if let Some(cache) = &self.cache {
            if cache.p == p && cache.shell_range == shells.range() {
                return Ok(cache.table(species).to_vec());
            }
        }
        Ok(self.compute_table(shells, species, p))
    }

    /// Writes `snapshot_{i}_{v,w}.dhf1` files and `index.json` into `dir`.
    pub fn export(&self, dir: impl AsRef<Path>) -> Result<()> {
        #[derive(Serialize)]
        struct Entry {
            t: f64,
            v: String,
            w: String,
        }
        #[derive(Serialize)]
        struct Index<'a> {
            dim: usize,
            points: usize,
            box_length: f64,
            times: &'a [f64],
            fields: Vec<Entry>,
            shell_norms: Option<&'a ShellNormCache>,
        }
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut fields = Vec::with_capacity(self.len());
        for (i, (t, s)) in self.times.iter().zip(&self.states).enumerate() {
            let v = format!("snapshot_{i:05}_v.dhf1");
            let w = format!("snapshot_{i:05}_w.dhf1");
            dhf::save(dir.join(&v), &s.v)?;
            dhf::save(dir.join(&w), &s.w)?;
            fields.push(Entry { t: *t, v, w });
        }
        let grid = self.grid();
        let index = Index {
            dim: grid.dim(),
            points: grid.points(),
            box_length: grid.box_length(),
            times: &self.times,
            fields,
            shell_norms: self.cache.as_ref(),
        };
        crate::report::write_json(dir.join("index.json"), &index)
    }
}
