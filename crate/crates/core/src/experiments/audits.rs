//! Experiment wrappers around the inequality audits.

use super::ExperimentSpec;
use crate::error::Result;
use crate::littlewood_paley::{bernstein_audit, BernsteinReport};
use crate::solver::{heat_smoothing_audit, product_audit, AuditData, HeatAuditConfig, HeatAuditReport, ProductAuditReport};

fn values<T: Clone>(v: &Option<T>) -> T {
    v.clone().expect("validated spec")
}

pub fn product_experiment(spec: &ExperimentSpec) -> Result<ProductAuditReport> {
    spec.validate()?;
    let grid = spec.grid()?;
    product_audit(&grid, values(&spec.p).0, values(&spec.q).0, spec.solver.r1, values(&spec.trials), spec.seed)
}

/// Heat smoothing at the critical index, with shell-localized data.
pub fn heat_experiment(spec: &ExperimentSpec) -> Result<HeatAuditReport> {
    spec.validate()?;
    let grid = spec.grid()?;
    let cfg = HeatAuditConfig {
        index: spec.solver.critical_index(grid.dim()),
        r_values: values(&spec.r_values).iter().map(|r| r.0).collect(),
        horizons: values(&spec.horizons),
        trials: values(&spec.trials),
        seed: spec.seed,
        data: AuditData::ShellLocalized(values(&spec.shells)),
    };
    heat_smoothing_audit(&grid, &cfg)
}

pub fn bernstein_experiment(spec: &ExperimentSpec) -> Result<BernsteinReport> {
    spec.validate()?;
    let grid = spec.grid()?;
    bernstein_audit(
        &grid,
        values(&spec.s),
        values(&spec.p).0,
        values(&spec.q).0,
        &values(&spec.shells),
        values(&spec.trials),
        spec.seed,
    )
}
