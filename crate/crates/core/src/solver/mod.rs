//! Debye-Hückel drift-diffusion system on the torus: nonlinearity, mild
//! formulation, Picard fixed point, direct evolution and empirical constants.

mod audits;
mod config;
mod duhamel;
mod etd;
mod evolve;
mod horizon;
mod nonlinear;
mod picard;
mod state;

pub use audits::{
    estimate_c0, graded_times, heat_smoothing_audit, low_frequency_audit, product_audit, random_state, AuditData,
    EmpiricalConstants, HeatAuditConfig, HeatAuditEntry, HeatAuditReport, HeatSpread, LowFrequencyReport,
    ProductAuditReport, ProductBand, HEAT_STABILITY, RATIO_CEILING,
};
pub use config::SolverConfig;
pub use duhamel::{bilinear_b, duhamel_integral, heat_flow, mild_residual, picard_map, MildResidual};
pub use etd::{phi, ExpTables};
pub use evolve::{evolve, evolve_with_diagnostics, AmplitudeSample, BlowUpDiagnostic, EvolveDiagnostics, BLOW_UP_AMPLITUDE};
pub use horizon::{select_local_horizon, LocalHorizon, MAX_HALVINGS};
pub use nonlinear::{pair_nonlinearity, potential, rhs};
pub use picard::{fixed_point_solve, monitor_norm, ConvergenceReport, IterateRecord, DIVERGENCE_FACTOR};
pub use state::{Neutralization, StatePair, NEUTRALITY_TOL};
