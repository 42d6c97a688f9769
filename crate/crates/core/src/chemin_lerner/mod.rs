//! Time trajectories and Chemin-Lerner / `L^r(Ḃ)` space-time norms.

mod norms;
mod trajectory;

pub use norms::{
    chemin_lerner_norm, chemin_lerner_norm_in, lr_besov_norm, minkowski_ordering_audit, time_lr_norm, FieldSelector,
    MinkowskiReport, MINKOWSKI_SLACK,
};
pub use trajectory::{ShellNormCache, Species, Trajectory};
