//! Littlewood-Paley decomposition and homogeneous Besov norms on the torus.

mod bernstein;
mod index;
mod partition;
mod shells;

pub use bernstein::{bernstein_audit, bernstein_ratio, BernsteinReport, ShellRatio, BERNSTEIN_STABILITY};
pub use index::BesovIndex;
pub use partition::{DyadicPartition, ANNULUS_INNER, ANNULUS_OUTER, BALL_OUTER};
pub use shells::{
    dyadic_dilation, frequency_split, lp_norm, lp_norm_of_samples, representable_range, BesovReport, Measure,
    ShellDecomposition, ShellRow,
};
pub(crate) use shells::lq_sum;
