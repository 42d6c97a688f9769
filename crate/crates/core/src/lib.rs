//! Littlewood-Paley analysis, homogeneous Besov and Chemin-Lerner norms, and a
//! pseudospectral Debye-Hückel solver on the periodic torus.
//!
//! Fields live on a square grid `M^n` over the box `[0, L)^n` and are stored as
//! Fourier coefficients normalized so that the zero mode is the spatial mean.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chemin_lerner;
pub mod dhf;
pub mod error;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod littlewood_paley;
pub mod random;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use field::SpectralField;
pub use grid::Grid;
