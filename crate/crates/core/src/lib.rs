//! Photon statistics of weakly driven two-level atom arrays with collective
//! dipole-dipole coupling.
//!
//! Units: lengths in transition wavelengths, rates and frequencies in the
//! single-atom decay rate Γ.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod greens;
pub mod linalg;
pub mod master;
pub mod overlap;

pub use analytic::{analytic_steady_state, g2_zero_single_mode, g2_zero_two_mode, AnalyticSteadyState, TwoModeG2};
pub use eigen::{bilinear, diagonalize_bilinear, second_photon_rate, DoubleModeSet, EigenOptions, SingleModeSet};
pub use error::{Error, Result};
pub use geometry::{build_line_array, build_square_array, AtomArray, LatticeKind, LatticeSpec, PairIndex};
pub use greens::{build_g, build_gtilde, greens_kernel, GreensMatrices};
pub use master::{DensityMatrix, DetectionKind, DetectionOperator, DriveConfig, DriveKind, Liouvillian};
pub use overlap::{overlap_l, overlap_l_row, overlap_x, OverlapTables};

pub use num_complex::Complex64;
