//! Shared fixtures for the criterion benches.

use arrayg2_core::experiments::System;
use arrayg2_core::{build_square_array, DriveConfig};

/// Square array with `n_side²` atoms at spacing `d`, with all mode sets built.
pub fn square_system(n_side: usize, d: f64) -> System {
    System::new(build_square_array(n_side, d).expect("valid lattice")).expect("diagonalizable")
}

/// Weak drive of the brightest mode.
pub fn bright_drive(sys: &System) -> DriveConfig {
    let alpha = sys.singles.most_superradiant();
    DriveConfig::eigenmode(&sys.singles, alpha, 1e-3 * sys.singles.gamma[alpha]).expect("weak drive")
}
