//! Truncated master equation: ground, single and double excitation manifolds.

pub mod detection;
pub mod direct;
pub mod drive;
pub mod evolve;
pub mod g2;
pub mod liouvillian;
pub mod state;

pub use detection::{DetectionKind, DetectionOperator};
pub use direct::{steady_state_direct, DirectOptions};
pub use drive::{DriveConfig, DriveKind, LOW_INTENSITY_GUARD};
pub use evolve::{default_step, evolve, evolve_sampled, evolve_with, relative_residual, steady_state, steady_state_with, SteadyStateOptions};
pub use g2::{g2_tau, g2_tau_from, g2_zero, g2_zero_freespace, intensity, intensity_freespace, project_photon};
pub use liouvillian::{liouvillian_rhs, Liouvillian};
pub use state::DensityMatrix;
