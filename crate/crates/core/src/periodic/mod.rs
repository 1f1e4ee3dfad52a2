//! Periodic orbits near a critical orbit: Fourier-Galerkin continuation and
//! integrator-based verification.

mod continuation;
mod export;
mod fourier;
mod galerkin;
mod integrate;
mod verify;

pub use continuation::{
    amplitude_grid, cluster_basis, continue_all_branches, continue_family, default_amplitudes,
    kernel_predictor, ContinuationOptions, OrbitFamily, OrbitFamilySample, DEFAULT_MODES,
    DEFAULT_NEWTON_TOL,
};
pub use export::{write_family_csv, write_trajectory_csv};
pub use fourier::{min_nodes, nodes, FourierTrajectory};
pub use galerkin::{galerkin_residual, galerkin_residual_with_nodes};
pub use integrate::{energy, first_return_time, integrate_ode, IntegrationResult};
pub use verify::{active_modes, dist_to_orbit, verify_orbit, VerifyOptions};
