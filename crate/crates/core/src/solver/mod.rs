//! Damped ADMM for the compatible-normal minimum cut problem.
//!
//! The solver minimizes `(1/N) Σ γ‖ξ‖` over six-component fields `ξ` whose
//! restriction `A*ξ` equals the prescribed mean normal plus a discrete
//! gradient. Each iteration costs one projection onto the compatible fields
//! (a single forward/inverse FFT pass on three components) and one
//! per-voxel ball projection.

mod admm;
mod config;
mod diagnostics;
mod penalty;

pub use admm::{
    admm_iterate, convergence_residual, project_ball, solve, Admm, AdmmState, SolveResult,
    StepStats,
};
pub use config::{PenaltyBounds, PenaltyStrategy, SolverConfig};
pub use diagnostics::{diagnostics, Diagnostics};
pub use penalty::penalty_next;
