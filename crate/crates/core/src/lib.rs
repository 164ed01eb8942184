//! Effective crack energy of periodic voxel microstructures.
//!
//! The crate discretizes the minimum-cut / maximum-flow cell problem with
//! combinatorial continuous maximum flow (face flows bounded per voxel by
//! the crack resistance) and solves it with a damped, adaptive-penalty ADMM
//! whose linear step is a discrete Green operator applied in Fourier space.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`, which is what the solver is tuned and
//! tested for.

pub mod error;
pub mod fft;
pub mod grid;
pub mod microstructure;
pub mod operators;
pub mod oracle;
pub mod scalar;
pub mod solver;
pub mod spectral;

pub use error::{Error, FormatError, Result};
pub use grid::{Axis, GridDims, Reduction};
pub use scalar::Real;
pub use solver::PenaltyStrategy;

pub type Field<const K: usize> = grid::Field<f64, K>;
pub type ScalarField = grid::ScalarField<f64>;
pub type VectorField3 = grid::VectorField3<f64>;
pub type Field6 = grid::Field6<f64>;
pub type Direction = grid::Direction<f64>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type SolveResult = solver::SolveResult<f64>;
pub type Diagnostics = solver::Diagnostics<f64>;
pub type SpectralPlan = spectral::SpectralPlan<f64>;
pub type GammaTable = microstructure::GammaTable<f64>;
pub type PdhgConfig = oracle::PdhgConfig<f64>;
