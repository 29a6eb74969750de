//! Shared error type for all builders and solvers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RotcavError {
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {defect:.3e} exceeds {tolerance:.3e}")]
    NonHermitianInput { defect: f64, tolerance: f64 },

    #[error("eigensolver failed to converge within {max_iterations} iterations")]
    ConvergenceFailure { max_iterations: usize },

    #[error("rotation axis has a Z component (|omega_z| = {omega_z:.3e}) but an XY-plane axis is required")]
    NonPlanarAxis { omega_z: f64 },

    #[error("in-plane angular velocity is zero; the rotated basis is undefined (use the non-rotating path)")]
    ZeroPlanarRotation,

    #[error("total angular velocity is zero; use the non-rotating builder")]
    ZeroTotalRotation,

    #[error("cavity coupling g is zero")]
    ZeroCoupling,

    #[error("secular function evaluated too close to the pole at shaft value {pole}")]
    PoleEvaluation { pole: f64 },

    #[error("r = {r} lies outside the model domain [{r_min}, {r_max}]")]
    DomainError { r: f64, r_min: f64, r_max: f64 },

    #[error("no crossing of the shifted resonance condition inside the search window [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("scan grid has {points} points, exceeding the cap of {cap}")]
    GridTooLarge { points: usize, cap: usize },

    #[error("radial grid too coarse: dr = {dr:.3e} exceeds the resolution bound {bound:.3e}")]
    GridTooCoarse { dr: f64, bound: f64 },

    #[error("norm drift {drift:.3e} exceeded {bound:.3e} at step {step}; try a smaller time step")]
    StabilityViolation { step: usize, drift: f64, bound: f64 },

    #[error("wavepacket is in the {found} frame but the transform expects {expected}")]
    FrameMismatch { expected: &'static str, found: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, RotcavError>;
