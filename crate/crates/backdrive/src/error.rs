//! Crate-wide error type.

use std::fmt;

/// Errors raised by the analytic modules and the simulation oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The transmission is self-locking: `μ·tan α > 1`, i.e. the backward
    /// efficiency would be negative. No external load can backdrive it.
    NonBackdrivable { mu_tan_alpha: f64 },
    /// Backward-mode apparent inertia is infinite because `η_b = 0` exactly.
    DivergentInertia,
    /// A backward-mode operation hit a joint whose backward efficiency is
    /// zero (the transmission is locked).
    LockedTransmission { joint: usize },
    /// Vector/matrix sizes do not agree.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// The coupled reduction `D·G` is numerically singular.
    SingularTopology { condition: f64 },
    /// The task Jacobian lost row rank (kinematic singularity).
    SingularJacobian { context: &'static str },
    /// The equation-of-motion inertia matrix could not be inverted.
    SingularInertia,
    /// Invalid model or simulation parameter.
    InvalidParameter { context: &'static str, value: f64 },
    /// The wedge contact would have to pull (`λ < 0`); the bilateral meshing
    /// model does not cover separation.
    ContactSeparation { time: f64, lambda: f64 },
    /// The averaging window contains sticking or reversing motion, so no
    /// steady power ratio exists.
    NoSlip { detail: &'static str },
    /// Kinetic energy of the non-symmetric form is not positive; the energy
    /// error ratio is undefined.
    DegenerateEnergy,
    /// A robot description file failed to parse or validate.
    Description { message: String },
    /// An inline monotonicity assertion on a sweep failed (regression).
    MonotonicityViolation { message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonBackdrivable { mu_tan_alpha } => write!(
                f,
                "non-backdrivable transmission: mu*tan(alpha) = {mu_tan_alpha} > 1"
            ),
            Self::DivergentInertia => {
                write!(f, "backward efficiency is exactly zero: apparent inertia diverges")
            }
            Self::LockedTransmission { joint } => {
                write!(f, "transmission of joint {joint} is locked (eta_b = 0)")
            }
            Self::DimensionMismatch { context, expected, got } => {
                write!(f, "{context}: expected dimension {expected}, got {got}")
            }
            Self::SingularTopology { condition } => {
                write!(f, "actuation topology D*G is singular (condition {condition:.3e})")
            }
            Self::SingularJacobian { context } => {
                write!(f, "kinematic singularity: {context}")
            }
            Self::SingularInertia => write!(f, "inertia matrix is singular"),
            Self::InvalidParameter { context, value } => {
                write!(f, "invalid parameter: {context} (value {value})")
            }
            Self::ContactSeparation { time, lambda } => write!(
                f,
                "meshing force became negative at t = {time:.6} s (lambda = {lambda:.3e}): separation"
            ),
            Self::NoSlip { detail } => write!(f, "no sustained slip in window: {detail}"),
            Self::DegenerateEnergy => write!(f, "non-symmetric kinetic energy is not positive"),
            Self::Description { message } => write!(f, "robot description: {message}"),
            Self::MonotonicityViolation { message } => {
                write!(f, "sweep monotonicity violated: {message}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
