//! Wedge-block model of a single lossy transmission.
//!
//! A block of mass `M` translates along `x̂` and is coupled to a wedge of
//! mass `m` that slides along a slope of angle `α` through the holonomic
//! constraint `-x + u·cos α = 0`. The wedge coordinate `u` plays the role of
//! a motor rotor behind a speed reduction of `1/cos α`; Coulomb friction `μ`
//! at the contact surface makes the coupling lossy and *directional*:
//!
//! * forward-driving (pushing the wedge to move the block):
//!   `η_f = 1 / (1 + μ·tan α)`,
//! * backward-driving (pushing the block to move the wedge):
//!   `η_b = 1 - μ·tan α`.
//!
//! At `μ·tan α = 1` the backward path locks (`η_b = 0`): no external force
//! on the block can move the wedge. The asymmetry carries into the reduced
//! dynamics,
//!
//! ```text
//! FWD:  (M + η_f·m/cos²α)·ẍ   = f_x - η_f·f̂_u
//! BWD:  (M + m/(η_b·cos²α))·ẍ = f_x - f̂_u/η_b
//! ```
//!
//! with `f̂_u = f_u / cos α`, and into the mechanical impedance coefficients
//! `M/η_f + m/cos²α` (FWD) and `M + m/(η_b·cos²α)` (BWD).
//!
//! Everything here is closed-form; [`crate::oracle`] certifies the same
//! quantities by brute-force constrained simulation.

use crate::error::{Error, Result};

/// Smallest slope angle accepted (rad). Below this the constraint direction
/// degenerates into `x̂` and the reduction ratio is numerically meaningless.
pub const MIN_SLOPE_ANGLE: f64 = 1e-6;

/// Direction of power flow through a transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveMode {
    /// Power flows from the actuator through the transmission to the load.
    Forward,
    /// An external load drives the transmission and the actuator in reverse.
    Backward,
    /// Lossless reference (`η = 1` both ways).
    Ideal,
}

impl DriveMode {
    pub fn label(self) -> &'static str {
        match self {
            Self::Forward => "forward",
            Self::Backward => "backward",
            Self::Ideal => "ideal",
        }
    }
}

/// Parameters of the wedge-block pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeParams {
    /// Block (output) mass, kg.
    pub block_mass: f64,
    /// Wedge (input) mass, kg.
    pub wedge_mass: f64,
    /// Slope angle α, rad, in `(MIN_SLOPE_ANGLE, π/2)`.
    pub slope_angle: f64,
    /// Coulomb friction coefficient μ ≥ 0 at the meshing surface.
    pub friction_coeff: f64,
}

impl WedgeParams {
    pub fn new(block_mass: f64, wedge_mass: f64, slope_angle: f64, friction_coeff: f64) -> Result<Self> {
        if !(block_mass > 0.0) || !block_mass.is_finite() {
            return Err(Error::InvalidParameter { context: "block mass must be > 0", value: block_mass });
        }
        if !(wedge_mass > 0.0) || !wedge_mass.is_finite() {
            return Err(Error::InvalidParameter { context: "wedge mass must be > 0", value: wedge_mass });
        }
        if !(slope_angle >= MIN_SLOPE_ANGLE && slope_angle < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter {
                context: "slope angle must lie in (1e-6, pi/2) rad",
                value: slope_angle,
            });
        }
        if !(friction_coeff >= 0.0) || !friction_coeff.is_finite() {
            return Err(Error::InvalidParameter { context: "friction coefficient must be >= 0", value: friction_coeff });
        }
        Ok(Self { block_mass, wedge_mass, slope_angle, friction_coeff })
    }

    /// Speed reduction ratio `u̇/ẋ = 1/cos α` (input over output speed).
    pub fn reduction_ratio(&self) -> f64 {
        1.0 / self.slope_angle.cos()
    }

    /// `μ·tan α`, the product that decides backdrivability.
    pub fn friction_index(&self) -> f64 {
        self.friction_coeff * self.slope_angle.tan()
    }

    /// Constraint Jacobian `A = [-1, cos α]` of `g(q) = -x + u·cos α`.
    pub fn constraint_jacobian(&self) -> [f64; 2] {
        [-1.0, self.slope_angle.cos()]
    }

    /// Constraint nullspace `K = [1, sec α]ᵀ`, satisfying `A·K = 0`.
    pub fn nullspace(&self) -> [f64; 2] {
        [1.0, 1.0 / self.slope_angle.cos()]
    }
}

/// External forces on the pair: `f_x` pushes the block along `x̂`, `f_u`
/// pushes the wedge along `-û` (the sign convention of the driving scenario,
/// so positive `f_u` is a forward-driving push).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WedgeForces {
    pub f_x: f64,
    pub f_u: f64,
}

impl WedgeForces {
    pub fn new(f_x: f64, f_u: f64) -> Result<Self> {
        if !f_x.is_finite() || !f_u.is_finite() {
            return Err(Error::InvalidParameter { context: "forces must be finite", value: f64::NAN });
        }
        Ok(Self { f_x, f_u })
    }

    /// The wedge push projected onto the block coordinate, `f̂_u = f_u/cos α`.
    pub fn projected_wedge_force(&self, p: &WedgeParams) -> f64 {
        self.f_u / p.slope_angle.cos()
    }
}

/// Forward-driving efficiency `η_f = 1/(1 + μ·tan α)`, in `(0, 1]`.
///
/// Equals 1 exactly when `μ = 0`.
pub fn forward_efficiency(p: &WedgeParams) -> f64 {
    1.0 / (1.0 + p.friction_index())
}

/// Backward-driving efficiency `η_b = 1 - μ·tan α`, in `[0, 1]`.
///
/// Returns [`Error::NonBackdrivable`] when `μ·tan α > 1`: beyond that point
/// the mechanism is statically locked and no backward efficiency exists.
/// `η_b = 0` exactly at the limiting case `μ·tan α = 1`.
pub fn backward_efficiency(p: &WedgeParams) -> Result<f64> {
    let idx = p.friction_index();
    if idx > 1.0 {
        return Err(Error::NonBackdrivable { mu_tan_alpha: idx });
    }
    Ok(1.0 - idx)
}

/// The diagonal tangent-space weight applied to the wedge row: `η_f` for
/// forward driving, `1/η_b` for backward driving, 1 for the ideal case.
///
/// This weight is what annihilates the meshing force in the efficiency null
/// `K ᵀ·diag(1, η)·r = 0` and therefore reproduces the reduced dynamics.
pub fn tangent_weight(p: &WedgeParams, mode: DriveMode) -> Result<f64> {
    match mode {
        DriveMode::Ideal => Ok(1.0),
        DriveMode::Forward => Ok(forward_efficiency(p)),
        DriveMode::Backward => {
            let eta_b = backward_efficiency(p)?;
            if eta_b == 0.0 {
                return Err(Error::DivergentInertia);
            }
            Ok(1.0 / eta_b)
        }
    }
}

/// Block acceleration of the reduced single-DoF dynamics,
/// `ẍ = (f_x - η·f̂_u) / (M + η·m/cos²α)` with the mode weight `η` of
/// [`tangent_weight`].
pub fn reduced_acceleration(p: &WedgeParams, f: &WedgeForces, mode: DriveMode) -> Result<f64> {
    let eta = tangent_weight(p, mode)?;
    let sec2 = 1.0 / (p.slope_angle.cos() * p.slope_angle.cos());
    let inertia = p.block_mass + eta * p.wedge_mass * sec2;
    Ok((f.f_x - eta * f.projected_wedge_force(p)) / inertia)
}

/// Coefficient of `s` in the mechanical impedance `X(s)`:
/// `M/η_f + m/cos²α` (forward, force at the wedge over block speed) or
/// `M + m/(η_b·cos²α)` (backward, force at the block over block speed).
///
/// Non-decreasing as either efficiency degrades; both collapse to
/// `M + m/cos²α` when `μ = 0`.
pub fn impedance_coefficient(p: &WedgeParams, mode: DriveMode) -> Result<f64> {
    let sec2 = 1.0 / (p.slope_angle.cos() * p.slope_angle.cos());
    match mode {
        DriveMode::Ideal => Ok(p.block_mass + p.wedge_mass * sec2),
        DriveMode::Forward => Ok(p.block_mass / forward_efficiency(p) + p.wedge_mass * sec2),
        DriveMode::Backward => {
            let eta_b = backward_efficiency(p)?;
            if eta_b == 0.0 {
                return Err(Error::DivergentInertia);
            }
            Ok(p.block_mass + p.wedge_mass * sec2 / eta_b)
        }
    }
}

/// Direction of the combined constraint-plus-friction meshing force per unit
/// multiplier: `[-1, cos α + μ·sin α]` when forward-driving and
/// `[-1, cos α - μ·sin α]` when backward-driving. The ideal direction
/// `[-1, cos α]` (pure constraint force) is returned for [`DriveMode::Ideal`]
/// and is the `μ = 0` limit of both branches.
pub fn meshing_force_direction(p: &WedgeParams, mode: DriveMode) -> [f64; 2] {
    let (sin, cos) = p.slope_angle.sin_cos();
    let friction = match mode {
        DriveMode::Forward => p.friction_coeff * sin,
        DriveMode::Backward => -p.friction_coeff * sin,
        DriveMode::Ideal => 0.0,
    };
    [-1.0, cos + friction]
}
