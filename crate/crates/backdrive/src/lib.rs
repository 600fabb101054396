//! Transmission-efficiency-aware rigid-body dynamics for floating-base
//! robots.
//!
//! Geared transmissions are lossy, and the loss is *directional*: driving a
//! joint through its gearbox costs a forward efficiency `η_f`, while an
//! external force backdriving the same gearbox sees a smaller backward
//! efficiency `η_b` — down to zero for self-locking drives. This crate embeds
//! those per-transmission efficiencies directly into the equations of motion
//! of a planar floating-base robot and computes the design metrics that
//! follow from them:
//!
//! * [`wedge`] — the single-transmission wedge-block model: closed-form
//!   directional efficiencies, reduced dynamics, mechanical impedances;
//! * [`topology`] — reduction and actuation-topology matrices, the
//!   rotor–joint constraint, its nullspace, and the efficiency stretch of
//!   the tangent space;
//! * [`model`] / [`dynamics`] — planar floating-base kinematics, the
//!   redundant mass matrix, and the dissipative equation of motion
//!   `H(η)·ÿ + Kᵀ·E·c = J̄ᵀ·f_ext + (D̄Ḡ)⁻ᵀ·Ē·τ_act`;
//! * [`metrics`] — generalized inertia ellipsoids (ideal, forward,
//!   backward), force-capability polytopes, and the directional impact
//!   mitigation factor;
//! * [`oracle`] — brute-force time-stepping simulations (explicit Lagrange
//!   multipliers, exact Coulomb friction with stick detection) that certify
//!   every closed form numerically;
//! * [`description`] / [`study`] / [`plot`] — JSON robot descriptions, the
//!   bundled 2-DoF leg preset, efficiency sweeps, and CSV/SVG emission.
//!
//! Run `cargo run -- leg-study` for the end-to-end design study, or start
//! with the runnable examples (`cargo run --example wedge_efficiency`).

pub mod description;
pub mod dynamics;
pub mod error;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod plot;
pub mod study;
pub mod topology;
pub mod wedge;

pub use error::{Error, Result};
pub use model::{BaseParams, LinkParams, RobotModel, RobotState, RotorMount};
pub use topology::{ActuationTopology, CoordinateChain, EfficiencyAssignment, TransmissionSpec};
pub use wedge::{DriveMode, WedgeForces, WedgeParams};
