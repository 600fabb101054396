//! Planar floating-base robot model: geometry, inertial parameters, and the
//! analytic kinematics the dynamics assembly is built on.
//!
//! The robot is a planar square base (optional; omit it for a fixed-base
//! mechanism) carrying a serial chain of `m` links. Each joint `j` is driven
//! by a geared rotor whose spin inertia couples into the dynamics through the
//! body it is mounted on. Conventions:
//!
//! * world axes `x̂` (right) and `ẑ` (up); rotations are counter-clockwise;
//! * the base pose is `(x_b, z_b, θ_b)` at the base's center of mass;
//! * the chain is attached at the base center;
//! * absolute link angles are measured from the downward vertical, so
//!   `θ_i = θ_b + q_1 + … + q_i` and a link at angle θ points along
//!   `e(θ) = (sin θ, -cos θ)` — a hanging chain has all `q_i = 0`;
//! * rotor angles `φ` are relative to their carrier body.

use nalgebra::{DMatrix, DVector, Vector2};

use crate::error::{Error, Result};
use crate::topology::{ActuationTopology, CoordinateChain, TransmissionSpec};

/// Tolerance on the rotor–joint constraint residual accepted by
/// [`RobotState::checked`].
pub const STATE_CONSISTENCY_TOL: f64 = 1e-9;

/// Floating planar base: a uniform square of side `side`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseParams {
    /// Mass, kg.
    pub mass: f64,
    /// Rotary inertia about the center of mass, kg·m².
    pub inertia: f64,
    /// Side length, m (geometry only; inertia is stored explicitly).
    pub side: f64,
}

/// Body a rotor is mounted on (its stator reaction frame).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotorMount {
    /// Mounted on the link preceding the driven joint (the base for joint 1).
    Parent,
    /// Mounted on the base, as in parallel mechanisms that route power
    /// through massless distribution linkages.
    Base,
}

/// One chain link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Mass, kg.
    pub mass: f64,
    /// Length from joint to joint, m.
    pub length: f64,
    /// Center-of-mass offset from the proximal joint along the link, m.
    pub com_offset: f64,
    /// Rotary inertia about the center of mass, kg·m².
    pub inertia: f64,
    /// Where the rotor driving this link's joint is mounted.
    pub mount: RotorMount,
}

/// Full robot: base, links, transmissions, actuation topology, gravity.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    base: Option<BaseParams>,
    links: Vec<LinkParams>,
    transmissions: Vec<TransmissionSpec>,
    chain: CoordinateChain,
    gravity: Vector2<f64>,
}

impl RobotModel {
    pub fn new(
        base: Option<BaseParams>,
        links: Vec<LinkParams>,
        transmissions: Vec<TransmissionSpec>,
        topology: ActuationTopology,
        gravity: Vector2<f64>,
    ) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::InvalidParameter { context: "at least one link required", value: 0.0 });
        }
        if transmissions.len() != links.len() {
            return Err(Error::DimensionMismatch {
                context: "transmission count vs link count",
                expected: links.len(),
                got: transmissions.len(),
            });
        }
        if topology.joint_count() != links.len() {
            return Err(Error::DimensionMismatch {
                context: "topology size vs link count",
                expected: links.len(),
                got: topology.joint_count(),
            });
        }
        if let Some(b) = &base {
            if !(b.mass > 0.0) {
                return Err(Error::InvalidParameter { context: "base mass must be > 0", value: b.mass });
            }
            if !(b.inertia > 0.0) {
                return Err(Error::InvalidParameter { context: "base inertia must be > 0", value: b.inertia });
            }
            if !(b.side > 0.0) {
                return Err(Error::InvalidParameter { context: "base side must be > 0", value: b.side });
            }
        }
        for (i, l) in links.iter().enumerate() {
            if !(l.mass > 0.0) {
                return Err(Error::InvalidParameter { context: "link mass must be > 0", value: l.mass });
            }
            if !(l.length > 0.0) {
                return Err(Error::InvalidParameter { context: "link length must be > 0", value: l.length });
            }
            if !(0.0..=l.length).contains(&l.com_offset) {
                return Err(Error::InvalidParameter {
                    context: "link com offset must lie in [0, length]",
                    value: l.com_offset,
                });
            }
            if !(l.inertia >= 0.0) {
                return Err(Error::InvalidParameter { context: "link inertia must be >= 0", value: l.inertia });
            }
            let _ = i;
        }
        let chain = CoordinateChain::from_transmissions(&transmissions, topology)?;
        Ok(Self { base, links, transmissions, chain, gravity })
    }

    pub fn base(&self) -> Option<&BaseParams> {
        self.base.as_ref()
    }

    pub fn links(&self) -> &[LinkParams] {
        &self.links
    }

    pub fn transmissions(&self) -> &[TransmissionSpec] {
        &self.transmissions
    }

    pub fn chain(&self) -> &CoordinateChain {
        &self.chain
    }

    pub fn gravity(&self) -> Vector2<f64> {
        self.gravity
    }

    /// Number of joints `m`.
    pub fn joint_count(&self) -> usize {
        self.links.len()
    }

    /// Base DoF `nb`: 3 for a floating planar base, 0 for a fixed one.
    pub fn base_dof(&self) -> usize {
        if self.base.is_some() {
            3
        } else {
            0
        }
    }

    ///`nb + m`, the size of the reduced coordinate `y = (q_b, q)`.
    pub fn reduced_dof(&self) -> usize {
        self.base_dof() + self.joint_count()
    }

    /// `nb + 2m`, the size of the redundant coordinate `s = (q_b, q, φ)`.
    pub fn redundant_dof(&self) -> usize {
        self.base_dof() + 2 * self.joint_count()
    }

    /// Index of the carrier body of rotor `j`: `None` is the base,
    /// `Some(k)` is link `k` (0-based).
    pub(crate) fn rotor_carrier(&self, joint: usize) -> Option<usize> {
        match self.links[joint].mount {
            RotorMount::Base => None,
            RotorMount::Parent => {
                if joint == 0 {
                    None
                } else {
                    Some(joint - 1)
                }
            }
        }
    }
}

/// Constraint-consistent robot state `s = (q_b, q, φ)` with velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub q_b: DVector<f64>,
    pub q: DVector<f64>,
    pub phi: DVector<f64>,
    pub qd_b: DVector<f64>,
    pub qd: DVector<f64>,
    pub phid: DVector<f64>,
}

impl RobotState {
    /// Builds a consistent state from the reduced coordinates by projecting
    /// the rotor coordinates through `(DG)⁻¹`.
    pub fn consistent(
        model: &RobotModel,
        q_b: DVector<f64>,
        q: DVector<f64>,
        qd_b: DVector<f64>,
        qd: DVector<f64>,
    ) -> Result<Self> {
        let nb = model.base_dof();
        let m = model.joint_count();
        check_len("base coordinates", nb, q_b.len())?;
        check_len("base velocities", nb, qd_b.len())?;
        check_len("joint coordinates", m, q.len())?;
        check_len("joint velocities", m, qd.len())?;
        let phi = model.chain().rotors_from_joints(&q)?;
        let phid = model.chain().rotors_from_joints(&qd)?;
        Ok(Self { q_b, q, phi, qd_b, qd, phid })
    }

    /// Rest state at the given configuration.
    pub fn at_rest(model: &RobotModel, q_b: DVector<f64>, q: DVector<f64>) -> Result<Self> {
        let nb = model.base_dof();
        let m = model.joint_count();
        Self::consistent(model, q_b, q, DVector::zeros(nb), DVector::zeros(m))
    }

    /// Accepts explicit rotor coordinates, verifying the constraint
    /// `q = DG·φ` and its rate hold to [`STATE_CONSISTENCY_TOL`].
    #[allow(clippy::too_many_arguments)]
    pub fn checked(
        model: &RobotModel,
        q_b: DVector<f64>,
        q: DVector<f64>,
        phi: DVector<f64>,
        qd_b: DVector<f64>,
        qd: DVector<f64>,
        phid: DVector<f64>,
    ) -> Result<Self> {
        let residual = crate::topology::constraint_residual(&q, &phi, model.chain())?;
        if residual.amax() > STATE_CONSISTENCY_TOL {
            return Err(Error::Description {
                message: format!(
                    "state violates the rotor-joint constraint (residual {:.3e})",
                    residual.amax()
                ),
            });
        }
        let rate_residual = crate::topology::constraint_residual(&qd, &phid, model.chain())?;
        if rate_residual.amax() > STATE_CONSISTENCY_TOL {
            return Err(Error::Description {
                message: format!(
                    "state velocities violate the constraint rate (residual {:.3e})",
                    rate_residual.amax()
                ),
            });
        }
        let state = Self { q_b, q, phi, qd_b, qd, phid };
        check_len("base coordinates", model.base_dof(), state.q_b.len())?;
        Ok(state)
    }

    /// Reduced coordinate `y = (q_b, q)`.
    pub fn y(&self) -> DVector<f64> {
        stack(&self.q_b, &self.q)
    }

    /// Reduced velocity `ẏ`.
    pub fn ydot(&self) -> DVector<f64> {
        stack(&self.qd_b, &self.qd)
    }

    /// Redundant coordinate `s = (q_b, q, φ)`.
    pub fn s(&self) -> DVector<f64> {
        stack(&self.y(), &self.phi)
    }

    /// Redundant velocity `ṡ`.
    pub fn sdot(&self) -> DVector<f64> {
        stack(&self.ydot(), &self.phid)
    }
}

fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { context, expected, got });
    }
    Ok(())
}

fn stack(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// 90° counter-clockwise rotation, `S·v = (-v_z, v_x)`.
pub(crate) fn rot90(v: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-v.y, v.x)
}

/// Unit vector of a link at absolute angle θ (from the downward vertical).
pub(crate) fn link_direction(theta: f64) -> Vector2<f64> {
    Vector2::new(theta.sin(), -theta.cos())
}

/// Forward kinematics of one configuration: absolute angles, joint points,
/// and centers of mass, all in world coordinates.
#[derive(Debug, Clone)]
pub struct Kinematics {
    /// Base center of mass.
    pub base_pos: Vector2<f64>,
    /// Base orientation.
    pub base_angle: f64,
    /// Absolute link angles `θ_i`.
    pub link_angles: Vec<f64>,
    /// Joint positions `p_0 … p_m`; `p_0` is the hip, `p_m` the foot.
    pub joints: Vec<Vector2<f64>>,
    /// Link centers of mass.
    pub coms: Vec<Vector2<f64>>,
}

impl Kinematics {
    pub fn foot(&self) -> Vector2<f64> {
        self.joints[self.joints.len() - 1]
    }
}

/// Evaluates the forward kinematics at `(q_b, q)`.
pub fn kinematics(model: &RobotModel, q_b: &DVector<f64>, q: &DVector<f64>) -> Kinematics {
    let m = model.joint_count();
    let (base_pos, base_angle) = if model.base_dof() == 3 {
        (Vector2::new(q_b[0], q_b[1]), q_b[2])
    } else {
        (Vector2::zeros(), 0.0)
    };
    let mut link_angles = Vec::with_capacity(m);
    let mut joints = Vec::with_capacity(m + 1);
    let mut coms = Vec::with_capacity(m);
    // chain attachment at the base center
    joints.push(base_pos);
    let mut theta = base_angle;
    for (i, link) in model.links().iter().enumerate() {
        theta += q[i];
        link_angles.push(theta);
        let dir = link_direction(theta);
        coms.push(joints[i] + link.com_offset * dir);
        joints.push(joints[i] + link.length * dir);
    }
    Kinematics { base_pos, base_angle, link_angles, joints, coms }
}

/// Which rigid body a point belongs to, for Jacobian assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Body {
    Base,
    Link(usize),
}

/// Translational Jacobian (2×(nb+m)) of a world point `pt` rigidly attached
/// to `body`, with respect to the reduced coordinate `y`.
pub(crate) fn point_jacobian(
    model: &RobotModel,
    kin: &Kinematics,
    body: Body,
    pt: Vector2<f64>,
) -> DMatrix<f64> {
    let nb = model.base_dof();
    let m = model.joint_count();
    let mut j = DMatrix::zeros(2, nb + m);
    if nb == 3 {
        j[(0, 0)] = 1.0;
        j[(1, 1)] = 1.0;
        let lever = rot90(pt - kin.base_pos);
        j[(0, 2)] = lever.x;
        j[(1, 2)] = lever.y;
    }
    if let Body::Link(k) = body {
        for a in 0..=k {
            let lever = rot90(pt - kin.joints[a]);
            j[(0, nb + a)] = lever.x;
            j[(1, nb + a)] = lever.y;
        }
    }
    j
}

/// Angular-velocity Jacobian row (1×(nb+m)) of a body: constant selector of
/// `θ̇_b + q̇_1 + … + q̇_k`.
pub(crate) fn angular_jacobian(model: &RobotModel, body: Body) -> DVector<f64> {
    let nb = model.base_dof();
    let m = model.joint_count();
    let mut row = DVector::zeros(nb + m);
    if nb == 3 {
        row[2] = 1.0;
    }
    if let Body::Link(k) = body {
        for a in 0..=k {
            row[nb + a] = 1.0;
        }
    }
    row
}

/// Task (foot) Jacobian `J̄` (2×(nb+m)) over the reduced coordinate.
pub fn foot_jacobian(model: &RobotModel, q_b: &DVector<f64>, q: &DVector<f64>) -> DMatrix<f64> {
    let kin = kinematics(model, q_b, q);
    let m = model.joint_count();
    point_jacobian(model, &kin, Body::Link(m - 1), kin.foot())
}

/// Limb contact Jacobian `J` (2×m): foot velocity per joint rate with the
/// base frozen.
pub fn limb_jacobian(model: &RobotModel, q_b: &DVector<f64>, q: &DVector<f64>) -> DMatrix<f64> {
    let nb = model.base_dof();
    let m = model.joint_count();
    foot_jacobian(model, q_b, q).columns(nb, m).into_owned()
}

/// Composite rigid-body properties with every joint welded: total mass,
/// rotary inertia about the composite center of mass (rotor spin inertias
/// included — locked rotors turn with the body), and the center of mass.
pub fn locked_composite(
    model: &RobotModel,
    q_b: &DVector<f64>,
    q: &DVector<f64>,
) -> (f64, f64, Vector2<f64>) {
    let kin = kinematics(model, q_b, q);
    let mut mass = 0.0;
    let mut weighted = Vector2::zeros();
    if let Some(b) = model.base() {
        mass += b.mass;
        weighted += b.mass * kin.base_pos;
    }
    for (link, com) in model.links().iter().zip(&kin.coms) {
        mass += link.mass;
        weighted += link.mass * com;
    }
    let com = weighted / mass;
    let mut inertia = 0.0;
    if let Some(b) = model.base() {
        inertia += b.inertia + b.mass * (kin.base_pos - com).norm_squared();
    }
    for (link, c) in model.links().iter().zip(&kin.coms) {
        inertia += link.inertia + link.mass * (c - com).norm_squared();
    }
    for t in model.transmissions() {
        inertia += t.rotor_inertia;
    }
    (mass, inertia, com)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::ActuationTopology;
    use std::f64::consts::FRAC_PI_2;

    fn transmission() -> TransmissionSpec {
        TransmissionSpec::new(10.0, 0.9, 1e-4, 5.0).unwrap()
    }

    fn pendulum(com_offset: f64, inertia: f64) -> RobotModel {
        RobotModel::new(
            None,
            vec![LinkParams {
                mass: 2.0,
                length: 0.5,
                com_offset,
                inertia,
                mount: RotorMount::Parent,
            }],
            vec![transmission()],
            ActuationTopology::serial(1),
            Vector2::new(0.0, -9.81),
        )
        .unwrap()
    }

    fn floating_two_link() -> RobotModel {
        RobotModel::new(
            Some(BaseParams { mass: 5.0, inertia: 0.4 / 3.0, side: 0.4 }),
            vec![
                LinkParams { mass: 0.4, length: 0.3, com_offset: 0.15, inertia: 0.003, mount: RotorMount::Parent },
                LinkParams { mass: 0.4, length: 0.3, com_offset: 0.15, inertia: 0.003, mount: RotorMount::Parent },
            ],
            vec![transmission(), transmission()],
            ActuationTopology::serial(2),
            Vector2::new(0.0, -9.81),
        )
        .unwrap()
    }

    #[test]
    fn hanging_chain_points_down() {
        let model = floating_two_link();
        let kin = kinematics(&model, &DVector::zeros(3), &DVector::zeros(2));
        assert!((kin.foot() - Vector2::new(0.0, -0.6)).norm() < 1e-15);
    }

    #[test]
    fn horizontal_link_at_quarter_turn() {
        let model = pendulum(0.5, 0.0);
        let kin = kinematics(&model, &DVector::zeros(0), &DVector::from_row_slice(&[FRAC_PI_2]));
        assert!((kin.foot() - Vector2::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn foot_jacobian_matches_finite_differences() {
        let model = floating_two_link();
        let q_b = DVector::from_row_slice(&[0.3, -0.2, 0.4]);
        let q = DVector::from_row_slice(&[0.9, -0.7]);
        let j = foot_jacobian(&model, &q_b, &q);
        let h = 1e-7;
        for col in 0..5 {
            let mut qb_p = q_b.clone();
            let mut qb_m = q_b.clone();
            let mut q_p = q.clone();
            let mut q_m = q.clone();
            if col < 3 {
                qb_p[col] += h;
                qb_m[col] -= h;
            } else {
                q_p[col - 3] += h;
                q_m[col - 3] -= h;
            }
            let fp = kinematics(&model, &qb_p, &q_p).foot();
            let fm = kinematics(&model, &qb_m, &q_m).foot();
            let fd = (fp - fm) / (2.0 * h);
            assert!((j[(0, col)] - fd.x).abs() < 1e-6, "col {col}");
            assert!((j[(1, col)] - fd.y).abs() < 1e-6, "col {col}");
        }
    }

    #[test]
    fn limb_jacobian_is_joint_block() {
        let model = floating_two_link();
        let q_b = DVector::from_row_slice(&[0.1, 0.2, -0.3]);
        let q = DVector::from_row_slice(&[1.0, 0.5]);
        let full = foot_jacobian(&model, &q_b, &q);
        let limb = limb_jacobian(&model, &q_b, &q);
        assert!((full.columns(3, 2) - limb).norm() < 1e-15);
    }

    #[test]
    fn consistent_state_projects_rotors() {
        let model = floating_two_link();
        let q = DVector::from_row_slice(&[0.3, 0.6]);
        let qd = DVector::from_row_slice(&[-0.2, 0.1]);
        let state =
            RobotState::consistent(&model, DVector::zeros(3), q.clone(), DVector::zeros(3), qd.clone()).unwrap();
        // serial chain with N = 10: rotors spin 10x the joints
        assert!((state.phi[0] - 3.0).abs() < 1e-12);
        assert!((state.phid[1] - 1.0).abs() < 1e-12);
        let residual = crate::topology::constraint_residual(&state.q, &state.phi, model.chain()).unwrap();
        assert!(residual.amax() < 1e-12);
    }

    #[test]
    fn checked_state_rejects_inconsistency() {
        let model = floating_two_link();
        let q = DVector::from_row_slice(&[0.3, 0.6]);
        let bad_phi = DVector::from_row_slice(&[3.0, 6.1]);
        let res = RobotState::checked(
            &model,
            DVector::zeros(3),
            q,
            bad_phi,
            DVector::zeros(3),
            DVector::zeros(2),
            DVector::zeros(2),
        );
        assert!(res.is_err());
    }

    #[test]
    fn locked_composite_of_symmetric_chain() {
        let model = floating_two_link();
        // hanging straight down: total mass and a com on the vertical axis
        let (mass, inertia, com) = locked_composite(&model, &DVector::zeros(3), &DVector::zeros(2));
        assert!((mass - 5.8).abs() < 1e-12);
        assert!(com.x.abs() < 1e-12);
        assert!(com.y < 0.0);
        // parallel-axis terms make it larger than the sum of body inertias
        let body_sum = 0.4 / 3.0 + 2.0 * 0.003 + 2.0 * 1e-4;
        assert!(inertia > body_sum);
    }
}
