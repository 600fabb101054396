//! Task-space design metrics under directional transmission efficiency.
//!
//! All three metric families are evaluated at one configuration of the
//! planar robot, at rest:
//!
//! * **Inertia ellipsoids.** The task-space inertia `(J̄·H⁻¹·J̄ᵀ)⁻¹` felt at
//!   the foot. `GIE` uses the ideal inertia `H(1)`; `BGIE` uses `H(1/η_b)`
//!   (an external force must backdrive the rotors); `FGIE` additionally
//!   corrects the actuation path through the Moore–Penrose bracket
//!   `[((J̄D̄Ḡ)⁺)ᵀ·Ē·(J̄D̄Ḡ)ᵀ]⁻¹`. Both lossy ellipsoids dominate the ideal
//!   one in every direction.
//!
//! * **Force capability.** The image of the rotor torque box
//!   `[-τ_max, τ_max]^m` under `((J·D·G)⁺)ᵀ` using the limb contact Jacobian
//!   alone. Efficiency scales the box per joint: by `η_f` when the actuators
//!   produce force (FFC shrinks), by `1/η_b` when they resist an external
//!   load (BFC grows — without bound as a transmission approaches
//!   self-locking).
//!
//! * **Impact mitigation factor.** `ξ(n̂) = 1 - λ(n̂)/λᴿ(n̂)`, the backdriven
//!   apparent inertia along a contact direction relative to the all-joints-
//!   welded composite body: 1 for a perfectly backdrivable mechanism, 0 for
//!   a statue.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::dynamics::{dissipative_eom, DissipativeEoM};
use crate::error::{Error, Result};
use crate::model::{limb_jacobian, locked_composite, RobotModel, RobotState};
use crate::topology::{reduced_efficiency_matrix, EfficiencyAssignment};
use crate::wedge::DriveMode;

/// Rank threshold for task Jacobians: smallest singular value relative to
/// the largest.
const SINGULAR_RANK_TOL: f64 = 1e-10;

/// A task-space inertia matrix (2×2, kg) with its drive mode.
///
/// The forward variant is generally non-symmetric; plots and directional
/// queries use the symmetric part.
#[derive(Debug, Clone, PartialEq)]
pub struct InertiaEllipsoid {
    matrix: Matrix2<f64>,
    mode: DriveMode,
}

impl InertiaEllipsoid {
    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.matrix
    }

    pub fn mode(&self) -> DriveMode {
        self.mode
    }

    /// Symmetric part `(Λ + Λᵀ)/2`, used for plotting and quadratic forms.
    pub fn symmetric_part(&self) -> Matrix2<f64> {
        0.5 * (self.matrix + self.matrix.transpose())
    }

    /// Directional inertia `n̂ᵀ·sym(Λ)·n̂` along a unit direction.
    pub fn directional_inertia(&self, direction: Vector2<f64>) -> f64 {
        let n = direction.normalize();
        (n.transpose() * self.symmetric_part() * n)[(0, 0)]
    }

    /// Apparent point inertia `(n̂ᵀ·Λ⁻¹·n̂)⁻¹` along a unit direction: the
    /// scalar mass an impulse along `n̂` feels.
    pub fn apparent_inertia_along(&self, direction: Vector2<f64>) -> Result<f64> {
        let n = direction.normalize();
        let inv = self
            .symmetric_part()
            .try_inverse()
            .ok_or(Error::SingularInertia)?;
        let q = (n.transpose() * inv * n)[(0, 0)];
        if q <= 0.0 {
            return Err(Error::SingularInertia);
        }
        Ok(1.0 / q)
    }

    /// Boundary of the ellipse `{Λ^{1/2}·û}` sampled at `samples` angles,
    /// for plotting (semi-axes are the square roots of the eigenvalues).
    pub fn ellipse_points(&self, samples: usize) -> Vec<Vector2<f64>> {
        let sym = self.symmetric_part();
        let eig = sym.symmetric_eigen();
        let sqrt = &eig.eigenvectors
            * Matrix2::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
            * eig.eigenvectors.transpose();
        (0..samples)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k as f64) / (samples as f64);
                sqrt * Vector2::new(t.cos(), t.sin())
            })
            .collect()
    }
}

/// A convex, origin-symmetric polygon of achievable task forces (N).
#[derive(Debug, Clone, PartialEq)]
pub struct ForcePolytope {
    vertices: Vec<Vector2<f64>>,
    mode: DriveMode,
    unbounded: bool,
}

impl ForcePolytope {
    /// Hull vertices in counter-clockwise order. Empty when unbounded.
    pub fn vertices(&self) -> &[Vector2<f64>] {
        &self.vertices
    }

    pub fn mode(&self) -> DriveMode {
        self.mode
    }

    /// A locked backward transmission makes the resistible force unbounded;
    /// sweeps report this as a flagged polytope instead of an error.
    pub fn is_unbounded(&self) -> bool {
        self.unbounded
    }

    pub fn unbounded(mode: DriveMode) -> Self {
        Self { vertices: Vec::new(), mode, unbounded: true }
    }

    /// Support function: the largest reach of the polytope along `n̂`.
    pub fn extent_along(&self, direction: Vector2<f64>) -> f64 {
        if self.unbounded {
            return f64::INFINITY;
        }
        let n = direction.normalize();
        self.vertices
            .iter()
            .map(|v| v.dot(&n))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn operational_inertia(eom: &DissipativeEoM) -> Result<Matrix2<f64>> {
    let h_inv = eom.h_inverse()?;
    let j = eom.task_jacobian();
    check_task_rank(j)?;
    let core = j * h_inv * j.transpose();
    let inv = core
        .try_inverse()
        .ok_or(Error::SingularJacobian { context: "task-space inertia core" })?;
    Ok(Matrix2::new(inv[(0, 0)], inv[(0, 1)], inv[(1, 0)], inv[(1, 1)]))
}

fn check_task_rank(j: &DMatrix<f64>) -> Result<()> {
    let svd = j.clone().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if !(min > SINGULAR_RANK_TOL * max.max(1e-300)) {
        return Err(Error::SingularJacobian { context: "task Jacobian lost row rank" });
    }
    Ok(())
}

/// Conventional generalized inertia ellipsoid: task-space inertia of the
/// ideal (`η = 1`) model. Independent of any efficiency assignment.
pub fn gie(model: &RobotModel, state: &RobotState) -> Result<InertiaEllipsoid> {
    let assign = EfficiencyAssignment::uniform(DriveMode::Ideal, model.transmissions());
    let eom = dissipative_eom(model, state, &assign)?;
    Ok(InertiaEllipsoid { matrix: operational_inertia(&eom)?, mode: DriveMode::Ideal })
}

/// Backward generalized inertia ellipsoid: the inertia an external force
/// feels, computed like the conventional one but with `H(1/η_b)`.
pub fn bgie(model: &RobotModel, state: &RobotState, assign: &EfficiencyAssignment) -> Result<InertiaEllipsoid> {
    let assign = assign.with_modes_of(DriveMode::Backward);
    let eom = dissipative_eom(model, state, &assign)?;
    Ok(InertiaEllipsoid { matrix: operational_inertia(&eom)?, mode: DriveMode::Backward })
}

/// Forward generalized inertia ellipsoid: the inertia the actuators feel
/// when exerting a virtual task force,
/// `(J̄·H⁻¹(η_f)·J̄ᵀ)⁻¹ · [((J̄D̄Ḡ)⁺)ᵀ·Ē(η_f)·(J̄D̄Ḡ)ᵀ]⁻¹`.
pub fn fgie(model: &RobotModel, state: &RobotState, assign: &EfficiencyAssignment) -> Result<InertiaEllipsoid> {
    let assign = assign.with_modes_of(DriveMode::Forward);
    let eom = dissipative_eom(model, state, &assign)?;
    let base = operational_inertia(&eom)?;

    let nb = eom.base_dof();
    let m = eom.joint_count();
    let nr = nb + m;
    let j = eom.task_jacobian();
    let mut dg_bar = DMatrix::identity(nr, nr);
    dg_bar.view_mut((nb, nb), (m, m)).copy_from(model.chain().coupling());
    let jdg = j * &dg_bar; // 2×(nb+m)
    let pinv = jdg
        .clone()
        .pseudo_inverse(SINGULAR_RANK_TOL)
        .map_err(|_| Error::SingularJacobian { context: "Moore-Penrose factor of the actuation path" })?;
    let e_bar = reduced_efficiency_matrix(&assign, nb)?;
    let bracket = pinv.transpose() * e_bar * jdg.transpose(); // 2×2
    let bracket_inv = Matrix2::new(bracket[(0, 0)], bracket[(0, 1)], bracket[(1, 0)], bracket[(1, 1)])
        .try_inverse()
        .ok_or(Error::SingularJacobian { context: "actuation-path bracket" })?;
    Ok(InertiaEllipsoid { matrix: base * bracket_inv, mode: DriveMode::Forward })
}

/// Vertices of the box `Π_j [-τ_max,j·scale_j, τ_max,j·scale_j]` mapped
/// through `((J·D·G)⁺)ᵀ` and reduced to their convex hull.
fn mapped_torque_box(
    model: &RobotModel,
    state: &RobotState,
    scales: &[f64],
    mode: DriveMode,
) -> Result<ForcePolytope> {
    let m = model.joint_count();
    let j = limb_jacobian(model, &state.q_b, &state.q);
    check_task_rank(&j)?;
    let jdg = j * model.chain().coupling(); // 2×m
    check_task_rank(&jdg)?;
    let pinv = jdg
        .pseudo_inverse(SINGULAR_RANK_TOL)
        .map_err(|_| Error::SingularJacobian { context: "torque-to-force map" })?; // m×2
    let map = pinv.transpose(); // 2×m

    let mut points = Vec::with_capacity(1 << m);
    for corner in 0..(1_u32 << m) {
        let tau = DVector::from_fn(m, |jx, _| {
            let sign = if corner & (1 << jx) != 0 { 1.0 } else { -1.0 };
            sign * model.transmissions()[jx].torque_limit * scales[jx]
        });
        let f = &map * tau;
        points.push(Vector2::new(f[0], f[1]));
    }
    Ok(ForcePolytope { vertices: convex_hull(points), mode, unbounded: false })
}

/// Ideal task-space force capability: the torque box mapped with no
/// efficiency scaling.
pub fn force_capability(model: &RobotModel, state: &RobotState) -> Result<ForcePolytope> {
    let scales = vec![1.0; model.joint_count()];
    mapped_torque_box(model, state, &scales, DriveMode::Ideal)
}

/// Asymmetric force capability: the torque box scaled per joint by `η_f`
/// (forward: force the actuators can *produce*) or `1/η_b` (backward: force
/// the leg can *resist*) before mapping. Forward shrinks the ideal polytope,
/// backward inflates it; a locked joint in backward mode is an error here
/// (sweeps represent it as [`ForcePolytope::unbounded`]).
pub fn asymmetric_force_capability(
    model: &RobotModel,
    state: &RobotState,
    assign: &EfficiencyAssignment,
) -> Result<ForcePolytope> {
    let mode = if assign.is_uniform() { assign.mode(0) } else { DriveMode::Ideal };
    let scales = assign.tangent_weights()?;
    mapped_torque_box(model, state, &scales, mode)
}

/// Directional impact mitigation report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImfReport {
    /// Contact direction (unit).
    pub direction: Vector2<f64>,
    /// `ξ = 1 - λ/λᴿ ∈ [0, 1]`.
    pub xi: f64,
    /// Locked-joint (welded composite) apparent inertia along the direction, kg.
    pub locked_inertia: f64,
    /// Backdriven apparent inertia along the direction, kg.
    pub backdriven_inertia: f64,
}

/// Apparent inertia of the all-joints-welded composite body at the foot:
/// `λᴿ(n̂) = (1/m_tot + (r × n̂)²/I_tot)⁻¹` with `r` from the composite
/// center of mass to the contact point.
pub fn locked_inertia_along(model: &RobotModel, state: &RobotState, direction: Vector2<f64>) -> f64 {
    let n = direction.normalize();
    let (mass, inertia, com) = locked_composite(model, &state.q_b, &state.q);
    let kin = crate::model::kinematics(model, &state.q_b, &state.q);
    let r = kin.foot() - com;
    let cross = r.x * n.y - r.y * n.x;
    1.0 / (1.0 / mass + cross * cross / inertia)
}

/// Directional impact mitigation factor `ξ(n̂) = 1 - λ(n̂)/λᴿ(n̂)` with the
/// backdriven inertia `λ` from the backward ellipsoid and the reference
/// `λᴿ` from the welded composite body.
pub fn impact_mitigation_factor(
    model: &RobotModel,
    state: &RobotState,
    assign: &EfficiencyAssignment,
    direction: Vector2<f64>,
) -> Result<ImfReport> {
    let norm = direction.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidParameter { context: "impact direction must be a nonzero vector", value: norm });
    }
    let n = direction / norm;
    let ellipsoid = bgie(model, state, assign)?;
    let backdriven = ellipsoid.apparent_inertia_along(n)?;
    let locked = locked_inertia_along(model, state, n);
    let xi = (1.0 - backdriven / locked).clamp(0.0, 1.0);
    Ok(ImfReport { direction: n, xi, locked_inertia: locked, backdriven_inertia: backdriven })
}

/// Andrew monotone-chain convex hull; returns CCW vertices. Input sizes here
/// are `2^m` for desk-scale `m`, so O(n log n) is more than enough.
fn convex_hull(mut points: Vec<Vector2<f64>>) -> Vec<Vector2<f64>> {
    points.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).expect("finite coordinates"));
    points.dedup_by(|a, b| (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
    let n = points.len();
    if n <= 2 {
        return points;
    }
    let cross = |o: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>| {
        (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
    };
    let mut hull: Vec<Vector2<f64>> = Vec::with_capacity(2 * n);
    for p in points.iter().chain(points.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BaseParams, LinkParams, RotorMount};
    use crate::topology::{backward_from_forward, ActuationTopology, TransmissionSpec};
    use nalgebra::DVector;

    fn leg_model() -> RobotModel {
        RobotModel::new(
            Some(BaseParams { mass: 5.0, inertia: 5.0 * 0.32 / 12.0, side: 0.4 }),
            vec![
                LinkParams { mass: 0.4, length: 0.3, com_offset: 0.15, inertia: 0.003, mount: RotorMount::Parent },
                LinkParams { mass: 0.4, length: 0.3, com_offset: 0.15, inertia: 0.003, mount: RotorMount::Parent },
            ],
            vec![
                TransmissionSpec::new(20.0, 0.8, 6.4e-5, 17.0).unwrap(),
                TransmissionSpec::new(20.0, 0.7, 6.4e-5, 17.0).unwrap(),
            ],
            ActuationTopology::serial(2),
            Vector2::new(0.0, -9.81),
        )
        .unwrap()
    }

    fn leg_state(model: &RobotModel) -> RobotState {
        RobotState::at_rest(
            model,
            DVector::zeros(3),
            DVector::from_row_slice(&[60.0_f64.to_radians(), 60.0_f64.to_radians()]),
        )
        .unwrap()
    }

    fn forward_assign(model: &RobotModel) -> EfficiencyAssignment {
        EfficiencyAssignment::uniform(DriveMode::Forward, model.transmissions())
    }

    #[test]
    fn gie_is_symmetric_positive_definite() {
        let model = leg_model();
        let state = leg_state(&model);
        let g = gie(&model, &state).unwrap();
        let m = g.matrix();
        assert!((m - m.transpose()).norm() < 1e-10);
        let eig = g.symmetric_part().symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn unit_efficiency_collapses_everything_to_gie() {
        let model = leg_model();
        let state = leg_state(&model);
        let ideal = EfficiencyAssignment::uniform_with_forward(DriveMode::Forward, 1.0, model.transmissions()).unwrap();
        let g = gie(&model, &state).unwrap();
        let f = fgie(&model, &state, &ideal).unwrap();
        let b = bgie(&model, &state, &ideal).unwrap();
        assert!((g.matrix() - f.matrix()).norm() < 1e-9, "fgie {:?}", f.matrix());
        assert!((g.matrix() - b.matrix()).norm() < 1e-9);
    }

    #[test]
    fn lossy_ellipsoids_dominate_ideal_directionally() {
        let model = leg_model();
        let state = leg_state(&model);
        let assign = forward_assign(&model);
        let g = gie(&model, &state).unwrap();
        let f = fgie(&model, &state, &assign).unwrap();
        let b = bgie(&model, &state, &assign).unwrap();
        for k in 0..360 {
            let t = (k as f64).to_radians();
            let n = Vector2::new(t.cos(), t.sin());
            let gd = g.directional_inertia(n);
            assert!(f.directional_inertia(n) >= gd - 1e-12, "fgie at {k} deg");
            assert!(b.directional_inertia(n) >= gd - 1e-12, "bgie at {k} deg");
        }
    }

    #[test]
    fn backward_dominates_forward_on_the_leg() {
        let model = leg_model();
        let state = leg_state(&model);
        let assign = forward_assign(&model);
        let f = fgie(&model, &state, &assign).unwrap();
        let b = bgie(&model, &state, &assign).unwrap();
        for k in 0..360 {
            let t = (k as f64).to_radians();
            let n = Vector2::new(t.cos(), t.sin());
            assert!(b.directional_inertia(n) >= f.directional_inertia(n) - 1e-12, "at {k} deg");
        }
    }

    #[test]
    fn bgie_inertia_grows_as_efficiency_drops() {
        let model = leg_model();
        let state = leg_state(&model);
        let z = Vector2::new(0.0, 1.0);
        let mut last = 0.0;
        for (i, eta_f) in [1.0, 0.9, 0.8, 0.7, 0.6, 0.55].iter().enumerate() {
            let assign =
                EfficiencyAssignment::uniform_with_forward(DriveMode::Backward, *eta_f, model.transmissions()).unwrap();
            let b = bgie(&model, &state, &assign).unwrap();
            let along = b.directional_inertia(z);
            if i > 0 {
                assert!(along > last, "not increasing at eta_f {eta_f}");
            }
            last = along;
        }
    }

    #[test]
    fn bgie_approaches_locked_inertia_when_nearly_locked() {
        let model = leg_model();
        let state = leg_state(&model);
        // pick eta_f so that eta_b = 1e-4 via the gear formula (bisection)
        let g_ratio = 0.05;
        let target = 1e-4;
        let mut lo = 0.49875;
        let mut hi = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if backward_from_forward(mid, g_ratio) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let assign =
            EfficiencyAssignment::uniform_with_forward(DriveMode::Backward, hi, model.transmissions()).unwrap();
        let b = bgie(&model, &state, &assign).unwrap();
        for k in 0..8 {
            let t = (k as f64) * std::f64::consts::FRAC_PI_4;
            let n = Vector2::new(t.cos(), t.sin());
            let lam = b.apparent_inertia_along(n).unwrap();
            let lam_ref = locked_inertia_along(&model, &state, n);
            assert!((lam - lam_ref).abs() / lam_ref < 0.01, "direction {k}: {lam} vs {lam_ref}");
        }
    }

    #[test]
    fn force_capability_is_a_symmetric_parallelogram() {
        let model = leg_model();
        let state = leg_state(&model);
        let fc = force_capability(&model, &state).unwrap();
        assert_eq!(fc.vertices().len(), 4);
        // symmetric about the origin
        for v in fc.vertices() {
            let has_mirror = fc.vertices().iter().any(|w| (w + v).norm() < 1e-9);
            assert!(has_mirror);
        }
    }

    #[test]
    fn single_joint_capability_is_a_segment() {
        let model = RobotModel::new(
            None,
            vec![LinkParams { mass: 1.0, length: 0.5, com_offset: 0.25, inertia: 0.01, mount: RotorMount::Parent }],
            vec![TransmissionSpec::new(10.0, 0.9, 1e-4, 3.0).unwrap()],
            ActuationTopology::serial(1),
            Vector2::zeros(),
        )
        .unwrap();
        let state = RobotState::at_rest(&model, DVector::zeros(0), DVector::from_row_slice(&[1.0])).unwrap();
        let fc = force_capability(&model, &state).unwrap();
        assert_eq!(fc.vertices().len(), 2);
        // |f| = τ_max·N/L at the tip, perpendicular to the link
        let expected = 3.0 * 10.0 / 0.5;
        let got = fc.vertices()[0].norm();
        assert!((got - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn uniform_forward_scaling_shrinks_every_vertex() {
        let model = leg_model();
        let state = leg_state(&model);
        let eta = 0.65;
        let assign =
            EfficiencyAssignment::uniform_with_forward(DriveMode::Forward, eta, model.transmissions()).unwrap();
        let fc = force_capability(&model, &state).unwrap();
        let ffc = asymmetric_force_capability(&model, &state, &assign).unwrap();
        assert_eq!(fc.vertices().len(), ffc.vertices().len());
        for v in ffc.vertices() {
            let matched = fc.vertices().iter().any(|w| (w * eta - v).norm() < 1e-9);
            assert!(matched, "vertex {v:?} is not η·(ideal vertex)");
        }
    }

    #[test]
    fn polytope_ordering_forward_ideal_backward() {
        let model = leg_model();
        let state = leg_state(&model);
        let fwd = forward_assign(&model);
        let bwd = EfficiencyAssignment::uniform(DriveMode::Backward, model.transmissions());
        let fc = force_capability(&model, &state).unwrap();
        let ffc = asymmetric_force_capability(&model, &state, &fwd).unwrap();
        let bfc = asymmetric_force_capability(&model, &state, &bwd).unwrap();
        for k in 0..72 {
            let t = (k as f64) * std::f64::consts::PI / 36.0;
            let n = Vector2::new(t.cos(), t.sin());
            let e_f = ffc.extent_along(n);
            let e_i = fc.extent_along(n);
            let e_b = bfc.extent_along(n);
            assert!(e_f <= e_i + 1e-9, "FFC ⊄ FC along {k}");
            assert!(e_i <= e_b + 1e-9, "FC ⊄ BFC along {k}");
        }
    }

    #[test]
    fn locked_backward_capability_is_an_error() {
        let model = leg_model();
        let state = leg_state(&model);
        let assign =
            EfficiencyAssignment::uniform_with_forward(DriveMode::Backward, 0.45, model.transmissions()).unwrap();
        assert!(matches!(
            asymmetric_force_capability(&model, &state, &assign),
            Err(Error::LockedTransmission { .. })
        ));
    }

    #[test]
    fn straight_leg_is_singular() {
        let model = leg_model();
        let state = RobotState::at_rest(
            &model,
            DVector::zeros(3),
            DVector::from_row_slice(&[60.0_f64.to_radians(), 0.0]),
        )
        .unwrap();
        assert!(matches!(
            force_capability(&model, &state),
            Err(Error::SingularJacobian { .. })
        ));
    }

    #[test]
    fn imf_lies_in_unit_interval_and_tracks_backdrivability() {
        let model = leg_model();
        let state = leg_state(&model);
        let z = Vector2::new(0.0, 1.0);
        let mut last = f64::INFINITY;
        for eta_f in [1.0, 0.9, 0.8, 0.7, 0.6] {
            let assign =
                EfficiencyAssignment::uniform_with_forward(DriveMode::Backward, eta_f, model.transmissions()).unwrap();
            let imf = impact_mitigation_factor(&model, &state, &assign, z).unwrap();
            assert!((0.0..=1.0).contains(&imf.xi));
            assert!(imf.xi < last, "xi not decreasing at eta_f {eta_f}");
            last = imf.xi;
        }
    }

    #[test]
    fn nearly_massless_leg_mitigates_fully() {
        // vanishing link masses and rotor inertia: the foot decouples from
        // the base, apparent inertia → 0, ξ → 1
        let model = RobotModel::new(
            Some(BaseParams { mass: 5.0, inertia: 0.13, side: 0.4 }),
            vec![
                LinkParams { mass: 1e-9, length: 0.3, com_offset: 0.15, inertia: 1e-12, mount: RotorMount::Parent },
                LinkParams { mass: 1e-9, length: 0.3, com_offset: 0.15, inertia: 1e-12, mount: RotorMount::Parent },
            ],
            vec![
                TransmissionSpec::new(20.0, 1.0, 0.0, 17.0).unwrap(),
                TransmissionSpec::new(20.0, 1.0, 0.0, 17.0).unwrap(),
            ],
            ActuationTopology::serial(2),
            Vector2::zeros(),
        )
        .unwrap();
        let state = RobotState::at_rest(
            &model,
            DVector::zeros(3),
            DVector::from_row_slice(&[60.0_f64.to_radians(), 60.0_f64.to_radians()]),
        )
        .unwrap();
        let assign = EfficiencyAssignment::uniform(DriveMode::Backward, model.transmissions());
        let imf = impact_mitigation_factor(&model, &state, &assign, Vector2::new(0.0, 1.0)).unwrap();
        assert!(imf.xi > 0.999, "xi = {}", imf.xi);
    }

    #[test]
    fn hull_of_a_mapped_box_is_ccw_and_convex() {
        let pts = vec![
            Vector2::new(1.0, 1.0),
            Vector2::new(-1.0, -1.0),
            Vector2::new(1.0, -1.0),
            Vector2::new(-1.0, 1.0),
            Vector2::new(0.0, 0.0), // interior
        ];
        let hull = convex_hull(pts);
        assert_eq!(hull.len(), 4);
        let area2: f64 = hull
            .iter()
            .zip(hull.iter().cycle().skip(1))
            .map(|(a, b)| a.x * b.y - a.y * b.x)
            .sum();
        assert!(area2 > 0.0, "not counter-clockwise");
    }
}
