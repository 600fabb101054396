//! Actuation topology and the rotor–joint constraint machinery.
//!
//! Three angular coordinates chain through a geared robot: rotor angles `φ`
//! (before the reduction), motor angles `ψ = G·φ` (after the reduction), and
//! joint angles `q = D·ψ`. The diagonal reduction `G` holds the speed ratios
//! `1/N_j`; the actuation topology `D` encodes how motor outputs combine into
//! joints (identity for serial mechanisms, coupled rows for parallelogram
//! drives). Motion flows through `G`, `D`, and the task Jacobian `J`, while
//! generalized forces flow back through their transposes.
//!
//! For a floating base with `nb` DoF and `m` joints the redundant state is
//! `s = (q_b, q, φ)` and the constraint `g = q - D·G·φ = 0` has Jacobian
//! `A = [0 | I | -DG]` and the nullspace basis
//!
//! ```text
//!     K = [ I_nb   0      ]
//!         [ 0      I_m    ]
//!         [ 0      (DG)⁻¹ ]
//! ```
//!
//! chosen so that `dy = K ds` preserves the reduced coordinate `y = (q_b, q)`.
//! The efficiency matrix `E` is the diagonal stretch of the tangent space
//! that absorbs transmission friction: ones on base and joint rows, the
//! per-joint tangent weight (`η_f`, `1/η_b`, or 1) on rotor rows.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::wedge::DriveMode;

/// Condition-number threshold beyond which `D·G` is treated as singular.
pub const SINGULAR_TOPOLOGY_CONDITION: f64 = 1e12;

/// One geared actuator: speed reduction, forward efficiency, rotor inertia,
/// and the rotor-side torque bound used by force-capability analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionSpec {
    /// Speed reduction ratio `N` (> 1 means the rotor spins faster than the
    /// motor output).
    pub gear_ratio: f64,
    /// Forward-driving efficiency `η_f ∈ (0, 1]`.
    pub forward_efficiency: f64,
    /// Rotor spin inertia, kg·m².
    pub rotor_inertia: f64,
    /// Rotor-side torque limit, N·m.
    pub torque_limit: f64,
}

impl TransmissionSpec {
    pub fn new(gear_ratio: f64, forward_efficiency: f64, rotor_inertia: f64, torque_limit: f64) -> Result<Self> {
        if !(gear_ratio > 0.0) || !gear_ratio.is_finite() {
            return Err(Error::InvalidParameter { context: "gear ratio must be > 0", value: gear_ratio });
        }
        if !(forward_efficiency > 0.0 && forward_efficiency <= 1.0) {
            return Err(Error::InvalidParameter {
                context: "forward efficiency must lie in (0, 1]",
                value: forward_efficiency,
            });
        }
        if !(rotor_inertia >= 0.0) || !rotor_inertia.is_finite() {
            return Err(Error::InvalidParameter { context: "rotor inertia must be >= 0", value: rotor_inertia });
        }
        if !(torque_limit > 0.0) || !torque_limit.is_finite() {
            return Err(Error::InvalidParameter { context: "torque limit must be > 0", value: torque_limit });
        }
        Ok(Self { gear_ratio, forward_efficiency, rotor_inertia, torque_limit })
    }

    /// Reduction entry `G_jj = 1/N`.
    pub fn reduction(&self) -> f64 {
        1.0 / self.gear_ratio
    }

    /// Backward efficiency implied by the forward efficiency and this
    /// reduction ratio, via [`backward_from_forward`].
    pub fn backward_efficiency(&self) -> f64 {
        backward_from_forward(self.forward_efficiency, self.reduction())
    }
}

/// The joint-coupling matrix `D` (square, invertible).
#[derive(Debug, Clone, PartialEq)]
pub struct ActuationTopology {
    matrix: DMatrix<f64>,
}

impl ActuationTopology {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                context: "actuation topology must be square",
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let topo = Self { matrix };
        topo.check_conditioning()?;
        Ok(topo)
    }

    /// Serial mechanism: motors mounted directly on the joints, `D = I`.
    pub fn serial(m: usize) -> Self {
        Self { matrix: DMatrix::identity(m, m) }
    }

    /// The 2-DoF parallelogram coupling `[[1, 0], [-1, 1]]`: the first motor
    /// drives the first joint, the second joint moves with `ψ_2 - ψ_1`.
    pub fn parallel_2dof() -> Self {
        Self { matrix: DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 1.0]) }
    }

    pub fn joint_count(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    fn check_conditioning(&self) -> Result<()> {
        condition_number(&self.matrix).and(Ok(()))
    }
}

fn condition_number(m: &DMatrix<f64>) -> Result<f64> {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if !(min > 0.0) || max / min > SINGULAR_TOPOLOGY_CONDITION {
        return Err(Error::SingularTopology { condition: if min > 0.0 { max / min } else { f64::INFINITY } });
    }
    Ok(max / min)
}

/// The rotor→joint coordinate chain: reduction `G`, topology `D`, and their
/// product `DG` with a checked inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateChain {
    gear_ratios: Vec<f64>,
    topology: ActuationTopology,
    coupling: DMatrix<f64>,
    coupling_inv: DMatrix<f64>,
}

impl CoordinateChain {
    pub fn new(gear_ratios: Vec<f64>, topology: ActuationTopology) -> Result<Self> {
        let m = topology.joint_count();
        if gear_ratios.len() != m {
            return Err(Error::DimensionMismatch {
                context: "gear ratio count vs topology size",
                expected: m,
                got: gear_ratios.len(),
            });
        }
        for &n in &gear_ratios {
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::InvalidParameter { context: "gear ratio must be > 0", value: n });
            }
        }
        let coupling = topology.matrix() * reduction_matrix(&gear_ratios);
        condition_number(&coupling)?;
        let coupling_inv = coupling
            .clone()
            .try_inverse()
            .ok_or(Error::SingularTopology { condition: f64::INFINITY })?;
        Ok(Self { gear_ratios, topology, coupling, coupling_inv })
    }

    pub fn from_transmissions(specs: &[TransmissionSpec], topology: ActuationTopology) -> Result<Self> {
        Self::new(specs.iter().map(|t| t.gear_ratio).collect(), topology)
    }

    pub fn joint_count(&self) -> usize {
        self.topology.joint_count()
    }

    pub fn gear_ratios(&self) -> &[f64] {
        &self.gear_ratios
    }

    pub fn topology(&self) -> &ActuationTopology {
        &self.topology
    }

    /// The diagonal reduction matrix `G = diag(1/N_j)`.
    pub fn reduction(&self) -> DMatrix<f64> {
        reduction_matrix(&self.gear_ratios)
    }

    /// `D·G`, the map from rotor angles to joint angles.
    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }

    /// `(D·G)⁻¹`, the map from joint angles to rotor angles.
    pub fn coupling_inverse(&self) -> &DMatrix<f64> {
        &self.coupling_inv
    }

    /// Rotor angles consistent with the given joint angles, `φ = (DG)⁻¹·q`.
    pub fn rotors_from_joints(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        if q.len() != self.joint_count() {
            return Err(Error::DimensionMismatch {
                context: "joint vector vs chain size",
                expected: self.joint_count(),
                got: q.len(),
            });
        }
        Ok(&self.coupling_inv * q)
    }
}

fn reduction_matrix(gear_ratios: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_iterator(
        gear_ratios.len(),
        gear_ratios.iter().map(|n| 1.0 / n),
    ))
}

/// Residual of the rotor–joint constraint, `g = q - D·G·φ`. Zero for a
/// constraint-consistent state.
pub fn constraint_residual(q: &DVector<f64>, phi: &DVector<f64>, chain: &CoordinateChain) -> Result<DVector<f64>> {
    let m = chain.joint_count();
    if q.len() != m {
        return Err(Error::DimensionMismatch { context: "joint vector", expected: m, got: q.len() });
    }
    if phi.len() != m {
        return Err(Error::DimensionMismatch { context: "rotor vector", expected: m, got: phi.len() });
    }
    Ok(q - chain.coupling() * phi)
}

/// Constraint Jacobian `A = [0_{m×nb} | I_m | -DG]` over `s = (q_b, q, φ)`.
pub fn constraint_jacobian(chain: &CoordinateChain, base_dof: usize) -> DMatrix<f64> {
    let m = chain.joint_count();
    let mut a = DMatrix::zeros(m, base_dof + 2 * m);
    for j in 0..m {
        a[(j, base_dof + j)] = 1.0;
    }
    a.view_mut((0, base_dof + m), (m, m)).copy_from(&(-chain.coupling()));
    a
}

/// Constraint nullspace `K` with identity on the reduced rows and `(DG)⁻¹`
/// on the rotor block; satisfies `A·K = 0` and `dy = K ds`.
pub fn constraint_nullspace(chain: &CoordinateChain, base_dof: usize) -> DMatrix<f64> {
    let m = chain.joint_count();
    let n_red = base_dof + m;
    let mut k = DMatrix::zeros(base_dof + 2 * m, n_red);
    for i in 0..n_red {
        k[(i, i)] = 1.0;
    }
    k.view_mut((n_red, base_dof), (m, m)).copy_from(chain.coupling_inverse());
    k
}

/// Per-joint drive mode with the forward efficiency it was declared with and
/// the derived backward efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyAssignment {
    modes: Vec<DriveMode>,
    eta_f: Vec<f64>,
    eta_b: Vec<f64>,
}

impl EfficiencyAssignment {
    /// Per-joint modes with efficiencies taken from the transmissions
    /// (`η_b` derived through [`backward_from_forward`]).
    pub fn new(modes: Vec<DriveMode>, specs: &[TransmissionSpec]) -> Result<Self> {
        if modes.len() != specs.len() {
            return Err(Error::DimensionMismatch {
                context: "mode count vs transmission count",
                expected: specs.len(),
                got: modes.len(),
            });
        }
        Ok(Self {
            modes,
            eta_f: specs.iter().map(|t| t.forward_efficiency).collect(),
            eta_b: specs.iter().map(|t| t.backward_efficiency()).collect(),
        })
    }

    /// The same mode on every joint.
    pub fn uniform(mode: DriveMode, specs: &[TransmissionSpec]) -> Self {
        Self::new(vec![mode; specs.len()], specs).expect("lengths match by construction")
    }

    /// Uniform mode with an explicit forward efficiency on every joint,
    /// overriding the transmissions' nominal values (used by sweeps).
    pub fn uniform_with_forward(mode: DriveMode, eta_f: f64, specs: &[TransmissionSpec]) -> Result<Self> {
        if !(eta_f > 0.0 && eta_f <= 1.0) {
            return Err(Error::InvalidParameter { context: "forward efficiency must lie in (0, 1]", value: eta_f });
        }
        Ok(Self {
            modes: vec![mode; specs.len()],
            eta_f: vec![eta_f; specs.len()],
            eta_b: specs
                .iter()
                .map(|t| backward_from_forward(eta_f, t.reduction()))
                .collect(),
        })
    }

    pub fn joint_count(&self) -> usize {
        self.modes.len()
    }

    pub fn mode(&self, joint: usize) -> DriveMode {
        self.modes[joint]
    }

    pub fn modes(&self) -> &[DriveMode] {
        self.modes.as_slice()
    }

    /// True when every joint shares one drive mode.
    pub fn is_uniform(&self) -> bool {
        self.modes.windows(2).all(|w| w[0] == w[1])
    }

    pub fn forward_efficiencies(&self) -> &[f64] {
        &self.eta_f
    }

    pub fn backward_efficiencies(&self) -> &[f64] {
        &self.eta_b
    }

    /// The rotor-row tangent weight of joint `j`: `η_f` (forward), `1/η_b`
    /// (backward), or 1 (ideal). Errors when a backward joint is locked.
    pub fn tangent_weight(&self, joint: usize) -> Result<f64> {
        match self.modes[joint] {
            DriveMode::Ideal => Ok(1.0),
            DriveMode::Forward => Ok(self.eta_f[joint]),
            DriveMode::Backward => {
                let eta_b = self.eta_b[joint];
                if eta_b <= 0.0 {
                    return Err(Error::LockedTransmission { joint });
                }
                Ok(1.0 / eta_b)
            }
        }
    }

    /// All rotor-row tangent weights.
    pub fn tangent_weights(&self) -> Result<Vec<f64>> {
        (0..self.joint_count()).map(|j| self.tangent_weight(j)).collect()
    }
}

/// The diagonal efficiency matrix `E ∈ R^{(nb+2m)×(nb+2m)}`: ones on base and
/// joint rows, the per-joint tangent weight on rotor rows. Positive definite
/// whenever no backward joint is locked.
pub fn efficiency_matrix(assign: &EfficiencyAssignment, base_dof: usize) -> Result<DMatrix<f64>> {
    let m = assign.joint_count();
    let n = base_dof + 2 * m;
    let mut e = DMatrix::identity(n, n);
    for j in 0..m {
        e[(base_dof + m + j, base_dof + m + j)] = assign.tangent_weight(j)?;
    }
    Ok(e)
}

/// Reduced-space efficiency block `Ē = blkdiag(I_nb, η)` used by the
/// actuation map and the forward inertia-ellipsoid bracket.
pub fn reduced_efficiency_matrix(assign: &EfficiencyAssignment, base_dof: usize) -> Result<DMatrix<f64>> {
    let m = assign.joint_count();
    let n = base_dof + m;
    let mut e = DMatrix::identity(n, n);
    for j in 0..m {
        e[(base_dof + j, base_dof + j)] = assign.tangent_weight(j)?;
    }
    Ok(e)
}

/// Backward efficiency of a geared transmission as a function of its forward
/// efficiency and reduction ratio `G = 1/N ∈ (0, 1)`:
///
/// ```text
/// η_b = (2·η_f - 1 + G²) / ((1 - G²)·η_f + 2·G²)   for η_f > (1 - G²)/2,
/// η_b = 0                                          otherwise.
/// ```
///
/// Continuous at the breakpoint, strictly increasing above it, equal to 1 at
/// `η_f = 1`, and always ≤ `η_f`.
pub fn backward_from_forward(eta_f: f64, g_ratio: f64) -> f64 {
    let g2 = g_ratio * g_ratio;
    let breakpoint = 0.5 * (1.0 - g2);
    if eta_f <= breakpoint {
        return 0.0;
    }
    (2.0 * eta_f - 1.0 + g2) / ((1.0 - g2) * eta_f + 2.0 * g2)
}
