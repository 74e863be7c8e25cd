"""Elastostatic deflection model and experiment-plan information matrices.

Under an external force ``F`` the compliant joints deflect and the end
effector moves by ``dp = J diag(k) J^T F``, linear in the joint compliance
vector ``k``.  Rewriting ``dp = A k`` gives the observation matrix ``A``
whose columns are ``J_n (J_n^T F)``.  Summing ``A^T A`` over an experiment
plan yields the information matrix that governs how measurement noise maps
into compliance-estimate scatter.

Calibration poses are parameterized in reduced form: base joint fixed at
``q1 = 0`` and the force confined to the yz plane, ``F = F0 (0, cos a,
sin a)``.  Rotating a pose about z together with its force leaves ``A^T A``
unchanged, so the reduction loses no information (the general-path
functions in this module exist to verify exactly that).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveForce
from .kinematics import JointConfig, ManipulatorGeometry, aux_lengths, jacobian


@dataclass(frozen=True)
class ComplianceVector:
    """Joint compliances k1, k2, k3 in rad/(N*m).

    Physical joints have positive compliance, but unbiased least-squares
    estimates may come out negative under noise; this type therefore does
    not enforce positivity.  Use :attr:`is_physical` to check.
    """

    k1: float
    k2: float
    k3: float

    @property
    def is_physical(self) -> bool:
        return self.k1 > 0.0 and self.k2 > 0.0 and self.k3 > 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.k1, self.k2, self.k3])


@dataclass(frozen=True)
class Wrench:
    """External force (N) applied at the end effector."""

    fx: float
    fy: float
    fz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.fx, self.fy, self.fz])

    @property
    def norm(self) -> float:
        return math.sqrt(self.fx**2 + self.fy**2 + self.fz**2)


@dataclass(frozen=True)
class ExperimentPose:
    """One calibration pose in reduced parameterization (angles in rad).

    The base joint is implicitly zero and the force is F0*(0, cos(alpha),
    sin(alpha)), so a pose is fully described by (q2, q3, alpha).
    """

    q2: float
    q3: float
    alpha: float


@dataclass(frozen=True)
class ExperimentPlan:
    """An ordered set of calibration poses sharing one force magnitude F0 (N)."""

    poses: tuple
    F0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "poses", tuple(self.poses))
        if len(self.poses) < 1:
            raise ValueError("a plan needs at least one pose")
        if not (self.F0 > 0.0):
            raise NonPositiveForce("plan force magnitude F0 must be > 0")

    @property
    def m(self) -> int:
        return len(self.poses)

    def repeated(self, times: int) -> "ExperimentPlan":
        """The same plan executed ``times`` times over."""
        if times < 1:
            raise ValueError("times must be >= 1")
        return ExperimentPlan(self.poses * times, self.F0)


@dataclass(frozen=True)
class TestPose:
    """The configuration and loading where compensation accuracy matters most."""

    q0: JointConfig
    force: Wrench

    def __post_init__(self):
        if not self.force.norm > 0.0:
            raise NonPositiveForce("test-pose force must be nonzero")


@dataclass(frozen=True)
class InformationMatrix:
    """Sum of A_i^T A_i over a plan, with its reduced-form block entries.

    ``matrix`` includes the F0^2 force-magnitude factor.  The cached
    scalars ``a11, a22, a33, a23`` are the unit-force sums, so that
    ``matrix = F0^2 * [[a11, 0, 0], [0, a22, a23], [0, a23, a33]]``.
    """

    matrix: np.ndarray
    a11: float
    a22: float
    a33: float
    a23: float
    F0: float = 1.0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def force_from_angle(F0: float, alpha: float) -> Wrench:
    """Force of magnitude F0 at angle ``alpha`` from +y toward +z, in the yz plane.

    Raises
    ------
    NonPositiveForce
        If F0 <= 0 (a zero force produces no deflection and carries no
        information).
    """
    if not (F0 > 0.0):
        raise NonPositiveForce(f"force magnitude must be > 0, got {F0}")
    return Wrench(0.0, F0 * math.cos(alpha), F0 * math.sin(alpha))


def deflection(geom: ManipulatorGeometry, q: JointConfig, k: ComplianceVector,
               F: Wrench) -> np.ndarray:
    """End-effector displacement dp = J diag(k) J^T F (m) under load F."""
    J = jacobian(geom, q)
    return J @ (k.as_array() * (J.T @ F.as_array()))


def observation_matrix(geom: ManipulatorGeometry, q: JointConfig, F: Wrench) -> np.ndarray:
    """Matrix A with dp = A k; column n is J_n (J_n^T F).

    This is the general path, valid for any configuration and force.  The
    reduced and test-pose variants below are closed forms of the same
    quantity and are checked against this one.
    """
    J = jacobian(geom, q)
    f = F.as_array()
    return J * (J.T @ f)  # broadcasting: column n scaled by J_n . F


def observation_matrix_reduced(geom: ManipulatorGeometry, pose: ExperimentPose,
                               F0: float = 1.0) -> np.ndarray:
    """Observation matrix of a reduced pose (q1 = 0, yz-plane force).

    Structural zeros are exact: rows/columns that vanish identically in
    the closed form are written as literal zeros, which later makes the
    off-block entries of the information matrix exactly zero.
    """
    lc = geom.l2 * math.cos(pose.q2) + geom.l3 * math.cos(pose.q2 + pose.q3)
    ls = geom.l2 * math.sin(pose.q2) + geom.l3 * math.sin(pose.q2 + pose.q3)
    s23, c23 = math.sin(pose.q2 + pose.q3), math.cos(pose.q2 + pose.q3)
    sa, ca = math.sin(pose.alpha), math.cos(pose.alpha)
    l3sq = geom.l3 * geom.l3
    return F0 * np.array([
        [0.0, -ls * lc * sa, -l3sq * c23 * s23 * sa],
        [lc * lc * ca, 0.0, 0.0],
        [0.0, lc * lc * sa, l3sq * c23 * c23 * sa],
    ])


def observation_matrix_test(geom: ManipulatorGeometry, test: TestPose) -> np.ndarray:
    """Observation matrix at the test pose, via the per-column closed form."""
    q = test.q0
    fx, fy, fz = test.force.fx, test.force.fy, test.force.fz
    aux = aux_lengths(geom, q.q2, q.q3)
    s1, c1 = math.sin(q.q1), math.cos(q.q1)
    s23, c23 = math.sin(q.q2 + q.q3), math.cos(q.q2 + q.q3)
    l3 = geom.l3

    col1 = aux.lc**2 * (fx * s1 - fy * c1) * np.array([s1, -c1, 0.0])
    col2 = (fx * aux.ls * c1 + fy * aux.ls * s1 - fz * aux.lc) * np.array(
        [aux.ls * c1, aux.ls * s1, -aux.lc])
    col3 = (fx * l3 * s23 * c1 + fy * l3 * s23 * s1 - fz * l3 * c23) * np.array(
        [l3 * s23 * c1, l3 * s23 * s1, -l3 * c23])
    return np.column_stack([col1, col2, col3])


def information_matrix(geom: ManipulatorGeometry, plan: ExperimentPlan) -> InformationMatrix:
    """Accumulate sum(A_i^T A_i) over the plan.

    Returns
    -------
    InformationMatrix
        Full 3x3 matrix (F0^2 included) plus the unit-force block entries
        a11, a22, a33, a23 used by the closed-form covariance/criterion.
    """
    l2, l3 = geom.l2, geom.l3
    lsq = l2 * l2 + l3 * l3
    l3sq = l3 * l3
    M = np.zeros((3, 3))
    a11 = a22 = a33 = a23 = 0.0
    for pose in plan.poses:
        A = observation_matrix_reduced(geom, pose, plan.F0)
        M += A.T @ A
        lc = l2 * math.cos(pose.q2) + l3 * math.cos(pose.q2 + pose.q3)
        c23 = math.cos(pose.q2 + pose.q3)
        c3 = math.cos(pose.q3)
        sa2 = math.sin(pose.alpha) ** 2
        ca2 = math.cos(pose.alpha) ** 2
        lc2 = lc * lc
        a11 += lc2 * lc2 * ca2
        a22 += lc2 * (lsq + 2.0 * l2 * l3 * c3) * sa2
        a33 += l3sq * l3sq * c23 * c23 * sa2
        a23 += l3sq * lc * c23 * (l3 + l2 * c3) * sa2
    return InformationMatrix(M, a11, a22, a33, a23, plan.F0)


def plan_from_test_pose(test: TestPose, copies: int = 1) -> ExperimentPlan:
    """Embed the test pose itself as a reduced calibration plan.

    Only possible when the test pose already has q1 = 0 and a yz-plane
    force; then ``copies`` repetitions of the pose form a plan whose
    observation matrices equal the test pose's exactly.
    """
    if abs(test.q0.q1) > 1e-12:
        raise ValueError("test pose must have q1 = 0 to embed as a reduced plan")
    if abs(test.force.fx) > 1e-12:
        raise ValueError("test-pose force must lie in the yz plane to embed")
    alpha = math.atan2(test.force.fz, test.force.fy)
    pose = ExperimentPose(test.q0.q2, test.q0.q3, alpha)
    return ExperimentPlan((pose,) * copies, test.force.norm)
