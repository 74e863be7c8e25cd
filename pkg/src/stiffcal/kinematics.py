"""Geometric model of the 3-link anthropomorphic arm.

The arm is a serial chain with a vertical base rotation ``q1``, a shoulder
elevation ``q2`` and an elbow ``q3``; the links have lengths ``l1`` (base
riser), ``l2`` (upper arm) and ``l3`` (forearm).  All angles are radians,
all lengths metres.  Only the translational part of the kinematics is
modelled: end-effector orientation errors are outside the deflection model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularConfiguration

TWO_PI = 2.0 * math.pi

# |det J| below DET_TOL times the characteristic volume l2*l3*(l2+l3)
# counts as singular.
DET_TOL = 1e-9


def wrap_angle(angle: float) -> float:
    """Wrap an angle (rad) into the canonical interval (-pi, pi]."""
    w = math.remainder(angle, TWO_PI)
    if w <= -math.pi:
        w += TWO_PI
    return w


@dataclass(frozen=True)
class ManipulatorGeometry:
    """Link lengths (m) of the arm.

    ``l1`` may be zero (the base riser only offsets z), but ``l2`` and
    ``l3`` must be positive: a zero-length upper arm or forearm removes the
    corresponding joint's influence on the end effector entirely.
    """

    l1: float
    l2: float
    l3: float

    def __post_init__(self):
        for name in ("l1", "l2", "l3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.l1 < 0.0:
            raise ValueError("l1 must be >= 0")
        if self.l2 <= 0.0 or self.l3 <= 0.0:
            raise ValueError("l2 and l3 must be > 0")


@dataclass(frozen=True)
class JointConfig:
    """Joint angles (rad) of one arm configuration."""

    q1: float
    q2: float
    q3: float

    def __post_init__(self):
        for name in ("q1", "q2", "q3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def normalized(self) -> "JointConfig":
        """Return the same configuration with every angle in (-pi, pi]."""
        return JointConfig(wrap_angle(self.q1), wrap_angle(self.q2), wrap_angle(self.q3))


@dataclass(frozen=True)
class AuxLengths:
    """Horizontal reach ``lc`` and height ``ls`` of the q2/q3 sub-chain (m).

    These satisfy lc**2 + ls**2 = l2**2 + l3**2 + 2*l2*l3*cos(q3) (law of
    cosines for the shoulder-elbow-wrist triangle).
    """

    lc: float
    ls: float


def aux_lengths(geom: ManipulatorGeometry, q2: float, q3: float) -> AuxLengths:
    """Reach/height pair of the planar q2/q3 sub-chain."""
    lc = geom.l2 * math.cos(q2) + geom.l3 * math.cos(q2 + q3)
    ls = geom.l2 * math.sin(q2) + geom.l3 * math.sin(q2 + q3)
    return AuxLengths(lc, ls)


def forward_kinematics(geom: ManipulatorGeometry, q: JointConfig) -> np.ndarray:
    """End-effector position (x, y, z) in metres.

    Parameters
    ----------
    geom : ManipulatorGeometry
    q : JointConfig

    Returns
    -------
    ndarray, shape (3,)
    """
    aux = aux_lengths(geom, q.q2, q.q3)
    return np.array([
        aux.lc * math.cos(q.q1),
        aux.lc * math.sin(q.q1),
        geom.l1 + aux.ls,
    ])


def jacobian(geom: ManipulatorGeometry, q: JointConfig) -> np.ndarray:
    """Translational Jacobian d(position)/d(q), shape (3, 3), m/rad.

    Column ``n`` is the end-effector velocity produced by unit rate in
    joint ``n+1``.  Singular configurations are legitimate inputs here;
    singularity only matters to consumers that invert the result.
    """
    aux = aux_lengths(geom, q.q2, q.q3)
    s1, c1 = math.sin(q.q1), math.cos(q.q1)
    s23, c23 = math.sin(q.q2 + q.q3), math.cos(q.q2 + q.q3)
    l3 = geom.l3
    return np.array([
        [-aux.lc * s1, -aux.ls * c1, -l3 * s23 * c1],
        [aux.lc * c1, -aux.ls * s1, -l3 * s23 * s1],
        [0.0, aux.lc, l3 * c23],
    ])


def cartesian_stiffness(geom: ManipulatorGeometry, q: JointConfig, compliances) -> np.ndarray:
    """Cartesian stiffness matrix Kc = J^-T diag(1/k) J^-1 (N/m).

    Parameters
    ----------
    compliances : array_like, shape (3,)
        Joint compliances in rad/(N*m); all entries must be positive.

    Raises
    ------
    SingularConfiguration
        If the configuration is kinematically singular (|det J| below
        tolerance), where the Cartesian stiffness is unbounded in some
        direction.
    """
    k = np.asarray(compliances, dtype=float)
    if k.shape != (3,) or np.any(k <= 0.0):
        raise ValueError("compliances must be three positive values")
    J = jacobian(geom, q)
    scale = geom.l2 * geom.l3 * (geom.l2 + geom.l3)
    if abs(np.linalg.det(J)) < DET_TOL * scale:
        raise SingularConfiguration(
            f"configuration q=({q.q1:.4f}, {q.q2:.4f}, {q.q3:.4f}) rad is singular"
        )
    Jinv = np.linalg.solve(J, np.eye(3))
    return Jinv.T @ np.diag(1.0 / k) @ Jinv
