"""Least-squares compliance estimation and its analytic covariance.

The estimator solves the stacked linear system dp_i = A_i k in the
least-squares sense through an orthogonal (SVD) decomposition of the 3m x 3
regressor, which coincides with (sum A_i^T A_i)^-1 (sum A_i^T dp_i) in exact
arithmetic but avoids squaring the condition number.  With i.i.d. per-axis
measurement noise of standard deviation sigma the estimate covariance is
sigma^2 (sum A_i^T A_i)^-1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .elasto import ComplianceVector, ExperimentPlan, Wrench, information_matrix, observation_matrix
from .errors import UnidentifiablePlan
from .kinematics import JointConfig, ManipulatorGeometry

# Information matrices with condition number above this are treated as
# unidentifiable (double-precision heuristic).
COND_LIMIT = 1e12


class NonPhysicalEstimateWarning(UserWarning):
    """An estimated compliance came out non-positive (possible under noise)."""


@dataclass(frozen=True)
class CalibrationObservation:
    """One experiment: configuration, applied force, measured deflection (m)."""

    q: JointConfig
    force: Wrench
    dp: np.ndarray

    def __post_init__(self):
        dp = np.array(self.dp, dtype=float)
        if dp.shape != (3,):
            raise ValueError("dp must be a 3-vector")
        dp.flags.writeable = False
        object.__setattr__(self, "dp", dp)


@dataclass(frozen=True)
class NoiseModel:
    """I.i.d. zero-mean noise of standard deviation ``sigma`` (m) per axis."""

    sigma: float

    def __post_init__(self):
        if self.sigma < 0.0 or not math.isfinite(self.sigma):
            raise ValueError("sigma must be finite and >= 0")


@dataclass(frozen=True)
class CovarianceMatrix:
    """Covariance of the compliance estimate, (rad/(N*m))^2."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def delta_k(self) -> np.ndarray:
        """Per-joint standard deviations sqrt(diag)."""
        return np.sqrt(np.diag(self.matrix))


def _name_unobservable(vectors: np.ndarray) -> tuple:
    """1-based joint indices whose axis dominates a singular direction."""
    joints = []
    for v in vectors.T:
        i = int(np.argmax(np.abs(v)))
        if abs(v[i]) > 0.99:
            joints.append(i + 1)
    return tuple(sorted(set(joints)))


def _unidentifiable(vectors: np.ndarray) -> UnidentifiablePlan:
    joints = _name_unobservable(vectors)
    if joints:
        names = ", ".join(f"joint {j}" for j in joints)
        return UnidentifiablePlan(f"plan cannot identify {names}", joints)
    return UnidentifiablePlan("information matrix is singular or near singular")


def estimate_compliances(geom: ManipulatorGeometry, observations) -> ComplianceVector:
    """Least-squares joint compliances from calibration observations.

    Parameters
    ----------
    observations : sequence of CalibrationObservation

    Raises
    ------
    UnidentifiablePlan
        If the stacked regressor leaves some compliance direction
        unobserved (information-matrix condition number above 1e12).

    Notes
    -----
    Negative estimates are returned as-is with a
    ``NonPhysicalEstimateWarning`` rather than clamped: the estimator is
    unbiased and clamping would bias downstream validation statistics.
    """
    observations = list(observations)
    if not observations:
        raise ValueError("at least one observation is required")
    A = np.vstack([observation_matrix(geom, o.q, o.force) for o in observations])
    b = np.concatenate([o.dp for o in observations])
    k, _, rank, svals = np.linalg.lstsq(A, b, rcond=None)
    if rank < 3 or svals[0] > math.sqrt(COND_LIMIT) * svals[-1]:
        _, _, vt = np.linalg.svd(A)
        bad = svals < svals[0] / math.sqrt(COND_LIMIT)
        if rank < 3:
            bad[rank:] = True
        raise _unidentifiable(vt[bad].T)
    if np.any(k <= 0.0):
        warnings.warn("estimated compliance vector has non-positive entries",
                      NonPhysicalEstimateWarning, stacklevel=2)
    return ComplianceVector(*k)


def covariance(geom: ManipulatorGeometry, plan: ExperimentPlan,
               noise: NoiseModel) -> CovarianceMatrix:
    """Analytic covariance sigma^2 M^-1 of the compliance estimate."""
    M = information_matrix(geom, plan).matrix
    w, V = np.linalg.eigh(M)
    if w[0] <= 0.0 or w[-1] > COND_LIMIT * w[0]:
        raise _unidentifiable(V[:, w < w[-1] / COND_LIMIT])
    C = (V / w) @ V.T * noise.sigma**2
    return CovarianceMatrix(C)


def covariance_closed_form(a11: float, a22: float, a33: float, a23: float,
                           sigma: float, F0: float = 1.0) -> CovarianceMatrix:
    """Covariance from the reduced-plan block entries (unit-force sums).

    The (2,3) block of the information matrix inverts to
    [[a33, -a23], [-a23, a22]] / (a22*a33 - a23^2); note the negative
    off-diagonal, which the general-path ``covariance`` confirms.
    """
    det2 = a22 * a33 - a23 * a23
    eigs = _block_eigs(a11, a22, a33, det2)
    if eigs is None:
        raise UnidentifiablePlan("closed-form information matrix is singular")
    emin, emax = eigs
    if emin <= 0.0 or emax > COND_LIMIT * emin:
        joints = (1,) if a11 <= emax / COND_LIMIT else ()
        raise UnidentifiablePlan("closed-form information matrix is ill conditioned",
                                 joints)
    s = sigma * sigma / (F0 * F0)
    return CovarianceMatrix(np.array([
        [s / a11, 0.0, 0.0],
        [0.0, s * a33 / det2, -s * a23 / det2],
        [0.0, -s * a23 / det2, s * a22 / det2],
    ]))


def _block_eigs(a11, a22, a33, det2):
    """(min, max) eigenvalue of blockdiag(a11, [[a22, a23], [a23, a33]])."""
    if det2 <= 0.0:
        return None
    tr = a22 + a33
    disc = math.sqrt(max(tr * tr - 4.0 * det2, 0.0))
    lo = 0.5 * (tr - disc)
    hi = 0.5 * (tr + disc)
    return min(a11, lo), max(a11, hi)
