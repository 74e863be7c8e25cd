"""Test-pose design criterion for calibration experiment plans.

The figure of merit of a plan is the expected squared compensation error
at the test pose: O_t = sigma^2 trace(A0 M^-1 A0^T), where A0 is the
test-pose observation matrix and M the plan's information matrix.  It is a
weighted trace of the estimate covariance, so smaller is better, and for a
plan of m copies of the test pose itself it equals 3 sigma^2 / m (the
bound any optimized plan must beat).

For reduced plans the criterion collapses to four scalars: with column
inner products d1 = |A0_1|^2, d2 = |A0_3|^2, d3 = |A0_2|^2, d4 = A0_2.A0_3,

    O_t = d1/a11 + (d2*a22 + d3*a33 - 2*d4*a23) / (a22*a33 - a23^2)

up to the sigma^2/F0^2 scale.  The minus sign on the cross term comes from
the 2x2 matrix inverse; the general trace form above is the source of
truth and the closed form is continuously cross-checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elasto import ExperimentPlan, TestPose, information_matrix, observation_matrix_test
from .errors import UnidentifiablePlan
from .identification import COND_LIMIT, _block_eigs, _unidentifiable
from .kinematics import ManipulatorGeometry

__all__ = [
    "TestPose",
    "DCoefficients",
    "d_coefficients",
    "test_pose_criterion",
    "criterion_closed_form",
    "repeated_pose_bound",
]


@dataclass(frozen=True)
class DCoefficients:
    """Criterion weights from the test-pose observation matrix columns."""

    d1: float
    d2: float
    d3: float
    d4: float

    def __post_init__(self):
        if min(self.d1, self.d2, self.d3) < 0.0:
            raise ValueError("d1, d2, d3 are squared norms and cannot be negative")
        if self.d4 * self.d4 > self.d2 * self.d3 * (1.0 + 1e-12) + 1e-300:
            raise ValueError("d4^2 <= d2*d3 must hold (Cauchy-Schwarz)")


def d_coefficients(geom: ManipulatorGeometry, test: TestPose) -> DCoefficients:
    """Column inner products of the test-pose observation matrix."""
    A0 = observation_matrix_test(geom, test)
    return DCoefficients(
        d1=float(A0[:, 0] @ A0[:, 0]),
        d2=float(A0[:, 2] @ A0[:, 2]),
        d3=float(A0[:, 1] @ A0[:, 1]),
        d4=float(A0[:, 1] @ A0[:, 2]),
    )


def test_pose_criterion(geom: ManipulatorGeometry, plan: ExperimentPlan,
                        test: TestPose, sigma: float = 1.0) -> float:
    """Expected squared compensation error at the test pose (m^2).

    With the default sigma = 1 the value is in units of sigma^2, the form
    in which plans are compared and reported.

    Raises
    ------
    UnidentifiablePlan
        If the plan's information matrix is singular or near singular.
    """
    A0 = observation_matrix_test(geom, test)
    M = information_matrix(geom, plan).matrix
    w, V = np.linalg.eigh(M)
    if w[0] <= 0.0 or w[-1] > COND_LIMIT * w[0]:
        raise _unidentifiable(V[:, w < w[-1] / COND_LIMIT])
    return float(sigma * sigma * np.trace(A0 @ np.linalg.solve(M, A0.T)))


def criterion_closed_form(d: DCoefficients, a11: float, a22: float, a33: float,
                          a23: float, F0: float = 1.0) -> float:
    """Criterion from reduced-plan block entries, in units of sigma^2.

    ``a11 .. a23`` are the unit-force information sums cached by
    :func:`stiffcal.elasto.information_matrix`; ``F0`` is the plan's
    force magnitude.
    """
    det2 = a22 * a33 - a23 * a23
    eigs = _block_eigs(a11, a22, a33, det2)
    if eigs is None:
        raise UnidentifiablePlan("closed-form information matrix is singular")
    emin, emax = eigs
    if emin <= 0.0 or emax > COND_LIMIT * emin:
        raise UnidentifiablePlan("closed-form information matrix is ill conditioned")
    value = d.d1 / a11 + (d.d2 * a22 + d.d3 * a33 - 2.0 * d.d4 * a23) / det2
    return value / (F0 * F0)


def repeated_pose_bound(n: int, m: int, sigma: float = 1.0) -> float:
    """Criterion value n sigma^2 / m of a plan that just repeats the test pose.

    ``n`` is the number of identifiable parameters (3 for this arm), ``m``
    the number of repetitions.  Any optimized plan should do better.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    return n * sigma * sigma / m
