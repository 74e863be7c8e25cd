"""Built-in benchmark: the 3-link arm reference case and its result table.

The package bundles a reference setup (link lengths 0.75/1.25/1.10 m, test
configuration (0, 60, -45) deg under force (0, 0.29, -0.96) N) together
with the benchmark result table: criterion values and identification
accuracies for repeated-test-pose plans, repeated single-optimal-pose plans
and optimized plans of one to four poses.  ``stiffcal reproduce-table1``
re-derives every row and checks it against these numbers.

Three conventions of the benchmark table had to be pinned down numerically
(each is re-verified by the test suite and reported by the CLI):

* the test row's q3 is -45 deg; the table prints 45, but only -45
  reproduces the row's accuracy column;
* the optimal rows record the force angle measured from the +z axis
  (force = F0*(0, sin a, cos a)); this library measures alpha from +y
  (force = F0*(0, cos a, sin a)), consistent with the test row, so stored
  plans use alpha = 90 deg - a_table (the four-pose row then matches to
  four significant digits);
* in the three-pose row the second pose's angle is -34.9 deg, not the
  printed -24.9: a single-digit misprint, -34.9 reproduces the row's
  criterion and all three accuracies within 1%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .elasto import ExperimentPlan, ExperimentPose, TestPose, Wrench, plan_from_test_pose
from .kinematics import JointConfig, ManipulatorGeometry

DEFAULT_SIGMA = 1.0
DEFAULT_F0 = 1.0


def reference_geometry() -> ManipulatorGeometry:
    return ManipulatorGeometry(l1=0.75, l2=1.25, l3=1.10)


def reference_test_pose() -> TestPose:
    return TestPose(
        q0=JointConfig(0.0, math.radians(60.0), math.radians(-45.0)),
        force=Wrench(0.0, 0.29, -0.96),
    )


# Optimal configurations as printed in the benchmark table: (q2, q3, alpha)
# in degrees, with the alpha column in the z-axis convention (see module
# docstring).  The three-pose row carries the -24.9 -> -34.9 misprint fix.
PUBLISHED_OPTIMAL_CONFIGS = {
    1: ((43.2, -57.3, 22.9),),
    2: ((5.5, -6.8, 26.3), (93.1, -101.2, 3.3)),
    3: ((173.3, 19.3, 0.5), (-7.1, 14.7, -34.9), (-49.3, -125.0, 2.1)),
    4: ((28.3, -39.1, 9.7), (4.6, -12.6, 22.4), (-3.4, -4.8, -37.4), (146.8, -150.6, -5.2)),
}


def published_optimal_plan(m: int, F0: float = DEFAULT_F0) -> ExperimentPlan:
    """The published m-pose optimal plan, converted to library conventions."""
    poses = tuple(
        ExperimentPose(math.radians(q2), math.radians(q3), math.radians(90.0 - a))
        for q2, q3, a in PUBLISHED_OPTIMAL_CONFIGS[m]
    )
    return ExperimentPlan(poses, F0)


@dataclass(frozen=True)
class ReferenceRow:
    """One row of the reference table.

    ``kind`` selects how the plan is built: "test" repeats the test pose m
    times, "opt1" repeats the published single-pose optimum, "opt" uses
    the published m-pose optimal plan.  ``perf`` is the criterion in
    sigma^2 units, ``dk`` the per-joint accuracies in sigma units.
    """

    label: str
    kind: str
    m: int
    perf: float
    dk: tuple
    configs: tuple  # (q2, q3, alpha) degrees, exactly as published


REFERENCE_ROWS = (
    ReferenceRow("Test Conf.", "test", 1, 3.00, (1.22, 0.70, 2.19), ((60.0, 45.0, -73.3),)),
    ReferenceRow("Opt.1 Conf.", "opt", 1, 1.92, (0.66, 0.52, 1.81), PUBLISHED_OPTIMAL_CONFIGS[1]),
    ReferenceRow("2x Test Conf.", "test", 2, 1.50, (0.86, 0.49, 1.55), ((60.0, 45.0, -73.3),)),
    ReferenceRow("2x Opt.1 Conf.", "opt1", 2, 0.96, (0.47, 0.37, 1.28), PUBLISHED_OPTIMAL_CONFIGS[1]),
    ReferenceRow("Opt.2 Conf.", "opt", 2, 0.80, (0.41, 0.30, 0.96), PUBLISHED_OPTIMAL_CONFIGS[2]),
    ReferenceRow("3x Test Conf.", "test", 3, 1.00, (0.71, 0.40, 1.27), ((60.0, 45.0, -73.3),)),
    ReferenceRow("3x Opt.1 Conf.", "opt1", 3, 0.64, (0.38, 0.30, 1.05), PUBLISHED_OPTIMAL_CONFIGS[1]),
    ReferenceRow("Opt.3 Conf.", "opt", 3, 0.51, (0.32, 0.23, 0.83), PUBLISHED_OPTIMAL_CONFIGS[3]),
    ReferenceRow("4x Test Conf.", "test", 4, 0.75, (0.61, 0.35, 1.10), ((60.0, 45.0, -73.3),)),
    ReferenceRow("4x Opt.1 Conf.", "opt1", 4, 0.48, (0.33, 0.26, 0.91), PUBLISHED_OPTIMAL_CONFIGS[1]),
    ReferenceRow("Opt.4 Conf.", "opt", 4, 0.39, (0.25, 0.21, 0.78), PUBLISHED_OPTIMAL_CONFIGS[4]),
)


def reference_plan(row: ReferenceRow, test: TestPose | None = None,
                   F0: float = DEFAULT_F0) -> ExperimentPlan:
    """Build the calibration plan a reference row describes."""
    if row.kind == "test":
        return plan_from_test_pose(test or reference_test_pose(), copies=row.m)
    if row.kind == "opt1":
        return published_optimal_plan(1, F0).repeated(row.m)
    if row.kind == "opt":
        return published_optimal_plan(row.m, F0)
    raise ValueError(f"unknown row kind {row.kind!r}")


CONVENTION_FINDINGS = (
    "test row q3: -45 deg reproduces the published accuracies (1.22, 0.70, 2.19)"
    " sigma; the printed +45 deg gives dk1 = 30 sigma and cannot be the test"
    " configuration",
    "optimal rows' alpha column is measured from the +z axis; library plans"
    " use alpha_lib = 90 deg - alpha_published (the four-pose row then agrees"
    " to four significant digits)",
    "three-pose row, second pose: alpha = -34.9 deg (printed -24.9) reproduces"
    " the row's criterion and accuracies within 1%",
    "covariance / criterion closed forms carry a negative cross term"
    " (-a23 off-diagonal, -2 d4 a23): the sign follows from the 2x2 matrix"
    " inverse and is confirmed against the general trace form",
)
