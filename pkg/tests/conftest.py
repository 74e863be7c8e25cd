import math

import numpy as np
import pytest

import stiffcal as sc
from stiffcal import reference


@pytest.fixture(scope="session")
def geom():
    return reference.reference_geometry()


@pytest.fixture(scope="session")
def test_pose():
    return reference.reference_test_pose()


def random_config(rng) -> sc.JointConfig:
    return sc.JointConfig(*rng.uniform(-math.pi, math.pi, 3))


def random_identifiable_plan(rng, m, F0=1.0) -> sc.ExperimentPlan:
    """Random reduced plan kept away from the degeneracy surfaces.

    Angles are sampled in boxes that keep sin(alpha), cos(alpha), sin(q3),
    cos(q2+q3) and lc bounded away from zero, so the single-pose
    identifiability conditions hold with margin.
    """
    poses = []
    while len(poses) < m:
        q2 = rng.uniform(-math.pi, math.pi)
        q3 = rng.uniform(-math.pi, math.pi)
        alpha = rng.uniform(-math.pi, math.pi)
        lc = 1.25 * math.cos(q2) + 1.10 * math.cos(q2 + q3)
        ok = (abs(math.sin(alpha)) > 0.2 and abs(math.cos(alpha)) > 0.2
              and abs(math.sin(q3)) > 0.2 and abs(math.cos(q2 + q3)) > 0.2
              and abs(lc) > 0.3)
        if ok:
            poses.append(sc.ExperimentPose(q2, q3, alpha))
    return sc.ExperimentPlan(tuple(poses), F0)


def random_test_pose(rng, reduced=False) -> sc.TestPose:
    """Random test pose with a comfortably full-rank observation matrix."""
    while True:
        q1 = 0.0 if reduced else rng.uniform(-math.pi, math.pi)
        q = sc.JointConfig(q1, rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5))
        f = rng.uniform(-1.0, 1.0, 3)
        if reduced:
            f[0] = 0.0
        if np.linalg.norm(f) < 0.3:
            continue
        test = sc.TestPose(q, sc.Wrench(*f))
        A0 = sc.observation_matrix_test(reference.reference_geometry(), test)
        s = np.linalg.svd(A0, compute_uv=False)
        if s[-1] > 1e-3 * s[0]:
            return test
