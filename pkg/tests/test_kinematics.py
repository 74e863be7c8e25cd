import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import stiffcal as sc
from conftest import random_config

DEG = math.radians


def test_fk_zero_angles(geom):
    p = sc.forward_kinematics(geom, sc.JointConfig(0.0, 0.0, 0.0))
    assert_allclose(p, [2.35, 0.0, 0.75], atol=1e-14)


def test_fk_pure_base_rotation(geom):
    p = sc.forward_kinematics(geom, sc.JointConfig(math.pi / 2, 0.0, 0.0))
    assert_allclose(p, [0.0, 2.35, 0.75], atol=1e-14)


def test_fk_bench_configuration(geom):
    # frozen from an independent scalar evaluation of the position equations
    p = sc.forward_kinematics(geom, sc.JointConfig(0.0, DEG(60), DEG(-45)))
    assert_allclose(p, [1.68752, 0.0, 2.11723], atol=1e-5)


def test_aux_lengths_examples(geom):
    aux = sc.aux_lengths(geom, 0.0, 0.0)
    assert_allclose([aux.lc, aux.ls], [2.35, 0.0], atol=1e-14)
    aux = sc.aux_lengths(geom, math.pi / 2, 0.0)
    assert_allclose([aux.lc, aux.ls], [0.0, 2.35], atol=1e-14)
    aux = sc.aux_lengths(geom, DEG(60), DEG(-45))
    assert_allclose([aux.lc, aux.ls], [1.68752, 1.36723], atol=1e-5)


def test_aux_lengths_law_of_cosines(geom):
    rng = np.random.default_rng(11)
    for _ in range(200):
        q2, q3 = rng.uniform(-math.pi, math.pi, 2)
        aux = sc.aux_lengths(geom, q2, q3)
        rhs = geom.l2**2 + geom.l3**2 + 2 * geom.l2 * geom.l3 * math.cos(q3)
        assert abs(aux.lc**2 + aux.ls**2 - rhs) < 1e-12


def test_jacobian_zero_config(geom):
    J = sc.jacobian(geom, sc.JointConfig(0.0, 0.0, 0.0))
    assert_allclose(J, [[0, 0, 0], [2.35, 0, 0], [0, 2.35, 1.10]], atol=1e-14)


def test_jacobian_elbow_column(geom):
    J = sc.jacobian(geom, sc.JointConfig(0.0, DEG(60), DEG(-45)))
    assert_allclose(J[:, 2], [-0.28470, 0.0, 1.06252], atol=1e-5)


def test_jacobian_matches_finite_differences(geom):
    rng = np.random.default_rng(7)
    h = 1e-6
    for _ in range(100):
        q = random_config(rng)
        J = sc.jacobian(geom, q)
        for n, name in enumerate(("q1", "q2", "q3")):
            hi = {name: getattr(q, name) + h}
            lo = {name: getattr(q, name) - h}
            fd = (sc.forward_kinematics(geom, sc.JointConfig(**{**q.__dict__, **hi}))
                  - sc.forward_kinematics(geom, sc.JointConfig(**{**q.__dict__, **lo}))) / (2 * h)
            assert np.max(np.abs(J[:, n] - fd)) < 1e-5


def test_jacobian_reduced_closed_form(geom):
    # q1 = 0 collapses the Jacobian to a sparse form; check entry for entry
    rng = np.random.default_rng(13)
    for _ in range(50):
        q2, q3 = rng.uniform(-math.pi, math.pi, 2)
        l2, l3 = geom.l2, geom.l3
        lc = l2 * math.cos(q2) + l3 * math.cos(q2 + q3)
        ls = l2 * math.sin(q2) + l3 * math.sin(q2 + q3)
        expected = np.array([
            [0.0, -ls, -l3 * math.sin(q2 + q3)],
            [lc, 0.0, 0.0],
            [0.0, lc, l3 * math.cos(q2 + q3)],
        ])
        J = sc.jacobian(geom, sc.JointConfig(0.0, q2, q3))
        assert np.max(np.abs(J - expected)) < 1e-12


def test_base_rotation_equivariance(geom):
    rng = np.random.default_rng(17)
    for _ in range(50):
        q = random_config(rng)
        phi = rng.uniform(-math.pi, math.pi)
        p = sc.forward_kinematics(geom, q)
        p_rot = sc.forward_kinematics(geom, sc.JointConfig(q.q1 + phi, q.q2, q.q3))
        c, s = math.cos(phi), math.sin(phi)
        Rz = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
        assert_allclose(p_rot, Rz @ p, atol=1e-12)


def test_cartesian_stiffness_symmetric_and_inverse(geom):
    rng = np.random.default_rng(19)
    k = np.array([1e-6, 2e-6, 3e-6])
    checked = 0
    while checked < 20:
        q = random_config(rng)
        try:
            Kc = sc.cartesian_stiffness(geom, q, k)
        except sc.SingularConfiguration:
            continue
        checked += 1
        assert np.linalg.norm(Kc - Kc.T) < 1e-9 * np.linalg.norm(Kc)
        J = sc.jacobian(geom, q)
        F = rng.uniform(-1, 1, 3)
        dp = J @ (k * (J.T @ F))
        assert_allclose(Kc @ dp, F, rtol=1e-8, atol=1e-10)


def test_cartesian_stiffness_singular_configuration(geom):
    with pytest.raises(sc.SingularConfiguration):
        sc.cartesian_stiffness(geom, sc.JointConfig(0.0, 0.0, 0.0), [1e-6, 1e-6, 1e-6])


def test_geometry_validation():
    with pytest.raises(ValueError):
        sc.ManipulatorGeometry(-0.1, 1.25, 1.10)
    with pytest.raises(ValueError):
        sc.ManipulatorGeometry(0.75, 0.0, 1.10)
    with pytest.raises(ValueError):
        sc.ManipulatorGeometry(0.75, 1.25, -1.0)
    with pytest.raises(ValueError):
        sc.JointConfig(math.nan, 0.0, 0.0)


def test_wrap_angle():
    assert_allclose(sc.wrap_angle(math.radians(370)), math.radians(10))
    assert_allclose(sc.wrap_angle(math.radians(200)), math.radians(-160))
    assert sc.wrap_angle(-math.pi) == math.pi
    assert sc.wrap_angle(math.pi) == math.pi
    q = sc.JointConfig(math.radians(370), 0.0, 0.0).normalized()
    assert_allclose(q.q1, math.radians(10))
