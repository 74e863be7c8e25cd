#!/usr/bin/env python3
"""Identify joint compliances from simulated measurements.

A calibration experiment loads the arm in a known pose and measures the
tool displacement.  Stacking the experiments gives a linear system for the
three compliances; measurement noise maps into estimate scatter through
the information matrix, so the choice of poses decides the accuracy.
"""

import math

import numpy as np

import stiffcal as sc
from stiffcal.montecarlo import trial_rng

np.set_printoptions(precision=4)

geom = sc.ManipulatorGeometry(0.75, 1.25, 1.10)
k_true = sc.ComplianceVector(1e-6, 2e-6, 3e-6)

# two calibration poses: (q2, q3, force angle alpha), q1 = 0, force in yz
plan = sc.ExperimentPlan((
    sc.ExperimentPose(math.radians(40), math.radians(-60), math.radians(30)),
    sc.ExperimentPose(math.radians(-10), math.radians(50), math.radians(-70)),
), F0=100.0)  # 100 N test load

sigma = 20e-6  # 20 um measurement noise per axis
obs = sc.simulate_observations(geom, plan, k_true, sigma, trial_rng(42, 0))
for i, o in enumerate(obs):
    print(f"experiment {i + 1}: measured dp = {o.dp * 1e6} um")

k_hat = sc.estimate_compliances(geom, obs)
print("\ntrue compliances     :", k_true.as_array())
print("estimated compliances:", k_hat.as_array())

# the analytic accuracy of this plan: standard deviation per joint
C = sc.covariance(geom, plan, sc.NoiseModel(sigma))
print("\nanalytic covariance [(rad/(N*m))^2]:")
print(C.matrix)
print("per-joint std [rad/(N*m)]:", C.delta_k())

# the closed form needs only four scalars of the information matrix
info = sc.information_matrix(geom, plan)
C2 = sc.covariance_closed_form(info.a11, info.a22, info.a33, info.a23,
                               sigma, plan.F0)
print("closed form matches:", np.allclose(C.matrix, C2.matrix, rtol=1e-12))

# a plan whose force never has a y component cannot see joint 1
bad = sc.ExperimentPlan((sc.ExperimentPose(0.4, -0.9, math.pi / 2),), 100.0)
try:
    sc.covariance(geom, bad, sc.NoiseModel(sigma))
except sc.UnidentifiablePlan as exc:
    print("\ndegenerate plan:", exc)
