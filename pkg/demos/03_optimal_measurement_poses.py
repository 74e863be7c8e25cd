#!/usr/bin/env python3
"""Design calibration poses for best accuracy at a chosen test pose.

Accuracy is judged where it matters: the expected squared compensation
error at the configuration and loading the robot will actually work in.
Repeating the test pose itself m times gives exactly 3 sigma^2 / m;
optimized poses do roughly twice better.
"""

import math

import numpy as np

import stiffcal as sc

geom = sc.ManipulatorGeometry(0.75, 1.25, 1.10)
test = sc.TestPose(
    q0=sc.JointConfig(0.0, math.radians(60), math.radians(-45)),
    force=sc.Wrench(0.0, 0.29, -0.96),
)

naive = sc.plan_from_test_pose(test, copies=1)
print("criterion of calibrating in the test pose itself:",
      f"{sc.test_pose_criterion(geom, naive, test):.4f} sigma^2",
      f"(bound {sc.repeated_pose_bound(3, 1):.2f})")

for m in (1, 2):
    result = sc.optimize_plan(geom, test, m, sc.OptimizerOptions(seed=20140331))
    print(f"\noptimized {m}-pose plan: {result.criterion_value:.4f} sigma^2 "
          f"({result.starts_converged} starts converged)")
    for i, pose in enumerate(result.plan.poses, 1):
        print(f"  pose {i}: q2 = {math.degrees(pose.q2):7.2f} deg, "
              f"q3 = {math.degrees(pose.q3):7.2f} deg, "
              f"alpha = {math.degrees(pose.alpha):7.2f} deg")
    dk = sc.covariance(geom, result.plan, sc.NoiseModel(1.0)).delta_k()
    print(f"  accuracy per joint [sigma]: {np.round(dk, 3)}")

# the criterion weights come from the test pose only; with them the
# objective is a closed form in four information-matrix scalars
d = sc.d_coefficients(geom, test)
print(f"\ncriterion weights d1..d4: {d.d1:.4f}, {d.d2:.4f}, {d.d3:.4f}, {d.d4:.4f}")
