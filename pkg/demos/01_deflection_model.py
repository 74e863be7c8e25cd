#!/usr/bin/env python3
"""Tour of the arm model: positions, Jacobians, deflections under load.

The arm is a 3-revolute chain (base rotation, shoulder, elbow) with rigid
links and compliant joints.  Under an end-effector force the joints wind
up and the tool moves; that deflection is linear in the per-joint
compliances, which is what makes calibration a least-squares problem.
"""

import math

import numpy as np

import stiffcal as sc

np.set_printoptions(precision=5, suppress=True)

geom = sc.ManipulatorGeometry(l1=0.75, l2=1.25, l3=1.10)
print("link lengths [m]:", geom)

# stretch the arm out flat, then bend shoulder and elbow
for q_deg in [(0, 0, 0), (0, 60, -45), (90, 60, -45)]:
    q = sc.JointConfig(*(math.radians(v) for v in q_deg))
    print(f"q = {q_deg} deg -> tool at {sc.forward_kinematics(geom, q)} m")

q = sc.JointConfig(0.0, math.radians(60), math.radians(-45))
J = sc.jacobian(geom, q)
print("\nJacobian at (0, 60, -45) deg [m/rad]:")
print(J)

# joint compliances of a decent industrial actuator, rad/(N*m)
k = sc.ComplianceVector(1e-6, 2e-6, 3e-6)
F = sc.Wrench(0.0, 0.29, -0.96)  # ~1 N pushing sideways and down
dp = sc.deflection(geom, q, k, F)
print(f"\nforce {F.as_array()} N deflects the tool by {dp * 1e6} um")

# the same deflection through the observation form dp = A k
A = sc.observation_matrix(geom, q, F)
print("observation matrix A [m per rad/(N*m)]:")
print(A)
print("A @ k reproduces the deflection:", np.allclose(A @ k.as_array(), dp))

# Cartesian stiffness: force needed per unit tool displacement
Kc = sc.cartesian_stiffness(geom, q, k.as_array())
print("\nCartesian stiffness [N/m]:")
print(Kc)

# fully stretched the arm is singular and the stiffness blows up
try:
    sc.cartesian_stiffness(geom, sc.JointConfig(0.0, 0.0, 0.0), k.as_array())
except sc.SingularConfiguration as exc:
    print("stretched arm:", exc)
