"""Measurement-pose design for joint-compliance calibration of a 3-link arm.

The package models end-effector deflection under load for an
anthropomorphic (base-shoulder-elbow) manipulator with compliant joints,
quantifies how well a set of calibration experiments identifies the joint
compliances, searches for experiment plans that minimize the expected
compensation error at a user-chosen test pose, and validates the analytic
error predictions with a seeded Monte-Carlo bench.
"""

from .elasto import (ComplianceVector, ExperimentPlan, ExperimentPose, InformationMatrix,
                     TestPose, Wrench, deflection, force_from_angle, information_matrix,
                     observation_matrix, observation_matrix_reduced, observation_matrix_test,
                     plan_from_test_pose)
from .errors import (DegenerateTestPose, NoConvergence, NonPositiveForce,
                     SingularConfiguration, StiffcalError, UnidentifiablePlan)
from .criterion import (DCoefficients, criterion_closed_form, d_coefficients,
                        repeated_pose_bound, test_pose_criterion)
from .identification import (CalibrationObservation, CovarianceMatrix, NoiseModel,
                             NonPhysicalEstimateWarning, covariance, covariance_closed_form,
                             estimate_compliances)
from .kinematics import (AuxLengths, JointConfig, ManipulatorGeometry, aux_lengths,
                         cartesian_stiffness, forward_kinematics, jacobian, wrap_angle)
from .montecarlo import EmpiricalStats, TrialConfig, run_trials, simulate_observations
from .optimize import (OptimizationResult, OptimizerOptions, canonicalize_pose,
                       optimize_plan)

__version__ = "0.1.0"

__all__ = [
    "AuxLengths", "CalibrationObservation", "ComplianceVector", "CovarianceMatrix",
    "DCoefficients", "DegenerateTestPose", "EmpiricalStats", "ExperimentPlan",
    "ExperimentPose", "InformationMatrix", "JointConfig", "ManipulatorGeometry",
    "NoConvergence", "NoiseModel", "NonPhysicalEstimateWarning", "NonPositiveForce",
    "OptimizationResult", "OptimizerOptions", "SingularConfiguration", "StiffcalError",
    "TestPose", "TrialConfig", "UnidentifiablePlan", "Wrench", "aux_lengths",
    "canonicalize_pose", "cartesian_stiffness", "covariance", "covariance_closed_form",
    "criterion_closed_form", "d_coefficients", "deflection", "estimate_compliances",
    "force_from_angle", "forward_kinematics", "information_matrix", "jacobian",
    "observation_matrix", "observation_matrix_reduced", "observation_matrix_test",
    "optimize_plan", "plan_from_test_pose", "repeated_pose_bound", "run_trials",
    "simulate_observations", "test_pose_criterion", "wrap_angle",
]
