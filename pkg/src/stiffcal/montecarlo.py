"""Virtual calibration bench: synthetic experiments against the analytic math.

Each trial draws noisy deflection measurements for the plan, runs the
least-squares estimator, and propagates the compliance error to the test
pose.  Aggregated over many trials, the empirical estimate covariance and
the empirical mean squared compensation error must match their analytic
counterparts; this is the only way to validate those formulas without
hardware.

Every trial gets its own counter-derived RNG substream from (seed, trial
index), so results are reproducible bit-for-bit regardless of how trial
blocks are scheduled across worker processes.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _parallel
from .criterion import test_pose_criterion
from .elasto import (ComplianceVector, ExperimentPlan, TestPose, force_from_angle,
                     observation_matrix_reduced, observation_matrix_test)
from .identification import (CalibrationObservation, CovarianceMatrix, NoiseModel,
                             NonPhysicalEstimateWarning, covariance, estimate_compliances)
from .kinematics import JointConfig, ManipulatorGeometry

_BLOCK = 2048  # trials per worker task

DEFAULT_K_TRUE = ComplianceVector(1.0e-6, 2.0e-6, 3.0e-6)


@dataclass(frozen=True)
class TrialConfig:
    """Inputs of one Monte-Carlo run.

    ``k_true`` defaults to compliances of order 1e-6 rad/(N*m), typical for
    actuated industrial joints; none of the validated statistics depend on
    it because the estimator error is linear in the noise alone.
    """

    geom: ManipulatorGeometry
    plan: ExperimentPlan
    test: TestPose
    sigma: float
    trials: int
    seed: int
    k_true: ComplianceVector = DEFAULT_K_TRUE

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.sigma < 0.0 or not math.isfinite(self.sigma):
            raise ValueError("sigma must be finite and >= 0")


@dataclass(frozen=True)
class EmpiricalStats:
    """Aggregates of a Monte-Carlo run, next to their analytic predictions.

    ``empirical_ot`` is the sample mean of |dp|^2 at the test pose;
    ``*_se`` fields are standard errors of the empirical quantities
    (Gaussian plug-in formulas) for judging agreement.
    """

    mean_k: ComplianceVector
    empirical_cov: CovarianceMatrix
    empirical_ot: float
    analytic_ot: float
    analytic_cov: CovarianceMatrix
    mean_k_se: np.ndarray
    cov_se: np.ndarray
    ot_se: float
    trials: int
    sigma: float


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """The dedicated RNG substream of one trial."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def simulate_observations(geom: ManipulatorGeometry, plan: ExperimentPlan,
                          k_true: ComplianceVector, sigma: float,
                          rng: np.random.Generator) -> list:
    """Synthesize one experiment set: model deflections plus i.i.d. noise.

    Noise is zero-mean Gaussian with standard deviation ``sigma`` on each
    Cartesian coordinate independently.
    """
    k = k_true.as_array()
    out = []
    for pose in plan.poses:
        q = JointConfig(0.0, pose.q2, pose.q3)
        F = force_from_angle(plan.F0, pose.alpha)
        dp = observation_matrix_reduced(geom, pose, plan.F0) @ k
        dp = dp + rng.normal(0.0, sigma, 3)
        out.append(CalibrationObservation(q, F, dp))
    return out


def _run_block(cfg: TrialConfig, block):
    """Simulate and estimate one contiguous range of trials (worker entry)."""
    start, stop = block
    A0 = observation_matrix_test(cfg.geom, cfg.test)
    k_true = cfg.k_true.as_array()
    khats = np.empty((stop - start, 3))
    dp_sq = np.empty(stop - start)
    with warnings.catch_warnings():
        # under noise the unbiased estimator may go non-positive; that is
        # the point of the bench, not something to warn about per trial
        warnings.simplefilter("ignore", NonPhysicalEstimateWarning)
        for t in range(start, stop):
            obs = simulate_observations(cfg.geom, cfg.plan, cfg.k_true,
                                        cfg.sigma, trial_rng(cfg.seed, t))
            khat = estimate_compliances(cfg.geom, obs).as_array()
            khats[t - start] = khat
            dp = A0 @ (khat - k_true)
            dp_sq[t - start] = dp @ dp
    return khats, dp_sq


def run_trials(cfg: TrialConfig) -> EmpiricalStats:
    """Run the full bench: simulate, estimate, aggregate, compare.

    Raises
    ------
    UnidentifiablePlan
        If the plan cannot identify all three compliances (propagated
        from the estimator / covariance computation).
    """
    analytic_cov = covariance(cfg.geom, cfg.plan, NoiseModel(cfg.sigma))
    analytic_ot = test_pose_criterion(cfg.geom, cfg.plan, cfg.test, cfg.sigma)

    blocks = [(s, min(s + _BLOCK, cfg.trials)) for s in range(0, cfg.trials, _BLOCK)]
    results = _parallel.ordered_map(functools.partial(_run_block, cfg), blocks)
    khats = np.concatenate([r[0] for r in results])
    dp_sq = np.concatenate([r[1] for r in results])

    mean_k = khats.mean(axis=0)
    if cfg.trials > 1:
        emp_cov = np.cov(khats, rowvar=False, ddof=1)
        ot_se = float(dp_sq.std(ddof=1) / math.sqrt(cfg.trials))
    else:
        emp_cov = np.zeros((3, 3))
        ot_se = 0.0
    diag = np.diag(emp_cov)
    cov_se = np.sqrt((np.outer(diag, diag) + emp_cov**2) / max(cfg.trials - 1, 1))
    return EmpiricalStats(
        mean_k=ComplianceVector(*mean_k),
        empirical_cov=CovarianceMatrix(emp_cov),
        empirical_ot=float(dp_sq.mean()),
        analytic_ot=analytic_ot,
        analytic_cov=analytic_cov,
        mean_k_se=np.sqrt(diag / cfg.trials),
        cov_se=cov_se,
        ot_se=ot_se,
        trials=cfg.trials,
        sigma=cfg.sigma,
    )
