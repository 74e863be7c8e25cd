"""Multistart derivative-free search for optimal calibration poses.

The design variables are the m reduced poses (q2_i, q3_i, alpha_i); the
objective is the closed-form test-pose criterion, guarded to +inf wherever
the candidate information matrix is ill conditioned so the search never
walks into unidentifiable plans.  The landscape is smooth but multimodal
and rich in exact symmetries (alpha -> alpha + pi, mirrored plans, pose
permutations), so a seeded multistart of Nelder-Mead descents is used: a
cheap first pass over every start, then a tight polish of the best few.
Starts run on worker processes; identical inputs and seed give identical
results for any worker count because the start points are generated up
front and the reduction is by (value, start index).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import _parallel
from .criterion import d_coefficients, test_pose_criterion
from .elasto import ExperimentPlan, ExperimentPose, TestPose
from .errors import DegenerateTestPose, NoConvergence
from .identification import COND_LIMIT
from .kinematics import ManipulatorGeometry, wrap_angle

DEFAULT_SEED = 20140331
_POLISH_TOP = 8


@dataclass(frozen=True)
class OptimizerOptions:
    """Multistart search settings.

    ``starts`` of None picks 64 random starts for m <= 2 and 256 for
    m >= 3 (the search space has 3m dimensions).  ``bounds`` applies to
    every angle variable; the default (-pi, pi] is treated as a periodic
    domain, a narrower interval as a hard constraint.  ``initial_plans``
    are deterministic extra starts tried before the random ones, e.g. to
    warm-start from a smaller plan's optimum.
    """

    starts: int | None = None
    max_iterations: int = 2000
    objective_tolerance: float = 1e-10
    seed: int = DEFAULT_SEED
    bounds: tuple = (-math.pi, math.pi)
    initial_plans: tuple = ()

    def __post_init__(self):
        if self.starts is not None and self.starts < 0:
            raise ValueError("starts must be >= 0")
        if not (self.objective_tolerance > 0.0):
            raise ValueError("objective_tolerance must be > 0")
        if not (self.bounds[0] < self.bounds[1]):
            raise ValueError("bounds must be an increasing interval")


@dataclass(frozen=True)
class OptimizationResult:
    plan: ExperimentPlan
    criterion_value: float
    starts_converged: int
    best_start_index: int


@dataclass(frozen=True)
class _SearchTask:
    """Picklable description of one multistart search (sent to workers)."""

    l2: float
    l3: float
    d1: float
    d2: float
    d3: float
    d4: float
    m: int
    lo: float
    hi: float
    enforce_bounds: bool
    stage1_maxiter: int
    adaptive: bool


def canonicalize_pose(pose: ExperimentPose) -> ExperimentPose:
    """Map a pose to its symmetry-class representative.

    Angles are wrapped to (-pi, pi]; alpha additionally to (-pi/2, pi/2]
    using the alpha -> alpha + pi equivalence (the force flips sign, which
    leaves A^T A unchanged).
    """
    alpha = wrap_angle(pose.alpha)
    if alpha <= -0.5 * math.pi:
        alpha += math.pi
    elif alpha > 0.5 * math.pi:
        alpha -= math.pi
    return ExperimentPose(wrap_angle(pose.q2), wrap_angle(pose.q3), alpha)


def _default_starts(m: int) -> int:
    return 64 if m <= 2 else 256


def _objective_from(task: _SearchTask):
    """Closed-form criterion of a flat (q2, q3, alpha)*m vector, or +inf."""
    l2, l3 = task.l2, task.l3
    lsq = l2 * l2 + l3 * l3
    two_l2l3 = 2.0 * l2 * l3
    l3sq = l3 * l3
    l3q = l3sq * l3sq
    d1, d2, d3, d4 = task.d1, task.d2, task.d3, task.d4
    m, lo, hi, enforce = task.m, task.lo, task.hi, task.enforce_bounds

    def objective(x):
        a11 = a22 = a33 = a23 = 0.0
        for i in range(m):
            q2 = x[3 * i]
            q3 = x[3 * i + 1]
            al = x[3 * i + 2]
            if enforce and not (lo <= q2 <= hi and lo <= q3 <= hi and lo <= al <= hi):
                return math.inf
            c3 = math.cos(q3)
            c23 = math.cos(q2 + q3)
            lc = l2 * math.cos(q2) + l3 * c23
            ca = math.cos(al)
            ca2 = ca * ca
            sa2 = 1.0 - ca2
            lc2 = lc * lc
            a11 += lc2 * lc2 * ca2
            a22 += lc2 * (lsq + two_l2l3 * c3) * sa2
            a33 += l3q * c23 * c23 * sa2
            a23 += l3sq * lc * c23 * (l3 + l2 * c3) * sa2
        det2 = a22 * a33 - a23 * a23
        if a11 <= 0.0 or det2 <= 0.0:
            return math.inf
        tr = a22 + a33
        disc = math.sqrt(max(tr * tr - 4.0 * det2, 0.0))
        emax = max(a11, 0.5 * (tr + disc))
        emin = min(a11, 0.5 * (tr - disc))
        if emin <= 0.0 or emax > COND_LIMIT * emin:
            return math.inf
        return d1 / a11 + (d2 * a22 + d3 * a33 - 2.0 * d4 * a23) / det2

    return objective


def _run_start(task: _SearchTask, x0):
    """Stage-1 descent from one start point (worker-process entry)."""
    objective = _objective_from(task)
    if task.stage1_maxiter == 0:
        return float(objective(x0)), np.asarray(x0, dtype=float)
    # inf is the ill-conditioning sentinel; keep numpy quiet about inf-inf
    with np.errstate(invalid="ignore"):
        res = minimize(objective, x0, method="Nelder-Mead",
                       options=dict(maxiter=task.stage1_maxiter, fatol=1e-9,
                                    xatol=1e-7, adaptive=task.adaptive))
    return float(res.fun), res.x


def optimize_plan(geom: ManipulatorGeometry, test: TestPose, m: int,
                  opts: OptimizerOptions | None = None, F0: float = 1.0) -> OptimizationResult:
    """Find m calibration poses minimizing the test-pose criterion.

    Parameters
    ----------
    m : int
        Number of calibration poses (3m design variables).
    opts : OptimizerOptions, optional
    F0 : float
        Force magnitude of the returned plan; the criterion scales as
        1/F0^2 and the minimizing poses do not depend on it.

    Returns
    -------
    OptimizationResult
        Canonicalized best plan; ``criterion_value`` is re-evaluated
        through the general trace formula, not the optimizer's fast path.

    Raises
    ------
    DegenerateTestPose
        If the test-pose observation matrix is rank deficient (some
        compliance direction has no effect at the test pose, so the
        design problem is ill posed there).
    NoConvergence
        If no start produced a finite objective.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    opts = opts or OptimizerOptions()
    d = d_coefficients(geom, test)
    # columns of the test observation matrix: column 1 is orthogonal to the
    # others, so rank 3 needs d1 > 0 and a nonsingular (2,3) Gramian
    gram_det = d.d2 * d.d3 - d.d4 * d.d4
    scale = max(d.d1, d.d2, d.d3)
    if d.d1 <= 1e-14 * scale or gram_det <= 1e-14 * scale * scale:
        raise DegenerateTestPose(
            "test-pose observation matrix is rank deficient; the design "
            "problem is ill posed at this pose/loading")

    dim = 3 * m
    lo, hi = opts.bounds
    enforce = lo > -math.pi + 1e-9 or hi < math.pi - 1e-9
    task = _SearchTask(
        l2=geom.l2, l3=geom.l3, d1=d.d1, d2=d.d2, d3=d.d3, d4=d.d4, m=m,
        lo=lo, hi=hi, enforce_bounds=enforce,
        stage1_maxiter=min(opts.max_iterations, max(300, 150 * dim)),
        adaptive=dim >= 6,
    )

    x0s = []
    for plan in opts.initial_plans:
        if plan.m != m:
            raise ValueError("initial_plans entries must have exactly m poses")
        x0s.append(np.array([v for p in plan.poses for v in (p.q2, p.q3, p.alpha)]))
    n_random = _default_starts(m) if opts.starts is None else opts.starts
    rng = np.random.default_rng(opts.seed)
    if n_random:
        x0s.extend(rng.uniform(lo, hi, size=(n_random, dim)))
    if not x0s:
        raise ValueError("no starts: set starts >= 1 or provide initial_plans")

    stage1 = _parallel.ordered_map(functools.partial(_run_start, task), x0s)
    finite = [(f, i, x) for i, (f, x) in enumerate(stage1) if math.isfinite(f)]
    if not finite:
        raise NoConvergence(f"none of {len(x0s)} starts reached an identifiable plan")
    finite.sort(key=lambda t: (t[0], t[1]))

    best_f, best_i, best_x = finite[0]
    if opts.max_iterations > 0:
        objective = _objective_from(task)
        with np.errstate(invalid="ignore"):
            for f, i, x in finite[:_POLISH_TOP]:
                res = minimize(objective, x, method="Nelder-Mead",
                               options=dict(maxiter=opts.max_iterations,
                                            fatol=opts.objective_tolerance,
                                            xatol=1e-10, adaptive=task.adaptive))
                if math.isfinite(res.fun) and (res.fun, i) < (best_f, best_i):
                    best_f, best_i, best_x = float(res.fun), i, res.x

    poses = tuple(canonicalize_pose(ExperimentPose(*best_x[3 * i:3 * i + 3]))
                  for i in range(m))
    plan = ExperimentPlan(poses, F0)
    value = test_pose_criterion(geom, plan, test, sigma=1.0)
    return OptimizationResult(plan=plan, criterion_value=value,
                              starts_converged=len(finite), best_start_index=best_i)
