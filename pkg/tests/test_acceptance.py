"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  The optimizer-recovery and Monte-Carlo criteria run at full size
(documented seed 20140331), so this module takes about a minute.
"""

import math
import time

import numpy as np
import pytest

import stiffcal as sc
from stiffcal import reference
from stiffcal.cli import main
from conftest import random_identifiable_plan, random_test_pose

GEOM = reference.reference_geometry()
TEST = reference.reference_test_pose()
SEED = 20140331

# reference optima (sigma^2) and the allowed recovery slack per plan size
OPT_REFERENCE = {1: 1.92, 2: 0.80, 3: 0.51, 4: 0.39}
OPT_SLACK = {1: 1.02, 2: 1.02, 3: 1.03, 4: 1.03}


def check(name, ok, detail=""):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def optimizer_runs():
    t0 = time.perf_counter()
    results = {m: sc.optimize_plan(GEOM, TEST, m, sc.OptimizerOptions(seed=SEED))
               for m in (1, 2, 3, 4)}
    return results, time.perf_counter() - t0


def test_criterion_1_repeated_test_pose_bound():
    worst = 0.0
    for m in (1, 2, 3, 4):
        plan = sc.plan_from_test_pose(TEST, m)
        value = sc.test_pose_criterion(GEOM, plan, TEST)
        bound = sc.repeated_pose_bound(3, m)
        worst = max(worst, abs(value / bound - 1.0))
    check("1 repeated-test-pose bound (3/m sigma^2, m=1..4)", worst < 1e-10,
          f"max rel dev {worst:.2e}")


def test_criterion_2_reference_plan_evaluation():
    worst_perf = worst_dk = 0.0
    for row in reference.REFERENCE_ROWS:
        plan = reference.reference_plan(row, TEST)
        perf = sc.test_pose_criterion(GEOM, plan, TEST)
        dk = sc.covariance(GEOM, plan, sc.NoiseModel(1.0)).delta_k() * plan.F0
        worst_perf = max(worst_perf, abs(perf / row.perf - 1.0))
        worst_dk = max(worst_dk, max(abs(d / r - 1.0) for d, r in zip(dk, row.dk)))
    check("2 reference-table evaluation (perf 2%, dk 5%)",
          worst_perf <= 0.02 and worst_dk <= 0.05,
          f"worst perf dev {worst_perf:.1%}, worst dk dev {worst_dk:.1%}")


def test_criterion_3_optimizer_recovery(optimizer_runs):
    results, elapsed = optimizer_runs
    devs = []
    ok = True
    for m, result in results.items():
        limit = OPT_REFERENCE[m] * OPT_SLACK[m]
        ok &= result.criterion_value <= limit
        devs.append(f"m={m}: {result.criterion_value:.4f} (limit {limit:.4f})")
    ok &= elapsed < 60.0
    check("3 optimizer recovery (seed 20140331, < 60 s)", ok,
          "; ".join(devs) + f"; took {elapsed:.1f}s")


def test_criterion_4_improvement_claims():
    perf = {}
    for row in reference.REFERENCE_ROWS:
        plan = reference.reference_plan(row, TEST)
        perf[row.label] = sc.test_pose_criterion(GEOM, plan, TEST)
    ratios = {m: perf[f"{m}x Test Conf."] / perf[f"Opt.{m} Conf."] for m in (2, 3, 4)}
    gaps = {m: perf[f"{m}x Opt.1 Conf."] / perf[f"Opt.{m} Conf."] - 1.0
            for m in (2, 3, 4)}
    ok = all(r >= 1.5 for r in ratios.values())
    ok &= all(0.15 <= g <= 0.30 for g in gaps.values())
    check("4 improvement >= 1.5x and repeat-penalty in [15%, 30%]", ok,
          "ratios " + ", ".join(f"{r:.2f}" for r in ratios.values())
          + "; gaps " + ", ".join(f"{g:.1%}" for g in gaps.values()))


def test_criterion_5_monte_carlo_validation():
    t0 = time.perf_counter()
    cfg = sc.TrialConfig(geom=GEOM, plan=reference.published_optimal_plan(1),
                         test=TEST, sigma=1e-4, trials=100_000, seed=SEED)
    stats = sc.run_trials(cfg)
    elapsed = time.perf_counter() - t0

    se = np.where(stats.cov_se > 0, stats.cov_se, np.inf)
    cov_dev = np.max(np.abs(stats.empirical_cov.matrix - stats.analytic_cov.matrix) / se)
    ot_dev = abs(stats.empirical_ot / stats.analytic_ot - 1.0)
    bias_dev = np.max(np.abs(stats.mean_k.as_array() - cfg.k_true.as_array())
                      / stats.mean_k_se)
    emp_dk = np.sqrt(np.diag(stats.empirical_cov.matrix)) / (cfg.sigma / cfg.plan.F0)
    dk_dev = np.max(np.abs(emp_dk / np.array([0.66, 0.52, 1.81]) - 1.0))

    ok = cov_dev <= 5.0 and ot_dev <= 0.03 and bias_dev <= 5.0
    ok &= dk_dev <= 0.03 and elapsed < 30.0
    check("5 Monte-Carlo validation (1e5 trials)", ok,
          f"cov {cov_dev:.2f} SE, Ot dev {ot_dev:.2%}, bias {bias_dev:.2f} SE, "
          f"dk vs reference {dk_dev:.2%}, took {elapsed:.1f}s")


def test_criterion_5b_monte_carlo_bound_at_test_configuration():
    # the empirical mean squared compensation error of the repeated test
    # pose must land on the 3 sigma^2 bound
    t0 = time.perf_counter()
    cfg = sc.TrialConfig(geom=GEOM, plan=sc.plan_from_test_pose(TEST, 1),
                         test=TEST, sigma=1e-4, trials=100_000, seed=SEED)
    stats = sc.run_trials(cfg)
    elapsed = time.perf_counter() - t0
    ot_sigma2 = stats.empirical_ot / cfg.sigma**2
    ok = abs(ot_sigma2 / 3.0 - 1.0) <= 0.03 and elapsed < 30.0
    check("5b empirical criterion at test configuration = 3 sigma^2",
          ok, f"got {ot_sigma2:.4f} sigma^2, took {elapsed:.1f}s")


def test_criterion_6_property_suites():
    rng = np.random.default_rng(SEED)
    worst = {}

    # closed-form covariance and criterion vs the general path
    dev_cov = dev_crit = 0.0
    for _ in range(1000):
        plan = random_identifiable_plan(rng, int(rng.integers(1, 5)),
                                        F0=rng.uniform(0.3, 3.0))
        info = sc.information_matrix(GEOM, plan)
        general = sc.covariance(GEOM, plan, sc.NoiseModel(1.0)).matrix
        closed = sc.covariance_closed_form(info.a11, info.a22, info.a33,
                                           info.a23, 1.0, plan.F0).matrix
        dev_cov = max(dev_cov, np.max(np.abs(closed - general)) / np.max(np.abs(general)))
        test = random_test_pose(rng)
        d = sc.d_coefficients(GEOM, test)
        cf = sc.criterion_closed_form(d, info.a11, info.a22, info.a33,
                                      info.a23, plan.F0)
        gen = sc.test_pose_criterion(GEOM, plan, test)
        dev_crit = max(dev_crit, abs(cf - gen) / gen)
    worst["closed-forms"] = max(dev_cov, dev_crit)
    assert worst["closed-forms"] < 1e-10

    # Jacobian vs central differences
    dev = 0.0
    h = 1e-6
    for _ in range(100):
        q = sc.JointConfig(*rng.uniform(-math.pi, math.pi, 3))
        J = sc.jacobian(GEOM, q)
        for n, name in enumerate(("q1", "q2", "q3")):
            qp = sc.JointConfig(**{**q.__dict__, name: getattr(q, name) + h})
            qm = sc.JointConfig(**{**q.__dict__, name: getattr(q, name) - h})
            fd = (sc.forward_kinematics(GEOM, qp) - sc.forward_kinematics(GEOM, qm)) / (2 * h)
            dev = max(dev, float(np.max(np.abs(J[:, n] - fd))))
    worst["jacobian-fd"] = dev
    assert dev < 1e-5

    # z-rotation and alpha-flip invariances
    dev = 0.0
    for _ in range(200):
        q = sc.JointConfig(*rng.uniform(-math.pi, math.pi, 3))
        f = rng.uniform(-1, 1, 3)
        phi = rng.uniform(-math.pi, math.pi)
        c, s = math.cos(phi), math.sin(phi)
        A = sc.observation_matrix(GEOM, q, sc.Wrench(*f))
        A_rot = sc.observation_matrix(
            GEOM, sc.JointConfig(q.q1 + phi, q.q2, q.q3),
            sc.Wrench(c * f[0] - s * f[1], s * f[0] + c * f[1], f[2]))
        G, G_rot = A.T @ A, A_rot.T @ A_rot
        dev = max(dev, np.max(np.abs(G - G_rot)) / max(np.max(np.abs(G)), 1e-30))
        pose = sc.ExperimentPose(*rng.uniform(-math.pi, math.pi, 3))
        flip = sc.ExperimentPose(pose.q2, pose.q3, pose.alpha + math.pi)
        B = sc.observation_matrix_reduced(GEOM, pose)
        B_flip = sc.observation_matrix_reduced(GEOM, flip)
        dev = max(dev, np.max(np.abs(B.T @ B - B_flip.T @ B_flip))
                  / max(np.max(np.abs(B.T @ B)), 1e-30))
    worst["invariances"] = dev
    assert dev < 1e-10

    # exact 1/sqrt(m) accuracy and 1/r criterion scaling
    plan = random_identifiable_plan(rng, 2)
    dk1 = sc.covariance(GEOM, plan, sc.NoiseModel(1.0)).delta_k()
    v1 = sc.test_pose_criterion(GEOM, plan, TEST)
    dev = 0.0
    for r in (2, 3, 4):
        dkr = sc.covariance(GEOM, plan.repeated(r), sc.NoiseModel(1.0)).delta_k()
        vr = sc.test_pose_criterion(GEOM, plan.repeated(r), TEST)
        dev = max(dev, float(np.max(np.abs(dkr * math.sqrt(r) / dk1 - 1.0))))
        dev = max(dev, abs(vr * r / v1 - 1.0))
    worst["scalings"] = dev
    assert dev < 1e-12

    # adding a pose never increases the criterion
    mono_ok = True
    for _ in range(100):
        plan = random_identifiable_plan(rng, int(rng.integers(1, 4)))
        test = random_test_pose(rng)
        extra = sc.ExperimentPose(*rng.uniform(-math.pi, math.pi, 3))
        bigger = sc.ExperimentPlan(plan.poses + (extra,), plan.F0)
        mono_ok &= (sc.test_pose_criterion(GEOM, bigger, test)
                    <= sc.test_pose_criterion(GEOM, plan, test) * (1 + 1e-9))
    assert mono_ok

    # single-pose identifiability factorization
    dev = 0.0
    for _ in range(100):
        q2, q3, alpha = rng.uniform(-math.pi, math.pi, 3)
        info = sc.information_matrix(GEOM, sc.ExperimentPlan(
            (sc.ExperimentPose(q2, q3, alpha),), 1.0))
        lc = GEOM.l2 * math.cos(q2) + GEOM.l3 * math.cos(q2 + q3)
        expected = (GEOM.l2**2 * GEOM.l3**4 * lc**2 * math.cos(q2 + q3)**2
                    * math.sin(q3)**2 * math.sin(alpha)**4)
        det2 = info.a22 * info.a33 - info.a23**2
        dev = max(dev, abs(det2 - expected) / max(abs(expected), 1e-30))
    worst["factorization"] = dev
    assert dev < 1e-9

    check("6 property suites", True,
          ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + ", monotone ok")


def test_criterion_7_deterministic_outputs(tmp_path, monkeypatch):
    import yaml

    cfg_path = tmp_path / "config.yaml"
    cfg_path.write_text(yaml.safe_dump({
        "geometry": {"l1": 0.75, "l2": 1.25, "l3": 1.10},
        "test_pose": {"q_deg": [0.0, 60.0, -45.0], "force": [0.0, 0.29, -0.96]},
        "plan": {"F0": 1.0, "poses_deg": [[43.2, -57.3, 67.1]]},
    }), encoding="utf-8")

    outputs = {}
    for threads in ("1", "2"):
        monkeypatch.setenv("STIFFCAL_THREADS", threads)
        opt_out = tmp_path / f"opt_{threads}.csv"
        sim_out = tmp_path / f"sim_{threads}.csv"
        assert main(["optimize", "--config", str(cfg_path), "--m", "2",
                     "--starts", "8", "--seed", str(SEED), "--format", "csv",
                     "--out", str(opt_out)]) == 0
        assert main(["simulate", "--config", str(cfg_path), "--trials", "3000",
                     "--sigma", "1e-4", "--seed", str(SEED), "--format", "csv",
                     "--out", str(sim_out)]) == 0
        outputs[threads] = (opt_out.read_bytes(), sim_out.read_bytes())
    ok = outputs["1"] == outputs["2"]
    check("7 byte-identical outputs across STIFFCAL_THREADS", ok,
          "optimize and simulate CSV outputs compared for 1 vs 2 workers")
