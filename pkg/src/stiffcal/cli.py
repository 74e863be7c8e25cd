"""Command-line front end: evaluate, optimize, simulate, reproduce-table1.

All angles cross this boundary in degrees and are converted to radians
immediately; all internal computation is in radians.  Reports print the
criterion in sigma^2 units and identification accuracies in sigma/F0 units,
so they do not depend on the user's choice of noise level or force
magnitude.

Exit codes: 0 success, 1 usage/config error, 2 unidentifiable plan,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np
import yaml

from . import reference
from .criterion import test_pose_criterion
from .elasto import ComplianceVector, ExperimentPlan, ExperimentPose, TestPose, Wrench
from .errors import (DegenerateTestPose, NoConvergence, NonPositiveForce,
                     SingularConfiguration, StiffcalError, UnidentifiablePlan)
from .identification import NoiseModel, covariance
from .kinematics import JointConfig, ManipulatorGeometry
from .montecarlo import DEFAULT_K_TRUE, TrialConfig, run_trials
from .optimize import OptimizerOptions, optimize_plan

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNIDENTIFIABLE = 2
EXIT_NUMERICAL = 3

CSV_HEADER = "label,perf_sigma2,q2_deg,q3_deg,alpha_deg,dk1_sigma,dk2_sigma,dk3_sigma"


class ConfigError(Exception):
    """Invalid or missing configuration value; message carries the field path."""


@dataclass(frozen=True)
class ReportRow:
    """One plan's report: criterion value, poses (deg) and accuracies (sigma)."""

    label: str
    performance_measure: float
    configurations: tuple  # of (q2_deg, q3_deg, alpha_deg)
    delta_k: tuple  # (dk1, dk2, dk3) in sigma/F0 units


# ---------------------------------------------------------------- config


def _get(cfg: dict, path: str, required=True, default=None):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(f"missing config key: {path}")
            return default
        node = node[part]
    return node


def _number(cfg, path, required=True, default=None):
    value = _get(cfg, path, required, default)
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key {path} must be a number, got {value!r}")
    return float(value)


def _triple(cfg, path, required=True):
    value = _get(cfg, path, required)
    if value is None:
        return None
    if not isinstance(value, (list, tuple)) or len(value) != 3 or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
        raise ConfigError(f"config key {path} must be a list of three numbers")
    return tuple(float(v) for v in value)


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a key/value mapping")
    return cfg


def parse_geometry(cfg: dict) -> ManipulatorGeometry:
    try:
        return ManipulatorGeometry(
            l1=_number(cfg, "geometry.l1"),
            l2=_number(cfg, "geometry.l2"),
            l3=_number(cfg, "geometry.l3"),
        )
    except ValueError as exc:
        raise ConfigError(f"config error at geometry: {exc}") from exc


def parse_test_pose(cfg: dict) -> TestPose:
    q_deg = _triple(cfg, "test_pose.q_deg")
    force = _triple(cfg, "test_pose.force")
    try:
        return TestPose(
            q0=JointConfig(*(math.radians(v) for v in q_deg)),
            force=Wrench(*force),
        )
    except (ValueError, NonPositiveForce) as exc:
        raise ConfigError(f"config error at test_pose: {exc}") from exc


def parse_plan(cfg: dict, required=True) -> ExperimentPlan | None:
    if _get(cfg, "plan", required=False) is None:
        if required:
            raise ConfigError("this command needs an explicit plan: "
                              "add a 'plan' section with F0 and poses_deg")
        return None
    poses_deg = _get(cfg, "plan.poses_deg")
    if not isinstance(poses_deg, (list, tuple)) or not poses_deg:
        raise ConfigError("config key plan.poses_deg must be a non-empty list "
                          "of [q2, q3, alpha] triples (degrees)")
    poses = []
    for i, row in enumerate(poses_deg):
        if not isinstance(row, (list, tuple)) or len(row) != 3:
            raise ConfigError(f"config key plan.poses_deg[{i}] must be a "
                              "[q2, q3, alpha] triple")
        poses.append(ExperimentPose(*(math.radians(float(v)) for v in row)))
    F0 = _number(cfg, "plan.F0", required=False, default=1.0)
    try:
        return ExperimentPlan(tuple(poses), F0)
    except (ValueError, NonPositiveForce) as exc:
        raise ConfigError(f"config error at plan: {exc}") from exc


def resolve_output(cfg: dict, args) -> tuple:
    """(format, path): command-line flags win over the config's output section."""
    fmt = args.format or _get(cfg, "output.format", required=False) or "table"
    if fmt not in ("table", "csv"):
        raise ConfigError(f"config key output.format must be table or csv, got {fmt!r}")
    out = args.out if args.out is not None else _get(cfg, "output.path", required=False)
    return fmt, out


def parse_optimizer(cfg: dict, args) -> OptimizerOptions:
    starts = args.starts
    if starts is None:
        raw = _get(cfg, "optimizer.starts", required=False)
        starts = int(raw) if raw is not None else None
    seed = args.seed
    if seed is None:
        raw = _get(cfg, "optimizer.seed", required=False)
        seed = int(raw) if raw is not None else OptimizerOptions.seed
    max_iterations = _get(cfg, "optimizer.max_iterations", required=False)
    tol = _number(cfg, "optimizer.objective_tolerance", required=False)
    kwargs = dict(starts=starts, seed=seed)
    if max_iterations is not None:
        kwargs["max_iterations"] = int(max_iterations)
    if tol is not None:
        kwargs["objective_tolerance"] = tol
    try:
        return OptimizerOptions(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"config error at optimizer: {exc}") from exc


# ---------------------------------------------------------------- reports


def plan_report_row(label: str, geom: ManipulatorGeometry, plan: ExperimentPlan,
                    test: TestPose) -> ReportRow:
    perf = test_pose_criterion(geom, plan, test, sigma=1.0)
    dk = covariance(geom, plan, NoiseModel(1.0)).delta_k() * plan.F0
    configs = tuple((math.degrees(p.q2), math.degrees(p.q3), math.degrees(p.alpha))
                    for p in plan.poses)
    return ReportRow(label, perf, configs, tuple(dk))


def render_rows_table(rows, title: str) -> str:
    lines = [title]
    for row in rows:
        lines.append("")
        lines.append(f"label: {row.label}")
        lines.append(f"performance measure [sigma^2]: {row.performance_measure:.6f}")
        dk = row.delta_k
        lines.append("identification accuracy [sigma]: "
                     f"dk1={dk[0]:.6f} dk2={dk[1]:.6f} dk3={dk[2]:.6f}")
        lines.append("calibration configuration [deg]:")
        lines.append("  pose        q2          q3       alpha")
        for i, (q2, q3, a) in enumerate(row.configurations, start=1):
            lines.append(f"  {i:4d}  {q2:10.4f}  {q3:10.4f}  {a:10.4f}")
    return "\n".join(lines) + "\n"


def render_rows_csv(rows) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        dk = row.delta_k
        for q2, q3, a in row.configurations:
            lines.append(",".join([
                row.label,
                f"{row.performance_measure:.12g}",
                f"{q2:.12g}", f"{q3:.12g}", f"{a:.12g}",
                f"{dk[0]:.12g}", f"{dk[1]:.12g}", f"{dk[2]:.12g}",
            ]))
    return "\n".join(lines) + "\n"


def write_output(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def save_plan_config(path: str, geom: ManipulatorGeometry, test: TestPose,
                     plan: ExperimentPlan):
    """Write a config file that evaluate/simulate can consume as-is."""
    doc = {
        "geometry": {"l1": geom.l1, "l2": geom.l2, "l3": geom.l3},
        "test_pose": {
            "q_deg": [math.degrees(v) for v in (test.q0.q1, test.q0.q2, test.q0.q3)],
            "force": [test.force.fx, test.force.fy, test.force.fz],
        },
        "plan": {
            "F0": plan.F0,
            "poses_deg": [[math.degrees(p.q2), math.degrees(p.q3), math.degrees(p.alpha)]
                          for p in plan.poses],
        },
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)


# ---------------------------------------------------------------- commands


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config)
    geom = parse_geometry(cfg)
    test = parse_test_pose(cfg)
    plan = parse_plan(cfg, required=True)
    fmt, out = resolve_output(cfg, args)
    row = plan_report_row("plan", geom, plan, test)
    text = (render_rows_csv([row]) if fmt == "csv"
            else render_rows_table([row], "plan evaluation"))
    write_output(text, out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    geom = parse_geometry(cfg)
    test = parse_test_pose(cfg)
    m = args.m
    if m is None:
        raw = _get(cfg, "m", required=False)
        m = int(raw) if raw is not None else None
    if m is None:
        raise ConfigError("optimize needs the number of poses: pass --m or set 'm'")
    if m < 1:
        raise ConfigError(f"m must be >= 1, got {m}")
    opts = parse_optimizer(cfg, args)
    F0 = _number(cfg, "plan.F0", required=False, default=1.0)
    fmt, out = resolve_output(cfg, args)
    result = optimize_plan(geom, test, m, opts, F0=F0)
    row = plan_report_row(f"optimized m={m}", geom, result.plan, test)
    title = (f"optimized plan (m={m}, starts converged "
             f"{result.starts_converged}, best start {result.best_start_index})")
    text = (render_rows_csv([row]) if fmt == "csv"
            else render_rows_table([row], title))
    write_output(text, out)
    if args.save_plan:
        save_plan_config(args.save_plan, geom, test, result.plan)
    return EXIT_OK


def _render_simulate(stats, k_true, fmt: str) -> str:
    pairs = [("Ot_m2", stats.empirical_ot, stats.analytic_ot, stats.ot_se)]
    for i in range(3):
        for j in range(i, 3):
            pairs.append((f"cov_{i + 1}{j + 1}",
                          stats.empirical_cov.matrix[i, j],
                          stats.analytic_cov.matrix[i, j],
                          stats.cov_se[i, j]))
    bias = stats.mean_k.as_array() - k_true.as_array()
    if fmt == "csv":
        lines = ["quantity,empirical,analytic,stderr"]
        for name, emp, ana, se in pairs:
            lines.append(f"{name},{emp:.12g},{ana:.12g},{se:.12g}")
        for i in range(3):
            lines.append(f"bias_k{i + 1},{bias[i]:.12g},"
                         f"{0.0:.12g},{stats.mean_k_se[i]:.12g}")
        return "\n".join(lines) + "\n"
    lines = [f"monte-carlo validation (trials={stats.trials}, sigma={stats.sigma:g})",
             "",
             "quantity        empirical        analytic        |diff|/stderr"]
    for name, emp, ana, se in pairs:
        ratio = abs(emp - ana) / se if se > 0.0 else 0.0
        lines.append(f"{name:<12} {emp:>15.6e} {ana:>15.6e} {ratio:>12.2f}")
    lines.append("")
    lines.append("estimator bias (empirical mean - true, with standard error):")
    for i in range(3):
        lines.append(f"  k{i + 1}: {bias[i]:.6e} (se {stats.mean_k_se[i]:.3e})")
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    geom = parse_geometry(cfg)
    test = parse_test_pose(cfg)
    plan = parse_plan(cfg, required=True)
    trials = args.trials
    if trials is None:
        raw = _get(cfg, "simulation.trials", required=False)
        trials = int(raw) if raw is not None else None
    sigma = args.sigma
    if sigma is None:
        sigma = _number(cfg, "simulation.sigma", required=False)
    seed = args.seed
    if seed is None:
        raw = _get(cfg, "simulation.seed", required=False)
        seed = int(raw) if raw is not None else None
    if trials is None or sigma is None or seed is None:
        raise ConfigError("simulate needs trials, sigma and seed "
                          "(flags or 'simulation' config section)")
    k_true = _triple(cfg, "simulation.k_true", required=False)
    trial_cfg = TrialConfig(
        geom=geom, plan=plan, test=test, sigma=sigma, trials=trials, seed=seed,
        k_true=ComplianceVector(*k_true) if k_true else DEFAULT_K_TRUE,
    )
    fmt, out = resolve_output(cfg, args)
    stats = run_trials(trial_cfg)
    write_output(_render_simulate(stats, trial_cfg.k_true, fmt), out)
    return EXIT_OK


def _flag(ok: bool) -> str:
    return "within" if ok else "OUTSIDE"


def cmd_reproduce_table1(args) -> int:
    tol_perf = args.tolerance_perf
    tol_dk = args.tolerance_dk
    geom = reference.reference_geometry()
    test = reference.reference_test_pose()
    lines = ["reference table reproduction (3-link arm benchmark)",
             f"geometry [m]: l1={geom.l1} l2={geom.l2} l3={geom.l3}",
             "test pose [deg]: (0, 60, -45); force [N]: (0, 0.29, -0.96)",
             f"tolerances: performance {tol_perf:.0%} (two-sided; one-sided for "
             f"re-optimized rows), accuracy {tol_dk:.0%}",
             "",
             "evaluated plans",
             f"{'label':<18} {'perf':>8} {'ref':>6} {'flag':>8}   "
             f"{'dk1':>6} {'dk2':>6} {'dk3':>6}  {'ref dk':<18} {'flag':>8}"]
    all_ok = True
    evaluated = {}
    for row in reference.REFERENCE_ROWS:
        plan = reference.reference_plan(row, test)
        rep = plan_report_row(row.label, geom, plan, test)
        evaluated[row.label] = rep.performance_measure
        perf_ok = abs(rep.performance_measure / row.perf - 1.0) <= tol_perf
        dk_ok = all(abs(d / r - 1.0) <= tol_dk for d, r in zip(rep.delta_k, row.dk))
        all_ok &= perf_ok and dk_ok
        dk = rep.delta_k
        ref_dk = "/".join(f"{v:.2f}" for v in row.dk)
        lines.append(f"{row.label:<18} {rep.performance_measure:>8.4f} "
                     f"{row.perf:>6.2f} {_flag(perf_ok):>8}   "
                     f"{dk[0]:>6.3f} {dk[1]:>6.3f} {dk[2]:>6.3f}  "
                     f"{ref_dk:<18} {_flag(dk_ok):>8}")

    lines += ["", "re-optimized plans (seeded multistart; flags are one-sided: "
                  "found <= reference * (1 + tol))"]
    lines.append(f"{'label':<18} {'perf':>8} {'ref':>6} {'flag':>8}   "
                 f"{'dk1':>6} {'dk2':>6} {'dk3':>6}  {'ref dk':<18} {'flag':>8}")
    opt_rows = {r.m: r for r in reference.REFERENCE_ROWS if r.kind == "opt"}
    reoptimized = {}
    for m in (1, 2, 3, 4):
        row = opt_rows[m]
        opts = OptimizerOptions(starts=args.starts, seed=args.seed)
        result = optimize_plan(geom, test, m, opts)
        rep = plan_report_row(f"Opt.{m} re-run", geom, result.plan, test)
        reoptimized[m] = rep.performance_measure
        perf_ok = rep.performance_measure <= row.perf * (1.0 + tol_perf)
        dk_ok = all(d <= r * (1.0 + tol_dk) for d, r in zip(rep.delta_k, row.dk))
        all_ok &= perf_ok and dk_ok
        dk = rep.delta_k
        ref_dk = "/".join(f"{v:.2f}" for v in row.dk)
        lines.append(f"{rep.label:<18} {rep.performance_measure:>8.4f} "
                     f"{row.perf:>6.2f} {_flag(perf_ok):>8}   "
                     f"{dk[0]:>6.3f} {dk[1]:>6.3f} {dk[2]:>6.3f}  "
                     f"{ref_dk:<18} {_flag(dk_ok):>8}")

    lines += ["", "claims"]
    for m in (2, 3, 4):
        ratio = evaluated[f"{m}x Test Conf."] / evaluated[f"Opt.{m} Conf."]
        ok = ratio >= 1.5
        all_ok &= ok
        lines.append(f"  improvement over repeated test pose, m={m}: "
                     f"{ratio:.2f}x ({_flag(ok)}, required >= 1.5)")
    for m in (2, 3, 4):
        gap = evaluated[f"{m}x Opt.1 Conf."] / evaluated[f"Opt.{m} Conf."] - 1.0
        ok = 0.15 <= gap <= 0.30
        all_ok &= ok
        lines.append(f"  repeated single-pose optimum penalty, m={m}: "
                     f"{gap:.1%} ({_flag(ok)}, expected 15%..30%)")

    lines += ["", "findings"]
    # live check of the test-row q3 sign ambiguity
    for sign, tag in ((-1.0, "-45"), (1.0, "+45")):
        pose = ExperimentPose(math.radians(60.0), sign * math.radians(45.0),
                              math.radians(-73.3))
        dk = covariance(geom, ExperimentPlan((pose,), 1.0), NoiseModel(1.0)).delta_k()
        lines.append(f"  test row with q3 = {tag} deg: dk = "
                     f"({dk[0]:.2f}, {dk[1]:.2f}, {dk[2]:.2f}) sigma")
    for note in reference.CONVENTION_FINDINGS:
        lines.append(f"  - {note}")

    lines += ["", f"overall: {'PASS' if all_ok else 'FAIL'}"]
    write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all_ok else EXIT_NUMERICAL


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors on exit code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stiffcal",
                     description="Measurement-pose design for joint-compliance "
                                 "calibration of a 3-link anthropomorphic arm.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="YAML config file (see README for the schema)")
        p.add_argument("--format", choices=("table", "csv"), default=None)
        p.add_argument("--out", default=None, help="write the report here "
                                                   "instead of stdout")

    p_eval = sub.add_parser("evaluate", help="criterion and accuracies of an "
                                             "explicit plan")
    add_common(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_opt = sub.add_parser("optimize", help="search m calibration poses "
                                            "minimizing the test-pose criterion")
    add_common(p_opt)
    p_opt.add_argument("--m", type=int, default=None, help="number of poses")
    p_opt.add_argument("--starts", type=int, default=None)
    p_opt.add_argument("--seed", type=int, default=None)
    p_opt.add_argument("--save-plan", default=None,
                       help="write the optimized plan as a reusable config file")
    p_opt.set_defaults(func=cmd_optimize)

    p_sim = sub.add_parser("simulate", help="Monte-Carlo validation of the "
                                            "analytic covariance and criterion")
    add_common(p_sim)
    p_sim.add_argument("--trials", type=int, default=None)
    p_sim.add_argument("--sigma", type=float, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_rep = sub.add_parser("reproduce-table1",
                           help="re-derive the bundled reference table and "
                                "flag each cell against the published values")
    p_rep.add_argument("--tolerance-perf", type=float, default=0.02)
    p_rep.add_argument("--tolerance-dk", type=float, default=0.05)
    p_rep.add_argument("--starts", type=int, default=None,
                       help="multistart count for the re-optimized rows")
    p_rep.add_argument("--seed", type=int, default=OptimizerOptions.seed)
    p_rep.add_argument("--out", default=None)
    p_rep.set_defaults(func=cmd_reproduce_table1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"stiffcal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"stiffcal: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnidentifiablePlan as exc:
        print(f"stiffcal: unidentifiable plan: {exc}", file=sys.stderr)
        return EXIT_UNIDENTIFIABLE
    except (DegenerateTestPose, NoConvergence, SingularConfiguration,
            NonPositiveForce, StiffcalError, np.linalg.LinAlgError) as exc:
        print(f"stiffcal: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry_point():
    sys.exit(main())
