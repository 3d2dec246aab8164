"""Command-line front end.

Subcommands: certify, eta-bound, simulate, verify, shrink-input-set.
Each takes a config path or a bundled fixture name plus overriding
flags, writes a JSON report (and a trajectory CSV for simulate) into
the output directory, and exits 0 on a passing verdict, 1 on a failing
verdict, 2 on a configuration error, and 3 on a runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .abstraction import AugmentedRun, simulate_augmented
from .certificates import check_lmi_iqc, check_lmi_sine, max_feasible_alpha_iqc, max_feasible_alpha_sine
from .config import ExperimentConfig, load_config, resolve_eta
from .errors import (
    BadRange,
    DimensionMismatch,
    Diverged,
    EmptyResult,
    Infeasible,
    InputViolation,
    MisalignedSignal,
    NonFinite,
    NonSquare,
    NotPositiveDefinite,
    NotSymmetric,
    OutOfDomain,
    Overflow,
    ParseError,
    SchemaError,
    SymabsError,
)
from .interface import ALL_SPACE, BoxInputSet, input_margin, shrink_box
from .numerics import DEFAULT_TOL
from .verify import (
    draw_box_point,
    draw_signal,
    lyapunov_decrease_check,
    trial_rng,
    verify_gps_trajectory,
    verify_simulation_relation,
)

_CONFIG_ERRORS = (
    ParseError,
    SchemaError,
    DimensionMismatch,
    BadRange,
    NonSquare,
    NotSymmetric,
    NotPositiveDefinite,
    NonFinite,
)

_RUNTIME_ERRORS = (
    Diverged,
    MisalignedSignal,
    OutOfDomain,
    Overflow,
    InputViolation,
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _write_report(out_dir: Path, report: dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "report.json"
    path.write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    return path


def write_trajectory_csv(path: Path, run: AugmentedRun) -> None:
    """Trajectory CSV with a fixed column layout at 17 significant digits."""
    n = run.x1_states.shape[1]
    m = run.u_values.shape[1]
    header = (
        ["t"]
        + [f"x1_{i + 1}" for i in range(n)]
        + [f"phi_{i + 1}" for i in range(n)]
        + [f"x2_{i + 1}" for i in range(n)]
        + [f"u_{i + 1}" for i in range(m)]
        + [f"v_{i + 1}" for i in range(m)]
        + ["y_err"]
    )
    lines = [",".join(header)]
    for i in range(run.times.shape[0]):
        row = (
            [run.times[i]]
            + list(run.x1_states[i])
            + list(run.phi_states[i])
            + list(run.x2_states[i])
            + list(run.u_values[i])
            + list(run.v_values[i])
            + [run.y_err[i]]
        )
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _constants_dict(cfg: ExperimentConfig, eta: float) -> dict:
    c = cfg.constants(eta)
    return {f.name: getattr(c, f.name) for f in dataclasses.fields(c)}


def _certificate_verdict(cfg: ExperimentConfig, tol: float) -> dict:
    cert = cfg.certificate()
    if cfg.family == "sine":
        verdict = check_lmi_sine(cert, np.array(cfg.A), tol)
        try:
            boundary = max_feasible_alpha_sine(
                np.array(cfg.P), np.array(cfg.R), np.array(cfg.A), cfg.m_gain, tol
            )
        except Infeasible:
            boundary = None
    else:
        sys_model = cfg.system()
        verdict = check_lmi_iqc(cert, sys_model, tol)
        try:
            boundary = max_feasible_alpha_iqc(
                np.array(cfg.P), np.array(cfg.L), cert.M, sys_model, tol
            )
        except Infeasible:
            boundary = None
    return {
        "holds": verdict.holds,
        "lambda_max": verdict.lambda_max,
        "alpha": cfg.alpha,
        "alpha_feasibility_boundary": boundary,
    }


def _shrunk_inputs(cfg: ExperimentConfig, eta: float):
    consts = cfg.constants(eta)
    margin = input_margin(cfg.gain_matrix(), consts.K1, eta)
    return consts, margin, shrink_box(cfg.input_set(), margin)


def cmd_certify(cfg: ExperimentConfig, args) -> tuple[int, dict]:
    verdict = _certificate_verdict(cfg, args.tol)
    report = {"command": "certify", "certificate": verdict}
    status = "holds" if verdict["holds"] else "fails"
    print(
        f"certificate {status}: lambda_max = {_fmt(verdict['lambda_max'])}"
        f" at alpha = {_fmt(cfg.alpha)}"
    )
    if verdict["alpha_feasibility_boundary"] is not None:
        print(f"alpha feasibility boundary = {_fmt(verdict['alpha_feasibility_boundary'])}")
    return (0 if verdict["holds"] else 1), report


def cmd_eta_bound(cfg: ExperimentConfig, args) -> tuple[int, dict]:
    eta, bound, thm = resolve_eta(cfg, args.theorem)
    report = {
        "command": "eta-bound",
        "theorem": thm,
        "eta_bound": bound,
        "eta": eta,
        "epsilon": cfg.epsilon,
        "constants": _constants_dict(cfg, eta),
    }
    print(f"theorem {thm} admissible lattice radius: {_fmt(bound)}")
    return 0, report


def cmd_shrink(cfg: ExperimentConfig, args) -> tuple[int, dict]:
    eta, _, thm = resolve_eta(cfg, args.theorem)
    try:
        consts, margin, shrunk = _shrunk_inputs(cfg, eta)
    except EmptyResult as exc:
        print(f"input set is empty after shrinking: {exc}")
        return 1, {"command": "shrink-input-set", "empty": True, "reason": str(exc)}
    report = {
        "command": "shrink-input-set",
        "eta": eta,
        "theorem": thm,
        "margin_r": margin,
        "K1": consts.K1,
        "abstract_input_set": (
            "all"
            if not isinstance(shrunk, BoxInputSet)
            else {"lower": shrunk.lower, "upper": shrunk.upper}
        ),
    }
    print(f"margin r = {_fmt(margin)}")
    if isinstance(shrunk, BoxInputSet):
        print(f"abstract input box: lower = {shrunk.lower.tolist()}, upper = {shrunk.upper.tolist()}")
    else:
        print("abstract input set: unconstrained")
    return 0, report


def cmd_simulate(cfg: ExperimentConfig, args) -> tuple[int, dict]:
    eta, bound, thm = resolve_eta(cfg, args.theorem)
    consts, margin, shrunk = _shrunk_inputs(cfg, eta)
    if not isinstance(shrunk, BoxInputSet):
        raise SchemaError(["input_set: simulate requires a bounded input set"])
    rng = trial_rng(cfg.seed, 0)
    x0 = draw_box_point(rng, cfg.initial_box())
    sig = draw_signal(rng, shrunk, cfg.dwell, cfg.horizon)
    run = simulate_augmented(
        cfg.system(),
        cfg.interface(),
        x0,
        sig,
        cfg.lattice_params(eta),
        cfg.horizon,
        cfg.step,
        input_box=cfg.input_set(),
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "trajectory.csv"
    write_trajectory_csv(csv_path, run)
    max_err = float(np.max(run.y_err))
    passed = max_err <= cfg.epsilon
    report = {
        "command": "simulate",
        "seed": cfg.seed,
        "eta": eta,
        "eta_bound": bound,
        "theorem": thm,
        "epsilon": cfg.epsilon,
        "max_y_err": max_err,
        "passed": passed,
        "margin_r": margin,
        "constants": _constants_dict(cfg, eta),
        "abstract_input_set": {"lower": shrunk.lower, "upper": shrunk.upper},
        "csv": csv_path.name,
        "samples": int(run.times.shape[0]),
    }
    print(f"max output gap = {_fmt(max_err)} over {run.times.shape[0]} samples -> {csv_path}")
    return (0 if passed else 1), report


def cmd_verify(cfg: ExperimentConfig, args) -> tuple[int, dict]:
    eta, bound, thm = resolve_eta(cfg, args.theorem)
    consts, margin, shrunk = _shrunk_inputs(cfg, eta)
    if not isinstance(shrunk, BoxInputSet):
        raise SchemaError(["input_set: verify requires a bounded input set"])
    cert_verdict = _certificate_verdict(cfg, args.tol)
    eta_ok = eta <= bound
    relation = verify_simulation_relation(
        cfg.system(),
        cfg.interface(),
        cfg.lattice_params(eta),
        cfg.epsilon,
        shrunk,
        cfg.initial_box(),
        cfg.trials,
        cfg.seed,
        cfg.horizon,
        cfg.step,
        cfg.dwell,
        input_box=cfg.input_set(),
        certified_by=f"theorem {thm}" if eta_ok and cert_verdict["holds"] else None,
    )
    gps_reports = [verify_gps_trajectory(r, consts, args.tol * 1e6) for r in relation.runs]
    P = np.array(cfg.P)
    lyap_reports = [lyapunov_decrease_check(r, P, consts) for r in relation.runs]
    note = None
    if relation.passed and not (eta_ok and cert_verdict["holds"]):
        note = (
            "empirical pass without a full certificate: the bounds are"
            " sufficient, not necessary"
        )
    report = {
        "command": "verify",
        "certificate": cert_verdict,
        "eta": {"value": eta, "bound": bound, "theorem": thm, "satisfied": eta_ok},
        "constants": _constants_dict(cfg, eta),
        "margin_r": margin,
        "abstract_input_set": {"lower": shrunk.lower, "upper": shrunk.upper},
        "relation": {
            "passed": relation.passed,
            "epsilon": relation.epsilon,
            "max_err": relation.max_err,
            "argmax_time": relation.argmax_time,
            "trials": relation.trials,
            "seed": relation.seed,
            "per_trial_max_err": relation.per_trial_max_err,
            "input_violations": relation.input_violations,
            "certified_by": relation.certified_by,
        },
        "gps": {
            "all_passed": all(g.passed for g in gps_reports),
            "worst_margin": min((g.worst_margin for g in gps_reports), default=None),
        },
        "lyapunov": {
            "all_passed": all(l.passed for l in lyap_reports),
            "min_satisfied_fraction": min(
                (l.satisfied_fraction for l in lyap_reports), default=None
            ),
            "worst_violation": max((l.worst_violation for l in lyap_reports), default=None),
        },
        "note": note,
    }
    state = "pass" if relation.passed else "fail"
    print(
        f"relation {state}: max output gap {_fmt(relation.max_err)}"
        f" (epsilon {_fmt(cfg.epsilon)}) over {relation.trials} trials"
    )
    if note:
        print(f"note: {note}")
    return (0 if relation.passed else 1), report


_COMMANDS = {
    "certify": cmd_certify,
    "eta-bound": cmd_eta_bound,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "shrink-input-set": cmd_shrink,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symabs",
        description="Lattice abstractions with certificate-backed interfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="config file path or bundled fixture name")
        p.add_argument("--seed", type=int, default=None, help="64-bit experiment seed")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--step", type=float, default=None)
        p.add_argument("--horizon", type=float, default=None)
        p.add_argument("--theorem", type=int, choices=(2, 3, 4), default=None)
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    return parser


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.step is not None:
        updates["step"] = args.step
    if args.horizon is not None:
        updates["horizon"] = args.horizon
    return dataclasses.replace(cfg, **updates) if updates else cfg


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        code, report = _COMMANDS[args.command](cfg, args)
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except _RUNTIME_ERRORS as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    except SymabsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    _write_report(Path(args.out), report)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
