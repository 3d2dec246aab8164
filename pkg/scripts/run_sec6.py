#!/usr/bin/env python3
"""End-to-end run of the bundled two-dimensional demo configuration.

Chains the whole pipeline: certificate check, admissible radius, input
set shrinking, one recorded trajectory, and the randomized relation
check with its per-trial bound verdicts.  Everything lands in --out.
"""

import argparse
import dataclasses
import json
from pathlib import Path

import numpy as np

from symabs.certificates import check_lmi_sine, max_feasible_alpha_sine
from symabs.cli import write_trajectory_csv
from symabs.config import load_config, resolve_eta
from symabs.interface import input_margin, shrink_box
from symabs.verify import (
    draw_box_point,
    draw_signal,
    lyapunov_decrease_check,
    trial_rng,
    verify_gps_trajectory,
    verify_simulation_relation,
)
from symabs.abstraction import simulate_augmented


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/sec6", help="output directory")
    ap.add_argument("--seed", type=int, default=None, help="override the config seed")
    ap.add_argument("--trials", type=int, default=None)
    args = ap.parse_args()

    cfg = load_config("example_sec6")
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.trials is not None:
        cfg = dataclasses.replace(cfg, trials=args.trials)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    verdict = check_lmi_sine(cfg.certificate(), np.array(cfg.A))
    boundary = max_feasible_alpha_sine(
        np.array(cfg.P), np.array(cfg.R), np.array(cfg.A), cfg.m_gain
    )
    print(f"certificate at rate {cfg.alpha}: holds={verdict.holds} "
          f"(lambda_max {verdict.lambda_max:.6f}, boundary {boundary:.6f})")

    eta, bound, thm = resolve_eta(cfg)
    consts = cfg.constants(eta)
    print(f"lattice radius {eta} against the theorem-{thm} bound {bound:.6f}")

    r = input_margin(cfg.gain_matrix(), consts.K1, eta)
    uprime = shrink_box(cfg.input_set(), r)
    print(f"margin r = {r:.6f}, abstract inputs in "
          f"[{uprime.lower[0]:.4f}, {uprime.upper[0]:.4f}]^2")

    rng = trial_rng(cfg.seed, 0)
    x0 = draw_box_point(rng, cfg.initial_box())
    sig = draw_signal(rng, uprime, cfg.dwell, cfg.horizon)
    run = simulate_augmented(
        cfg.system(), cfg.interface(), x0, sig, cfg.lattice_params(eta),
        cfg.horizon, cfg.step, input_box=cfg.input_set(),
    )
    write_trajectory_csv(out / "trajectory.csv", run)
    print(f"recorded trial 0: max output gap {float(np.max(run.y_err)):.6f} "
          f"-> {out / 'trajectory.csv'}")

    relation = verify_simulation_relation(
        cfg.system(), cfg.interface(), cfg.lattice_params(eta), cfg.epsilon,
        uprime, cfg.initial_box(), cfg.trials, cfg.seed, cfg.horizon,
        cfg.step, cfg.dwell, input_box=cfg.input_set(),
    )
    gps = [verify_gps_trajectory(rn, consts, 1e-3) for rn in relation.runs]
    lyap = [lyapunov_decrease_check(rn, np.array(cfg.P), consts) for rn in relation.runs]

    report = {
        "certificate": {
            "holds": verdict.holds,
            "lambda_max": verdict.lambda_max,
            "alpha": cfg.alpha,
            "alpha_feasibility_boundary": boundary,
        },
        "eta": {"value": eta, "bound": bound, "theorem": thm},
        "margin_r": r,
        "abstract_input_set": {
            "lower": uprime.lower.tolist(),
            "upper": uprime.upper.tolist(),
        },
        "constants": {
            f.name: getattr(consts, f.name) for f in dataclasses.fields(consts)
        },
        "relation": {
            "passed": relation.passed,
            "max_err": relation.max_err,
            "epsilon": relation.epsilon,
            "trials": relation.trials,
            "seed": relation.seed,
            "per_trial_max_err": relation.per_trial_max_err,
        },
        "gps_all_passed": all(g.passed for g in gps),
        "gps_worst_margin": min(g.worst_margin for g in gps),
        "lyapunov_all_passed": all(l.passed for l in lyap),
        "lyapunov_min_fraction": min(l.satisfied_fraction for l in lyap),
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"relation over {relation.trials} trials: passed={relation.passed} "
          f"(max output gap {relation.max_err:.6f} vs epsilon {cfg.epsilon})")
    print(f"report -> {out / 'report.json'}")
    return 0 if relation.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
