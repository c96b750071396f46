"""Command line entry point.

Usage::

    pursuit solve     --config solve.json    [--out DIR] [--seed N]
    pursuit play      --config play.json     [--out DIR] [--seed N]
    pursuit copnumber --config copnum.json   [--out DIR] [--seed N]
    pursuit verify    --config default|pack.json [--out DIR]

Configs are JSON; space descriptions carry edge lengths as decimal strings.
Results are written as JSON with sorted keys and shortest round-trip float
formatting, so a rerun of the same config reproduces byte-identical output.
Exit codes: 0 success, 1 failed verification, 2 bad config or capacity.
"""

from __future__ import annotations

import argparse
import inspect
import json
import sys
from pathlib import Path

import numpy as np

from .arena import (
    builtin_strategies,
    export_gaps_csv,
    export_trajectory_jsonl,
    get_strategy,
    run_game,
)
from .errors import CapacityError, PursuitError, ConfigError
from .game import Agility, Position, agility_from_config, trajectory_value
from .solver import (
    cop_number_estimate,
    duration_value,
    limit_value,
    solve_finite,
    standard_value,
)
from .spaces import DEFAULT_POINT_BUDGET, build_net, space_from_config
from .verify import run_suite, suite_passed


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON ({path}): {exc}")


def _field(cfg: dict, key: str, path: str = "config"):
    if key not in cfg:
        raise ConfigError(f"missing field {path}.{key}")
    return cfg[key]


def _dump(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _net_from_config(cfg: dict):
    space = space_from_config(_field(cfg, "space"))
    h = float(_field(cfg, "net_h"))
    budget = int(cfg.get("point_budget", DEFAULT_POINT_BUDGET))
    return build_net(space, h, budget)


def _horizon(cfg: dict):
    """Returns (mode of horizon, N, T or None, agility or None)."""
    hz = _field(cfg, "horizon")
    n = int(_field(hz, "N", "config.horizon"))
    if "T" in hz:
        if "agility" in cfg:
            raise ConfigError("give either horizon.T or an agility, not both")
        T = float(hz["T"])
        if T <= 0:
            raise ConfigError("horizon.T must be positive")
        return n, T, Agility.uniform(T / n)
    agility = agility_from_config(_field(cfg, "agility"))
    if agility.length is not None and agility.length < n:
        raise ConfigError(
            f"agility provides {agility.length} steps but horizon.N is {n}"
        )
    return n, None, agility


def _starts(cfg: dict, k: int, net):
    starts = cfg.get("starts", "all")
    if starts == "all":
        return "all", None
    tuples = []
    for row in starts:
        tup = tuple(int(i) for i in row)
        if len(tup) != k + 1:
            raise ConfigError(f"start tuple {row} needs {k + 1} indices")
        if any(not 0 <= i < net.size for i in tup):
            raise ConfigError(f"start tuple {row} has out-of-range indices")
        tuples.append(tup)
    if not tuples:
        raise ConfigError("starts list is empty")
    return "explicit", tuples


def _values_block(values: np.ndarray, mode, tuples):
    out = {
        "shape": list(values.shape),
        "flat": [float(v) for v in values.reshape(-1)],
    }
    if mode == "explicit":
        out["per_start"] = [
            {"start": list(t), "value": float(values[t])} for t in tuples
        ]
    return out


def cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    net = _net_from_config(cfg)
    k = int(_field(cfg, "k"))
    mode = cfg.get("mode", "finite")
    tol = float(cfg.get("tol", 1e-9))
    n_max = int(cfg.get("N_max", 64))
    n, T, agility = _horizon(cfg)
    start_mode, tuples = _starts(cfg, k, net)

    convergence = []
    members = None
    policy_dump = None
    if mode == "finite":
        taus = agility.prefix(n)
        table, policy = solve_finite(
            net, k, taus, variant=cfg.get("variant", "endpoint"),
            store_policy=bool(cfg.get("store_policy", False)),
        )
        values = table.top
        if policy is not None:
            policy_dump = {
                str(m): {
                    "robber": [int(v) for v in policy.robber[m].reshape(-1)],
                    "cops": [
                        [int(v) for v in policy.cops[m][axis].reshape(-1)]
                        for axis in sorted(policy.cops[m])
                    ],
                }
                for m in sorted(policy.robber)
            }
    elif mode == "limit":
        if T is not None:
            res = duration_value(net, k, T, n, tol, n_max)
        else:
            res = limit_value(net, k, agility, tol, n_max)
        values = res.values
        convergence = [[int(N), float(d)] for N, d in res.log]
        taus = agility.prefix(res.achieved_N) if T is None else [T / res.achieved_N] * res.achieved_N
    elif mode == "standard":
        family_cfg = cfg.get("family")
        family = ([agility_from_config(f) for f in family_cfg]
                  if family_cfg else None)
        res = standard_value(net, k, family, tol, n_max)
        values = res.values
        members = [
            {
                "agility": desc,
                "achieved_N": lim.achieved_N,
                "gap": lim.gap,
                "converged": lim.converged,
                "log": [[int(N), float(d)] for N, d in lim.log],
            }
            for desc, lim in res.members
        ]
        convergence = [row for m in members for row in m["log"]]
        taus = agility.prefix(n)
    else:
        raise ConfigError(f"unknown solve mode {mode!r}")

    result = {
        "command": "solve",
        "config": cfg,
        "net": net.describe(),
        "k": k,
        "mode": mode,
        "tau_prefix": [float(t) for t in taus],
        "values": _values_block(values, start_mode, tuples),
        "worst_start": float(values.max()),
        "convergence": convergence,
    }
    if members is not None:
        result["members"] = members
    if policy_dump is not None:
        result["policy"] = policy_dump
    _dump(result, Path(args.out) / "solve_result.json")
    print(f"net: {net.size} points, covering radius {net.h:.6g}")
    print(f"worst-start value: {result['worst_start']:.17g}")
    if convergence:
        print("convergence (N, change):")
        for N, d in convergence:
            print(f"  {N:5d}  {d:.3e}")
    return 0


def _strategy_from_config(space, scfg, seed: int, path: str):
    name = _field(scfg, "name", path)
    params = dict(scfg.get("params", {}))
    catalog = builtin_strategies()
    if name in catalog:
        make = catalog[name]["make"]
        if "seed" in inspect.signature(make).parameters:
            params.setdefault("seed", seed)
    return get_strategy(space, name, **params)


def cmd_play(args) -> int:
    cfg = _load_config(args.config)
    space = space_from_config(_field(cfg, "space"))
    robber = _strategy_from_config(space, _field(cfg, "robber"), args.seed,
                                   "config.robber")
    cops = _strategy_from_config(space, _field(cfg, "cops"), args.seed,
                                 "config.cops")
    start_cfg = _field(cfg, "start")
    start = Position(
        space.point_from_json(_field(start_cfg, "robber", "config.start")),
        [space.point_from_json(p) for p in _field(start_cfg, "cops", "config.start")],
    )
    agility = agility_from_config(_field(cfg, "agility"))
    n_steps = int(_field(cfg, "N"))
    if agility.length is not None and agility.length < n_steps:
        raise ConfigError(
            f"agility provides {agility.length} steps but N is {n_steps}"
        )
    kappa = float(cfg.get("kappa", 1e-9))
    traj = run_game(space, robber, cops, start, agility, n_steps, kappa)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    export_trajectory_jsonl(space, traj, out / "trajectory.jsonl")
    export_gaps_csv(traj, out / "gaps.csv")
    value = trajectory_value(traj)
    print(f"steps played: {traj.steps}")
    if traj.captured:
        print(f"captured at step {traj.capture_step}")
    print(f"trajectory value: {value:.17g}")
    return 0


def cmd_copnumber(args) -> int:
    cfg = _load_config(args.config)
    net = _net_from_config(cfg)
    k_max = int(_field(cfg, "k_max"))
    theta = cfg.get("theta")
    family_cfg = cfg.get("family")
    family = ([agility_from_config(f) for f in family_cfg] if family_cfg else None)
    res = cop_number_estimate(
        net, k_max,
        theta=None if theta is None else float(theta),
        family=family,
        tol=float(cfg.get("tol", 1e-9)),
        N_max=int(cfg.get("N_max", 64)),
    )
    result = {
        "command": "copnumber",
        "config": cfg,
        "net": net.describe(),
        "estimate": res.estimate if res.estimate is not None else f"> {k_max}",
        "theta": res.theta,
        "per_k": [[int(k), float(v)] for k, v in res.per_k],
    }
    _dump(result, Path(args.out) / "copnumber.json")
    print(f"threshold: {res.theta:.17g}")
    for k, v in res.per_k:
        print(f"  k={k}: worst-start value {v:.17g}")
    print(f"cop number estimate: {res.label()}")
    return 0


def cmd_verify(args) -> int:
    if args.config == "default":
        instances = None
    else:
        cfg = _load_config(args.config)
        if cfg.get("pack") == "default":
            instances = None
        else:
            instances = _field(cfg, "instances")
    reports = run_suite(instances)
    for r in reports:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag}  {r.lemma:22s} {r.instance}  "
              f"violation={r.violation:.3e} tol={r.tolerance:g}")
    _dump([r.to_json() for r in reports], Path(args.out) / "verify_report.json")
    ok = suite_passed(reports)
    print("suite:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pursuit",
        description="Pursuit games on geodesic spaces: solve, play, estimate, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("solve", cmd_solve),
        ("play", cmd_play),
        ("copnumber", cmd_copnumber),
        ("verify", cmd_verify),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="JSON config path ('default' for verify)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized strategies")
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2
    except PursuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
