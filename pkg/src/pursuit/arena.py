"""Continuous strategies executed on the true space (not the net).

A strategy is a step-length-dependent Markov rule: it sees the current
position, the step duration and the step index, and returns destination
point(s) within the travel budget.  ``run_game`` alternates moves with the
robber first, revealing his destination before the cops move, and records
the trajectory.

Built-in strategies keep a relative 1e-12 safety margin below the budget
so that floating-point rounding can never trip the budget validator; a
move that should exactly reach a target still snaps onto it whenever the
measured distance is within the documented 1e-9 compliance tolerance.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import StrategyFaultError, UnknownStrategyError
from .game import Agility, Position, Trajectory
from .spaces import BallSpace, ProductSpace, Space, SphereSpace

BUDGET_TOL = 1e-9
TRAVEL_GUARD = 1e-12


@dataclass
class Strategy:
    """Named decision rule for one side.

    ``move(position, t, n)`` returns the robber's destination point
    (side ``"robber"``) or a tuple of k cop destinations (side ``"cops"``),
    each within distance ``t`` of the mover (tolerance 1e-9).
    """

    name: str
    side: str
    move: object


def _guarded(t: float) -> float:
    return t * (1.0 - TRAVEL_GUARD)


def _reach_or_step(space: Space, frm, target, t: float):
    """Snap onto ``target`` when it is within the budget tolerance,
    otherwise advance the guarded budget along the geodesic."""
    if space.distance(frm, target) <= t + BUDGET_TOL:
        return target
    return space.step_toward(frm, target, _guarded(t))


# ---------------------------------------------------------------------------
# built-in strategies


def make_follower_cop(space: Space) -> Strategy:
    """Each cop moves straight toward the revealed robber position along a
    geodesic, covering min(t, distance); the gap never increases."""

    def move(pos: Position, t: float, n: int):
        return tuple(
            _reach_or_step(space, c, pos.robber, t) for c in pos.cops
        )

    return Strategy("follower_cop", "cops", move)


def make_stand_still_cops(space: Space) -> Strategy:
    """Cops that never move (baseline opponent)."""

    def move(pos: Position, t: float, n: int):
        return tuple(pos.cops)

    return Strategy("stand_still_cops", "cops", move)


def make_stand_still_robber(space: Space) -> Strategy:
    """Robber that never moves (baseline opponent)."""

    def move(pos: Position, t: float, n: int):
        return pos.robber

    return Strategy("stand_still_robber", "robber", move)


def make_antipodal_robber(space: Space) -> Strategy:
    """Sphere evader: head for the point antipodal to the nearest cop,
    snapping onto it exactly whenever it is reachable this step."""
    if not isinstance(space, SphereSpace):
        raise UnknownStrategyError("antipodal_robber needs a sphere space")

    def move(pos: Position, t: float, n: int):
        dists = [space.distance(pos.robber, c) for c in pos.cops]
        nearest = pos.cops[int(np.argmin(dists))]
        target = -np.asarray(nearest, dtype=float)
        return _reach_or_step(space, pos.robber, target, t)

    return Strategy("antipodal_robber", "robber", move)


def make_radial_cop(space: Space) -> Strategy:
    """Ball pursuer: if a point of the center-to-robber segment is within
    reach, take the one closest to the robber; otherwise move straight
    toward the center."""
    if not isinstance(space, BallSpace):
        raise UnknownStrategyError("radial_cop needs a ball space")

    def chase_one(c, robber, t):
        c = np.asarray(c, float)
        r = np.asarray(robber, float)
        t_eff = _guarded(t)
        rn = float(np.linalg.norm(r))
        if rn == 0.0:
            target = np.zeros(space.dimension)
            return _reach_or_step(space, c, target, t)
        rhat = r / rn
        proj = float(np.dot(rhat, c))
        disc = proj * proj - (float(np.dot(c, c)) - t_eff * t_eff)
        if disc >= 0.0:
            root = np.sqrt(disc)
            lo, hi = max(0.0, proj - root), min(rn, proj + root)
            if lo <= hi:
                return hi * rhat
        return space.step_toward(c, np.zeros(space.dimension), t_eff)

    def move(pos: Position, t: float, n: int):
        return tuple(chase_one(c, pos.robber, t) for c in pos.cops)

    return Strategy("radial_cop", "cops", move)


def lift_slope(p: float, eps: float) -> float:
    """Smallest practical slope T with T - (T^p - 1)^(1/p) < eps (p > 1)."""
    if p <= 1:
        raise UnknownStrategyError("cylinder lift needs exponent p > 1")
    if eps <= 0:
        raise UnknownStrategyError("cylinder lift needs eps > 0")
    if p == 2.0:
        T = (1.0 + eps * eps) / (2.0 * eps)
    else:
        def slack(T):
            return T - (T**p - 1.0) ** (1.0 / p)

        lo, hi = 1.0, 2.0
        while slack(hi) >= eps:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if slack(mid) >= eps:
                lo = mid
            else:
                hi = mid
        T = hi
    return T * (1.0 + 1e-9)


def make_cylinder_lift_cop(space: Space, eps: float = 0.1) -> Strategy:
    """Product-space pursuer: follows the robber's base coordinate while
    climbing the fiber at a constant slope, chosen so the climb costs less
    than ``eps`` extra path length per unit of fiber gained."""
    if not isinstance(space, ProductSpace):
        raise UnknownStrategyError("cylinder_lift_cop needs a product space")
    slope = lift_slope(space.p, eps)

    def chase_one(c, robber, t):
        t_eff = _guarded(t)
        fiber_gap = float(robber[1]) - float(c[1])
        climb = min(t_eff / slope, abs(fiber_gap))
        new_s = float(c[1]) + np.sign(fiber_gap) * climb
        if space.p == 2.0:
            base_budget = np.sqrt(max(0.0, t_eff * t_eff - climb * climb))
        else:
            base_budget = max(0.0, t_eff**space.p - climb**space.p) ** (1.0 / space.p)
        new_base = space.base.step_toward(c[0], robber[0], base_budget)
        return (new_base, new_s)

    def move(pos: Position, t: float, n: int):
        return tuple(chase_one(c, pos.robber, t) for c in pos.cops)

    strat = Strategy("cylinder_lift_cop", "cops", move)
    strat.slope = slope
    return strat


def make_greedy_robber(space: Space, samples: int = 32, seed: int = 0) -> Strategy:
    """Heuristic evader: probes a fixed number of sampled destinations within
    the step budget and keeps the one maximizing the distance to the nearest
    cop.  This is a plain local search, not a boundary-approach evader; it
    carries no guarantee of avoiding capture."""
    rng = np.random.default_rng(seed)

    def move(pos: Position, t: float, n: int):
        t_eff = _guarded(t)
        candidates = [pos.robber]
        for _ in range(samples):
            candidates.append(space.step_toward(pos.robber, space.random_point(rng), t_eff))
        scores = [
            min(space.distance(cand, c) for c in pos.cops) for cand in candidates
        ]
        return candidates[int(np.argmax(scores))]

    return Strategy("greedy_robber", "robber", move)


_CATALOG = {
    "follower_cop": ("cops", make_follower_cop, "no parameters"),
    "stand_still_cops": ("cops", make_stand_still_cops, "no parameters"),
    "stand_still_robber": ("robber", make_stand_still_robber, "no parameters"),
    "antipodal_robber": ("robber", make_antipodal_robber,
                         "no parameters; sphere spaces only"),
    "radial_cop": ("cops", make_radial_cop, "no parameters; ball spaces only"),
    "cylinder_lift_cop": ("cops", make_cylinder_lift_cop,
                          "eps: extra path length per unit fiber (default 0.1); "
                          "product spaces with p > 1 only"),
    "greedy_robber": ("robber", make_greedy_robber,
                      "samples: candidate moves per step (default 32); "
                      "seed: sampling seed (default 0)"),
}


def builtin_strategies() -> dict:
    """Catalog of named strategy constructors with parameter docs."""
    return {
        name: {"side": side, "make": make, "params": params}
        for name, (side, make, params) in _CATALOG.items()
    }


def get_strategy(space: Space, name: str, **params) -> Strategy:
    """Instantiate a built-in strategy for one game."""
    if name not in _CATALOG:
        raise UnknownStrategyError(
            f"unknown strategy {name!r}; valid names: {sorted(_CATALOG)}"
        )
    _, make, _ = _CATALOG[name]
    return make(space, **params)


# ---------------------------------------------------------------------------
# game loop


def _as_move(strategy):
    return strategy.move if isinstance(strategy, Strategy) else strategy


def run_game(space: Space, robber, cops, start: Position, tau: Agility,
             N: int, kappa: float = 1e-9) -> Trajectory:
    """Play ``N`` steps on the true space: the robber moves, his destination
    is revealed, then each cop moves; stops early when some cop comes within
    ``kappa`` of the robber.  Raises :class:`StrategyFaultError` when a move
    exceeds its budget beyond the 1e-9 compliance tolerance."""
    if N < 1:
        raise ValueError("need at least one step")
    rob_move = _as_move(robber)
    cop_move = _as_move(cops)
    traj = Trajectory(space, kappa=kappa)
    pos = start
    traj.append(pos, 0.0)
    if min(space.distance(pos.robber, c) for c in pos.cops) <= kappa:
        traj.captured = True
        traj.capture_step = 0
        return traj
    for n in range(1, N + 1):
        t = tau.tau(n)
        r_new = rob_move(pos, t, n)
        moved = space.distance(pos.robber, r_new)
        if moved > t + BUDGET_TOL:
            raise StrategyFaultError("robber", n, f"moved {moved} > budget {t}")
        revealed = Position(r_new, pos.cops)
        c_new = tuple(cop_move(revealed, t, n))
        if len(c_new) != pos.k:
            raise StrategyFaultError("cops", n, "wrong number of cop moves")
        for c_old, c in zip(pos.cops, c_new):
            moved = space.distance(c_old, c)
            if moved > t + BUDGET_TOL:
                raise StrategyFaultError("cops", n, f"moved {moved} > budget {t}")
        pos = Position(r_new, c_new)
        traj.append(pos, t)
        if min(space.distance(pos.robber, c) for c in pos.cops) <= kappa:
            traj.captured = True
            traj.capture_step = n
            return traj
    return traj


# ---------------------------------------------------------------------------
# trajectory export


def export_trajectory_jsonl(space: Space, traj: Trajectory, path) -> None:
    """One JSON record per recorded step: index, duration, coordinates, gap."""
    with open(path, "w") as fh:
        for n, (pos, t, gap) in enumerate(zip(traj.positions, traj.taus, traj.gaps())):
            rec = {
                "n": n,
                "t": t,
                "robber": space.point_to_json(pos.robber),
                "cops": [space.point_to_json(c) for c in pos.cops],
                "gap": gap,
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def export_gaps_csv(traj: Trajectory, path) -> None:
    """Flat n,t,gap series for plotting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "t", "gap"])
        for n, (t, gap) in enumerate(zip(traj.taus, traj.gaps())):
            writer.writerow([n, repr(t), repr(gap)])
