"""Certification suite: every solver inequality checked on small instances.

Each check solves tiny net games exhaustively and measures the worst
violation of one inequality:

* ``L1-equality``        endpoint and running-minimum recursions coincide
* ``step-monotone``      values never increase when the horizon grows
* ``pos-continuity``     |value difference| <= 2 * position distance
* ``agility-continuity`` |value difference| <= 2 * schedule l1 distance
* ``subdivision-monotone`` splitting a step never hurts the robber
* ``volatile-sandwich``  perturbed values bracket the plain value within
                         twice the accumulated adversary radius
* ``minmax-gap``         coarse-policy cross-evaluation gap <= 4 * radius
* ``oracle-equivalence`` the layered solver equals a memoization-free
                         exhaustive game-tree search

The default instance pack uses dyadic edge lengths and spacings so the
exact checks run on exactly representable arithmetic; tolerances are 0 for
the exact inequalities and 1e-9 over the stated bound for the continuity
checks (analytic-space matrices carry rounding).
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConfigError
from .game import Agility, subdivide, trajectory_value
from .solver import (
    Perturbation,
    Policy,
    policy_playout,
    solve_finite,
    solve_volatile,
)
from .spaces import MetricGraphSpace, Net, build_net, space_from_config

SUITE_NET_LIMIT = 12
SUITE_K_LIMIT = 2
SUITE_N_LIMIT = 6
CONTINUITY_TOL = 1e-9

LEMMA_IDS = (
    "L1-equality",
    "step-monotone",
    "pos-continuity",
    "agility-continuity",
    "subdivision-monotone",
    "volatile-sandwich",
    "minmax-gap",
    "oracle-equivalence",
)


@dataclass
class LemmaReport:
    lemma: str
    instance: str
    violation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.violation <= self.tolerance

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "instance": self.instance,
            "violation": self.violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


# ---------------------------------------------------------------------------
# independent oracle


def exhaustive_value(net: Net, k: int, taus, r: int, cops,
                     variant: str = "endpoint") -> float:
    """Memoization-free exhaustive minimax over the net game tree.

    Kept deliberately independent of the layered solver: plain recursion
    over reach lists recomputed from the distance matrix.
    """
    D = net.matrix
    P = net.size
    taus = list(taus)
    slack = 1e-12

    def reach(i, t):
        return [j for j in range(P) if D[i, j] <= t + slack]

    def rec(r, cops, m):
        d0 = min(D[r, c] for c in cops)
        if m == 0:
            return d0
        t = taus[len(taus) - m]
        best = -math.inf
        for rn in reach(r, t):
            worst = math.inf
            for cn in itertools.product(*[reach(c, t) for c in cops]):
                v = rec(rn, cn, m - 1)
                if v < worst:
                    worst = v
            if worst > best:
                best = worst
        if variant == "intermediate":
            best = min(d0, best)
        return best

    return rec(int(r), tuple(int(c) for c in cops), len(taus))


def random_oracle_instances(count: int = 20, seed: int = 0,
                            node_cap: int = 120_000) -> list:
    """Randomized small instances (net <= 6, k <= 2, N <= 3) whose exhaustive
    tree stays below ``node_cap`` nodes."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        shape = rng.choice(["path", "cycle", "star"])
        if shape == "path":
            n_edges = int(rng.integers(1, 3))
            verts = [f"v{i}" for i in range(n_edges + 1)]
            edges = [
                (verts[i], verts[i + 1], float(rng.uniform(0.5, 1.5)))
                for i in range(n_edges)
            ]
        elif shape == "cycle":
            half = float(rng.uniform(0.5, 1.5))
            verts = ["a", "b"]
            edges = [("a", "b", half), ("a", "b", half)]
        else:
            verts = ["c", "x", "y", "z"]
            edges = [("c", w, float(rng.uniform(0.5, 1.2))) for w in "xyz"]
        space = MetricGraphSpace(verts, edges)
        total = space.total_length
        net = build_net(space, total / float(rng.uniform(1.5, 3.0)))
        if net.size > 6:
            continue
        k = int(rng.integers(1, 3))
        N = int(rng.integers(1, 4))
        taus = [float(rng.uniform(0.8, 2.2) * net.h) for _ in range(N)]
        worst_reach = max(
            int((net.matrix[i] <= t + 1e-12).sum())
            for i in range(net.size)
            for t in taus
        )
        if (worst_reach ** (k + 1)) ** N > node_cap:
            continue
        out.append((net, k, taus))
    return out


# ---------------------------------------------------------------------------
# coarse-policy cross evaluation


def _subnet_indices(net: Net, eps: float) -> list:
    """Greedy subset whose covering radius over the net is at most ``eps``."""
    chosen = []
    for i in range(net.size):
        if not chosen or min(net.matrix[i, j] for j in chosen) > eps:
            chosen.append(i)
    return chosen


def _coarse_to_fine(net: Net, coarse) -> list:
    if isinstance(coarse, Net):
        try:
            return [net.index_of(p) for p in coarse.points]
        except Exception as exc:
            raise ConfigError(
                f"coarse net is not a subset of the fine net: {exc}"
            ) from exc
    idx = [int(i) for i in coarse]
    if len(set(idx)) != len(idx) or any(not 0 <= i < net.size for i in idx):
        raise ConfigError("coarse indices must be distinct fine-net indices")
    return idx


def _subnet(net: Net, indices) -> Net:
    pts = [net.points[i] for i in indices]
    matrix = net.matrix[np.ix_(indices, indices)].copy()
    return Net(net.space, pts, net.h, matrix, requested_h=net.h)


@dataclass
class _LiftedPolicy:
    """Coarse-net policy replayed on the fine net: positions round to the
    nearest coarse member, moves head for the coarse target within budget."""

    net: Net
    fine_of: list  # coarse index -> fine index
    policy: Policy
    side: str

    def __post_init__(self):
        D = self.net.matrix
        cols = np.asarray(self.fine_of)
        sub = D[:, cols]
        self.round_to = cols[np.argmin(sub, axis=1)]  # fine -> fine (coarse member)
        self.coarse_idx = {f: c for c, f in enumerate(self.fine_of)}

    def _advance(self, cur: int, target_fine: int, t: float) -> int:
        D = self.net.matrix
        feasible = np.nonzero(D[cur] <= t + 1e-12)[0]
        return int(feasible[np.argmin(D[feasible, target_fine])])

    def move(self, pos, t, n):
        net = self.net
        m = self.policy.N - n + 1
        cops_f = tuple(net.index_of(c) for c in pos.cops)
        cops_c = tuple(self.coarse_idx[int(self.round_to[c])] for c in cops_f)
        r_f = net.index_of(pos.robber)
        r_c = self.coarse_idx[int(self.round_to[r_f])]
        if self.side == "robber":
            target = self.fine_of[self.policy.robber_move(m, (r_c, *cops_c))]
            return net.points[self._advance(r_f, target, t)]
        moves = self.policy.cop_moves(m, r_c, cops_c)
        return tuple(
            net.points[self._advance(c_f, self.fine_of[j], t)]
            for c_f, j in zip(cops_f, moves)
        )


@dataclass
class ProbeResult:
    gap: float
    eps: float
    upper: np.ndarray
    lower: np.ndarray


def minmax_gap_probe(net: Net, k: int, tau, eps_schedule, N: int,
                     coarse=None, kappa: float = 0.0) -> ProbeResult:
    """Cross-evaluate optimal fine-net policies against policies solved on a
    coarse sub-net and lifted back onto the fine net.

    ``upper`` plays the fine-optimal robber against the lifted cops,
    ``lower`` the lifted robber against the fine-optimal cops; the reported
    gap is the worst ``upper - lower`` over all start tuples.  Contract:
    the gap stays within 4x the coarse rounding radius plus fine-net slack.
    """
    taus = tau.prefix(N) if isinstance(tau, Agility) else [float(t) for t in tau][:N]
    if np.isscalar(eps_schedule):
        eps_list = [float(eps_schedule)] * N
    else:
        eps_list = [float(e) for e in eps_schedule]
        if len(eps_list) < N:
            eps_list = eps_list + [eps_list[-1]] * (N - len(eps_list))
    eps_max = max(eps_list)
    if coarse is not None:
        fine_of = sorted(_coarse_to_fine(net, coarse))
        per_step_sets = {e: fine_of for e in set(eps_list)}
    else:
        per_step_sets = {e: _subnet_indices(net, e) for e in set(eps_list)}
    if len(per_step_sets) != 1:
        raise ConfigError("per-step coarse schedules need a constant radius")

    _, fine_policy = solve_finite(net, k, taus, store_policy=True)
    fine_of = per_step_sets[eps_list[0]]
    sub = _subnet(net, fine_of)
    _, coarse_policy = solve_finite(sub, k, taus, store_policy=True)
    lifted_rob = _LiftedPolicy(net, fine_of, coarse_policy, "robber")
    lifted_cop = _LiftedPolicy(net, fine_of, coarse_policy, "cops")

    shape = (net.size,) * (k + 1)
    upper = np.empty(shape)
    lower = np.empty(shape)
    for tup in itertools.product(range(net.size), repeat=k + 1):
        upper[tup] = trajectory_value(
            policy_playout(net, fine_policy, lifted_cop.move, tup, taus, kappa)
        )
        lower[tup] = trajectory_value(
            policy_playout(net, lifted_rob.move, fine_policy, tup, taus, kappa)
        )
    return ProbeResult(float((upper - lower).max()), eps_max, upper, lower)


# ---------------------------------------------------------------------------
# lemma batteries


def _tuple_pos_distance(D: np.ndarray, k: int) -> np.ndarray:
    """max over coordinates of D, between all position tuples; shape
    (P^(k+1), P^(k+1))."""
    P = D.shape[0]
    size = P ** (k + 1)
    out = np.zeros((size, size))
    for axis in range(k + 1):
        rep_in = P ** (k - axis)
        rep_out = P**axis
        idx = np.tile(np.repeat(np.arange(P), rep_in), rep_out)
        out = np.maximum(out, D[np.ix_(idx, idx)])
    return out


def _violation_l1_equality(net, inst) -> float:
    a, _ = solve_finite(net, inst["k"], inst["taus"], store_layers=True)
    b, _ = solve_finite(net, inst["k"], inst["taus"], variant="intermediate",
                        store_layers=True)
    return max(
        float(np.abs(a.layer(m) - b.layer(m)).max()) for m in range(len(inst["taus"]) + 1)
    )


def _violation_step_monotone(net, inst) -> float:
    taus = inst["taus"]
    worst = 0.0
    for M in range(1, len(taus)):
        short, _ = solve_finite(net, inst["k"], taus[:M])
        full, _ = solve_finite(net, inst["k"], taus)
        worst = max(worst, float((full.top - short.top).max()))
    return max(0.0, worst)


def _violation_pos_continuity(net, inst) -> float:
    table, _ = solve_finite(net, inst["k"], inst["taus"])
    flat = table.top.reshape(-1)
    dpos = _tuple_pos_distance(net.matrix, inst["k"])
    diff = np.abs(flat[:, None] - flat[None, :])
    return max(0.0, float((diff - 2.0 * dpos).max()))


def _violation_agility_continuity(net, inst) -> float:
    taus = inst["taus"]
    other = inst["taus_perturbed"]
    ell1 = sum(abs(a - b) for a, b in zip(taus, other))
    a, _ = solve_finite(net, inst["k"], taus)
    b, _ = solve_finite(net, inst["k"], other)
    return max(0.0, float(np.abs(a.top - b.top).max()) - 2.0 * ell1)


def _violation_subdivision(net, inst) -> float:
    taus = inst["taus"]
    i, alpha = inst["subdivide"]
    finer = subdivide(Agility.explicit(taus), i, alpha)
    orig, _ = solve_finite(net, inst["k"], taus)
    fine, _ = solve_finite(net, inst["k"], finer.prefix(len(taus) + 1))
    return max(0.0, float((orig.top - fine.top).max()))


def _violation_volatile(net, inst) -> float:
    taus = inst["taus"]
    k = inst["k"]
    N = len(taus)
    plain, _ = solve_finite(net, k, taus)
    # zero perturbation must reproduce the plain solve exactly
    zero = Perturbation([0.0] * (N + 1))
    worst = 0.0
    for side in ("cop_guarantee", "robber_guarantee"):
        vol = solve_volatile(net, k, taus, zero, side)
        worst = max(worst, float(np.abs(vol.top - plain.top).max()))
    pert = Perturbation(inst["volatile_eps"])
    lo = solve_volatile(net, k, taus, pert, "cop_guarantee")
    hi = solve_volatile(net, k, taus, pert, "robber_guarantee")
    d_n = pert.delta(N)
    d_n1 = pert.delta(N - 1) if N >= 1 else 0.0
    worst = max(worst, float(((plain.top - 2.0 * d_n) - lo.top).max()))
    worst = max(worst, float((hi.top - (plain.top + 2.0 * d_n1)).max()))
    return max(0.0, worst)


def _violation_minmax_gap(net, inst) -> float:
    cfg = inst["minmax"]
    coarse = build_net(net.space, cfg["coarse_h"])
    res = minmax_gap_probe(
        net, inst["k"], Agility.explicit(cfg["taus"]), cfg["eps"],
        len(cfg["taus"]), coarse=coarse,
    )
    return max(0.0, res.gap - 4.0 * cfg["eps"])


def _violation_oracle(net, inst) -> float:
    n_oracle = inst["oracle_N"]
    taus = inst["taus"][:n_oracle]
    table, _ = solve_finite(net, inst["k"], taus)
    worst = 0.0
    for tup in itertools.product(range(net.size), repeat=inst["k"] + 1):
        expected = exhaustive_value(net, inst["k"], taus, tup[0], tup[1:])
        worst = max(worst, abs(float(table.top[tup]) - expected))
    return worst


_LEMMA_RUNNERS = {
    "L1-equality": (_violation_l1_equality, 0.0),
    "step-monotone": (_violation_step_monotone, 0.0),
    "pos-continuity": (_violation_pos_continuity, CONTINUITY_TOL),
    "agility-continuity": (_violation_agility_continuity, CONTINUITY_TOL),
    "subdivision-monotone": (_violation_subdivision, 0.0),
    "volatile-sandwich": (_violation_volatile, 0.0),
    "minmax-gap": (_violation_minmax_gap, 0.0),
    "oracle-equivalence": (_violation_oracle, 0.0),
}


# ---------------------------------------------------------------------------
# instance pack and suite driver


def default_pack() -> list:
    """Small dyadic instances covering every check at least once."""
    interval = {"type": "metric_graph", "vertices": ["a", "b"],
                "edges": [["a", "b", "1"]]}
    cycle = {"type": "metric_graph", "vertices": ["u", "v"],
             "edges": [["u", "v", "1"], ["u", "v", "1"]]}
    star = {"type": "metric_graph", "vertices": ["c", "x", "y", "z"],
            "edges": [["c", "x", "1"], ["c", "y", "1"], ["c", "z", "1"]]}
    return [
        {
            "name": "interval-3", "space": interval, "h": 0.5, "k": 1,
            "taus": [0.5] * 4,
            "taus_perturbed": [1.0, 0.5, 0.5, 0.5],
            "subdivide": (1, 0.5),
            "volatile_eps": [0.5, 0.0, 0.0, 0.0, 0.0],
            "oracle_N": 3,
        },
        {
            "name": "cycle-4", "space": cycle, "h": 0.5, "k": 1,
            "taus": [0.5] * 4,
            "taus_perturbed": [0.5, 1.0, 0.5, 0.5],
            "subdivide": (2, 0.5),
            "volatile_eps": [0.5, 0.0, 0.0, 0.0, 0.0],
            "oracle_N": 3,
        },
        {
            "name": "cycle-4-k2", "space": cycle, "h": 0.5, "k": 2,
            "taus": [0.5] * 3,
            "taus_perturbed": [0.5, 0.5, 1.0],
            "subdivide": (1, 0.5),
            "volatile_eps": [0.5, 0.0, 0.0, 0.0],
            "oracle_N": 2,
        },
        {
            "name": "cycle-8", "space": cycle, "h": 0.25, "k": 1,
            "taus": [0.5] * 6,
            "taus_perturbed": [1.0, 0.5, 0.5, 0.5, 0.5, 0.5],
            "subdivide": (1, 0.5),
            "volatile_eps": [0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0],
            "minmax": {"coarse_h": 0.5, "eps": 0.25, "taus": [0.5] * 4},
        },
        {
            "name": "star-3", "space": star, "h": 0.5, "k": 1,
            "taus": [0.5] * 4,
            "taus_perturbed": [0.5, 0.75, 0.75, 0.5],
            "subdivide": (3, 0.5),
            "volatile_eps": [0.5, 0.5, 0.0, 0.0, 0.0],
        },
        {
            "name": "trivial-2", "space": interval, "h": 1.0, "k": 1,
            "taus": [1.0, 1.0],
            "taus_perturbed": [2.0, 1.0],
            "subdivide": (1, 0.5),
            "volatile_eps": [1.0, 0.0, 0.0],
            "oracle_N": 2,
        },
    ]


def _instance_label(inst, net) -> str:
    return (
        f"{inst['name']}[P={net.size},k={inst['k']},N={len(inst['taus'])}]"
    )


def _guard_instance(inst, net) -> None:
    if net.size > SUITE_NET_LIMIT:
        raise CapacityError("suite net points", net.size, SUITE_NET_LIMIT)
    if inst["k"] > SUITE_K_LIMIT:
        raise CapacityError("suite cop count", inst["k"], SUITE_K_LIMIT)
    if len(inst["taus"]) > SUITE_N_LIMIT:
        raise CapacityError("suite horizon", len(inst["taus"]), SUITE_N_LIMIT)


def _run_instance(inst) -> list:
    net = build_net(space_from_config(inst["space"]), inst["h"])
    _guard_instance(inst, net)
    label = _instance_label(inst, net)
    reports = []
    for lemma, (runner, tol) in _LEMMA_RUNNERS.items():
        if lemma == "minmax-gap" and "minmax" not in inst:
            continue
        if lemma == "oracle-equivalence" and "oracle_N" not in inst:
            continue
        reports.append(LemmaReport(lemma, label, runner(net, inst), tol))
    return reports


def _worker_count(n_instances: int) -> int:
    env = os.environ.get("PURSUIT_THREADS", "").strip()
    if env:
        return max(1, min(int(env), n_instances))
    return max(1, min(4, n_instances))


def run_suite(instances=None) -> list:
    """Run every applicable check on every instance; reports are ordered by
    (instance, check) and identical across runs."""
    if instances is None:
        instances = default_pack()
    if not instances:
        raise ConfigError("no instances")
    # size guards fire before any solve
    prepared = []
    for inst in instances:
        net = build_net(space_from_config(inst["space"]), inst["h"])
        _guard_instance(inst, net)
        prepared.append(inst)
    with ThreadPoolExecutor(max_workers=_worker_count(len(prepared))) as pool:
        batches = list(pool.map(_run_instance, prepared))
    return [r for batch in batches for r in batch]


def suite_passed(reports) -> bool:
    return all(r.passed for r in reports)
