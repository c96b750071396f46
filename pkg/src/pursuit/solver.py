"""Finite-game minimax solver over nets, perturbed-game bounds, limit and
standard values, policies, playouts and cop-number estimates.

Players move on net points only.  The value of the ``N``-step game is
computed by backward induction: the base layer is the robber-to-cops
distance, and each later layer applies, for the step's duration ``t``,
a min-filter over every cop axis followed by a max-filter over the robber
axis, each restricted to the points reachable within ``t``.

Layers are dense arrays of shape ``(P,) * (k + 1)``; within a layer every
tuple is independent, and results are identical regardless of evaluation
order (pure max/min reductions with a fixed tie-break).  Reachability uses
closed balls with a 1e-12 slack so that a step equal to the net spacing
admits the intended moves despite floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import reach_filter
from .errors import CapacityError, ConfigError, PlayoutError
from .game import Agility, Position, Trajectory

REACH_SLACK = 1e-12
SNAP_TOL = 1e-9
DEFAULT_STATE_BUDGET = 16_777_216


# ---------------------------------------------------------------------------
# reach sets


@dataclass
class ReachSet:
    """CSR lists of net indices within a closed ball of radius ``t``."""

    radius: float
    indptr: np.ndarray
    indices: np.ndarray

    def of(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def contains(self, i: int, j: int) -> bool:
        row = self.of(i)
        pos = np.searchsorted(row, j)
        return pos < row.size and row[pos] == j


def reach_set(net, t: float) -> ReachSet:
    """Reach structure for radius ``t`` (cached on the net)."""
    key = float(t)
    cached = net._reach_cache.get(key)
    if cached is not None:
        return cached
    mask = net.matrix <= t + REACH_SLACK
    counts = mask.sum(axis=1)
    indptr = np.zeros(net.size + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.nonzero(mask)[1].astype(np.int64)
    rs = ReachSet(key, indptr, indices)
    net._reach_cache[key] = rs
    return rs


# ---------------------------------------------------------------------------
# tables, policies, perturbations


@dataclass
class ValueTable:
    """Per-layer game values over net position tuples.

    ``layers[m]`` holds the value with ``m`` remaining steps as a dense
    array indexed ``[robber, cop_1, ..., cop_k]``.  Layer 0 is the
    robber-to-cops distance; layer ``N`` is the full-horizon value.  Only
    layers 0 and ``N`` are retained unless the solve stored all of them.
    """

    net: object
    k: int
    taus: np.ndarray
    variant: str
    layers: dict

    @property
    def N(self) -> int:
        return len(self.taus)

    @property
    def top(self) -> np.ndarray:
        return self.layers[self.N]

    @property
    def base(self) -> np.ndarray:
        return self.layers[0]

    def layer(self, m: int) -> np.ndarray:
        if m not in self.layers:
            raise KeyError(
                f"layer {m} was not stored (have {sorted(self.layers)})"
            )
        return self.layers[m]

    def value(self, m: int, tup) -> float:
        return float(self.layer(m)[tuple(tup)])


@dataclass
class Policy:
    """Argmax/argmin moves extracted alongside a solve.

    For ``m`` remaining steps, ``robber[m][r, c1..ck]`` is the robber's
    move and ``cops[m][j][r', c1..ck]`` is cop ``j``'s move given the
    robber already moved to ``r'``.  Ties resolve to the lowest net index
    for the robber and the lexicographically smallest cop tuple.
    """

    net: object
    k: int
    taus: np.ndarray
    robber: dict
    cops: dict

    @property
    def N(self) -> int:
        return len(self.taus)

    def robber_move(self, m: int, tup) -> int:
        if m not in self.robber:
            raise PlayoutError(tuple(tup), m, "no robber policy layer")
        return int(self.robber[m][tuple(tup)])

    def cop_moves(self, m: int, robber_new: int, cops: tuple) -> tuple:
        if m not in self.cops:
            raise PlayoutError((robber_new, *cops), m, "no cop policy layer")
        chosen = []
        for j in range(self.k):  # axis j+1 holds cop j's argmin table
            idx = (robber_new, *chosen, *cops[j:])
            chosen.append(int(self.cops[m][j + 1][idx]))
        return tuple(chosen)


@dataclass
class Perturbation:
    """Adversary radii per completed step; ``delta(n)`` is the partial sum."""

    eps: np.ndarray

    def __init__(self, eps):
        self.eps = np.asarray(list(eps), dtype=float)
        if (self.eps < 0).any():
            raise ConfigError("perturbation radii must be nonnegative")

    def delta(self, n: int) -> float:
        return float(self.eps[: n + 1].sum())

    def __len__(self) -> int:
        return self.eps.size


# ---------------------------------------------------------------------------
# core solves


def _check_state_budget(net, k: int, budget: int) -> None:
    states = net.size ** (k + 1)
    if states > budget:
        raise CapacityError("solver states", states, budget)


def _base_layer(net, k: int) -> np.ndarray:
    """Robber-to-cops distance over all tuples: min over cop axes of D."""
    P = net.size
    D = net.matrix
    out = None
    for j in range(1, k + 1):
        shape = [1] * (k + 1)
        shape[0] = P
        shape[j] = P
        term = D.reshape(shape)
        out = term if out is None else np.minimum(out, term)
    return np.broadcast_to(out, (P,) * (k + 1)).copy()


def _sweep(V, rs: ReachSet, k: int, want_policy: bool):
    """One backward-induction step: cop min-filters then the robber
    max-filter.  Returns (next_layer, robber_arg, cop_args)."""
    cop_args = {}
    X = V
    for axis in range(k, 0, -1):
        if want_policy:
            X, arg = reach_filter(X, rs.indptr, rs.indices, axis, "min", True)
            cop_args[axis] = arg
        else:
            X = reach_filter(X, rs.indptr, rs.indices, axis, "min")
    if want_policy:
        U, rarg = reach_filter(X, rs.indptr, rs.indices, 0, "max", True)
        return U, rarg, cop_args
    U = reach_filter(X, rs.indptr, rs.indices, 0, "max")
    return U, None, None


def solve_finite(net, k: int, taus, variant: str = "endpoint", *,
                 store_policy: bool = False, store_layers: bool = False,
                 state_budget: int = DEFAULT_STATE_BUDGET):
    """Backward-induction value of the ``N``-step net game.

    ``variant="endpoint"`` scores the final distance only; ``"intermediate"``
    additionally takes the running minimum with the current distance at
    every level.  Returns ``(ValueTable, Policy | None)``.
    """
    if variant not in ("endpoint", "intermediate"):
        raise ConfigError(f"unknown variant {variant!r}")
    if k < 1:
        raise ConfigError("need at least one cop")
    _check_state_budget(net, k, state_budget)
    taus = np.asarray(list(taus), dtype=float)
    N = taus.size
    base = _base_layer(net, k)
    layers = {0: base}
    pol_r, pol_c = {}, {}
    V = base
    for m in range(1, N + 1):
        t = float(taus[N - m])
        rs = reach_set(net, t)
        V, rarg, cargs = _sweep(V, rs, k, store_policy)
        if variant == "intermediate":
            V = np.minimum(base, V)
        if store_policy:
            pol_r[m] = rarg
            pol_c[m] = cargs
        if store_layers:
            layers[m] = V
    layers[N] = V
    table = ValueTable(net, k, taus, variant, layers)
    policy = Policy(net, k, taus, pol_r, pol_c) if store_policy else None
    return table, policy


def solve_volatile(net, k: int, taus, perturbation: Perturbation,
                   side: str, *, store_layers: bool = False,
                   state_budget: int = DEFAULT_STATE_BUDGET) -> ValueTable:
    """Value of the net game when an adversary displaces every coordinate by
    at most ``eps_n`` after step ``n``.

    ``side="cop_guarantee"`` lets the adversary help the cops (the base case
    clamps ``max(d - 2*eps_N, 0)`` and each level takes the worst nearby
    tuple); ``side="robber_guarantee"`` lets it help the robber.  With all
    radii zero both sides coincide with the endpoint solve exactly.
    """
    if side not in ("cop_guarantee", "robber_guarantee"):
        raise ConfigError(f"unknown side {side!r}")
    _check_state_budget(net, k, state_budget)
    taus = np.asarray(list(taus), dtype=float)
    N = taus.size
    if len(perturbation) < N + 1:
        raise ConfigError(
            f"perturbation needs {N + 1} radii, got {len(perturbation)}"
        )
    eps = perturbation.eps
    base = _base_layer(net, k)
    if side == "cop_guarantee":
        V = np.maximum(base - 2.0 * eps[N], 0.0) if eps[N] > 0 else base.copy()
        adv_mode = "min"
    else:
        V = base.copy()
        adv_mode = "max"
    layers = {0: V}
    for m in range(1, N + 1):
        t = float(taus[N - m])
        rs = reach_set(net, t)
        V, _, _ = _sweep(V, rs, k, False)
        e = float(eps[N - m])
        if e > 0:
            adv = reach_set(net, e)
            for axis in range(k + 1):
                V = reach_filter(V, adv.indptr, adv.indices, axis, adv_mode)
        if store_layers:
            layers[m] = V
    layers[N] = V
    return ValueTable(net, k, taus, f"volatile_{side}", layers)


# ---------------------------------------------------------------------------
# limits, standard value, cop number


@dataclass
class LimitResult:
    values: np.ndarray
    achieved_N: int
    gap: float
    converged: bool
    log: list = field(default_factory=list)

    def worst_start(self) -> float:
        return float(self.values.max())


def limit_value(net, k: int, agility: Agility, tol: float = 1e-9,
                N_max: int = 64, *, state_budget: int = DEFAULT_STATE_BUDGET,
                variant: str = "endpoint") -> LimitResult:
    """Long-horizon value for a fixed agility, by horizon doubling.

    Solves at N = 1, 2, 4, ... and stops when consecutive tables differ by
    less than ``tol`` in sup norm or ``N_max`` is reached.  The returned
    table upper-bounds the infinite-horizon net-game value; ``converged``
    is False when the last decrement still exceeded ``tol``.
    """
    if tol <= 0:
        raise ConfigError("tolerance must be positive")
    if agility.length is not None:
        N_max = min(N_max, agility.length)
    probe = min(N_max, 16)
    if not (agility.is_uniform(probe) or agility.is_decreasing(probe)):
        raise ConfigError("limit_value needs a uniform or decreasing agility")
    _check_state_budget(net, k, state_budget)

    log = []
    uniform = agility.is_uniform(probe)
    if uniform:
        # one operator iterated: extend the same layer instead of re-solving
        t = agility.tau(1)
        rs = reach_set(net, t)
        base = _base_layer(net, k)
        V = base
        prev_top = None
        N_done = 0
        target = 1
        while True:
            while N_done < target:
                V, _, _ = _sweep(V, rs, k, False)
                if variant == "intermediate":
                    V = np.minimum(base, V)
                N_done += 1
            if prev_top is not None:
                dec = float(np.abs(prev_top - V).max())
                log.append((target, dec))
                if dec < tol:
                    return LimitResult(V.copy(), target, dec, True, log)
            prev_top = V.copy()
            if target >= N_max:
                gap = log[-1][1] if log else math.inf
                return LimitResult(V.copy(), target, gap, False, log)
            target = min(2 * target, N_max)
    prev = None
    N = 1
    while True:
        table, _ = solve_finite(net, k, agility.prefix(N), state_budget=state_budget,
                                variant=variant)
        if prev is not None:
            dec = float(np.abs(prev.top - table.top).max())
            log.append((N, dec))
            if dec < tol:
                return LimitResult(table.top.copy(), N, dec, True, log)
        prev = table
        if N >= N_max:
            gap = log[-1][1] if log else math.inf
            return LimitResult(table.top.copy(), N, gap, False, log)
        N = min(2 * N, N_max)


def duration_value(net, k: int, T: float, N_start: int = 1,
                   tol: float = 1e-9, N_max: int = 64, *,
                   state_budget: int = DEFAULT_STATE_BUDGET) -> LimitResult:
    """Fixed total duration ``T`` split into ever more uniform steps.

    Doubling ``N`` with ``tau = T/N`` walks a subdivision chain, so values
    are pointwise nondecreasing; stops when the increment drops below
    ``tol``.  The result lower-bounds the fixed-duration net-game value.
    """
    if T <= 0:
        raise ConfigError("duration T must be positive")
    if N_start < 1:
        raise ConfigError("N must be at least 1")
    log = []
    prev = None
    N = N_start
    while True:
        table, _ = solve_finite(net, k, [T / N] * N, state_budget=state_budget)
        if prev is not None:
            inc = float(np.abs(table.top - prev.top).max())
            log.append((N, inc))
            if inc < tol:
                return LimitResult(table.top.copy(), N, inc, True, log)
        prev = table
        if N >= N_max:
            gap = log[-1][1] if log else math.inf
            return LimitResult(table.top.copy(), N, gap, False, log)
        N = min(2 * N, N_max)


@dataclass
class StandardResult:
    values: np.ndarray
    members: list  # (agility description, LimitResult) pairs

    def worst_start(self) -> float:
        return float(self.values.max())


def default_family(net) -> list:
    """Uniform schedules at one, two and four covering radii."""
    return [Agility.uniform(net.h * s) for s in (1.0, 2.0, 4.0)]


def standard_value(net, k: int, family=None, tol: float = 1e-9,
                   N_max: int = 64, *,
                   state_budget: int = DEFAULT_STATE_BUDGET) -> StandardResult:
    """Lower bound for the standard-game value: the pointwise maximum of
    ``limit_value`` over an agility family.

    The family must sit in the standard set (positive, divergent sum) and be
    uniform or decreasing; the true supremum over all admissible schedules
    is not computable, so only this one-sided bound is reported.
    """
    if family is None:
        family = default_family(net)
    if not family:
        raise ConfigError("no instances: agility family is empty")
    for ag in family:
        if not ag.in_sigma0:
            raise ConfigError(
                f"agility {ag!r} is outside the standard set (divergent sum required)"
            )
    best = None
    members = []
    for ag in family:
        res = limit_value(net, k, ag, tol, N_max, state_budget=state_budget)
        members.append((ag.describe(), res))
        best = res.values if best is None else np.maximum(best, res.values)
    return StandardResult(best, members)


@dataclass
class CopNumberResult:
    estimate: int | None  # None means "> k_max"
    k_max: int
    theta: float
    per_k: list  # (k, worst-start value) pairs

    def label(self) -> str:
        return str(self.estimate) if self.estimate is not None else f"> {self.k_max}"


def cop_number_estimate(net, k_max: int, theta: float | None = None,
                        family=None, tol: float = 1e-9, N_max: int = 64, *,
                        state_budget: int = DEFAULT_STATE_BUDGET) -> CopNumberResult:
    """Smallest ``k <= k_max`` whose worst-start standard value is at most
    ``theta``; with ``theta = 0`` this estimates the capture (strong) cop
    number on the net.  Defaults ``theta`` to twice the covering radius plus
    the largest first-step length (discretization slack).
    """
    if k_max < 1:
        raise ConfigError("k_max must be at least 1")
    fam = family if family is not None else default_family(net)
    if theta is None:
        theta = 2.0 * net.h + max(ag.tau(1) for ag in fam)
    if theta < 0:
        raise ConfigError("threshold must be nonnegative")
    per_k = []
    estimate = None
    for k in range(1, k_max + 1):
        res = standard_value(net, k, fam, tol, N_max, state_budget=state_budget)
        worst = res.worst_start()
        per_k.append((k, worst))
        if worst <= theta:
            estimate = k
            break
    return CopNumberResult(estimate, k_max, float(theta), per_k)


# ---------------------------------------------------------------------------
# playouts


def _index_mover(source, side: str, net, N: int):
    """Normalize a move source (table Policy or point-level strategy) to a
    net-index move function."""
    if isinstance(source, Policy):
        if source.N < N:
            raise PlayoutError((), N, f"policy horizon {source.N} < playout {N}")
        if side == "robber":
            def move(n, r, cops, r_new=None, t=None):
                return source.robber_move(source.N - n + 1, (r, *cops))
        else:
            def move(n, r, cops, r_new=None, t=None):
                return source.cop_moves(source.N - n + 1, r_new, cops)
        return move
    strategy = getattr(source, "move", source)  # arena.Strategy or callable

    def snap(point, cur: int, t: float, n: int):
        j = net.nearest_index(point)
        if net.matrix[cur, j] > t + SNAP_TOL:
            raise PlayoutError((cur, j), n, "strategy move exceeds the step budget")
        return j

    if side == "robber":
        def move(n, r, cops, r_new=None, t=None):
            pos = Position(net.points[r], [net.points[c] for c in cops])
            return snap(strategy(pos, t, n), r, t, n)
    else:
        def move(n, r, cops, r_new=None, t=None):
            pos = Position(net.points[r_new], [net.points[c] for c in cops])
            dests = strategy(pos, t, n)
            return tuple(snap(p, c, t, n) for p, c in zip(dests, cops))
    return move


def policy_playout(net, robber_source, cop_source, start, taus,
                   kappa: float = 0.0) -> Trajectory:
    """Execute one game on the net: the robber moves first, the destination
    is revealed, then the cops move; stops early on capture (distance at
    most ``kappa``).  Sources may be solved policies, point-level
    strategies, or a mix."""
    taus = [float(t) for t in taus]
    N = len(taus)
    start = tuple(int(i) for i in start)
    r, cops = start[0], start[1:]
    k = len(cops)
    rob = _index_mover(robber_source, "robber", net, N)
    cop = _index_mover(cop_source, "cops", net, N)
    traj = Trajectory(net.space, kappa=kappa)
    traj.append(Position(net.points[r], [net.points[c] for c in cops]), 0.0)
    if min(net.matrix[r, c] for c in cops) <= kappa:
        traj.captured = True
        traj.capture_step = 0
        return traj
    for n in range(1, N + 1):
        t = taus[n - 1]
        r_new = rob(n, r, cops, t=t)
        cops_new = cop(n, r, cops, r_new=r_new, t=t)
        if len(cops_new) != k:
            raise PlayoutError((r, *cops), n, "cop move arity mismatch")
        r, cops = int(r_new), tuple(int(c) for c in cops_new)
        traj.append(Position(net.points[r], [net.points[c] for c in cops]), t)
        if min(net.matrix[r, c] for c in cops) <= kappa:
            traj.captured = True
            traj.capture_step = n
            return traj
    return traj


def policy_strategy(policy: Policy, side: str):
    """Wrap a solved net policy as a point-level strategy usable in the
    arena; positions must coincide with net points."""
    net = policy.net

    def move(pos: Position, t: float, n: int):
        m = policy.N - n + 1
        cops = tuple(net.index_of(c) for c in pos.cops)
        if side == "robber":
            r = net.index_of(pos.robber)
            return net.points[policy.robber_move(m, (r, *cops))]
        r_new = net.index_of(pos.robber)
        return tuple(net.points[j] for j in policy.cop_moves(m, r_new, cops))

    return move
