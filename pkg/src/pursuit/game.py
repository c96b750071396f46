"""Game-level objects: positions, composite metrics, agility schedules,
trajectories and the realized game value.

An *agility* is the robber-chosen schedule of step durations: step ``n``
permits every player a move of length at most ``tau(n)``.  Schedules are
evaluated lazily through the ``tau`` accessor so that infinite families
(uniform, geometric, harmonic) stay cheap; explicit prefixes are plain
lists.  The standard admissible set contains the positive schedules with a
divergent sum; divergence is decided by kind, not by numeric summation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AgilityError, ArityError

# ---------------------------------------------------------------------------
# Positions


@dataclass(frozen=True)
class Position:
    """A (robber, cops) tuple of points on one space."""

    robber: object
    cops: tuple

    def __init__(self, robber, cops):
        object.__setattr__(self, "robber", robber)
        object.__setattr__(self, "cops", tuple(cops))
        if len(self.cops) < 1:
            raise ArityError("a position needs at least one cop")

    @property
    def k(self) -> int:
        return len(self.cops)


def robber_cop_distance(space, pos: Position) -> float:
    """min over cops of d(robber, cop) within one position."""
    return min(space.distance(pos.robber, c) for c in pos.cops)


def pos_metrics(space, p: Position, q: Position):
    """Composite metrics between two positions with matched cop indices.

    Returns ``(d_rc, d_cc, d_pos)`` where ``d_rc`` is the robber-to-own-cops
    distance inside ``p``, ``d_cc = max_i d(p.cop_i, q.cop_i)`` and
    ``d_pos = max(d(p.robber, q.robber), d_cc)``.
    """
    if p.k != q.k:
        raise ArityError(f"cop counts differ: {p.k} vs {q.k}")
    d_rc = robber_cop_distance(space, p)
    d_cc = max(space.distance(a, b) for a, b in zip(p.cops, q.cops))
    d_pos = max(space.distance(p.robber, q.robber), d_cc)
    return d_rc, d_cc, d_pos


# ---------------------------------------------------------------------------
# Agility schedules


class Agility:
    """Step-duration schedule with a 1-based accessor ``tau(n)``.

    Kinds: ``explicit`` (finite positive list), ``uniform(t)``,
    ``geometric(a, rho)`` with ``rho < 1`` (convergent sum, flagged as
    outside the standard set), ``harmonic(a)`` (``a/n``), plus internal
    wrappers produced by :func:`shift` and :func:`subdivide`.
    """

    def __init__(self, kind, *, values=None, t=None, a=None, rho=None,
                 base=None, offset=0, index=0, alpha=0.0):
        self.kind = kind
        self._values = list(values) if values is not None else None
        self._t = t
        self._a = a
        self._rho = rho
        self._base = base
        self._offset = offset
        self._index = index
        self._alpha = alpha
        if kind == "explicit":
            if not self._values:
                raise AgilityError("explicit agility needs at least one step")
            if any(v < 0 for v in self._values):
                raise AgilityError("negative step duration")
        elif kind == "uniform":
            if t is None or t <= 0:
                raise AgilityError("uniform agility needs t > 0")
        elif kind == "geometric":
            if a is None or a <= 0 or rho is None or not 0 < rho < 1:
                raise AgilityError("geometric agility needs a > 0 and 0 < rho < 1")
        elif kind == "harmonic":
            if a is None or a <= 0:
                raise AgilityError("harmonic agility needs a > 0")
        elif kind not in ("shifted", "subdivided"):
            raise AgilityError(f"unknown agility kind {kind!r}")

    # -- constructors

    @staticmethod
    def explicit(values) -> "Agility":
        return Agility("explicit", values=values)

    @staticmethod
    def uniform(t: float) -> "Agility":
        return Agility("uniform", t=t)

    @staticmethod
    def geometric(a: float, rho: float) -> "Agility":
        return Agility("geometric", a=a, rho=rho)

    @staticmethod
    def harmonic(a: float) -> "Agility":
        return Agility("harmonic", a=a)

    # -- accessor and views

    def tau(self, n: int) -> float:
        if n < 1:
            raise IndexError("agility steps are 1-based")
        if self.kind == "explicit":
            if n > len(self._values):
                raise IndexError(f"explicit agility has {len(self._values)} steps")
            return self._values[n - 1]
        if self.kind == "uniform":
            return self._t
        if self.kind == "geometric":
            return self._a * self._rho ** (n - 1)
        if self.kind == "harmonic":
            return self._a / n
        if self.kind == "shifted":
            return self._base.tau(n + self._offset)
        # subdivided: step index self._index split into alpha / (1 - alpha)
        i = self._index
        if n < i:
            return self._base.tau(n)
        if n == i:
            return self._alpha * self._base.tau(i)
        if n == i + 1:
            return (1.0 - self._alpha) * self._base.tau(i)
        return self._base.tau(n - 1)

    def prefix(self, n_steps: int) -> list:
        return [self.tau(n) for n in range(1, n_steps + 1)]

    def total(self, n_steps: int) -> float:
        return sum(self.prefix(n_steps))

    @property
    def length(self):
        """Number of usable steps, or ``None`` when unbounded."""
        if self.kind == "explicit":
            return len(self._values)
        if self.kind == "shifted":
            n = self._base.length
            return None if n is None else max(0, n - self._offset)
        if self.kind == "subdivided":
            n = self._base.length
            return None if n is None else n + 1
        return None

    def is_decreasing(self, n_steps: int) -> bool:
        """True iff tau(n+1) < tau(n) over the tested prefix."""
        vals = self.prefix(n_steps)
        return all(b < a for a, b in zip(vals[:-1], vals[1:]))

    def is_uniform(self, n_steps: int = 2) -> bool:
        if self.kind == "uniform":
            return True
        vals = self.prefix(min(n_steps, self.length or n_steps))
        return all(v == vals[0] for v in vals)

    @property
    def all_positive(self) -> bool:
        if self.kind == "explicit":
            return all(v > 0 for v in self._values)
        if self.kind in ("shifted", "subdivided"):
            base_ok = self._base.all_positive
            if self.kind == "subdivided":
                return base_ok and 0.0 < self._alpha < 1.0
            return base_ok
        return True

    @property
    def in_sigma0(self) -> bool:
        """Membership in the standard set: positive with divergent sum.

        Decided by kind: uniform and harmonic diverge, geometric does not,
        finite explicit prefixes make no divergence claim.  Subdividing or
        shifting preserves divergence; zero-length pieces (alpha in {0,1})
        lose positivity and are flagged out.
        """
        if not self.all_positive:
            return False
        root = self
        while root.kind in ("shifted", "subdivided"):
            root = root._base
        return root.kind in ("uniform", "harmonic")

    def describe(self) -> dict:
        if self.kind == "explicit":
            return {"kind": "explicit", "steps": list(self._values)}
        if self.kind == "uniform":
            return {"kind": "uniform", "t": self._t}
        if self.kind == "geometric":
            return {"kind": "geometric", "a": self._a, "rho": self._rho}
        if self.kind == "harmonic":
            return {"kind": "harmonic", "a": self._a}
        # wrappers reduce to an explicit window for reporting
        n = self.length
        return {"kind": "explicit", "steps": self.prefix(n if n is not None else 16)}

    def __repr__(self):
        d = self.describe()
        inner = ", ".join(f"{k}={v}" for k, v in d.items() if k != "kind")
        return f"Agility.{d['kind']}({inner})"


def agility_from_config(cfg: dict) -> Agility:
    """Parse the run-config agility description."""
    kind = cfg.get("kind")
    if kind == "uniform":
        return Agility.uniform(float(cfg["t"]))
    if kind == "explicit":
        return Agility.explicit([float(v) for v in cfg["steps"]])
    if kind == "harmonic":
        return Agility.harmonic(float(cfg["a"]))
    if kind == "geometric":
        return Agility.geometric(float(cfg["a"]), float(cfg["rho"]))
    raise AgilityError(f"unknown agility kind {kind!r}")


def shift(tau: Agility) -> Agility:
    """Drop the first step: ``shift(tau)(n) = tau(n+1)``."""
    if tau.kind == "explicit":
        if len(tau._values) <= 1:
            if len(tau._values) == 0:
                raise AgilityError("cannot shift an empty agility")
            raise AgilityError("shifting a one-step agility leaves no steps")
        return Agility.explicit(tau._values[1:])
    if tau.kind == "uniform":
        return tau
    if tau.kind == "geometric":
        return Agility.geometric(tau._a * tau._rho, tau._rho)
    if tau.kind == "shifted":
        return Agility("shifted", base=tau._base, offset=tau._offset + 1)
    return Agility("shifted", base=tau, offset=1)


def subdivide(tau: Agility, i: int, alpha: float) -> Agility:
    """Split step ``i`` into consecutive pieces of ``alpha`` and ``1-alpha``
    of its duration; later steps shift up by one.

    ``alpha`` in {0, 1} is allowed: the zero-length piece is retained as a
    value but the result is flagged outside the standard set.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    n = tau.length
    if i < 1 or (n is not None and i > n):
        raise IndexError(f"step index {i} outside the usable range")
    if tau.kind == "explicit" and 0.0 < alpha < 1.0:
        vals = list(tau._values)
        piece = vals[i - 1]
        out = vals[: i - 1] + [alpha * piece, (1 - alpha) * piece] + vals[i:]
        return Agility.explicit(out)
    # wrapper form also carries the zero-length pieces of alpha in {0, 1}
    return Agility("subdivided", base=tau, index=i, alpha=alpha)


def common_subdivision(a, b) -> list:
    """Merge-of-breakpoints refinement of two explicit prefixes with equal
    total duration; the result is a subdivision of both."""
    ta, tb = sum(a), sum(b)
    if abs(ta - tb) > 1e-12 * max(1.0, ta, tb):
        raise AgilityError(f"total durations differ: {ta} vs {tb}")

    def breaks(vals):
        acc, out = 0.0, []
        for v in vals[:-1]:
            acc += v
            out.append(acc)
        return out

    merged = sorted(set(breaks(list(a)) + breaks(list(b))))
    cuts = [0.0] + merged + [ta]
    return [hi - lo for lo, hi in zip(cuts[:-1], cuts[1:]) if hi - lo > 0]


# ---------------------------------------------------------------------------
# Trajectories


@dataclass
class Trajectory:
    """Recorded play: the initial position plus the position after the cops'
    move of every completed step, with the step durations used."""

    space: object
    positions: list = field(default_factory=list)
    taus: list = field(default_factory=list)
    captured: bool = False
    capture_step: int | None = None
    kappa: float = 0.0

    def append(self, position: Position, t: float) -> None:
        self.positions.append(position)
        self.taus.append(t)

    @property
    def steps(self) -> int:
        return len(self.positions) - 1

    def gaps(self) -> list:
        return [robber_cop_distance(self.space, p) for p in self.positions]


def trajectory_value(traj: Trajectory) -> float:
    """Realized value: 0 on capture, otherwise the minimum over all recorded
    steps (including the initial position) of the robber-to-cops distance."""
    if not traj.positions:
        raise ValueError("empty trajectory")
    if traj.captured:
        return 0.0
    return min(traj.gaps())
