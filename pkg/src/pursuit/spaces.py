"""Compact geodesic spaces with intrinsic metric, geodesic stepping and nets.

Four concrete presentations are supported:

* :class:`MetricGraphSpace` -- a graph whose edges are real intervals of
  prescribed length; points are ``(edge_id, offset)`` pairs and distances
  are shortest paths through edge endpoints.
* :class:`BallSpace` -- the Euclidean ball of a given radius (convex, so
  geodesics are straight chords).
* :class:`SphereSpace` -- the round unit sphere with great-circle distance.
* :class:`ProductSpace` -- an l_p product of a base space with a real
  interval fiber.

All spaces answer ``distance``, ``step_toward`` (move along a geodesic with
a travel budget), point validation, uniform sampling, and JSON descriptions.
Distance queries are pure and safe to share between threads; a space never
mutates after construction.

Tie-breaking is deterministic everywhere: metric graphs prefer routes whose
edge-id sequence is lexicographically smallest among equal-length routes,
and antipodal sphere targets are nudged by a 1e-9 rotation before stepping.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, ConfigError, MalformedPathError, MalformedPointError

NORM_TOL = 1e-9
ANTIPODAL_NUDGE = 1e-9
DEFAULT_POINT_BUDGET = 20_000


class Space:
    """Abstract geodesic space interface."""

    kind = "abstract"

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def step_toward(self, p, q, t: float):
        """Point on a geodesic from ``p`` to ``q`` at distance ``min(t, d(p,q))``
        from ``p``. ``t`` must be nonnegative; ``t >= d`` returns ``q``."""
        raise NotImplementedError

    def validate_point(self, p) -> None:
        raise NotImplementedError

    def random_point(self, rng: np.random.Generator):
        raise NotImplementedError

    def describe(self) -> dict:
        """JSON-ready description of the space."""
        raise NotImplementedError

    def point_to_json(self, p):
        raise NotImplementedError

    def point_from_json(self, obj):
        raise NotImplementedError

    def pairwise(self, points) -> np.ndarray:
        """Symmetric matrix of pairwise distances (generic double loop)."""
        n = len(points)
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                d = self.distance(points[i], points[j])
                out[i, j] = d
                out[j, i] = d
        return out


def _check_budget(count: int, budget: int) -> None:
    if count > budget:
        raise CapacityError("net points", count, budget)


# ---------------------------------------------------------------------------
# Metric graphs


class MetricGraphSpace(Space):
    """Metric graph: vertices joined by edges of positive length.

    Points are ``(edge_index, offset)`` with ``0 <= offset <= length``;
    a vertex is aliased by offset 0 / length of any incident edge.  All-pairs
    vertex distances are precomputed once (repeated Dijkstra with a
    deterministic predecessor tie-break), so point queries are O(1) plus a
    constant number of endpoint combinations.
    """

    kind = "metric_graph"

    def __init__(self, vertices, edges):
        self.vertex_ids = [str(v) for v in vertices]
        if len(set(self.vertex_ids)) != len(self.vertex_ids):
            raise ConfigError("duplicate vertex ids")
        self._vindex = {v: i for i, v in enumerate(self.vertex_ids)}
        self.edges = []
        for e in edges:
            u, v, length = e
            length = float(length)
            if length <= 0:
                raise ConfigError(f"edge ({u},{v}) has non-positive length {length}")
            if str(u) not in self._vindex or str(v) not in self._vindex:
                raise ConfigError(f"edge ({u},{v}) references unknown vertex")
            self.edges.append((self._vindex[str(u)], self._vindex[str(v)], length))
        if not self.edges:
            raise ConfigError("metric graph needs at least one edge")
        self._build_shortest_paths()

    # -- construction helpers

    def _build_shortest_paths(self):
        nv = len(self.vertex_ids)
        adj = [[] for _ in range(nv)]
        for ei, (u, v, w) in enumerate(self.edges):
            adj[u].append((v, w, ei))
            adj[v].append((u, w, ei))
        dist = np.full((nv, nv), np.inf)
        # pred[s][v] = (previous vertex, edge index) on the chosen shortest
        # path from s to v; ties prefer the smaller (vertex, edge) pair.
        pred = [[None] * nv for _ in range(nv)]
        for s in range(nv):
            dist[s, s] = 0.0
            heap = [(0.0, s)]
            done = [False] * nv
            while heap:
                d, u = heapq.heappop(heap)
                if done[u]:
                    continue
                done[u] = True
                for v, w, ei in adj[u]:
                    nd = d + w
                    if nd < dist[s, v]:
                        dist[s, v] = nd
                        pred[s][v] = (u, ei)
                        heapq.heappush(heap, (nd, v))
                    elif nd == dist[s, v] and pred[s][v] is not None:
                        if (u, ei) < pred[s][v]:
                            pred[s][v] = (u, ei)
        if not np.isfinite(dist).all():
            raise ConfigError("metric graph is not connected")
        # enforce exact symmetry regardless of per-source rounding
        self.vdist = np.minimum(dist, dist.T)
        self._pred = pred

    # -- basic point handling

    def validate_point(self, p) -> None:
        try:
            e, off = p
            e = int(e)
            off = float(off)
        except (TypeError, ValueError) as exc:
            raise MalformedPointError(f"not a graph point: {p!r}") from exc
        if not 0 <= e < len(self.edges):
            raise MalformedPointError(f"edge index {e} out of range")
        length = self.edges[e][2]
        if not -1e-12 <= off <= length + 1e-12:
            raise MalformedPointError(
                f"offset {off} outside [0, {length}] on edge {e}"
            )

    def vertex_point(self, v):
        """Canonical ``(edge, offset)`` address of a vertex (lowest edge id)."""
        vi = self._vindex[str(v)] if not isinstance(v, int) else v
        for ei, (u, w, length) in enumerate(self.edges):
            if u == vi:
                return (ei, 0.0)
            if w == vi:
                return (ei, length)
        raise MalformedPointError(f"vertex {v} is isolated")

    def point_to_json(self, p):
        return [int(p[0]), float(p[1])]

    def point_from_json(self, obj):
        p = (int(obj[0]), float(obj[1]))
        self.validate_point(p)
        return p

    def describe(self) -> dict:
        return {
            "type": "metric_graph",
            "vertices": list(self.vertex_ids),
            "edges": [
                [self.vertex_ids[u], self.vertex_ids[v], repr(w)]
                for u, v, w in self.edges
            ],
        }

    # -- metric

    def _end_costs(self, p):
        e, off = int(p[0]), float(p[1])
        u, v, length = self.edges[e]
        return (u, off), (v, length - off)

    def distance(self, p, q) -> float:
        self.validate_point(p)
        self.validate_point(q)
        # canonical argument order makes symmetry exact
        if (int(q[0]), float(q[1])) < (int(p[0]), float(p[1])):
            p, q = q, p
        best = math.inf
        if int(p[0]) == int(q[0]):
            best = abs(float(p[1]) - float(q[1]))
        for x, cx in self._end_costs(p):
            for y, cy in self._end_costs(q):
                cand = cx + self.vdist[x, y] + cy
                if cand < best:
                    best = cand
        return best

    # -- geodesic routes

    def _vertex_path(self, x: int, y: int):
        """Edge hops of the chosen shortest path x -> y as
        ``(edge, from_vertex, to_vertex)`` triples."""
        hops = []
        cur = y
        while cur != x:
            prev, ei = self._pred[x][cur]
            hops.append((ei, prev, cur))
            cur = prev
        hops.reverse()
        return hops

    def _hop_segment(self, ei, vfrom, vto):
        u, v, length = self.edges[ei]
        if vfrom == u and vto == v:
            return (ei, 0.0, length)
        return (ei, length, 0.0)

    def _routes(self, p, q):
        """Candidate geodesic routes, each a list of (edge, off_from, off_to)
        segments, paired with their total length."""
        routes = []
        ep, op_ = int(p[0]), float(p[1])
        eq, oq = int(q[0]), float(q[1])
        if ep == eq:
            routes.append((abs(oq - op_), [(ep, op_, oq)]))
        u_p, v_p, len_p = self.edges[ep]
        u_q, v_q, len_q = self.edges[eq]
        exits_p = [(u_p, op_, 0.0), (v_p, len_p - op_, len_p)]
        exits_q = [(u_q, oq, 0.0), (v_q, len_q - oq, len_q)]
        for x, cx, off_x in exits_p:
            for y, cy, off_y in exits_q:
                total = cx + self.vdist[x, y] + cy
                segs = []
                if cx > 0:
                    segs.append((ep, op_, off_x))
                segs.extend(
                    self._hop_segment(*hop) for hop in self._vertex_path(x, y)
                )
                if cy > 0:
                    segs.append((eq, off_y, oq))
                routes.append((total, segs))
        return routes

    def _best_route(self, p, q):
        routes = self._routes(p, q)
        return min(routes, key=lambda r: (r[0], tuple(s[0] for s in r[1])))

    def step_toward(self, p, q, t: float):
        self.validate_point(p)
        self.validate_point(q)
        if t < 0:
            raise ValueError("negative travel budget")
        if t == 0.0:
            return (int(p[0]), float(p[1]))
        total, segs = self._best_route(p, q)
        if t >= total:
            return (int(q[0]), float(q[1]))
        remaining = t
        for ei, a, b in segs:
            seg_len = abs(b - a)
            if remaining <= seg_len:
                if seg_len == 0:
                    continue
                direction = 1.0 if b > a else -1.0
                return (ei, a + direction * remaining)
            remaining -= seg_len
        return (int(q[0]), float(q[1]))

    def random_point(self, rng: np.random.Generator):
        lengths = np.array([w for _, _, w in self.edges])
        e = int(rng.choice(len(self.edges), p=lengths / lengths.sum()))
        return (e, float(rng.uniform(0.0, lengths[e])))

    @property
    def total_length(self) -> float:
        return float(sum(w for _, _, w in self.edges))


# ---------------------------------------------------------------------------
# Euclidean balls


class BallSpace(Space):
    """Closed Euclidean ball of given dimension and radius.

    The ball is convex, so the intrinsic metric coincides with the Euclidean
    one and geodesics are chords.
    """

    kind = "ball"

    def __init__(self, dimension: int, radius: float = 1.0):
        if dimension < 1:
            raise ConfigError("ball dimension must be >= 1")
        if radius <= 0:
            raise ConfigError("ball radius must be positive")
        self.dimension = int(dimension)
        self.radius = float(radius)

    def validate_point(self, p) -> None:
        arr = np.asarray(p, dtype=float)
        if arr.shape != (self.dimension,):
            raise MalformedPointError(
                f"expected {self.dimension} coordinates, got shape {arr.shape}"
            )
        if np.linalg.norm(arr) > self.radius + NORM_TOL:
            raise MalformedPointError(
                f"norm {np.linalg.norm(arr)} exceeds radius {self.radius}"
            )

    def distance(self, p, q) -> float:
        self.validate_point(p)
        self.validate_point(q)
        return float(np.linalg.norm(np.asarray(p, float) - np.asarray(q, float)))

    def step_toward(self, p, q, t: float):
        self.validate_point(p)
        self.validate_point(q)
        if t < 0:
            raise ValueError("negative travel budget")
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        if t == 0.0:
            return p.copy()
        d = float(np.linalg.norm(q - p))
        if t >= d or d == 0.0:
            return q.copy()
        return p + (t / d) * (q - p)

    def random_point(self, rng: np.random.Generator):
        direction = rng.normal(size=self.dimension)
        norm = np.linalg.norm(direction)
        if norm == 0:
            return np.zeros(self.dimension)
        r = self.radius * rng.uniform() ** (1.0 / self.dimension)
        return (r / norm) * direction

    def describe(self) -> dict:
        return {"type": "ball", "dimension": self.dimension, "radius": repr(self.radius)}

    def point_to_json(self, p):
        return [float(x) for x in np.asarray(p, float)]

    def point_from_json(self, obj):
        p = np.asarray(obj, dtype=float)
        self.validate_point(p)
        return p

    def pairwise(self, points) -> np.ndarray:
        arr = np.asarray(points, float)
        diff = arr[:, None, :] - arr[None, :, :]
        out = np.sqrt((diff * diff).sum(axis=2))
        return np.minimum(out, out.T)


# ---------------------------------------------------------------------------
# Round spheres


class SphereSpace(Space):
    """Unit sphere of dimension ``n`` embedded in ``n+1`` coordinates.

    Distance is the great-circle angle in ``[0, pi]`` computed with the
    well-conditioned ``2*atan2(|u-v|, |u+v|)`` form, which is exact at both
    coincident and antipodal pairs.  Stepping toward an antipodal target is
    ambiguous; the target is rotated by 1e-9 (in the (x1,x2) plane on the
    circle, around the first coordinate axis otherwise) to pick one geodesic
    reproducibly.
    """

    kind = "sphere"

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ConfigError("sphere dimension must be >= 1")
        self.dimension = int(dimension)

    @property
    def ambient(self) -> int:
        return self.dimension + 1

    def validate_point(self, p) -> None:
        arr = np.asarray(p, dtype=float)
        if arr.shape != (self.ambient,):
            raise MalformedPointError(
                f"expected {self.ambient} coordinates, got shape {arr.shape}"
            )
        if abs(np.linalg.norm(arr) - 1.0) > NORM_TOL:
            raise MalformedPointError(f"point is not on the unit sphere: {arr}")

    def distance(self, p, q) -> float:
        self.validate_point(p)
        self.validate_point(q)
        u = np.asarray(p, float)
        v = np.asarray(q, float)
        return 2.0 * math.atan2(
            float(np.linalg.norm(u - v)), float(np.linalg.norm(u + v))
        )

    def _antipodal_tangent(self, p):
        """Unit tangent at ``p`` toward a target rotated by the nudge angle
        out of the exact antipode.

        This is the limit direction of the geodesic to the nudged target,
        evaluated analytically: forming ``q_nudged - (-p)`` numerically
        would cancel catastrophically at the 1e-9 scale.  The rotation
        plane is (x1,x2) on the circle and (x2,x3) -- around the first
        coordinate axis -- in higher dimension.
        """
        i, j = (0, 1) if self.dimension == 1 else (1, 2)
        one_minus_c = 2.0 * math.sin(ANTIPODAL_NUDGE / 2.0) ** 2
        s = math.sin(ANTIPODAL_NUDGE)
        u = np.zeros(self.ambient)
        u[i] = one_minus_c * p[i] + s * p[j]
        u[j] = one_minus_c * p[j] - s * p[i]
        w = u - np.dot(p, u) * p
        nw = float(np.linalg.norm(w))
        if nw < 1e-30:
            # target axis is perpendicular to the rotation plane: fall back
            # to the most orthogonal coordinate direction
            m = int(np.argmin(np.abs(p)))
            w = np.zeros(self.ambient)
            w[m] = 1.0
            w = w - np.dot(p, w) * p
            nw = float(np.linalg.norm(w))
        return w / nw

    def step_toward(self, p, q, t: float):
        self.validate_point(p)
        self.validate_point(q)
        if t < 0:
            raise ValueError("negative travel budget")
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        if t == 0.0:
            return p.copy()
        theta = self.distance(p, q)
        if t >= theta:
            return q.copy()
        if math.pi - theta <= 1e-12:
            w = self._antipodal_tangent(p)
        else:
            w = q - np.dot(p, q) * p
            nw = float(np.linalg.norm(w))
            if nw == 0.0:
                return p.copy()
            w = w / nw
        out = math.cos(t) * p + math.sin(t) * w
        return out / np.linalg.norm(out)

    def random_point(self, rng: np.random.Generator):
        v = rng.normal(size=self.ambient)
        n = np.linalg.norm(v)
        while n == 0:
            v = rng.normal(size=self.ambient)
            n = np.linalg.norm(v)
        return v / n

    def describe(self) -> dict:
        return {"type": "sphere", "dimension": self.dimension}

    def point_to_json(self, p):
        return [float(x) for x in np.asarray(p, float)]

    def point_from_json(self, obj):
        p = np.asarray(obj, dtype=float)
        self.validate_point(p)
        return p

    def pairwise(self, points) -> np.ndarray:
        arr = np.asarray(points, float)
        diff = np.linalg.norm(arr[:, None, :] - arr[None, :, :], axis=2)
        summ = np.linalg.norm(arr[:, None, :] + arr[None, :, :], axis=2)
        out = 2.0 * np.arctan2(diff, summ)
        return np.minimum(out, out.T)


# ---------------------------------------------------------------------------
# l_p products with an interval fiber


class ProductSpace(Space):
    """l_p product of a base space with the interval ``[0, fiber_length]``.

    ``d_p((a,s),(b,t)) = (d(a,b)^p + |s-t|^p)^(1/p)``; when the fiber
    coordinates coincide this reduces to the base distance exactly.
    """

    kind = "product"

    def __init__(self, base: Space, fiber_length: float = 1.0, p: float = 2.0):
        if fiber_length <= 0:
            raise ConfigError("fiber length must be positive")
        if p < 1:
            raise ConfigError("product exponent must satisfy p >= 1")
        self.base = base
        self.fiber_length = float(fiber_length)
        self.p = float(p)

    def validate_point(self, pt) -> None:
        try:
            b, s = pt
            s = float(s)
        except (TypeError, ValueError) as exc:
            raise MalformedPointError(f"not a product point: {pt!r}") from exc
        self.base.validate_point(b)
        if not -NORM_TOL <= s <= self.fiber_length + NORM_TOL:
            raise MalformedPointError(
                f"fiber coordinate {s} outside [0, {self.fiber_length}]"
            )

    def combine(self, d_base: float, d_fiber: float) -> float:
        # zero components short-circuit so degenerate products are exact
        if d_fiber == 0.0:
            return d_base
        if d_base == 0.0:
            return d_fiber
        if self.p == 1.0:
            return d_base + d_fiber
        if self.p == 2.0:
            return math.hypot(d_base, d_fiber)
        return (d_base**self.p + d_fiber**self.p) ** (1.0 / self.p)

    def distance(self, pt, qt) -> float:
        self.validate_point(pt)
        self.validate_point(qt)
        return self.combine(
            self.base.distance(pt[0], qt[0]), abs(float(pt[1]) - float(qt[1]))
        )

    def step_toward(self, pt, qt, t: float):
        self.validate_point(pt)
        self.validate_point(qt)
        if t < 0:
            raise ValueError("negative travel budget")
        if t == 0.0:
            return (self.base.step_toward(pt[0], pt[0], 0.0), float(pt[1]))
        d_base = self.base.distance(pt[0], qt[0])
        ds = float(qt[1]) - float(pt[1])
        total = self.combine(d_base, abs(ds))
        if t >= total or total == 0.0:
            return (self.base.step_toward(qt[0], qt[0], 0.0), float(qt[1]))
        lam = t / total
        b = self.base.step_toward(pt[0], qt[0], lam * d_base)
        return (b, float(pt[1]) + lam * ds)

    def random_point(self, rng: np.random.Generator):
        return (self.base.random_point(rng), float(rng.uniform(0.0, self.fiber_length)))

    def describe(self) -> dict:
        return {
            "type": "product",
            "base": self.base.describe(),
            "fiber_length": repr(self.fiber_length),
            "p": repr(self.p),
        }

    def point_to_json(self, pt):
        return [self.base.point_to_json(pt[0]), float(pt[1])]

    def point_from_json(self, obj):
        pt = (self.base.point_from_json(obj[0]), float(obj[1]))
        self.validate_point(pt)
        return pt


# ---------------------------------------------------------------------------
# Polylines


@dataclass(frozen=True)
class Polyline:
    """Ordered list of points interpreted as concatenated geodesic segments."""

    points: tuple

    def __init__(self, points):
        object.__setattr__(self, "points", tuple(points))


def polyline_length(space: Space, path) -> float:
    """Total length of a polyline: sum of consecutive geodesic distances."""
    pts = path.points if isinstance(path, Polyline) else tuple(path)
    if len(pts) == 0:
        raise MalformedPathError("polyline has no points")
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += space.distance(a, b)
    return total


# ---------------------------------------------------------------------------
# Nets


@dataclass
class Net:
    """Finite sample of a space with a covering-radius bound and the full
    pairwise intrinsic distance matrix."""

    space: Space
    points: list
    h: float
    matrix: np.ndarray
    requested_h: float = 0.0
    _reach_cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.points)

    def nearest_index(self, point) -> int:
        dists = [self.space.distance(point, p) for p in self.points]
        return int(np.argmin(dists))

    def index_of(self, point, tol: float = 1e-9) -> int:
        """Index of a net point coinciding with ``point`` (within ``tol``)."""
        i = self.nearest_index(point)
        if self.space.distance(point, self.points[i]) > tol:
            raise MalformedPointError(f"point {point!r} is not aligned with the net")
        return i

    def describe(self) -> dict:
        return {
            "space": self.space.describe(),
            "size": self.size,
            "covering_radius": self.h,
            "requested_h": self.requested_h,
        }


def _graph_net(space: MetricGraphSpace, h: float):
    points = [space.vertex_point(v) for v in range(len(space.vertex_ids))]
    seen = {(int(p[0]), float(p[1])) for p in points}
    worst_spacing = 0.0
    for ei, (_, _, length) in enumerate(space.edges):
        nseg = max(1, math.ceil(length / h - 1e-12))
        spacing = length / nseg
        worst_spacing = max(worst_spacing, spacing)
        for j in range(1, nseg):
            pt = (ei, j * spacing)
            key = (int(pt[0]), float(pt[1]))
            if key not in seen:
                seen.add(key)
                points.append(pt)
    return points, worst_spacing / 2.0


def _ball_pitch(n: int, h: float) -> float:
    if n == 1:
        return h * math.sqrt(2.0)
    if n == 2:
        return h  # = h * sqrt(2/n); grid covers within h/sqrt(2)
    return h / math.sqrt(n)  # conservative: survives boundary clipping


def _ball_net(space: BallSpace, h: float):
    n, radius = space.dimension, space.radius
    pitch = _ball_pitch(n, h)
    if n == 1:
        m = max(1, math.ceil(2 * radius / pitch - 1e-12))
        xs = np.linspace(-radius, radius, m + 1)
        return [np.array([x]) for x in xs], (2 * radius / m) / 2.0
    half = math.ceil(radius / pitch)
    axis = np.arange(-half, half + 1) * pitch
    mesh = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    norms = np.linalg.norm(mesh, axis=1)
    inside = [mesh[i] for i in range(len(mesh)) if norms[i] <= radius + 1e-12]
    points = list(inside)
    if n == 2:
        m_ring = max(3, math.ceil(2 * math.pi * radius / h - 1e-12))
        for j in range(m_ring):
            ang = 2 * math.pi * j / m_ring
            pt = np.array([radius * math.cos(ang), radius * math.sin(ang)])
            if all(np.linalg.norm(pt - q) > 1e-12 for q in inside):
                points.append(pt)
    else:
        # project near-miss grid points onto the boundary to patch the rim
        shell = mesh[(norms > radius + 1e-12) & (norms <= radius + pitch * math.sqrt(n) / 2)]
        for g in shell:
            pt = g * (radius / np.linalg.norm(g))
            if all(np.linalg.norm(pt - q) > 1e-9 for q in points):
                points.append(pt)
    return points, h


def _circle_net(h: float):
    m = max(3, math.ceil(2 * math.pi / h - 1e-12))
    pts = [
        np.array([math.cos(2 * math.pi * j / m), math.sin(2 * math.pi * j / m)])
        for j in range(m)
    ]
    return pts, math.pi / m


_ICOSA_T = (1.0 + math.sqrt(5.0)) / 2.0
_ICOSA_VERTS = [
    (-1, _ICOSA_T, 0), (1, _ICOSA_T, 0), (-1, -_ICOSA_T, 0), (1, -_ICOSA_T, 0),
    (0, -1, _ICOSA_T), (0, 1, _ICOSA_T), (0, -1, -_ICOSA_T), (0, 1, -_ICOSA_T),
    (_ICOSA_T, 0, -1), (_ICOSA_T, 0, 1), (-_ICOSA_T, 0, -1), (-_ICOSA_T, 0, 1),
]
_ICOSA_FACES = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]


def _icosphere_net(space: SphereSpace, h: float, budget: int):
    verts = [np.array(v) / np.linalg.norm(v) for v in _ICOSA_VERTS]
    faces = list(_ICOSA_FACES)

    def max_edge(vs, fs):
        worst = 0.0
        for a, b, c in fs:
            for i, j in ((a, b), (b, c), (c, a)):
                worst = max(worst, space.distance(vs[i], vs[j]))
        return worst

    while max_edge(verts, faces) > h:
        # one subdivision quadruples faces and roughly quadruples vertices
        _check_budget(4 * len(verts), budget)
        cache = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        faces = new_faces

    cover = 0.0
    for a, b, c in faces:
        normal = np.cross(verts[b] - verts[a], verts[c] - verts[a])
        nn = np.linalg.norm(normal)
        if nn == 0:
            continue
        center = normal / nn
        if np.dot(center, verts[a] + verts[b] + verts[c]) < 0:
            center = -center
        cover = max(cover, space.distance(center, verts[a]))
    return verts, cover


def build_net(space: Space, h: float, point_budget: int = DEFAULT_POINT_BUDGET) -> Net:
    """Construct a net with covering radius at most ``h``.

    Metric graphs get all vertices plus points spaced at most ``h`` along each
    edge; balls an axis-aligned grid plus a boundary layer; the circle a
    uniform angular grid; the 2-sphere a subdivided icosphere; products the
    Cartesian product of factor nets.  Raises :class:`CapacityError` when the
    construction would exceed ``point_budget`` points.
    """
    if h <= 0:
        raise ConfigError("target covering radius must be positive")
    if isinstance(space, MetricGraphSpace):
        est = len(space.vertex_ids) + sum(
            max(0, math.ceil(w / h - 1e-12) - 1) for _, _, w in space.edges
        )
        _check_budget(est, point_budget)
        points, cover = _graph_net(space, h)
    elif isinstance(space, BallSpace):
        n = space.dimension
        axis_count = 2 * math.ceil(space.radius / _ball_pitch(n, h)) + 1
        if axis_count**n > 8 * point_budget:  # pre-check before grid allocation
            raise CapacityError("net points", axis_count**n, point_budget)
        points, cover = _ball_net(space, h)
        _check_budget(len(points), point_budget)
    elif isinstance(space, SphereSpace):
        if space.dimension == 1:
            points, cover = _circle_net(h)
        elif space.dimension == 2:
            points, cover = _icosphere_net(space, h, point_budget)
        else:
            raise ConfigError(
                "net construction is implemented for spheres of dimension 1 and 2 only"
            )
        _check_budget(len(points), point_budget)
    elif isinstance(space, ProductSpace):
        h_factor = h / 2.0 ** (1.0 / space.p)
        base_net = build_net(space.base, h_factor, point_budget)
        nseg = max(1, math.ceil(space.fiber_length / h_factor - 1e-12))
        fiber = [space.fiber_length * j / nseg for j in range(nseg + 1)]
        fiber_cover = (space.fiber_length / nseg) / 2.0
        _check_budget(base_net.size * len(fiber), point_budget)
        points = [(bp, s) for bp in base_net.points for s in fiber]
        d_base = np.repeat(
            np.repeat(base_net.matrix, len(fiber), axis=0), len(fiber), axis=1
        )
        svals = np.tile(np.asarray(fiber), base_net.size)
        d_fib = np.abs(svals[:, None] - svals[None, :])
        if space.p == 1.0:
            matrix = d_base + d_fib
        elif space.p == 2.0:
            matrix = np.hypot(d_base, d_fib)
        else:
            matrix = (d_base**space.p + d_fib**space.p) ** (1.0 / space.p)
            matrix = np.where(d_fib == 0.0, d_base, matrix)
            matrix = np.where(d_base == 0.0, d_fib, matrix)
        cover = space.combine(base_net.h, fiber_cover)
        return Net(space, points, cover, matrix, requested_h=h)
    else:
        raise ConfigError(f"no net construction for space kind {space.kind!r}")
    matrix = space.pairwise(points)
    return Net(space, points, min(cover, h), matrix, requested_h=h)


# ---------------------------------------------------------------------------
# JSON space descriptions


def _num(value) -> float:
    """Parse a number that may arrive as a decimal string."""
    if isinstance(value, str):
        return float(value)
    return float(value)


def space_from_config(cfg: dict) -> Space:
    """Build a space from its JSON description (see each class's ``describe``)."""
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ConfigError("space description must be an object with a 'type' field")
    kind = cfg["type"]
    try:
        if kind == "metric_graph":
            edges = [(u, v, _num(w)) for u, v, w in cfg["edges"]]
            return MetricGraphSpace(cfg["vertices"], edges)
        if kind == "ball":
            return BallSpace(int(cfg["dimension"]), _num(cfg.get("radius", 1.0)))
        if kind == "sphere":
            return SphereSpace(int(cfg["dimension"]))
        if kind == "product":
            return ProductSpace(
                space_from_config(cfg["base"]),
                _num(cfg.get("fiber_length", 1.0)),
                _num(cfg.get("p", 2.0)),
            )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad space description: {exc}") from exc
    raise ConfigError(f"unknown space type {kind!r}")
