import math

import numpy as np
import pytest

from pursuit.spaces import BallSpace, MetricGraphSpace, ProductSpace, SphereSpace


def make_cycle(total_length: float = 2.0) -> MetricGraphSpace:
    """Cycle as a 2-vertex, 2-edge metric graph; edge ids 0 and 1."""
    half = total_length / 2.0
    return MetricGraphSpace(["u", "v"], [("u", "v", half), ("u", "v", half)])


def cycle_point(space: MetricGraphSpace, s: float):
    """Point at arc position ``s`` in [0, total); edge 0 covers [0, half]."""
    half = space.edges[0][2]
    total = 2 * half
    s = s % total
    if s <= half:
        return (0, s)
    return (1, total - s)


def make_interval(length: float = 1.0) -> MetricGraphSpace:
    return MetricGraphSpace(["a", "b"], [("a", "b", length)])


def make_star(arms: int = 3, arm_length: float = 1.0) -> MetricGraphSpace:
    vertices = ["c"] + [f"t{i}" for i in range(arms)]
    edges = [("c", f"t{i}", arm_length) for i in range(arms)]
    return MetricGraphSpace(vertices, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def cycle2():
    return make_cycle(2.0)


@pytest.fixture
def interval():
    return make_interval(1.0)


@pytest.fixture
def ball2():
    return BallSpace(2, 1.0)


@pytest.fixture
def circle():
    return SphereSpace(1)


@pytest.fixture
def cylinder(cycle2):
    return ProductSpace(make_cycle(2 * math.pi), fiber_length=1.0, p=2.0)
