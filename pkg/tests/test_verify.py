import json

import numpy as np
import pytest

from pursuit.errors import CapacityError, ConfigError
from pursuit.game import Agility
from pursuit.solver import solve_finite
from pursuit.spaces import build_net
from pursuit.verify import (
    LEMMA_IDS,
    default_pack,
    exhaustive_value,
    minmax_gap_probe,
    random_oracle_instances,
    run_suite,
    suite_passed,
)

from conftest import make_cycle, make_interval


def test_default_pack_all_pass():
    reports = run_suite()
    assert suite_passed(reports)
    exact = {"L1-equality", "step-monotone", "subdivision-monotone",
             "volatile-sandwich", "minmax-gap", "oracle-equivalence"}
    for r in reports:
        if r.lemma in exact:
            assert r.violation == 0.0
        else:
            assert r.violation <= 1e-9


def test_every_lemma_covered():
    reports = run_suite()
    covered = {r.lemma for r in reports}
    assert covered == set(LEMMA_IDS)


def test_suite_deterministic():
    a = [json.dumps(r.to_json(), sort_keys=True) for r in run_suite()]
    b = [json.dumps(r.to_json(), sort_keys=True) for r in run_suite()]
    assert a == b


def test_suite_respects_thread_cap(monkeypatch):
    monkeypatch.setenv("PURSUIT_THREADS", "1")
    serial = [json.dumps(r.to_json(), sort_keys=True) for r in run_suite()]
    monkeypatch.setenv("PURSUIT_THREADS", "3")
    pooled = [json.dumps(r.to_json(), sort_keys=True) for r in run_suite()]
    assert serial == pooled


def test_oversize_instance_guard():
    inst = default_pack()[0] | {"h": 0.05}  # 21 points > limit of 12
    with pytest.raises(CapacityError) as err:
        run_suite([inst])
    assert err.value.available == 12


def test_empty_pack_error():
    with pytest.raises(ConfigError):
        run_suite([])


# ---------------------------------------------------------------------------
# minmax gap probe


def test_probe_identity_coarse_gap_zero():
    net = build_net(make_cycle(2.0), 0.25)
    res = minmax_gap_probe(net, 1, Agility.uniform(0.25), 0.0, 4)
    assert res.gap == 0.0


def test_probe_interval_everything_captured():
    net = build_net(make_interval(1.0), 0.25)
    res = minmax_gap_probe(net, 1, Agility.uniform(0.5), 0.25, 4)
    assert res.gap == 0.0
    assert res.upper.max() == 0.0


def test_probe_cycle_gap_within_bound():
    space = make_cycle(4.0)
    fine = build_net(space, 0.25)
    coarse = build_net(space, 0.5)
    eps = 0.25
    res = minmax_gap_probe(fine, 1, Agility.uniform(0.5), eps, 8, coarse=coarse)
    assert 0.0 <= res.gap <= 4 * eps
    assert (res.upper >= res.lower - 1e-12).all()


def test_probe_rejects_foreign_coarse():
    fine = build_net(make_cycle(2.0), 0.25)
    alien = build_net(make_cycle(2.0), 0.35)  # 1/3 offsets, not on the fine grid
    with pytest.raises(ConfigError):
        minmax_gap_probe(fine, 1, Agility.uniform(0.5), 0.25, 2, coarse=alien)
    with pytest.raises(ConfigError):
        minmax_gap_probe(fine, 1, Agility.uniform(0.5), 0.25, 2, coarse=[0, 0, 1])


# ---------------------------------------------------------------------------
# oracle helpers


def test_exhaustive_matches_solver_on_randomized_instances():
    for net, k, taus in random_oracle_instances(5, seed=11):
        table, _ = solve_finite(net, k, taus)
        for tup in np.ndindex(*table.top.shape):
            assert table.top[tup] == exhaustive_value(net, k, taus, tup[0], tup[1:])


def test_random_instances_respect_caps():
    instances = random_oracle_instances(8, seed=2)
    assert len(instances) == 8
    for net, k, taus in instances:
        assert net.size <= 6
        assert 1 <= k <= 2
        assert 1 <= len(taus) <= 3


def test_random_instances_deterministic():
    a = random_oracle_instances(4, seed=9)
    b = random_oracle_instances(4, seed=9)
    for (na, ka, ta), (nb, kb, tb) in zip(a, b):
        assert ka == kb and ta == tb
        assert np.array_equal(na.matrix, nb.matrix)
