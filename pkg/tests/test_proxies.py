"""Proportional baseline rules: depot, shortcut, reroute."""

from __future__ import annotations

import math

import numpy as np
import pytest

from fairshare import (
    DistanceMatrix,
    ROUTING_GAME,
    RideInstance,
    chain_cost,
    depot_distance,
    rerouted_margin,
    shortcut_distance,
)
from fairshare.synthetic import random_instance

ALL_PROXIES = (depot_distance, shortcut_distance, rerouted_margin)


def test_depot_line(line_instance, payments_close):
    alloc = depot_distance(line_instance)
    # depot distances 1 km and 2 km split the $2 fare 1:2
    assert alloc.rule == "depot"
    assert payments_close(alloc.payments, (2 / 3, 4 / 3))
    assert not alloc.flags


def test_shortcut_line(line_instance, payments_close):
    alloc = shortcut_distance(line_instance)
    # u1 lies on the way to u2, so skipping u1 saves nothing
    assert payments_close(alloc.payments, (0.0, 2.0))


def test_reroute_line(line_instance, payments_close):
    alloc = rerouted_margin(line_instance)
    # dropping u1 still costs the full 2 km; dropping u2 halves the ride
    assert payments_close(alloc.payments, (0.0, 2.0))


def test_proxies_charge_full_ride_to_single_passenger():
    core = np.array([[0.0, 700.0], [700.0, 0.0]])
    inst = RideInstance(DistanceMatrix.from_points(core))
    for proxy in ALL_PROXIES:
        assert proxy(inst).payments == (0.7,)


def test_bitwise_efficiency_on_random_instances():
    rng = np.random.default_rng(10)
    for trial in range(200):
        n = int(rng.integers(1, 9))
        mode = ROUTING_GAME if trial % 2 else "last-mile"
        kind = "symmetric" if trial % 3 == 0 else "euclidean"
        price = float(10.0 ** rng.integers(-3, 4))
        inst = random_instance(n, rng, mode=mode, kind=kind, price_per_km=price)
        target = inst.to_currency(chain_cost(inst, inst.full_coalition))
        for proxy in ALL_PROXIES:
            alloc = proxy(inst)
            assert math.fsum(alloc.payments) == target
            assert alloc.total == target


def test_depot_shares_ignore_visit_order():
    # same destinations, two visit orders: depot shares are order-blind,
    # shortcut and reroute track the actual chain
    rng = np.random.default_rng(11)
    inst = random_instance(4, rng)
    core = inst.matrix.delta[:-1, :-1]
    perm = [0, 3, 1, 4, 2]  # depot fixed, passengers shuffled
    swapped = RideInstance(DistanceMatrix.from_points(core[np.ix_(perm, perm)]))

    def shares(alloc):
        return [p / alloc.total for p in alloc.payments]

    base = shares(depot_distance(inst))
    moved = shares(depot_distance(swapped))
    assert moved == pytest.approx([base[i - 1] for i in perm[1:]], rel=1e-12)
    assert shortcut_distance(swapped).payments != shortcut_distance(inst).payments


def test_equal_split_fallback_when_all_scores_vanish():
    # both passengers at the depot: every score is zero, fare is zero
    core = np.zeros((3, 3))
    inst = RideInstance(DistanceMatrix.from_points(core))
    for proxy in ALL_PROXIES:
        alloc = proxy(inst)
        assert alloc.payments == (0.0, 0.0)
        assert "equal-split-fallback" in alloc.flags


def test_equal_split_fallback_splits_nonzero_fare():
    # co-located passengers away from the depot zero out the shortcut scores
    # but leave a real fare to divide
    core = np.array([[0.0, 600.0, 600.0], [600.0, 0.0, 0.0], [600.0, 0.0, 0.0]])
    inst = RideInstance(DistanceMatrix.from_points(core))
    alloc = shortcut_distance(inst)
    assert "equal-split-fallback" in alloc.flags
    assert alloc.payments == (0.3, 0.3)


def test_negative_share_flagged_on_non_metric_matrix():
    # triangle-violating core: hopping through the middle stop beats the
    # direct leg, so skipping it has negative value under the shortcut score
    core = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
    inst = RideInstance(DistanceMatrix.from_points(core))
    alloc = shortcut_distance(inst)
    assert "negative-share" in alloc.flags
    assert math.fsum(alloc.payments) == alloc.total


def test_proxy_cost_model_tracks_matrix_mode():
    rng = np.random.default_rng(12)
    last = random_instance(3, rng)
    routing = random_instance(3, rng, mode=ROUTING_GAME)
    assert depot_distance(last).cost_model == "prioritized"
    assert depot_distance(routing).cost_model == "routing-game-prioritized"
