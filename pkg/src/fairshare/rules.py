"""Allocation-rule registry shared by the CLI and the benchmark harness."""

from __future__ import annotations

from typing import Callable

from .cost_model import GIVEN_ORDER, RideInstance, build_cost_table
from .errors import ValidationError
from .exact_shapley import Allocation, shapley_exact
from .proxies import depot_distance, rerouted_margin, shortcut_distance
from .road_graph import ROUTING_GAME
from .shapo import shapo_allocate

RULE_IDS = ("exact", "shapo", "shapo-routing", "depot", "shortcut", "reroute")


def exact_allocation(inst: RideInstance, cost_model: str, grand_coalition: str = GIVEN_ORDER) -> Allocation:
    """Exact Shapley payments for ``inst``: builds the full 2^n cost table first."""
    table = build_cost_table(inst, cost_model, grand_coalition)
    return shapley_exact(table, inst.n, inst.price_per_km)


def rule_function(
    rule: str,
    cost_model: str,
    grand_coalition: str = GIVEN_ORDER,
) -> Callable[[RideInstance], Allocation]:
    """Resolve a rule id to an allocation callable.

    ``cost_model`` and ``grand_coalition`` only affect the ``exact`` rule;
    every other rule is fully determined by the instance itself.
    """
    if rule == "exact":
        return lambda inst: exact_allocation(inst, cost_model, grand_coalition)
    if rule == "shapo":
        return shapo_allocate
    if rule == "shapo-routing":
        return lambda inst: shapo_allocate(inst, mode=ROUTING_GAME)
    if rule == "depot":
        return depot_distance
    if rule == "shortcut":
        return shortcut_distance
    if rule == "reroute":
        return rerouted_margin
    raise ValidationError(f"unknown rule {rule!r}; expected one of {RULE_IDS}")
