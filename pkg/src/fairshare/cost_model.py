"""Coalition cost models for shared rides.

A coalition is an int bitmask over passengers: bit ``i - 1`` set means
passenger ``i`` (matrix row ``i``) is on board.  Two families of costs are
supported:

* prioritized: the vehicle visits coalition members in the fixed drop-off
  order, so cost is the chain of consecutive legs;
* non-prioritized: the vehicle may reorder members, so cost is the optimal
  open path from the depot through all of them (a path-TSP solve).

Either family can run over a last-mile matrix (ride ends at the final
drop-off) or a routing-game matrix (ride returns to the depot); the distinction
lives entirely in the matrix's dummy column, which both cost functions always
include as the final leg.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CapacityError, ValidationError
from .road_graph import ROUTING_GAME, DistanceMatrix

PRIORITIZED = "prioritized"
NON_PRIORITIZED = "non-prioritized"
ROUTING_PRIORITIZED = "routing-game-prioritized"
ROUTING_NON_PRIORITIZED = "routing-game-non-prioritized"
COST_MODELS = (PRIORITIZED, NON_PRIORITIZED, ROUTING_PRIORITIZED, ROUTING_NON_PRIORITIZED)

GIVEN_ORDER = "given-order"
OPTIMAL_ORDER = "optimal"

# Bitmask caps: cost tables hold 2^n entries and the path-TSP sweep keeps a
# 2^n x n state, so these bound memory, not correctness.
MAX_CHAIN_PASSENGERS = 24
MAX_TSP_PASSENGERS = 20


@dataclass(frozen=True)
class RideInstance:
    """One shared ride: a distance matrix plus the fare conversion rate.

    Distances are in meters; allocations convert to currency at
    ``price_per_km`` only when payments are produced.
    """

    matrix: DistanceMatrix
    price_per_km: float = 1.0

    def __post_init__(self):
        if self.matrix.n < 1:
            raise ValidationError("a ride needs at least one passenger")
        if not math.isfinite(self.price_per_km) or self.price_per_km < 0:
            raise ValidationError(f"price_per_km must be finite and >= 0, got {self.price_per_km!r}")

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def full_coalition(self) -> int:
        return (1 << self.n) - 1

    def to_currency(self, meters: float) -> float:
        return meters * self.price_per_km / 1000.0


def coalition_members(s: int) -> list[int]:
    """Passenger indices (1-based) present in bitmask ``s``, ascending."""
    members = []
    while s:
        low = s & -s
        members.append(low.bit_length())
        s ^= low
    return members


def chain_cost(inst: RideInstance, s: int) -> float:
    """Cost of serving coalition ``s`` in the fixed drop-off order.

    Legs run depot -> members of ``s`` by ascending index -> dummy.  The
    dummy leg is zero in last-mile mode and the return to depot in
    routing-game mode, so no case split is needed here.
    """
    _check_coalition(inst, s, MAX_CHAIN_PASSENGERS)
    d = inst.matrix.delta
    prev = 0
    total = 0.0
    rest = s
    while rest:
        low = rest & -rest
        i = low.bit_length()
        total += d[prev, i]
        prev = i
        rest ^= low
    return float(total + d[prev, inst.n + 1])


def optimal_open_path_cost(inst: RideInstance, s: int) -> float:
    """Cheapest way to serve coalition ``s`` when the order is free.

    Held-Karp over the members of ``s``: ``g(S, j)`` is the cheapest path
    from the depot through ``S`` ending at ``j``; the answer appends the
    dummy leg, which closes the tour in routing-game mode.
    """
    members = coalition_members(s)
    m = len(members)
    _check_coalition(inst, s, MAX_TSP_PASSENGERS)
    if m == 0:
        return 0.0
    d = inst.matrix.delta
    dummy = inst.n + 1
    inf = math.inf
    size = 1 << m
    g = [[inf] * m for _ in range(size)]
    for j in range(m):
        g[1 << j][j] = d[0, members[j]]
    for mask in range(1, size):
        row = g[mask]
        if mask & (mask - 1) == 0:
            continue
        for j in range(m):
            bit = 1 << j
            if not mask & bit:
                continue
            prev_mask = mask ^ bit
            prev_row = g[prev_mask]
            mj = members[j]
            best = inf
            for k in range(m):
                if not prev_mask & (1 << k):
                    continue
                cand = prev_row[k] + d[members[k], mj]
                if cand < best:
                    best = cand
            row[j] = best
    last = g[size - 1]
    return float(min(last[j] + d[members[j], dummy] for j in range(m)))


@dataclass(frozen=True)
class CoalitionCostTable:
    """Dense table of coalition costs, indexed by bitmask.

    ``costs[s]`` is the cost (in meters) of coalition ``s`` under ``model``;
    the list has exactly ``2**n`` entries and ``costs[0] == 0``.
    """

    model: str
    n: int
    costs: tuple[float, ...]

    def __post_init__(self):
        if self.model not in COST_MODELS:
            raise ValidationError(f"unknown cost model {self.model!r}; expected one of {COST_MODELS}")
        if len(self.costs) != 1 << self.n:
            raise ValidationError(f"cost table for n={self.n} needs {1 << self.n} entries, got {len(self.costs)}")

    @property
    def grand_cost(self) -> float:
        return self.costs[(1 << self.n) - 1]


def build_cost_table(
    inst: RideInstance,
    model: str,
    grand_coalition: str = GIVEN_ORDER,
) -> CoalitionCostTable:
    """Costs of all ``2**n`` coalitions of ``inst`` under ``model``.

    For the non-prioritized models the grand coalition defaults to the
    given-order chain cost (the operator announced that route; subcoalitions
    still reroute freely when bargaining).  Pass ``grand_coalition="optimal"``
    to cost the grand coalition by the optimal path as well.
    """
    if model not in COST_MODELS:
        raise ValidationError(f"unknown cost model {model!r}; expected one of {COST_MODELS}")
    if grand_coalition not in (GIVEN_ORDER, OPTIMAL_ORDER):
        raise ValidationError(f"grand_coalition must be {GIVEN_ORDER!r} or {OPTIMAL_ORDER!r}, got {grand_coalition!r}")
    routing = inst.matrix.mode == ROUTING_GAME
    if model.startswith("routing-game") != routing:
        raise ValidationError(f"cost model {model!r} does not match matrix mode {inst.matrix.mode!r}")
    n = inst.n
    prioritized = model in (PRIORITIZED, ROUTING_PRIORITIZED)
    cap = MAX_CHAIN_PASSENGERS if prioritized else MAX_TSP_PASSENGERS
    if n > cap:
        raise CapacityError(f"n={n} exceeds the {model} cap of {cap} passengers")
    d = inst.matrix.delta
    dummy = n + 1
    size = 1 << n
    if prioritized:
        # chain prefix reuse: drop the dummy leg of the highest member, append two legs
        prefix = [0.0] * size
        costs = [0.0] * size
        for s in range(1, size):
            high = s.bit_length()
            rest = s & ~(1 << (high - 1))
            tail = rest.bit_length()  # 0 means the depot
            prefix[s] = prefix[rest] + d[tail, high]
            costs[s] = float(prefix[s] + d[high, dummy])
        return CoalitionCostTable(model, n, tuple(costs))

    inf = math.inf
    g = [[inf] * (n + 1) for _ in range(size)]
    for j in range(1, n + 1):
        g[1 << (j - 1)][j] = d[0, j]
    for mask in range(1, size):
        if mask & (mask - 1) == 0:
            continue
        row = g[mask]
        for j in range(1, n + 1):
            bit = 1 << (j - 1)
            if not mask & bit:
                continue
            prev_row = g[mask ^ bit]
            best = inf
            for k in range(1, n + 1):
                if not (mask ^ bit) & (1 << (k - 1)):
                    continue
                cand = prev_row[k] + d[k, j]
                if cand < best:
                    best = cand
            row[j] = best
    costs = [0.0] * size
    for s in range(1, size):
        row = g[s]
        costs[s] = float(min(row[j] + d[j, dummy] for j in range(1, n + 1) if s & (1 << (j - 1))))
    if grand_coalition == GIVEN_ORDER:
        costs[size - 1] = chain_cost(inst, size - 1)
    return CoalitionCostTable(model, n, tuple(costs))


def _check_coalition(inst: RideInstance, s: int, cap: int) -> None:
    if s < 0 or s >> inst.n:
        raise ValidationError(f"coalition {s:#x} is not a subset of the {inst.n} passengers")
    if inst.n > cap:
        raise CapacityError(f"n={inst.n} exceeds the cap of {cap} passengers")
