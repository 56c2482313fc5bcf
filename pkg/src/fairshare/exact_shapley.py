"""Exact Shapley values over dense coalition cost tables.

The production path is the subset formula

    phi(u_i) = sum over S not containing i of
               |S|! (n - |S| - 1)! / n!  *  (c(S + i) - c(S))

which visits each of the ``2**n`` coalitions once per passenger.  A
permutation-average formulation is kept alongside as an independent
cross-check for tests; it is exponentially slower and never used in
production paths.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import permutations

from .cost_model import CoalitionCostTable
from .errors import ValidationError


@dataclass(frozen=True)
class Allocation:
    """Per-passenger payments in currency for one ride under one rule."""

    rule: str
    payments: tuple[float, ...]
    total: float
    cost_model: str | None = None
    flags: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.payments)

    def to_dict(self) -> dict:
        out = {
            "rule": self.rule,
            "n": self.n,
            "payments": list(self.payments),
            "total": self.total,
            "cost_model": self.cost_model,
        }
        if self.flags:
            out["flags"] = list(self.flags)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _finish(rule: str, payments_m: list[float], price_per_km: float, model: str | None, flags=()) -> Allocation:
    payments = tuple(float(p) * price_per_km / 1000.0 for p in payments_m)
    return Allocation(rule, payments, math.fsum(payments), model, tuple(flags))


def shapley_exact(table: CoalitionCostTable, n: int, price_per_km: float = 1.0) -> Allocation:
    """Exact Shapley payments for all ``n`` passengers from a full cost table."""
    if n != table.n:
        raise ValidationError(f"table is for n={table.n}, not n={n}")
    costs = table.costs
    size = 1 << n
    fact = [math.factorial(k) for k in range(n + 1)]
    # exact integer factorials, one correctly-rounded float division per size
    weight = [fact[k] * fact[n - 1 - k] / fact[n] for k in range(n)]
    payments = [0.0] * n
    for i in range(n):
        bit = 1 << i
        acc = 0.0
        for s in range(size):
            if s & bit:
                continue
            acc += weight[s.bit_count()] * (costs[s | bit] - costs[s])
        payments[i] = acc
    return _finish("exact", payments, price_per_km, table.model)


def shapley_by_permutations(table: CoalitionCostTable, n: int, price_per_km: float = 1.0) -> Allocation:
    """Shapley payments as the average marginal cost over all ``n!`` join orders.

    Test oracle only: O(n! * n) and numerically independent of
    :func:`shapley_exact`.
    """
    if n != table.n:
        raise ValidationError(f"table is for n={table.n}, not n={n}")
    costs = table.costs
    sums = [0.0] * n
    count = 0
    for order in permutations(range(n)):
        mask = 0
        for i in order:
            bit = 1 << i
            sums[i] += costs[mask | bit] - costs[mask]
            mask |= bit
        count += 1
    payments = [s / count for s in sums]
    return _finish("exact-permutation", payments, price_per_km, table.model)
