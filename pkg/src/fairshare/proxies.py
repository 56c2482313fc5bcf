"""Baseline cost-sharing proxies.

Each proxy splits the actual route cost c(D) (the given-order chain cost,
including the terminal dummy leg) proportionally to a per-passenger score:

* depot:    score_i = delta(d_0, d_i), direct distance from the depot;
* shortcut: score_i = delta(d_{i-1}, d_i) + delta(d_i, d_{i+1})
                      - delta(d_{i-1}, d_{i+1}), the detour saved by
            skipping d_i in the chain (index n + 1 is the dummy);
* reroute:  score_i = c(D) - c_opt(D without d_i), the margin against an
            optimally rerouted ride that drops passenger i.

All three are efficient by construction: payments sum to the ride cost
bitwise, with the float rounding residual of the proportional split folded
into the largest payment.  None of them is the Shapley value; they are the
comparison baselines for the benchmark harness.
"""

from __future__ import annotations

import math

from .cost_model import (
    PRIORITIZED,
    ROUTING_PRIORITIZED,
    RideInstance,
    chain_cost,
    optimal_open_path_cost,
)
from .exact_shapley import Allocation
from .road_graph import ROUTING_GAME


def _chain_model(inst: RideInstance) -> str:
    return ROUTING_PRIORITIZED if inst.matrix.mode == ROUTING_GAME else PRIORITIZED


def _fold_residual(payments: list[float], total: float) -> list[float]:
    """Nudge payments by ulps until math.fsum(payments) == total bitwise.

    The bulk of the residual lands in the largest payment; a short
    single-ulp walk then absorbs any half-ulp tie, rotating absorbers if a
    tie oscillates.  Distortion is at most a few ulps of one payment.
    """
    pay = list(payments)
    if not pay:
        return pay
    order = sorted(range(len(pay)), key=lambda t: abs(pay[t]), reverse=True)
    err = math.fsum(pay) - total
    if err:
        pay[order[0]] -= err
        err = math.fsum(pay) - total
    steps = 0
    pos = 0
    while err and steps < 120:
        j = order[pos]
        pay[j] = math.nextafter(pay[j], pay[j] - err)
        err = math.fsum(pay) - total
        steps += 1
        if steps % 8 == 0:
            pos = (pos + 1) % len(order)
    return pay


def _proportional(rule: str, inst: RideInstance, scores: list[float]) -> Allocation:
    """Split the given-order ride cost proportionally to ``scores``.

    A zero denominator (every score zero, or exact cancellation) falls back
    to an equal split and flags the allocation; negative scores are kept but
    flagged, since hand-entered non-metric matrices can produce them.
    """
    total = inst.to_currency(chain_cost(inst, inst.full_coalition))
    denom = math.fsum(scores)
    flags = []
    if any(s < 0 for s in scores):
        flags.append("negative-share")
    if denom == 0.0:
        flags.append("equal-split-fallback")
        payments = [total / inst.n] * inst.n
    else:
        payments = [s / denom * total for s in scores]
    payments = _fold_residual(payments, total)
    return Allocation(rule, tuple(payments), math.fsum(payments), _chain_model(inst), tuple(flags))


def depot_distance(inst: RideInstance) -> Allocation:
    """Split the ride cost proportionally to each depot-to-destination distance."""
    d = inst.matrix.delta
    scores = [float(d[0, i]) for i in range(1, inst.n + 1)]
    return _proportional("depot", inst, scores)


def shortcut_distance(inst: RideInstance) -> Allocation:
    """Split the ride cost proportionally to each passenger's chain detour.

    The last passenger's detour ends at the dummy, so in last-mile mode it
    degenerates to the final leg delta(d_{n-1}, d_n).
    """
    d = inst.matrix.delta
    n = inst.n
    scores = [float(d[i - 1, i] + d[i, i + 1] - d[i - 1, i + 1]) for i in range(1, n + 1)]
    return _proportional("shortcut", inst, scores)


def rerouted_margin(inst: RideInstance) -> Allocation:
    """Split the ride cost proportionally to optimal-reroute margins.

    Each score solves one path-TSP on the remaining passengers, so this
    proxy costs n Held-Karp solves per ride and is the slowest baseline by
    far.
    """
    total_m = chain_cost(inst, inst.full_coalition)
    full = inst.full_coalition
    scores = [total_m - optimal_open_path_cost(inst, full ^ (1 << (i - 1))) for i in range(1, inst.n + 1)]
    return _proportional("reroute", inst, scores)
