"""Closed-form Shapley values for prioritized drop-off orders.

When coalition cost is the chain cost of a fixed drop-off priority, each
passenger's Shapley value collapses to a weighted sum of pairwise distances

    phi(u_i) = sum over pairs (p, q), p <= i <= q, p != q  of
               beta(i, p, q) * delta(d_p, d_q)

with rational weights that depend only on the indices, never on the
distances.  That makes the allocation O(n^3) overall instead of exponential.
The weights arise by counting, over all n! join orders, how often d_p and
d_q end up as passenger i's chain neighbors (:func:`marginal_via_neighbors`
gives the three-term marginal behind that counting argument).

In routing-game mode the ride closes back at the depot, which adds the pairs
q = n + 1 whose distance column equals the depot's.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial
from typing import Iterable

from .cost_model import PRIORITIZED, ROUTING_PRIORITIZED, RideInstance
from .errors import ValidationError
from .exact_shapley import Allocation, _finish
from .road_graph import LAST_MILE, MODES, ROUTING_GAME, DistanceMatrix


def _beta_ratio(i: int, p: int, q: int, n: int, mode: str) -> tuple[int, int]:
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}; expected one of {MODES}")
    q_max = n + 1 if mode == ROUTING_GAME else n
    if not 1 <= i <= n:
        raise ValidationError(f"passenger index i={i} out of range 1..{n}")
    if not (0 <= p <= i <= q <= q_max) or p == q:
        raise ValidationError(f"(p, q)=({p}, {q}) is not a valid pair for i={i}, n={n}, mode={mode!r}")
    if q == n + 1:
        if p == i:
            return 1, n - i + 1
        return -1, (n - p) * (n - p + 1)
    if p == 0:
        if q == i:
            return 1, i
        return -1, q * (q - 1)
    if q == i:
        return 1, (i - p) * (i - p + 1)
    if p == i:
        return 1, (q - i) * (q - i + 1)
    return -2, (q - p - 1) * (q - p) * (q - p + 1)


def beta(i: int, p: int, q: int, n: int, mode: str = LAST_MILE) -> float:
    """Weight of delta(d_p, d_q) in passenger i's closed-form Shapley value.

    Evaluated as a single correctly-rounded float division of small exact
    integers; :func:`beta_fraction` is the exact-rational twin.
    """
    num, den = _beta_ratio(i, p, q, n, mode)
    return num / den


def beta_fraction(i: int, p: int, q: int, n: int, mode: str = LAST_MILE) -> Fraction:
    """Exact rational value of :func:`beta`, for coefficient certification."""
    num, den = _beta_ratio(i, p, q, n, mode)
    return Fraction(num, den)


@lru_cache(maxsize=128)
def _pair_weights(n: int, mode: str) -> tuple[tuple[tuple[int, int, float], ...], ...]:
    """Per passenger i (1-based): all (p, q, beta) triples of its pair sum."""
    q_max = n + 1 if mode == ROUTING_GAME else n
    table = []
    for i in range(1, n + 1):
        triples = []
        for p in range(0, i + 1):
            for q in range(i, q_max + 1):
                if p == q:
                    continue
                triples.append((p, q, beta(i, p, q, n, mode)))
        table.append(tuple(triples))
    return tuple(table)


def shapo_allocate(inst: RideInstance, mode: str | None = None) -> Allocation:
    """Closed-form Shapley payments for the prioritized cost model.

    The mode is taken from the instance's matrix; passing ``mode`` merely
    asserts it.  Rule id is ``shapo`` on last-mile matrices and
    ``shapo-routing`` on routing-game matrices.
    """
    m = inst.matrix
    if mode is not None and mode != m.mode:
        raise ValidationError(f"requested mode {mode!r} but the instance matrix is {m.mode!r}")
    routing = m.mode == ROUTING_GAME
    weights = _pair_weights(inst.n, m.mode)
    d = m.delta.tolist()
    payments = []
    for triples in weights:
        acc = 0.0
        for p, q, w in triples:
            acc += w * d[p][q]
        payments.append(acc)
    rule = "shapo-routing" if routing else "shapo"
    model = ROUTING_PRIORITIZED if routing else PRIORITIZED
    return _finish(rule, payments, inst.price_per_km, model)


def chain_neighbors(i: int, predecessors: Iterable[int], n: int) -> tuple[int, int]:
    """Chain neighbors of passenger ``i`` among ``predecessors``.

    Inserting ``i`` into the priority chain formed by the predecessor set
    places it between ``l``, the largest predecessor index below ``i`` (0 for
    the depot), and ``r``, the smallest above (n + 1 for the terminal dummy).
    """
    if not 1 <= i <= n:
        raise ValidationError(f"passenger index i={i} out of range 1..{n}")
    l, r = 0, n + 1
    for j in predecessors:
        if j == i or not 1 <= j <= n:
            raise ValidationError(f"invalid predecessor {j} for i={i}, n={n}")
        if j < i:
            if j > l:
                l = j
        elif j < r:
            r = j
    return l, r


def marginal_via_neighbors(i: int, order: Iterable[int], m: DistanceMatrix) -> float:
    """Marginal chain cost of ``i`` joining after its predecessors in ``order``.

    ``order`` is a full join sequence over passengers 1..n.  Only three legs
    change when ``i`` is inserted between its chain neighbors, so the
    marginal is delta(l, i) + delta(i, r) - delta(l, r) regardless of n.
    """
    seq = list(order)
    n = m.n
    if sorted(seq) != list(range(1, n + 1)):
        raise ValidationError(f"order must be a permutation of 1..{n}, got {seq}")
    l, r = chain_neighbors(i, seq[: seq.index(i)], n)
    d = m.delta
    return float(d[l, i] + d[i, r] - d[l, r])


def pair_coefficient_counts(n: int, i: int) -> dict[tuple[int, int], Fraction]:
    """Aggregate pair coefficients of passenger ``i`` over all n! join orders.

    Every join order contributes +1 to the pairs (l, i) and (i, r) and -1 to
    (l, r), per the three-term marginal.  Dividing the integer counts by n!
    recovers each beta(i, p, q) as an exact rational, for every pair that can
    carry a nonzero distance (the zero-distance pair (0, n + 1) aggregates to
    -1/n instead; its weight never matters because delta(d_0, d_{n+1}) = 0 in
    both modes).
    """
    if not 1 <= i <= n:
        raise ValidationError(f"passenger index i={i} out of range 1..{n}")
    counts: dict[tuple[int, int], int] = {}
    for perm in permutations(range(1, n + 1)):
        l, r = chain_neighbors(i, perm[: perm.index(i)], n)
        counts[(l, i)] = counts.get((l, i), 0) + 1
        counts[(i, r)] = counts.get((i, r), 0) + 1
        counts[(l, r)] = counts.get((l, r), 0) - 1
    total = factorial(n)
    return {pair: Fraction(c, total) for pair, c in counts.items() if c}
