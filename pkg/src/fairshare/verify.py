"""Oracle-equivalence suites: certify the fast paths against slow ground truth.

Three independent suites, all seeded and deterministic:

* closed form vs exact: shapo payments against the subset-formula Shapley
  value over the full prioritized cost table, on random Euclidean and random
  non-metric matrices, in both modes;
* path-TSP vs enumeration: Held-Karp coalition costs against the exhaustive
  permutation minimum for every coalition, bitwise equal;
* coefficient counting: the rational pair coefficients aggregated from all
  n! join orders against the closed-form beta values.

Anything beyond 1e-9 relative deviation is reported as a failure with its
(seed, n, i) coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from .cost_model import (
    PRIORITIZED,
    ROUTING_PRIORITIZED,
    RideInstance,
    build_cost_table,
    coalition_members,
    optimal_open_path_cost,
)
from .exact_shapley import shapley_exact
from .road_graph import LAST_MILE, ROUTING_GAME
from .shapo import beta_fraction, pair_coefficient_counts, shapo_allocate
from .synthetic import random_instance

TOLERANCE = 1e-9


@dataclass(frozen=True)
class Failure:
    suite: str
    seed: int
    n: int
    i: int
    deviation: float


@dataclass(frozen=True)
class SuiteResult:
    name: str
    checks: int
    max_deviation: float
    failures: tuple[Failure, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.failures


def _rel_dev(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def closed_form_suite(n_max: int = 8, trials: int = 200, seed: int = 0, mode: str = LAST_MILE) -> SuiteResult:
    """Compare shapo payments to exact Shapley values on random matrices.

    Half the trials use Euclidean cores, half uniform symmetric non-metric
    cores; the equivalence never relies on the triangle inequality.
    """
    name = f"closed-form-vs-exact[{mode}]"
    model = ROUTING_PRIORITIZED if mode == ROUTING_GAME else PRIORITIZED
    worst = 0.0
    checks = 0
    failures = []
    for n in range(1, n_max + 1):
        for t in range(trials):
            rng = np.random.default_rng([seed, n, t])
            kind = "euclidean" if t % 2 == 0 else "symmetric"
            inst = random_instance(n, rng, mode=mode, kind=kind)
            fast = shapo_allocate(inst)
            slow = shapley_exact(build_cost_table(inst, model), n, inst.price_per_km)
            for i in range(n):
                dev = _rel_dev(fast.payments[i], slow.payments[i])
                worst = max(worst, dev)
                checks += 1
                if dev > TOLERANCE:
                    failures.append(Failure(name, seed, n, i + 1, dev))
    return SuiteResult(name, checks, worst, tuple(failures))


def _brute_force_path_cost(inst: RideInstance, s: int) -> float:
    d = inst.matrix.delta
    dummy = inst.n + 1
    best = math.inf
    for order in permutations(coalition_members(s)):
        acc = 0.0
        prev = 0
        for j in order:
            acc += d[prev, j]
            prev = j
        acc += d[prev, dummy]
        if acc < best:
            best = acc
    return best


def held_karp_suite(n_max: int = 8, trials: int = 5, seed: int = 0) -> SuiteResult:
    """Check Held-Karp against exhaustive enumeration, every coalition, bitwise.

    Both sides accumulate path legs left to right, so agreement is exact
    float equality, not a tolerance.  Enumeration is factorial, hence the
    small default trial count.
    """
    name = "held-karp-vs-enumeration"
    worst = 0.0
    checks = 0
    failures = []
    for n in range(2, min(n_max, 8) + 1):
        for t in range(trials):
            rng = np.random.default_rng([seed, n, t])
            kind = "euclidean" if t % 2 == 0 else "symmetric"
            mode = LAST_MILE if t % 3 else ROUTING_GAME
            inst = random_instance(n, rng, mode=mode, kind=kind)
            for s in range(1, 1 << n):
                fast = optimal_open_path_cost(inst, s)
                slow = _brute_force_path_cost(inst, s)
                checks += 1
                if fast != slow:
                    dev = _rel_dev(fast, slow)
                    worst = max(worst, dev)
                    failures.append(Failure(name, seed, n, s, max(dev, math.ulp(slow))))
    return SuiteResult(name, checks, worst, tuple(failures))


def coefficient_suite(n_max: int = 7) -> SuiteResult:
    """Recover every beta coefficient from join-order counting, exactly.

    For each passenger the aggregated counts must match beta as rationals on
    every pair that can carry a nonzero distance.  The dummy pair (0, n + 1)
    always multiplies a zero distance; its count aggregates to -1/n, which
    this suite pins as well so the convention stays visible.
    """
    name = "coefficient-counts"
    checks = 0
    failures = []
    for n in range(2, n_max + 1):
        for i in range(1, n + 1):
            counts = pair_coefficient_counts(n, i)
            expected: dict[tuple[int, int], Fraction] = {}
            for p in range(0, i + 1):
                for q in range(i, n + 2):
                    if p == q:
                        continue
                    if (p, q) == (0, n + 1):
                        expected[(p, q)] = Fraction(-1, n)
                    else:
                        mode = ROUTING_GAME if q == n + 1 else LAST_MILE
                        expected[(p, q)] = beta_fraction(i, p, q, n, mode)
            for pair, want in expected.items():
                got = counts.get(pair, Fraction(0))
                checks += 1
                if got != want:
                    failures.append(Failure(name, 0, n, i, abs(float(got - want))))
            for pair in set(counts) - set(expected):
                checks += 1
                failures.append(Failure(name, 0, n, i, abs(float(counts[pair]))))
    worst = max((f.deviation for f in failures), default=0.0)
    return SuiteResult(name, checks, worst, tuple(failures))


def run_all(n_max: int = 8, trials: int = 200, seed: int = 0) -> list[SuiteResult]:
    """All suites at a shared budget; the enumeration suite divides it down.

    ``trials=0`` runs nothing and therefore passes vacuously; callers should
    warn when they see zero checks.
    """
    return [
        closed_form_suite(n_max, trials, seed, LAST_MILE),
        closed_form_suite(n_max, trials, seed, ROUTING_GAME),
        held_karp_suite(n_max, max(1, trials // 40) if trials else 0, seed),
        coefficient_suite(min(n_max, 7)) if trials else SuiteResult("coefficient-counts", 0, 0.0),
    ]
