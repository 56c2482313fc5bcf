"""Benchmark harness: sample rides, run allocation rules, aggregate metrics.

The protocol mirrors a city-scale evaluation: fix a road network and a
depot, sample n destination vertices uniformly at random, set the drop-off
order to an optimal open path, then compare each rule's payments against the
exact Shapley value of the non-prioritized game under five error metrics.
Every iteration draws its own RNG stream from the master seed, so results
are independent of execution order; wall-clock is measured around the
allocation call only.

This module produces plain data (rows of means per rule and passenger
count); serialization and figures live in :mod:`fairshare.report`.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .cost_model import (
    GIVEN_ORDER,
    MAX_TSP_PASSENGERS,
    NON_PRIORITIZED,
    COST_MODELS,
    RideInstance,
)
from .errors import CapacityError, FairshareError, ValidationError
from .exact_shapley import Allocation
from .road_graph import LAST_MILE, ROUTING_GAME, DistanceMatrix, RoadGraph, build_distance_matrix, read_graph, shortest_distances
from .rules import RULE_IDS, exact_allocation, rule_function
from .synthetic import FAMILIES, family_graph

DEFAULT_RULES = ("exact", "shapo", "depot", "shortcut", "reroute")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a benchmark run depends on, seed included."""

    passenger_counts: tuple[int, ...] = (3, 4, 5, 6, 7, 8, 9)
    iterations: int = 100
    seed: int = 0
    graph_source: str = "euclidean:250"
    depot: int = 0
    price_per_km: float = 1.0
    cost_model: str = NON_PRIORITIZED
    rules: tuple[str, ...] = DEFAULT_RULES
    exclude_depot: bool = False
    grand_coalition: str = GIVEN_ORDER

    def __post_init__(self):
        object.__setattr__(self, "passenger_counts", tuple(int(n) for n in self.passenger_counts))
        object.__setattr__(self, "rules", tuple(self.rules))
        if self.iterations < 1:
            raise ValidationError(f"iterations must be >= 1, got {self.iterations}")
        if not self.passenger_counts:
            raise ValidationError("passenger_counts must not be empty")
        for n in self.passenger_counts:
            if n < 1 or n > MAX_TSP_PASSENGERS:
                raise ValidationError(f"passenger count {n} outside 1..{MAX_TSP_PASSENGERS}")
        if self.cost_model not in COST_MODELS:
            raise ValidationError(f"unknown cost model {self.cost_model!r}")
        for rule in self.rules:
            if rule not in RULE_IDS:
                raise ValidationError(f"unknown rule {rule!r}; expected one of {RULE_IDS}")

    @property
    def mode(self) -> str:
        return ROUTING_GAME if self.cost_model.startswith("routing-game") else LAST_MILE

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid config JSON in {path}: {exc}") from None
        if not isinstance(data, Mapping):
            raise ValidationError(f"config file {path} must hold a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "passenger_counts": list(self.passenger_counts),
            "iterations": self.iterations,
            "seed": self.seed,
            "graph_source": self.graph_source,
            "depot": self.depot,
            "price_per_km": self.price_per_km,
            "cost_model": self.cost_model,
            "rules": list(self.rules),
            "exclude_depot": self.exclude_depot,
            "grand_coalition": self.grand_coalition,
        }


@dataclass(frozen=True)
class MetricRecord:
    """Five error metrics of one estimated allocation against the truth."""

    percent: float
    mae: float
    mse: float
    rmse: float
    max_error: float
    flags: tuple[str, ...] = ()


def metrics(estimate: Allocation | Sequence[float], truth: Allocation | Sequence[float]) -> MetricRecord:
    """Error metrics of ``estimate`` against ``truth``.

    Percent averages the per-passenger relative deviation and skips (with a
    flag) passengers whose true payment is zero; on road networks those
    essentially never occur.  The other four metrics are plain L1/L2/max
    statistics over payment differences.
    """
    est = list(estimate.payments if isinstance(estimate, Allocation) else estimate)
    tru = list(truth.payments if isinstance(truth, Allocation) else truth)
    if len(est) != len(tru):
        raise ValidationError(f"allocations differ in length: {len(est)} vs {len(tru)}")
    if not tru:
        raise ValidationError("empty allocations have no metrics")
    n = len(tru)
    abs_err = [abs(e - t) for e, t in zip(est, tru)]
    flags = []
    rel_terms = [ae / abs(t) for ae, t in zip(abs_err, tru) if t != 0]
    if len(rel_terms) < n:
        flags.append("percent-skips-zero-truth")
    percent = sum(rel_terms) / len(rel_terms) if rel_terms else math.nan
    if not rel_terms:
        flags.append("percent-undefined")
    mae = sum(abs_err) / n
    mse = sum(ae * ae for ae in abs_err) / n
    return MetricRecord(percent, mae, mse, math.sqrt(mse), max(abs_err), tuple(flags))


def optimal_visit_order(core: np.ndarray, closed: bool = False) -> list[int]:
    """Optimal visiting order of destinations 1..n given a distance core.

    ``core`` is the (n+1) x (n+1) block over depot + destinations.  Returns
    the member order (1-based) of the cheapest open path from the depot, or
    of the cheapest tour when ``closed``.  Among optimal orders, the
    lexicographically smallest index sequence is returned, which makes
    sampling deterministic.
    """
    n = core.shape[0] - 1
    if n < 1:
        raise ValidationError("need at least one destination to order")
    if n > MAX_TSP_PASSENGERS:
        raise CapacityError(f"n={n} exceeds the path-TSP cap of {MAX_TSP_PASSENGERS}")
    full = (1 << n) - 1
    # best[mask][j]: cheapest completion visiting `mask` starting from j (0 = depot)
    best = [[0.0] * (n + 1) for _ in range(full + 1)]
    if closed:
        for j in range(n + 1):
            best[0][j] = float(core[j, 0])
    for mask in range(1, full + 1):
        row = best[mask]
        for j in range(n + 1):
            if j > 0 and mask & (1 << (j - 1)):
                continue
            cheapest = math.inf
            for k in range(1, n + 1):
                bit = 1 << (k - 1)
                if mask & bit:
                    cand = float(core[j, k]) + best[mask ^ bit][k]
                    if cand < cheapest:
                        cheapest = cand
            row[j] = cheapest
    order = []
    mask, j = full, 0
    while mask:
        for k in range(1, n + 1):
            bit = 1 << (k - 1)
            if mask & bit and float(core[j, k]) + best[mask ^ bit][k] == best[mask][j]:
                order.append(k)
                mask ^= bit
                j = k
                break
    return order


def instance_with_optimal_order(
    core: np.ndarray,
    mode: str = LAST_MILE,
    price_per_km: float = 1.0,
) -> RideInstance:
    """Ride instance over ``core`` with the drop-off order fixed to an optimal path."""
    order = optimal_visit_order(np.asarray(core, dtype=float), closed=(mode == ROUTING_GAME))
    perm = [0, *order]
    permuted = np.asarray(core, dtype=float)[np.ix_(perm, perm)]
    return RideInstance(DistanceMatrix.from_points(permuted, mode), price_per_km)


def sample_instance(
    g: RoadGraph,
    depot: int,
    n: int,
    rng: np.random.Generator,
    *,
    mode: str = LAST_MILE,
    price_per_km: float = 1.0,
    exclude_depot: bool = False,
    candidates: Sequence[int] | None = None,
) -> RideInstance:
    """Sample a ride on ``g``: n uniform destination vertices, optimal order.

    Destinations are drawn with replacement from the vertices reachable from
    the depot (minus the depot itself when ``exclude_depot``); duplicates are
    legal and produce zero-distance legs.  ``candidates`` lets callers pass
    that reachable pool in precomputed, which run_experiment does once per
    benchmark.
    """
    if candidates is None:
        pool = sorted(shortest_distances(g, depot))
        if exclude_depot:
            pool.remove(depot)
    else:
        pool = list(candidates)
    if len(pool) < n:
        raise ValidationError(f"only {len(pool)} reachable destination vertices, need {n}")
    picks = rng.integers(0, len(pool), size=n)
    destinations = [pool[int(k)] for k in picks]
    core = build_distance_matrix(g, depot, destinations, LAST_MILE).delta[:-1, :-1]
    return instance_with_optimal_order(core, mode, price_per_km)


@dataclass(frozen=True)
class ReportRow:
    """Aggregated results for one (rule, passenger count) cell."""

    rule: str
    n: int
    percent: float
    mae: float
    mse: float
    rmse: float
    max_error: float
    mean_seconds: float


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregated benchmark output plus the config that produced it."""

    config: ExperimentConfig
    rows: tuple[ReportRow, ...]

    def row(self, rule: str, n: int) -> ReportRow:
        for r in self.rows:
            if r.rule == rule and r.n == n:
                return r
        raise KeyError(f"no row for rule={rule!r}, n={n}")

    def to_dict(self) -> dict:
        return {"config": self.config.to_dict(), "rows": [asdict(r) for r in self.rows]}


def _load_graph_source(source: str) -> RoadGraph:
    if source.split(":")[0] in FAMILIES:
        return family_graph(source)
    return read_graph(source)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run the full benchmark described by ``cfg``.

    Ground truth per instance is the exact Shapley value under
    ``cfg.cost_model``; the ``exact`` rule therefore reports zero error and
    the truth's own wall-clock.  Each (n, iteration) pair gets the RNG
    stream ``default_rng([seed, n, iteration])``, so any execution order
    yields the same report.
    """
    g = _load_graph_source(cfg.graph_source)
    if cfg.depot not in g.vertices:
        raise ValidationError(f"depot vertex {cfg.depot} is not in the graph")
    pool = sorted(shortest_distances(g, cfg.depot))
    if cfg.exclude_depot:
        pool.remove(cfg.depot)
    fns = {
        rule: rule_function(rule, cfg.cost_model, cfg.grand_coalition)
        for rule in cfg.rules
        if rule != "exact"
    }
    sums: dict[tuple[str, int], dict[str, float]] = {
        (rule, n): {"percent": 0.0, "defined": 0, "mae": 0.0, "mse": 0.0, "rmse": 0.0, "max_error": 0.0, "seconds": 0.0}
        for rule in cfg.rules
        for n in cfg.passenger_counts
    }
    for n in cfg.passenger_counts:
        for it in range(cfg.iterations):
            try:
                rng = np.random.default_rng([cfg.seed, n, it])
                inst = sample_instance(
                    g, cfg.depot, n, rng,
                    mode=cfg.mode, price_per_km=cfg.price_per_km,
                    exclude_depot=cfg.exclude_depot, candidates=pool,
                )
                t0 = time.perf_counter()
                truth = exact_allocation(inst, cfg.cost_model, cfg.grand_coalition)
                truth_seconds = time.perf_counter() - t0
                for rule in cfg.rules:
                    if rule == "exact":
                        est, seconds = truth, truth_seconds
                    else:
                        t0 = time.perf_counter()
                        est = fns[rule](inst)
                        seconds = time.perf_counter() - t0
                    rec = metrics(est, truth)
                    cell = sums[(rule, n)]
                    if not math.isnan(rec.percent):
                        cell["percent"] += rec.percent
                        cell["defined"] += 1
                    cell["mae"] += rec.mae
                    cell["mse"] += rec.mse
                    cell["rmse"] += rec.rmse
                    cell["max_error"] += rec.max_error
                    cell["seconds"] += seconds
            except CapacityError as exc:
                raise CapacityError(f"n={n} iteration={it} seed={cfg.seed}: {exc}") from exc
            except FairshareError as exc:
                raise ValidationError(f"n={n} iteration={it} seed={cfg.seed}: {exc}") from exc
    rows = []
    for n in cfg.passenger_counts:
        for rule in cfg.rules:
            cell = sums[(rule, n)]
            k = cfg.iterations
            rows.append(ReportRow(
                rule=rule,
                n=n,
                percent=cell["percent"] / cell["defined"] if cell["defined"] else math.nan,
                mae=cell["mae"] / k,
                mse=cell["mse"] / k,
                rmse=cell["rmse"] / k,
                max_error=cell["max_error"] / k,
                mean_seconds=cell["seconds"] / k,
            ))
    return ExperimentReport(cfg, tuple(rows))
