"""Synthetic road graphs and random ride instances.

Three graph families back the generator CLI and the default benchmark:

* ``line:k``       — a path 0-1-...-(k-1) with unit edges;
* ``grid:s``       — an s x s lattice with unit edges, ids row-major;
* ``euclidean:k[:seed]`` — k points in a 10 km square joined by their
  Delaunay triangulation, edge weights in meters.  Vertex 0 is pinned to the
  square's southwest corner so every family instance ships with a canonical
  peripheral depot, the situation last-mile rides actually face.

The random-matrix factories produce ride instances directly, without a
graph: Euclidean cores are metric, uniform symmetric cores generally are
not, and integral cores keep every distance a small integer so chained sums
stay exact in floating point.
"""

from __future__ import annotations

import math

import numpy as np

from .cost_model import RideInstance
from .errors import ValidationError
from .road_graph import LAST_MILE, DistanceMatrix, RoadGraph

FAMILIES = ("line", "grid", "euclidean")
EUCLIDEAN_SCALE_M = 10_000.0


def line_graph(size: int) -> RoadGraph:
    """Path graph over vertices 0..size-1 with unit edge weights."""
    if size < 1:
        raise ValidationError(f"line size must be >= 1, got {size}")
    return RoadGraph([(i, i + 1, 1.0) for i in range(size - 1)], vertices=range(size))


def grid_graph(side: int) -> RoadGraph:
    """Square lattice of side x side vertices, ids row-major, unit edges."""
    if side < 1:
        raise ValidationError(f"grid side must be >= 1, got {side}")
    edges = []
    for r in range(side):
        for c in range(side):
            v = r * side + c
            if c + 1 < side:
                edges.append((v, v + 1, 1.0))
            if r + 1 < side:
                edges.append((v, v + side, 1.0))
    return RoadGraph(edges, vertices=range(side * side))


def euclidean_graph(size: int, seed: int = 0, scale: float = EUCLIDEAN_SCALE_M) -> RoadGraph:
    """Random planar road network: Delaunay triangulation of uniform points.

    Deterministic in (size, seed).  Vertex 0 sits at the origin corner; edge
    weights are straight-line distances in meters.
    """
    if size < 1:
        raise ValidationError(f"euclidean size must be >= 1, got {size}")
    rng = np.random.default_rng(seed)
    points = rng.random((size, 2)) * scale
    points[0] = (0.0, 0.0)
    if size == 1:
        return RoadGraph([], vertices=[0])
    if size <= 3:
        pairs = {(a, b) for a in range(size) for b in range(a + 1, size)}
    else:
        from scipy.spatial import Delaunay

        pairs = set()
        for simplex in Delaunay(points).simplices:
            for a in range(3):
                u, v = int(simplex[a]), int(simplex[(a + 1) % 3])
                pairs.add((min(u, v), max(u, v)))
    edges = [(u, v, float(math.dist(points[u], points[v]))) for u, v in sorted(pairs)]
    return RoadGraph(edges, vertices=range(size))


def family_graph(spec: str) -> RoadGraph:
    """Build a family graph from a spec string like ``euclidean:250:7``."""
    parts = spec.split(":")
    name = parts[0]
    if name not in FAMILIES:
        raise ValidationError(f"unknown graph family {name!r}; expected one of {FAMILIES}")
    try:
        args = [int(p) for p in parts[1:]]
    except ValueError:
        raise ValidationError(f"non-integer parameter in family spec {spec!r}") from None
    if name == "line":
        if len(args) != 1:
            raise ValidationError(f"family spec {spec!r} needs exactly one size parameter")
        return line_graph(args[0])
    if name == "grid":
        if len(args) != 1:
            raise ValidationError(f"family spec {spec!r} needs exactly one side parameter")
        return grid_graph(args[0])
    if len(args) not in (1, 2):
        raise ValidationError(f"family spec {spec!r} needs a size and an optional seed")
    return euclidean_graph(args[0], seed=args[1] if len(args) == 2 else 0)


def random_euclidean_core(n: int, rng: np.random.Generator, scale: float = 1000.0) -> np.ndarray:
    """Metric (n+1) x (n+1) distance core from random points in a square."""
    points = rng.random((n + 1, 2)) * scale
    diff = points[:, None, :] - points[None, :, :]
    core = np.sqrt((diff**2).sum(axis=2))
    return np.triu(core, 1) + np.triu(core, 1).T  # exactly symmetric, zero diagonal


def random_symmetric_core(
    n: int,
    rng: np.random.Generator,
    scale: float = 1000.0,
    integral: bool = False,
) -> np.ndarray:
    """Symmetric non-negative core with no triangle-inequality guarantee."""
    if integral:
        m = rng.integers(1, max(2, int(scale)), size=(n + 1, n + 1)).astype(float)
    else:
        m = rng.random((n + 1, n + 1)) * scale
    core = np.triu(m, 1)
    return core + core.T


def random_instance(
    n: int,
    rng: np.random.Generator,
    mode: str = LAST_MILE,
    kind: str = "euclidean",
    price_per_km: float = 1.0,
    integral: bool = False,
) -> RideInstance:
    """Random ride instance with ``n`` passengers; ``kind`` picks the core family."""
    if kind == "euclidean":
        core = random_euclidean_core(n, rng)
    elif kind == "symmetric":
        core = random_symmetric_core(n, rng, integral=integral)
    else:
        raise ValidationError(f"unknown instance kind {kind!r}; expected 'euclidean' or 'symmetric'")
    return RideInstance(DistanceMatrix.from_points(core, mode), price_per_km)
