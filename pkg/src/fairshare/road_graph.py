"""Road networks and shared-ride distance matrices.

A road network is an undirected, non-negatively weighted graph over integer
vertex ids.  Rides are described by a depot and an ordered list of destination
vertices; all cost computations downstream consume only the pairwise
shortest-path distances between those points, packaged as a
:class:`DistanceMatrix`.
"""

from __future__ import annotations

import heapq
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import GraphParseError, ValidationError

LAST_MILE = "last-mile"
ROUTING_GAME = "routing-game"
MODES = (LAST_MILE, ROUTING_GAME)


class RoadGraph:
    """Immutable undirected weighted graph.

    Self-loops are tolerated in the input and kept in :attr:`edges` but never
    enter the adjacency structure; they cannot shorten any path.
    """

    __slots__ = ("vertices", "edges", "_adj")

    def __init__(self, edges: Iterable[tuple[int, int, float]], vertices: Iterable[int] = ()):
        adj: dict[int, list[tuple[int, float]]] = {}
        verts = {int(v) for v in vertices}
        cleaned = []
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not math.isfinite(w) or w < 0:
                raise ValidationError(f"edge ({u}, {v}) has invalid weight {w!r}; weights must be finite and >= 0")
            verts.add(u)
            verts.add(v)
            cleaned.append((u, v, w))
            if u != v:
                adj.setdefault(u, []).append((v, w))
                adj.setdefault(v, []).append((u, w))
        self.vertices: frozenset[int] = frozenset(verts)
        self.edges: tuple[tuple[int, int, float], ...] = tuple(cleaned)
        self._adj: dict[int, tuple[tuple[int, float], ...]] = {u: tuple(nb) for u, nb in adj.items()}

    def neighbors(self, u: int) -> tuple[tuple[int, float], ...]:
        return self._adj.get(u, ())

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"RoadGraph(vertices={self.vertex_count}, edges={self.edge_count})"


def load_graph(text: str) -> RoadGraph:
    """Parse an edge list from CSV text: one ``u,v,weight`` row per edge.

    Blank lines and lines starting with ``#`` are skipped.  A single header
    row is tolerated if its first field is not an integer.  Any other
    malformed row raises :class:`GraphParseError` with its 1-based line
    number.
    """
    edges: list[tuple[int, int, float]] = []
    saw_data = False
    for line_no, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise GraphParseError(f"expected 'u,v,weight', got {line!r}", line_no)
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            if not saw_data:
                saw_data = True  # header row
                continue
            raise GraphParseError(f"could not parse {line!r}", line_no) from None
        saw_data = True
        if not math.isfinite(w) or w < 0:
            raise GraphParseError(f"invalid weight {parts[2]!r}; weights must be finite and >= 0", line_no)
        edges.append((u, v, w))
    return RoadGraph(edges)


def read_graph(path: str | Path) -> RoadGraph:
    """Load an edge-list CSV file from disk."""
    return load_graph(Path(path).read_text(encoding="utf-8"))


def dump_graph(g: RoadGraph) -> str:
    """Serialize a graph back to edge-list CSV (isolated vertices as ``v,v,0``)."""
    lines = ["u,v,weight"]
    covered: set[int] = set()
    for u, v, w in g.edges:
        covered.add(u)
        covered.add(v)
        lines.append(f"{u},{v},{w!r}")
    for v in sorted(g.vertices - covered):
        lines.append(f"{v},{v},0.0")
    return "\n".join(lines) + "\n"


def shortest_distances(
    g: RoadGraph,
    source: int,
    targets: Iterable[int] | None = None,
) -> dict[int, float]:
    """Dijkstra distances from ``source`` to every reachable vertex.

    When ``targets`` is given the search stops as soon as all of them are
    settled, so the returned map may cover only part of the graph; entries
    for unreachable vertices are absent either way.
    """
    if source not in g.vertices:
        raise ValidationError(f"source vertex {source} is not in the graph")
    pending = set(targets) if targets is not None else None
    dist: dict[int, float] = {source: 0.0}
    heap: list[tuple[float, int]] = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if pending is not None:
            pending.discard(u)
            if not pending:
                break
        for v, w in g.neighbors(u):
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def crop_to_nearest(g: RoadGraph, origin: int, k: int) -> RoadGraph:
    """Induced subgraph on the ``k`` vertices closest to ``origin``.

    The origin itself is always retained.  Ties are broken by lowest vertex
    id, and unreachable vertices are never retained.  Asking for more
    vertices than are reachable returns the whole reachable component.
    """
    if k < 1:
        raise ValidationError(f"crop size must be >= 1, got {k}")
    if origin not in g.vertices:
        raise ValidationError(f"origin vertex {origin} is not in the graph")
    dist = shortest_distances(g, origin)
    ranked = sorted((d, v) for v, d in dist.items() if v != origin)
    keep = {origin, *(v for _, v in ranked[: k - 1])}
    edges = [(u, v, w) for u, v, w in g.edges if u in keep and v in keep]
    return RoadGraph(edges, vertices=keep)


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise shortest-path distances for one ride.

    ``delta`` has shape ``(n + 2, n + 2)``: row/column 0 is the depot, rows 1
    through n are the destinations in drop-off order, and row n + 1 is a
    terminal dummy.  In last-mile mode the dummy row and column are zero (the
    vehicle stops after the final drop-off); in routing-game mode they copy
    the depot's, which makes every chain cost include the return leg.
    """

    delta: np.ndarray
    mode: str = LAST_MILE

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=float)
        object.__setattr__(self, "delta", delta)
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if delta.ndim != 2 or delta.shape[0] != delta.shape[1] or delta.shape[0] < 2:
            raise ValidationError(f"delta must be square of size n + 2 >= 2, got shape {delta.shape}")
        if not np.all(np.isfinite(delta)) or np.any(delta < 0):
            raise ValidationError("distances must be finite and >= 0")
        if np.any(np.diag(delta) != 0):
            raise ValidationError("delta must have a zero diagonal")
        real = delta[:-1, :-1]
        if not np.array_equal(real, real.T):
            raise ValidationError("real rows/columns of delta must be symmetric")
        last = delta.shape[0] - 1
        expected = delta[0] if self.mode == ROUTING_GAME else np.zeros(last + 1)
        if not (np.array_equal(delta[last, :last], expected[:last]) and np.array_equal(delta[:last, last], expected[:last])):
            raise ValidationError(f"dummy row/column inconsistent with {self.mode} mode")
        delta.setflags(write=False)

    @property
    def n(self) -> int:
        """Number of passengers (matrix size minus depot and dummy)."""
        return self.delta.shape[0] - 2

    @classmethod
    def from_points(cls, core: np.ndarray, mode: str = LAST_MILE) -> "DistanceMatrix":
        """Build from the real ``(n + 1) x (n + 1)`` block (depot + destinations).

        The dummy row/column is derived from ``mode``, so the same core can
        materialize either a last-mile or a routing-game matrix.
        """
        core = np.asarray(core, dtype=float)
        if core.ndim != 2 or core.shape[0] != core.shape[1] or core.shape[0] < 1:
            raise ValidationError(f"core must be square of size n + 1 >= 1, got shape {core.shape}")
        m = core.shape[0] + 1
        delta = np.zeros((m, m))
        delta[:-1, :-1] = core
        if mode == ROUTING_GAME:
            delta[-1, :-1] = core[0]
            delta[:-1, -1] = core[:, 0]
        return cls(delta, mode)

    def with_mode(self, mode: str) -> "DistanceMatrix":
        """The same ride re-materialized under another dummy-column mode."""
        if mode == self.mode:
            return self
        return DistanceMatrix.from_points(self.delta[:-1, :-1], mode)

    def to_json(self) -> str:
        payload = {"mode": self.mode, "n": self.n, "delta": [float(x) for x in self.delta.ravel()]}
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "DistanceMatrix":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid distance-matrix JSON: {exc}") from None
        if not isinstance(payload, Mapping) or not {"mode", "n", "delta"} <= set(payload):
            raise ValidationError("distance-matrix JSON needs keys 'mode', 'n', 'delta'")
        n = int(payload["n"])
        flat = np.asarray(payload["delta"], dtype=float)
        if flat.size != (n + 2) ** 2:
            raise ValidationError(f"expected {(n + 2) ** 2} delta entries for n={n}, got {flat.size}")
        return cls(flat.reshape(n + 2, n + 2), str(payload["mode"]))

    def triangle_violations(self, tol: float = 1e-9) -> int:
        """Count triples of real points violating the triangle inequality.

        Shortest-path matrices never violate it; hand-entered ones may, and
        remain perfectly valid inputs for every cost model here.
        """
        real = self.delta[:-1, :-1]
        m = real.shape[0]
        count = 0
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    if real[a, c] > real[a, b] + real[b, c] + tol:
                        count += 1
        return count


def build_distance_matrix(
    g: RoadGraph,
    depot: int,
    destinations: Iterable[int],
    mode: str = LAST_MILE,
) -> DistanceMatrix:
    """Shortest-path distance matrix for a ride on ``g``.

    Destinations keep the given order (passenger i is ``destinations[i-1]``).
    Repeated vertices are fine and simply yield zero-distance legs.  Any
    destination unreachable from the depot raises :class:`ValidationError`
    naming the vertex.
    """
    dests = [int(d) for d in destinations]
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}; expected one of {MODES}")
    points = [int(depot), *dests]
    for p in set(points):
        if p not in g.vertices:
            raise ValidationError(f"vertex {p} is not in the graph")
    point_set = set(points)
    from_depot = shortest_distances(g, points[0], targets=point_set)
    for d in dests:
        if d not in from_depot:
            raise ValidationError(f"destination {d} is unreachable from depot {points[0]}")
    sssp: dict[int, dict[int, float]] = {points[0]: from_depot}
    core = np.zeros((len(points), len(points)))
    for a in range(len(points)):
        pa = points[a]
        if pa not in sssp:
            sssp[pa] = shortest_distances(g, pa, targets=point_set)
        row = sssp[pa]
        for b in range(a + 1, len(points)):
            # fill each unordered pair once so the matrix is exactly symmetric
            core[a, b] = core[b, a] = row[points[b]]
    return DistanceMatrix.from_points(core, mode)
