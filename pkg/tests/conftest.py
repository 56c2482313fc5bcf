"""Shared fixtures and the acceptance-criteria summary hook."""

from __future__ import annotations

import numpy as np
import pytest

from fairshare import DistanceMatrix, RideInstance, load_graph

LINE_EDGES = "u,v,weight\n0,1,1000\n1,2,1000\n"

# collinear points: depot 0, d_1 at -3, d_2 at +1 (distances in meters)
COLLINEAR_CORE = np.array([
    [0.0, 3.0, 1.0],
    [3.0, 0.0, 4.0],
    [1.0, 4.0, 0.0],
])


def rel_close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(b))


def payments_close(xs, ys, tol: float = 1e-9) -> bool:
    return len(xs) == len(ys) and all(rel_close(x, y, tol) for x, y in zip(xs, ys))


@pytest.fixture(name="rel_close")
def rel_close_fixture():
    return rel_close


@pytest.fixture(name="payments_close")
def payments_close_fixture():
    return payments_close


@pytest.fixture
def line_graph_1km():
    """Path 0-1-2 with 1 km edges: d_1 at 1 km, d_2 at 2 km from the depot."""
    return load_graph(LINE_EDGES)


@pytest.fixture
def line_instance(line_graph_1km):
    """1 km / 2 km line ride at $1/km: payments come out as (0.5, 1.5)."""
    from fairshare import build_distance_matrix

    return RideInstance(build_distance_matrix(line_graph_1km, 0, [1, 2]), price_per_km=1.0)


@pytest.fixture
def collinear_instance():
    """Non-monotone collinear ride where the given order is not optimal.

    $1000/km means $1 per meter, so payments equal meter-level values.
    """
    return RideInstance(DistanceMatrix.from_points(COLLINEAR_CORE), price_per_km=1000.0)


_acceptance_outcomes: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance_outcomes.append((name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_outcomes:
        terminalreporter.section("acceptance criteria")
        for name, outcome in _acceptance_outcomes:
            terminalreporter.write_line(f"{outcome}  {name}")
