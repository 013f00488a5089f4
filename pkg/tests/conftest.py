from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from torusharmonic import (
    EdgeWeights,
    one_vertex_triangulation,
    random_instance,
    square_grid,
    triangulated_grid,
)

DATA = Path(__file__).resolve().parent.parent / "data"


def log_uniform(rng, n, lo=0.1, hi=10.0):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), n))


def named_complexes():
    """Small fixed complexes covering loops, multi-edges, squares and triangles."""
    return {
        "one_vertex": one_vertex_triangulation(),
        "grid2": square_grid(2),
        "grid3x2": square_grid(3, 2),
        "tri2x3": triangulated_grid(2, 3),
        "tri3": triangulated_grid(3),
        "random9": random_instance(9, seed=5)[0],
    }


def random_instances(count=20, max_vertices=20, seed=2024):
    """Deterministic list of ``(cx, weights)`` with ``1 <= |V| <= max_vertices``."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(1, max_vertices + 1))
        out.append(random_instance(n, seed=seed + k))
    return out


def random_upper(rng, size=None):
    x = rng.uniform(-1.5, 1.5, size)
    y = np.exp(rng.uniform(np.log(0.2), np.log(5.0), size))
    return x + 1j * y


@pytest.fixture(scope="session")
def instances():
    return random_instances()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=list(named_complexes()))
def named(request):
    cx = named_complexes()[request.param]
    w = EdgeWeights(log_uniform(np.random.default_rng(7), cx.num_edges))
    return request.param, cx, w
