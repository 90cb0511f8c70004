import numpy as np
import pytest

from src.graph_core.families import path_graph
from src.graph_core.graph import build_graph


@pytest.fixture
def triangle():
    return build_graph([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


@pytest.fixture
def triangle_with_leaf():
    return build_graph([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (2, 3, 1.0)])


@pytest.fixture
def path4():
    # vertices 0..3
    return path_graph(3)


def random_connected_graph(rng: np.random.Generator, n: int, low: float = 0.1, high: float = 10.0):
    """Random spanning tree plus a few extra edges, uniform conductances."""
    edges = {}
    for v in range(1, n):
        u = int(rng.integers(v))
        edges[(u, v)] = rng.uniform(low, high)
    for _ in range(int(rng.integers(0, n))):
        u, v = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
        edges.setdefault((u, v), rng.uniform(low, high))
    return build_graph((u, v, c) for (u, v), c in edges.items())


@pytest.fixture
def settings_file(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text(
        "[DATABASE]\n"
        f"connection_string = sqlite:///{tmp_path / 'results.db'}\n"
        "enabled = false\n"
        "[LOGGING]\n"
        "log_file =\n"
        "log_level = WARNING\n"
        "[NUMERICS]\n"
        "tolerance = 1e-10\n"
        "state_cap = 14\n"
        "[RUN]\n"
        "threads = 1\n"
    )
    return path
