import numpy as np
import pytest

from shrinkerlab.canonical import icosphere, make_canonical
from shrinkerlab.geometry import compute_geometry

_CACHE = {}
ACCEPTANCE_LINES = []


def canonical(kind, res):
    """Cached ``(mesh, geom)`` for a canonical surface."""
    key = (kind, res)
    if key not in _CACHE:
        m = make_canonical(kind, res)
        _CACHE[key] = (m, compute_geometry(m))
    return _CACHE[key]


def unit_sphere(level):
    key = ("unit", level)
    if key not in _CACHE:
        m = icosphere(level, 1.0)
        _CACHE[key] = (m, compute_geometry(m))
    return _CACHE[key]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def torus_mesh(R=3.0, r=1.0, n_major=48, n_minor=24):
    """Standard parametric torus about the z-axis, outward normals."""
    from shrinkerlab.mesh import TriMesh

    u = 2 * np.pi * np.arange(n_major) / n_major
    v = 2 * np.pi * np.arange(n_minor) / n_minor
    U, V = np.meshgrid(u, v, indexing="ij")
    x = np.stack([(R + r * np.cos(V)) * np.cos(U), (R + r * np.cos(V)) * np.sin(U), r * np.sin(V)], -1)
    tris = []
    for i in range(n_major):
        for j in range(n_minor):
            a = i * n_minor + j
            b = ((i + 1) % n_major) * n_minor + j
            c = ((i + 1) % n_major) * n_minor + (j + 1) % n_minor
            d = i * n_minor + (j + 1) % n_minor
            tris += [(a, b, c), (a, c, d)]
    return TriMesh(x.reshape(-1, 3), tris)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
