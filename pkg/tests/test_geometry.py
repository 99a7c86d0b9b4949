import math

import numpy as np
import pytest

from shrinkerlab.canonical import icosphere, plane_patch
from shrinkerlab.exceptions import BoundaryError
from shrinkerlab.geometry import (
    apply_L,
    area_growth_ratio,
    compute_geometry,
    face_weighted_dirichlet,
    laplace_beltrami,
    vertex_gradient,
    weighted_integral,
)

import oracles
from conftest import canonical, torus_mesh, unit_sphere


def _mean_edge(mesh):
    return float(mesh.edge_lengths().mean())


def _interior_max(geom, values):
    return float(np.max(np.abs(values[geom.interior])))


# -- compute_geometry ---------------------------------------------------------


def test_sphere_mean_curvature_converges_to_one():
    devs, hs = [], []
    for lvl in (2, 3, 4):
        m, g = canonical("sphere", lvl)
        devs.append(np.max(np.abs(g.mean_curvature - 1.0)))
        hs.append(_mean_edge(m))
    assert devs[-1] < 5e-3
    assert all(b < a for a, b in zip(devs, devs[1:]))
    # roughly second order: halving h cuts the error by about four
    assert devs[1] / devs[2] > 3.0


def test_plane_is_flat():
    m, g = canonical("plane", 2)
    assert _interior_max(g, g.mean_curvature) < 1e-12
    assert _interior_max(g, g.second_fund_norm_sq) < 1e-12
    np.testing.assert_allclose(g.normal[:, 2], 1.0)


def test_cylinder_curvatures():
    m, g = canonical("cylinder", 3)
    assert _interior_max(g, g.mean_curvature - 1 / math.sqrt(2)) < 5e-3
    assert _interior_max(g, g.second_fund_norm_sq - 0.5) < 5e-3


@pytest.mark.parametrize("radius", [0.5, 1.0, 3.0])
def test_sign_convention_outward_sphere(radius):
    m = icosphere(4, radius)
    g = compute_geometry(m)
    np.testing.assert_allclose(g.mean_curvature, 2 / radius, rtol=5e-3)
    assert np.all(np.einsum("ij,ij->i", g.normal, m.vertices) > 0)


@pytest.mark.parametrize("kind, level", [("sphere", 3), ("plane", 2), ("cylinder", 2)])
def test_second_fundamental_form_dominates_mean_curvature(kind, level):
    m, g = canonical(kind, level)
    h = _mean_edge(m)
    gap = g.second_fund_norm_sq - 0.5 * g.mean_curvature**2
    assert np.min(gap[g.interior]) >= -10 * h


def test_torus_mean_curvature_matches_analytic():
    R, r = 3.0, 1.0
    m = torus_mesh(R, r, 96, 48)
    g = compute_geometry(m)
    x = m.vertices
    rho = np.hypot(x[:, 0], x[:, 1])
    cosv = (rho - R) / r
    # principal curvatures 1/r and cos v / (R + r cos v)
    H = 1 / r + cosv / (R + r * cosv)
    A2 = 1 / r**2 + (cosv / (R + r * cosv)) ** 2
    assert np.max(np.abs(g.mean_curvature - H)) < 1e-2
    assert np.max(np.abs(g.second_fund_norm_sq - A2)) < 2e-2


def test_geometry_is_deterministic():
    m = canonical("cylinder", 2)[0]
    a, b = compute_geometry(m), compute_geometry(m)
    np.testing.assert_array_equal(a.mean_curvature, b.mean_curvature)
    np.testing.assert_array_equal(a.second_fund_norm_sq, b.second_fund_norm_sq)


# -- Laplacian and L ----------------------------------------------------------


def test_laplacian_of_constant_vanishes():
    for kind in ("sphere", "plane", "cylinder"):
        m, g = canonical(kind, 2)
        lap = laplace_beltrami(m, g, np.full(m.n_vertices, 3.0))
        assert _interior_max(g, lap) < 1e-10


def test_laplacian_of_height_on_unit_sphere():
    errs = []
    for lvl in (3, 4):
        m, g = unit_sphere(lvl)
        x3 = m.vertices[:, 2]
        errs.append(np.max(np.abs(laplace_beltrami(m, g, x3) + 2 * x3)))
    assert errs[-1] < 1e-2
    assert errs[1] < errs[0]


def test_harmonic_polynomial_on_plane():
    m, g = canonical("plane", 2)
    u = m.vertices[:, 0] ** 2 - m.vertices[:, 1] ** 2
    assert _interior_max(g, laplace_beltrami(m, g, u)) < 1e-9


def test_boundary_flag_is_enforced():
    m, g = canonical("plane", 1)
    with pytest.raises(BoundaryError):
        laplace_beltrami(m, g, np.zeros(m.n_vertices), boundary_ok=False)
    with pytest.raises(BoundaryError):
        apply_L(m, g, np.zeros(m.n_vertices), boundary_ok=False)
    m, g = canonical("sphere", 1)
    laplace_beltrami(m, g, np.zeros(m.n_vertices), boundary_ok=False)


def test_field_length_checked():
    m, g = canonical("sphere", 1)
    with pytest.raises(ValueError):
        laplace_beltrami(m, g, np.zeros(m.n_vertices + 1))


def test_L_of_constant_on_sphere():
    m, g = canonical("sphere", 4)
    Lu = apply_L(m, g, np.full(m.n_vertices, 2.5))
    np.testing.assert_allclose(Lu, 2.5, atol=2e-2)


@pytest.mark.parametrize("kind, level, tol", [("sphere", 4, 2e-2), ("plane", 2, 1e-9), ("cylinder", 3, 2e-2)])
def test_translation_normal_is_half_eigenfunction(kind, level, tol):
    m, g = canonical(kind, level)
    v = np.array([0.6, 0.0, 0.8]) if kind != "cylinder" else np.array([0.0, 1.0, 0.0])
    u = g.normal @ v
    gap = apply_L(m, g, u) - 0.5 * u
    assert _interior_max(g, gap) < tol


def test_L_is_linear_and_kills_zero():
    m, g = canonical("sphere", 2)
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal((2, m.n_vertices))
    np.testing.assert_array_equal(apply_L(m, g, np.zeros(m.n_vertices)), 0.0)
    np.testing.assert_allclose(apply_L(m, g, 2 * a - b), 2 * apply_L(m, g, a) - apply_L(m, g, b), atol=1e-10)


def test_vertex_gradient_is_tangent():
    m, g = unit_sphere(3)
    grad = vertex_gradient(m, g, m.vertices[:, 0] * m.vertices[:, 1])
    assert np.max(np.abs(np.einsum("ij,ij->i", grad, g.normal))) < 1e-12


# -- weighted integrals -------------------------------------------------------


def test_weighted_integral_on_plane():
    m, g = canonical("plane", 3)
    val = weighted_integral(m, g, np.ones(m.n_vertices))
    # the staggered patch is the square minus a sawtooth far out in the tail
    assert val == pytest.approx(oracles.gaussian_square_integral(8.0), rel=1e-3)
    assert val == pytest.approx(4 * math.pi, rel=1e-3)


def test_weighted_integral_on_sphere():
    m, g = canonical("sphere", 4)
    val = weighted_integral(m, g, np.ones(m.n_vertices))
    assert val == pytest.approx(16 * math.pi / math.e, rel=5e-3)
    assert weighted_integral(m, g, np.zeros(m.n_vertices)) == 0.0


def _ibp_gap(mesh, geom):
    x = mesh.vertices
    r2 = np.einsum("ij,ij->i", x, x)
    bump = np.exp(-r2 / 2) * (1 - np.clip(r2 / 36, 0, 1)) ** 3
    phi = bump * (1 + x[:, 0])
    psi = bump * np.cos(x[:, 1])
    lap = laplace_beltrami(mesh, geom, psi)
    drift = np.einsum("ij,ij->i", x, vertex_gradient(mesh, geom, psi))
    # polarization: <grad phi, grad psi> = (|grad(phi+psi)|^2 - |grad(phi-psi)|^2) / 4
    cross = 0.25 * (face_weighted_dirichlet(mesh, geom, phi + psi) - face_weighted_dirichlet(mesh, geom, phi - psi))
    return abs(cross + weighted_integral(mesh, geom, phi * (lap - 0.5 * drift)))


@pytest.mark.parametrize("kind", ["plane", "cylinder"])
def test_weighted_integration_by_parts_converges(kind):
    gaps, hs = [], []
    for lvl in (1, 2, 3):
        m, g = canonical(kind, lvl)
        gaps.append(_ibp_gap(m, g))
        hs.append(_mean_edge(m))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    # at least first order in h
    assert gaps[-1] / gaps[0] < 1.5 * hs[-1] / hs[0]


# -- area growth --------------------------------------------------------------


@pytest.mark.parametrize("radius", [1.0, 2.5, 5.0])
def test_area_growth_on_plane(radius):
    m = plane_patch(64, half_width=8.0)
    ratio = area_growth_ratio(m, [[0.3, -0.2, 0.0]], [radius])
    # chords at the ball boundary undercut the disk by O(h^2)
    assert ratio == pytest.approx(math.pi, rel=5e-3)
    assert ratio <= math.pi


def test_area_growth_on_sphere():
    m, _ = canonical("sphere", 4)
    assert area_growth_ratio(m, [[0, 0, 0]], [3.0]) == pytest.approx(16 * math.pi / 9, rel=2e-3)
    assert area_growth_ratio(m, [[0, 0, 0]], [100.0]) == pytest.approx(16 * math.pi / 1e4, rel=2e-3)
    assert area_growth_ratio(m, [[0, 0, 0], [0, 0, 0]], [3.0, 100.0]) == pytest.approx(16 * math.pi / 9, rel=2e-3)


def test_area_growth_empty_and_errors():
    m, _ = canonical("sphere", 2)
    assert area_growth_ratio(m, [[50, 0, 0]], [1.0]) == 0.0
    with pytest.raises(ValueError):
        area_growth_ratio(m, [[0, 0, 0]], [-1.0])
    with pytest.raises(ValueError):
        area_growth_ratio(m, [[0, 0, 0]], [1.0, 2.0])
