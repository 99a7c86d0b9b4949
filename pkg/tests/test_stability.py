import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinkerlab import stability
from shrinkerlab.exceptions import NotAShrinkerError, PositivityError, SolverError, SupportError
from shrinkerlab.profile import circle_profile, line_profile, ray_profile
from shrinkerlab.stability import (
    certificate_threshold,
    cylinder_threshold,
    instability_certificate,
    logu_check,
    plane_threshold,
    quadratic_form,
    spectrum,
    spectrum_head,
    translation_eigen_check,
)

import oracles
from conftest import canonical, unit_sphere

SPHERE_WEIGHTED_AREA = 16 * math.pi / math.e


def _shape_error(ef, ref, mask):
    """Max deviation of ``ef`` from its best multiple of ``ref``, relative to ``max |ef|``."""
    a = ef[mask] @ ref[mask] / (ref[mask] @ ref[mask])
    return float(np.max(np.abs(ef[mask] - a * ref[mask])) / np.max(np.abs(ef[mask])))


# -- quadratic form -----------------------------------------------------------


def test_form_of_constant_on_sphere():
    m, g = canonical("sphere", 4)
    rep = quadratic_form(m, g, np.ones(m.n_vertices))
    assert rep.value == pytest.approx(-SPHERE_WEIGHTED_AREA, rel=1e-2)
    assert rep.gradient_term == pytest.approx(0.0, abs=1e-20)
    assert rep.curvature_term == pytest.approx(0.5 * SPHERE_WEIGHTED_AREA, rel=1e-2)


def test_form_of_translation_on_sphere():
    m, g = canonical("sphere", 4)
    u = g.normal[:, 2]
    rep = quadratic_form(m, g, u)
    assert rep.value < 0
    assert rep.value == pytest.approx(-rep.zeroth_term, rel=2e-2)
    # <e3, n>^2 averages to 1/3 on the sphere
    assert rep.zeroth_term == pytest.approx(0.5 * SPHERE_WEIGHTED_AREA / 3, rel=1e-2)


def test_form_of_zero():
    m, g = canonical("sphere", 2)
    rep = quadratic_form(m, g, np.zeros(m.n_vertices))
    d = rep.to_dict()
    for key in ("value", "gradient_term", "curvature_term", "zeroth_term"):
        assert d[key] == 0.0


@pytest.mark.parametrize("kind", ["sphere", "plane", "cylinder"])
def test_direct_and_symmetric_forms_converge(kind):
    from shrinkerlab.acceptance import random_test_field

    diffs = []
    levels = (2, 3, 4) if kind == "sphere" else (1, 2, 3)
    for lvl in levels:
        m, g = canonical(kind, lvl)
        u = random_test_field(m, np.random.default_rng(5))
        diffs.append(quadratic_form(m, g, u).relative_difference)
    assert diffs[-1] < diffs[0]
    assert diffs[-1] < 5e-2


def test_form_support_error():
    m, g = canonical("plane", 1)
    with pytest.raises(SupportError):
        quadratic_form(m, g, np.ones(m.n_vertices))


# -- translation eigenfunctions -----------------------------------------------


def test_translation_eigen_check_sphere_converges():
    errs = [translation_eigen_check(*canonical("sphere", lvl), [0, 0, 1]) for lvl in (2, 3, 4)]
    assert errs[2] < errs[1] < errs[0]
    assert errs[1] / errs[2] > 3.0


def test_translation_eigen_check_cylinder():
    errs = [translation_eigen_check(*canonical("cylinder", lvl), [1, 0, 0]) for lvl in (2, 3)]
    assert errs[1] < errs[0] and errs[1] < 2e-2
    # <e3, n> vanishes at interior vertices; only the one-sided end normals leak in
    axial = []
    for lvl in (2, 3, 4):
        m, g = canonical("cylinder", lvl)
        assert np.max(np.abs(g.normal[g.interior, 2])) < 1e-15
        axial.append(translation_eigen_check(m, g, [0, 0, 1]))
    assert axial[2] < axial[1] < axial[0]


def test_translation_eigen_check_rejects_non_shrinker():
    with pytest.raises(NotAShrinkerError):
        translation_eigen_check(*unit_sphere(3), [0, 0, 1])


def test_translation_eigen_check_bad_vector():
    with pytest.raises(ValueError):
        translation_eigen_check(*canonical("sphere", 2), [0, 1])


# -- log u identity -----------------------------------------------------------


def _logu_field(field, mesh, geom):
    return {
        "exp_x3": np.exp(mesh.vertices[:, 2]),
        "constant": np.ones(mesh.n_vertices),
        "translation_plus_two": geom.normal[:, 2] + 2.0,
    }[field]


@pytest.mark.parametrize("field", ["exp_x3", "translation_plus_two"])
def test_logu_check_converges_in_weighted_l2(field):
    vals, sups = [], []
    for lvl in (2, 3, 4):
        m, g = canonical("sphere", lvl)
        u = _logu_field(field, m, g)
        vals.append(logu_check(m, g, u, norm="l2"))
        sups.append(logu_check(m, g, u))
    assert vals[0] / vals[1] > 2.0 and vals[1] / vals[2] > 2.0
    assert vals[2] < 5e-3
    # the sup settles near 2e-2 (pointwise inconsistency of the cotangent Laplacian)
    assert sups[2] < 3e-2


def test_logu_check_constant_is_exact():
    for kind in ("sphere", "plane", "cylinder"):
        m, g = canonical(kind, 2)
        u = _logu_field("constant", m, g)
        assert logu_check(m, g, u) < 1e-12
        assert logu_check(m, g, u, norm="l2") < 1e-12


def test_logu_check_norm_argument():
    m, g = canonical("sphere", 1)
    with pytest.raises(ValueError):
        logu_check(m, g, np.ones(m.n_vertices), norm="l1")


def test_logu_check_positivity():
    m, g = canonical("sphere", 2)
    u = np.ones(m.n_vertices)
    u[3] = 0.0
    with pytest.raises(PositivityError):
        logu_check(m, g, u)
    u[3] = -1.0
    with pytest.raises(PositivityError):
        logu_check(m, g, u)


# -- profile spectra ----------------------------------------------------------


def test_sphere_spectrum_by_mode():
    ref = oracles.sphere_minus_L_eigenvalues()  # l(l+1)/4 - 1
    r0 = spectrum(circle_profile(), k=0, count=4)
    r1 = spectrum(circle_profile(), k=1, count=3)
    np.testing.assert_allclose(r0.eigenvalues, [-1.0, -0.5, 0.5, 2.0], atol=1e-6)
    np.testing.assert_allclose(r1.eigenvalues, [-0.5, 0.5, 2.0], atol=1e-6)
    head = spectrum_head(circle_profile(), modes=(0, 1), count=4)
    np.testing.assert_allclose(head, ref[:4], atol=1e-6)
    assert r0.orthonormality_residual < 1e-8
    assert np.all(r0.solver_residuals < 1e-10)
    assert np.all(np.diff(r0.eigenvalues) >= 0)


def test_sphere_translation_eigenfunctions():
    r0 = spectrum(circle_profile(), k=0, count=2)
    r1 = spectrum(circle_profile(), k=1, count=1)
    nd = r0.nodes
    everywhere = np.ones(len(nd), dtype=bool)
    # <e3, n> = z/2 (axisymmetric), <e1, n> = (r/2) cos(phi)
    assert _shape_error(r0.eigenfunctions[1], nd[:, 2] / 2, everywhere) < 1e-4
    assert _shape_error(r1.eigenfunctions[0], r1.nodes[:, 1] / 2, everywhere) < 1e-4


def test_cylinder_spectrum_and_truncation():
    ref = oracles.cylinder_minus_L_eigenvalues()
    heads = {}
    for Z in (12.0, 24.0):
        prof = line_profile(half_length=Z)
        r0 = spectrum(prof, k=0, count=4, Z=Z)
        r1 = spectrum(prof, k=1, count=3, Z=Z)
        np.testing.assert_allclose(r0.eigenvalues, [-1.0, -0.5, 0.0, 0.5], atol=1e-6)
        np.testing.assert_allclose(r1.eigenvalues, [-0.5, 0.0, 0.5], atol=1e-6)
        heads[Z] = np.concatenate([r0.eigenvalues, r1.eigenvalues])
        assert r0.truncation == Z
    np.testing.assert_allclose(heads[12.0], heads[24.0], atol=1e-6)
    head = spectrum_head(line_profile(half_length=12.0), modes=(0, 1, 2), count=6, Z=12.0)
    np.testing.assert_allclose(head, ref[:6], atol=1e-6)


def test_cylinder_translation_eigenfunction():
    Z = 12.0
    prof = line_profile(half_length=Z)
    r1 = spectrum(prof, k=1, count=1, Z=Z)
    r0 = spectrum(prof, k=0, count=2, Z=Z)
    nd = r1.nodes
    inner = np.abs(nd[:, 2]) <= Z / 2
    # <e1, n> = cos(phi): constant along the profile
    assert _shape_error(r1.eigenfunctions[0], np.ones(len(nd)), inner) < 1e-4
    # the axial companion is the first Hermite function z
    assert _shape_error(r0.eigenfunctions[1], r0.nodes[:, 2], inner) < 1e-4


def test_minus_half_multiplicity():
    # sphere: three translations; cylinder: two (the axial one vanishes)
    sphere = spectrum_head(circle_profile(), modes=(0, 1), count=4)
    assert np.sum(np.abs(sphere + 0.5) < 1e-6) == 3
    cyl = spectrum_head(line_profile(half_length=12.0), modes=(0, 1), count=4, Z=12.0)
    assert np.sum(np.abs(cyl + 0.5) < 1e-6) >= 2


def test_plane_spectrum():
    prof = ray_profile(length=12.0)
    r0 = spectrum(prof, k=0, count=3, Z=12.0)
    r1 = spectrum(prof, k=1, count=2, Z=12.0)
    # Ornstein-Uhlenbeck on R^2 shifted by -1/2
    np.testing.assert_allclose(r0.eigenvalues, [-0.5, 0.5, 1.5], atol=1e-6)
    np.testing.assert_allclose(r1.eigenvalues, [0.0, 1.0], atol=1e-6)


def test_spectrum_is_deterministic():
    a = spectrum(circle_profile(), k=0, count=3)
    b = spectrum(circle_profile(), k=0, count=3)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    np.testing.assert_array_equal(a.eigenfunctions, b.eigenfunctions)


def test_spectrum_solver_error(monkeypatch):
    monkeypatch.setattr(stability, "EIGEN_RESIDUAL_TOL", 0.0)
    with pytest.raises(SolverError) as info:
        spectrum(circle_profile(), k=0, count=2)
    assert info.value.residuals is not None and len(info.value.residuals) == 2


def test_spectrum_argument_errors():
    with pytest.raises(ValueError):
        spectrum(circle_profile(), k=-1)
    with pytest.raises(ValueError):
        spectrum(circle_profile(), count=0)
    with pytest.raises(ValueError):
        spectrum(circle_profile(), n=3)


# -- instability certificate --------------------------------------------------


def test_plane_threshold():
    assert plane_threshold() == pytest.approx(oracles.PLANE_THRESHOLD, abs=1e-15)
    R = certificate_threshold("plane", tol=1e-10)
    assert R == pytest.approx(oracles.threshold(oracles.plane_bound, 1.0, 4.0), abs=1e-8)
    assert instability_certificate("plane", oracles.PLANE_THRESHOLD).bound == pytest.approx(0.0, abs=1e-12)
    assert instability_certificate("plane", 3.0).bound < 0


def test_cylinder_threshold():
    assert cylinder_threshold() == pytest.approx(oracles.CYLINDER_THRESHOLD, abs=1e-12)
    R = certificate_threshold("cylinder", lo=1.0, hi=4.0, tol=1e-10)
    assert R == pytest.approx(oracles.CYLINDER_THRESHOLD, abs=1e-8)


@settings(max_examples=20, deadline=None)
@given(R=st.floats(0.5, 8.0))
def test_analytic_bounds_match_quadrature(R):
    assert instability_certificate("plane", R).bound == pytest.approx(oracles.plane_bound(R), abs=1e-9)
    assert instability_certificate("cylinder", R).bound == pytest.approx(oracles.cylinder_bound(R), abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(R=st.floats(0.5, 8.0), model=st.sampled_from(["plane", "sphere", "cylinder"]))
def test_form_below_bound(R, model):
    rep = instability_certificate(model, R)
    assert rep.form_value <= rep.bound + 1e-12


def test_sphere_certificate_whole_sphere_inside():
    rep = instability_certificate("sphere", 4.0)
    assert rep.tail_term == 0.0
    assert rep.form_value == pytest.approx(-0.5 * SPHERE_WEIGHTED_AREA / 3, rel=1e-12)


@pytest.mark.parametrize("kind", ["plane", "sphere", "cylinder"])
def test_mesh_certificate_tracks_analytic(kind):
    m, g = canonical(kind, 3)
    mesh_rep = instability_certificate("mesh", 3.0, mesh=m, geom=g)
    exact = instability_certificate(kind, 3.0)
    assert mesh_rep.bound == pytest.approx(exact.bound, rel=2e-2)
    assert mesh_rep.form_value == pytest.approx(exact.form_value, rel=5e-2)
    assert mesh_rep.bound < 0 and mesh_rep.form_value < 0


def test_certificate_errors():
    with pytest.raises(ValueError):
        instability_certificate("torus", 3.0)
    with pytest.raises(ValueError):
        instability_certificate("plane", -1.0)
    with pytest.raises(ValueError):
        instability_certificate("mesh", 3.0)
    with pytest.raises(ValueError):
        certificate_threshold("plane", lo=4.0, hi=6.0)
