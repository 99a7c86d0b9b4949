"""Gaussian area functional, its first variation and the conformal metric.

``F(Sigma) = (4 pi)^{-1} int exp(-|x|^2/4) dmu`` for surfaces in R^3. Along a
normal variation ``x' = f n`` the area element changes by ``f H dmu`` and

    F' = (4 pi)^{-1} int f (H - <x, n>/2) exp(-|x|^2/4) dmu,

so shrinkers are exactly the critical points of ``F``.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .exceptions import DimensionError, StepError
from .geometry import area_growth_ratio, compute_geometry, gaussian_weight, mixed_voronoi_areas
from .validation import check_compact_support, check_field

FOUR_PI = 4.0 * math.pi


def F_value(mesh, geom=None):
    """``(4 pi)^{-1} sum_i area_i exp(-|x_i|^2/4)``."""
    if geom is None:
        geom = compute_geometry(mesh)
    return float(np.sum(geom.vertex_area * geom.gaussian_weight)) / FOUR_PI


def truncation_radius(mesh):
    """Smallest ``|x|`` over boundary vertices (``inf`` for closed meshes)."""
    b = mesh.boundary_flags
    if not b.any():
        return math.inf
    return float(np.min(np.linalg.norm(mesh.vertices[b], axis=1)))


def F_tail_bound(mesh, growth=None):
    """Upper bound on the part of ``F`` lost by truncating at ``|x| = rho``.

    If ``Area(B_R ∩ Sigma) <= V R^2`` for ``R >= rho`` then the layer-cake
    formula gives ``int_{|x| > rho} exp(-|x|^2/4) <= V (rho^2 + 4) exp(-rho^2/4)``.
    ``V`` defaults to the mesh's own ratio ``Area(B_rho)/rho^2``, which is
    exact for the plane and an overestimate for the cylinder.
    """
    rho = truncation_radius(mesh)
    if not math.isfinite(rho):
        return 0.0
    if growth is None:
        growth = area_growth_ratio(mesh, [np.zeros(3)], [rho])
    return growth * (rho**2 + 4.0) * math.exp(-0.25 * rho**2) / FOUR_PI


@dataclass(frozen=True)
class VariationField:
    """Normal speed ``f`` of a compactly supported variation ``x' = f n``."""

    f: np.ndarray
    support_flag: np.ndarray

    @classmethod
    def from_values(cls, mesh, f):
        f = check_field(f, mesh.n_vertices, "f")
        check_compact_support(f, mesh.boundary_flags, "f")
        return cls(f=f, support_flag=f != 0)


def _as_variation(mesh, var):
    if isinstance(var, VariationField):
        f = check_field(var.f, mesh.n_vertices, "f")
        check_compact_support(f, mesh.boundary_flags, "f")
        return f
    return VariationField.from_values(mesh, var).f


def first_variation(mesh, geom, var):
    """``(4 pi)^{-1} sum_i f_i (H_i - <x_i, n_i>/2) area_i w_i``.

    Raises ``SupportError`` when ``f`` is nonzero on a boundary vertex.
    """
    f = _as_variation(mesh, var)
    res = geom.mean_curvature - 0.5 * np.einsum("ij,ij->i", mesh.vertices, geom.normal)
    return float(np.sum(f * res * geom.vertex_area * geom.gaussian_weight)) / FOUR_PI


@dataclass(frozen=True)
class VariationCheck:
    """Finite-difference and analytic derivatives of ``F`` along ``f n``.

    ``area_rate_fd`` is the centred difference of each mixed vertex area and
    ``area_rate_analytic`` is ``f H area``. The two agree only in total
    (``sum`` of either is the derivative of the total area); per vertex they
    differ by a redistribution between neighbours.
    """

    fd: float
    analytic: float
    step: float
    area_rate_fd: np.ndarray
    area_rate_analytic: np.ndarray

    @property
    def relative_error(self):
        return abs(self.fd - self.analytic) / max(1.0, abs(self.analytic))

    @property
    def total_area_rate_error(self):
        return abs(self.area_rate_fd.sum() - self.area_rate_analytic.sum())


def _offset(mesh, geom, f, s):
    moved = mesh.with_vertices(mesh.vertices + s * f[:, None] * geom.normal)
    # A flipped face is the cheap witness that the offset left the embedded regime.
    flip = np.einsum("ij,ij->i", moved.triangle_normals(), mesh.triangle_normals()) <= 0
    if flip.any():
        raise StepError(f"offset by s={s:.3e} flips {int(flip.sum())} triangles; reduce the step")
    return moved


def _f_and_areas(mesh):
    area = mixed_voronoi_areas(mesh)
    return float(np.sum(area * gaussian_weight(mesh.vertices))) / FOUR_PI, area


def fd_variation_check(mesh, var, step=None, geom=None):
    """Compare the centred difference of ``F`` with :func:`first_variation`.

    ``step`` is the variation parameter ``s`` in ``x + s f n``; the default
    is ``1e-4`` times the mesh diameter divided by ``max |f|``.
    """
    if geom is None:
        geom = compute_geometry(mesh)
    f = _as_variation(mesh, var)
    fmax = float(np.max(np.abs(f)))
    if fmax == 0.0:
        zero = np.zeros(mesh.n_vertices)
        return VariationCheck(0.0, 0.0, 0.0 if step is None else float(step), zero, zero)
    if step is None:
        span = mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0)
        step = 1e-4 * float(np.linalg.norm(span)) / fmax
    if not step > 0:
        raise ValueError("step must be positive")
    Fp, Ap = _f_and_areas(_offset(mesh, geom, f, step))
    Fm, Am = _f_and_areas(_offset(mesh, geom, f, -step))
    return VariationCheck(
        fd=(Fp - Fm) / (2 * step),
        analytic=first_variation(mesh, geom, f),
        step=float(step),
        area_rate_fd=(Ap - Am) / (2 * step),
        area_rate_analytic=f * geom.mean_curvature * geom.vertex_area,
    )


# -- conformal metric ---------------------------------------------------------


@dataclass(frozen=True)
class ConformalReport:
    """Scalar curvature of ``exp(-|x|^2/2n) delta`` on R^{n+1} and its metric size."""

    n: int
    scalar_curvature_at: Callable
    sign_change_radius: float
    distance_to_infinity: float
    quadrature_error: float

    def to_dict(self):
        return {
            "n": self.n,
            "scalar_curvature_at_origin": float(self.scalar_curvature_at(0.0)),
            "sign_change_radius": self.sign_change_radius,
            "distance_to_infinity": self.distance_to_infinity,
            "quadrature_error": self.quadrature_error,
        }


def conformal_scalar_curvature(radius, n):
    """``exp(|x|^2/2n) (n + 1 - (n - 1)|x|^2/(4n))``, vectorized over ``radius``."""
    r2 = np.square(np.asarray(radius, dtype=float))
    return np.exp(r2 / (2 * n)) * (n + 1 - (n - 1) * r2 / (4 * n))


def conformal_report(n):
    """Closed-form curvature sign change and the radial distance to infinity.

    The conformal metric has length element ``exp(-|x|^2/4n) |dx|``, so the
    distance from the origin to infinity along a ray is
    ``int_0^inf exp(-t^2/4n) dt = sqrt(n pi)``; it is integrated numerically
    here and compared against that value by callers.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise DimensionError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    dist, err = quad(lambda t: math.exp(-t * t / (4 * n)), 0.0, math.inf, epsabs=1e-13, epsrel=1e-13)
    return ConformalReport(
        n=n,
        scalar_curvature_at=lambda r: conformal_scalar_curvature(r, n),
        sign_change_radius=math.sqrt(4 * n * (n + 1) / (n - 1)),
        distance_to_infinity=float(dist),
        quadrature_error=float(err),
    )
