"""Shrinker residual and rotationally symmetric shrinkers.

Profile ODE
-----------
Parametrize the generating curve by arclength with tangent
``T = (cos theta, sin theta)`` in the ``(r, z)`` half-plane and take the
normal ``N = (-sin theta, cos theta)`` (the orientation produced by
:func:`shrinkerlab.profile.revolve`). For a hypersurface of revolution in
``R^{n+1}`` the ``n`` principal curvatures are ``-theta'`` along the profile
and ``-sin(theta)/r`` (``n - 1`` times) around the axis, so
``H = -theta' - (n - 1) sin(theta) / r`` and
``<x, N> = -r sin(theta) + z cos(theta)``. Substituting in
``H = <x, N>/2`` gives

    theta' = (r sin(theta) - z cos(theta)) / 2 - (n - 1) sin(theta) / r,

which is unchanged under reversing the orientation. The circle of radius
``sqrt(2n)`` and the line ``r = sqrt(2(n - 1))`` are exact solutions.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .canonical import CANONICAL_KINDS, make_canonical  # noqa: F401
from .exceptions import AxisCrossingError, BracketError
from .geometry import compute_geometry
from .profile import ProfileCurve

DEFAULT_STEP = 1e-3
# Orbits are declared to hit the axis below this radius.
AXIS_RADIUS = 5e-3
ESCAPE_RADIUS = 30.0


@dataclass(frozen=True)
class ShrinkerResidual:
    """Pointwise ``H - <x, n>/2`` and its norms over interior vertices."""

    pointwise: np.ndarray
    norm_inf: float
    norm_l2_weighted: float


def residual(mesh, geom=None):
    """Shrinker residual ``H - <x, n>/2`` of a mesh.

    The weighted L2 norm is ``sqrt(sum r_i^2 area_i exp(-|x_i|^2/4))`` over
    interior vertices; boundary vertices are left out of both norms.
    """
    if geom is None:
        geom = compute_geometry(mesh)
    x = mesh.vertices
    res = geom.mean_curvature - 0.5 * np.einsum("ij,ij->i", x, geom.normal)
    inner = geom.interior
    if not inner.any():
        return ShrinkerResidual(res, 0.0, 0.0)
    w = geom.vertex_area * geom.gaussian_weight
    return ShrinkerResidual(
        pointwise=res,
        norm_inf=float(np.max(np.abs(res[inner]))),
        norm_l2_weighted=float(np.sqrt(np.sum((res**2 * w)[inner]))),
    )


# -- rotationally symmetric reduction ----------------------------------------


@dataclass(frozen=True)
class ShootingState:
    r: float
    z: float
    theta: float
    s: float = 0.0

    def as_array(self):
        return np.array([self.r, self.z, self.theta])


def _rhs(y, n):
    r, z, th = y
    if r <= 0:
        raise AxisCrossingError(f"profile reached the axis (r = {r:.3e})")
    st, ct = math.sin(th), math.cos(th)
    return np.array([ct, st, 0.5 * (r * st - z * ct) - (n - 1) * st / r])


def profile_ode_rhs(state, n=2):
    """Arclength derivative ``(dr, dz, dtheta, ds)`` of a profile state."""
    d = _rhs(state.as_array(), n)
    return ShootingState(r=d[0], z=d[1], theta=d[2], s=1.0)


def _rk4(y, h, n):
    k1 = _rhs(y, n)
    k2 = _rhs(y + 0.5 * h * k1, n)
    k3 = _rhs(y + 0.5 * h * k2, n)
    k4 = _rhs(y + h * k3, n)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass
class Orbit:
    """A traced profile orbit.

    ``outcome`` is ``"crossed"`` when the orbit returned to ``z = 0``,
    ``"axis"`` when it reached ``r < AXIS_RADIUS``, ``"escaped"`` when it
    left the ball of radius ``ESCAPE_RADIUS`` or exhausted ``s_max``.
    """

    outcome: str
    path: np.ndarray  # rows (s, r, z, theta)

    @property
    def end(self):
        return self.path[-1]


def integrate_profile(state, n=2, step=DEFAULT_STEP, s_max=60.0, crossings=1):
    """Integrate from ``state`` until the ``crossings``-th return to ``z = 0``.

    A return is a sign change of ``z`` (in either direction) after leaving
    the start. The crossing point itself is located by a secant search on a
    partial RK4 step, so it carries the integrator's full accuracy.
    """
    y = state.as_array().astype(float)
    s = state.s
    rows = [(s, *y)]
    seen = 0
    while s - state.s < s_max:
        try:
            yn = _rk4(y, step, n)
        except AxisCrossingError:
            return Orbit("axis", np.array(rows))
        if not np.all(np.isfinite(yn)):
            return Orbit("escaped", np.array(rows))
        if yn[0] < AXIS_RADIUS:
            return Orbit("axis", np.array(rows))
        if math.hypot(yn[0], yn[1]) > ESCAPE_RADIUS:
            return Orbit("escaped", np.array(rows))
        if y[1] != 0 and yn[1] * y[1] <= 0:
            seen += 1
            if seen == crossings:
                h = _crossing_step(y, step, n)
                yc = _rk4(y, h, n)
                yc[1] = 0.0
                rows.append((s + h, *yc))
                return Orbit("crossed", np.array(rows))
        y, s = yn, s + step
        rows.append((s, *y))
    return Orbit("escaped", np.array(rows))


def _crossing_step(y, step, n):
    """Partial step length ``h`` in (0, step] with ``z(h) = 0``."""
    return brentq(lambda h: _rk4(y, h, n)[1], 0.0, step, xtol=1e-15, rtol=1e-15)


# -- shooting ----------------------------------------------------------------


def half_orbit(r_start, n=2, step=DEFAULT_STEP):
    """Orbit leaving ``(r_start, 0)`` vertically upwards until it meets ``z = 0``."""
    return integrate_profile(ShootingState(r_start, 0.0, math.pi / 2), n=n, step=step)


def closure_function(r_start, n=2, step=DEFAULT_STEP):
    """``cos(theta)`` where the half orbit returns to ``z = 0``.

    It vanishes exactly when the orbit meets the plane perpendicularly; by
    the ``z -> -z`` symmetry of the shrinker equation the reflected half then
    closes the curve. Returns NaN for orbits that never return.
    """
    orb = half_orbit(r_start, n=n, step=step)
    if orb.outcome != "crossed":
        return float("nan")
    return math.cos(orb.end[3])


@dataclass(frozen=True)
class ShootingResult:
    profile: ProfileCurve
    r_start: float
    r_outer: float
    closure_error: float
    length: float
    path: np.ndarray  # full loop, rows (s, r, z, theta)


def _wrap(angle):
    return (angle + math.pi) % (2 * math.pi) - math.pi


def shoot_closed_profile(r_start_range=(0.3, 1.2), tol=1e-8, n=2, step=DEFAULT_STEP,
                         scan=12, angular_resolution=256):
    """Find a closed, ``z``-symmetric shrinker profile by shooting.

    The closure function is scanned on ``scan`` points of the range, the first
    sign change is refined with Brent's method (bisection safeguarded secant)
    and the full loop is then integrated until it returns to ``z = 0``
    heading up. Raises ``BracketError`` when no sign change exists or the
    closed loop misses the ``tol`` closure test, and ``AxisCrossingError``
    when every scanned orbit runs into the axis.

    The returned profile is sampled for ``revolve(profile, angular_resolution)``
    to produce near-equilateral triangles (see :func:`resample_for_revolution`).
    """
    lo, hi = (float(v) for v in r_start_range)
    if not hi > lo:
        raise BracketError(f"empty search range [{lo}, {hi}]")
    grid = np.linspace(lo, hi, scan)
    orbits = [half_orbit(r, n=n, step=step) for r in grid]
    if all(o.outcome == "axis" for o in orbits):
        raise AxisCrossingError(f"every orbit started in [{lo}, {hi}] reaches the axis")
    vals = [math.cos(o.end[3]) if o.outcome == "crossed" else float("nan") for o in orbits]
    bracket = None
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if np.isfinite(fa) and np.isfinite(fb) and fa * fb <= 0:
            bracket = (a, b)
            break
    if bracket is None:
        diag = ", ".join(f"{r:.4g}:{v:.3g}" for r, v in zip(grid, vals))
        raise BracketError(f"closure function has no sign change on [{lo}, {hi}] ({diag})")
    r0 = brentq(lambda r: closure_function(r, n, step), *bracket, xtol=0.1 * tol, rtol=1e-15)

    full = integrate_profile(ShootingState(r0, 0.0, math.pi / 2), n=n, step=step, crossings=2)
    if full.outcome != "crossed":
        raise BracketError(f"orbit from r={r0:.10g} did not close ({full.outcome})")
    end = full.end
    err = abs(end[1] - r0) + abs(_wrap(end[3] - math.pi / 2))
    if err > tol:
        raise BracketError(f"closure error {err:.3e} exceeds tol {tol:.1e} at r={r0:.10g}")
    path = full.path
    half = half_orbit(r0, n=n, step=step)
    length = float(end[0] - path[0, 0])
    return ShootingResult(
        profile=resample_for_revolution(path, angular_resolution),
        r_start=float(r0),
        r_outer=float(half.end[1]),
        closure_error=float(err),
        length=length,
        path=path,
    )


def resample_for_revolution(path, angular_resolution):
    """Closed profile from an orbit, spaced to match ``angular_resolution``.

    Samples are equispaced in ``u = int ds / r`` with the profile step set to
    ``sqrt(3)/2`` times the ring spacing ``2 pi r / m``, which together with
    staggered rings gives near-equilateral triangles everywhere. Positions
    come from a cubic Hermite spline through the RK4 nodes using the exact
    tangents; linear interpolation leaves an O(step^2) wobble that the
    curvature estimate amplifies by 1/h^2 on fine meshes.
    """
    m = int(angular_resolution)
    s = path[:, 0] - path[0, 0]
    r = path[:, 1]
    u = cumulative_trapezoid(1.0 / r, s, initial=0.0)
    count = int(round(u[-1] * m / (np.pi * math.sqrt(3.0))))
    count += count % 2
    spline = CubicHermiteSpline(s, path[:, 1:3], np.column_stack([np.cos(path[:, 3]), np.sin(path[:, 3])]))
    t = np.interp(np.linspace(0.0, u[-1], count, endpoint=False), u, s)
    return ProfileCurve(spline(t), closed=True)
