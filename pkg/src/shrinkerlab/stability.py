"""The stability operator ``L``, its quadratic form and spectra, and the
instability certificate built from the translation eigenfunctions.

Along a shrinker, ``L <v, n> = <v, n>/2`` for every fixed vector ``v``. Cutting
``v(x) = <n(p), n(x)>`` off with the linear ramp
``eta = clip(R + 1 - |x|, 0, 1)`` and integrating by parts gives

    -int (eta v) L(eta v) w = int (v^2 |grad eta|^2 - eta^2 v^2 / 2) w
                            <= int_{Sigma \\ B_R} v^2 w - 1/2 int_{B_R} v^2 w,

with ``w = exp(-|x|^2/4)``; once the right side is negative ``Sigma`` is not
L-stable.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.integrate import quad
from scipy.sparse.linalg import eigsh
from scipy.special import erfcinv

from .canonical import CYLINDER_RADIUS, SPHERE_RADIUS
from .exceptions import NotAShrinkerError, SolverError
from .geometry import (
    apply_L,
    face_weighted_dirichlet,
    laplace_beltrami,
    vertex_gradient,
)
from .shrinkers import residual
from .validation import check_compact_support, check_field, check_positive, check_positive_scalar

SHRINKER_THRESHOLD = 5e-2
EIGEN_RESIDUAL_TOL = 1e-10


# -- quadratic form -----------------------------------------------------------


@dataclass(frozen=True)
class QuadraticFormReport:
    """``-int u L u w`` and the pieces of its integrated-by-parts form.

    ``value`` is the direct form; ``symmetric_value`` is
    ``gradient_term - curvature_term - zeroth_term``.
    """

    value: float
    gradient_term: float
    curvature_term: float
    zeroth_term: float

    @property
    def symmetric_value(self):
        return self.gradient_term - self.curvature_term - self.zeroth_term

    @property
    def difference(self):
        return self.value - self.symmetric_value

    @property
    def scale(self):
        """Sum of the absolute sizes of the three terms."""
        return self.gradient_term + abs(self.curvature_term) + abs(self.zeroth_term)

    @property
    def relative_difference(self):
        s = self.scale
        return abs(self.difference) / s if s > 0 else 0.0

    def to_dict(self):
        return {
            "value": self.value,
            "symmetric_value": self.symmetric_value,
            "gradient_term": self.gradient_term,
            "curvature_term": self.curvature_term,
            "zeroth_term": self.zeroth_term,
            "difference": self.difference,
            "relative_difference": self.relative_difference,
        }


def quadratic_form(mesh, geom, u):
    """Direct and symmetric evaluations of ``-int u L u exp(-|x|^2/4)``.

    ``u`` must vanish on boundary vertices (``SupportError`` otherwise). The
    gradient term integrates the piecewise-linear gradient exactly per face
    with the Gaussian weight averaged over the face's corners.
    """
    u = check_field(u, mesh.n_vertices)
    check_compact_support(u, geom.boundary)
    mw = geom.vertex_area * geom.gaussian_weight
    Lu = apply_L(mesh, geom, u)
    # u = 0 on the boundary, so one-sided values there never enter.
    Lu[geom.boundary] = 0.0
    u2 = u * u
    return QuadraticFormReport(
        value=float(-np.sum(u * Lu * mw)),
        gradient_term=face_weighted_dirichlet(mesh, geom, u),
        curvature_term=float(np.sum(geom.second_fund_norm_sq * u2 * mw)),
        zeroth_term=0.5 * float(np.sum(u2 * mw)),
    )


def _require_shrinker(mesh, geom, threshold):
    r = residual(mesh, geom).norm_inf
    if r > threshold:
        raise NotAShrinkerError(f"shrinker residual {r:.3e} exceeds {threshold:.1e}")
    return r


def translation_eigen_check(mesh, geom, v, threshold=SHRINKER_THRESHOLD):
    """``max |L<v,n> - <v,n>/2|`` over interior vertices.

    Interior vertices next to the boundary see the one-sided boundary normals
    through the Laplacian stencil, so on truncated meshes the maximum sits
    at the ends and decays only as the end rings shrink.
    """
    _require_shrinker(mesh, geom, threshold)
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError("v must be a 3-vector")
    u = geom.normal @ v
    defect = apply_L(mesh, geom, u) - 0.5 * u
    inner = geom.interior
    return float(np.max(np.abs(defect[inner]))) if inner.any() else 0.0


def logu_check(mesh, geom, u, norm="inf"):
    """Defect of ``Delta w = Lu/u - |A|^2 + <x, grad w>/2 - 1/2 - |grad w|^2``.

    Here ``w = log u``; the identity holds for every positive ``u``, so the
    defect measures discretization error only. ``norm="inf"`` returns the
    sup over interior vertices, ``norm="l2"`` the Gaussian-weighted RMS
    ``sqrt(int d^2 w / int w)`` over interior vertices.

    The sup does not go to zero on irregular meshes: the cotangent Laplacian
    is not pointwise consistent on quadratics, and ``Delta_h u / u -
    Delta_h w`` is a discrete ``|grad w|^2`` carrying an O(1) error of about
    2e-2 at a few vertices for ``u = exp(x_3)`` on the radius-2 sphere. The
    weighted RMS converges at first order or better.
    """
    if norm not in ("inf", "l2"):
        raise ValueError("norm must be 'inf' or 'l2'")
    u = check_field(u, mesh.n_vertices)
    check_positive(u)
    w = np.log(u)
    gw = vertex_gradient(mesh, geom, w)
    rhs = (
        apply_L(mesh, geom, u) / u
        - geom.second_fund_norm_sq
        + 0.5 * np.einsum("ij,ij->i", mesh.vertices, gw)
        - 0.5
        - np.einsum("ij,ij->i", gw, gw)
    )
    defect = laplace_beltrami(mesh, geom, w) - rhs
    inner = geom.interior
    if not inner.any():
        return 0.0
    if norm == "inf":
        return float(np.max(np.abs(defect[inner])))
    mw = (geom.vertex_area * geom.gaussian_weight)[inner]
    return float(np.sqrt(np.sum(defect[inner] ** 2 * mw) / np.sum(mw)))


# -- spectra on profiles ------------------------------------------------------

# 5-point Gauss-Legendre on [0, 1]
_GX, _GW = np.polynomial.legendre.leggauss(5)
_GX = 0.5 * (_GX + 1.0)
_GW = 0.5 * _GW


def _p2_basis(xi):
    """Quadratic Lagrange basis on [0, 1] with nodes 0, 1/2, 1 and derivatives."""
    phi = np.stack([(1 - xi) * (1 - 2 * xi), 4 * xi * (1 - xi), xi * (2 * xi - 1)])
    dphi = np.stack([4 * xi - 3, 4 - 8 * xi, 4 * xi - 1])
    return phi, dphi


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest eigenvalues of ``-L`` restricted to one angular mode.

    Eigenfunctions are sampled at the finite element nodes ``nodes`` (rows
    ``(s, r, z)``) and normalized in the profile measure
    ``r exp(-(r^2 + z^2)/4) ds``.
    """

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray  # shape (count, n_nodes)
    orthonormality_residual: float
    solver_residuals: np.ndarray
    nodes: np.ndarray
    mode: int
    truncation: float
    mass: sparse.csr_matrix = field(repr=False, default=None)

    def to_dict(self):
        return {
            "mode": self.mode,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "orthonormality_residual": self.orthonormality_residual,
            "solver_residuals": [float(x) for x in self.solver_residuals],
            "truncation": self.truncation,
        }


def _truncated_interval(sp, t0, t1, Z):
    """Sub-interval of ``[t0, t1]`` on which ``|x(t)| <= Z`` (ends only)."""
    from scipy.optimize import brentq

    def g(t):
        p = sp(t)
        return p[0] ** 2 + p[1] ** 2 - Z * Z

    grid = np.linspace(t0, t1, 2001)
    vals = np.array([g(t) for t in grid])
    inside = vals <= 0
    if not inside.any():
        raise ValueError(f"profile lies outside |x| <= {Z}")
    i0, i1 = np.flatnonzero(inside)[[0, -1]]
    a = t0 if i0 == 0 else brentq(g, grid[i0 - 1], grid[i0], xtol=1e-14)
    b = t1 if i1 == len(grid) - 1 else brentq(g, grid[i1], grid[i1 + 1], xtol=1e-14)
    return a, b, (i0 > 0), (i1 < len(grid) - 1)


def spectrum(profile, k=0, count=4, Z=None, element_length=0.02, n=2):
    """Lowest ``count`` eigenvalues of ``-L`` on a surface of revolution.

    Separating ``u = phi(s) cos(k theta)`` reduces ``-L`` to the weighted
    Sturm-Liouville problem

        int r rho (phi' psi' + (k^2/r^2 - |A|^2 - 1/2) phi psi) ds
            = lambda int r rho phi psi ds,     rho = exp(-(r^2 + z^2)/4),

    with ``|A|^2 = kappa^2 + sin^2(theta)/r^2``. It is discretized with
    quadratic elements of arclength about ``element_length`` on the profile's
    spline, 5-point Gauss quadrature and solved by shift-invert Lanczos on
    the pencil (stiffness, weighted mass).

    Boundary conditions: axis endpoints are natural for ``k = 0`` and
    Dirichlet for ``k >= 1``; other ends of open profiles and the truncation
    sphere ``|x| = Z`` are Dirichlet.
    """
    if n != 2:
        raise ValueError("profile spectra are implemented for surfaces in R^3")
    k = int(k)
    if k < 0 or count < 1:
        raise ValueError("k must be >= 0 and count >= 1")
    sp = profile.spline()
    t_all = profile.chord_parameter()
    t0, t1 = float(t_all[0]), float(t_all[-1])
    start_axis, end_axis = profile.axis_ends
    dir_start = not profile.closed and not start_axis
    dir_end = not profile.closed and not end_axis
    truncation = math.inf
    if Z is not None and not profile.closed:
        check_positive_scalar(Z, "Z")
        t0, t1, cut0, cut1 = _truncated_interval(sp, t0, t1, Z)
        if cut0:
            dir_start, start_axis = True, False
        if cut1:
            dir_end, end_axis = True, False
        truncation = float(Z)
    if k >= 1:
        dir_start = dir_start or start_axis
        dir_end = dir_end or end_axis

    ne = max(8, int(math.ceil((t1 - t0) / element_length)))
    edges = np.linspace(t0, t1, ne + 1)
    h = np.diff(edges)
    phi, dphi = _p2_basis(_GX)
    tq = edges[:-1, None] + h[:, None] * _GX[None, :]  # (ne, q)
    pos, d1, d2 = sp(tq), sp(tq, 1), sp(tq, 2)
    r, z = pos[..., 0], pos[..., 1]
    speed = np.hypot(d1[..., 0], d1[..., 1])
    kappa = (d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]) / speed**3
    sin_t = d1[..., 1] / speed
    A2 = kappa**2 + (sin_t / r) ** 2
    wq = r * np.exp(-0.25 * (r * r + z * z)) * speed * h[:, None] * _GW[None, :]  # r rho ds
    pot = k * k / (r * r) - A2 - 0.5
    # d/ds = (1 / (speed h)) d/dxi
    dscale = 1.0 / (speed * h[:, None])

    nd = 2 * ne + 1
    dofs = 2 * np.arange(ne)[:, None] + np.arange(3)[None, :]  # (ne, 3)
    if profile.closed:
        nd -= 1
        dofs = dofs % nd
    Ke = np.einsum("aq,bq,eq->eab", dphi, dphi, wq * dscale**2) + np.einsum(
        "aq,bq,eq->eab", phi, phi, wq * pot
    )
    Me = np.einsum("aq,bq,eq->eab", phi, phi, wq)
    rows = np.repeat(dofs, 3, axis=1).ravel()
    cols = np.tile(dofs, (1, 3)).ravel()
    K = sparse.csr_matrix((Ke.ravel(), (rows, cols)), shape=(nd, nd))
    M = sparse.csr_matrix((Me.ravel(), (rows, cols)), shape=(nd, nd))

    free = np.ones(nd, dtype=bool)
    if dir_start:
        free[0] = False
    if dir_end:
        free[nd - 1] = False
    idx = np.flatnonzero(free)
    Kf, Mf = K[idx][:, idx].tocsc(), M[idx][:, idx].tocsc()
    # |A|^2 + 1/2 bounds -L from below; shift safely under the spectrum.
    sigma = -float(np.max(A2)) - 1.5
    nev = min(count, len(idx) - 2)
    # fixed start vector: ARPACK otherwise seeds randomly and reports drift in the last bits
    v0 = np.linspace(1.0, 2.0, len(idx))
    vals, vecs = eigsh(Kf, k=nev, M=Mf, sigma=sigma, which="LM", tol=1e-14, maxiter=10000, v0=v0)
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    # M-normalize and fix signs so the largest-magnitude entry is positive
    for j in range(nev):
        vecs[:, j] /= math.sqrt(vecs[:, j] @ (Mf @ vecs[:, j]))
        if vecs[np.argmax(np.abs(vecs[:, j])), j] < 0:
            vecs[:, j] *= -1
    res = np.array(
        [
            np.linalg.norm(Kf @ vecs[:, j] - vals[j] * (Mf @ vecs[:, j]), np.inf)
            / (abs(Kf).sum(axis=1).max() * np.abs(vecs[:, j]).max())
            for j in range(nev)
        ]
    )
    if np.any(res > EIGEN_RESIDUAL_TOL):
        raise SolverError(f"eigensolve residuals above {EIGEN_RESIDUAL_TOL:g}", residuals=res)
    gram = vecs.T @ (Mf @ vecs)
    ortho = float(np.max(np.abs(gram - np.eye(nev))))

    full = np.zeros((nev, nd))
    full[:, idx] = vecs.T
    tn_full = np.empty(2 * ne + 1)
    tn_full[0::2] = edges
    tn_full[1::2] = 0.5 * (edges[:-1] + edges[1:])
    tn = tn_full[:nd]
    pts = sp(tn)
    s_nodes = _arclength_at(sp, tn)
    return SpectrumResult(
        eigenvalues=vals,
        eigenfunctions=full,
        orthonormality_residual=ortho,
        solver_residuals=res,
        nodes=np.column_stack([s_nodes, pts]),
        mode=k,
        truncation=truncation,
        mass=M,
    )


def _arclength_at(sp, t):
    d = sp.derivative()
    s = np.zeros_like(t)
    for i in range(1, len(t)):
        a, b = t[i - 1], t[i]
        m = 0.5 * (a + b)
        xs = m + 0.5 * (b - a) * np.array([-math.sqrt(3 / 5), 0.0, math.sqrt(3 / 5)])
        sp1 = np.hypot(*d(xs).T)
        s[i] = s[i - 1] + 0.5 * (b - a) * np.dot([5 / 9, 8 / 9, 5 / 9], sp1)
    return s


def spectrum_head(profile, modes=(0, 1), count=4, Z=None, **kw):
    """Merged lowest eigenvalues over angular modes.

    Modes ``k >= 1`` carry both ``cos(k theta)`` and ``sin(k theta)`` and are
    counted twice.
    """
    vals = []
    for k in modes:
        ev = spectrum(profile, k=k, count=count, Z=Z, **kw).eigenvalues
        vals.extend(ev)
        if k >= 1:
            vals.extend(ev)
    return np.sort(np.array(vals))[:count]


# -- instability certificate --------------------------------------------------


@dataclass(frozen=True)
class CertificateReport:
    """Both sides of the cut-off translation test at radius ``R``."""

    model: str
    R: float
    tail_term: float
    core_term: float
    form_value: float

    @property
    def bound(self):
        return self.tail_term - self.core_term

    def to_dict(self):
        return {
            "model": self.model,
            "R": self.R,
            "tail_term": self.tail_term,
            "core_term": self.core_term,
            "bound": self.bound,
            "form_value": self.form_value,
        }


def _eta(d, R):
    return np.clip(R + 1.0 - d, 0.0, 1.0)


def _plane_certificate(R):
    # v = 1, |grad eta| = 1 on the ramp; polar coordinates.
    w = lambda r: 2 * math.pi * r * math.exp(-r * r / 4)  # noqa: E731
    tail = 4 * math.pi * math.exp(-R * R / 4)
    core = 0.5 * 4 * math.pi * (1 - math.exp(-R * R / 4))
    ramp = quad(w, R, R + 1, epsabs=1e-14, epsrel=1e-13)[0]
    eta2 = quad(lambda r: _eta(r, R) ** 2 * w(r), 0, R + 1, points=[R], epsabs=1e-14, epsrel=1e-13)[0]
    return tail, core, ramp - 0.5 * eta2


def _sphere_certificate(R):
    # |x| = 2 on Sigma: eta is constant there and grad eta = 0.
    a = SPHERE_RADIUS
    total = math.exp(-a * a / 4) * 4 * math.pi * a * a / 3  # int <e, x/a>^2 w
    e = float(_eta(a, R))
    inside = a <= R
    tail = 0.0 if inside else total
    core = 0.5 * total if inside else 0.0
    return tail, core, -0.5 * e * e * total


def _cylinder_certificate(R):
    # p on the waist: v = cos(phi), int cos^2 = pi, dmu = sqrt(2) dphi dz.
    a = CYLINDER_RADIUS
    c = math.pi * a * math.exp(-a * a / 4)
    g = lambda z: math.exp(-z * z / 4)  # noqa: E731
    total = 2 * math.sqrt(math.pi)  # int_R exp(-z^2/4) dz
    if R <= a:
        inner = 0.0
    else:
        zr = math.sqrt(R * R - a * a)
        inner = 2 * quad(g, 0, zr, epsabs=1e-14, epsrel=1e-13)[0]
    tail = c * (total - inner)
    core = 0.5 * c * inner
    zs = math.sqrt(max(R * R - a * a, 0.0))
    ze = math.sqrt((R + 1) ** 2 - a * a)

    def ramp_integrand(z):
        d = math.sqrt(a * a + z * z)
        return (z * z / (d * d) - 0.5 * _eta(d, R) ** 2) * g(z)

    core_eta = 2 * quad(g, 0, zs, epsabs=1e-14, epsrel=1e-13)[0] if zs > 0 else 0.0
    ramp = 2 * quad(ramp_integrand, zs, ze, epsabs=1e-14, epsrel=1e-13)[0]
    return tail, core, c * (ramp - 0.5 * core_eta)


_ANALYTIC = {"plane": _plane_certificate, "sphere": _sphere_certificate, "cylinder": _cylinder_certificate}


def instability_certificate(model, R, mesh=None, geom=None, p=None):
    """Evaluate the cut-off translation test at radius ``R``.

    ``model`` is ``plane``, ``sphere`` or ``cylinder`` (closed-form and 1-D
    quadrature, base point on the waist or anywhere by symmetry) or ``mesh``.
    For a mesh, ``p`` is a vertex index defaulting to the vertex nearest the
    origin, and the form is the direct discrete ``-int u L u w``.
    """
    R = check_positive_scalar(R, "R")
    if model in _ANALYTIC:
        tail, core, form = _ANALYTIC[model](R)
        return CertificateReport(model, R, float(tail), float(core), float(form))
    if model != "mesh":
        raise ValueError(f"unknown model {model!r}")
    if mesh is None or geom is None:
        raise ValueError("model='mesh' needs mesh and geom")
    d = np.linalg.norm(mesh.vertices, axis=1)
    if p is None:
        p = int(np.argmin(d))
    v = geom.normal @ geom.normal[p]
    u = _eta(d, R) * v
    mw = geom.vertex_area * geom.gaussian_weight
    v2 = v * v * mw
    inside = d <= R
    return CertificateReport(
        model="mesh",
        R=R,
        tail_term=float(np.sum(v2[~inside])),
        core_term=0.5 * float(np.sum(v2[inside])),
        form_value=quadratic_form(mesh, geom, u).value,
    )


def certificate_threshold(model, lo=0.5, hi=6.0, tol=1e-10, **kw):
    """Smallest ``R`` in ``[lo, hi]`` with negative bound, by bisection."""
    f = lambda R: instability_certificate(model, R, **kw).bound  # noqa: E731
    if not (f(lo) >= 0 > f(hi)):
        raise ValueError(f"bound does not change sign on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            hi = mid
        else:
            lo = mid
    return hi


def plane_threshold():
    """Closed form ``2 sqrt(log 3)``."""
    return 2.0 * math.sqrt(math.log(3.0))


def cylinder_threshold():
    """Closed form: ``erfc(z_R/2) = 1/3`` with ``R^2 = 2 + z_R^2``."""
    zr = 2.0 * float(erfcinv(1.0 / 3.0))
    return math.sqrt(CYLINDER_RADIUS**2 + zr * zr)
