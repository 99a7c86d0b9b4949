"""Mean curvature flow on meshes and the self-similar shrinking check.

A family ``M_t`` flows by mean curvature when ``(d/dt x)^perp = -H n``. If
``Sigma`` is a shrinker then ``M_t = sqrt(-t) Sigma`` does so for ``t < 0``,
and ``H = -<x, n>/(2t)`` on each slice.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve
from scipy.spatial import cKDTree

from .exceptions import TimeDomainError, TimestepError
from .geometry import _vertex_normals, compute_geometry, cotan_matrix, mixed_voronoi_areas

STABILITY_CONSTANT = 0.25
SCHEMES = ("explicit", "semi-implicit")


@dataclass(frozen=True)
class FlowState:
    mesh: object
    t: float
    step_count: int = 0


def stable_timestep(mesh, c=STABILITY_CONSTANT):
    """Largest explicit step ``c * h_min^2``."""
    return c * float(mesh.edge_lengths().min()) ** 2


def _normal_speed(mesh):
    """Per-vertex ``H`` and unit normal for the flow.

    Uses the cotangent mean-curvature vector against angle-weighted normals.
    Boundary vertices have no trustworthy one-sided ``H``; they take the mean
    ``H`` of their interior neighbours so truncated surfaces keep shrinking
    near the cut.
    """
    C = cotan_matrix(mesh)
    area = mixed_voronoi_areas(mesh)
    n = _vertex_normals(mesh, mesh.triangle_normals())
    H = -np.einsum("ij,ij->i", np.asarray(C @ mesh.vertices) / area[:, None], n)
    b = mesh.boundary_flags
    if b.any():
        A = mesh.vertex_adjacency()
        inner = (~b).astype(float)
        cnt = A @ inner
        tot = A @ (H * inner)
        Hb = np.where(cnt > 0, tot / np.maximum(cnt, 1), 0.0)
        H = np.where(b, Hb, H)
    return H, n, C, area


def mcf_step(state, dt, scheme="explicit", c=STABILITY_CONSTANT):
    """Advance by ``dt`` with ``x <- x - dt H n``.

    ``explicit`` requires ``dt <= c * h_min^2`` (``TimestepError`` otherwise).
    ``semi-implicit`` solves ``(M - dt C) x_new = M x_old`` for interior
    vertices with the cotangent matrix ``C`` and lumped mass ``M`` frozen at
    the current state; boundary vertices move explicitly.
    """
    if not dt > 0:
        raise TimestepError("dt must be positive")
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    mesh = state.mesh
    H, n, C, area = _normal_speed(mesh)
    if scheme == "explicit":
        bound = stable_timestep(mesh, c)
        if dt > bound:
            raise TimestepError(f"dt={dt:.3e} exceeds the explicit bound {bound:.3e} (c={c})")
        x = mesh.vertices - dt * H[:, None] * n
    else:
        b = mesh.boundary_flags
        x = mesh.vertices - dt * H[:, None] * n
        if (~b).any():
            inner = np.flatnonzero(~b)
            A = (sparse.diags(area) - dt * C).tocsr()
            rhs = area[:, None] * mesh.vertices
            # boundary positions enter as known values
            Aii = A[inner][:, inner].tocsc()
            rhs_i = rhs[inner] - A[inner][:, np.flatnonzero(b)] @ x[b] if b.any() else rhs[inner]
            x[inner] = spsolve(Aii, rhs_i).reshape(-1, 3)
    return FlowState(mesh.with_vertices(x), state.t + dt, state.step_count + 1)


def flow(state, t_end, steps, scheme="explicit", c=STABILITY_CONSTANT, callback=None):
    """Take ``steps`` equal steps from ``state.t`` to ``t_end``."""
    if not t_end > state.t:
        raise TimeDomainError("t_end must exceed the current time")
    dt = (t_end - state.t) / int(steps)
    for i in range(int(steps)):
        state = mcf_step(state, dt, scheme=scheme, c=c)
        if i == int(steps) - 1:
            state = FlowState(state.mesh, float(t_end), state.step_count)
        if callback is not None:
            callback(state)
    return state


def selfsimilar_residual(sigma, t):
    """``max |H + <x, n>/(2t)|`` over interior vertices of ``sqrt(-t) sigma``."""
    if not t < 0:
        raise TimeDomainError(f"t must be negative, got {t}")
    m = sigma.scaled(math.sqrt(-t))
    g = compute_geometry(m)
    res = g.mean_curvature + np.einsum("ij,ij->i", m.vertices, g.normal) / (2 * t)
    inner = g.interior
    return float(np.max(np.abs(res[inner]))) if inner.any() else 0.0


# -- distances ----------------------------------------------------------------


def closest_points_on_triangles(p, a, b, c):
    """Closest point to each ``p`` on triangle ``(a, b, c)``, row-wise.

    Region tests on barycentric coordinates, after Ericson's
    "Real-Time Collision Detection".
    """
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = _dot(ab, ap), _dot(ac, ap)
    bp = p - b
    d3, d4 = _dot(ab, bp), _dot(ac, bp)
    cp = p - c
    d5, d6 = _dot(ab, cp), _dot(ac, cp)
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2
    denom = va + vb + vc
    with np.errstate(divide="ignore", invalid="ignore"):
        v = vb / denom
        w = vc / denom
        out = a + v[:, None] * ab + w[:, None] * ac  # face region
        t_ab = d1 / (d1 - d3)
        t_ac = d2 / (d2 - d6)
        t_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
    regions = [
        ((vc <= 0) & (d1 >= 0) & (d3 <= 0), lambda: a + t_ab[:, None] * ab),
        ((vb <= 0) & (d2 >= 0) & (d6 <= 0), lambda: a + t_ac[:, None] * ac),
        ((va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0), lambda: b + t_bc[:, None] * (c - b)),
        ((d6 >= 0) & (d5 <= d6), lambda: c),
        ((d3 >= 0) & (d4 <= d3), lambda: b),
        ((d1 <= 0) & (d2 <= 0), lambda: a),
    ]
    # later entries win: vertex regions override edges, edges override the face
    for mask, val in regions:
        if mask.any():
            out = np.where(mask[:, None], val(), out)
    return out


def _dot(u, v):
    return np.einsum("ij,ij->i", u, v)


def point_surface_distance(points, mesh, k=8):
    """Distance from each point to ``mesh`` via triangles around nearby vertices.

    Candidate faces are those incident to the ``k`` nearest vertices, which
    is exact whenever the true closest point lies in one of them (always the
    case for the near-coincident surfaces compared here).
    """
    points = np.asarray(points, dtype=float)
    if len(points) == 0:
        return np.zeros(0)
    tree = cKDTree(mesh.vertices)
    _, near = tree.query(points, k=min(k, mesh.n_vertices))
    near = np.atleast_2d(near)
    tris = mesh.triangles
    # vertex -> incident faces in CSR form
    vf = sparse.csr_matrix(
        (np.ones(tris.size), (tris.ravel(), np.repeat(np.arange(len(tris)), 3))),
        shape=(mesh.n_vertices, len(tris)),
    )
    best = np.full(len(points), np.inf)
    for j in range(near.shape[1]):
        faces_of = vf[near[:, j]]
        rows, faces = faces_of.nonzero()
        a, b, c = (mesh.vertices[tris[faces, i]] for i in range(3))
        q = closest_points_on_triangles(points[rows], a, b, c)
        d = np.linalg.norm(points[rows] - q, axis=1)
        np.minimum.at(best, rows, d)
    return best


def hausdorff_distance(m1, m2, radius=math.inf):
    """Symmetric vertex-to-surface Hausdorff distance restricted to ``|x| <= radius``."""
    out = 0.0
    for a, b in ((m1, m2), (m2, m1)):
        pts = a.vertices[np.linalg.norm(a.vertices, axis=1) <= radius]
        if len(pts):
            out = max(out, float(point_surface_distance(pts, b).max()))
    return out


def rescaled_trajectory_check(sigma, t0, t1, steps, scheme="explicit", collar=1.0, c=STABILITY_CONSTANT):
    """Hausdorff distance between the flow of ``sqrt(-t0) sigma`` and ``sqrt(-t1) sigma``.

    For meshes with boundary the comparison is limited to the ball whose
    radius is the target's smallest boundary ``|x|`` minus ``collar``.
    """
    if not (-1.0 <= t0 < t1 < 0.0):
        raise TimeDomainError("need -1 <= t0 < t1 < 0")
    state = flow(FlowState(sigma.scaled(math.sqrt(-t0)), t0), t1, steps, scheme=scheme, c=c)
    target = sigma.scaled(math.sqrt(-t1))
    radius = math.inf
    b = target.boundary_flags
    if b.any():
        radius = float(np.min(np.linalg.norm(target.vertices[b], axis=1))) - collar
    return hausdorff_distance(state.mesh, target, radius)
