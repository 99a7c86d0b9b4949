"""Discrete differential operators on triangle meshes.

Mean curvature comes from the cotangent mean-curvature vector, vertex areas
from mixed Voronoi cells, and ``|A|^2`` from a least-squares quadric fit
over each vertex's 1-ring (2-ring below valence 5). All reductions run in fixed vertex order so
results are bit-reproducible.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .exceptions import BoundaryError
from .validation import check_field


def gaussian_weight(x):
    """Shrinker weight ``exp(-|x|^2 / 4)`` evaluated row-wise."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.25 * np.einsum("...i,...i->...", x, x))


@dataclass(frozen=True)
class SurfaceGeometry:
    """Per-vertex geometric fields of a mesh.

    ``normal`` is the unit normal oriented by the triangle winding,
    ``mean_curvature`` is ``H = div n`` (so ``2/R`` on a sphere of radius R
    with outward normal), ``second_fund_norm_sq`` is ``|A|^2``,
    ``vertex_area`` the mixed Voronoi area and ``gaussian_weight`` is
    ``exp(-|x|^2/4)``. Values at boundary vertices are one-sided and are
    never used in residuals or quadratic forms.
    """

    normal: np.ndarray
    mean_curvature: np.ndarray
    second_fund_norm_sq: np.ndarray
    vertex_area: np.ndarray
    gaussian_weight: np.ndarray
    boundary: np.ndarray
    cotan: sparse.csr_matrix = field(repr=False)
    grad_op: tuple = field(repr=False)

    @property
    def interior(self):
        return ~self.boundary


def cotan_weights(mesh):
    """Corner cotangents, shape (n_triangles, 3); column k is the corner at vertex k."""
    p = mesh.vertices[mesh.triangles]
    cots = np.empty((mesh.n_triangles, 3))
    for k in range(3):
        a = p[:, (k + 1) % 3] - p[:, k]
        b = p[:, (k + 2) % 3] - p[:, k]
        cots[:, k] = np.einsum("ij,ij->i", a, b) / np.linalg.norm(np.cross(a, b), axis=1)
    return cots


def cotan_matrix(mesh, cots=None):
    """Symmetric cotangent matrix ``C`` with ``(C u)_i = sum_j w_ij (u_j - u_i)``."""
    if cots is None:
        cots = cotan_weights(mesh)
    t = mesh.triangles
    rows, cols, vals = [], [], []
    for k in range(3):
        i, j = t[:, (k + 1) % 3], t[:, (k + 2) % 3]
        w = 0.5 * cots[:, k]
        rows += [i, j]
        cols += [j, i]
        vals += [w, w]
    n = mesh.n_vertices
    off = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    diag = np.asarray(off.sum(axis=1)).ravel()
    return (off - sparse.diags(diag)).tocsr()


def mixed_voronoi_areas(mesh, cots=None):
    if cots is None:
        cots = cotan_weights(mesh)
    t = mesh.triangles
    p = mesh.vertices[t]
    area = mesh.triangle_areas()
    # squared length of the edge opposite corner k
    e2 = np.stack(
        [np.sum((p[:, (k + 2) % 3] - p[:, (k + 1) % 3]) ** 2, axis=1) for k in range(3)], axis=1
    )
    out = np.zeros(mesh.n_vertices)
    obtuse = cots < 0
    any_obtuse = obtuse.any(axis=1)
    for k in range(3):
        # Voronoi part for corner k uses the two edges incident to k.
        k1, k2 = (k + 1) % 3, (k + 2) % 3
        vor = (e2[:, k2] * cots[:, k2] + e2[:, k1] * cots[:, k1]) / 8.0
        a = np.where(any_obtuse, np.where(obtuse[:, k], area / 2.0, area / 4.0), vor)
        np.add.at(out, t[:, k], a)
    return out


def _vertex_normals(mesh, face_normals):
    # Angle-weighted normals: unbiased on symmetric 1-rings.
    t = mesh.triangles
    p = mesh.vertices[t]
    acc = np.zeros((mesh.n_vertices, 3))
    for k in range(3):
        a = p[:, (k + 1) % 3] - p[:, k]
        b = p[:, (k + 2) % 3] - p[:, k]
        cosang = np.einsum("ij,ij->i", a, b) / (
            np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
        )
        ang = np.arccos(np.clip(cosang, -1.0, 1.0))
        np.add.at(acc, t[:, k], ang[:, None] * face_normals)
    return acc / np.linalg.norm(acc, axis=1, keepdims=True)


def face_gradient_operator(mesh):
    """Per-face gradients of piecewise-linear fields.

    Returns ``(G, areas)`` where ``G`` is a sparse matrix of shape
    ``(3 * n_triangles, n_vertices)`` mapping vertex values to stacked face
    gradient components (x block, y block, z block).
    """
    t = mesh.triangles
    p = mesh.vertices[t]
    nf = mesh.n_triangles
    c = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    dbl = np.linalg.norm(c, axis=1)
    nrm = c / dbl[:, None]
    rows, cols, vals = [], [], []
    for k in range(3):
        e = p[:, (k + 2) % 3] - p[:, (k + 1) % 3]
        g = np.cross(nrm, e) / dbl[:, None]
        for d in range(3):
            rows.append(d * nf + np.arange(nf))
            cols.append(t[:, k])
            vals.append(g[:, d])
    G = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(3 * nf, mesh.n_vertices),
    )
    return G, 0.5 * dbl


def _fit_neighborhoods(mesh):
    """Padded neighbour lists: the 1-ring, widened to the 2-ring below valence 5."""
    A = mesh.vertex_adjacency()
    A2 = (A @ A + A).tocsr()
    A2.setdiag(0)
    A2.eliminate_zeros()
    valence = np.diff(A.indptr)
    rows = []
    for i in range(mesh.n_vertices):
        src = A if valence[i] >= 5 else A2
        rows.append(src.indices[src.indptr[i]:src.indptr[i + 1]])
    kmax = max(len(r) for r in rows)
    pad = np.full((mesh.n_vertices, kmax), -1, dtype=np.int64)
    for i, r in enumerate(rows):
        pad[i, :len(r)] = np.sort(r)
    return pad


def _quadric_fit(mesh, normals, pad):
    """Fit ``h = k11 a^2/2 + k12 a b + k22 b^2/2 + p a + q b`` in each local frame.

    Returns ``(|A|^2, corrected normals)``; the linear terms tilt the frame
    normal onto the fitted tangent plane.
    """
    mask = pad >= 0
    ref = np.where(np.abs(normals[:, :1]) < 0.9, [[1.0, 0, 0]], [[0, 1.0, 0]])
    t1 = np.cross(normals, ref)
    t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
    t2 = np.cross(normals, t1)

    d = mesh.vertices[np.where(mask, pad, 0)] - mesh.vertices[:, None, :]
    a = np.einsum("vkd,vd->vk", d, t1)
    b = np.einsum("vkd,vd->vk", d, t2)
    h = np.einsum("vkd,vd->vk", d, normals) * mask
    X = np.stack([0.5 * a * a, a * b, 0.5 * b * b, a, b], axis=-1) * mask[..., None]
    XtX = np.einsum("vki,vkj->vij", X, X)
    Xth = np.einsum("vki,vk->vi", X, h)
    sol = np.einsum("vij,vj->vi", np.linalg.pinv(XtX), Xth)
    k11, k12, k22 = sol[:, 0], sol[:, 1], sol[:, 2]
    tilted = normals - sol[:, 3:4] * t1 - sol[:, 4:5] * t2
    tilted /= np.linalg.norm(tilted, axis=1, keepdims=True)
    return k11**2 + 2 * k12**2 + k22**2, tilted


def compute_geometry(mesh):
    """Per-vertex normal, ``H``, ``|A|^2``, mixed area and Gaussian weight."""
    cots = cotan_weights(mesh)
    C = cotan_matrix(mesh, cots)
    area = mixed_voronoi_areas(mesh, cots)
    pad = _fit_neighborhoods(mesh)
    normals = _vertex_normals(mesh, mesh.triangle_normals())
    # One tilt correction takes the angle-weighted normal from O(h) to O(h^3)
    # accuracy; Laplacians of <v, n> are useless without it.
    _, normals = _quadric_fit(mesh, normals, pad)
    A2, _ = _quadric_fit(mesh, normals, pad)
    # Cotangent Laplacian of the position is -H n.
    lap_x = np.asarray(C @ mesh.vertices) / area[:, None]
    H = -np.einsum("ij,ij->i", lap_x, normals)
    return SurfaceGeometry(
        normal=normals,
        mean_curvature=H,
        second_fund_norm_sq=A2,
        vertex_area=area,
        gaussian_weight=gaussian_weight(mesh.vertices),
        boundary=np.array(mesh.boundary_flags, copy=True),
        cotan=C,
        grad_op=face_gradient_operator(mesh),
    )


def _check_boundary(geom, boundary_ok):
    if not boundary_ok and geom.boundary.any():
        raise BoundaryError(
            "mesh has boundary vertices; pass boundary_ok=True to accept "
            "untrusted values there (they are flagged in geom.boundary)"
        )


def laplace_beltrami(mesh, geom, u, boundary_ok=True):
    """Cotangent Laplacian divided by the mixed vertex area.

    Values at vertices flagged in ``geom.boundary`` are one-sided; with
    ``boundary_ok=False`` a mesh with boundary raises ``BoundaryError``.
    """
    u = check_field(u, mesh.n_vertices)
    _check_boundary(geom, boundary_ok)
    return (geom.cotan @ u) / geom.vertex_area


def face_gradients(mesh, geom, u):
    """Piecewise-linear gradient on each face, shape (n_triangles, 3)."""
    G, _ = geom.grad_op
    return (G @ u).reshape(3, mesh.n_triangles).T


def vertex_gradient(mesh, geom, u):
    """Area-averaged face gradients, projected on each vertex tangent plane."""
    u = check_field(u, mesh.n_vertices)
    G, fa = geom.grad_op
    gf = face_gradients(mesh, geom, u) * fa[:, None]
    acc = np.zeros((mesh.n_vertices, 3))
    wsum = np.zeros(mesh.n_vertices)
    for k in range(3):
        np.add.at(acc, mesh.triangles[:, k], gf)
        np.add.at(wsum, mesh.triangles[:, k], fa)
    g = acc / wsum[:, None]
    nrm = geom.normal
    return g - np.einsum("ij,ij->i", g, nrm)[:, None] * nrm


def apply_L(mesh, geom, u, boundary_ok=True):
    """Stability operator ``Delta u + |A|^2 u - <x, grad u>/2 + u/2``."""
    u = check_field(u, mesh.n_vertices)
    lap = laplace_beltrami(mesh, geom, u, boundary_ok=boundary_ok)
    drift = np.einsum("ij,ij->i", mesh.vertices, vertex_gradient(mesh, geom, u))
    return lap + geom.second_fund_norm_sq * u - 0.5 * drift + 0.5 * u


def weighted_integral(mesh, geom, u):
    """``sum_i u_i * area_i * exp(-|x_i|^2/4)`` in vertex order."""
    u = check_field(u, mesh.n_vertices)
    return float(np.sum(u * geom.vertex_area * geom.gaussian_weight))


def face_weighted_dirichlet(mesh, geom, u):
    """``int |grad u|^2 exp(-|x|^2/4)`` with the weight averaged per face."""
    u = check_field(u, mesh.n_vertices)
    _, fa = geom.grad_op
    g = face_gradients(mesh, geom, u)
    wf = geom.gaussian_weight[mesh.triangles].mean(axis=1)
    return float(np.sum(np.einsum("ij,ij->i", g, g) * fa * wf))


def _segment_sphere_param(p, q, center, radius):
    """Parameter t in [0, 1] where p + t (q - p) meets the sphere (p inside, q outside)."""
    d = q - p
    f = p - center
    a = d @ d
    b = 2.0 * (f @ d)
    c = f @ f - radius * radius
    disc = max(b * b - 4 * a * c, 0.0)
    return float(np.clip((-b + np.sqrt(disc)) / (2 * a), 0.0, 1.0))


def _clipped_polygon_area(tri, center, radius):
    """Area of the part of a flat triangle inside a ball, boundary arcs replaced by chords."""
    poly = list(tri)
    out = []
    n = len(poly)
    for k in range(n):
        p, q = poly[k], poly[(k + 1) % n]
        pin = np.sum((p - center) ** 2) <= radius * radius
        qin = np.sum((q - center) ** 2) <= radius * radius
        if pin:
            out.append(p)
            if not qin:
                out.append(p + _segment_sphere_param(p, q, center, radius) * (q - p))
        elif qin:
            out.append(q + _segment_sphere_param(q, p, center, radius) * (p - q))
    if len(out) < 3:
        return 0.0
    out = np.array(out)
    acc = np.zeros(3)
    for k in range(1, len(out) - 1):
        acc += np.cross(out[k] - out[0], out[k + 1] - out[0])
    return 0.5 * float(np.linalg.norm(acc))


def _split4(tri):
    a, b, c = tri
    ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
    return [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]


def ball_area(mesh, center, radius):
    """Area of ``B_radius(center) ∩ mesh``.

    Triangles straddling the sphere are split once into four and each child
    is clipped with chords at the sphere; the error is O(h^2) per unit
    boundary length.
    """
    center = np.asarray(center, dtype=float)
    p = mesh.vertices[mesh.triangles]
    dist = np.linalg.norm(p - center, axis=2)
    areas = mesh.triangle_areas()
    inside = np.all(dist <= radius, axis=1)
    # Conservative outside test: the triangle lies in the ball around its
    # centroid with radius max vertex offset.
    cen = p.mean(axis=1)
    spread = np.linalg.norm(p - cen[:, None, :], axis=2).max(axis=1)
    outside = np.linalg.norm(cen - center, axis=1) - spread > radius
    total = float(np.sum(areas[inside]))
    for idx in np.flatnonzero(~inside & ~outside):
        for child in _split4(p[idx]):
            total += _clipped_polygon_area(child, center, radius)
    return total


def area_growth_ratio(mesh, centers, radii):
    """``max Area(B_R(x0) ∩ mesh) / R^2`` over the paired centres and radii.

    Returns 0 when every intersection is empty.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if len(centers) != len(radii):
        raise ValueError("centers and radii must pair up")
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    best = 0.0
    for c, r in zip(centers, radii):
        best = max(best, ball_area(mesh, c, r) / r**2)
    return best
