"""Mesh generators for the plane, the radius-2 sphere and the radius-sqrt(2) cylinder."""

from functools import lru_cache

import numpy as np

from .mesh import TriMesh

SPHERE_RADIUS = 2.0
CYLINDER_RADIUS = np.sqrt(2.0)
PLANE_HALF_WIDTH = 8.0
CYLINDER_HALF_LENGTH = 8.0

CANONICAL_KINDS = ("plane", "sphere", "cylinder")


def icosphere(levels, radius=1.0, relax=True):
    """Subdivided icosahedron projected to a sphere, outward winding.

    With ``relax=True`` the vertices are moved (connectivity unchanged) to a
    centroidal Voronoi configuration on the sphere. On the raw projected
    icosphere the cotangent Laplacian is only first-order accurate pointwise;
    after relaxation it is second-order.
    """
    verts, faces = _unit_icosphere(int(levels), bool(relax))
    return TriMesh(radius * verts, faces)


@lru_cache(maxsize=16)
def _unit_icosphere(levels, relax):
    phi = (1 + 5**0.5) / 2
    v = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    f = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = np.array(v, dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array(f, dtype=np.int64)
    for _ in range(levels):
        verts, faces = _subdivide(verts, faces)
        verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    if relax:
        verts = centroidal_relaxation(verts, faces)
    verts.setflags(write=False)
    faces.setflags(write=False)
    return verts, faces


def centroidal_relaxation(points, faces, tol=1e-13, max_iter=5000):
    """Lloyd iteration on the unit sphere with fixed connectivity.

    Each vertex moves to the centroid of its Voronoi cell, assembled from the
    kites (vertex, edge midpoint, circumcentre, edge midpoint) of incident
    faces, then is projected back to the sphere.
    """
    p = points / np.linalg.norm(points, axis=1, keepdims=True)
    n = len(p)
    for _ in range(max_iter):
        a, b, c = p[faces[:, 0]], p[faces[:, 1]], p[faces[:, 2]]
        cc = np.cross(b - a, c - a)
        cc /= np.linalg.norm(cc, axis=1, keepdims=True)
        moment = np.zeros((n, 3))
        weight = np.zeros(n)
        for k in range(3):
            vi = p[faces[:, k]]
            mj = 0.5 * (vi + p[faces[:, (k + 1) % 3]])
            mk = 0.5 * (vi + p[faces[:, (k + 2) % 3]])
            for q, r in ((mj, cc), (cc, mk)):
                ar = 0.5 * np.linalg.norm(np.cross(q - vi, r - vi), axis=1)
                m = ar[:, None] * (vi + q + r) / 3.0
                weight += np.bincount(faces[:, k], ar, minlength=n)
                for d in range(3):
                    moment[:, d] += np.bincount(faces[:, k], m[:, d], minlength=n)
        new = moment / weight[:, None]
        new /= np.linalg.norm(new, axis=1, keepdims=True)
        step = np.abs(new - p).max()
        p = new
        if step < tol:
            break
    return p


def _subdivide(verts, faces):
    edges = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    uniq, inv = np.unique(edges, axis=0, return_inverse=True)
    inv = inv.ravel()
    mids = 0.5 * (verts[uniq[:, 0]] + verts[uniq[:, 1]])
    nf = len(faces)
    m = len(verts) + inv.reshape(3, nf).T  # midpoint of edges (01, 12, 20)
    a, b, c = faces.T
    ab, bc, ca = m.T
    new = np.concatenate([
        np.stack([a, ab, ca], 1),
        np.stack([ab, b, bc], 1),
        np.stack([ca, bc, c], 1),
        np.stack([ab, bc, ca], 1),
    ])
    return np.vstack([verts, mids]), new


def plane_patch(cells, half_width=PLANE_HALF_WIDTH):
    """Square patch in z = 0 tiled by near-equilateral triangles.

    Even rows carry ``cells + 1`` vertices from ``-half_width`` to
    ``half_width``; odd rows are offset by half a spacing.
    """
    h = 2.0 * half_width / cells
    rows = int(round(2.0 * half_width / (h * np.sqrt(3) / 2)))
    y = np.linspace(-half_width, half_width, rows + 1)
    verts, starts = [], []
    for i, yi in enumerate(y):
        xs = -half_width + h * np.arange(cells + 1) if i % 2 == 0 else (
            -half_width + h * (np.arange(cells) + 0.5))
        starts.append(sum(len(v) for v in verts))
        verts.append(np.column_stack([xs, np.full(len(xs), yi), np.zeros(len(xs))]))
    tris = []
    for i in range(rows):
        lo, hi = starts[i], starts[i + 1]
        if i % 2 == 0:
            for j in range(cells):
                tris.append((lo + j, lo + j + 1, hi + j))
            for j in range(cells - 1):
                tris.append((lo + j + 1, hi + j + 1, hi + j))
        else:
            for j in range(cells):
                tris.append((lo + j, hi + j + 1, hi + j))
            for j in range(cells - 1):
                tris.append((lo + j, lo + j + 1, hi + j + 1))
    return TriMesh(np.vstack(verts), tris)


def cylinder_tube(around, half_length=CYLINDER_HALF_LENGTH, radius=CYLINDER_RADIUS):
    """Open cylinder about the z-axis with staggered rings (near-equilateral cells)."""
    ds = 2 * np.pi * radius / around
    rows = int(np.ceil(2 * half_length / (ds * np.sqrt(3) / 2)))
    z = np.linspace(-half_length, half_length, rows + 1)
    k = np.arange(around)
    verts = []
    for i, zi in enumerate(z):
        ang = 2 * np.pi * (k + 0.5 * (i % 2)) / around
        verts.append(np.column_stack([radius * np.cos(ang), radius * np.sin(ang), np.full(around, zi)]))
    verts = np.vstack(verts)
    tris = []
    for i in range(rows):
        lo, hi = i * around, (i + 1) * around
        for j in range(around):
            j1 = (j + 1) % around
            if i % 2 == 0:
                tris += [(lo + j, lo + j1, hi + j), (lo + j1, hi + j1, hi + j)]
            else:
                tris += [(lo + j, lo + j1, hi + j1), (lo + j, hi + j1, hi + j)]
    return TriMesh(verts, tris)


def make_canonical(kind, resolution):
    """Canonical shrinker mesh at a given refinement level.

    ``sphere`` is an icosphere of radius 2 with ``resolution`` subdivisions,
    ``plane`` a square of half-width 8 with ``8 * 2**resolution`` cells per
    side, and ``cylinder`` a tube of radius sqrt(2) and half-length 8 with
    ``8 * 2**resolution`` vertices per ring and open (boundary) ends.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if kind == "sphere":
        return icosphere(resolution, SPHERE_RADIUS)
    if kind == "plane":
        return plane_patch(8 * 2**resolution)
    if kind == "cylinder":
        return cylinder_tube(8 * 2**resolution)
    raise ValueError(f"unknown canonical surface {kind!r}; expected one of {CANONICAL_KINDS}")
