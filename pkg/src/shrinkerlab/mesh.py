"""Oriented triangle meshes, topology queries and OFF/CSV input-output."""

import csv
from pathlib import Path

import numpy as np

from .exceptions import DegeneracyError, OrientationError

# Triangles below this fraction of the mean area are rejected.
DEGENERATE_FRACTION = 1e-12


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


class TriMesh:
    """Oriented, manifold triangle mesh embedded in R^3.

    Parameters
    ----------
    vertices : array_like, shape (n_vertices, 3)
        Vertex positions.
    triangles : array_like of int, shape (n_triangles, 3)
        Vertex indices. Adjacent triangles must traverse their shared edge
        in opposite directions.
    validate : bool, default=True
        Check the manifold, orientation and degeneracy invariants.

    Attributes
    ----------
    boundary_flags : ndarray of bool, shape (n_vertices,)
        True on vertices incident to a boundary edge.

    Notes
    -----
    Instances are immutable: arrays are stored read-only and every
    operation that moves vertices returns a new mesh.
    """

    def __init__(self, vertices, triangles, validate=True):
        v = np.asarray(vertices, dtype=float)
        t = np.asarray(triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must have shape (n, 3)")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError("triangles must have shape (m, 3)")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("triangle index out of range")
        self.vertices = _readonly(v)
        self.triangles = _readonly(t)
        self._directed = None
        if validate:
            self._check_orientation()
            self._check_degeneracy()
        self.boundary_flags = _readonly(self._boundary_vertex_mask())

    # -- construction helpers -------------------------------------------

    def with_vertices(self, vertices):
        """Same connectivity, new positions (no re-validation of topology)."""
        out = TriMesh.__new__(TriMesh)
        out.vertices = _readonly(np.asarray(vertices, dtype=float))
        out.triangles = self.triangles
        out.boundary_flags = self.boundary_flags
        out._directed = self._directed
        return out

    def scaled(self, factor):
        return self.with_vertices(self.vertices * float(factor))

    # -- basic measures -----------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def is_closed(self):
        return not bool(self.boundary_flags.any())

    def triangle_areas(self):
        p = self.vertices[self.triangles]
        return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)

    def triangle_normals(self):
        """Unit face normals following the triangle winding."""
        p = self.vertices[self.triangles]
        c = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        return c / np.linalg.norm(c, axis=1, keepdims=True)

    def edges(self):
        """Unique undirected edges as sorted index pairs, shape (n_edges, 2)."""
        d = self._directed_edges()
        return np.unique(np.sort(d, axis=1), axis=0)

    def edge_lengths(self):
        e = self.edges()
        return np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)

    def euler_characteristic(self):
        return self.n_vertices - len(self.edges()) + self.n_triangles

    # -- topology -------------------------------------------------------------

    def _directed_edges(self):
        if self._directed is None:
            t = self.triangles
            self._directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return self._directed

    def _check_orientation(self):
        d = self._directed_edges()
        if len(d) == 0:
            return
        if np.any(d[:, 0] == d[:, 1]):
            raise OrientationError("triangle with repeated vertex")
        n = self.n_vertices
        key = d[:, 0] * n + d[:, 1]
        if len(np.unique(key)) != len(key):
            raise OrientationError("inconsistent orientation: a directed edge is used twice")
        und = np.sort(d, axis=1)
        _, counts = np.unique(und[:, 0] * n + und[:, 1], return_counts=True)
        if counts.max() > 2:
            raise OrientationError("non-manifold edge shared by more than two triangles")

    def _check_degeneracy(self):
        areas = self.triangle_areas()
        if len(areas) and np.any(areas < DEGENERATE_FRACTION * areas.mean()):
            raise DegeneracyError(f"degenerate triangle (min area {areas.min():.3e})")

    def boundary_edges(self):
        """Directed boundary edges (those whose reverse is absent)."""
        d = self._directed_edges()
        n = self.n_vertices
        fwd = d[:, 0] * n + d[:, 1]
        rev = d[:, 1] * n + d[:, 0]
        return d[~np.isin(fwd, rev)]

    def _boundary_vertex_mask(self):
        mask = np.zeros(self.n_vertices, dtype=bool)
        b = self.boundary_edges()
        mask[b.ravel()] = True
        return mask

    def boundary_loops(self):
        """Boundary cycles as lists of vertex indices."""
        nxt = {}
        for a, b in self.boundary_edges():
            nxt.setdefault(int(a), []).append(int(b))
        loops = []
        # Vertices sorted so the traversal is deterministic.
        remaining = {a: list(bs) for a, bs in sorted(nxt.items())}
        for start in sorted(remaining):
            while remaining.get(start):
                loop = [start]
                cur = remaining[start].pop()
                while cur != start:
                    loop.append(cur)
                    cur = remaining[cur].pop()
                loops.append(loop)
        return loops

    def vertex_adjacency(self):
        """Sparse symmetric vertex adjacency (CSR, unit weights)."""
        from scipy import sparse

        e = self.edges()
        n = self.n_vertices
        i = np.concatenate([e[:, 0], e[:, 1]])
        j = np.concatenate([e[:, 1], e[:, 0]])
        return sparse.csr_matrix((np.ones(len(i)), (i, j)), shape=(n, n))

    def __repr__(self):
        return (
            f"TriMesh(n_vertices={self.n_vertices}, n_triangles={self.n_triangles}, "
            f"closed={self.is_closed})"
        )


def genus(mesh):
    """Genus of the closed surface obtained by capping every boundary loop.

    ``g = (2 - chi - b) / 2`` with ``b`` boundary loops; a closed mesh has
    ``b = 0``. Disconnected meshes are not supported.
    """
    # Raises OrientationError for non-orientable input.
    mesh._check_orientation()
    b = len(mesh.boundary_loops())
    twice = 2 - mesh.euler_characteristic() - b
    if twice % 2:
        raise OrientationError("odd 2g: mesh is not an orientable connected surface")
    return twice // 2


# -- input/output -------------------------------------------------------------


def read_off(path):
    """Read an ASCII OFF triangle mesh."""
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise ValueError(f"{path}: missing OFF header")
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    verts = np.array(tokens[pos:pos + 3 * nv], dtype=float).reshape(nv, 3)
    pos += 3 * nv
    tris = []
    for _ in range(nf):
        k = int(tokens[pos])
        if k != 3:
            raise ValueError(f"{path}: only triangular faces are supported")
        tris.append([int(x) for x in tokens[pos + 1:pos + 4]])
        pos += 1 + k
    return TriMesh(verts, tris)


def write_off(mesh, path):
    path = Path(path)
    lines = ["OFF", f"{mesh.n_vertices} {mesh.n_triangles} 0"]
    lines += [" ".join(repr(float(c)) for c in v) for v in mesh.vertices]
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_field_csv(mesh, values, path, name="value"):
    """Write a per-vertex field as ``vertex_id,x,y,z,value`` rows."""
    values = np.asarray(values, dtype=float)
    if values.shape != (mesh.n_vertices,):
        raise ValueError("field length does not match the mesh")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["vertex_id", "x", "y", "z", name])
        for i, (p, val) in enumerate(zip(mesh.vertices, values)):
            w.writerow([i, repr(float(p[0])), repr(float(p[1])), repr(float(p[2])), repr(float(val))])
    return Path(path)
