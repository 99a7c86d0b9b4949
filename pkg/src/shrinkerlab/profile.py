"""Generating curves of surfaces of revolution about the z-axis."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import AxisCrossingError
from .mesh import TriMesh


@dataclass(frozen=True)
class ProfileCurve:
    """Ordered ``(r, z)`` samples of a curve in the half-plane ``r > 0``.

    A closed curve wraps around from the last sample to the first (the first
    sample is not repeated). An open curve may start and/or end exactly on the
    axis (``r = 0``); such endpoints become poles when revolved, as for the
    meridian of a sphere. Every other sample must have ``r > 0``.
    """

    samples: np.ndarray
    closed: bool = False

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 2 or len(s) < 3:
            raise ValueError("samples must have shape (n >= 3, 2)")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        steps = np.diff(np.vstack([s, s[:1]]) if self.closed else s, axis=0)
        if np.any(np.linalg.norm(steps, axis=1) == 0):
            raise ValueError("consecutive samples must be distinct")
        r = s[:, 0]
        inner = r if self.closed else r[1:-1]
        if np.any(inner <= 0) or np.any(r < 0):
            raise AxisCrossingError("profile sample with r <= 0 away from an axis endpoint")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def r(self):
        return self.samples[:, 0]

    @property
    def z(self):
        return self.samples[:, 1]

    @property
    def axis_ends(self):
        """``(start_on_axis, end_on_axis)`` for open curves."""
        if self.closed:
            return (False, False)
        return (bool(self.r[0] == 0), bool(self.r[-1] == 0))

    def chord_parameter(self):
        pts = np.vstack([self.samples, self.samples[:1]]) if self.closed else self.samples
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(seg)])

    def spline(self):
        """Cubic spline ``t -> (r, z)`` on the chord-length parameter."""
        t = self.chord_parameter()
        if self.closed:
            pts = np.vstack([self.samples, self.samples[:1]])
            return CubicSpline(t, pts, bc_type="periodic")
        return CubicSpline(t, self.samples)

    def frame(self, t=None):
        """Arclength speed, tangent angle and signed curvature at parameters ``t``.

        ``theta`` is the angle of the tangent ``(dr, dz)`` and ``kappa`` is
        ``d theta / ds``.
        """
        sp = self.spline()
        if t is None:
            t = self.chord_parameter()[: len(self.samples)]
        d1, d2 = sp(t, 1), sp(t, 2)
        speed = np.hypot(d1[..., 0], d1[..., 1])
        theta = np.arctan2(d1[..., 1], d1[..., 0])
        kappa = (d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]) / speed**3
        return speed, theta, kappa

    def arclength(self):
        """Arclength at each sample (piecewise-linear)."""
        return self.chord_parameter()[: len(self.samples)]

    def to_csv(self, path):
        """Write ``s, r, z, theta`` rows."""
        _, theta, _ = self.frame()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s", "r", "z", "theta"])
            for row in zip(self.arclength(), self.r, self.z, theta):
                w.writerow([repr(float(v)) for v in row])
        return Path(path)

    @classmethod
    def from_csv(cls, path, closed=False):
        with open(path, encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        return cls(np.array([[float(r["r"]), float(r["z"])] for r in rows]), closed=closed)


# -- canonical profiles -------------------------------------------------------


def circle_profile(radius=2.0, n=401):
    """Meridian of the sphere of given radius, north pole to south pole."""
    a = np.linspace(0.0, np.pi, n)
    pts = np.column_stack([radius * np.sin(a), radius * np.cos(a)])
    pts[0, 0] = pts[-1, 0] = 0.0
    return ProfileCurve(pts)


def line_profile(radius=np.sqrt(2.0), half_length=8.0, n=401):
    """Vertical segment ``r = radius`` traversed downwards (outward normals when revolved)."""
    z = np.linspace(half_length, -half_length, n)
    return ProfileCurve(np.column_stack([np.full(n, radius), z]))


def ray_profile(length=8.0, n=401):
    """Horizontal segment from the axis outwards at ``z = 0`` (plane generator)."""
    r = np.linspace(0.0, length, n)
    return ProfileCurve(np.column_stack([r, np.zeros(n)]))


# -- surface of revolution ---------------------------------------------------


def revolve(profile, angular_resolution):
    """Triangulated surface of revolution about the z-axis.

    One ring of ``angular_resolution`` vertices per sample; samples on the
    axis become single pole vertices. The winding makes ``T x e_phi`` the
    face normal, ``T`` being the profile tangent, so a sphere meridian
    traversed from north to south yields outward normals.
    """
    m = int(angular_resolution)
    if m < 8:
        raise ValueError("angular_resolution must be >= 8")
    pts = profile.samples
    start_pole, end_pole = profile.axis_ends
    ring_ids = np.arange(len(pts))[int(start_pole):len(pts) - int(end_pole)]
    n_rings = len(ring_ids)
    # Staggering alternate rings needs an even ring count to wrap consistently.
    stagger = not profile.closed or n_rings % 2 == 0
    verts = []
    for k, i in enumerate(ring_ids):
        off = 0.5 * (k % 2) if stagger else 0.0
        ph = 2 * np.pi * (np.arange(m) + off) / m
        r, z = pts[i]
        verts.append(np.column_stack([r * np.cos(ph), r * np.sin(ph), np.full(m, z)]))
    verts = np.vstack(verts)
    tris = []
    pairs = [(k, k + 1) for k in range(n_rings - 1)]
    if profile.closed:
        pairs.append((n_rings - 1, 0))
    j = np.arange(m)
    j1 = (j + 1) % m
    for a, b in pairs:
        lo, hi = a * m, b * m
        shift = (b % 2 - a % 2) if stagger else 0
        if shift >= 0:
            # next ring aligned or half a step ahead
            tris.append(np.column_stack([lo + j, hi + j, lo + j1]))
            tris.append(np.column_stack([lo + j1, hi + j, hi + j1]))
        else:
            tris.append(np.column_stack([lo + j, hi + j1, lo + j1]))
            tris.append(np.column_stack([lo + j, hi + j, hi + j1]))
    if start_pole:
        p = len(verts)
        verts = np.vstack([verts, [[0.0, 0.0, pts[0, 1]]]])
        tris.append(np.column_stack([np.full(m, p), j, j1]))
    if end_pole:
        p = len(verts)
        verts = np.vstack([verts, [[0.0, 0.0, pts[-1, 1]]]])
        lo = (n_rings - 1) * m
        tris.append(np.column_stack([lo + j, np.full(m, p), lo + j1]))
    return TriMesh(verts, np.vstack(tris))
