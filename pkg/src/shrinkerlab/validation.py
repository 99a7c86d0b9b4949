"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np

from .exceptions import PositivityError, SupportError


def check_field(u, n, name="u"):
    """Return ``u`` as a finite float vector of length ``n``.

    Scalars are broadcast to a constant field.
    """
    if isinstance(u, numbers.Real):
        return np.full(n, float(u))
    arr = np.asarray(u, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{name} has shape {arr.shape}, expected ({n},)")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_compact_support(u, boundary, name="u", atol=0.0):
    """Raise ``SupportError`` when ``u`` is nonzero on a boundary vertex."""
    bad = np.abs(u[boundary]) > atol
    if np.any(bad):
        raise SupportError(
            f"{name} is not compactly supported: nonzero on {int(bad.sum())} boundary vertices"
        )
    return u


def check_positive(u, name="u"):
    if np.any(u <= 0):
        raise PositivityError(f"{name} must be strictly positive")
    return u


def check_positive_scalar(x, name):
    if not (isinstance(x, numbers.Real) and np.isfinite(x) and x > 0):
        raise ValueError(f"{name} must be a positive finite number, got {x!r}")
    return float(x)


def check_mesh(mesh):
    from .mesh import TriMesh

    if not isinstance(mesh, TriMesh):
        raise TypeError(f"expected TriMesh, got {type(mesh).__name__}")
    return mesh
