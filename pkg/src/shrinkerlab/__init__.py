"""Numerical laboratory for self-shrinkers of mean curvature flow."""

from .canonical import make_canonical
from .exceptions import ShrinkerLabError
from .functional import F_value, conformal_report, fd_variation_check, first_variation
from .flow import FlowState, mcf_step, selfsimilar_residual
from .geometry import (
    SurfaceGeometry, apply_L, area_growth_ratio, compute_geometry, laplace_beltrami, weighted_integral,
)
from .mesh import TriMesh, genus, read_off, write_off
from .profile import ProfileCurve, revolve
from .shrinkers import residual, shoot_closed_profile
from .stability import instability_certificate, logu_check, quadratic_form, spectrum, translation_eigen_check

__all__ = [
    "F_value", "FlowState", "ProfileCurve", "ShrinkerLabError", "SurfaceGeometry",
    "TriMesh", "apply_L", "area_growth_ratio", "compute_geometry", "conformal_report",
    "fd_variation_check", "first_variation", "genus", "instability_certificate",
    "laplace_beltrami", "logu_check", "make_canonical", "mcf_step", "quadratic_form",
    "read_off", "residual", "revolve", "selfsimilar_residual", "shoot_closed_profile",
    "spectrum", "translation_eigen_check", "weighted_integral", "write_off",
]
__version__ = "0.1.0"
