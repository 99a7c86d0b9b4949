"""scikit-learn style wrappers for the experiments that have a fit/predict shape.

Only three pieces fit that mould: turning meshes into a feature table
(residual norms and ``F``), solving for a drift spectrum on a profile, and
searching for a closed profile. Everything else stays a plain function.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .functional import F_value
from .geometry import compute_geometry
from .mesh import genus
from .profile import revolve
from .shrinkers import residual, shoot_closed_profile
from .stability import spectrum
from .validation import check_mesh


class ShrinkerFeatures(TransformerMixin, BaseEstimator):
    """Map meshes to ``[norm_inf, norm_l2_weighted, F, genus]`` rows.

    Stateless; ``fit`` only records the feature names.
    """

    def fit(self, X, y=None):
        self.feature_names_ = np.array(["residual_norm_inf", "residual_norm_l2_weighted", "F", "genus"])
        return self

    def transform(self, X):
        check_is_fitted(self, "feature_names_")
        rows = []
        for mesh in X:
            check_mesh(mesh)
            g = compute_geometry(mesh)
            r = residual(mesh, g)
            rows.append([r.norm_inf, r.norm_l2_weighted, F_value(mesh, g), genus(mesh)])
        return np.array(rows, dtype=float).reshape(-1, 4)


class DriftSpectrum(BaseEstimator):
    """Lowest eigenvalues of ``-L`` over several angular modes of a profile.

    Parameters
    ----------
    modes : tuple of int
        Angular wave numbers ``k``; each ``k >= 1`` is counted twice.
    count : int
        Eigenvalues kept per mode and in the merged head.
    Z : float or None
        Truncation radius for open profiles.
    element_length : float
        Target arclength of each quadratic element.
    """

    def __init__(self, modes=(0, 1), count=4, Z=None, element_length=0.02):
        self.modes = modes
        self.count = count
        self.Z = Z
        self.element_length = element_length

    def fit(self, profile, y=None):
        self.results_ = {
            k: spectrum(profile, k=k, count=self.count, Z=self.Z, element_length=self.element_length)
            for k in self.modes
        }
        vals = []
        for k, res in self.results_.items():
            vals.extend(res.eigenvalues)
            if k >= 1:
                vals.extend(res.eigenvalues)
        self.eigenvalues_ = np.sort(np.array(vals))[: self.count]
        return self

    def predict(self, modes=None):
        """Eigenvalues for the requested modes (all fitted modes by default)."""
        check_is_fitted(self, "results_")
        modes = self.modes if modes is None else modes
        return {k: self.results_[k].eigenvalues for k in modes}

    def score(self, reference, y=None):
        """Negative max deviation of the merged head from ``reference``."""
        check_is_fitted(self, "eigenvalues_")
        ref = np.asarray(reference, dtype=float)
        return -float(np.max(np.abs(self.eigenvalues_[: len(ref)] - ref)))


class TorusShooter(BaseEstimator):
    """Shooting search for a closed rotationally symmetric shrinker.

    ``fit`` runs the search; ``transform`` revolves the closed profile at the
    given angular resolutions into meshes.
    """

    def __init__(self, r_start_range=(0.3, 1.2), tol=1e-8, step=1e-3, angular_resolution=256):
        self.r_start_range = r_start_range
        self.tol = tol
        self.step = step
        self.angular_resolution = angular_resolution

    def fit(self, X=None, y=None):
        res = shoot_closed_profile(
            tuple(self.r_start_range), tol=self.tol, step=self.step,
            angular_resolution=self.angular_resolution,
        )
        self.result_ = res
        self.profile_ = res.profile
        self.r_start_ = res.r_start
        return self

    def transform(self, X=None):
        check_is_fitted(self, "profile_")
        return revolve(self.profile_, self.angular_resolution)
