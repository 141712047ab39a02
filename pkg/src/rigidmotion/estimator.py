"""scikit-learn style wrapper: fit a rigid displacement to corresponding point
sets, then use it to carry other points along."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import EPS_RIGID, _orientation_simplex, max_relative_error, validate_rigidity
from .decomposition import chasles_decompose, decompose_three_step, euler_axis, screw_decompose
from .exceptions import NotRigid, TooFewPoints


class RigidDisplacementEstimator(TransformerMixin, BaseEstimator):
    """Exact rigid displacement between two labelled point sets.

    ``fit(X, y)`` takes the initial positions ``X`` and final positions ``y``
    (both ``(n, 3)``, rows in correspondence), checks that every pairwise
    distance and the handedness are preserved, and decomposes the motion
    using the first non-collinear triple.  This is not a least-squares
    registration: inputs that are not rigid to within ``tol`` are rejected.

    Parameters
    ----------
    translating_point : array-like of shape (3,), default=None
        Point whose displacement is reported as ``displacement_.translation``.
        Defaults to the first point of the fitted triple.
    tol : float, default=1e-9
        Relative tolerance on pairwise distances.

    Attributes
    ----------
    decomposition_ : TwoRotationDecomposition
    rotation_ : Rotation
    displacement_ : RigidDisplacement
    screw_ : ScrewDecomposition
    rigidity_ : RigidityReport
    triple_indices_ : tuple of int
    """

    def __init__(self, translating_point=None, tol=EPS_RIGID):
        self.translating_point = translating_point
        self.tol = tol

    def fit(self, X, y):
        X = check_array(X, dtype=np.float64)
        y = check_array(y, dtype=np.float64)
        if X.shape[1] != 3 or X.shape != y.shape:
            raise ValueError(f"X and y must both have shape (n, 3); got {X.shape} and {y.shape}")
        if len(X) < 3:
            raise TooFewPoints("at least three points are required")
        report = validate_rigidity(X, y, tol=self.tol)
        if not report.accepted:
            raise NotRigid(report.reason(), report)

        scale = float(np.max(np.linalg.norm(X[:, None, :] - X[None, :, :], axis=-1)))
        idx = _orientation_simplex(X, scale)[:3]
        self.triple_indices_ = tuple(int(i) for i in idx)
        initial, final = X[list(idx)], y[list(idx)]

        self.decomposition_ = decompose_three_step(initial, final)
        self.rotation_ = euler_axis(self.decomposition_)
        self.displacement_ = chasles_decompose(initial, final, self.translating_point)
        self.screw_ = screw_decompose(self.displacement_)
        self.rigidity_ = report
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "displacement_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 features, got {X.shape[1]}")
        return self.displacement_.apply(X)

    def inverse_transform(self, X):
        check_is_fitted(self, "displacement_")
        X = check_array(X, dtype=np.float64)
        return self.displacement_.inverse().apply(X)

    def score(self, X, y):
        """Negative largest relative residual of ``transform(X)`` against ``y``."""
        y = check_array(y, dtype=np.float64)
        return -max_relative_error(self.transform(X), y)
