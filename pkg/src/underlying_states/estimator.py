"""
scikit-learn style facade over the model construction.

>>> import numpy as np
>>> est = UnderlyingStateModel().fit([np.diag([1.0, -1.0])])
>>> est.transform(np.array([[1.0, 0.0]])).round(12).tolist()
[[0.0, 1.0]]
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .compatibility import COMPAT_TOL, scenario_pairwise_check
from .errors import IncompatibleScenarioError
from .model import (DEFAULT_CAP, MODEL_TOL, UnderlyingMeasure, _pmfs, build_sample_space,
                    condition_measure)
from .validation import check_observables, check_states


class UnderlyingStateModel(TransformerMixin, BaseEstimator):
    """Fit on a set of observables, transform pure states into measures.

    ``fit`` checks pairwise compatibility and builds the product sample
    space; ``transform`` maps each row of ``X`` (a unit vector) to its pmf
    over the ``points_`` of that space.

    Parameters
    ----------
    tol_compat : float
        Compatibility tolerance.
    tol_model : float
        Tolerance recorded for downstream verification.
    group_tol : float or None
        Eigenvalue grouping tolerance for raw matrices.
    sample_space_cap : int
    names : list of str or None
        Names for raw matrices passed to ``fit``.

    Attributes
    ----------
    observables_ : list of HermitianObservable
    sample_space_ : SampleSpace
    points_ : ndarray, shape (n_points, n_observables)
    compat_report_ : CompatReport
    n_features_in_ : int
        Hilbert-space dimension.
    """

    def __init__(self, tol_compat=COMPAT_TOL, tol_model=MODEL_TOL, group_tol=None,
                 sample_space_cap=DEFAULT_CAP, names=None):
        self.tol_compat = tol_compat
        self.tol_model = tol_model
        self.group_tol = group_tol
        self.sample_space_cap = sample_space_cap
        self.names = names

    def fit(self, X, y=None):
        observables = check_observables(X, self.group_tol, self.names)
        report = scenario_pairwise_check(observables, self.tol_compat)
        if not report.compatible:
            w = report.witness
            raise IncompatibleScenarioError(
                f"{w.pair[0]!r} and {w.pair[1]!r} are incompatible; no state-updating model",
                witness=w)
        self.observables_ = observables
        self.compat_report_ = report
        self.sample_space_ = build_sample_space(observables, self.sample_space_cap)
        self.points_ = self.sample_space_.points
        self.n_features_in_ = observables[0].dim
        return self

    def transform(self, X):
        check_is_fitted(self, "sample_space_")
        return _pmfs(self.sample_space_, check_states(X, self.n_features_in_))

    def conditional_transform(self, X, observable, value):
        """Measures of ``X`` conditioned on ``[observable = value]``."""
        pmfs = self.transform(X)
        return np.stack([condition_measure(UnderlyingMeasure(self.sample_space_, row),
                                           observable, value).pmf for row in pmfs])
