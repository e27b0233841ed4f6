"""scikit-learn style wrapper: fit on a correlation matrix (or raw samples),
expose the spectrum, the closed-form bounds and the alignment verdict."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .bounds import bound_report
from .core import CorrelationMatrix, characteristic, gram_from_columns
from .domains import classify
from .exceptions import ExcludedInputError, PreconditionError
from .spectral import alignment_from_spectrum, eigendecompose, spectral_summary


class CorrelationSpectrum(BaseEstimator, TransformerMixin):
    """Spectral analysis of a correlation matrix.

    Parameters
    ----------
    input : {"correlation", "samples"}, default="correlation"
        ``"correlation"``: ``X`` passed to ``fit`` is the n x n matrix itself.
        ``"samples"``: ``X`` is an N x n data matrix; its columns are
        normalized (after optional centering) and the Gram matrix is used.
    center : bool, default=False
        Subtract column means first (only for ``input="samples"``), giving
        the usual Pearson correlation.
    psd_tol : float or None
    degeneracy_tol : float or None

    Attributes
    ----------
    correlation_ : CorrelationMatrix
    characteristic_ : Characteristic
    eigenvalues_, components_, weights_ : ndarray
        Descending eigenvalues, eigenvectors as rows, and their weights.
    alignment_ : Alignment
    bounds_ : BoundReport or None
        ``None`` for the identity characteristic (0, 0).
    guarantee_ : GuaranteeReport or None
    """

    def __init__(self, input="correlation", center=False, psd_tol=None, degeneracy_tol=None):
        self.input = input
        self.center = center
        self.psd_tol = psd_tol
        self.degeneracy_tol = degeneracy_tol

    def _matrix(self, X) -> CorrelationMatrix:
        if self.input == "correlation":
            X = check_array(X, dtype=np.float64, ensure_min_samples=2, ensure_min_features=2)
            return CorrelationMatrix(X, self.psd_tol)
        if self.input == "samples":
            X = check_array(X, dtype=np.float64, ensure_min_samples=1, ensure_min_features=2)
            if self.center:
                X = X - X.mean(axis=0)
            return gram_from_columns(X)
        raise PreconditionError(f"input must be 'correlation' or 'samples', got {self.input!r}")

    def fit(self, X, y=None):
        C = self._matrix(X)
        S = eigendecompose(C)
        ch = characteristic(C)
        self.correlation_ = C
        self.characteristic_ = ch
        self.spectrum_ = S
        self.eigenvalues_ = S.eigenvalues
        self.components_ = S.eigenvectors.T
        self.weights_ = S.weights
        self.n_features_in_ = ch.n
        self.alignment_ = alignment_from_spectrum(S, self.degeneracy_tol)
        try:
            self.bounds_ = bound_report(ch.n, ch.c, ch.sigma)
            self.guarantee_ = classify(ch.n, ch.c, ch.sigma)
        except ExcludedInputError:
            self.bounds_ = self.guarantee_ = None
        return self

    def transform(self, X):
        """Project samples (rows of ``X``) onto the eigenvectors, leading first."""
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.components_.T

    def summary(self) -> dict:
        check_is_fitted(self, "components_")
        return spectral_summary(self.spectrum_, self.degeneracy_tol)
