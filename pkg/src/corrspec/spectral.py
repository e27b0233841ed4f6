"""Symmetric eigendecomposition and alignment of eigenvectors with the
diagonal direction (1, ..., 1) / sqrt(n)."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import characteristic, g_n
from .exceptions import EigenSolverError

# eigenvalues closer than this (times n) are treated as exact ties
TIE_TOL = 1e-12
SIGN_ZERO_TOL = 1e-12


def default_degeneracy_tol(n: int) -> float:
    return 1e-7 * n


def diagonal_vector(n: int) -> np.ndarray:
    return np.full(n, 1.0 / np.sqrt(n))


@dataclass(frozen=True)
class SpectralData:
    """Descending eigenvalues, paired orthonormal eigenvectors (columns) and
    the weights ``w_j = <v_j, delta_n>^2``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def normalized_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues / self.n

    @property
    def w1(self) -> float:
        return float(self.weights[0])

    @property
    def wmax(self) -> float:
        return float(self.weights.max())

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eigenvalues": self.eigenvalues.tolist(),
            "normalized_eigenvalues": self.normalized_eigenvalues.tolist(),
            "weights": self.weights.tolist(),
            "eigenvectors": self.eigenvectors.T.tolist(),
        }


def _orient(v: np.ndarray) -> np.ndarray:
    total = v.sum(axis=0)
    sign = np.sign(total)
    flat = np.abs(total) <= SIGN_ZERO_TOL
    if np.any(flat):
        idx = np.argmax(np.abs(v[:, flat]), axis=0)
        sign[flat] = np.sign(v[idx, np.flatnonzero(flat)])
    sign[sign == 0] = 1.0
    return v * sign


def _tie_groups(values: np.ndarray, tol: float) -> list[np.ndarray]:
    groups, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i - 1] - values[i] > tol:
            groups.append(np.arange(start, i))
            start = i
    return groups


def eigendecompose(C) -> SpectralData:
    """Full symmetric eigendecomposition sorted by descending eigenvalue.

    Eigenvalues that agree to ``1e-12 * n`` are tied: they are replaced by
    their common mean and ordered by descending weight, then original index.
    Each eigenvector is oriented so that its coordinate sum is non-negative
    (largest-magnitude entry positive when the sum vanishes).
    """
    a = np.asarray(C, dtype=float)
    n = a.shape[0]
    try:
        vals, vecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"symmetric eigensolver (LAPACK syevd) failed for n={n}: {exc}") from exc

    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order].copy(), _orient(vecs[:, order])
    weights = (vecs.sum(axis=0) / np.sqrt(n)) ** 2

    perm = np.arange(n)
    for grp in _tie_groups(vals, TIE_TOL * n):
        if len(grp) > 1:
            vals[grp] = vals[grp].mean()
            # lexsort: last key is primary
            perm[grp] = grp[np.lexsort((grp, -weights[grp]))]
    vals, vecs, weights = vals[perm], vecs[:, perm], weights[perm]

    for arr in (vals, vecs, weights):
        arr.setflags(write=False)
    return SpectralData(vals, vecs, weights)


def weights(S: SpectralData) -> np.ndarray:
    n = S.n
    return (S.eigenvectors.sum(axis=0) / np.sqrt(n)) ** 2


@dataclass(frozen=True)
class IdentityResiduals:
    r1: float
    r2: float


def characteristic_identity_residuals(C) -> IdentityResiduals:
    """Residuals of ``<lam/n, w> = g_n(c)`` and ``|lam/n|^2 = g_n(c^2 + sigma^2)``
    with the spectrum from the eigensolver and (c, sigma) from direct sums."""
    S = eigendecompose(C)
    ch = characteristic(C)
    lt = S.normalized_eigenvalues
    r1 = abs(float(lt @ S.weights) - g_n(ch.n, ch.c))
    r2 = abs(float(lt @ lt) - g_n(ch.n, ch.radius_sq))
    return IdentityResiduals(r1, r2)


@dataclass(frozen=True)
class EigenspaceWeight:
    eigenvalue: float
    multiplicity: int
    weight: float

    def to_dict(self) -> dict:
        return {"eigenvalue": self.eigenvalue, "multiplicity": self.multiplicity, "weight": self.weight}


def eigenspace_weights(S: SpectralData, degeneracy_tol: float | None = None) -> list[EigenspaceWeight]:
    """Cluster eigenvalues whose consecutive gaps are below ``degeneracy_tol``
    and report the squared projection of delta_n onto each cluster's span.

    Unlike individual weights these do not depend on the eigenbasis chosen
    inside a degenerate eigenspace.
    """
    tol = default_degeneracy_tol(S.n) if degeneracy_tol is None else degeneracy_tol
    out = []
    for grp in _tie_groups(S.eigenvalues, tol):
        out.append(
            EigenspaceWeight(
                float(S.eigenvalues[grp].mean()),
                len(grp),
                float(S.weights[grp].sum()),
            )
        )
    return out


class Alignment(str, enum.Enum):
    W1_IS_MAX = "W1_IS_MAX"
    W1_LESS_THAN_WMAX = "W1_LESS_THAN_WMAX"
    AMBIGUOUS_DEGENERATE = "AMBIGUOUS_DEGENERATE"


def alignment_from_spectrum(S: SpectralData, degeneracy_tol: float | None = None) -> Alignment:
    clusters = eigenspace_weights(S, degeneracy_tol)
    top = clusters[0]
    if top.multiplicity > 1:
        return Alignment.AMBIGUOUS_DEGENERATE
    rest = clusters[1:]
    w1 = top.weight
    if not rest:
        return Alignment.W1_IS_MAX
    # inside a cluster of multiplicity m with weight W, every basis has some
    # vector of weight >= W/m and some basis puts all of W on one vector
    guaranteed = max(cl.weight / cl.multiplicity for cl in rest)
    attainable = max(cl.weight for cl in rest)
    if w1 < guaranteed:
        return Alignment.W1_LESS_THAN_WMAX
    if w1 >= attainable:
        return Alignment.W1_IS_MAX
    return Alignment.AMBIGUOUS_DEGENERATE


def w1_vs_wmax(C, degeneracy_tol: float | None = None) -> Alignment:
    """Decide whether every orthonormal eigenbasis has ``w_1 < w_max``.

    ``AMBIGUOUS_DEGENERATE`` is returned when the top eigenvalue is degenerate
    or when the answer depends on the basis chosen in a degenerate eigenspace.
    """
    return alignment_from_spectrum(eigendecompose(C), degeneracy_tol)


def spectral_summary(S: SpectralData, degeneracy_tol: float | None = None) -> dict:
    clusters = eigenspace_weights(S, degeneracy_tol)
    return {
        "lambda1": float(S.eigenvalues[0]),
        "lambda2": float(S.eigenvalues[1]),
        "lambda_min": float(S.eigenvalues[-1]),
        "lambda1_simple": clusters[0].multiplicity == 1,
        "w1": S.w1,
        "wmax": S.wmax,
        "wmax_eigenspace": max(cl.weight for cl in clusters),
        "eigenspaces": [cl.to_dict() for cl in clusters],
    }

