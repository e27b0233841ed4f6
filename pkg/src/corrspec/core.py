"""Correlation matrix type, validation, the characteristic (c, sigma) and the
scalar scaling functions ``g_n``, ``s`` and ``s_n``."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateInputError,
    DimensionError,
    DomainError,
    InvalidCorrelationError,
    NotPSDError,
)

SYMMETRY_TOL = 1e-12
DIAGONAL_TOL = 1e-12
RANGE_TOL = 1e-12
SIGMA_CLAMP = 1e-14
SCALAR_TOL = 1e-12


def default_psd_tol(n: int) -> float:
    """Slack on the smallest eigenvalue, relative to the dimension."""
    return 1e-8 * n


class ViolationKind(str, enum.Enum):
    ASYMMETRY = "ASYMMETRY"
    DIAGONAL = "DIAGONAL"
    RANGE = "RANGE"
    NOT_PSD = "NOT_PSD"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str
    magnitude: float

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "detail": self.detail, "magnitude": self.magnitude}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set[ViolationKind]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {"is_valid": self.is_valid, "violations": [v.to_dict() for v in self.violations]}


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise DimensionError(f"correlation matrices need n >= 2, got n={a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix contains non-finite entries")
    return a


def validate_correlation(m, psd_tol: float | None = None) -> ValidationReport:
    """Check symmetry, unit diagonal, entry range and positive semi-definiteness.

    Parameters
    ----------
    m : array_like, shape (n, n)
    psd_tol : float, optional
        The smallest eigenvalue may be as low as ``-psd_tol``. Defaults to
        ``1e-8 * n``.

    Returns
    -------
    ValidationReport
        One violation per failed condition, carrying its worst magnitude.
    """
    a = _as_square(m)
    n = a.shape[0]
    tol = default_psd_tol(n) if psd_tol is None else float(psd_tol)
    found = []

    asym = float(np.max(np.abs(a - a.T)))
    if asym > SYMMETRY_TOL:
        i, j = np.unravel_index(np.argmax(np.abs(a - a.T)), a.shape)
        found.append(Violation(ViolationKind.ASYMMETRY, f"|C[{i},{j}] - C[{j},{i}]| = {asym:.3g}", asym))

    diag_err = float(np.max(np.abs(np.diag(a) - 1.0)))
    if diag_err > DIAGONAL_TOL:
        i = int(np.argmax(np.abs(np.diag(a) - 1.0)))
        found.append(Violation(ViolationKind.DIAGONAL, f"C[{i},{i}] = {a[i, i]!r} != 1", diag_err))

    biggest = float(np.max(np.abs(a)))
    if biggest > 1.0 + RANGE_TOL:
        i, j = np.unravel_index(np.argmax(np.abs(a)), a.shape)
        found.append(Violation(ViolationKind.RANGE, f"|C[{i},{j}]| = {biggest:.6g} > 1", biggest))

    lam_min = float(np.linalg.eigvalsh(0.5 * (a + a.T))[0])
    if lam_min < -tol:
        found.append(
            Violation(ViolationKind.NOT_PSD, f"smallest eigenvalue {lam_min:.6g} < -{tol:.3g}", -lam_min)
        )
    return ValidationReport(tuple(found))


class CorrelationMatrix:
    """Validated, immutable correlation matrix.

    Entries are stored fully symmetric with an exact unit diagonal. Input whose
    asymmetry is below ``1e-12`` is symmetrized by averaging; anything else
    that fails :func:`validate_correlation` raises.

    The object behaves like a read-only ``ndarray`` under ``np.asarray``.
    """

    __slots__ = ("_data",)

    def __init__(self, entries, psd_tol: float | None = None, *, validate: bool = True):
        a = np.array(entries, dtype=float, copy=True)
        if validate:
            report = validate_correlation(a, psd_tol)
            if not report.is_valid:
                kinds = report.kinds()
                msg = "; ".join(v.detail for v in report.violations)
                if kinds == {ViolationKind.NOT_PSD}:
                    raise NotPSDError(f"not positive semi-definite: {msg}", report)
                raise InvalidCorrelationError(f"invalid correlation matrix: {msg}", report)
        else:
            a = _as_square(a)
        a = 0.5 * (a + a.T)
        np.fill_diagonal(a, 1.0)
        a.setflags(write=False)
        self._data = a

    @classmethod
    def _trusted(cls, a: np.ndarray) -> "CorrelationMatrix":
        # for constructors whose output is valid by construction
        return cls(a, validate=False)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def __getitem__(self, idx):
        return self._data[idx]

    def __eq__(self, other):
        if not isinstance(other, CorrelationMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    __hash__ = None

    def __repr__(self):
        return f"CorrelationMatrix(n={self.n})\n{self._data!r}"

    def tolist(self) -> list:
        return self._data.tolist()


def as_correlation(m, psd_tol: float | None = None) -> CorrelationMatrix:
    if isinstance(m, CorrelationMatrix):
        return m
    return CorrelationMatrix(m, psd_tol)


@dataclass(frozen=True)
class Characteristic:
    """Mean ``c`` and standard deviation ``sigma`` of the off-diagonal entries."""

    n: int
    c: float
    sigma: float

    @property
    def radius_sq(self) -> float:
        return self.c * self.c + self.sigma * self.sigma

    def to_dict(self) -> dict:
        return {"n": self.n, "c": self.c, "sigma": self.sigma}


def characteristic(C) -> Characteristic:
    a = np.asarray(C, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
        raise DimensionError(f"expected a square matrix with n >= 2, got shape {a.shape}")
    n = a.shape[0]
    off = a[np.tril_indices(n, -1)]
    c = float(off.mean())
    # two-pass variance; equals mean(C_ij^2) - c^2 without the cancellation
    radicand = float(np.mean((off - c) ** 2))
    if radicand < 0.0:
        if radicand < -SIGMA_CLAMP:
            raise DomainError(f"negative variance {radicand!r}")
        radicand = 0.0
    return Characteristic(n, c, float(np.sqrt(radicand)))


def _scalar_or_array(x, out):
    if np.ndim(x) == 0:
        return float(out)
    return out


def g_n(n: int, x):
    """``((n - 1) x + 1) / n``; the normalized sum of entries of a unit-diagonal
    matrix whose mean off-diagonal value is ``x``."""
    if n < 1:
        raise DomainError(f"g_n needs n >= 1, got {n}")
    xa = np.asarray(x, dtype=float)
    return _scalar_or_array(x, ((n - 1) * xa + 1.0) / n)


def s(x):
    """Lower bound on the largest component of a probability vector whose
    squared norm is at least ``x``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < -SCALAR_TOL) or np.any(xa > 1.0 + SCALAR_TOL) or np.any(np.isnan(xa)):
        raise DomainError(f"s(x) is defined on [0, 1], got {x!r}")
    xa = np.clip(xa, 0.0, 1.0)
    upper = 0.5 * (1.0 + np.sqrt(np.maximum(2.0 * xa - 1.0, 0.0)))
    return _scalar_or_array(x, np.where(xa >= 0.5, upper, xa))


def s_n(n: int, x):
    return s(g_n(n, x))


def min_mean_correlation(n: int) -> float:
    """Smallest mean correlation any n x n correlation matrix can have."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    return 1.0 / (1.0 - n)


def legal_domain_violations(n: int, c: float, sigma: float, tol: float = SCALAR_TOL) -> list[str]:
    """Names of the characteristic constraints that ``(n, c, sigma)`` breaks."""
    out = []
    if n < 2:
        out.append(f"n >= 2 (got n={n})")
        return out
    if not (np.isfinite(c) and np.isfinite(sigma)):
        return ["finite c and sigma"]
    if sigma < -tol:
        out.append(f"sigma >= 0 (got {sigma!r})")
    if abs(c) > 1 + tol:
        out.append(f"|c| <= 1 (got {c!r})")
    if sigma > 1 + tol:
        out.append(f"sigma <= 1 (got {sigma!r})")
    if c * c + sigma * sigma > 1 + tol:
        out.append(f"c^2 + sigma^2 <= 1 (got {c * c + sigma * sigma!r})")
    if c < min_mean_correlation(n) - tol:
        out.append(f"c >= 1/(1-n) = {min_mean_correlation(n)!r} (got {c!r})")
    return out


def legal_domain(n: int, c: float, sigma: float, tol: float = SCALAR_TOL) -> bool:
    return not legal_domain_violations(n, c, sigma, tol)


def gram_from_columns(M) -> CorrelationMatrix:
    """Normalize the columns of ``M`` (N x n) and return ``M^T M``."""
    a = np.asarray(M, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 2:
        raise DimensionError(f"need N >= 1 rows and n >= 2 columns, got shape {a.shape}")
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        bad = np.flatnonzero(~(norms > 0.0)).tolist()
        raise DegenerateInputError(f"columns {bad} have zero or non-finite norm")
    u = a / norms
    g = u.T @ u
    np.clip(g, -1.0, 1.0, out=g)
    return CorrelationMatrix._trusted(g)
