"""Closed-form lower bounds on the leading eigenvalue and on eigenvector
alignment, evaluated from (n, c, sigma) alone."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import g_n, legal_domain_violations, s, s_n
from .exceptions import DomainError, ExcludedInputError, PreconditionError, UnsupportedInputError


class Branch(str, enum.Enum):
    """Which argument of a max/min decided a bound.

    ``MEAN`` is the ``g_n(c)`` term, ``SCALED`` the ``s_n(...)`` term and
    ``PERTURBATION`` the ``(n-1)/n * sigma^2/c^2`` deficit of the w1 bound.
    """

    SCALED = "SCALED"
    MEAN = "MEAN"
    PERTURBATION = "PERTURBATION"


def _check(n: int, c: float, sigma: float) -> None:
    bad = legal_domain_violations(n, c, sigma)
    if bad:
        raise DomainError(f"(n={n}, c={c!r}, sigma={sigma!r}) outside the legal domain: " + "; ".join(bad))
    if c == 0.0 and sigma == 0.0:
        raise ExcludedInputError("characteristic (0, 0) belongs to the identity matrix; bounds are undefined")


def _cos_sq(c: float, sigma: float) -> float:
    return c * c / (c * c + sigma * sigma)


def lambda1_bound(n: int, c: float, sigma: float) -> float:
    """Lower bound on the largest eigenvalue: ``n * max(s_n(c^2+sigma^2), g_n(c))``."""
    _check(n, c, sigma)
    return n * max(s_n(n, c * c + sigma * sigma), g_n(n, c))


def wmax_bound(n: int, c: float, sigma: float) -> float:
    _check(n, c, sigma)
    return max(s_n(n, _cos_sq(c, sigma)), g_n(n, c))


def _w1_deficits(n: int, c: float, sigma: float) -> tuple[float, float]:
    perturbation = (n - 1) / n * sigma * sigma / (c * c)
    bracket = (1.0 - g_n(n, c)) / s_n(n, c * c + sigma * sigma)
    return perturbation, bracket


def w1_bound(n: int, c: float, sigma: float) -> float:
    """Lower bound on the weight of the leading eigenvector (``c > 0`` only).

    The value is returned unclamped and may be negative, in which case the
    bound carries no information.
    """
    _check(n, c, sigma)
    if c <= 0:
        raise UnsupportedInputError(f"the w1 bound needs c > 0, got c={c!r}")
    return 1.0 - min(_w1_deficits(n, c, sigma))


@dataclass(frozen=True)
class UniversalBounds:
    lambda1_over_n: float
    wmax: float
    w1: float | None

    def to_dict(self) -> dict:
        return {"lambda1_over_n": self.lambda1_over_n, "wmax": self.wmax, "w1": self.w1}


def universal_bounds(c: float, sigma: float) -> UniversalBounds:
    """Dimension-free versions of the three bounds (weaker, valid for every n)."""
    r2 = c * c + sigma * sigma
    if r2 > 1 + 1e-12 or sigma < 0:
        raise DomainError(f"(c, sigma) = ({c!r}, {sigma!r}) outside the upper unit half-disc")
    if r2 == 0.0:
        raise ExcludedInputError("characteristic (0, 0) belongs to the identity matrix")
    lam = max(c, s(r2))
    wmax = max(c, s(c * c / r2))
    w1 = 1.0 - min(sigma * sigma / (c * c), (1.0 - c) / s(r2)) if c > 0 else None
    return UniversalBounds(lam, wmax, w1)


@dataclass(frozen=True)
class Polar:
    r_c: float
    phi_c: float


def polar(c: float, sigma: float) -> Polar:
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma!r}")
    r = math.hypot(c, sigma)
    if r == 0.0:
        raise ExcludedInputError("polar angle undefined at the origin")
    return Polar(r, math.atan2(sigma, c))


def _one_minus_s_n(n: int, sin2):
    """``1 - s_n(1 - sin2)`` without cancellation for small ``sin2``."""
    sin2 = np.asarray(sin2, dtype=float)
    one_minus_g = (n - 1) / n * sin2
    g = 1.0 - one_minus_g
    out = np.where(g >= 0.5, one_minus_g / (1.0 + np.sqrt(np.maximum(2.0 * g - 1.0, 0.0))), one_minus_g)
    return float(out) if out.ndim == 0 else out


def theta_min_bound(n: int, c: float, sigma: float) -> float:
    """Upper bound (radians) on the smallest angle between delta_n and any
    eigenvector."""
    _check(n, c, sigma)
    sin2 = sigma * sigma / (c * c + sigma * sigma)
    gap = _one_minus_s_n(n, sin2)
    return math.atan2(math.sqrt(gap), math.sqrt(1.0 - gap))


def theta_min_relaxed(c: float, sigma: float) -> float:
    """Dimension-free relaxation of :func:`theta_min_bound`: the polar angle."""
    return polar(c, sigma).phi_c


def w1_bracket_bound(n: int, c: float, a: float, b: float) -> float:
    """Lower bound on w1 given ``n a <= lambda_1 <= n b``."""
    if a < 0 or b < 0:
        raise PreconditionError(f"a and b must be >= 0, got a={a!r}, b={b!r}")
    if a + b <= 1:
        raise PreconditionError(f"need a + b > 1, got a + b = {a + b!r}")
    return (g_n(n, c) + a - 1.0) / (b + a - 1.0)


def psd_top_eig_bound(A=None, trace: float | None = None, frob_sq: float | None = None) -> float:
    """Lower bound ``Tr(A) * s(||A||_F^2 / Tr(A)^2)`` on the top eigenvalue of a
    symmetric positive semi-definite matrix.

    Either pass ``A`` or both ``trace`` and ``frob_sq``.
    """
    if trace is None or frob_sq is None:
        if A is None:
            raise PreconditionError("need A or both trace and frob_sq")
        a = np.asarray(A, dtype=float)
        if trace is None:
            trace = float(np.trace(a))
        if frob_sq is None:
            frob_sq = float(np.sum(a * a))
    if trace <= 0:
        raise PreconditionError(f"trace must be > 0, got {trace!r}")
    return trace * s(frob_sq / (trace * trace))


def fueredi_komlos_reference(c: float, sigma: float) -> float:
    """Large-n, in-probability comparator ``1 - 4 sigma^2 / c^2`` for w1.

    Asymptotic statement about random matrices, not a guarantee for any
    particular matrix.
    """
    if c <= 0:
        raise UnsupportedInputError(f"comparator needs c > 0, got c={c!r}")
    return 1.0 - 4.0 * sigma * sigma / (c * c)


@dataclass(frozen=True)
class WielandReport:
    """Slack of ``eta_k^2 (1 - <v, xi_k>^2) <= ||B - A||_F^2`` for every
    eigenpair (rows, of B) and every k (columns, eigenvectors of A)."""

    slack: np.ndarray
    frobenius_sq: float

    @property
    def worst_slack(self) -> float:
        return float(self.slack.min())

    @property
    def holds(self) -> bool:
        return self.worst_slack >= -1e-8


def wieland_residual_check(A, B) -> WielandReport:
    a = np.asarray(A, dtype=float)
    b = np.asarray(B, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"need two square matrices of equal size, got {a.shape} and {b.shape}")
    alpha, xi = np.linalg.eigh(a)
    lam, v = np.linalg.eigh(b)
    frob = float(np.sum((b - a) ** 2))
    n = a.shape[0]
    overlap_sq = (v.T @ xi) ** 2  # [pair, k]
    gaps = np.abs(lam[:, None] - alpha[None, :])  # [pair, j]
    slack = np.empty((n, n))
    for k in range(n):
        others = np.delete(gaps, k, axis=1)
        eta = others.min(axis=1) if n > 1 else np.zeros(n)
        slack[:, k] = frob - eta**2 * (1.0 - overlap_sq[:, k])
    return WielandReport(slack, frob)


@dataclass(frozen=True)
class BoundReport:
    n: int
    c: float
    sigma: float
    lambda1_over_n: float
    wmax_lb: float
    w1_lb: float | None
    r_c: float
    phi_c: float
    theta_min_ub: float
    lambda1_branch: Branch
    wmax_branch: Branch
    w1_branch: Branch | None
    universal: UniversalBounds

    @property
    def lambda1_lb(self) -> float:
        return self.n * self.lambda1_over_n

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "c": self.c,
            "sigma": self.sigma,
            "lambda1_lb": self.lambda1_lb,
            "lambda1_over_n": self.lambda1_over_n,
            "wmax_lb": self.wmax_lb,
            "w1_lb": self.w1_lb,
            "r_c": self.r_c,
            "phi_c": self.phi_c,
            "theta_min_ub": self.theta_min_ub,
            "theta_min_relaxed": self.phi_c,
            "which_branch": {
                "lambda1": self.lambda1_branch.value,
                "wmax": self.wmax_branch.value,
                "w1": None if self.w1_branch is None else self.w1_branch.value,
            },
            "universal": self.universal.to_dict(),
        }


def bound_report(n: int, c: float, sigma: float) -> BoundReport:
    _check(n, c, sigma)
    r2 = c * c + sigma * sigma
    lam_scaled, lam_mean = s_n(n, r2), g_n(n, c)
    w_scaled, w_mean = s_n(n, _cos_sq(c, sigma)), g_n(n, c)
    if c > 0:
        pert, brk = _w1_deficits(n, c, sigma)
        w1 = 1.0 - min(pert, brk)
        w1_branch = Branch.PERTURBATION if pert <= brk else Branch.SCALED
    else:
        w1, w1_branch = None, None
    p = polar(c, sigma)
    return BoundReport(
        n=n,
        c=c,
        sigma=sigma,
        lambda1_over_n=max(lam_scaled, lam_mean),
        wmax_lb=max(w_scaled, w_mean),
        w1_lb=w1,
        r_c=p.r_c,
        phi_c=p.phi_c,
        theta_min_ub=theta_min_bound(n, c, sigma),
        lambda1_branch=Branch.SCALED if lam_scaled > lam_mean else Branch.MEAN,
        wmax_branch=Branch.SCALED if w_scaled > w_mean else Branch.MEAN,
        w1_branch=w1_branch,
        universal=universal_bounds(c, sigma),
    )
