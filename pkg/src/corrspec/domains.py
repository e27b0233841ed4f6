"""Classification of (n, c, sigma) into regions where w1 = w_max is
guaranteed and regions where explicit counterexamples exist."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import g_n, legal_domain_violations, s_n
from .exceptions import DomainError, ExcludedInputError, PreconditionError, UnsupportedInputError

FOURTH_ROOT_2 = 2.0**0.25
EDGE_TOL = 1e-12
SQRT3 = math.sqrt(3.0)


class Condition(str, enum.Enum):
    I = "I"  # noqa: E741
    II = "II"
    III = "III"


def _positive_c(n: int, c: float, sigma: float) -> None:
    if c <= 0:
        raise UnsupportedInputError(f"guarantee conditions need c > 0, got c={c!r}")
    bad = legal_domain_violations(n, c, sigma)
    if bad:
        raise DomainError(f"(n={n}, c={c!r}, sigma={sigma!r}) outside the legal domain: " + "; ".join(bad))


def simple_conditions(n: int, c: float, sigma: float) -> tuple[bool, bool, bool]:
    """Simple sufficient conditions for ``w1 > 1/2``; all non-strict."""
    _positive_c(n, c, sigma)
    return (
        c >= 0.5,
        c >= sigma + 1.0 / math.sqrt(n),
        c >= FOURTH_ROOT_2 * sigma,
    )


def simple_guarantee(n: int, c: float, sigma: float) -> Condition | None:
    """First of the conditions (I) c >= 1/2, (II) c >= sigma + 1/sqrt(n),
    (III) c >= 2^(1/4) sigma that holds, or ``None``.

    Any firing condition certifies ``w1 > 1/2`` (so ``w1 = w_max``) for every
    n x n correlation matrix with this characteristic.
    """
    for cond, ok in zip(Condition, simple_conditions(n, c, sigma)):
        if ok:
            return cond
    return None


def refined_conditions(n: int, c: float, sigma: float) -> tuple[bool, bool, bool]:
    _positive_c(n, c, sigma)
    r2 = c * c + sigma * sigma
    gc = g_n(n, c)
    return (
        gc > 0.5,
        gc * gc / g_n(n, r2) > 0.5,
        s_n(n, c * c / r2) > (n - 1) / n * sigma * sigma / (c * c),
    )


def refined_guarantee(n: int, c: float, sigma: float) -> Condition | None:
    """Dimension-aware refinement of :func:`simple_guarantee` (strict
    inequalities), wider for small n."""
    for cond, ok in zip(Condition, refined_conditions(n, c, sigma)):
        if ok:
            return cond
    return None


theorem3_guarantee = simple_guarantee
theorem5_guarantee = refined_guarantee


def conditions_bitmask(flags: tuple[bool, bool, bool]) -> int:
    return sum(1 << i for i, ok in enumerate(flags) if ok)


@dataclass(frozen=True)
class RegionFlags:
    A: bool
    A1: bool
    A2: bool
    B1: bool
    B2: bool
    n: int | None = None

    @property
    def unknown(self) -> bool:
        """In A but outside A1 and A2: status not settled either way."""
        return self.A and not (self.A1 or self.A2)

    def to_dict(self) -> dict:
        return {"A": self.A, "A1": self.A1, "A2": self.A2, "B1": self.B1, "B2": self.B2}


def region_membership(n: int | None, c: float, sigma: float) -> RegionFlags:
    """Membership in the n-free regions A, A1, A2, B1, B2 of the (c, sigma)-plane.

    ``n`` only annotates the result.
    """
    if not (math.isfinite(c) and math.isfinite(sigma)):
        raise DomainError("c and sigma must be finite")
    in_a = c > 0 and sigma > 0 and c * c + sigma * sigma < 1
    return RegionFlags(
        A=in_a,
        A1=in_a and (c >= 0.5 or sigma < c),
        A2=in_a and (sigma > SQRT3 * c or c < sigma < 1 - c),
        B1=c > 0 and sigma > 0 and c < sigma < 1 - c,
        B2=c > 0 and sigma > 0 and sigma > SQRT3 * c and c * c + sigma * sigma < 1,
        n=n,
    )


def triangle_edge_sigma(n: int, c: float) -> float:
    """sigma on the far edge of the even-n counterexample triangle."""
    return math.sqrt((n - 2) / n) * (1.0 - c)


def counterexample_triangle(n: int, c: float, sigma: float) -> bool:
    """Whether (c, sigma) lies in the half-open triangle
    ``max(-sqrt(n(n-2)) c, sqrt(n/(n-2)) c) < sigma <= sqrt((n-2)/n) (1-c)``
    where block counterexamples mixed with the identity reach."""
    if n < 4 or n % 2:
        raise PreconditionError(f"the triangle construction needs even n >= 4, got n={n}")
    lower = max(-math.sqrt(n * (n - 2)) * c, math.sqrt(n / (n - 2)) * c)
    # the far edge is closed; allow rounding noise on it
    return lower < sigma <= triangle_edge_sigma(n, c) + EDGE_TOL


@dataclass(frozen=True)
class EmbeddingSource:
    c_prime: float
    sigma_prime: float


def inverse_embedding_characteristic(n: int, c: float, sigma: float) -> EmbeddingSource | None:
    """Characteristic an n x n matrix must have so that bordering it with a
    unit row/column gives an (n+1) x (n+1) matrix with characteristic (c, sigma).

    ``None`` when no such characteristic exists.
    """
    if sigma <= 0:
        raise PreconditionError(f"need sigma > 0, got {sigma!r}")
    if n < 2:
        raise PreconditionError(f"need n >= 2, got {n}")
    ratio = (n + 1) / (n - 1)
    inner = 1.0 - 2.0 / (n - 1) * c * c / (sigma * sigma)
    if inner < 0.0:
        if inner < -1e-12:
            return None
        inner = 0.0
    return EmbeddingSource(ratio * c, sigma * math.sqrt(ratio) * math.sqrt(inner))


def embedded_triangle_feasible(n: int, c: float, sigma: float) -> bool:
    """Odd n: reachable by embedding an (n-1) x (n-1) triangle counterexample.

    Requires c > 0 so the source matrix has no unit eigenvalue.
    """
    if n < 5 or n % 2 == 0 or not (c > 0 and sigma > 0):
        return False
    src = inverse_embedding_characteristic(n - 1, c, sigma)
    return src is not None and counterexample_triangle(n - 1, src.c_prime, src.sigma_prime)


def perturbation_mu_max(n: int, c: float) -> float | None:
    """Largest admissible mixing weight for perturbing a rank-one matrix
    toward the constant matrix, or ``None`` unless ``1/n < g_n(c) < 1/2``."""
    gc = g_n(n, c)
    if not (1.0 / n < gc < 0.5):
        return None
    return min((1.0 / math.sqrt(2.0) - math.sqrt(gc)) / 6.0, 1.0 - math.sqrt(2.0 / 3.0))


def rank_one_mean(n: int, k) -> float:
    """Mean correlation of ``x x^T`` where x has k entries -1 and n-k entries +1."""
    k = np.asarray(k, dtype=float)
    out = (n * (2.0 * k / n - 1.0) ** 2 - 1.0) / (n - 1)
    return float(out) if out.ndim == 0 else out


def rank_one_feasible_k(n: int, c_lo: float, c_hi: float) -> list[int]:
    """Every k in 0..n whose rank-one mean correlation lies strictly inside
    ``(c_lo, c_hi)``. k and n-k give the same matrix, so hits come in pairs."""
    if not (0 < c_lo < c_hi < 1):
        raise PreconditionError(f"need 0 < c_lo < c_hi < 1, got ({c_lo!r}, {c_hi!r})")
    ks = np.arange(n + 1)
    c = rank_one_mean(n, ks)
    return [int(k) for k in ks[(c > c_lo) & (c < c_hi)]]


@dataclass(frozen=True)
class PerturbationRoute:
    """Parameters reaching (c, sigma) by perturbing ``rank_one_k(n, k)`` with
    weight ``mu`` and then mixing with the identity at weight ``nu``."""

    k: int
    c_hat: float
    mu: float
    nu: float


def perturbation_route(n: int, c: float, sigma: float) -> PerturbationRoute | None:
    """Find a rank-one perturbation triangle containing (c, sigma), if any."""
    if not (c > 0 and sigma > 0):
        return None
    ks = np.arange(n // 2 + 1)  # k and n-k coincide
    c_hat = np.asarray(rank_one_mean(n, ks), dtype=float)
    best = None
    for k, ch in zip(ks, c_hat):
        if not (c <= ch):
            continue
        mu_max = perturbation_mu_max(n, float(ch))
        if mu_max is None:
            continue
        sigma_hat = math.sqrt(max(0.0, 1.0 - ch * ch))
        t = c / ch
        mu = 1.0 - sigma / (t * sigma_hat)
        if 0.0 < mu < mu_max:
            route = PerturbationRoute(int(n - k), float(ch), mu, 1.0 - t)
            # prefer the widest safety margin to the mu bounds
            margin = min(mu, mu_max - mu) / mu_max
            if best is None or margin > best[0]:
                best = (margin, route)
    return None if best is None else best[1]


class Status(str, enum.Enum):
    GUARANTEED = "GUARANTEED"
    COUNTEREXAMPLE = "COUNTEREXAMPLE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class GuaranteeReport:
    n: int
    c: float
    sigma: float
    simple: Condition | None
    refined: Condition | None
    simple_mask: int
    refined_mask: int
    regions: RegionFlags
    triangle_feasible: bool
    perturbation_mu_max: float | None
    perturbation_feasible: bool
    status: Status

    @property
    def in_A(self) -> bool:
        return self.regions.A

    @property
    def in_A1(self) -> bool:
        return self.regions.A1

    @property
    def in_A2(self) -> bool:
        return self.regions.A2

    @property
    def in_B1(self) -> bool:
        return self.regions.B1

    @property
    def in_B2(self) -> bool:
        return self.regions.B2

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "c": self.c,
            "sigma": self.sigma,
            "simple": None if self.simple is None else self.simple.value,
            "refined": None if self.refined is None else self.refined.value,
            "simple_mask": self.simple_mask,
            "refined_mask": self.refined_mask,
            "in_A": self.in_A,
            "in_A1": self.in_A1,
            "in_A2": self.in_A2,
            "in_B1": self.in_B1,
            "in_B2": self.in_B2,
            "triangle_feasible": self.triangle_feasible,
            "perturbation_mu_max": self.perturbation_mu_max,
            "perturbation_feasible": self.perturbation_feasible,
            "status": self.status.value,
        }


def classify(n: int, c: float, sigma: float) -> GuaranteeReport:
    """Evaluate every guarantee and counterexample criterion at one point."""
    bad = legal_domain_violations(n, c, sigma)
    if bad:
        raise DomainError(f"(n={n}, c={c!r}, sigma={sigma!r}) outside the legal domain: " + "; ".join(bad))
    if c == 0.0 and sigma == 0.0:
        raise ExcludedInputError("characteristic (0, 0) belongs to the identity matrix")
    if c > 0:
        m3, m5 = simple_conditions(n, c, sigma), refined_conditions(n, c, sigma)
        simple, refined = simple_guarantee(n, c, sigma), refined_guarantee(n, c, sigma)
    else:
        m3 = m5 = (False, False, False)
        simple = refined = None
    if n % 2 == 0:
        tri = n >= 4 and counterexample_triangle(n, c, sigma)
    else:
        tri = embedded_triangle_feasible(n, c, sigma)
    pert = perturbation_route(n, c, sigma) is not None
    if refined is not None:
        status = Status.GUARANTEED
    elif tri or pert:
        status = Status.COUNTEREXAMPLE
    else:
        status = Status.UNKNOWN
    return GuaranteeReport(
        n=n,
        c=c,
        sigma=sigma,
        simple=simple,
        refined=refined,
        simple_mask=conditions_bitmask(m3),
        refined_mask=conditions_bitmask(m5),
        regions=region_membership(n, c, sigma),
        triangle_feasible=tri,
        perturbation_mu_max=perturbation_mu_max(n, c),
        perturbation_feasible=pert,
        status=status,
    )
