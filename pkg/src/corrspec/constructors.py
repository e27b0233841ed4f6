"""Explicit correlation-matrix families and random Gram ensembles."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import CorrelationMatrix, as_correlation, characteristic, g_n, gram_from_columns, min_mean_correlation
from .domains import (
    EDGE_TOL,
    counterexample_triangle,
    inverse_embedding_characteristic,
    perturbation_mu_max,
    perturbation_route,
    rank_one_mean,
    triangle_edge_sigma,
)
from .exceptions import DimensionError, NotPSDError, PreconditionError
from .spectral import Alignment, eigendecompose, eigenspace_weights, w1_vs_wmax

__all__ = [
    "ConstructionRecipe",
    "RecipeKind",
    "block_counterexample",
    "build",
    "constant",
    "construct_counterexample",
    "convex_combination",
    "convex_with_identity",
    "counterexample_for",
    "embed",
    "identity",
    "inverse_embedding_characteristic",
    "perturbation_counterexample",
    "perturbed_rank_one",
    "random_correlation",
    "rank_one",
    "rank_one_k",
    "tensor_product",
]


def identity(n: int) -> CorrelationMatrix:
    if n < 2:
        raise DimensionError(f"n must be >= 2, got {n}")
    return CorrelationMatrix._trusted(np.eye(n))


def constant(n: int, c0: float) -> CorrelationMatrix:
    """All off-diagonal entries equal to ``c0``; PSD iff ``1/(1-n) <= c0 <= 1``."""
    if n < 2:
        raise DimensionError(f"n must be >= 2, got {n}")
    lo = min_mean_correlation(n)
    if not (lo <= c0 <= 1.0):
        raise NotPSDError(
            f"constant({n}, {c0!r}) has smallest eigenvalue "
            f"{min(1.0 + (n - 1) * c0, 1.0 - c0):.6g}; need {lo!r} <= c0 <= 1"
        )
    a = np.full((n, n), float(c0))
    np.fill_diagonal(a, 1.0)
    return CorrelationMatrix._trusted(a)


def rank_one(signs) -> CorrelationMatrix:
    """``x x^T`` for a vector of +-1 entries."""
    x = np.asarray(signs, dtype=float).ravel()
    if x.size < 2:
        raise DimensionError(f"need at least 2 signs, got {x.size}")
    if not np.all(np.abs(x) == 1.0):
        raise PreconditionError("signs must all be +1 or -1")
    return CorrelationMatrix._trusted(np.outer(x, x))


def rank_one_k(n: int, k: int) -> CorrelationMatrix:
    """Rank-one matrix whose first k signs are -1 and the rest +1."""
    if not 0 <= k <= n:
        raise PreconditionError(f"need 0 <= k <= n, got k={k}, n={n}")
    x = np.ones(n)
    x[:k] = -1.0
    return rank_one(x)


def tensor_product(C1, C2) -> CorrelationMatrix:
    """Kronecker product; row ``m2*i + k``, column ``m2*j + l`` holds
    ``C1[i, j] * C2[k, l]`` (0-based)."""
    a, b = as_correlation(C1), as_correlation(C2)
    return CorrelationMatrix._trusted(np.kron(np.asarray(a), np.asarray(b)))


def block_counterexample(n: int, eps: float) -> CorrelationMatrix:
    """Two all-ones diagonal blocks of size n/2 coupled by ``-eps``.

    Leading eigenvector is (1,...,1,-1,...,-1)/sqrt(n), orthogonal to the
    diagonal, while the second eigenvector is the diagonal itself.
    """
    if n < 4 or n % 2:
        raise PreconditionError(f"block counterexample needs even n >= 4, got n={n}")
    if not 0.0 < eps < 1.0:
        raise PreconditionError(f"need 0 < eps < 1, got eps={eps!r}")
    core = np.array([[1.0, -eps], [-eps, 1.0]])
    return CorrelationMatrix._trusted(np.kron(core, np.ones((n // 2, n // 2))))


def convex_with_identity(C, mu: float) -> CorrelationMatrix:
    if not 0.0 <= mu <= 1.0:
        raise PreconditionError(f"need 0 <= mu <= 1, got mu={mu!r}")
    a = np.asarray(as_correlation(C))
    return CorrelationMatrix._trusted((1.0 - mu) * a + mu * np.eye(a.shape[0]))


def convex_combination(A, B, mu: float) -> CorrelationMatrix:
    """``(1 - mu) A + mu B``; the correlation matrices form a convex set."""
    if not 0.0 <= mu <= 1.0:
        raise PreconditionError(f"need 0 <= mu <= 1, got mu={mu!r}")
    a, b = np.asarray(as_correlation(A)), np.asarray(as_correlation(B))
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return CorrelationMatrix._trusted((1.0 - mu) * a + mu * b)


def embed(C) -> CorrelationMatrix:
    """Border ``C`` with a unit diagonal entry: ``[[C, 0], [0, 1]]``."""
    a = np.asarray(as_correlation(C))
    n = a.shape[0]
    out = np.eye(n + 1)
    out[:n, :n] = a
    return CorrelationMatrix._trusted(out)


def perturbed_rank_one(n: int, k: int, mu: float, *, verify: bool = True) -> CorrelationMatrix:
    """Mix ``rank_one_k(n, k)`` with the constant matrix of the same mean.

    The mean is kept and sigma shrinks by ``1 - mu``. For admissible ``mu``
    the leading eigenvector has weight below 1/2, so ``w1 < w_max``; with
    ``verify`` this is re-checked on the computed spectrum.
    """
    if not 0 <= k <= n:
        raise PreconditionError(f"need 0 <= k <= n, got k={k}, n={n}")
    c = rank_one_mean(n, k)
    mu_max = perturbation_mu_max(n, c)
    if mu_max is None:
        raise PreconditionError(
            f"(n={n}, k={k}) gives c={c!r} with g_n(c)={g_n(n, c)!r}; need 1/n < g_n(c) < 1/2"
        )
    if not 0.0 < mu < mu_max:
        raise PreconditionError(f"need 0 < mu < {mu_max!r}, got mu={mu!r}")
    out = convex_combination(rank_one_k(n, k), constant(n, c), mu)
    if verify:
        status = w1_vs_wmax(out)
        if status is not Alignment.W1_LESS_THAN_WMAX:
            raise PreconditionError(f"perturbed_rank_one({n}, {k}, {mu!r}) lost w1 < w_max numerically: {status.value}")
    return out


def _triangle_even(n: int, c: float, sigma: float) -> CorrelationMatrix:
    if not counterexample_triangle(n, c, sigma):
        raise PreconditionError(f"(c, sigma) = ({c!r}, {sigma!r}) is outside the n={n} counterexample triangle")
    edge = triangle_edge_sigma(n, c)
    if abs(sigma - edge) <= EDGE_TOL:
        return block_counterexample(n, 1.0 - 2.0 * g_n(n, c))
    # scale the ray through (c, sigma) out to the edge
    a = math.sqrt((n - 2) / n)
    t = a / (sigma + a * c)
    c_edge = t * c
    base = block_counterexample(n, 1.0 - 2.0 * g_n(n, c_edge))
    return convex_with_identity(base, 1.0 - 1.0 / t)


def counterexample_for(n: int, c: float, sigma: float) -> CorrelationMatrix:
    """A matrix with characteristic (c, sigma) and ``w1 < w_max``, built from
    the block counterexample.

    Even n: the point must lie in the counterexample triangle. Odd n: the
    point is pulled back through the embedding to n-1 (requires c > 0).
    """
    if n % 2 == 0:
        return _triangle_even(n, c, sigma)
    if n < 5 or not c > 0:
        raise PreconditionError(f"odd n needs n >= 5 and c > 0, got n={n}, c={c!r}")
    src = inverse_embedding_characteristic(n - 1, c, sigma)
    if src is None:
        raise PreconditionError(f"no (n-1)-dimensional source characteristic for ({c!r}, {sigma!r})")
    return embed(_triangle_even(n - 1, src.c_prime, src.sigma_prime))


def perturbation_counterexample(n: int, c: float, sigma: float) -> CorrelationMatrix:
    """A matrix with characteristic (c, sigma) and ``w1 < w_max`` from a
    perturbed rank-one matrix mixed with the identity."""
    route = perturbation_route(n, c, sigma)
    if route is None:
        raise PreconditionError(f"(c, sigma) = ({c!r}, {sigma!r}) lies in no n={n} rank-one perturbation triangle")
    return convex_with_identity(perturbed_rank_one(n, route.k, route.mu), route.nu)


def construct_counterexample(n: int, c: float, sigma: float) -> CorrelationMatrix:
    """Try the block/triangle route first, then the rank-one perturbation route."""
    try:
        return counterexample_for(n, c, sigma)
    except PreconditionError:
        return perturbation_counterexample(n, c, sigma)


def random_correlation(n: int, N: int | None = None, seed=None, *, market: float = 0.0) -> CorrelationMatrix:
    """Gram correlation matrix of ``N`` standard-normal samples of ``n`` variables.

    Parameters
    ----------
    n : int
        Dimension.
    N : int, optional
        Number of rows of the sample matrix; defaults to ``2 n``.
    seed : int or numpy Generator
    market : float
        Loading of a shared factor added to every column before
        normalization; positive values push the mean correlation up.
    """
    N = 2 * n if N is None else N
    if N < 1:
        raise PreconditionError(f"need N >= 1, got {N}")
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((N, n))
    if market:
        M = M + market * rng.standard_normal((N, 1))
    return gram_from_columns(M)


class RecipeKind(str, enum.Enum):
    IDENTITY = "IDENTITY"
    CONSTANT = "CONSTANT"
    RANK_ONE = "RANK_ONE"
    TENSOR = "TENSOR"
    BLOCK_CEX = "BLOCK_CEX"
    CONVEX_ID = "CONVEX_ID"
    CONVEX_PAIR = "CONVEX_PAIR"
    EMBED = "EMBED"
    PERTURBED_RANK_ONE = "PERTURBED_RANK_ONE"
    TRIANGLE_CEX = "TRIANGLE_CEX"
    RANDOM_GRAM = "RANDOM_GRAM"


@dataclass
class ConstructionRecipe:
    """Serializable description of one constructed matrix.

    ``parameters`` holds kind-specific values; nested recipes (``base``,
    ``left``, ``right``, ``a``, ``b``) are themselves recipe dicts.
    ``expected`` may carry ``c``, ``sigma``, ``eigenvalues`` and
    ``w1_lt_wmax``; :func:`build` checks them to 1e-9.
    """

    kind: RecipeKind
    parameters: dict[str, Any] = field(default_factory=dict)
    expected: dict[str, Any] | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "ConstructionRecipe":
        if not isinstance(d, dict) or "kind" not in d:
            raise PreconditionError("recipe must be a JSON object with a 'kind' field")
        try:
            kind = RecipeKind(str(d["kind"]).upper())
        except ValueError:
            raise PreconditionError(f"unknown recipe kind {d['kind']!r}") from None
        params = dict(d.get("parameters", {}))
        params.update({k: v for k, v in d.items() if k not in ("kind", "parameters", "expected")})
        return cls(kind, params, d.get("expected"))

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "parameters": self.parameters}
        if self.expected is not None:
            out["expected"] = self.expected
        return out


def _need(params: dict, *names):
    missing = [k for k in names if k not in params]
    if missing:
        raise PreconditionError(f"recipe is missing parameters {missing}")
    return [params[k] for k in names]


def _sub(params: dict, name: str) -> CorrelationMatrix:
    (d,) = _need(params, name)
    return build(d if isinstance(d, ConstructionRecipe) else ConstructionRecipe.from_dict(d))


def _build_raw(r: ConstructionRecipe) -> CorrelationMatrix:
    p = r.parameters
    k = r.kind
    if k is RecipeKind.IDENTITY:
        return identity(int(_need(p, "n")[0]))
    if k is RecipeKind.CONSTANT:
        n, c0 = _need(p, "n", "c0")
        return constant(int(n), float(c0))
    if k is RecipeKind.RANK_ONE:
        if "signs" in p:
            return rank_one(p["signs"])
        n, kk = _need(p, "n", "k")
        return rank_one_k(int(n), int(kk))
    if k is RecipeKind.TENSOR:
        return tensor_product(_sub(p, "left"), _sub(p, "right"))
    if k is RecipeKind.BLOCK_CEX:
        n, eps = _need(p, "n", "eps")
        return block_counterexample(int(n), float(eps))
    if k is RecipeKind.CONVEX_ID:
        return convex_with_identity(_sub(p, "base"), float(_need(p, "mu")[0]))
    if k is RecipeKind.CONVEX_PAIR:
        return convex_combination(_sub(p, "a"), _sub(p, "b"), float(_need(p, "mu")[0]))
    if k is RecipeKind.EMBED:
        return embed(_sub(p, "base"))
    if k is RecipeKind.PERTURBED_RANK_ONE:
        n, kk, mu = _need(p, "n", "k", "mu")
        return perturbed_rank_one(int(n), int(kk), float(mu))
    if k is RecipeKind.TRIANGLE_CEX:
        n, c, sig = _need(p, "n", "c", "sigma")
        return construct_counterexample(int(n), float(c), float(sig))
    if k is RecipeKind.RANDOM_GRAM:
        n = int(_need(p, "n")[0])
        N = p.get("N")
        return random_correlation(n, None if N is None else int(N), p.get("seed"), market=float(p.get("market", 0.0)))
    raise PreconditionError(f"unhandled recipe kind {k}")


def check_expected(C, expected: dict, tol: float = 1e-9) -> list[str]:
    """Mismatches between a matrix and a recipe's expected values."""
    problems = []
    ch = characteristic(C)
    for key, got in (("c", ch.c), ("sigma", ch.sigma)):
        if expected.get(key) is not None and abs(got - float(expected[key])) > tol:
            problems.append(f"{key}: expected {expected[key]!r}, got {got!r}")
    if expected.get("eigenvalues") is not None:
        want = np.sort(np.asarray(expected["eigenvalues"], dtype=float))[::-1]
        got = eigendecompose(C).eigenvalues
        if want.shape != got.shape or np.max(np.abs(want - got)) > tol:
            problems.append(f"eigenvalues: expected {want.tolist()}, got {got.tolist()}")
    if expected.get("w1_lt_wmax") is not None:
        got = w1_vs_wmax(C) is Alignment.W1_LESS_THAN_WMAX
        if got != bool(expected["w1_lt_wmax"]):
            problems.append(f"w1_lt_wmax: expected {expected['w1_lt_wmax']}, got {got}")
    return problems


def build(recipe) -> CorrelationMatrix:
    """Construct the matrix a recipe describes and verify its expected values."""
    r = recipe if isinstance(recipe, ConstructionRecipe) else ConstructionRecipe.from_dict(recipe)
    C = _build_raw(r)
    if r.expected:
        problems = check_expected(C, r.expected)
        if problems:
            raise PreconditionError(f"{r.kind.value} recipe does not match expected values: " + "; ".join(problems))
    return C


def has_unit_eigenvalue(C, tol: float = 1e-9) -> bool:
    return any(abs(cl.eigenvalue - 1.0) <= tol for cl in eigenspace_weights(eigendecompose(C), tol))
