"""Seeded ensemble checks of the spectral identities, bound soundness,
guarantee enforcement and constructor closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import bound_report, wieland_residual_check
from .constructors import (
    block_counterexample,
    constant,
    convex_combination,
    embed,
    random_correlation,
    rank_one_k,
    tensor_product,
)
from .core import characteristic, g_n, min_mean_correlation, validate_correlation
from .domains import simple_guarantee
from .exceptions import PreconditionError
from .spectral import Alignment, alignment_from_spectrum, characteristic_identity_residuals, eigendecompose, eigenspace_weights


@dataclass
class VerifySpec:
    ensemble_size: int = 1000
    n_min: int = 2
    n_max: int = 50
    n_multiplier: int = 2
    seed: int = 0
    identity_tol: float = 1e-9
    bound_tol: float = 1e-9  # times n
    closed_form_tol: float = 1e-10
    degeneracy_tol: float | None = None

    def __post_init__(self):
        if self.ensemble_size < 1:
            raise PreconditionError(f"ensemble_size must be >= 1, got {self.ensemble_size}")
        if not 2 <= self.n_min <= self.n_max:
            raise PreconditionError(f"need 2 <= n_min <= n_max, got [{self.n_min}, {self.n_max}]")
        if self.n_multiplier < 1:
            raise PreconditionError(f"n_multiplier must be >= 1, got {self.n_multiplier}")


@dataclass
class PropertyResult:
    """Worst slack of one property over every case checked.

    A case fails when its slack drops below ``-allowance``; residual-type
    properties record ``-residual``.
    """

    name: str
    worst_slack: float = math.inf
    checked: int = 0
    violations: int = 0
    first_failure: dict | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def record(self, slack: float, where: dict | None = None, allowance: float = 0.0) -> None:
        self.checked += 1
        self.worst_slack = min(self.worst_slack, float(slack))
        if not slack >= -allowance:
            self.violations += 1
            if self.first_failure is None:
                self.first_failure = dict(where or {}, slack=float(slack))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "checked": self.checked,
            "violations": self.violations,
            "worst_slack": None if self.checked == 0 else self.worst_slack,
            "first_failure": self.first_failure,
        }


@dataclass
class EnsembleMember:
    index: int
    n: int
    N: int
    seed: list[int]
    matrix: np.ndarray


def ensemble(spec: VerifySpec):
    """Seeded members; member i draws with seed ``[spec.seed, i]`` so any
    single member can be regenerated on its own."""
    ns = np.random.default_rng(spec.seed).integers(spec.n_min, spec.n_max + 1, size=spec.ensemble_size)
    for i, n in enumerate(ns):
        n = int(n)
        N = spec.n_multiplier * n
        seed = [int(spec.seed), i]
        yield EnsembleMember(i, n, N, seed, np.asarray(random_correlation(n, N, seed)))


@dataclass
class VerifyResult:
    properties: dict[str, PropertyResult] = field(default_factory=dict)
    validation_failures: list[dict] = field(default_factory=list)
    simple_guarantee_firing: int = 0

    def prop(self, name: str) -> PropertyResult:
        if name not in self.properties:
            self.properties[name] = PropertyResult(name)
        return self.properties[name]

    @property
    def ok(self) -> bool:
        return not self.validation_failures and all(p.ok for p in self.properties.values())

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "simple_guarantee_firing_members": self.simple_guarantee_firing,
            "validation_failures": self.validation_failures,
            "properties": [p.to_dict() for p in self.properties.values()],
        }


def check_matrix(C, res: VerifyResult, where: dict, spec: VerifySpec) -> None:
    """Run every single-matrix property on ``C`` and fold into ``res``."""
    a = np.asarray(C, dtype=float)
    n = a.shape[0]
    report = validate_correlation(a)
    if not report.is_valid:
        res.validation_failures.append(dict(where, violations=[v.to_dict() for v in report.violations], matrix=a.tolist()))
        return

    r = characteristic_identity_residuals(a)
    res.prop("identity_mean").record(-r.r1, where, spec.identity_tol)
    res.prop("identity_norm").record(-r.r2, where, spec.identity_tol)

    ch = characteristic(a)
    res.prop("minimal_mean_correlation").record(ch.c - min_mean_correlation(n), where, 1e-12)
    if ch.c == 0.0 and ch.sigma == 0.0:
        return

    S = eigendecompose(a)
    b = bound_report(n, ch.c, ch.sigma)
    slack_tol = spec.bound_tol * n
    res.prop("lambda1_bound").record(S.eigenvalues[0] - b.lambda1_lb, where, slack_tol)
    clusters = eigenspace_weights(S, spec.degeneracy_tol)
    res.prop("wmax_bound").record(max(cl.weight for cl in clusters) - b.wmax_lb, where, slack_tol)
    if b.w1_lb is not None and clusters[0].multiplicity == 1:
        res.prop("w1_bound").record(S.w1 - b.w1_lb, where, slack_tol)

    if ch.c > 0 and simple_guarantee(n, ch.c, ch.sigma) is not None:
        res.simple_guarantee_firing += 1
        res.prop("simple_guarantee_w1_above_half").record(S.w1 - 0.5, where)


def check_pair(A, B, res: VerifyResult, where: dict, spec: VerifySpec) -> None:
    """Tensor identities, embedding transfer and, for equal sizes, the
    eigenvector perturbation residual between ``A`` and a mix toward ``B``."""
    a, b = as_float(A), as_float(B)
    n1, n2 = a.shape[0], b.shape[0]
    c1, c2 = characteristic(a), characteristic(b)
    c3 = characteristic(tensor_product(a, b))
    res.prop("tensor_mean").record(-abs(g_n(n1 * n2, c3.c) - g_n(n1, c1.c) * g_n(n2, c2.c)), where, 1e-12)
    res.prop("tensor_norm").record(
        -abs(g_n(n1 * n2, c3.radius_sq) - g_n(n1, c1.radius_sq) * g_n(n2, c2.radius_sq)), where, 1e-12
    )
    e = characteristic(embed(a))
    ratio = (n1 - 1) / (n1 + 1)
    res.prop("embed_mean").record(-abs(e.c - ratio * c1.c), where, 1e-12)
    res.prop("embed_norm").record(-abs(e.radius_sq - ratio * c1.radius_sq), where, 1e-12)
    if n1 == n2:
        mix = convex_combination(a, b, 0.1)
        res.prop("wieland_residual").record(wieland_residual_check(a, mix).worst_slack, where, 1e-8)


def as_float(m) -> np.ndarray:
    return np.asarray(m, dtype=float)


def check_constructors(res: VerifyResult, spec: VerifySpec, n_values) -> None:
    tol = spec.closed_form_tol
    for n in sorted(set(n_values)):
        # the mean-correlation floor is attained by the constant matrix
        C = constant(n, min_mean_correlation(n))
        lam_min = float(np.linalg.eigvalsh(np.asarray(C))[0])
        res.prop("constant_floor_psd").record(lam_min, {"n": n}, 1e-9 * n)
        for k in range(n + 1):
            R = rank_one_k(n, k)
            lam = eigendecompose(R).eigenvalues[0]
            ch = characteristic(R)
            where = {"n": n, "k": k}
            res.prop("rank_one_lambda1").record(-abs(lam - n), where, tol)
            res.prop("rank_one_mean").record(-abs(g_n(n, ch.c) - (1 - 2 * k / n) ** 2), where, 1e-12)
            res.prop("minimal_mean_correlation").record(ch.c - min_mean_correlation(n), where, 1e-12)
        if n % 2 == 0 and n >= 4:
            for eps in np.round(np.arange(1, 10) / 10, 1):
                B = block_counterexample(n, float(eps))
                S = eigendecompose(B)
                want = np.zeros(n)
                want[0], want[1] = n * (1 + eps) / 2, n * (1 - eps) / 2
                where = {"n": n, "eps": float(eps)}
                res.prop("block_eigenvalues").record(-float(np.max(np.abs(S.eigenvalues - want))), where, tol)
                ch = characteristic(B)
                res.prop("block_sigma").record(-abs(ch.sigma - math.sqrt((n - 2) / n) * (1 - ch.c)), where, tol)
                is_cex = alignment_from_spectrum(S, spec.degeneracy_tol) is Alignment.W1_LESS_THAN_WMAX
                res.prop("block_w1_below_wmax").record(1.0 if is_cex else -1.0, where)


def run_verify(spec: VerifySpec, extra=()) -> VerifyResult:
    """Check the seeded ensemble, constructor families and any ``extra``
    matrices (e.g. an injected file)."""
    res = VerifyResult()
    for j, m in enumerate(extra):
        check_matrix(m, res, {"source": "injected", "index": j}, spec)
    prev = None
    for mem in ensemble(spec):
        where = {"index": mem.index, "seed": mem.seed, "n": mem.n, "N": mem.N}
        check_matrix(mem.matrix, res, where, spec)
        if mem.n <= 25:
            partner = np.asarray(random_correlation(mem.n, mem.N, mem.seed + [1]))
            check_pair(mem.matrix, partner, res, where, spec)
            if prev is not None and prev.n <= 25:
                check_pair(prev.matrix, mem.matrix, res, where, spec)
        prev = mem
    check_constructors(res, spec, range(spec.n_min, min(spec.n_max, 20) + 1))
    return res
