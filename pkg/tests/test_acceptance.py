"""One test per acceptance criterion; the terminal summary prints a PASS/FAIL
line for each (see conftest.py)."""

import filecmp
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from corrspec.bounds import bound_report, fueredi_komlos_reference, w1_bound
from corrspec.constructors import (
    block_counterexample,
    constant,
    convex_with_identity,
    counterexample_for,
    embed,
    has_unit_eigenvalue,
    identity,
    perturbed_rank_one,
    random_correlation,
    rank_one_k,
    tensor_product,
)
from corrspec.core import characteristic, g_n, legal_domain, min_mean_correlation, validate_correlation
from corrspec.domains import region_membership, simple_guarantee
from corrspec.exceptions import NotPSDError
from corrspec.spectral import (
    Alignment,
    characteristic_identity_residuals,
    eigendecompose,
    eigenspace_weights,
    w1_vs_wmax,
)
from corrspec.verify import VerifySpec, ensemble

from oracles import brute_characteristic

ENSEMBLE_SEED = 20240601


@pytest.fixture(scope="module")
def members():
    t0 = time.perf_counter()
    out = list(ensemble(VerifySpec(ensemble_size=1000, n_min=2, n_max=50, n_multiplier=2, seed=ENSEMBLE_SEED)))
    return out, time.perf_counter() - t0


def _corrspec(*args):
    return subprocess.run([sys.executable, "-m", "corrspec.cli", *map(str, args)], capture_output=True, text=True)


def test_criterion_01_worked_example_cli():
    """bounds 406 0.14 0.017: lambda1 >= 57.7, w1 >= 0.9853, under 1 s"""
    t0 = time.perf_counter()
    proc = _corrspec("bounds", 406, 0.14, 0.017)
    elapsed = time.perf_counter() - t0
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    print(f"lambda1_lb={doc['lambda1_lb']} w1_lb={doc['w1_lb']} elapsed={elapsed:.3f}s")
    assert abs(doc["lambda1_lb"] - 57.7) <= 0.05
    assert abs(doc["w1_lb"] - 0.9853) <= 5e-4
    assert elapsed < 1.0


def test_criterion_02_spectral_identities(members):
    """1000 Gram matrices, n in [2, 50]: both identity residuals < 1e-9, under 30 s"""
    mem, gen_time = members
    t0 = time.perf_counter()
    worst = 0.0
    assert len(mem) == 1000
    assert {m.n for m in mem} >= {2, 50}
    for m in mem:
        assert m.N == 2 * m.n
        r = characteristic_identity_residuals(m.matrix)
        worst = max(worst, r.r1, r.r2)
    elapsed = gen_time + time.perf_counter() - t0
    print(f"worst residual {worst:.3e}, {elapsed:.2f}s")
    assert worst < 1e-9
    assert elapsed < 30


def test_criterion_02b_identities_against_brute_force(members):
    """second route: loop-sum characteristic on a subsample"""
    mem, _ = members
    for m in mem[::50]:
        c, sig = brute_characteristic(m.matrix)
        S = eigendecompose(m.matrix)
        lt = S.eigenvalues / m.n
        assert abs(float(lt @ S.weights) - g_n(m.n, c)) < 1e-9
        assert abs(float(lt @ lt) - g_n(m.n, c * c + sig * sig)) < 1e-9


def test_criterion_03_bound_soundness(members):
    """lambda1, eigenspace w_max and (c > 0, simple lambda1) w1 bounds hold"""
    mem, _ = members
    violations, n_w1 = [], 0
    for m in mem:
        ch = characteristic(m.matrix)
        S = eigendecompose(m.matrix)
        rep = bound_report(m.n, ch.c, ch.sigma)
        tol = 1e-9 * m.n
        clusters = eigenspace_weights(S)
        if S.eigenvalues[0] - rep.lambda1_lb < -tol:
            violations.append(("lambda1", m.index))
        if max(cl.weight for cl in clusters) - rep.wmax_lb < -tol:
            violations.append(("wmax", m.index))
        if ch.c > 0 and clusters[0].multiplicity == 1:
            n_w1 += 1
            if S.w1 - rep.w1_lb < -tol:
                violations.append(("w1", m.index))
    print(f"violations={len(violations)} w1 cases={n_w1}")
    assert violations == []
    assert n_w1 > 100


def test_criterion_04_guarantee_enforcement(members):
    """every member firing a simple guarantee condition has w1 > 1/2"""
    mem, _ = members
    fired, bad = 0, []
    for m in mem:
        ch = characteristic(m.matrix)
        if ch.c > 0 and simple_guarantee(m.n, ch.c, ch.sigma) is not None:
            fired += 1
            if not eigendecompose(m.matrix).w1 > 0.5:
                bad.append(m.index)
    # a market-factor ensemble fires the conditions at larger n too
    for seed in range(200):
        n = 3 + seed % 40
        C = random_correlation(n, 2 * n, seed=[ENSEMBLE_SEED, 7, seed], market=1.5)
        ch = characteristic(C)
        if simple_guarantee(n, ch.c, ch.sigma) is not None:
            fired += 1
            if not eigendecompose(C).w1 > 0.5:
                bad.append(("factor", seed))
    print(f"fired={fired} violations={len(bad)}")
    assert fired > 50
    assert bad == []


def test_criterion_05_mean_correlation_floor(members):
    """c >= 1/(1-n) everywhere; constant below the floor rejected for n = 2..10"""
    mem, _ = members
    for m in mem:
        assert characteristic(m.matrix).c >= min_mean_correlation(m.n) - 1e-12
    outputs = [constant(n, min_mean_correlation(n)) for n in range(2, 11)]
    outputs += [rank_one_k(n, k) for n in range(2, 11) for k in range(n + 1)]
    outputs += [block_counterexample(n, e) for n in (4, 6, 8) for e in (0.1, 0.5, 0.9)]
    outputs += [perturbed_rank_one(8, 6, 0.02), counterexample_for(4, 0.1, 0.3), counterexample_for(7, 0.05, 0.4)]
    outputs += [embed(identity(3)), tensor_product(constant(2, -1.0), constant(3, -0.5))]
    for C in outputs:
        assert validate_correlation(C).is_valid
        assert characteristic(C).c >= min_mean_correlation(C.n) - 1e-12
    for n in range(2, 11):
        for delta in (1e-9, 1e-3):
            with pytest.raises(NotPSDError):
                constant(n, min_mean_correlation(n) - delta)


def test_criterion_06_block_closed_forms():
    """block counterexample spectrum and sigma to 1e-10, all W1_LESS_THAN_WMAX"""
    worst = 0.0
    for n in range(4, 21, 2):
        for eps in [k / 10 for k in range(1, 10)]:
            C = block_counterexample(n, eps)
            S = eigendecompose(C)
            want = np.zeros(n)
            want[:2] = n * (1 + eps) / 2, n * (1 - eps) / 2
            ch = characteristic(C)
            worst = max(worst, float(np.max(np.abs(S.eigenvalues - want))), abs(ch.sigma - math.sqrt((n - 2) / n) * (1 - ch.c)))
            assert w1_vs_wmax(C) is Alignment.W1_LESS_THAN_WMAX
    print(f"worst closed-form error {worst:.2e}")
    assert worst <= 1e-10


def test_criterion_07_rank_one_family():
    """rank_one_k: lambda1 = n to 1e-10 and quantised g_n(c) to 1e-12"""
    for n in range(2, 17):
        for k in range(n + 1):
            C = rank_one_k(n, k)
            assert abs(eigendecompose(C).eigenvalues[0] - n) <= 1e-10
            assert abs(g_n(n, characteristic(C).c) - (1 - 2 * k / n) ** 2) <= 1e-12


def test_criterion_08_tensor_and_embedding():
    """tensor g-products and embedding transfer to 1e-12; embedding keeps w1 < w_max"""
    rng = np.random.default_rng(ENSEMBLE_SEED)
    for _ in range(100):
        m1, m2 = rng.integers(2, 9, size=2)
        A = random_correlation(int(m1), seed=rng.integers(2**63))
        B = random_correlation(int(m2), seed=rng.integers(2**63))
        a, b, t = characteristic(A), characteristic(B), characteristic(tensor_product(A, B))
        N = int(m1 * m2)
        assert abs(g_n(N, t.c) - g_n(int(m1), a.c) * g_n(int(m2), b.c)) <= 1e-12
        assert abs(g_n(N, t.radius_sq) - g_n(int(m1), a.radius_sq) * g_n(int(m2), b.radius_sq)) <= 1e-12
        e = characteristic(embed(A))
        r = (m1 - 1) / (m1 + 1)
        assert abs(e.c - r * a.c) <= 1e-12
        assert abs(e.radius_sq - r * a.radius_sq) <= 1e-12

    cases = 0
    for n in (4, 6, 8, 10):
        for c, frac in [(0.02, 0.5), (0.05, 0.7), (0.08, 0.9), (0.03, 1.0), (0.06, 0.3)]:
            lo, hi = math.sqrt(n / (n - 2)) * c, math.sqrt((n - 2) / n) * (1 - c)
            C = counterexample_for(n, c, lo + frac * (hi - lo))
            assert not has_unit_eigenvalue(C)
            assert w1_vs_wmax(C) is Alignment.W1_LESS_THAN_WMAX
            assert w1_vs_wmax(embed(C)) is Alignment.W1_LESS_THAN_WMAX
            cases += 1
    assert cases == 20


def test_criterion_09_perturbed_rank_one():
    """perturbed_rank_one(8, 6, 0.02): valid, characteristic, simple lambda1, w1 < w_max"""
    C = perturbed_rank_one(8, 6, 0.02)
    assert validate_correlation(C).is_valid
    ch = characteristic(C)
    assert abs(ch.c - 1 / 7) <= 1e-9
    assert abs(ch.sigma - 0.98 * math.sqrt(48 / 49)) <= 1e-9
    assert eigenspace_weights(eigendecompose(C))[0].multiplicity == 1
    assert w1_vs_wmax(C) is Alignment.W1_LESS_THAN_WMAX


def test_criterion_10_triangle_constructor():
    """50 interior triangle points at n = 4, 6, 8: exact characteristic, w1 < w_max, in B1"""
    for n in (4, 6, 8):
        a, b = math.sqrt((n - 2) / n), math.sqrt(n / (n - 2))
        apex = a / (b + a)
        pts = []
        for u in np.linspace(0.1, 0.9, 5):
            c = float(u * apex)
            lo, hi = b * c, a * (1 - c)
            pts += [(c, lo + v * (hi - lo)) for v in np.linspace(0.05, 1.0, 10)]
        assert len(pts) == 50
        for c, sig in pts:
            assert region_membership(n, c, sig).B1
            C = counterexample_for(n, c, sig)
            ch = characteristic(C)
            assert abs(ch.c - c) <= 1e-9 and abs(ch.sigma - sig) <= 1e-9
            assert w1_vs_wmax(C) is Alignment.W1_LESS_THAN_WMAX


def test_criterion_11_comparator_dominance():
    """w1 bound >= 1 - 4 sigma^2/c^2 on a 100 x 100 legal grid with c > 0"""
    cs = np.linspace(0.01, 1.0, 100)
    sigmas = np.linspace(0.0, 1.0, 100)
    checked = 0
    for n in (2, 5, 50, 406):
        for c in cs:
            for sig in sigmas:
                if not legal_domain(n, c, sig):
                    continue
                assert w1_bound(n, c, sig) >= fueredi_komlos_reference(c, sig) - 1e-12
                checked += 1
    print(f"{checked} grid points")
    assert checked > 4 * 5000


def test_criterion_12_scan_determinism(tmp_path):
    """two scan runs with the same spec give byte-identical CSV"""
    runs = []
    for name in ("a", "b"):
        out = tmp_path / name
        proc = _corrspec("scan", "--out", out)
        assert proc.returncode == 0, proc.stderr
        runs.append(out)
    names = sorted(p.name for p in runs[0].iterdir())
    assert len(names) == 4
    match, mismatch, errors = filecmp.cmpfiles(runs[0], runs[1], names, shallow=False)
    assert mismatch == [] and errors == []
