import csv
import math

import numpy as np
import pytest

from corrspec.bounds import bound_report
from corrspec.domains import classify
from corrspec.exceptions import ExcludedInputError
from corrspec.scan import ScanSpec, bound_surfaces, domain_map_cols, grid, run_scan


def test_grid_hits_round_values():
    c, sig = grid(ScanSpec())
    assert c.size == 201 * 101
    pts = set(zip(c.tolist(), sig.tolist()))
    assert (0.0, 0.9) in pts and (1.0, 0.0) in pts and (-1.0, 1.0) in pts


def test_surfaces_known_points():
    c = np.array([0.0, 1.0, 0.6])
    sig = np.array([0.9, 0.0, 0.9])
    out = bound_surfaces(10, c, sig)
    assert out["universal_lambda1_over_n"][0] == pytest.approx(0.8937003937005905, abs=1e-14)
    assert out["lambda1_lb_over_n"][1] == 1.0 and out["wmax_lb"][1] == 1.0 and out["w1_lb"][1] == 1.0
    assert math.isnan(out["lambda1_lb_over_n"][2])  # outside the disc
    assert math.isnan(out["w1_lb"][0])  # c = 0


@pytest.mark.parametrize("n", [4, 7, 12])
def test_vectorized_matches_scalar(n):
    spec = ScanSpec(c_steps=41, sigma_steps=21, n_list=[n])
    c, sig = grid(spec)
    surf = bound_surfaces(n, c, sig)
    dom = domain_map_cols(n, c, sig)
    for i in range(c.size):
        ci, si = float(c[i]), float(sig[i])
        if not surf["legal"][i]:
            continue
        rep = bound_report(n, ci, si)
        assert surf["lambda1_lb_over_n"][i] == pytest.approx(rep.lambda1_over_n, abs=1e-14)
        assert surf["wmax_lb"][i] == pytest.approx(rep.wmax_lb, abs=1e-14)
        if rep.w1_lb is not None:
            assert surf["w1_lb"][i] == pytest.approx(rep.w1_lb, abs=1e-12)
        assert surf["theta_min_ub"][i] == pytest.approx(rep.theta_min_ub, abs=1e-12)
        g = classify(n, ci, si)
        assert dom["simple_any"][i] == (g.simple is not None)
        assert dom["refined_any"][i] == (g.refined is not None)
        assert dom["triangle"][i] == g.triangle_feasible
        assert dom["perturbation"][i] == g.perturbation_feasible
        assert dom["B1"][i] == g.in_B1 and dom["A2"][i] == g.in_A2
        assert dom["status"][i] == g.status.value


def test_masked_rows_have_empty_bounds(tmp_path):
    spec = ScanSpec(c_steps=5, sigma_steps=3, n_list=[4], outputs=["BOUND_SURFACES"])
    (path,) = run_scan(spec, tmp_path)
    rows = list(csv.DictReader(path.open()))
    outside = [r for r in rows if r["legal"] == "0"]
    assert outside and all(r["lambda1_lb_over_n"] == "" for r in outside)
    assert path.read_bytes().count(b"\r") == 0
