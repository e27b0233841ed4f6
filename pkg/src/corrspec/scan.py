"""Grid evaluation of bounds and domain flags over the (c, sigma) plane,
written as tidy CSV for external plotting."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import _one_minus_s_n
from .core import SCALAR_TOL, g_n, s
from .domains import EDGE_TOL, FOURTH_ROOT_2, SQRT3, rank_one_mean
from .exceptions import PreconditionError
from .io import ensure_dir, write_rows


class Output(str, enum.Enum):
    BOUND_SURFACES = "BOUND_SURFACES"
    DOMAIN_MAP = "DOMAIN_MAP"
    SPHERICAL_CURVES = "SPHERICAL_CURVES"
    SCALING_DOMAINS = "SCALING_DOMAINS"

    @property
    def filename(self) -> str:
        return self.value.lower() + ".csv"


@dataclass
class ScanSpec:
    c_min: float = -1.0
    c_max: float = 1.0
    c_steps: int = 201
    sigma_min: float = 0.0
    sigma_max: float = 1.0
    sigma_steps: int = 101
    n_list: list[int] = field(default_factory=lambda: [4, 10, 100, 406])
    outputs: list[Output] = field(default_factory=lambda: list(Output))

    def __post_init__(self):
        self.outputs = sorted({o if isinstance(o, Output) else Output(str(o).upper()) for o in self.outputs}, key=list(Output).index)
        self.n_list = sorted({int(n) for n in self.n_list})
        self.validate()

    def validate(self) -> None:
        if self.c_steps < 2 or self.sigma_steps < 2:
            raise PreconditionError("grid steps must be >= 2")
        if not (-1.0 <= self.c_min < self.c_max <= 1.0):
            raise PreconditionError(f"need -1 <= c_min < c_max <= 1, got [{self.c_min}, {self.c_max}]")
        if not (0.0 <= self.sigma_min < self.sigma_max <= 1.0):
            raise PreconditionError(f"need 0 <= sigma_min < sigma_max <= 1, got [{self.sigma_min}, {self.sigma_max}]")
        if not self.n_list or min(self.n_list) < 2:
            raise PreconditionError(f"n_list must hold integers >= 2, got {self.n_list}")

    @classmethod
    def from_dict(cls, d: dict) -> "ScanSpec":
        grid = dict(d.get("grid", {}))
        kw = {k: grid[k] for k in ("c_min", "c_max", "c_steps", "sigma_min", "sigma_max", "sigma_steps") if k in grid}
        if "n_list" in d:
            kw["n_list"] = d["n_list"]
        if "outputs" in d:
            kw["outputs"] = d["outputs"]
        return cls(**kw)

    def to_dict(self) -> dict:
        return {
            "grid": {
                "c_min": self.c_min,
                "c_max": self.c_max,
                "c_steps": self.c_steps,
                "sigma_min": self.sigma_min,
                "sigma_max": self.sigma_max,
                "sigma_steps": self.sigma_steps,
            },
            "n_list": self.n_list,
            "outputs": [o.value for o in self.outputs],
        }


def _axis(lo: float, hi: float, steps: int) -> np.ndarray:
    # endpoint-weighted form hits round values like 0 and 0.9 exactly
    i = np.arange(steps, dtype=float)
    return (lo * (steps - 1 - i) + hi * i) / (steps - 1)


def grid(spec: ScanSpec) -> tuple[np.ndarray, np.ndarray]:
    """Flattened (c, sigma) arrays, c-major."""
    C, S = np.meshgrid(_axis(spec.c_min, spec.c_max, spec.c_steps), _axis(spec.sigma_min, spec.sigma_max, spec.sigma_steps), indexing="ij")
    return C.ravel(), S.ravel()


def _safe_s(x: np.ndarray, ok: np.ndarray) -> np.ndarray:
    return s(np.where(ok, np.clip(x, 0.0, 1.0), 0.0))


def legal_mask(n: int | None, c: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    tol = SCALAR_TOL
    ok = (sigma >= -tol) & (np.abs(c) <= 1 + tol) & (sigma <= 1 + tol) & (c * c + sigma * sigma <= 1 + tol)
    if n is not None:
        ok &= c >= 1.0 / (1.0 - n) - tol
    return ok


def _nonzero(c, sigma):
    return ~((c == 0.0) & (sigma == 0.0))


def bound_surfaces(n: int, c: np.ndarray, sigma: np.ndarray) -> dict[str, np.ndarray]:
    """Every bound of the bound report on a whole grid; NaN where undefined."""
    ok = legal_mask(n, c, sigma) & _nonzero(c, sigma)
    r2 = c * c + sigma * sigma
    r2_safe = np.where(ok, r2, 1.0)
    cos2 = np.where(ok, c * c / r2_safe, 0.0)

    lam_scaled, lam_mean = _safe_s(g_n(n, r2), ok), g_n(n, c)
    w_scaled, w_mean = _safe_s(g_n(n, cos2), ok), g_n(n, c)
    pos = ok & (c > 0)
    c_safe = np.where(pos, c, 1.0)
    pert = (n - 1) / n * sigma * sigma / (c_safe * c_safe)
    brk = (1.0 - g_n(n, c)) / np.where(pos, lam_scaled, 1.0)
    w1 = 1.0 - np.minimum(pert, brk)

    u_lam = np.maximum(c, _safe_s(r2, ok))
    u_w = np.maximum(c, _safe_s(cos2, ok))
    u_w1 = 1.0 - np.minimum(sigma * sigma / (c_safe * c_safe), (1.0 - c) / np.where(pos, _safe_s(r2, ok), 1.0))
    gap = _one_minus_s_n(n, np.where(ok, sigma * sigma / r2_safe, 0.0))
    theta = np.arctan2(np.sqrt(gap), np.sqrt(1.0 - gap))
    phi = np.arctan2(sigma, c)

    nan = np.nan
    return {
        "legal": ok,
        "lambda1_lb_over_n": np.where(ok, np.maximum(lam_scaled, lam_mean), nan),
        "wmax_lb": np.where(ok, np.maximum(w_scaled, w_mean), nan),
        "w1_lb": np.where(pos, w1, nan),
        "lambda1_scaled_branch": np.where(ok, lam_scaled > lam_mean, nan),
        "wmax_scaled_branch": np.where(ok, w_scaled > w_mean, nan),
        "w1_perturbation_branch": np.where(pos, pert <= brk, nan),
        "universal_lambda1_over_n": np.where(ok, u_lam, nan),
        "universal_wmax": np.where(ok, u_w, nan),
        "universal_w1": np.where(pos, u_w1, nan),
        # the dashed curves separating the branches of the universal bounds
        "mean_beats_scaled_lambda1": np.where(ok, c >= _safe_s(r2, ok), nan),
        "mean_below_scaled_wmax": np.where(ok, c <= _safe_s(cos2, ok), nan),
        "perturbation_beats_bracket": np.where(pos, sigma * sigma / (c_safe * c_safe) <= (1.0 - c) / np.where(pos, _safe_s(r2, ok), 1.0), nan),
        "r_c": np.where(ok, np.sqrt(r2_safe), nan),
        "phi_c": np.where(ok, phi, nan),
        "theta_min_ub": np.where(ok, theta, nan),
    }


def guarantee_flags(n: int, c: np.ndarray, sigma: np.ndarray) -> dict[str, np.ndarray]:
    """Vectorized twin of the scalar guarantee conditions (strictness kept)."""
    ok = legal_mask(n, c, sigma) & (c > 0)
    c_safe = np.where(ok, c, 1.0)
    r2 = c * c + sigma * sigma
    gc = g_n(n, c)
    r2_safe = np.where(ok, r2, 1.0)
    refined_3 = _safe_s(g_n(n, c * c / r2_safe), ok) > (n - 1) / n * sigma * sigma / (c_safe * c_safe)
    return {
        "simple_I": ok & (c >= 0.5),
        "simple_II": ok & (c >= sigma + 1.0 / math.sqrt(n)),
        "simple_III": ok & (c >= FOURTH_ROOT_2 * sigma),
        "refined_I": ok & (gc > 0.5),
        "refined_II": ok & (gc * gc / g_n(n, r2_safe) > 0.5),
        "refined_III": ok & refined_3,
    }


def region_flags(c: np.ndarray, sigma: np.ndarray) -> dict[str, np.ndarray]:
    pos = (c > 0) & (sigma > 0)
    in_a = pos & (c * c + sigma * sigma < 1)
    b1 = pos & (c < sigma) & (sigma < 1 - c)
    return {
        "A": in_a,
        "A1": in_a & ((c >= 0.5) | (sigma < c)),
        "A2": in_a & ((sigma > SQRT3 * c) | b1),
        "B1": b1,
        "B2": in_a & (sigma > SQRT3 * c),
    }


def _triangle(n: int, c, sigma):
    lower = np.maximum(-math.sqrt(n * (n - 2)) * c, math.sqrt(n / (n - 2)) * c)
    return (lower < sigma) & (sigma <= math.sqrt((n - 2) / n) * (1.0 - c) + EDGE_TOL)


def triangle_flags(n: int, c: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Reach of the block counterexample (even n) or of its embedding (odd n)."""
    if n % 2 == 0:
        return _triangle(n, c, sigma) if n >= 4 else np.zeros(c.shape, bool)
    if n < 5:
        return np.zeros(c.shape, bool)
    m = n - 1
    pos = (c > 0) & (sigma > 0)
    sig_safe = np.where(pos, sigma, 1.0)
    ratio = (m + 1) / (m - 1)
    inner = 1.0 - 2.0 / (m - 1) * c * c / (sig_safe * sig_safe)
    has_src = pos & (inner >= -1e-12)
    c_src = ratio * c
    s_src = sigma * math.sqrt(ratio) * np.sqrt(np.maximum(inner, 0.0))
    return has_src & _triangle(m, c_src, s_src)


def perturbation_flags(n: int, c: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    out = np.zeros(c.shape, bool)
    pos = (c > 0) & (sigma > 0)
    for k in range(n // 2 + 1):
        ch = float(rank_one_mean(n, k))
        gc = g_n(n, ch)
        if not (1.0 / n < gc < 0.5) or ch <= 0:
            continue
        mu_max = min((1.0 / math.sqrt(2.0) - math.sqrt(gc)) / 6.0, 1.0 - math.sqrt(2.0 / 3.0))
        sig_hat = math.sqrt(max(0.0, 1.0 - ch * ch))
        t = c / ch
        mu = 1.0 - sigma / np.where(pos, t * sig_hat, 1.0)
        out |= pos & (c <= ch) & (mu > 0.0) & (mu < mu_max)
    return out


def _status(g5_any, cex):
    return np.where(g5_any, "GUARANTEED", np.where(cex, "COUNTEREXAMPLE", "UNKNOWN"))


BOUND_COLUMNS = [
    "c",
    "sigma",
    "n",
    "legal",
    "lambda1_lb_over_n",
    "wmax_lb",
    "w1_lb",
    "lambda1_scaled_branch",
    "wmax_scaled_branch",
    "w1_perturbation_branch",
    "universal_lambda1_over_n",
    "universal_wmax",
    "universal_w1",
    "mean_beats_scaled_lambda1",
    "mean_below_scaled_wmax",
    "perturbation_beats_bracket",
    "r_c",
    "phi_c",
    "theta_min_ub",
]

DOMAIN_COLUMNS = [
    "c", "sigma", "n", "legal",
    "simple_I", "simple_II", "simple_III", "simple_any",
    "refined_I", "refined_II", "refined_III", "refined_any",
    "A", "A1", "A2", "B1", "B2",
    "triangle", "perturbation", "status",
]  # fmt: skip

SCALING_COLUMNS = ["n", "c", "sigma", "region", "forbidden", "guarantee_simple", "guarantee_refined", "counterexample_triangle", "counterexample_perturbation"]

CURVE_COLUMNS = ["n", "curve", "x", "y"]


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    f = float(v)
    return None if f != f else f


def _rows(n: int, c, sigma, cols: dict[str, np.ndarray], order: list[str]):
    base = {"c": c, "sigma": sigma, "n": np.full(c.shape, n)}
    arrays = [base[k] if k in base else cols[k] for k in order]
    ints = {"n"}
    bools = {k for k in order if k in cols and cols[k].dtype == bool}
    flag_cols = {k for k in order if k.endswith("_branch") or k.startswith(("mean_", "perturbation_beats"))}
    for i in range(c.size):
        row = []
        for k, a in zip(order, arrays):
            v = a[i]
            if k in ints:
                row.append(int(v))
            elif k in bools:
                row.append(bool(v))
            elif k in flag_cols:
                row.append(None if v != v else bool(v))
            else:
                row.append(_cell(v))
        yield row


def bound_surface_rows(spec: ScanSpec):
    c, sigma = grid(spec)
    for n in spec.n_list:
        yield from _rows(n, c, sigma, bound_surfaces(n, c, sigma), BOUND_COLUMNS)


def domain_map_cols(n: int, c: np.ndarray, sigma: np.ndarray) -> dict[str, np.ndarray]:
    legal = legal_mask(n, c, sigma) & _nonzero(c, sigma)
    cols = {k: v & legal for k, v in guarantee_flags(n, c, sigma).items()}
    cols["simple_any"] = cols["simple_I"] | cols["simple_II"] | cols["simple_III"]
    cols["refined_any"] = cols["refined_I"] | cols["refined_II"] | cols["refined_III"]
    cols.update({k: v & legal for k, v in region_flags(c, sigma).items()})
    cols["triangle"] = triangle_flags(n, c, sigma) & legal
    cols["perturbation"] = perturbation_flags(n, c, sigma) & legal
    cols["legal"] = legal
    status = _status(cols["refined_any"], cols["triangle"] | cols["perturbation"])
    cols["status"] = np.where(legal, status, "")
    return cols


def domain_map_rows(spec: ScanSpec):
    c, sigma = grid(spec)
    for n in spec.n_list:
        cols = domain_map_cols(n, c, sigma)
        for row in _rows(n, c, sigma, cols, DOMAIN_COLUMNS):
            yield row


def scaling_domain_rows(spec: ScanSpec):
    """One row per n and grid point with a single region label; the label
    changes with n, which is the point of this output."""
    c, sigma = grid(spec)
    origin = ~_nonzero(c, sigma)
    for n in spec.n_list:
        cols = domain_map_cols(n, c, sigma)
        forbidden = ~legal_mask(n, c, sigma)
        region = np.where(
            forbidden,
            "FORBIDDEN",
            np.where(origin, "IDENTITY", cols["status"]),
        )
        for i in range(c.size):
            yield [
                n,
                float(c[i]),
                float(sigma[i]),
                str(region[i]),
                bool(forbidden[i]),
                bool(cols["simple_any"][i]),
                bool(cols["refined_any"][i]),
                bool(cols["triangle"][i]),
                bool(cols["perturbation"][i]),
            ]


def spherical_curve_rows(spec: ScanSpec):
    """Radial profile ``s_n(r^2)`` and angular profile ``s_n(cos^2 phi)``."""
    steps = max(spec.c_steps, spec.sigma_steps)
    r = _axis(0.0, 1.0, steps)
    phi = _axis(0.0, math.pi, steps)
    for n in spec.n_list:
        for x, y in zip(r, s(g_n(n, r * r))):
            yield [n, "radial", float(x), float(y)]
        for x, y in zip(phi, s(g_n(n, np.clip(np.cos(phi) ** 2, 0.0, 1.0)))):
            yield [n, "angular", float(x), float(y)]


WRITERS = {
    Output.BOUND_SURFACES: (BOUND_COLUMNS, bound_surface_rows),
    Output.DOMAIN_MAP: (DOMAIN_COLUMNS, domain_map_rows),
    Output.SPHERICAL_CURVES: (CURVE_COLUMNS, spherical_curve_rows),
    Output.SCALING_DOMAINS: (SCALING_COLUMNS, scaling_domain_rows),
}


def run_scan(spec: ScanSpec, out_dir) -> list[Path]:
    """Write one CSV per requested output; returns the written paths."""
    out = ensure_dir(out_dir)
    written = []
    for o in spec.outputs:
        header, rows = WRITERS[o]
        path = out / o.filename
        write_rows(path, header, rows(spec))
        written.append(path)
    return written
