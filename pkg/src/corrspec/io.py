"""Reading and writing matrix files (CSV or JSON) and recipe files."""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path

import numpy as np

from .exceptions import MatrixParseError

FORMATS = ("csv", "json")


def guess_format(path, fmt: str | None = None) -> str:
    if fmt:
        fmt = fmt.lower()
        if fmt not in FORMATS:
            raise MatrixParseError(f"unknown format {fmt!r}; choose from {FORMATS}")
        return fmt
    return "json" if str(path).lower().endswith(".json") else "csv"


def parse_csv(text: str) -> np.ndarray:
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [x.strip() for x in row]
        if not cells or all(x == "" for x in cells):
            continue
        if cells[0].startswith("#"):
            continue
        try:
            rows.append([float(x) for x in cells])
        except ValueError:
            raise MatrixParseError(f"line {lineno}: non-numeric entry in {row!r}") from None
    if not rows:
        raise MatrixParseError("no numeric rows found")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise MatrixParseError(f"ragged rows: row lengths {sorted(widths)}")
    return np.array(rows, dtype=float)


def parse_json(text: str) -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"invalid JSON: {exc}") from None
    data = doc.get("data") if isinstance(doc, dict) else doc
    if data is None:
        raise MatrixParseError("JSON matrix needs a 'data' field (list of rows)")
    try:
        a = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise MatrixParseError("'data' must be a rectangular list of numeric rows") from None
    if a.ndim != 2:
        raise MatrixParseError(f"'data' must be 2-dimensional, got {a.ndim} dimensions")
    if isinstance(doc, dict) and "n" in doc and int(doc["n"]) != a.shape[0]:
        raise MatrixParseError(f"'n' = {doc['n']} disagrees with {a.shape[0]} rows")
    return a


def read_matrix(path, fmt: str | None = None) -> np.ndarray:
    """Load a raw (unvalidated) matrix from a CSV or JSON file."""
    fmt = guess_format(path, fmt)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise MatrixParseError(f"{path}: not UTF-8 text") from None
    return parse_json(text) if fmt == "json" else parse_csv(text)


def format_matrix(m, fmt: str = "csv") -> str:
    a = np.asarray(m, dtype=float)
    if fmt == "json":
        return json.dumps({"n": int(a.shape[0]), "data": a.tolist()}) + "\n"
    # 17 significant digits round-trip exactly
    return "".join(",".join(format(x, ".17g") for x in row) + "\n" for row in a)


def write_matrix(m, path, fmt: str | None = None) -> None:
    fmt = guess_format(path, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_matrix(m, fmt))


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"{path}: invalid JSON: {exc}") from None


def fmt12(x) -> str:
    """Fixed 12-significant-digit rendering used for every scan CSV cell."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x != x:
        return ""
    if x == 0.0:
        return "0"  # drop the sign of -0.0
    return format(x, ".12g")


def write_rows(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt12(v) if not isinstance(v, str) else v for v in row) + "\n")


def ensure_dir(path) -> Path:
    p = Path(path)
    os.makedirs(p, exist_ok=True)
    return p
