"""Text formats for instances, kernels and solver reports.

* matrix: headerless CSV, one matrix row per line
* vector: one value per line
* labeled points: ``label idx:val idx:val ...`` with 1-based feature indices
* reports: JSON; floats are written with ``repr`` so they round-trip exactly

Every reader rejects NaN/Inf and reports the offending line (and column).
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Optional

import numpy as np

from .problem import (
    DimensionError,
    LassoInstance,
    SvmInstance,
    duality_gap,
    lasso_objective,
    lasso_subopt_bound,
    svm_objective,
)
from .reductions import LabeledData

FLOAT_FMT = "%.17g"
FORMATS = ("lasso", "svm", "labeled", "matrix", "vector")


class ParseError(ValueError):
    def __init__(self, path, line: int, msg: str, column: Optional[int] = None):
        where = f"{path}:{line}" + (f":{column}" if column is not None else "")
        super().__init__(f"{where}: {msg}")
        self.path, self.line, self.column = str(path), line, column


def _number(tok: str, path, line: int, col: Optional[int]) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(path, line, f"not a number: {tok.strip()!r}", col) from None
    if not math.isfinite(v):
        raise ParseError(path, line, f"non-finite value {tok.strip()!r}", col)
    return v


def _content_lines(path):
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            text = raw.strip()
            if text and not text.startswith("#"):
                yield lineno, text


def read_matrix(path) -> np.ndarray:
    rows, width = [], None
    for lineno, text in _content_lines(path):
        toks = text.split(",")
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise ParseError(path, lineno, f"expected {width} columns, found {len(toks)}")
        rows.append([_number(t, path, lineno, c) for c, t in enumerate(toks, 1)])
    if not rows:
        raise ParseError(path, 0, "empty matrix file")
    return np.array(rows, dtype=float)


def read_vector(path) -> np.ndarray:
    vals = []
    for lineno, text in _content_lines(path):
        if "," in text or len(text.split()) != 1:
            raise ParseError(path, lineno, "expected one value per line")
        vals.append(_number(text, path, lineno, None))
    if not vals:
        raise ParseError(path, 0, "empty vector file")
    return np.array(vals, dtype=float)


def read_labeled(path, C: float = 1.0, dim: Optional[int] = None) -> LabeledData:
    """Sparse labeled points; returns them as columns of a ``d x n`` matrix."""
    labels, entries = [], []
    top = 0
    for lineno, text in _content_lines(path):
        toks = text.split()
        lab = _number(toks[0], path, lineno, 1)
        if lab not in (1.0, -1.0):
            raise ParseError(path, lineno, f"label must be +1 or -1, got {toks[0]!r}", 1)
        feats = {}
        for col, tok in enumerate(toks[1:], 2):
            idx, sep, val = tok.partition(":")
            if not sep or not idx.isdigit() or int(idx) < 1:
                raise ParseError(path, lineno, f"expected index:value with index >= 1, got {tok!r}", col)
            if int(idx) in feats:
                raise ParseError(path, lineno, f"duplicate feature index {idx}", col)
            feats[int(idx)] = _number(val, path, lineno, col)
        top = max(top, max(feats, default=0))
        labels.append(lab)
        entries.append(feats)
    if not labels:
        raise ParseError(path, 0, "no labeled points")
    d = top if dim is None else dim
    if d < top:
        raise DimensionError(f"feature index {top} exceeds requested dimension {d}")
    pts = np.zeros((max(d, 1), len(labels)))
    for i, feats in enumerate(entries):
        for k, v in feats.items():
            pts[k - 1, i] = v
    return LabeledData(pts, np.array(labels), C)


def write_matrix(path, a) -> None:
    np.savetxt(path, np.atleast_2d(np.asarray(a, dtype=float)), fmt=FLOAT_FMT, delimiter=",")


def write_vector(path, v) -> None:
    np.savetxt(path, np.asarray(v, dtype=float).reshape(-1), fmt=FLOAT_FMT)


def write_labeled(path, data: LabeledData) -> None:
    with open(path, "w") as fh:
        for i in range(data.points.shape[1]):
            feats = " ".join(f"{k + 1}:{FLOAT_FMT % v}" for k, v in enumerate(data.points[:, i]) if v != 0.0)
            fh.write(f"{int(data.labels[i]):+d} {feats}".rstrip() + "\n")


def parse_instance(path, format_tag: str, rhs_path=None, radius: float = 1.0, C: float = 1.0):
    """Load ``lasso`` (matrix + rhs), ``svm`` (matrix) or ``labeled`` data."""
    if format_tag not in ("lasso", "svm", "labeled"):
        raise ValueError(f"unknown instance format {format_tag!r}")
    if format_tag == "labeled":
        return read_labeled(path, C)
    a = read_matrix(path)
    if format_tag == "svm":
        return SvmInstance(a)
    if rhs_path is None:
        raise ValueError("a Lasso instance needs a right-hand side file")
    b = read_vector(rhs_path)
    if b.shape[0] != a.shape[0]:
        raise DimensionError(f"rhs has {b.shape[0]} entries but the matrix has {a.shape[0]} rows")
    return LassoInstance(a, b, radius)


# reports ---------------------------------------------------------------------

def sparse(x, tol: float = 0.0) -> list:
    """``[[index, value], ...]`` for the entries of ``x`` with ``|value| > tol`` (0-based)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    return [[int(i), float(x[i])] for i in np.flatnonzero(np.abs(x) > tol)]


def dense(pairs, n: int) -> np.ndarray:
    x = np.zeros(n)
    for i, v in pairs:
        x[int(i)] = float(v)
    return x


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_report(path, report: dict) -> None:
    text = json.dumps(_plain(report), indent=2, sort_keys=True)
    if path is None or str(path) == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n")


def read_report(path) -> dict:
    return json.loads(Path(path).read_text())


def verify_report(report: dict, inst, tol: float = 1e-9) -> bool:
    """Recompute objective (and gap, for SVM reports) from the embedded solution."""
    x = dense(report["solution"], int(report["n"]))
    if isinstance(inst, LassoInstance):
        obj = lasso_objective(inst, x)
        gap = lasso_subopt_bound(inst, x)
    else:
        obj = svm_objective(inst, x)
        gap = duality_gap(inst, x)
    scale = max(1.0, abs(obj))
    ok = abs(obj - float(report["objective"])) <= tol * scale
    if "gap" in report and report["gap"] is not None:
        ok = ok and abs(gap - float(report["gap"])) <= tol * scale
    return bool(ok)
