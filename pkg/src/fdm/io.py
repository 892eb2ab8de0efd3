"""JSON and CSV serialization.

Files carry a top-level ``"kind"``: ``maxaffine``, ``pointhull``, ``grid``,
``quadratic``, ``measure``, ``empirical`` or ``solve_result``. Files
without it are accepted when their keys identify the type. Floats are
written with Python's shortest round-trip repr, so ``load(dump(x))``
reproduces every value bit for bit and repeated dumps are byte-identical.

Grid files list ``+inf`` entries by flat index in ``"inf"``; the matching
``"values"`` entries are ``null``.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from pathlib import Path

import numpy as np

from .curvature import DiscreteMeasure, EmpiricalMeasure
from .errors import FDMError, SchemaError
from .functions import GridFunction, MaxAffine, PointHull, Quadratic

FUNCTION_KINDS = ("maxaffine", "pointhull", "grid", "quadratic")


class IoError(FDMError):
    """File could not be read or written."""


# ---------------------------------------------------------------- encoding


def _f(x) -> float:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite value cannot be written as a JSON number")
    return x


def _vec(a) -> list:
    return [_f(x) for x in np.asarray(a, dtype=float).ravel()]


def to_dict(obj) -> dict:
    """Plain-JSON form of a library object."""
    if isinstance(obj, MaxAffine):
        return {
            "kind": "maxaffine",
            "dim": int(obj.dim),
            "pieces": [{"a": _vec(a), "c": _f(c)} for a, c in zip(obj.slopes, obj.intercepts)],
        }
    if isinstance(obj, PointHull):
        return {
            "kind": "pointhull",
            "dim": int(obj.dim),
            "points": [{"x": _vec(x), "v": _f(v)} for x, v in zip(obj.points, obj.values)],
        }
    if isinstance(obj, GridFunction):
        flat = obj.values.ravel()
        inf = np.flatnonzero(np.isinf(flat))
        return {
            "kind": "grid",
            "dim": int(obj.dim),
            "lo": _vec(obj.lo),
            "hi": _vec(obj.hi),
            "shape": [int(s) for s in obj.shape],
            "values": [None if np.isinf(v) else _f(v) for v in flat],
            "inf": [int(i) for i in inf],
        }
    if isinstance(obj, Quadratic):
        return {
            "kind": "quadratic",
            "dim": int(obj.dim),
            "A": [_vec(row) for row in obj.A],
            "b": _vec(obj.b),
            "c": _f(obj.c),
        }
    if isinstance(obj, EmpiricalMeasure):
        return {
            "kind": "empirical",
            "dim": int(obj.dim),
            "atoms": [{"x": _vec(x), "w": _f(w)} for x, w in zip(obj.samples, obj.weights)],
            "seed": int(obj.seed),
            "n": int(obj.n),
        }
    if isinstance(obj, DiscreteMeasure):
        out = {
            "kind": "measure",
            "dim": int(obj.dim),
            "atoms": [{"x": _vec(x), "w": _f(w)} for x, w in zip(obj.atoms, obj.weights)],
        }
        if obj.stderr is not None:
            out["stderr"] = _vec(obj.stderr)
        if obj.total_stderr is not None:
            out["total_stderr"] = _f(obj.total_stderr)
        return out
    from .solver import SolveResult

    if isinstance(obj, SolveResult):
        return solve_result_dict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def solve_result_dict(res, verification=None) -> dict:
    opts = res.options
    out = {
        "kind": "solve_result",
        "q": _f(res.q),
        "dim": int(res.phi0.dim),
        "converged": bool(res.converged),
        "iterations": int(res.iterations),
        "v": _vec(res.v),
        "atoms": [_vec(x) for x in res.phi0.points],
        "tau": _f(res.tau),
        "residual_tv": _f(res.residual_tv),
        "phi0_star": to_dict(res.phi0_star),
        "recovered": to_dict(res.recovered),
        "options": None if opts is None else {k: v for k, v in opts.__dict__.items()},
        "trace": [{k: float(v) if k != "iteration" else int(v) for k, v in row.items()} for row in res.trace],
        "extra": _plain(res.extra),
    }
    if verification is not None:
        out["verification"] = _plain(verification)
    return out


def _plain(x):
    """Recursively convert numpy scalars and arrays to JSON-ready values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if np.isfinite(x) else str(float(x))
    return x


def dumps(obj) -> str:
    data = obj if isinstance(obj, dict) else to_dict(obj)
    return json.dumps(data, indent=2, allow_nan=False) + "\n"


def dump(obj, path) -> None:
    try:
        Path(path).write_text(dumps(obj), encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------- decoding


def _need(d: dict, key: str, ptr: str):
    if not isinstance(d, dict):
        raise SchemaError("expected an object", ptr)
    if key not in d:
        raise SchemaError(f"missing field {key!r}", f"{ptr}/{key}")
    return d[key]


def _number(x, ptr: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError("expected a number", ptr)
    if not math.isfinite(x):
        raise SchemaError("numbers must be finite", ptr)
    return float(x)


def _numbers(x, ptr: str, length: int | None = None) -> list:
    if not isinstance(x, list):
        raise SchemaError("expected an array", ptr)
    if length is not None and len(x) != length:
        raise SchemaError(f"expected {length} entries, got {len(x)}", ptr)
    return [_number(v, f"{ptr}/{i}") for i, v in enumerate(x)]


def _dim(d: dict) -> int:
    dim = _need(d, "dim", "")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SchemaError("dim must be a positive integer", "/dim")
    return dim


def _infer_kind(d: dict) -> str:
    if "kind" in d:
        kind = d["kind"]
        if not isinstance(kind, str):
            raise SchemaError("kind must be a string", "/kind")
        return kind.lower()
    for key, kind in (("pieces", "maxaffine"), ("points", "pointhull"), ("shape", "grid"), ("A", "quadratic")):
        if key in d:
            return kind
    if "atoms" in d:
        return "empirical" if "seed" in d else "measure"
    raise SchemaError("cannot determine the object kind", "/kind")


def _pairs(d, key, inner, value_key, dim):
    items = _need(d, key, "")
    if not isinstance(items, list) or not items:
        raise SchemaError("expected a non-empty array", f"/{key}")
    xs, vs = [], []
    for i, item in enumerate(items):
        ptr = f"/{key}/{i}"
        xs.append(_numbers(_need(item, inner, ptr), f"{ptr}/{inner}", dim))
        vs.append(_number(_need(item, value_key, ptr), f"{ptr}/{value_key}"))
    return np.array(xs), np.array(vs)


def from_dict(d: dict):
    """Inverse of :func:`to_dict` with schema validation."""
    if not isinstance(d, dict):
        raise SchemaError("top level must be an object", "")
    kind = _infer_kind(d)
    if kind == "solve_result":
        return d
    dim = _dim(d)
    if kind == "maxaffine":
        A, c = _pairs(d, "pieces", "a", "c", dim)
        f = MaxAffine(A, c, dim=dim)
        if f.merged:
            warnings.warn(f"merged {f.merged} duplicate slope(s)", stacklevel=2)
        return f
    if kind == "pointhull":
        X, v = _pairs(d, "points", "x", "v", dim)
        f = PointHull(X, v, dim=dim)
        if f.merged:
            warnings.warn(f"merged {f.merged} duplicate point(s)", stacklevel=2)
        return f
    if kind == "grid":
        lo = _numbers(_need(d, "lo", ""), "/lo", dim)
        hi = _numbers(_need(d, "hi", ""), "/hi", dim)
        shape = _need(d, "shape", "")
        if not isinstance(shape, list) or len(shape) != dim or not all(
            isinstance(s, int) and not isinstance(s, bool) and s >= 2 for s in shape
        ):
            raise SchemaError(f"shape must list {dim} integers >= 2", "/shape")
        raw = _need(d, "values", "")
        total = int(np.prod(shape))
        if not isinstance(raw, list) or len(raw) != total:
            raise SchemaError(f"values must have prod(shape) = {total} entries", "/values")
        inf = d.get("inf", [])
        if not isinstance(inf, list):
            raise SchemaError("inf must be an array of indices", "/inf")
        inf_set = set()
        for i, k in enumerate(inf):
            if isinstance(k, bool) or not isinstance(k, int) or not 0 <= k < total:
                raise SchemaError("index out of range", f"/inf/{i}")
            inf_set.add(k)
        vals = np.empty(total)
        for i, v in enumerate(raw):
            if i in inf_set:
                vals[i] = np.inf
            elif v is None:
                raise SchemaError("null value not listed in inf", f"/values/{i}")
            else:
                vals[i] = _number(v, f"/values/{i}")
        return GridFunction(lo, hi, shape, vals)
    if kind == "quadratic":
        A = _need(d, "A", "")
        if not isinstance(A, list) or len(A) != dim:
            raise SchemaError(f"A must have {dim} rows", "/A")
        rows = [_numbers(r, f"/A/{i}", dim) for i, r in enumerate(A)]
        b = _numbers(d.get("b", [0.0] * dim), "/b", dim)
        c = _number(d.get("c", 0.0), "/c")
        return Quadratic(np.array(rows), np.array(b), c)
    if kind in ("measure", "empirical"):
        X, w = _pairs(d, "atoms", "x", "w", dim)
        if kind == "empirical":
            seed = _need(d, "seed", "")
            n = _need(d, "n", "")
            if not isinstance(seed, int) or not isinstance(n, int):
                raise SchemaError("seed and n must be integers", "/seed")
            return EmpiricalMeasure(X, w, seed, n)
        se = d.get("stderr")
        if se is not None:
            se = np.array(_numbers(se, "/stderr", len(w)))
        tse = d.get("total_stderr")
        if tse is not None:
            tse = _number(tse, "/total_stderr")
        return DiscreteMeasure(X, w, se, tse)
    raise SchemaError(f"unknown kind {kind!r}", "/kind")


def loads(text: str):
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno}", "") from None
    return from_dict(data)


def _reject_constant(name):
    raise SchemaError(f"{name} is not allowed", "")


def load(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def parse_function(path):
    obj = load(path)
    if not hasattr(obj, "_eval"):
        raise SchemaError(f"{path} holds a {_infer_kind(json.loads(Path(path).read_text()))}, not a function", "/kind")
    return obj


def parse_measure(path) -> DiscreteMeasure:
    obj = load(path)
    if not isinstance(obj, DiscreteMeasure):
        raise SchemaError(f"{path} does not hold a discrete measure", "/kind")
    return obj


# ---------------------------------------------------------------- CSV


def emit_plot_data(result, path, lo: float = -2.0, hi: float = 2.0, n: int = 9) -> None:
    """Plot-ready CSV.

    One-dimensional functions give ``x,f`` samples on ``[lo, hi]``; measures
    give one row per atom; solver results give the objective trace; lists of
    gap reports give one row per report.
    """
    from .inequalities import GapReport
    from .solver import SolveResult

    rows: list[list] = []
    if isinstance(result, SolveResult):
        header = ["iteration", "objective", "gradnorm"]
        rows = [[t["iteration"], t["objective"], t["gradnorm"]] for t in result.trace]
    elif isinstance(result, EmpiricalMeasure):
        header = [f"x{i}" for i in range(result.dim)] + ["weight"]
        rows = [list(x) + [w] for x, w in zip(result.samples, result.weights)]
    elif isinstance(result, DiscreteMeasure):
        header = [f"x{i}" for i in range(result.dim)] + ["weight"]
        rows = [list(x) + [w] for x, w in zip(result.atoms, result.weights)]
    elif isinstance(result, list) and all(isinstance(r, GapReport) for r in result):
        header = ["name", "instance", "lhs", "rhs", "gap", "stderr", "pass"]
        rows = [[r.to_row()[k] for k in header] for r in result]
    elif hasattr(result, "_eval") and result.dim == 1:
        header = ["x", "f"]
        xs = np.linspace(lo, hi, n)
        rows = [[x, v] for x, v in zip(xs, result(xs[:, None]))]
    else:
        raise TypeError(f"no plot layout for {type(result).__name__}")
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(v) for v in row])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v
