"""JSON problem files.

A problem file is one JSON object::

    {
      "variables": {"x": ["x1", "x2"], "y": ["y1", "y2"]},
      "objective": [{"exponents": [2, 0], "coeff": 1.0}, ...],      # x block
      "constraint_p": [{"exponents": [1, 0, 0, 1], "coeff": -2}],    # x then y
      "index_set": [[{"exponents": [0, 0], "coeff": 1}, ...], ...],  # y block, g_j >= 0
      "tau_K": 1.5,                                                   # or "unset"
      "options": {"mode": "auto", "grid_density": 50, "schedule": "1:1,2:2",
                  "tolerances": {"feas_tol": 1e-8}, "box": [[0, 1], [-1, 1]]}
    }
"""

from __future__ import annotations

import json
import math
import os
from typing import Any

import numpy as np

from .poly import X, Y, Polynomial, Space
from .problem import MODES, SipProblem


class ProblemFileError(ValueError):
    """Malformed problem file; the message names the offending field and record."""


def _records(data: Any, where: str, length: int) -> dict[tuple, float]:
    if not isinstance(data, list):
        raise ProblemFileError(f"{where}: expected a list of {{exponents, coeff}} records")
    out: dict[tuple, float] = {}
    for i, rec in enumerate(data):
        if not isinstance(rec, dict) or "exponents" not in rec or "coeff" not in rec:
            raise ProblemFileError(f"{where} record {i}: needs 'exponents' and 'coeff'")
        exps = rec["exponents"]
        if not isinstance(exps, list) or not all(isinstance(e, int) and not isinstance(e, bool)
                                                 for e in exps):
            raise ProblemFileError(f"{where} record {i}: exponents must be a list of integers")
        if len(exps) != length:
            raise ProblemFileError(
                f"{where} record {i}: exponent length {len(exps)}, expected {length}")
        if any(e < 0 for e in exps):
            raise ProblemFileError(f"{where} record {i}: negative exponent")
        try:
            c = float(rec["coeff"])
        except (TypeError, ValueError) as exc:
            raise ProblemFileError(f"{where} record {i}: coefficient is not a number") from exc
        if not math.isfinite(c):
            raise ProblemFileError(f"{where} record {i}: coefficient is not finite")
        out[tuple(exps)] = out.get(tuple(exps), 0.0) + c
    return out


def parse_schedule(text: str) -> list[tuple[int | None, int]]:
    """``"r1:t1,r2:t2"``; an entry ``":t"`` or ``"t"`` leaves ``r`` unset."""
    out = []
    for i, item in enumerate(filter(None, (s.strip() for s in str(text).split(",")))):
        try:
            if ":" in item:
                r, t = item.split(":", 1)
                out.append((int(r) if r.strip() else None, int(t)))
            else:
                out.append((None, int(item)))
        except ValueError as exc:
            raise ProblemFileError(f"schedule entry {i} ({item!r}) is not r:t") from exc
    return out


def problem_from_dict(doc: Any) -> SipProblem:
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must be a JSON object")
    for key in ("variables", "objective", "constraint_p"):
        if key not in doc:
            raise ProblemFileError(f"missing field '{key}'")
    var = doc["variables"]
    if not isinstance(var, dict) or not isinstance(var.get("x"), list) or not isinstance(var.get("y", []), list):
        raise ProblemFileError("variables: expected {'x': [...], 'y': [...]}")
    try:
        space = Space(tuple(map(str, var["x"])), tuple(map(str, var.get("y", []))))
    except ValueError as exc:
        raise ProblemFileError(f"variables: {exc}") from exc
    if space.nx == 0:
        raise ProblemFileError("variables: need at least one x variable")
    f = Polynomial.from_block(space, X, _records(doc["objective"], "objective", space.nx))
    p = Polynomial(space, _records(doc["constraint_p"], "constraint_p", space.nvars))
    index_set = doc.get("index_set", [])
    if not isinstance(index_set, list):
        raise ProblemFileError("index_set: expected a list of polynomials")
    gens = [Polynomial.from_block(space, Y, _records(g, f"index_set[{j}]", space.ny))
            for j, g in enumerate(index_set)]
    tau = doc.get("tau_K", "unset")
    if tau in ("unset", None):
        tau = None
    else:
        try:
            tau = float(tau)
        except (TypeError, ValueError) as exc:
            raise ProblemFileError("tau_K must be a positive number or 'unset'") from exc
        if not tau > 0:
            raise ProblemFileError("tau_K must be a positive number or 'unset'")
    options = doc.get("options", {}) or {}
    if not isinstance(options, dict):
        raise ProblemFileError("options must be an object")
    mode = options.get("mode", "auto")
    if mode not in MODES:
        raise ProblemFileError(f"options.mode must be one of {MODES}")
    box = options.get("box")
    if box is not None:
        try:
            box = tuple((float(lo), float(hi)) for lo, hi in box)
        except (TypeError, ValueError) as exc:
            raise ProblemFileError("options.box must be a list of [lo, hi] pairs") from exc
        if len(box) != space.ny:
            raise ProblemFileError(f"options.box has {len(box)} intervals, expected {space.ny}")
    if "schedule" in options:
        parse_schedule(options["schedule"])
    return SipProblem(f, p, tuple(gens), tau=tau, mode=mode, box=box,
                      name=str(doc.get("name", "")), options=dict(options))


def load_problem(path: str | os.PathLike) -> SipProblem:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return problem_from_dict(doc)


def problem_to_dict(prob: SipProblem) -> dict:
    doc = {
        "variables": {"x": list(prob.space.x), "y": list(prob.space.y)},
        "objective": prob.f.to_records(X),
        "constraint_p": prob.p.to_records(),
        "index_set": [g.to_records(Y) for g in prob.generators],
        "tau_K": prob.tau if prob.tau is not None else "unset",
    }
    if prob.name:
        doc["name"] = prob.name
    options = dict(prob.options)
    options["mode"] = prob.mode
    if prob.box is not None:
        options["box"] = [list(b) for b in prob.box]
    doc["options"] = options
    return doc


def save_problem(prob: SipProblem, path: str | os.PathLike, extra: dict | None = None) -> None:
    doc = problem_to_dict(prob)
    doc.update(extra or {})
    with open(path, "w") as fh:
        fh.write(dumps(doc))


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating,)):
        return _clean(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Deterministic JSON with non-finite floats written as null."""
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"
