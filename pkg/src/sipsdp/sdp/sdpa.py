"""SDPA sparse (``.dat-s``) export and import.

Export writes the LMI form used by SDPA::

    minimize    sum_i c_i w_i
    subject to  sum_i F_i w_i - F_0  is PSD (block diagonal)

The equality constraints of an :class:`SdpProblem` are eliminated by
parametrising their solution set, pivoting on block entries first so that
free scalars remain as SDPA variables.  Nonnegative scalars and inequality
slacks go into one diagonal block (negative size in the header).  The
objective sense and constant offset are carried in ``*`` comment lines so
that a round trip reproduces the optimal value.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np

from .problem import SdpBuilder, SdpProblem


class SdpaParseError(ValueError):
    pass


@dataclass
class _Lmi:
    c: np.ndarray  # objective over parameters
    blocks: list[list[np.ndarray]]  # blocks[b][i] = F_i of block b (i = 0 is F_0)
    sizes: list[int]  # negative for diagonal blocks
    offset: float
    sense: str


def _variable_order(prob: SdpProblem):
    cols = []
    for name, d in prob.psd_blocks:
        for i in range(d):
            for j in range(i, d):
                cols.append((name, i, j))
    cols += list(prob.nonneg_vars)
    cols += list(prob.free_vars)
    return cols


def _row(expr, index, n):
    out = np.zeros(n)
    for k, v in expr.items():
        out[index[k]] += v
    return out


def _parametrize(A: np.ndarray, b: np.ndarray, tol: float = 1e-11):
    """Solution set of ``A v = b`` as ``v0 + N w``; pivots taken left to right."""
    m, n = A.shape
    M = np.hstack([A, b[:, None]]).astype(float)
    scale = max(1.0, float(np.abs(M).max()) if M.size else 1.0)
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = r + int(np.argmax(np.abs(M[r:, c])))
        if abs(M[p, c]) <= tol * scale:
            continue
        M[[r, p]] = M[[p, r]]
        M[r] /= M[r, c]
        others = np.arange(m) != r
        M[others] -= np.outer(M[others, c], M[r])
        pivots.append(c)
        r += 1
    if r < m and np.any(np.abs(M[r:, n]) > 1e-9 * scale):
        raise ValueError("equality constraints are inconsistent")
    free = [c for c in range(n) if c not in set(pivots)]
    v0 = np.zeros(n)
    N = np.zeros((n, len(free)))
    for k, c in enumerate(pivots):
        v0[c] = M[k, n]
        N[c] = -M[k, free]
    for k, c in enumerate(free):
        N[c, k] = 1.0
    return v0, N, free


def _to_lmi(prob: SdpProblem) -> _Lmi:
    cols = _variable_order(prob)
    index = {k: i for i, k in enumerate(cols)}
    n = len(cols)
    A = np.array([_row(e.coeffs, index, n) for e in prob.equalities]).reshape(-1, n)
    b = np.array([e.rhs for e in prob.equalities], dtype=float)
    v0, N, _ = _parametrize(A, b)
    npar = N.shape[1]
    c_full = _row(prob.objective, index, n)
    sign = 1.0 if prob.sense == "min" else -1.0
    c = sign * (N.T @ c_full)
    offset = float(c_full @ v0) + prob.objective_constant

    blocks, sizes = [], []
    for name, d in prob.psd_blocks:
        mats = [np.zeros((d, d)) for _ in range(npar + 1)]
        for i in range(d):
            for j in range(i, d):
                k = index[(name, i, j)]
                mats[0][i, j] = mats[0][j, i] = -v0[k]
                for t in range(npar):
                    mats[t + 1][i, j] = mats[t + 1][j, i] = N[k, t]
        blocks.append(mats)
        sizes.append(d)
    diag_rows = [(v0[index[v]], N[index[v]]) for v in prob.nonneg_vars]
    for ineq in prob.inequalities:
        a = _row(ineq.coeffs, index, n)
        diag_rows.append((float(a @ v0) - ineq.rhs, a @ N))
    if diag_rows:
        k = len(diag_rows)
        mats = [np.zeros((k, k)) for _ in range(npar + 1)]
        for r, (const, lin) in enumerate(diag_rows):
            mats[0][r, r] = -const
            for t in range(npar):
                mats[t + 1][r, r] = lin[t]
        blocks.append(mats)
        sizes.append(-k)
    return _Lmi(c, blocks, sizes, offset, prob.sense)


def _fmt(x: float) -> str:
    return "%.17g" % x


def export_sdpa(prob: SdpProblem, path: str | os.PathLike, tol: float = 1e-14) -> None:
    """Write ``prob`` as an SDPA sparse file."""
    lmi = _to_lmi(prob)
    npar = lmi.c.size
    c = lmi.c
    blocks = lmi.blocks
    sizes = lmi.sizes
    if npar == 0:
        # SDPA needs at least one variable; add an inert one
        npar = 1
        c = np.zeros(1)
        blocks = [mats + [np.zeros_like(mats[0])] for mats in blocks]
    if not sizes:
        blocks = [[np.zeros((1, 1)) for _ in range(npar + 1)]]
        sizes = [-1]
    lines = [
        f"* sense {lmi.sense}",
        f"* offset {_fmt(lmi.offset)}",
        str(npar),
        str(len(sizes)),
        " ".join(str(s) for s in sizes),
        " ".join(_fmt(v) for v in c),
    ]
    for t in range(npar + 1):
        for bno, mats in enumerate(blocks, start=1):
            mat = mats[t]
            d = mat.shape[0]
            for i in range(d):
                for j in range(i, d):
                    v = mat[i, j]
                    if abs(v) > tol:
                        lines.append(f"{t} {bno} {i + 1} {j + 1} {_fmt(v)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


_SEP = re.compile(r"[,(){}\s]+")


def _tokens(text: str) -> list[str]:
    return [t for t in _SEP.split(text) if t]


def import_sdpa(path: str | os.PathLike) -> SdpProblem:
    """Read an SDPA sparse file into an equality-form :class:`SdpProblem`.

    Each LMI block becomes a PSD block (diagonal blocks become nonnegative
    scalars) linked to free variables ``w1..wm`` by equalities.
    """
    with open(path) as fh:
        raw = fh.read().splitlines()
    sense, offset = "min", 0.0
    body: list[tuple[int, str]] = []
    for lineno, line in enumerate(raw, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped[0] in "*\"":
            parts = stripped[1:].split()
            if len(parts) == 2 and parts[0] == "sense" and parts[1] in ("min", "max"):
                sense = parts[1]
            elif len(parts) == 2 and parts[0] == "offset":
                try:
                    offset = float(parts[1])
                except ValueError as exc:
                    raise SdpaParseError(f"line {lineno}: bad offset {parts[1]!r}") from exc
            continue
        body.append((lineno, stripped))
    if len(body) < 4:
        raise SdpaParseError("file ends before the header is complete")

    def ints(lineno, text, count=None):
        try:
            vals = [int(float(t)) for t in _tokens(text)]
        except ValueError as exc:
            raise SdpaParseError(f"line {lineno}: expected integers, got {text!r}") from exc
        if count is not None and len(vals) < count:
            raise SdpaParseError(f"line {lineno}: expected {count} integers, got {len(vals)}")
        return vals

    m = ints(*body[0], 1)[0]
    nblocks = ints(*body[1], 1)[0]
    sizes = ints(*body[2], nblocks)[:nblocks]
    if m < 0 or nblocks < 1 or any(s == 0 for s in sizes):
        raise SdpaParseError(f"line {body[2][0]}: invalid header")
    lineno, text = body[3]
    try:
        c = [float(t) for t in _tokens(text)]
    except ValueError as exc:
        raise SdpaParseError(f"line {lineno}: bad objective vector {text!r}") from exc
    if len(c) < m:
        raise SdpaParseError(f"line {lineno}: objective has {len(c)} entries, expected {m}")
    c = c[:m]

    entries: dict[tuple[int, int, int, int], float] = {}
    for lineno, text in body[4:]:
        toks = _tokens(text)
        if len(toks) != 5:
            raise SdpaParseError(f"line {lineno}: expected 5 fields, got {len(toks)}")
        try:
            t, bno, i, j = (int(float(x)) for x in toks[:4])
            v = float(toks[4])
        except ValueError as exc:
            raise SdpaParseError(f"line {lineno}: cannot parse entry {text!r}") from exc
        if not (0 <= t <= m and 1 <= bno <= nblocks):
            raise SdpaParseError(f"line {lineno}: matrix or block index out of range")
        d = abs(sizes[bno - 1])
        if i > j:
            i, j = j, i
        if not (1 <= i <= d and 1 <= j <= d):
            raise SdpaParseError(f"line {lineno}: entry ({i}, {j}) outside block of size {d}")
        if sizes[bno - 1] < 0 and i != j:
            raise SdpaParseError(f"line {lineno}: off-diagonal entry in a diagonal block")
        key = (t, bno, i - 1, j - 1)
        entries[key] = entries.get(key, 0.0) + v

    builder = SdpBuilder()
    params = [builder.add_free(f"w{k}") for k in range(1, m + 1)]
    per_block: dict[tuple[int, int, int], dict[int, float]] = {}
    for (t, bno, i, j), v in entries.items():
        per_block.setdefault((bno, i, j), {})[t] = v
    for bno, size in enumerate(sizes, start=1):
        d = abs(size)
        if size > 0:
            name = builder.add_block(f"B{bno}", d)
            cells = [(i, j, (name, i, j)) for i in range(d) for j in range(i, d)]
        else:
            cells = [(i, i, builder.add_nonneg(f"B{bno}_{i}")) for i in range(d)]
        for i, j, key in cells:
            coefs = per_block.get((bno, i, j), {})
            expr = {key: 1.0}
            for t, v in coefs.items():
                if t > 0:
                    expr[params[t - 1]] = expr.get(params[t - 1], 0.0) - v
            builder.add_eq(expr, -coefs.get(0, 0.0))
    sign = 1.0 if sense == "min" else -1.0
    builder.set_objective({params[k]: sign * c[k] for k in range(m)}, offset, sense)
    return builder.build()
