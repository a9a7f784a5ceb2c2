"""Finite samples of index sets and grid-based feasibility checks.

A semialgebraic set given by inequalities is sampled with a uniform box grid
filtered by ``g_j >= -FILTER_TOL``.  Opposing generator pairs ``(g, -g)``
describe an equality ``g = 0``, which a box grid almost never hits; grid
points are then projected onto the equality variety by Gauss-Newton steps
before filtering.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .poly import Monomial

FILTER_TOL = 1e-9
DEFAULT_DENSITY = 50
MAX_POINTS = 100_000


class EmptyGridError(ValueError):
    """The sampling box does not meet the set."""


def _as_terms(g) -> dict[Monomial, float]:
    from .poly import Polynomial, Y

    if isinstance(g, Polynomial):
        return g.block_terms(Y) if g.space.nx else g.terms
    return {tuple(m): float(c) for m, c in dict(g).items()}


class _Compiled:
    """Vectorized evaluation and gradient of a polynomial in ``n`` variables."""

    def __init__(self, terms: dict[Monomial, float], n: int):
        self.n = n
        self.exps = np.array(list(terms), dtype=float).reshape(-1, n)
        self.coefs = np.array(list(terms.values()), dtype=float)

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        if self.coefs.size == 0:
            return np.zeros(len(pts))
        return np.prod(pts[:, None, :] ** self.exps[None], axis=2) @ self.coefs

    def grad(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros_like(pts)
        for i in range(self.n):
            e = self.exps.copy()
            c = self.coefs * e[:, i]
            e[:, i] = np.maximum(e[:, i] - 1, 0)
            out[:, i] = np.prod(pts[:, None, :] ** e[None], axis=2) @ c
        return out


def equality_pairs(gens: Sequence[dict]) -> tuple[list[int], list[int]]:
    """Indices of generators forming ``(g, -g)`` pairs, and of the remaining ones.

    The first list holds one representative per pair.
    """
    used: set[int] = set()
    reps = []
    for i, g in enumerate(gens):
        if i in used:
            continue
        for j in range(i + 1, len(gens)):
            if j in used or set(gens[j]) != set(g):
                continue
            if all(np.isclose(gens[j][m], -c, rtol=1e-12, atol=1e-14) for m, c in g.items()):
                used.update((i, j))
                reps.append(i)
                break
    rest = [i for i in range(len(gens)) if i not in used]
    return reps, rest


def _project(pts: np.ndarray, eqs: list[_Compiled], iters: int = 30) -> np.ndarray:
    pts = pts.copy()
    active = np.arange(len(pts))
    for _ in range(iters):
        sub = pts[active]
        res = np.stack([h(sub) for h in eqs], axis=1)
        moving = np.max(np.abs(res), axis=1) >= 1e-13
        if not moving.any():
            break
        active, sub, res = active[moving], sub[moving], res[moving]
        jac = np.stack([h.grad(sub) for h in eqs], axis=1)  # (N, k, n)
        gram = jac @ jac.transpose(0, 2, 1)
        gram += 1e-14 * np.eye(len(eqs))
        # minimum-norm Gauss-Newton step J' (J J')^{-1} res
        coef = np.linalg.solve(gram, res[:, :, None])[:, :, 0]
        pts[active] = sub - np.einsum("nkd,nk->nd", jac, coef)
    return pts


def sample_set(generators: Sequence, n: int, box: np.ndarray | None = None,
               density: int = DEFAULT_DENSITY, max_points: int = MAX_POINTS) -> np.ndarray:
    """Points of ``{y : g_j(y) >= 0}`` from a uniform grid over ``box``.

    ``density`` points per coordinate, reduced so the grid has at most
    ``max_points`` points.  Raises :class:`EmptyGridError` if nothing survives.
    """
    if n == 0:
        return np.zeros((1, 0))
    box = np.array([[-1.0, 1.0]] * n) if box is None else np.asarray(box, dtype=float)
    density = max(2, int(density))
    while density ** n > max_points and density > 2:
        density -= 1
    axes = [np.linspace(lo, hi, density) for lo, hi in box]
    pts = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)

    gens = [_as_terms(g) for g in generators]
    reps, rest = equality_pairs(gens)
    if reps:
        eqs = [_Compiled(gens[i], n) for i in reps]
        pts = _project(pts, eqs)
        ok = np.all(np.stack([np.abs(h(pts)) <= FILTER_TOL for h in eqs]), axis=0)
        pts = pts[ok]
    for i in rest:
        if len(pts) == 0:
            break
        pts = pts[_Compiled(gens[i], n)(pts) >= -FILTER_TOL]
    if len(pts) == 0:
        raise EmptyGridError("the sampling grid does not meet the index set")
    pts = np.unique(np.round(pts, 12), axis=0)
    return pts


def constraint_values(p, x: Sequence[float], ypts: np.ndarray) -> np.ndarray:
    """``p(x, y_i)`` for every row ``y_i`` of ``ypts``."""
    x = np.asarray(x, dtype=float).ravel()
    ypts = np.atleast_2d(ypts)
    full = np.hstack([np.tile(x, (len(ypts), 1)), ypts])
    return p.evaluate_many(full)


def min_over_grid(p, x: Sequence[float], ypts: np.ndarray) -> float:
    return float(np.min(constraint_values(p, x, ypts)))


def constraint_matrix(p, xpts: np.ndarray, ypts: np.ndarray) -> np.ndarray:
    """``p(x_k, y_i)`` for all pairs, as an array of shape ``(len(xpts), len(ypts))``.

    Uses the split ``p = sum_a x^a c_a(y)`` so the cost is one small matrix product.
    """
    from .poly import X

    xpts = np.atleast_2d(np.asarray(xpts, dtype=float))
    ypts = np.atleast_2d(np.asarray(ypts, dtype=float))
    sp = p.space
    parts = p.split(X)
    if not parts:
        return np.zeros((len(xpts), len(ypts)))
    xmonos = np.array(list(parts), dtype=float).reshape(len(parts), sp.nx)
    xvals = np.prod(xpts[:, None, :] ** xmonos[None], axis=2)
    coef = np.empty((len(parts), len(ypts)))
    for k, c in enumerate(parts.values()):
        ys = c.block_terms("y") if sp.ny else {(): v for v in c.terms.values()}
        comp = _Compiled(ys, sp.ny)
        coef[k] = comp(ypts) if sp.ny else comp.coefs.sum()
    return xvals @ coef
