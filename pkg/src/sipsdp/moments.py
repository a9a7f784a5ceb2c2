"""Truncated moment vectors, moment and localizing matrices, atom extraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np
import scipy.linalg

from .poly import X, Y, Monomial, Polynomial, basis_index, monomial_basis

DEFAULT_RANK_TOL = 1e-6
# Singular values below this are treated as zero regardless of scale, so a
# numerically vanishing functional has rank 0 instead of full rank.
RANK_ABS_FLOOR = 1e-7


class ExtractionError(RuntimeError):
    """Raised when atoms cannot be recovered from a moment vector."""


@dataclass(frozen=True)
class Atom:
    point: np.ndarray
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float).ravel())
        if self.weight < 0:
            raise ValueError("atom weight must be nonnegative")

    def to_dict(self) -> dict:
        return {"point": self.point.tolist(), "weight": float(self.weight)}


@dataclass(frozen=True)
class MomentVector:
    """Values of a linear functional on all monomials of degree <= ``degree``.

    ``values[i]`` is the value on ``monomial_basis(n, degree)[i]``.  The
    order of the vector is ``degree // 2``; an odd degree is allowed for
    functionals truncated at an odd polynomial degree.
    """

    n: int
    degree: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        expected = comb(self.n + self.degree, self.degree)
        if vals.size != expected:
            raise ValueError(f"expected {expected} values, got {vals.size}")
        object.__setattr__(self, "values", vals)

    @property
    def order(self) -> int:
        return self.degree // 2

    @property
    def basis(self) -> list[Monomial]:
        return monomial_basis(self.n, self.degree)

    @property
    def mass(self) -> float:
        return float(self.values[0])

    def is_normalized(self, tol: float = 1e-8) -> bool:
        return abs(self.values[0] - 1.0) <= tol

    def __getitem__(self, mono: Sequence[int]) -> float:
        idx = basis_index(self.n, self.degree).get(tuple(mono))
        if idx is None:
            raise KeyError(f"monomial {tuple(mono)} exceeds degree {self.degree}")
        return float(self.values[idx])

    def first_moments(self) -> np.ndarray:
        """Values on the degree-one monomials, i.e. the point ``L(x)``."""
        return self.values[1 : self.n + 1].copy()

    def truncate(self, degree: int) -> "MomentVector":
        if degree > self.degree:
            raise ValueError("cannot truncate to a larger degree")
        return MomentVector(self.n, degree, self.values[: comb(self.n + degree, degree)])

    def __add__(self, other: "MomentVector") -> "MomentVector":
        self._check_compatible(other)
        return MomentVector(self.n, self.degree, self.values + other.values)

    def __mul__(self, scalar: float) -> "MomentVector":
        return MomentVector(self.n, self.degree, self.values * float(scalar))

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if (self.n, self.degree) != (other.n, other.degree):
            raise ValueError("moment vectors have different shapes")

    def to_dict(self) -> dict:
        return {"n": self.n, "degree": self.degree, "order": self.order,
                "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "MomentVector":
        degree = data.get("degree", 2 * data.get("order", 0))
        return cls(int(data["n"]), int(degree), np.asarray(data["values"], dtype=float))

    @classmethod
    def dirac(cls, point: Sequence[float], degree: int) -> "MomentVector":
        point = np.asarray(point, dtype=float).ravel()
        return cls(point.size, degree, _monomial_values(point, monomial_basis(point.size, degree)))


def _monomial_values(point: np.ndarray, basis: Sequence[Monomial]) -> np.ndarray:
    exps = np.array(basis, dtype=int).reshape(len(basis), point.size)
    return np.prod(point[None, :] ** exps, axis=1)


def vandermonde(points: np.ndarray, basis: Sequence[Monomial]) -> np.ndarray:
    """Rows: basis monomials; columns: points."""
    points = np.atleast_2d(points)
    if not len(points):
        return np.zeros((len(basis), 0))
    return np.column_stack([_monomial_values(p, basis) for p in points])


def from_atoms(atoms: Sequence[Atom], n: int, k: int, degree: int | None = None) -> MomentVector:
    """Moment vector of ``sum_i w_i * delta(point_i)`` up to degree ``2k``
    (or ``degree`` when given)."""
    degree = 2 * k if degree is None else degree
    basis = monomial_basis(n, degree)
    values = np.zeros(len(basis))
    for atom in atoms:
        if atom.point.size != n:
            raise ValueError(f"atom point has {atom.point.size} entries, expected {n}")
        values += atom.weight * _monomial_values(atom.point, basis)
    return MomentVector(n, degree, values)


def moment_matrix(mv: MomentVector, k: int) -> np.ndarray:
    if 2 * k > mv.degree:
        raise ValueError(f"moment matrix of order {k} needs degree {2 * k}, have {mv.degree}")
    rows = monomial_basis(mv.n, k)
    index = basis_index(mv.n, mv.degree)
    size = len(rows)
    out = np.empty((size, size))
    for i, a in enumerate(rows):
        for j in range(i, size):
            b = rows[j]
            out[i, j] = out[j, i] = mv.values[index[tuple(x + y for x, y in zip(a, b))]]
    return out


def block_coefficients(g, n: int, block: str | None = None) -> dict[Monomial, float]:
    """Coefficients of ``g`` as exponents over ``n`` variables.

    ``g`` may be a mapping or a :class:`Polynomial` that depends on a single
    block; ``block`` selects the block explicitly.
    """
    if not isinstance(g, Polynomial):
        return {tuple(m): float(c) for m, c in dict(g).items()}
    if block is None:
        if g.space.nvars == n and not (g.space.nx and g.space.ny):
            return {m: c for m, c in g.items()}
        if g.space.ny == n and not g.depends_on(X):
            block = Y
        elif g.space.nx == n and not g.depends_on(Y):
            block = X
        else:
            raise ValueError("cannot infer which variable block the polynomial uses")
    terms = g.block_terms(block)
    if any(len(m) != n for m in terms):
        raise ValueError("polynomial block size does not match the moment vector")
    return terms


def localizing_matrix(mv: MomentVector, g, k: int, block: str | None = None) -> np.ndarray:
    """Matrix indexed by monomials of degree ``<= k - ceil(deg g / 2)`` with
    entries ``sum_c g_c * mv[a + b + c]``."""
    coeffs = block_coefficients(g, mv.n, block)
    deg_g = max((sum(m) for m in coeffs), default=0)
    half = k - (deg_g + 1) // 2
    if half < 0:
        raise ValueError(f"order {k} is too small for a generator of degree {deg_g}")
    if 2 * half + deg_g > mv.degree:
        raise ValueError(f"localizing matrix needs degree {2 * half + deg_g}, have {mv.degree}")
    rows = monomial_basis(mv.n, half)
    index = basis_index(mv.n, mv.degree)
    size = len(rows)
    out = np.zeros((size, size))
    for i, a in enumerate(rows):
        for j in range(i, size):
            b = rows[j]
            s = 0.0
            for c, gc in coeffs.items():
                s += gc * mv.values[index[tuple(x + y + z for x, y, z in zip(a, b, c))]]
            out[i, j] = out[j, i] = s
    return out


def numerical_rank(mat: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL,
                   abs_floor: float = RANK_ABS_FLOOR) -> int:
    """Number of singular values above ``rank_tol * s_max * max(dim)``
    (and above ``abs_floor``)."""
    mat = np.atleast_2d(mat)
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    thresh = max(rank_tol * s[0] * max(mat.shape), abs_floor)
    return int(np.sum(s > thresh))


@dataclass(frozen=True)
class FlatnessResult:
    flat: bool
    rank_low: int
    rank_high: int
    rank_tol: float

    def to_dict(self) -> dict:
        return {"flat": self.flat, "rank_low": self.rank_low,
                "rank_high": self.rank_high, "rank_tol": self.rank_tol}


def flat_extension_check(mv: MomentVector, k: int, d_S: int,
                         rank_tol: float = DEFAULT_RANK_TOL) -> FlatnessResult:
    """Compare numerical ranks of the order ``k - d_S`` and order ``k`` moment matrices."""
    if k < d_S or d_S < 0:
        raise ValueError(f"need k >= d_S >= 0, got k={k}, d_S={d_S}")
    high = numerical_rank(moment_matrix(mv, k), rank_tol)
    low = numerical_rank(moment_matrix(mv, k - d_S), rank_tol)
    return FlatnessResult(low == high, low, high, rank_tol)


def _column_echelon(v: np.ndarray, tol: float) -> tuple[np.ndarray, list[int]]:
    """Reduced column echelon form of ``v`` (rows = monomials).

    Returns the reduced matrix and the row indices holding the identity.
    """
    a = v.T.copy()  # rank x size; row-reduce this
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= tol:
            a[r:, c] = 0.0
            continue
        a[[r, p]] = a[[p, r]]
        a[r] /= a[r, c]
        others = [i for i in range(rows) if i != r]
        a[others] -= np.outer(a[others, c], a[r])
        pivots.append(c)
        r += 1
    if r < rows:
        raise ExtractionError("column echelon reduction lost rank")
    return a.T, pivots


def extract_atoms(mv: MomentVector, k: int, rank_tol: float = DEFAULT_RANK_TOL,
                  recon_tol: float = 1e-6, seed: int = 0) -> list[Atom]:
    """Recover a finitely atomic representing measure from a flat moment matrix.

    Follows the column-echelon / multiplication-matrix approach: factor
    ``M_k = V V^T``, reduce ``V`` to column echelon form to read off a
    monomial basis of the quotient, build one multiplication matrix per
    variable and diagonalise them jointly through the real Schur form of a
    random combination.  Weights come from a least-squares Vandermonde fit.
    """
    mk = moment_matrix(mv, k)
    rank = numerical_rank(mk, rank_tol)
    if rank == 0:
        return []
    w, u = np.linalg.eigh(mk)
    order = np.argsort(w)[::-1][:rank]
    if w[order[-1]] <= 0:
        raise ExtractionError("moment matrix is not positive semidefinite at the detected rank")
    v = u[:, order] * np.sqrt(w[order])
    basis = monomial_basis(mv.n, k)
    index = {m: i for i, m in enumerate(basis)}
    scale = max(np.abs(v).max(), 1.0)
    ech, pivots = _column_echelon(v, tol=1e-8 * scale * max(v.shape))
    pivot_monos = [basis[i] for i in pivots]

    mult = []
    for var in range(mv.n):
        rows = []
        for m in pivot_monos:
            shifted = list(m)
            shifted[var] += 1
            j = index.get(tuple(shifted))
            if j is None:
                raise ExtractionError("quotient basis reaches the top degree; moment matrix is not flat")
            rows.append(ech[j])
        mult.append(np.array(rows))

    rng = np.random.default_rng(seed)
    coef = rng.random(mv.n)
    coef /= coef.sum()
    combo = sum(c * m for c, m in zip(coef, mult))
    _, q = scipy.linalg.schur(combo, output="real")
    points = np.array([[q[:, j] @ m @ q[:, j] for m in mult] for j in range(rank)])

    vdm = vandermonde(points, basis)
    weights, *_ = np.linalg.lstsq(vdm, mk[:, 0], rcond=None)
    if np.any(weights < -recon_tol * max(1.0, abs(mv.values[0]))):
        raise ExtractionError(f"negative atom weights {weights}")
    weights = np.clip(weights, 0.0, None)
    atoms = [Atom(p, float(wt)) for p, wt in zip(points, weights)]
    recon = from_atoms(atoms, mv.n, k)
    err = np.max(np.abs(recon.values - mv.truncate(2 * k).values))
    if err > recon_tol * max(1.0, np.abs(mv.values).max()):
        raise ExtractionError(f"atom reconstruction error {err:.3g} exceeds tolerance")
    return atoms


def atoms_in_set(atoms: Sequence[Atom], generators: Sequence, feas_tol: float = 1e-6,
                 block: str | None = None) -> bool:
    """True when every atom satisfies ``g(point) >= -feas_tol`` for each generator."""
    for atom in atoms:
        for g in generators:
            coeffs = block_coefficients(g, atom.point.size, block)
            val = sum(c * float(np.prod(atom.point ** np.array(m))) for m, c in coeffs.items())
            if val < -feas_tol:
                return False
    return True


def apply_to_bipoly(mv: MomentVector, p: Polynomial, block: str) -> Polynomial:
    """Contract ``p`` against ``mv`` over ``block``.

    The result lives in the same space as ``p`` but only uses the other block.
    """
    sl = p.space.block_slice(block)
    if sl.stop - sl.start != mv.n:
        raise ValueError("moment vector dimension does not match the block")
    if p.block_degree(block) > mv.degree:
        raise ValueError(
            f"functional of degree {mv.degree} cannot act on block degree {p.block_degree(block)}"
        )
    index = basis_index(mv.n, mv.degree)
    out: dict[Monomial, float] = {}
    for mono, c in p.items():
        val = mv.values[index[mono[sl]]]
        m = list(mono)
        m[sl] = [0] * mv.n
        m = tuple(m)
        out[m] = out.get(m, 0.0) + c * val
    return Polynomial(p.space, out)
