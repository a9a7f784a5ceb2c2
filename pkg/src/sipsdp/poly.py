"""Sparse multivariate polynomials over a two-block variable space.

Every polynomial lives in a :class:`Space` whose variables are split into an
``x`` block (decision variables) followed by a ``y`` block (index
parameters).  Terms are stored as a map from full exponent tuples to float
coefficients.  Coefficients smaller than :data:`DROP_TOL` in magnitude are
discarded after every operation.

Monomials are plain exponent tuples.  The canonical basis order used across
the package is graded lexicographic: total degree first, then descending
lexicographic order on the exponent tuple, so ``[1, y1, y2, y1^2, y1*y2,
y2^2, ...]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

Monomial = tuple[int, ...]

#: Coefficients with ``abs(c) < DROP_TOL`` are dropped after arithmetic.
DROP_TOL = 1e-14

X = "x"
Y = "y"


def grlex_key(mono: Sequence[int]) -> tuple:
    """Sort key realising the graded lexicographic order."""
    return (sum(mono), tuple(-e for e in mono))


@lru_cache(maxsize=None)
def _basis(n: int, k: int) -> tuple[Monomial, ...]:
    out = []
    for d in range(k + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return tuple(out)


def monomial_basis(n: int, k: int) -> list[Monomial]:
    """All exponent tuples in ``n`` variables of degree ``<= k``, in grlex order.

    The result has ``binom(n + k, k)`` entries.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    return list(_basis(n, k))


@lru_cache(maxsize=None)
def basis_index(n: int, k: int) -> dict[Monomial, int]:
    return {m: i for i, m in enumerate(_basis(n, k))}


def multinomial(alpha: Sequence[int]) -> int:
    """``|alpha|! / (alpha_1! ... alpha_n!)``."""
    out = math.factorial(sum(alpha))
    for a in alpha:
        out //= math.factorial(a)
    return out


@dataclass(frozen=True)
class Space:
    """Ordered variable names split into an x block and a y block."""

    x: tuple[str, ...] = ()
    y: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "y", tuple(self.y))
        names = self.x + self.y
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")

    @property
    def nx(self) -> int:
        return len(self.x)

    @property
    def ny(self) -> int:
        return len(self.y)

    @property
    def nvars(self) -> int:
        return len(self.x) + len(self.y)

    @property
    def names(self) -> tuple[str, ...]:
        return self.x + self.y

    def block_slice(self, block: str) -> slice:
        if block == X:
            return slice(0, self.nx)
        if block == Y:
            return slice(self.nx, self.nvars)
        raise ValueError(f"unknown block {block!r}")

    def block_size(self, block: str) -> int:
        return self.nx if block == X else self.ny

    def gens(self) -> list["Polynomial"]:
        """One degree-one polynomial per variable, in declaration order."""
        return [Polynomial.variable(self, name) for name in self.names]

    def join(self, mono_x: Sequence[int], mono_y: Sequence[int]) -> Monomial:
        if len(mono_x) != self.nx or len(mono_y) != self.ny:
            raise ValueError("block exponent length mismatch")
        return tuple(mono_x) + tuple(mono_y)


def _other(block: str) -> str:
    return Y if block == X else X


class Polynomial:
    """Immutable sparse polynomial with float coefficients."""

    __slots__ = ("space", "_terms")

    def __init__(self, space: Space, terms: Mapping[Sequence[int], float] | None = None):
        self.space = space
        clean: dict[Monomial, float] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != space.nvars:
                raise ValueError(
                    f"exponent {mono} has length {len(mono)}, space has {space.nvars} variables"
                )
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = float(c)
            if c != 0.0:
                clean[mono] = clean.get(mono, 0.0) + c
        self._terms = {m: c for m, c in clean.items() if abs(c) >= DROP_TOL}

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, space: Space, value: float) -> "Polynomial":
        return cls(space, {(0,) * space.nvars: value})

    @classmethod
    def zero(cls, space: Space) -> "Polynomial":
        return cls(space, {})

    @classmethod
    def variable(cls, space: Space, name: str) -> "Polynomial":
        idx = space.names.index(name)
        e = [0] * space.nvars
        e[idx] = 1
        return cls(space, {tuple(e): 1.0})

    @classmethod
    def from_block(cls, space: Space, block: str, terms: Mapping[Sequence[int], float]) -> "Polynomial":
        """Build from exponents over one block only (other block exponents zero)."""
        zeros = (0,) * space.block_size(_other(block))
        out = {}
        for mono, c in terms.items():
            mono = tuple(mono)
            if len(mono) != space.block_size(block):
                raise ValueError(f"exponent {mono} does not match the {block} block")
            out[mono + zeros if block == X else zeros + mono] = c
        return cls(space, out)

    # basic protocol -----------------------------------------------------
    @property
    def terms(self) -> dict[Monomial, float]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def coeff(self, mono: Sequence[int]) -> float:
        return self._terms.get(tuple(mono), 0.0)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.space, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.space == other.space and self._terms == other._terms

    def __hash__(self):
        return hash((self.space, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono in sorted(self._terms, key=grlex_key):
            c = self._terms[mono]
            factors = [
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.space.names, mono)
                if e
            ]
            parts.append(f"{c:g}" + ("*" + "*".join(factors) if factors else ""))
        return " + ".join(parts)

    def allclose(self, other: "Polynomial", atol: float = 1e-9) -> bool:
        return (self - other).max_abs_coeff() <= atol

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.space != self.space:
                raise ValueError("polynomials live in different spaces")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial.constant(self.space, float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0.0) + c
        return Polynomial(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.space, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial(self.space, {m: c * float(other) for m, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, float] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0.0) + c1 * c2
        return Polynomial(self.space, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = Polynomial.constant(self.space, 1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # degrees ----------------------------------------------------------------
    def degree(self) -> int:
        """Total degree; 0 for the zero polynomial (see :meth:`is_zero`)."""
        return max((sum(m) for m in self._terms), default=0)

    def block_degree(self, block: str) -> int:
        """Largest degree in one block; 0 for the zero polynomial."""
        sl = self.space.block_slice(block)
        return max((sum(m[sl]) for m in self._terms), default=0)

    def is_block_homogeneous(self, block: str) -> bool:
        sl = self.space.block_slice(block)
        degs = {sum(m[sl]) for m in self._terms}
        return len(degs) <= 1

    def depends_on(self, block: str) -> bool:
        sl = self.space.block_slice(block)
        return any(any(m[sl]) for m in self._terms)

    # evaluation ---------------------------------------------------------------
    def evaluate(self, point: Sequence[float]) -> float:
        point = np.asarray(point, dtype=float).ravel()
        if point.size != self.space.nvars:
            raise ValueError(
                f"point has {point.size} entries, polynomial has {self.space.nvars} variables"
            )
        total = 0.0
        for mono, c in self._terms.items():
            term = c
            for v, e in zip(point, mono):
                if e:
                    term *= v**e
            total += term
        return float(total)

    __call__ = evaluate

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorised evaluation at the rows of ``points``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.space.nvars:
            raise ValueError("point dimension mismatch")
        if not self._terms:
            return np.zeros(points.shape[0])
        monos = np.array(list(self._terms.keys()))
        coeffs = np.array(list(self._terms.values()))
        vals = np.prod(points[:, None, :] ** monos[None, :, :], axis=2)
        return vals @ coeffs

    def partial_evaluate(self, block: str, values: Sequence[float]) -> "Polynomial":
        """Substitute numbers for one block; the result keeps the same space."""
        sl = self.space.block_slice(block)
        values = np.asarray(values, dtype=float).ravel()
        if values.size != sl.stop - sl.start:
            raise ValueError("block value length mismatch")
        out: dict[Monomial, float] = {}
        for mono, c in self._terms.items():
            factor = c
            for v, e in zip(values, mono[sl]):
                if e:
                    factor *= v**e
            m = list(mono)
            m[sl] = [0] * len(values)
            m = tuple(m)
            out[m] = out.get(m, 0.0) + factor
        return Polynomial(self.space, out)

    def block_terms(self, block: str) -> dict[Monomial, float]:
        """Terms as exponents over ``block``; the polynomial must not use the other block."""
        if self.depends_on(_other(block)):
            raise ValueError(f"polynomial depends on the {_other(block)} block")
        sl = self.space.block_slice(block)
        return {m[sl]: c for m, c in self._terms.items()}

    def split(self, block: str) -> dict[Monomial, "Polynomial"]:
        """Group terms by their exponent in ``block``.

        Returns a map from ``block`` exponents to coefficient polynomials in the
        other block (same space, ``block`` exponents zeroed).
        """
        sl = self.space.block_slice(block)
        groups: dict[Monomial, dict[Monomial, float]] = {}
        for mono, c in self._terms.items():
            key = mono[sl]
            m = list(mono)
            m[sl] = [0] * len(key)
            groups.setdefault(key, {})[tuple(m)] = c
        return {k: Polynomial(self.space, v) for k, v in groups.items()}

    # calculus / substitution ---------------------------------------------------
    def diff(self, var: int | str) -> "Polynomial":
        idx = self.space.names.index(var) if isinstance(var, str) else int(var)
        out: dict[Monomial, float] = {}
        for mono, c in self._terms.items():
            e = mono[idx]
            if e:
                m = list(mono)
                m[idx] -= 1
                out[tuple(m)] = out.get(tuple(m), 0.0) + c * e
        return Polynomial(self.space, out)

    def compose(self, images: Sequence["Polynomial"], space: Space | None = None) -> "Polynomial":
        """Substitute ``images[i]`` for variable ``i``."""
        if len(images) != self.space.nvars:
            raise ValueError("need one image per variable")
        target = space or images[0].space
        out = Polynomial.zero(target)
        cache: dict[tuple[int, int], Polynomial] = {}
        for mono, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for i, e in enumerate(mono):
                if e:
                    if (i, e) not in cache:
                        cache[(i, e)] = images[i] ** e
                    term = term * cache[(i, e)]
            out = out + term
        return out

    def embed(self, space: Space) -> "Polynomial":
        """Re-express in a larger space by matching variable names."""
        pos = [space.names.index(n) for n in self.space.names]
        out = {}
        for mono, c in self._terms.items():
            e = [0] * space.nvars
            for p, v in zip(pos, mono):
                e[p] = v
            out[tuple(e)] = c
        return Polynomial(space, out)

    # homogenisation ------------------------------------------------------------
    def highest_degree_form(self, block: str = Y) -> "Polynomial":
        """Sum of the terms of maximal degree in ``block``."""
        sl = self.space.block_slice(block)
        top = self.block_degree(block)
        return Polynomial(self.space, {m: c for m, c in self._terms.items() if sum(m[sl]) == top})

    def homogenize_block(self, block: str = Y, new_var: str = "y0") -> "Polynomial":
        """Homogenise in ``block`` with a fresh variable placed first in that block.

        The result is homogeneous of degree ``block_degree(block)`` in the
        extended block and reduces to ``self`` when the new variable is 1.
        """
        if self.space.block_size(block) == 0:
            raise ValueError(f"cannot homogenise: the {block} block is empty")
        sp = self.space
        if block == Y:
            new_space = Space(sp.x, (new_var,) + sp.y)
            insert_at = sp.nx
        else:
            new_space = Space((new_var,) + sp.x, sp.y)
            insert_at = 0
        sl = sp.block_slice(block)
        d = self.block_degree(block)
        out = {}
        for mono, c in self._terms.items():
            e0 = d - sum(mono[sl])
            out[mono[:insert_at] + (e0,) + mono[insert_at:]] = c
        return Polynomial(new_space, out)

    def coefficient_norm(self) -> float:
        """``max |c_a| / multinomial(|a|, a)`` over all terms."""
        return max((abs(c) / multinomial(m) for m, c in self._terms.items()), default=0.0)

    # serialisation ---------------------------------------------------------------
    def to_records(self, block: str | None = None) -> list[dict]:
        if block is None:
            items = self._terms.items()
        else:
            items = self.block_terms(block).items()
        return [
            {"exponents": list(m), "coeff": c}
            for m, c in sorted(items, key=lambda mc: grlex_key(mc[0]))
        ]


def perturbation_polynomial(space: Space, r: int, tau: float) -> Polynomial:
    """``sum_i (x_i / tau)^(2r)`` over the x block."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if not tau > 0:
        raise ValueError("tau must be positive")
    scale = float(tau) ** (-2 * r)
    terms = {}
    for i in range(space.nx):
        e = [0] * space.nvars
        e[i] = 2 * r
        terms[tuple(e)] = scale
    return Polynomial(space, terms)


def block_degree(poly: Polynomial, block: str) -> int:
    return poly.block_degree(block)


def homogenize_block(poly: Polynomial, block: str = Y) -> Polynomial:
    return poly.homogenize_block(block)


def highest_degree_form(poly: Polynomial, block: str = Y) -> Polynomial:
    return poly.highest_degree_form(block)


def coefficient_norm(poly: Polynomial) -> float:
    return poly.coefficient_norm()


def evaluate(poly: Polynomial, point: Sequence[float]) -> float:
    return poly.evaluate(point)


def dehomogenize(poly: Polynomial, block: str = Y) -> Polynomial:
    """Set the first variable of ``block`` to 1 and drop it from the space."""
    sp = poly.space
    if block == Y:
        idx = sp.nx
        new_space = Space(sp.x, sp.y[1:])
    else:
        idx = 0
        new_space = Space(sp.x[1:], sp.y)
    out: dict[Monomial, float] = {}
    for mono, c in poly.items():
        m = mono[:idx] + mono[idx + 1:]
        out[m] = out.get(m, 0.0) + c
    return Polynomial(new_space, out)


def sum_polys(polys: Iterable[Polynomial], space: Space) -> Polynomial:
    out: dict[Monomial, float] = {}
    for p in polys:
        for m, c in p.items():
            out[m] = out.get(m, 0.0) + c
    return Polynomial(space, out)
