"""Polynomials whose coefficients are linear in SDP variables.

Shared plumbing for the SOS and moment builders: Gram-matrix polynomials,
moment variables, and moment/localizing blocks tied to them.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Mapping, Sequence

from .poly import Monomial, monomial_basis
from .sdp.problem import Key, SdpBuilder


def _add(a: Sequence[int], b: Sequence[int]) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


class LinPoly:
    """``sum_m (sum_k coef[m][k] * var_k + const[m]) * x^m``."""

    def __init__(self):
        self.terms: dict[Monomial, dict[Key, float]] = defaultdict(dict)
        self.const: dict[Monomial, float] = defaultdict(float)

    def add_var(self, mono: Monomial, key: Key, coef: float = 1.0) -> None:
        row = self.terms[tuple(mono)]
        row[key] = row.get(key, 0.0) + coef

    def add_poly(self, coeffs: Mapping[Monomial, float], scale: float = 1.0) -> None:
        for m, c in coeffs.items():
            self.const[tuple(m)] += scale * c

    def add_scaled_poly(self, coeffs: Mapping[Monomial, float], key: Key, scale: float = 1.0) -> None:
        """Add ``scale * var * poly``."""
        for m, c in coeffs.items():
            self.add_var(m, key, scale * c)

    def add_gram(self, block: str, basis: Sequence[Monomial],
                 mult: Mapping[Monomial, float] | None = None, scale: float = 1.0) -> None:
        """Add ``scale * mult * b' X b`` where ``X`` is the PSD block ``block``."""
        mult = mult if mult is not None else {(0,) * len(basis[0]): 1.0}
        for i, a in enumerate(basis):
            for j in range(i, len(basis)):
                ab = _add(a, basis[j])
                factor = scale * (1.0 if i == j else 2.0)
                for g, c in mult.items():
                    self.add_var(_add(ab, g), (block, i, j), factor * c)

    def monomials(self) -> set[Monomial]:
        return set(self.terms) | {m for m, c in self.const.items() if c != 0.0}

    def equate_zero(self, builder: SdpBuilder, monomials=None) -> None:
        """Constrain every coefficient to vanish."""
        for m in sorted(monomials if monomials is not None else self.monomials()):
            builder.add_eq(dict(self.terms.get(m, {})), -self.const.get(m, 0.0))


def moment_variables(builder: SdpBuilder, prefix: str, n: int, degree: int,
                     nonneg: bool = False) -> dict[Monomial, str]:
    """One scalar per monomial of degree ``<= degree``."""
    out = {}
    for i, m in enumerate(monomial_basis(n, degree)):
        name = f"{prefix}[{i}]"
        (builder.add_nonneg if nonneg else builder.add_free)(name)
        out[m] = name
    return out


def add_localizing_block(builder: SdpBuilder, name: str, mvars: Mapping[Monomial, str],
                         n: int, half: int, mult: Mapping[Monomial, float] | None = None) -> list[Monomial]:
    """PSD block equal to the localizing matrix of ``mult`` (moment matrix if None).

    ``half`` is the degree of the row basis.  Returns the row basis.
    """
    rows = monomial_basis(n, half)
    mult = mult if mult is not None else {(0,) * n: 1.0}
    builder.add_block(name, len(rows))
    for i, a in enumerate(rows):
        for j in range(i, len(rows)):
            ab = _add(a, rows[j])
            expr: dict[Key, float] = {(name, i, j): 1.0}
            for g, c in mult.items():
                key = mvars[_add(ab, g)]
                expr[key] = expr.get(key, 0.0) - c
            builder.add_eq(expr, 0.0)
    return rows


def apply_moments(coeffs: Mapping[Monomial, float], mvars: Mapping[Monomial, str]) -> dict[Key, float]:
    """Linear expression ``L(poly)`` for a functional with scalar moments ``mvars``."""
    out: dict[Key, float] = {}
    for m, c in coeffs.items():
        key = mvars[tuple(m)]
        out[key] = out.get(key, 0.0) + c
    return out
