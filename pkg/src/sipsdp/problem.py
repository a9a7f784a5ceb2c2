"""Semi-infinite polynomial program instances.

An instance is ``min f(x)  s.t.  p(x, y) >= 0  for all y in S`` where
``S = {y : g_j(y) >= 0}``.  All polynomials share one :class:`Space`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .poly import X, Y, Polynomial, Space

MODES = ("auto", "general", "sosconvex")


class PreconditionError(ValueError):
    """A degree or mode requirement of a relaxation is not met."""


def half_up(d: int) -> int:
    return (d + 1) // 2


@dataclass(frozen=True)
class SipProblem:
    f: Polynomial
    p: Polynomial
    generators: tuple[Polynomial, ...] = ()
    tau: float | None = None
    mode: str = "auto"
    box: tuple[tuple[float, float], ...] | None = None  # bounding box of S for grids
    name: str = ""
    options: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        space = self.p.space
        if self.f.space != space or any(g.space != space for g in self.generators):
            raise ValueError("f, p and the generators must share one variable space")
        if self.f.depends_on(Y):
            raise ValueError("the objective must not depend on y")
        for j, g in enumerate(self.generators):
            if g.depends_on(X):
                raise ValueError(f"generator {j} depends on x")
        if space.nx == 0:
            raise ValueError("need at least one x variable")
        if self.tau is not None and not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.box is not None:
            box = tuple((float(lo), float(hi)) for lo, hi in self.box)
            if len(box) != space.ny:
                raise ValueError("box needs one interval per y variable")
            object.__setattr__(self, "box", box)

    @property
    def space(self) -> Space:
        return self.p.space

    @property
    def m(self) -> int:
        return self.space.nx

    @property
    def n(self) -> int:
        return self.space.ny

    # derived degrees are recomputed on every access
    @property
    def d_x(self) -> int:
        return self.p.block_degree(X)

    @property
    def d_y(self) -> int:
        return self.p.block_degree(Y)

    @property
    def d_S(self) -> int:
        return max((half_up(g.block_degree(Y)) for g in self.generators), default=0)

    @property
    def d_K(self) -> int:
        return max(half_up(self.d_y), self.d_S)

    @property
    def d_P(self) -> int:
        return max(self.f.degree(), self.d_x)

    def degrees(self) -> dict[str, int]:
        return {"d_x": self.d_x, "d_y": self.d_y, "d_S": self.d_S, "d_K": self.d_K, "d_P": self.d_P}

    @property
    def univariate_interval_mode(self) -> bool:
        """One y variable and ``S`` given exactly by ``1 - y^2 >= 0``."""
        if self.n != 1 or len(self.generators) != 1:
            return False
        g = self.generators[0].block_terms(Y)
        return set(g) == {(0,), (2,)} and np.isclose(g[(0,)], 1.0) and np.isclose(g[(2,)], -1.0)

    def generator_terms(self) -> list[dict]:
        return [g.block_terms(Y) for g in self.generators]

    def bounding_box(self) -> np.ndarray:
        if self.box is not None:
            return np.array(self.box, dtype=float)
        return np.array([[-1.0, 1.0]] * self.n)

    def with_tau(self, tau: float | None) -> "SipProblem":
        return replace(self, tau=tau)

    def with_mode(self, mode: str) -> "SipProblem":
        return replace(self, mode=mode)

    def require_tau(self) -> float:
        if self.tau is None:
            raise PreconditionError("tau_K is required in general mode; set it in the problem")
        return float(self.tau)
