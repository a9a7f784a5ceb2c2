"""Reference instances: the worked examples and small synthetic problems.

Every builder returns a :class:`SipProblem` on the space ``x = (x1, x2)``
(or ``(x1,)``) and the stated ``y`` block.
"""

from __future__ import annotations

from fractions import Fraction as Fr

from .poly import Polynomial, Space
from .problem import SipProblem

XY2 = Space(("x1", "x2"), ("y1", "y2"))


def _vars(space: Space) -> dict[str, Polynomial]:
    return dict(zip(space.names, space.gens()))


# Convex but not s.o.s-convex sextic (shifted and scaled below).
_SEXTIC = {
    (0, 0): 89, (4, 1): -363, (0, 6): Fr(51531, 64), (0, 5): Fr(-9005, 4),
    (0, 4): Fr(49171, 16), (2, 0): 721, (0, 3): -2060, (3, 0): -14, (0, 2): Fr(3817, 4),
    (4, 0): 363, (5, 0): -9, (6, 0): 77, (1, 1): 316, (1, 3): 49, (2, 1): -2550,
    (1, 2): -968, (1, 4): 1710, (3, 1): 794, (2, 2): Fr(7269, 2), (5, 1): Fr(-301, 2),
    (4, 2): Fr(2143, 4), (3, 3): Fr(1671, 2), (2, 4): Fr(14901, 16), (1, 5): Fr(-1399, 2),
    (3, 2): Fr(-3825, 2), (2, 3): Fr(-4041, 2), (0, 1): -364, (1, 0): 48,
}

# Ternary octic form, convex in (x1, x2) at x3 = 1 but not s.o.s-convex.
_OCTIC = {
    (8, 0, 0): 32, (6, 2, 0): 118, (6, 0, 2): 40, (4, 4, 0): 25, (4, 2, 2): -43,
    (4, 0, 4): -35, (2, 4, 2): 3, (2, 2, 4): -16, (2, 0, 6): 24, (0, 8, 0): 16,
    (0, 6, 2): 44, (0, 4, 4): 70, (0, 2, 6): 60, (0, 0, 8): 30,
}

# Radius bounds of the rotated-octic set.  A 401 x 401 sweep of [-2, 2]^2
# puts the set inside [-0.76, 0.76]^2 with max norm ~1.02; both bounds are
# valid and are used to check that results do not depend on the choice.
OCTIC_TAU = 1.1
OCTIC_TAU_ALT = 1.5


def quarter_circle(space: Space) -> tuple[Polynomial, ...]:
    v = _vars(space)
    y1, y2 = v["y1"], v["y2"]
    sphere = 1 - y1 ** 2 - y2 ** 2
    return (y1, y2, sphere, -sphere)


def octic_constraint(space: Space = XY2) -> Polynomial:
    """``100 - F(y1 x1 - y2 x2, y2 x1 + y1 x2, 1)``."""
    v = _vars(space)
    x1, x2, y1, y2 = v["x1"], v["x2"], v["y1"], v["y2"]
    u = y1 * x1 - y2 * x2
    w = y2 * x1 + y1 * x2
    one = Polynomial.constant(space, 1.0)
    f3 = Space(("a", "b", "c"), ())
    form = Polynomial(f3, {k: float(c) for k, c in _OCTIC.items()})
    return 100 - form.compose([u, w, one], space)


def shifted_sextic(space: Space = XY2) -> Polynomial:
    """``f~(x1 - 1, x2 - 1) / 10000``."""
    v = _vars(space)
    s2 = Space(("a", "b"), ())
    base = Polynomial(s2, {k: float(c) for k, c in _SEXTIC.items()})
    return base.compose([v["x1"] - 1, v["x2"] - 1], space) / 10000.0


def rotated_octic_set(tau: float = OCTIC_TAU, mode: str = "general") -> SipProblem:
    """The rotated-octic feasible set with a zero objective."""
    return SipProblem(Polynomial.zero(XY2), octic_constraint(), quarter_circle(XY2), tau=tau,
                      mode=mode, box=((0.0, 1.0), (0.0, 1.0)), name="rotated-octic-set")


def rotated_octic_program(tau: float = OCTIC_TAU) -> SipProblem:
    """Minimize the shifted sextic over the rotated-octic set (d_P = 8)."""
    return SipProblem(shifted_sextic(), octic_constraint(), quarter_circle(XY2), tau=tau,
                      mode="general", box=((0.0, 1.0), (0.0, 1.0)), name="rotated-octic-program")


def quadratic_family_constraint(space: Space = XY2) -> Polynomial:
    v = _vars(space)
    x1, x2, y1, y2 = v["x1"], v["x2"], v["y1"], v["y2"]
    return -x1 ** 2 - 2 * y2 * x1 * x2 - y1 * x2 ** 2 - x1 - x2


def parabolic_index_set(space: Space = XY2) -> tuple[Polynomial, ...]:
    v = _vars(space)
    y1, y2 = v["y1"], v["y2"]
    return (1 - y1, 0.5 - y2, y2 + 0.5, y1 - y2 ** 2)


# The set lies in the disk centered at (-1/2, -1/2) of radius sqrt(1/2)
# (the y = (1, 0) constraint), so its norm is at most sqrt(2).
QUADRATIC_FAMILY_TAU = 1.5


def quadratic_family_set(mode: str = "general") -> SipProblem:
    return SipProblem(Polynomial.zero(XY2), quadratic_family_constraint(), parabolic_index_set(),
                      tau=QUADRATIC_FAMILY_TAU, mode=mode, box=((0.0, 1.0), (-0.5, 0.5)),
                      name="quadratic-family-set")


def quadratic_family_program(mode: str = "auto") -> SipProblem:
    """Squared distance to ``(1, 0)`` over the quadratic-family set."""
    v = _vars(XY2)
    f = (v["x1"] - 1) ** 2 + v["x2"] ** 2
    return SipProblem(f, quadratic_family_constraint(), parabolic_index_set(),
                      tau=QUADRATIC_FAMILY_TAU, mode=mode, box=((0.0, 1.0), (-0.5, 0.5)),
                      name="quadratic-family-program")


def cylinder_program(mode: str = "auto") -> SipProblem:
    """Min ``x1^2 + x2^2`` with an index set whose lower-level minimizers form a continuum.

    The feasible set is ``{x1 + x2 >= 1, x2 <= 1}`` and the minimizer is ``(1/2, 1/2)``.
    """
    sp = Space(("x1", "x2"), ("y1", "y2", "y3"))
    v = _vars(sp)
    x1, x2, y1, y2, y3 = (v[k] for k in ("x1", "x2", "y1", "y2", "y3"))
    p = (x1 + x2 - 1) * (y1 ** 2 + y2 ** 2) + (x2 - 1) * (y3 ** 2 - 1)
    gens = (1 - y1 ** 2 - y2 ** 2, 1 - y3 ** 2)
    return SipProblem(x1 ** 2 + x2 ** 2, p, gens, tau=None, mode=mode, name="cylinder-program")


# -- small synthetic instances -------------------------------------------------

X1Y = Space(("x1",), ("y",))


def halfline(objective: str = "linear", tau: float = 2.0, mode: str = "general") -> SipProblem:
    """``x1 - y >= 0`` for ``y`` in ``[-1, 1]``, i.e. ``K = {x1 >= 1}``; ``f* = 1``."""
    x1, y = X1Y.gens()
    f = x1 if objective == "linear" else x1 ** 2
    return SipProblem(f, x1 - y, (1 - y ** 2,), tau=tau, mode=mode, name=f"halfline-{objective}")


def vacuous(tau: float = 1.0) -> SipProblem:
    """``p = 1``: every ``x`` is feasible; ``f = x1^2`` has ``f* = 0``."""
    x1, y = X1Y.gens()
    return SipProblem(x1 ** 2, Polynomial.constant(X1Y, 1.0), (1 - y ** 2,), tau=tau,
                      mode="general", name="vacuous")


XY1 = Space(("x1", "x2"), ("y",))


def disk_lens(mode: str = "auto", tau: float = 1.5) -> SipProblem:
    """``(x1 - y)^2 + x2^2 <= 9/4`` for all ``y`` in ``[-1, 1]``; min distance^2 to ``(2, 0)``.

    ``f* = 9/4`` at ``(1/2, 0)``.
    """
    x1, x2, y = XY1.gens()
    p = 2.25 - (x1 - y) ** 2 - x2 ** 2
    f = (x1 - 2) ** 2 + x2 ** 2
    return SipProblem(f, p, (1 - y ** 2,), tau=tau, mode=mode, name="disk-lens")


def wedge(mode: str = "auto", tau: float = 3.0) -> SipProblem:
    """``x1 + y x2 >= 1`` for ``y`` in ``[-1, 1]``, i.e. ``x1 - |x2| >= 1``.

    ``f = x1^2 + x2^2`` has ``f* = 1`` at ``(1, 0)``.
    """
    x1, x2, y = XY1.gens()
    return SipProblem(x1 ** 2 + x2 ** 2, x1 + y * x2 - 1, (1 - y ** 2,), tau=tau, mode=mode,
                      name="wedge")


def parabola_band(mode: str = "auto", tau: float = 2.0) -> SipProblem:
    """``1 - x1^2 - x2^2 y^2 + x2 >= 0`` for ``y`` in ``[-1, 1]``; ``d_y = 2``.

    The binding index is ``|y| = 1``, giving ``K = {x1^2 + x2^2 - x2 <= 1}``;
    ``f = (x1 - 2)^2`` has ``f* = (2 - sqrt(5)/2)^2`` at ``(sqrt(5)/2, 1/2)``.
    """
    x1, x2, y = XY1.gens()
    p = 1 - x1 ** 2 - x2 ** 2 * y ** 2 + x2
    return SipProblem((x1 - 2) ** 2, p, (1 - y ** 2,), tau=tau, mode=mode, name="parabola-band")


def univariate_instances() -> list[tuple[SipProblem, float]]:
    """S.o.s-convex instances over ``S = [-1, 1]`` with known optimal values."""
    return [
        (halfline("square", tau=2.0, mode="sosconvex"), 1.0),
        (disk_lens(mode="sosconvex"), 2.25),
        (wedge(mode="sosconvex"), 1.0),
        (parabola_band(mode="sosconvex"), (2 - 5 ** 0.5 / 2) ** 2),
    ]
