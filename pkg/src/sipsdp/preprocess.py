"""Homogenization of the index set, Slater checks and a grid discretization oracle."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import grid as gridmod
from .linform import add_localizing_block, apply_moments, moment_variables
from .poly import X, Y, Polynomial, Space, monomial_basis
from .problem import SipProblem, half_up
from .sdp import SdpBuilder, Settings, solve
from .sos import SolverError, qmodule_membership

GENERIC_CAVEAT = ("K_tilde is contained in K; equality holds when the index set is closed "
                  "at infinity, which is the generic case and is not verified here")


def _sphere_pair(space: Space, block_vars: Sequence[Polynomial]) -> tuple[Polynomial, Polynomial]:
    norm2 = Polynomial.zero(space)
    for v in block_vars:
        norm2 = norm2 + v * v
    return 1 - norm2, norm2 - 1


@dataclass(frozen=True)
class HomogenizedInstance:
    p_hom: Polynomial  # extended y block (y0, y1, ..., yn)
    f: Polynomial  # objective embedded in the extended space
    s_tilde: tuple[Polynomial, ...]  # g_j^hom, y0, 1 - |y~|^2, |y~|^2 - 1
    p_hat: Polynomial  # top y-degree form of p, original space
    s_hat: tuple[Polynomial, ...]  # top forms of g_j, 1 - |y|^2, |y|^2 - 1
    source: SipProblem

    def to_problem(self) -> SipProblem:
        """The compact-index instance on the sphere."""
        n1 = self.p_hom.space.ny
        return SipProblem(self.f, self.p_hom, self.s_tilde, tau=self.source.tau,
                          mode=self.source.mode, box=tuple([(-1.0, 1.0)] * n1),
                          name=f"{self.source.name}-homogenized" if self.source.name else "homogenized",
                          options=dict(self.source.options))


def _fresh_name(space: Space) -> str:
    name = "y0"
    while name in space.names:
        name = "_" + name
    return name


def homogenize_instance(prob: SipProblem) -> HomogenizedInstance:
    """Lift the index set to ``{y0 >= 0, |(y0, y)| = 1}`` with homogenized data."""
    new = _fresh_name(prob.space)
    p_hom = prob.p.homogenize_block(Y, new)
    space = p_hom.space
    gens_hom = [g.homogenize_block(Y, new).embed(space) for g in prob.generators]
    y_ext = [Polynomial.variable(space, name) for name in space.y]
    y0 = y_ext[0]
    s_tilde = tuple(gens_hom) + (y0,) + _sphere_pair(space, y_ext)
    p_hat = prob.p.highest_degree_form(Y)
    y_orig = [Polynomial.variable(prob.space, name) for name in prob.space.y]
    s_hat = tuple(g.highest_degree_form(Y) for g in prob.generators) + _sphere_pair(prob.space, y_orig)
    return HomogenizedInstance(p_hom, prob.f.embed(space), s_tilde, p_hat, s_hat, prob)


# -- Slater checks ---------------------------------------------------------------------

@dataclass
class SlaterResult:
    margin: float  # min of p(u, y) over the grid of S
    grid_points: int
    verified_at_grid: bool
    certified_lower_bound: float | None = None

    def to_dict(self) -> dict:
        return {"margin": self.margin, "grid_points": self.grid_points,
                "verified_at_grid_resolution": self.verified_at_grid,
                "certified_lower_bound": self.certified_lower_bound}


def certified_lower_bound(prob: SipProblem, u: Sequence[float], t: int, upper: float,
                          iters: int = 20, settings: Settings | None = None) -> float | None:
    """Largest ``delta`` found by bisection with ``p(u, .) - delta`` in the order-``t`` module.

    ``None`` when even ``delta = 0`` has no certificate.
    """
    psi = prob.p.partial_evaluate(X, np.asarray(u, dtype=float))
    gens = prob.generators

    def ok(delta: float) -> bool:
        return qmodule_membership(psi - delta, gens, t, Y, settings) is not None

    lo = 0.0
    if not ok(lo):
        return None
    hi = upper
    if ok(hi):
        return hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def slater_margin(prob: SipProblem, u: Sequence[float], grid_density: int = gridmod.DEFAULT_DENSITY,
                  certify_order: int | None = None, settings: Settings | None = None) -> SlaterResult:
    """Min of ``p(u, y)`` over a grid of ``S``; positive means Slater at grid resolution.

    With ``certify_order`` also bisect for a certified positive lower bound.
    """
    ygrid = gridmod.sample_set(prob.generator_terms(), prob.n, prob.bounding_box(), grid_density)
    margin = gridmod.min_over_grid(prob.p, u, ygrid)
    bound = None
    if certify_order is not None and margin > 0:
        t = max(certify_order, prob.d_K)
        bound = certified_lower_bound(prob, u, t, margin, settings=settings)
    return SlaterResult(margin, len(ygrid), margin > 0, bound)


@dataclass
class ExtendedSlaterResult:
    margin_S: float
    margin_hat: float
    hat_set_empty: bool  # no grid point of S_hat: the second condition holds vacuously
    verified_at_grid: bool

    def to_dict(self) -> dict:
        return {"margin_S": self.margin_S,
                "margin_hat": None if np.isinf(self.margin_hat) else self.margin_hat,
                "hat_set_empty_on_grid": self.hat_set_empty,
                "verified_at_grid_resolution": self.verified_at_grid}


def extended_slater_check(prob: SipProblem, u: Sequence[float],
                          grid_density: int = gridmod.DEFAULT_DENSITY) -> ExtendedSlaterResult:
    """Slater margins of ``p`` on ``S`` and of its top form on the sphere slice ``S_hat``."""
    m_s = slater_margin(prob, u, grid_density).margin
    hom = homogenize_instance(prob)
    try:
        hat_grid = gridmod.sample_set([g.block_terms(Y) for g in hom.s_hat], prob.n,
                                      np.array([[-1.0, 1.0]] * prob.n), grid_density)
        m_hat = gridmod.min_over_grid(hom.p_hat, u, hat_grid)
        empty = False
    except gridmod.EmptyGridError:
        m_hat, empty = float("inf"), True
    return ExtendedSlaterResult(m_s, m_hat, empty, bool(m_s > 0 and m_hat > 0))


# -- discretization oracle -------------------------------------------------------------------

@dataclass
class OracleResult:
    value: float
    minimizer: np.ndarray
    status: str
    constraints: int

    def to_dict(self) -> dict:
        return {"value": self.value, "minimizer": self.minimizer.tolist(), "status": self.status,
                "constraints": self.constraints}


def discretization_oracle(prob: SipProblem, grid_density: int = gridmod.DEFAULT_DENSITY,
                          ygrid: np.ndarray | None = None,
                          settings: Settings | None = None) -> OracleResult:
    """Min ``L(f)`` over moment functionals with ``L(p(., y_i)) >= 0`` at grid points ``y_i``.

    Uses only pointwise linear constraints, no quadratic-module certificates.
    The moment order is ``ceil(d_P / 2)``, exact for s.o.s-convex data; a
    radius constraint ``L(|x|^2) <= tau^2`` is added when ``tau`` is known.
    """
    if ygrid is None:
        ygrid = gridmod.sample_set(prob.generator_terms(), prob.n, prob.bounding_box(), grid_density)
    m = prob.m
    k = max(1, half_up(prob.d_P))
    b = SdpBuilder()
    lvars = moment_variables(b, "L", m, 2 * k)
    add_localizing_block(b, "ML", lvars, m, k)
    b.add_eq({lvars[(0,) * m]: 1.0}, 1.0)
    if prob.tau is not None:
        sq = {tuple(2 if j == i else 0 for j in range(m)): 1.0 for i in range(m)}
        b.add_le(apply_moments(sq, lvars), float(prob.tau) ** 2)
    parts = prob.p.split(X)
    monos = list(parts)
    cmat = np.zeros((len(monos), len(ygrid)))
    for i, mono in enumerate(monos):
        c = parts[mono]
        cmat[i] = gridmod.constraint_matrix(c, np.zeros((1, m)), ygrid)[0]
    rows = np.unique(np.round(cmat.T, 12), axis=0)
    for row in rows:
        expr = {}
        for mono, c in zip(monos, row):
            if c != 0.0:
                expr[lvars[mono]] = expr.get(lvars[mono], 0.0) + float(c)
        if expr:
            b.add_ge(expr, 0.0)
    b.set_objective(apply_moments(prob.f.block_terms(X), lvars))
    report = solve(b.build(), settings)
    if report.status == "infeasible":
        raise ValueError("the discretized program is infeasible")
    if not report.ok:
        raise SolverError(f"oracle: backend status {report.status} ({report.message})", report)
    point = np.array([report.scalar_values[lvars[mono]] for mono in monomial_basis(m, 1)[1:]])
    return OracleResult(report.primal_value, point, report.status, len(rows))
