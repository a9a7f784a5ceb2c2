"""SDP relaxations of semi-infinite polynomial programs.

Two hierarchies are built here:

* the general pair, indexed by ``(r, t)``: a moment functional ``L`` on
  ``x``-polynomials of degree ``2r`` whose image ``L(p)`` must lie in the
  truncated quadratic module of the index set (the minimizing side, "dsdp"),
  and its dual with scalars ``rho``, ``eta``, a functional ``H`` on
  ``y``-polynomials and an SOS term in ``x`` (the maximizing side, "psdp");
* the s.o.s-convex pair, indexed by ``t`` only, where ``L`` is truncated at
  ``d_P`` and no perturbation term is needed.

The same constraint set with the objective replaced by a linear function of
``L(x)`` gives the outer approximations used for membership and support
queries.

SDP naming: moment scalars ``L[i]`` / ``H[i]`` (index into the grlex basis),
moment blocks ``ML`` / ``MH``, localizing blocks ``LH{j}``, quadratic-module
Gram blocks ``sigma{j}`` (``sigma0`` for the constant generator), the SOS
block ``Q`` and scalars ``rho``, ``eta``.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import grid as gridmod
from .linform import LinPoly, add_localizing_block, apply_moments, moment_variables
from .moments import (
    DEFAULT_RANK_TOL,
    Atom,
    ExtractionError,
    FlatnessResult,
    MomentVector,
    atoms_in_set,
    extract_atoms,
    flat_extension_check,
)
from .poly import X, Y, Monomial, Polynomial, monomial_basis, perturbation_polynomial
from .problem import PreconditionError, SipProblem, half_up
from .sdp import SdpBuilder, SdpProblem, Settings, SolveReport, solve
from .sos import SolverError, is_sos_convex

KINDS = ("dsdp", "psdp", "sosconvex-dsdp", "sosconvex-psdp")
STAGNATION_TOL = 1e-5


# -- degree checks -----------------------------------------------------------------

def _check_general(prob: SipProblem, r: int, t: int, need: int) -> None:
    if r < need:
        raise PreconditionError(f"r = {r} is below the minimum {need}")
    if t < prob.d_K:
        raise PreconditionError(f"t = {t} < d_K = {prob.d_K}")


def _check_t(prob: SipProblem, t: int) -> None:
    if t < prob.d_K:
        raise PreconditionError(f"t = {t} < d_K = {prob.d_K}")


# -- shared pieces ------------------------------------------------------------------

def _add_qmodule_match(b: SdpBuilder, prob: SipProblem, lvars: dict[Monomial, str], t: int) -> None:
    """``L(p) = sum_j g_j sigma_j`` coefficient-wise in ``y``, ``deg(g_j sigma_j) <= 2t``."""
    n = prob.n
    lp = LinPoly()
    for xmono, coeff in prob.p.split(X).items():
        key = lvars[xmono]
        for ymono, c in coeff.block_terms(Y).items():
            lp.add_var(ymono, key, c)
    top = max((sum(m) for m in lp.terms), default=0)
    if top > 2 * t:
        raise PreconditionError(f"L(p) has y-degree {top} > 2t = {2 * t}")
    gens = [{(0,) * n: 1.0}] + prob.generator_terms()
    for j, g in enumerate(gens):
        half = t - half_up(max((sum(m) for m in g), default=0))
        if half < 0:
            raise PreconditionError(f"generator {j} has degree above 2t = {2 * t}")
        basis = monomial_basis(n, half)
        b.add_block(f"sigma{j}", len(basis))
        lp.add_gram(f"sigma{j}", basis, g, scale=-1.0)
    lp.equate_zero(b)


def _add_functional(b: SdpBuilder, prob: SipProblem, degree: int, theta_orders: Sequence[int],
                    t: int) -> dict[Monomial, str]:
    """Moment functional ``L`` of the given degree with the outer-approximation constraints."""
    m = prob.m
    lvars = moment_variables(b, "L", m, degree)
    add_localizing_block(b, "ML", lvars, m, degree // 2)
    b.add_eq({lvars[(0,) * m]: 1.0}, 1.0)
    if theta_orders:
        tau = prob.require_tau()
        for k in theta_orders:
            theta = perturbation_polynomial(prob.space, k, tau).block_terms(X)
            b.add_le(apply_moments(theta, lvars), 1.0)
    _add_qmodule_match(b, prob, lvars, t)
    return lvars


def _theta_orders(prob: SipProblem, r: int, all_orders: bool) -> list[int]:
    if all_orders:
        return list(range(max(1, half_up(prob.d_x)), r + 1))
    return [r]


# -- builders -----------------------------------------------------------------------

def build_dsdp(prob: SipProblem, r: int, t: int) -> SdpProblem:
    """Minimize ``L(f)`` over the general outer approximation at ``(r, t)``."""
    _check_general(prob, r, t, half_up(prob.d_P))
    b = SdpBuilder()
    lvars = _add_functional(b, prob, 2 * r, [r], t)
    b.set_objective(apply_moments(prob.f.block_terms(X), lvars))
    return b.build()


def build_sosconvex_dsdp(prob: SipProblem, t: int) -> SdpProblem:
    """Minimize ``L(f)`` with ``L`` truncated at ``d_P`` (no perturbation term)."""
    _check_t(prob, t)
    b = SdpBuilder()
    lvars = _add_functional(b, prob, prob.d_P, [], t)
    b.set_objective(apply_moments(prob.f.block_terms(X), lvars))
    return b.build()


def _add_psdp_body(b: SdpBuilder, prob: SipProblem, t: int, q_half: int) -> LinPoly:
    """``f - H(p) - q^2`` with ``H`` in the dual cone of the quadratic module."""
    n, m = prob.n, prob.m
    hvars = moment_variables(b, "H", n, 2 * t)
    add_localizing_block(b, "MH", hvars, n, t)
    for j, g in enumerate(prob.generator_terms(), start=1):
        half = t - half_up(max((sum(mm) for mm in g), default=0))
        if half < 0:
            raise PreconditionError(f"generator {j} has degree above 2t = {2 * t}")
        add_localizing_block(b, f"LH{j}", hvars, n, half, g)
    lp = LinPoly()
    lp.add_poly(prob.f.block_terms(X))
    for ymono, coeff in prob.p.split(Y).items():
        key = hvars[ymono]
        for xmono, c in coeff.block_terms(X).items():
            lp.add_var(xmono, key, -c)
    basis = monomial_basis(m, q_half)
    b.add_block("Q", len(basis))
    lp.add_gram("Q", basis, scale=-1.0)
    b.add_free("rho")
    lp.add_var((0,) * m, "rho", -1.0)
    return lp


def build_psdp(prob: SipProblem, r: int, t: int) -> SdpProblem:
    """Maximize ``rho - 2 eta`` s.t. ``f - rho + eta (1 + Theta_r) - H(p)`` is SOS."""
    _check_general(prob, r, t, half_up(prob.d_P))
    b = SdpBuilder()
    lp = _add_psdp_body(b, prob, t, r)
    b.add_nonneg("eta")
    lp.add_var((0,) * prob.m, "eta", 1.0)
    theta = perturbation_polynomial(prob.space, r, prob.require_tau()).block_terms(X)
    lp.add_scaled_poly(theta, "eta", 1.0)
    lp.equate_zero(b)
    b.set_objective({"rho": 1.0, "eta": -2.0}, sense="max")
    return b.build()


def build_sosconvex_psdp(prob: SipProblem, t: int) -> SdpProblem:
    """Maximize ``rho`` s.t. ``f - rho - H(p)`` is SOS of degree ``<= 2 floor(d_P / 2)``."""
    _check_t(prob, t)
    b = SdpBuilder()
    lp = _add_psdp_body(b, prob, t, prob.d_P // 2)
    lp.equate_zero(b)
    b.set_objective({"rho": 1.0}, sense="max")
    return b.build()


def build_relaxation(prob: SipProblem, kind: str, r: int | None, t: int) -> SdpProblem:
    if kind == "dsdp":
        return build_dsdp(prob, r, t)
    if kind == "psdp":
        return build_psdp(prob, r, t)
    if kind == "sosconvex-dsdp":
        return build_sosconvex_dsdp(prob, t)
    if kind == "sosconvex-psdp":
        return build_sosconvex_psdp(prob, t)
    raise ValueError(f"unknown relaxation {kind!r}; expected one of {KINDS}")


# -- outer approximation queries ------------------------------------------------------

def build_lambda(prob: SipProblem, r: int, t: int, direction: Sequence[float] | None = None,
                 point: Sequence[float] | None = None, all_theta: bool = False) -> SdpProblem:
    """The set of ``L(x)`` over the outer-approximation constraints at ``(r, t)``.

    With ``point`` the SDP is the membership feasibility problem; with
    ``direction`` it maximizes ``direction . L(x)``.
    """
    _check_general(prob, r, t, max(1, half_up(prob.d_x)))
    b = SdpBuilder()
    lvars = _add_functional(b, prob, 2 * r, _theta_orders(prob, r, all_theta), t)
    firsts = monomial_basis(prob.m, 1)[1:]
    if point is not None:
        point = np.asarray(point, dtype=float).ravel()
        if point.size != prob.m:
            raise ValueError("point length must equal the number of x variables")
        for mono, v in zip(firsts, point):
            b.add_eq({lvars[mono]: 1.0}, float(v))
    if direction is not None:
        a = np.asarray(direction, dtype=float).ravel()
        if a.size != prob.m:
            raise ValueError("direction length must equal the number of x variables")
        b.set_objective({lvars[mono]: float(c) for mono, c in zip(firsts, a)}, sense="max")
    return b.build()


def _first_moments(report: SolveReport, m: int) -> np.ndarray:
    return np.array([report.scalar_values[f"L[{i}]"] for i in range(1, m + 1)])


def membership_sdp(prob: SipProblem, point: Sequence[float], r: int, t: int,
                   all_theta: bool = False, settings: Settings | None = None) -> bool:
    """Whether ``point`` lies in the outer approximation at ``(r, t)``."""
    report = solve(build_lambda(prob, r, t, point=point, all_theta=all_theta), settings)
    if report.ok:
        return True
    if report.status == "infeasible":
        return False
    raise SolverError(f"membership: backend status {report.status} ({report.message})", report)


@dataclass
class SupportResult:
    value: float
    point: np.ndarray
    status: str


def support_value(prob: SipProblem, direction: Sequence[float], r: int, t: int,
                  all_theta: bool = False, settings: Settings | None = None) -> SupportResult:
    """``max direction . L(x)``; the maximizer ``L(x)`` is a boundary point."""
    report = solve(build_lambda(prob, r, t, direction=direction, all_theta=all_theta), settings)
    if report.status == "unbounded":
        raise SolverError("support value is unbounded; tau_K is missing or invalid", report)
    if not report.ok:
        raise SolverError(f"support: backend status {report.status} ({report.message})", report)
    return SupportResult(report.primal_value, _first_moments(report, prob.m), report.status)


# -- solving and extraction -----------------------------------------------------------

@dataclass
class RelaxationResult:
    kind: str
    r: int | None
    t: int
    status: str
    value: float
    report: SolveReport = field(repr=False)
    functional: MomentVector | None = field(default=None, repr=False)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.report.ok

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "kind": self.kind, "r": self.r, "t": self.t, "status": self.status,
            "value": self.value, "iterations": self.report.iterations,
            "residuals": dict(self.report.residuals),
        }
        if self.functional is not None:
            out["functional"] = self.functional.to_dict()
        if timing:
            out["seconds"] = self.seconds
        return out


def _functional(report: SolveReport, prefix: str, n: int, degree: int) -> MomentVector | None:
    if not report.ok:
        return None
    size = len(monomial_basis(n, degree))
    return MomentVector(n, degree, [report.scalar_values[f"{prefix}[{i}]"] for i in range(size)])


def solve_relaxation(prob: SipProblem, kind: str, r: int | None, t: int,
                     settings: Settings | None = None) -> RelaxationResult:
    sdp = build_relaxation(prob, kind, r, t)
    start = time.perf_counter()
    report = solve(sdp, settings)
    elapsed = time.perf_counter() - start
    if kind.endswith("dsdp"):
        degree = 2 * r if kind == "dsdp" else prob.d_P
        mv = _functional(report, "L", prob.m, degree)
    else:
        mv = _functional(report, "H", prob.n, 2 * t)
    value = report.primal_value if report.ok else float("nan")
    return RelaxationResult(kind, r if kind in ("dsdp", "psdp") else None, t, report.status,
                            value, report, mv, elapsed)


@dataclass
class MinimizerInfo:
    point: np.ndarray
    margin: float  # min over the index-set grid of p(point, y)
    jensen_gap: float  # L(f) - f(L(x))

    def to_dict(self) -> dict:
        return {"point": self.point.tolist(), "margin": self.margin, "jensen_gap": self.jensen_gap}


def index_grid(prob: SipProblem, density: int = gridmod.DEFAULT_DENSITY) -> np.ndarray:
    return gridmod.sample_set(prob.generator_terms(), prob.n, prob.bounding_box(), density)


def extract_minimizer(prob: SipProblem, result: RelaxationResult,
                      ygrid: np.ndarray | None = None) -> MinimizerInfo:
    """Candidate minimizer ``L(x)`` with its grid feasibility margin and Jensen gap."""
    if result.functional is None or not result.kind.endswith("dsdp"):
        raise ValueError("need a solved minimizing relaxation")
    mv = result.functional
    point = mv.first_moments()
    ygrid = index_grid(prob) if ygrid is None else ygrid
    margin = gridmod.min_over_grid(prob.p, point, ygrid)
    f_at = prob.f.evaluate(np.concatenate([point, np.zeros(prob.n)]))
    lf = sum(c * mv[mono] for mono, c in prob.f.block_terms(X).items())
    return MinimizerInfo(point, float(margin), float(lf - f_at))


@dataclass
class ActiveIndices:
    status: str  # "certified", "unverified" or "extraction-failed"
    flatness: FlatnessResult | None
    atoms: list[Atom] = field(default_factory=list)
    in_set: bool | None = None
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "flatness": self.flatness.to_dict() if self.flatness else None,
            "atoms": [a.to_dict() for a in self.atoms],
            "in_index_set": self.in_set,
            "message": self.message,
        }


def extract_active_indices(prob: SipProblem, result: RelaxationResult,
                           rank_tol: float = DEFAULT_RANK_TOL, feas_tol: float = 1e-6) -> ActiveIndices:
    """Atoms ``(lambda_i, y_i)`` of ``H`` when its moment matrix is flat."""
    if result.functional is None or not result.kind.endswith("psdp"):
        raise ValueError("need a solved maximizing relaxation")
    mv = result.functional
    t = result.t
    flat = flat_extension_check(mv, t, prob.d_S, rank_tol)
    if not flat.flat:
        return ActiveIndices("unverified", flat, message="flat extension condition fails")
    try:
        atoms = extract_atoms(mv, t, rank_tol)
    except ExtractionError as exc:
        return ActiveIndices("extraction-failed", flat, message=str(exc))
    inside = atoms_in_set(atoms, prob.generator_terms(), feas_tol)
    status = "certified" if inside else "unverified"
    msg = "" if inside else "extracted atoms violate the index-set constraints"
    return ActiveIndices(status, flat, atoms, inside, msg)


def lagrangian_values(prob: SipProblem, value: float, atoms: Sequence[Atom],
                      points: np.ndarray) -> np.ndarray:
    """``f(x) - value - sum_i lambda_i p(x, y_i)`` at each row of ``points``."""
    points = np.atleast_2d(points)
    full = np.hstack([points, np.zeros((len(points), prob.n))])
    out = prob.f.evaluate_many(full) - value
    if atoms:
        ys = np.array([a.point for a in atoms])
        w = np.array([a.weight for a in atoms])
        out = out - gridmod.constraint_matrix(prob.p, points, ys) @ w
    return out


# -- scaling, tau and mode ----------------------------------------------------------------

def scale_to_unit_ball(prob: SipProblem) -> tuple[SipProblem, Callable[[np.ndarray], np.ndarray]]:
    """Substitute ``x -> tau x`` so the new radius bound is 1.

    Returns the scaled problem and the map taking its points back.
    """
    tau = prob.require_tau()
    if tau == 1.0:
        return prob, lambda z: np.asarray(z, dtype=float)
    gens = prob.space.gens()
    images = [tau * g for g in gens[: prob.m]] + gens[prob.m:]
    f = prob.f.compose(images, prob.space)
    p = prob.p.compose(images, prob.space)
    scaled = replace(prob, f=f, p=p, tau=1.0)
    return scaled, lambda z: tau * np.asarray(z, dtype=float)


@dataclass
class TauEstimate:
    tau: float
    touches_box: bool  # feasible grid points on the box boundary: K may extend beyond it
    feasible_points: int


def estimate_tau(prob: SipProblem, box: Sequence[tuple[float, float]], density: int = 101,
                 ygrid: np.ndarray | None = None) -> TauEstimate:
    """Grid estimate of ``max ||x||_2`` over ``K`` inside ``box``.

    The estimate adds one grid-cell diagonal.  It is a heuristic and is
    never substituted for a missing ``tau`` automatically.
    """
    box = np.asarray(box, dtype=float)
    if box.shape != (prob.m, 2):
        raise ValueError("box needs one interval per x variable")
    axes = [np.linspace(lo, hi, density) for lo, hi in box]
    xs = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)
    ygrid = index_grid(prob) if ygrid is None else ygrid
    feasible = xs[gridmod.constraint_matrix(prob.p, xs, ygrid).min(axis=1) >= 0]
    if len(feasible) == 0:
        raise ValueError("no feasible grid point in the box")
    cell = np.linalg.norm((box[:, 1] - box[:, 0]) / (density - 1))
    edge = np.any(np.isclose(feasible, box[:, 0]) | np.isclose(feasible, box[:, 1]))
    tau = float(np.linalg.norm(feasible, axis=1).max() + cell)
    return TauEstimate(tau, bool(edge), len(feasible))


@dataclass
class ModeDecision:
    mode: str
    detected: bool  # False when the user fixed the mode
    objective_sos_convex: bool | None = None
    sampled_points: list = field(default_factory=list)
    constraint_sos_convex: bool | None = None

    def to_dict(self) -> dict:
        return {"mode": self.mode, "auto_detected": self.detected,
                "objective_sos_convex": self.objective_sos_convex,
                "constraint_sos_convex_on_samples": self.constraint_sos_convex,
                "samples": [list(map(float, y)) for y in self.sampled_points]}


def resolve_mode(prob: SipProblem, samples: int = 10, seed: int = 0,
                 settings: Settings | None = None) -> ModeDecision:
    """Pick general or s.o.s-convex mode.

    Auto detection tests ``f`` and ``-p(., y)`` at ``samples`` grid points of
    the index set.  Sampling cannot prove the property for all ``y``.
    """
    if prob.mode != "auto":
        return ModeDecision(prob.mode, False)
    f_ok = is_sos_convex(prob.f, X, settings)
    ygrid = index_grid(prob, density=20)
    rng = np.random.default_rng(seed)
    pick = ygrid[rng.choice(len(ygrid), size=min(samples, len(ygrid)), replace=False)]
    p_ok = f_ok and all(is_sos_convex(-prob.p.partial_evaluate(Y, y), X, settings) for y in pick)
    mode = "sosconvex" if f_ok and p_ok else "general"
    return ModeDecision(mode, True, f_ok, list(pick), p_ok if f_ok else None)


# -- hierarchy ---------------------------------------------------------------------------

@dataclass
class HierarchyPoint:
    r: int | None
    t: int
    dual: RelaxationResult  # minimizing side
    primal: RelaxationResult  # maximizing side
    minimizer: MinimizerInfo | None = None
    active: ActiveIndices | None = None
    weak_duality_ok: bool | None = None

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "r": self.r, "t": self.t,
            "dsdp": self.dual.to_dict(timing),
            "psdp": self.primal.to_dict(timing),
            "minimizer": self.minimizer.to_dict() if self.minimizer else None,
            "active_indices": self.active.to_dict() if self.active else None,
            "weak_duality_ok": self.weak_duality_ok,
        }


@dataclass
class HierarchyReport:
    problem: str
    mode: ModeDecision
    degrees: dict
    tau: float | None
    points: list[HierarchyPoint]
    selected: int | None  # index of the reported point
    diagnostics: dict
    seconds: float = 0.0

    @property
    def best(self) -> HierarchyPoint | None:
        return None if self.selected is None else self.points[self.selected]

    @property
    def all_ok(self) -> bool:
        return all(pt.dual.ok and pt.primal.ok for pt in self.points)

    def to_dict(self, timing: bool = True) -> dict:
        best = self.best
        out = {
            "problem": self.problem,
            "mode": self.mode.to_dict(),
            "degrees": dict(self.degrees),
            "tau_K": self.tau,
            "value": best.dual.value if best else None,
            "minimizer": best.minimizer.point.tolist() if best and best.minimizer else None,
            "selected": None if best is None else {"r": best.r, "t": best.t},
            "points": [pt.to_dict(timing) for pt in self.points],
            "diagnostics": self.diagnostics,
        }
        if timing:
            out["seconds"] = self.seconds
        return out


def default_schedule(prob: SipProblem, mode: str) -> list[tuple[int | None, int]]:
    if mode == "sosconvex":
        return [(None, prob.d_K)]
    r = max(half_up(prob.d_P), prob.d_K)
    t = prob.d_K if prob.univariate_interval_mode else r
    return [(r, t)]


def _solve_point(prob: SipProblem, mode: str, r: int | None, t: int, settings: Settings | None,
                 ygrid: np.ndarray | None) -> HierarchyPoint:
    if mode == "sosconvex":
        dual = solve_relaxation(prob, "sosconvex-dsdp", None, t, settings)
        primal = solve_relaxation(prob, "sosconvex-psdp", None, t, settings)
    else:
        dual = solve_relaxation(prob, "dsdp", r, t, settings)
        primal = solve_relaxation(prob, "psdp", r, t, settings)
    pt = HierarchyPoint(r, t, dual, primal)
    if dual.ok and primal.ok:
        tol = 1e-6 * (1 + abs(dual.value))
        pt.weak_duality_ok = bool(primal.value <= dual.value + tol)
    if dual.ok:
        pt.minimizer = extract_minimizer(prob, dual, ygrid)
    if primal.ok:
        pt.active = extract_active_indices(prob, primal)
    return pt


def _diagnostics(points: list[HierarchyPoint]) -> tuple[dict, int | None]:
    by_r: dict = {}
    for i, pt in enumerate(points):
        by_r.setdefault(pt.r, []).append(i)
    monotone = []
    selected = None
    stagnation = []
    for r, idx in by_r.items():
        idx = sorted(idx, key=lambda i: points[i].t)
        for a, b in zip(idx, idx[1:]):
            pa, pb = points[a], points[b]
            if not (pa.dual.ok and pb.dual.ok):
                continue
            ok = pb.dual.value <= pa.dual.value + 1e-6 * (1 + abs(pa.dual.value))
            monotone.append({"r": r, "t_low": pa.t, "t_high": pb.t, "nonincreasing": bool(ok)})
            if abs(pa.dual.value - pb.dual.value) <= STAGNATION_TOL and not any(
                    s["r"] == r for s in stagnation):
                stagnation.append({"r": r, "t": pa.t})
    solved = [i for i, pt in enumerate(points) if pt.dual.ok]
    if stagnation:
        last = stagnation[-1]
        selected = next(i for i, pt in enumerate(points) if pt.r == last["r"] and pt.t == last["t"])
    elif solved:
        selected = solved[-1]
    diag = {
        "dual_monotone_in_t": monotone,
        "stagnation": stagnation,
        "weak_duality": [pt.weak_duality_ok for pt in points],
        "failed_solves": [{"r": pt.r, "t": pt.t, "dsdp": pt.dual.status, "psdp": pt.primal.status}
                          for pt in points if not (pt.dual.ok and pt.primal.ok)],
    }
    return diag, selected


def run_hierarchy(prob: SipProblem, schedule: Sequence[tuple[int | None, int]] | None = None,
                  settings: Settings | None = None, n_jobs: int = 1,
                  mode: ModeDecision | None = None, grid_density: int = gridmod.DEFAULT_DENSITY
                  ) -> HierarchyReport:
    """Solve both sides of the relaxation at every scheduled ``(r, t)``.

    In s.o.s-convex mode only ``t`` matters and ``r`` is ignored.  In the
    univariate-interval case the default fixes ``t = d_K``.  A failed solve
    is recorded and the run continues.
    """
    start = time.perf_counter()
    mode = mode or resolve_mode(prob, settings=settings)
    sched = list(schedule) if schedule else default_schedule(prob, mode.mode)
    if mode.mode == "sosconvex":
        sched = sorted({(None, t) for _, t in sched}, key=lambda rt: rt[1])
    else:
        for r, t in sched:
            if r is None:
                raise PreconditionError("general mode needs r for every schedule entry")
            _check_general(prob, r, t, half_up(prob.d_P))
        prob.require_tau()
    for _, t in sched:
        _check_t(prob, t)
    ygrid = index_grid(prob, grid_density)

    def work(rt):
        return _solve_point(prob, mode.mode, rt[0], rt[1], settings, ygrid)

    if n_jobs > 1 and len(sched) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            points = list(pool.map(work, sched))
    else:
        points = [work(rt) for rt in sched]
    diag, selected = _diagnostics(points)
    diag["rank_tol"] = DEFAULT_RANK_TOL
    return HierarchyReport(prob.name, mode, prob.degrees(), prob.tau, points, selected, diag,
                           time.perf_counter() - start)
