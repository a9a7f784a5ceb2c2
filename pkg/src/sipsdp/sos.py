"""Sum-of-squares certificates solved as semidefinite programs.

Every routine returns ``None`` when the backend certifies the SDP
infeasible, and raises :class:`SolverError` when the backend fails to reach
a verdict.  Polynomials are read over a single variable block: the block
the polynomial uses, or the one named by ``block``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linform import LinPoly
from .poly import X, Y, Monomial, Polynomial, Space, monomial_basis
from .sdp import SdpBuilder, Settings, solve
from .sdp.problem import SolveReport


class SolverError(RuntimeError):
    """The SDP backend failed to decide a problem."""

    def __init__(self, message: str, report: SolveReport | None = None):
        super().__init__(message)
        self.report = report


def _pick_block(poly: Polynomial, block: str | None) -> str:
    if block is not None:
        return block
    if poly.depends_on(X) and poly.depends_on(Y):
        raise ValueError("polynomial uses both blocks; pass block explicitly")
    if poly.depends_on(Y):
        return Y
    if poly.depends_on(X):
        return X
    return Y if poly.space.nx == 0 else X


def _coeffs(poly: Polynomial, block: str) -> dict[Monomial, float]:
    return poly.block_terms(block)


def _max_coeff_error(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys), default=0.0)


def _gram_poly(basis: Sequence[Monomial], gram: np.ndarray) -> dict[Monomial, float]:
    out: dict[Monomial, float] = {}
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            m = tuple(x + y for x, y in zip(a, b))
            out[m] = out.get(m, 0.0) + gram[i, j]
    return out


def _mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for a, ca in p.items():
        for b, cb in q.items():
            m = tuple(x + y for x, y in zip(a, b))
            out[m] = out.get(m, 0.0) + ca * cb
    return out


def _check(report: SolveReport, what: str) -> bool:
    """True if solved, False if certified infeasible; raise otherwise."""
    if report.ok:
        return True
    if report.status == "infeasible":
        return False
    raise SolverError(f"{what}: backend status {report.status} ({report.message})", report)


@dataclass
class SosCertificate:
    """``target = b' G b`` for the monomial vector ``b``."""

    basis: list[Monomial]
    gram: np.ndarray
    residual: float = 0.0
    variables: tuple[str, ...] = ()

    def polynomial(self) -> dict[Monomial, float]:
        return _gram_poly(self.basis, self.gram)

    def evaluate(self, point: Sequence[float]) -> float:
        v = np.array([np.prod(np.asarray(point, float) ** np.array(m)) for m in self.basis])
        return float(v @ self.gram @ v)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.gram)[0]) if self.basis else 0.0

    def squares(self, tol: float = 1e-12) -> list[np.ndarray]:
        """Coefficient vectors (over ``basis``) of polynomials whose squares sum to the target."""
        w, v = np.linalg.eigh(self.gram)
        return [np.sqrt(wi) * v[:, i] for i, wi in enumerate(w) if wi > tol]

    def to_dict(self) -> dict:
        lower = [[float(self.gram[i, j]) for j in range(i + 1)] for i in range(len(self.basis))]
        return {"variables": list(self.variables), "basis": [list(m) for m in self.basis],
                "gram_lower": lower, "residual": self.residual}


@dataclass
class QuadraticModuleCertificate:
    """``target = sum_j g_j * sigma_j`` with ``g_0 = 1``."""

    generators: list[dict[Monomial, float]]
    multipliers: list[SosCertificate]
    order: int
    residual: float = 0.0
    variables: tuple[str, ...] = ()

    def polynomial(self) -> dict[Monomial, float]:
        out: dict = {}
        for g, s in zip(self.generators, self.multipliers):
            for m, c in _mul(g, s.polynomial()).items():
                out[m] = out.get(m, 0.0) + c
        return out

    def evaluate(self, point: Sequence[float]) -> float:
        point = np.asarray(point, float)
        total = 0.0
        for g, s in zip(self.generators, self.multipliers):
            gv = sum(c * np.prod(point ** np.array(m)) for m, c in g.items())
            total += gv * s.evaluate(point)
        return float(total)

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "order": self.order,
            "residual": self.residual,
            "generators": [[{"exponents": list(m), "coeff": c} for m, c in sorted(g.items())]
                           for g in self.generators],
            "multipliers": [s.to_dict() for s in self.multipliers],
        }


def _names(poly: Polynomial, block: str) -> tuple[str, ...]:
    return poly.space.x if block == X else poly.space.y


def sos_decompose(h: Polynomial, half_degree: int, block: str | None = None,
                  settings: Settings | None = None) -> SosCertificate | None:
    """Gram-matrix SOS decomposition of ``h`` over the full degree-``half_degree`` basis."""
    block = _pick_block(h, block)
    if h.block_degree(block) > 2 * half_degree:
        raise ValueError(f"deg h = {h.block_degree(block)} exceeds 2 * half_degree")
    n = h.space.block_size(block)
    target = _coeffs(h, block)
    basis = monomial_basis(n, half_degree)
    b = SdpBuilder()
    b.add_block("gram", len(basis))
    lp = LinPoly()
    lp.add_gram("gram", basis)
    lp.add_poly(target, -1.0)
    lp.equate_zero(b)
    report = solve(b.build(), settings)
    if not _check(report, "sos_decompose"):
        return None
    gram = report.block_values["gram"]
    resid = _max_coeff_error(_gram_poly(basis, gram), target)
    return SosCertificate(basis, gram, resid, _names(h, block))


def _generator_terms(g, block: str, n: int) -> dict[Monomial, float]:
    if isinstance(g, Polynomial):
        return g.block_terms(block)
    return {tuple(m): float(c) for m, c in dict(g).items()}


def _half(deg: int) -> int:
    return (deg + 1) // 2


def qmodule_membership(psi: Polynomial, generators: Sequence, t: int,
                       block: str | None = None,
                       settings: Settings | None = None) -> QuadraticModuleCertificate | None:
    """Search for ``psi = sigma_0 + sum_j g_j sigma_j`` with ``deg(g_j sigma_j) <= 2t``.

    ``None`` means no certificate exists at order ``t``; a higher order may
    still succeed.
    """
    block = _pick_block(psi, block)
    n = psi.space.block_size(block)
    if psi.block_degree(block) > 2 * t:
        raise ValueError(f"deg psi = {psi.block_degree(block)} exceeds 2t = {2 * t}")
    gens = [{(0,) * n: 1.0}] + [_generator_terms(g, block, n) for g in generators]
    for g in gens[1:]:
        dg = max((sum(m) for m in g), default=0)
        if dg > 2 * t:
            raise ValueError(f"generator degree {dg} exceeds 2t = {2 * t}")
    target = _coeffs(psi, block)
    b = SdpBuilder()
    lp = LinPoly()
    bases = []
    for j, g in enumerate(gens):
        dg = max((sum(m) for m in g), default=0)
        basis = monomial_basis(n, t - _half(dg))
        bases.append(basis)
        b.add_block(f"sigma{j}", len(basis))
        lp.add_gram(f"sigma{j}", basis, g)
    lp.add_poly(target, -1.0)
    lp.equate_zero(b)
    report = solve(b.build(), settings)
    if not _check(report, "qmodule_membership"):
        return None
    names = _names(psi, block)
    mults = [SosCertificate(basis, report.block_values[f"sigma{j}"], 0.0, names)
             for j, basis in enumerate(bases)]
    cert = QuadraticModuleCertificate(gens, mults, t, 0.0, names)
    cert.residual = _max_coeff_error(cert.polynomial(), target)
    return cert


def interval_certificate(psi: Polynomial, t: int,
                         settings: Settings | None = None) -> QuadraticModuleCertificate | None:
    """``psi = sigma_0 + (1 - y^2) sigma_1`` for a univariate ``psi``."""
    block = _pick_block(psi, None)
    if psi.space.block_size(block) != 1:
        raise ValueError("interval certificates need exactly one variable")
    return qmodule_membership(psi, [{(0,): 1.0, (2,): -1.0}], t, block, settings)


def eps_star(h: Polynomial, r: int, settings: Settings | None = None) -> float:
    """Smallest ``eps >= 0`` with ``h + eps * (1 + sum_j x_j^(2r))`` a sum of squares.

    Uses the X block of ``h``'s space.
    """
    m = h.space.nx
    if m == 0:
        raise ValueError("eps_star needs at least one x variable")
    if h.depends_on(Y):
        raise ValueError("eps_star expects a polynomial in the x block only")
    if 2 * r < h.block_degree(X):
        raise ValueError(f"r = {r} is below ceil(deg h / 2)")
    target = h.block_terms(X)
    pert = {(0,) * m: 1.0}
    for j in range(m):
        e = [0] * m
        e[j] = 2 * r
        pert[tuple(e)] = pert.get(tuple(e), 0.0) + 1.0
    basis = monomial_basis(m, r)
    b = SdpBuilder()
    b.add_block("gram", len(basis))
    b.add_nonneg("eps")
    lp = LinPoly()
    lp.add_gram("gram", basis)
    lp.add_poly(target, -1.0)
    lp.add_scaled_poly(pert, "eps", -1.0)
    lp.equate_zero(b)
    b.set_objective({"eps": 1.0})
    report = solve(b.build(), settings)
    if not report.ok:
        raise SolverError(f"eps_star: backend status {report.status} ({report.message})", report)
    return max(0.0, report.scalar_values["eps"])


def hessian_form(h: Polynomial, block: str = X) -> tuple[dict[Monomial, float], int]:
    """Coefficients of ``z' Hess(h)(x) z`` over ``(x, z)`` with ``2m`` variables."""
    m = h.space.block_size(block)
    sl = h.space.block_slice(block)
    names = h.space.names[sl]
    out: dict[Monomial, float] = {}
    for i in range(m):
        for j in range(m):
            hij = h.diff(names[i]).diff(names[j]).block_terms(block)
            for mono, c in hij.items():
                z = [0] * m
                z[i] += 1
                z[j] += 1
                key = tuple(mono) + tuple(z)
                out[key] = out.get(key, 0.0) + c
    return {k: v for k, v in out.items() if abs(v) > 1e-14}, m


def is_sos_convex(h: Polynomial, block: str = X, settings: Settings | None = None) -> bool:
    """Whether ``z' Hess(h)(x) z`` is SOS with a basis of monomials linear in ``z``."""
    form, m = hessian_form(h, block)
    if not form:
        return True
    deg_x = max(sum(k[:m]) for k in form)
    half = _half(deg_x)
    xbasis = monomial_basis(m, half)
    basis = []
    for i in range(m):
        z = [0] * m
        z[i] = 1
        basis += [tuple(xb) + tuple(z) for xb in xbasis]
    b = SdpBuilder()
    b.add_block("gram", len(basis))
    lp = LinPoly()
    lp.add_gram("gram", basis)
    lp.add_poly(form, -1.0)
    lp.equate_zero(b)
    report = solve(b.build(), settings)
    return _check(report, "is_sos_convex")


def sos_convex_on_samples(p: Polynomial, points: np.ndarray, negate: bool = True,
                          settings: Settings | None = None) -> bool:
    """``is_sos_convex`` of ``-p(., y)`` (or ``p``) at each sampled ``y``."""
    for y in np.atleast_2d(points):
        q = p.partial_evaluate(Y, y)
        if not is_sos_convex(-q if negate else q, X, settings):
            return False
    return True
