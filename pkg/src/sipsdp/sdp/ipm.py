"""Primal-dual interior-point solver for :class:`SdpProblem`.

The problem is converted to the conic form

    minimize    c'x
    subject to  G x + s = h,   A x = b,   s in K

with ``K`` a product of a nonnegative orthant and PSD cones, and solved on
the homogeneous self-dual embedding with Nesterov-Todd scaling and a
Mehrotra predictor-corrector.  Symmetric matrices are stored in ``svec``
form (upper triangle, row-major, off-diagonals scaled by sqrt(2)) so inner
products are preserved.

All linear algebra is dense.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .problem import Settings, SdpProblem, SolveReport

SQRT2 = math.sqrt(2.0)


# -- svec helpers ---------------------------------------------------------------

def svec_dim(d: int) -> int:
    return d * (d + 1) // 2


def svec(mat: np.ndarray) -> np.ndarray:
    d = mat.shape[0]
    iu, ju = np.triu_indices(d)
    out = mat[iu, ju].astype(float)
    out[iu != ju] *= SQRT2
    return out


def smat(vec: np.ndarray, d: int) -> np.ndarray:
    iu, ju = np.triu_indices(d)
    vals = np.asarray(vec, dtype=float).copy()
    vals[iu != ju] /= SQRT2
    out = np.zeros((d, d))
    out[iu, ju] = vals
    out[ju, iu] = vals
    return out


class _SvecKron:
    """Matrix of ``U -> P U P`` in svec coordinates for a fixed dimension."""

    def __init__(self, d: int):
        self.d = d
        iu, ju = np.triu_indices(d)
        n = len(iu)
        proj = np.zeros((n, d * d))  # vec (row-major) -> svec
        lift = np.zeros((d * d, n))  # svec -> vec(smat)
        for k, (i, j) in enumerate(zip(iu, ju)):
            if i == j:
                proj[k, i * d + i] = 1.0
                lift[i * d + i, k] = 1.0
            else:
                proj[k, i * d + j] = SQRT2 / 2
                proj[k, j * d + i] = SQRT2 / 2
                lift[i * d + j, k] = 1 / SQRT2
                lift[j * d + i, k] = 1 / SQRT2
        self.proj = proj
        self.lift = lift

    def __call__(self, p: np.ndarray) -> np.ndarray:
        return self.proj @ np.kron(p, p) @ self.lift


# -- cone vectors -------------------------------------------------------------------

@dataclass
class _ConeVec:
    lin: np.ndarray
    mats: list[np.ndarray]

    def copy(self) -> "_ConeVec":
        return _ConeVec(self.lin.copy(), [m.copy() for m in self.mats])

    def __add__(self, o):
        return _ConeVec(self.lin + o.lin, [a + b for a, b in zip(self.mats, o.mats)])

    def __sub__(self, o):
        return _ConeVec(self.lin - o.lin, [a - b for a, b in zip(self.mats, o.mats)])

    def scale(self, a: float) -> "_ConeVec":
        return _ConeVec(self.lin * a, [m * a for m in self.mats])

    def dot(self, o) -> float:
        return float(self.lin @ o.lin + sum(np.sum(a * b) for a, b in zip(self.mats, o.mats)))

    def norm(self) -> float:
        return math.sqrt(max(self.dot(self), 0.0))


def _jordan(u: _ConeVec, v: _ConeVec) -> _ConeVec:
    return _ConeVec(u.lin * v.lin, [(a @ b + b @ a) / 2 for a, b in zip(u.mats, v.mats)])


@dataclass
class _Lambda:
    lin: np.ndarray
    diags: list[np.ndarray]

    def as_cone(self) -> _ConeVec:
        return _ConeVec(self.lin.copy(), [np.diag(d) for d in self.diags])

    def square(self) -> _ConeVec:
        return _ConeVec(self.lin**2, [np.diag(d**2) for d in self.diags])

    def solve(self, v: _ConeVec) -> _ConeVec:
        """Inverse of ``u -> lambda o u``."""
        return _ConeVec(v.lin / self.lin,
                        [m * (2.0 / (d[:, None] + d[None, :])) for m, d in zip(v.mats, self.diags)])


@dataclass
class _Scaling:
    w: np.ndarray
    r: list[np.ndarray]
    rinv: list[np.ndarray]

    def apply(self, z: _ConeVec) -> _ConeVec:  # W z
        return _ConeVec(z.lin * self.w, [r.T @ m @ r for r, m in zip(self.r, z.mats)])

    def apply_inv_t(self, s: _ConeVec) -> _ConeVec:  # W^{-T} s
        return _ConeVec(s.lin / self.w, [ri @ m @ ri.T for ri, m in zip(self.rinv, s.mats)])

    def apply_t(self, u: _ConeVec) -> _ConeVec:  # W^T u
        return _ConeVec(u.lin * self.w, [r @ m @ r.T for r, m in zip(self.r, u.mats)])

    def apply_inv(self, u: _ConeVec) -> _ConeVec:  # W^{-1} u
        return _ConeVec(u.lin / self.w, [ri.T @ m @ ri for ri, m in zip(self.rinv, u.mats)])

    def inv_wtw(self, v: _ConeVec) -> _ConeVec:  # (W^T W)^{-1} v
        return self.apply_inv(self.apply_inv_t(v))


def _nt_scaling(s: _ConeVec, z: _ConeVec) -> tuple[_Scaling, _Lambda]:
    w = np.sqrt(s.lin / z.lin)
    lam_lin = np.sqrt(s.lin * z.lin)
    rs, rinvs, lams = [], [], []
    for sm, zm in zip(s.mats, z.mats):
        ls = np.linalg.cholesky(sm)
        lz = np.linalg.cholesky(zm)
        u, sig, vt = np.linalg.svd(lz.T @ ls)
        r = ls @ vt.T / np.sqrt(sig)
        rinv = (np.sqrt(sig)[:, None] * vt) @ scipy.linalg.solve_triangular(ls, np.eye(len(sig)), lower=True)
        rs.append(r)
        rinvs.append(rinv)
        lams.append(sig)
    return _Scaling(w, rs, rinvs), _Lambda(lam_lin, lams)


def _update_scaling(scal: _Scaling, st: _ConeVec, zt: _ConeVec) -> tuple[_Scaling, _Lambda]:
    """New scaling from scaled iterates ``st = W^{-T} s+``, ``zt = W z+``."""
    w = scal.w * np.sqrt(st.lin / zt.lin)
    lam_lin = np.sqrt(st.lin * zt.lin)
    rs, rinvs, lams = [], [], []
    for r, rinv, sm, zm in zip(scal.r, scal.rinv, st.mats, zt.mats):
        l1 = np.linalg.cholesky((sm + sm.T) / 2)
        l2 = np.linalg.cholesky((zm + zm.T) / 2)
        _, sig, vt = np.linalg.svd(l2.T @ l1)
        rs.append(r @ l1 @ vt.T / np.sqrt(sig))
        l1inv = scipy.linalg.solve_triangular(l1, np.eye(len(sig)), lower=True)
        rinvs.append((np.sqrt(sig)[:, None] * vt) @ l1inv @ rinv)
        lams.append(sig)
    return _Scaling(w, rs, rinvs), _Lambda(lam_lin, lams)


def _max_step(lam: _Lambda, d: _ConeVec) -> float:
    """Largest ``a`` with ``lambda + a*d`` in the cone (inf if unbounded)."""
    worst = 0.0
    if lam.lin.size:
        worst = max(worst, float(np.max(-d.lin / lam.lin)))
    for dg, m in zip(lam.diags, d.mats):
        inv = 1.0 / np.sqrt(dg)
        sc = inv[:, None] * m * inv[None, :]
        worst = max(worst, float(-np.linalg.eigvalsh((sc + sc.T) / 2)[0]))
    return math.inf if worst <= 0 else 1.0 / worst


def _min_eig_shift(v: _ConeVec) -> float:
    """``max(-min eigenvalue)`` over all cones."""
    worst = -math.inf
    if v.lin.size:
        worst = max(worst, float(-np.min(v.lin)))
    for m in v.mats:
        worst = max(worst, float(-np.linalg.eigvalsh(m)[0]))
    return worst


# -- conic conversion ---------------------------------------------------------------

@dataclass
class _Conic:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    G_lin: np.ndarray  # rows of the orthant part
    h_lin: np.ndarray
    block_slices: list[slice]
    block_dims: list[int]
    col_of: dict
    row_scale: np.ndarray
    kept_rows: np.ndarray
    n_eq_orig: int
    n_nonneg: int
    sign: float

    @property
    def n(self) -> int:
        return self.c.size

    def g_mul(self, x: np.ndarray) -> _ConeVec:
        return _ConeVec(self.G_lin @ x, [-smat(x[sl], d) for sl, d in zip(self.block_slices, self.block_dims)])

    def gt_mul(self, z: _ConeVec) -> np.ndarray:
        out = self.G_lin.T @ z.lin
        for sl, m in zip(self.block_slices, z.mats):
            out[sl] -= svec(m)
        return out

    def h_cone(self) -> _ConeVec:
        return _ConeVec(self.h_lin.copy(), [np.zeros((d, d)) for d in self.block_dims])

    def identity(self) -> _ConeVec:
        return _ConeVec(np.ones(self.h_lin.size), [np.eye(d) for d in self.block_dims])

    @property
    def degree(self) -> int:
        return self.h_lin.size + sum(self.block_dims)


def _to_conic(prob: SdpProblem) -> tuple[_Conic | None, str]:
    col_of: dict = {}
    k = 0
    for name in prob.free_vars:
        col_of[name] = k
        k += 1
    for name in prob.nonneg_vars:
        col_of[name] = k
        k += 1
    block_slices, block_dims = [], []
    for name, d in prob.psd_blocks:
        start = k
        for i in range(d):
            for j in range(i, d):
                col_of[(name, i, j)] = (k, 1.0 if i == j else 1.0 / SQRT2)
                k += 1
        block_slices.append(slice(start, k))
        block_dims.append(d)
    n = k

    def row(expr) -> np.ndarray:
        out = np.zeros(n)
        for key, coef in expr.items():
            idx = col_of[key]
            if isinstance(idx, tuple):
                out[idx[0]] += coef * idx[1]
            else:
                out[idx] += coef
        return out

    sign = 1.0 if prob.sense == "min" else -1.0
    c = sign * row(prob.objective)

    n_eq = len(prob.equalities)
    A = np.array([row(e.coeffs) for e in prob.equalities]).reshape(n_eq, n)
    b = np.array([e.rhs for e in prob.equalities], dtype=float)

    nf, nn = len(prob.free_vars), len(prob.nonneg_vars)
    g_rows = []
    h_vals = []
    for i in range(nn):
        r = np.zeros(n)
        r[nf + i] = -1.0
        g_rows.append(r)
        h_vals.append(0.0)
    for ineq in prob.inequalities:
        g_rows.append(-row(ineq.coeffs))
        h_vals.append(-ineq.rhs)
    G_lin = np.array(g_rows).reshape(len(g_rows), n)
    h_lin = np.array(h_vals, dtype=float)

    # presolve equalities: drop empty and dependent rows, normalise the rest
    norms = np.linalg.norm(A, axis=1) if n_eq else np.zeros(0)
    nonzero = norms > 0
    if np.any(np.abs(b[~nonzero]) > 1e-12):
        return None, "an equality constraint with no variables has a nonzero right-hand side"
    idx = np.flatnonzero(nonzero)
    if idx.size:
        An = A[idx] / norms[idx, None]
        _, rr, piv = scipy.linalg.qr(An.T, mode="economic", pivoting=True)
        diag = np.abs(np.diag(rr))
        rank = int(np.sum(diag > 1e-10 * max(diag[0], 1e-300)))
        keep = np.sort(idx[piv[:rank]])
    else:
        keep = idx
    scale = norms[keep] if keep.size else np.zeros(0)
    A_kept = A[keep] / scale[:, None] if keep.size else np.zeros((0, n))
    b_kept = b[keep] / scale if keep.size else np.zeros(0)
    if keep.size < idx.size:
        sol, *_ = np.linalg.lstsq(A_kept, b_kept, rcond=None) if keep.size else (np.zeros(n),)
        res = A[idx] @ sol - b[idx]
        if np.max(np.abs(res) / np.maximum(1.0, np.abs(b[idx]))) > 1e-8:
            return None, "equality constraints are inconsistent"
    conic = _Conic(c, A_kept, b_kept, G_lin, h_lin, block_slices, block_dims, col_of,
                   scale, keep, n_eq, nn, sign)
    return conic, ""


# -- KKT --------------------------------------------------------------------------

class _KKT:
    """Newton system in scaled form.

    The orthant part is eliminated (it is diagonal); the PSD part is kept in
    augmented form with unknown ``W dz`` so the scaling is never squared.
    """

    def __init__(self, cp: _Conic, scal: _Scaling, krons: dict):
        n, p = cp.n, cp.b.size
        ns = sum(svec_dim(d) for d in cp.block_dims)
        self.g_lin_hat = cp.G_lin / scal.w[:, None] if cp.G_lin.size else cp.G_lin
        N = n + p + ns
        K = np.zeros((N, N))
        if cp.G_lin.size:
            K[:n, :n] = self.g_lin_hat.T @ self.g_lin_hat
        K[:n, n : n + p] = cp.A.T
        K[n : n + p, :n] = cp.A
        off = n + p
        for sl, d, rinv in zip(cp.block_slices, cp.block_dims, scal.rinv):
            m = krons[d](rinv)
            k = svec_dim(d)
            K[off : off + k, sl] = -m
            K[sl, off : off + k] = -m.T
            K[off + np.arange(k), off + np.arange(k)] = -1.0
            off += k
        self.exact = K
        # symmetric equilibration, then a tiny quasi-definite shift
        mag = np.maximum(np.max(np.abs(K), axis=1), 1e-300) if N else np.ones(0)
        self.dscale = 1.0 / np.sqrt(mag)
        Ks = K * self.dscale[:, None] * self.dscale[None, :]
        Ks[np.arange(n), np.arange(n)] += 1e-13
        Ks[n + np.arange(p), n + np.arange(p)] -= 1e-13
        with warnings.catch_warnings():
            # ill-conditioning near the optimum is expected; refinement compensates
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            self.lu = scipy.linalg.lu_factor(Ks)
        self.cp = cp
        self.scal = scal
        self.n, self.p = n, p

    def _solve_system(self, rhs: np.ndarray) -> np.ndarray:
        d = self.dscale
        sol = d * scipy.linalg.lu_solve(self.lu, d * rhs)
        best = np.linalg.norm(rhs - self.exact @ sol)
        for _ in range(8):
            if best <= 1e-15 * (1.0 + np.linalg.norm(rhs)):
                break
            trial = sol + d * scipy.linalg.lu_solve(self.lu, d * (rhs - self.exact @ sol))
            res = np.linalg.norm(rhs - self.exact @ trial)
            if res >= best:
                break
            sol, best = trial, res
        return sol

    def _solve_once(self, r1, r2, r3: _ConeVec):
        cp, scal = self.cp, self.scal
        n, p = self.n, self.p
        r3h = scal.apply_inv_t(r3)
        top = r1 + (self.g_lin_hat.T @ r3h.lin if cp.G_lin.size else 0.0)
        rhs = np.concatenate([top, r2] + [svec(m) for m in r3h.mats])
        sol = self._solve_system(rhs)
        dx, dy = sol[:n], sol[n : n + p]
        mats, off = [], n + p
        for d in cp.block_dims:
            k = svec_dim(d)
            mats.append(smat(sol[off : off + k], d))
            off += k
        lin = (self.g_lin_hat @ dx - r3h.lin) if cp.G_lin.size else np.zeros(0)
        dz = scal.apply_inv(_ConeVec(lin, mats))
        return dx, dy, dz

    def _residual(self, r1, r2, r3, dx, dy, dz):
        cp, scal = self.cp, self.scal
        e1 = r1 - cp.A.T @ dy - cp.gt_mul(dz)
        e2 = r2 - cp.A @ dx
        e3 = r3 - cp.g_mul(dx) + scal.apply_t(scal.apply(dz))
        # measure the cone part in scaled coordinates
        size = float(np.linalg.norm(e1) + np.linalg.norm(e2) + scal.apply_inv_t(e3).norm())
        return e1, e2, e3, size

    def solve(self, r1: np.ndarray, r2: np.ndarray, r3: _ConeVec):
        """Solve ``A'dy + G'dz = r1, A dx = r2, G dx - W'W dz = r3``."""
        dx, dy, dz = self._solve_once(r1, r2, r3)
        *err, size = self._residual(r1, r2, r3, dx, dy, dz)
        for _ in range(3):
            if size == 0.0:
                break
            cx, cy, cz = self._solve_once(*err)
            tx, ty, tz = dx + cx, dy + cy, dz + cz
            *terr, tsize = self._residual(r1, r2, r3, tx, ty, tz)
            if tsize >= 0.5 * size:
                if tsize < size:
                    dx, dy, dz = tx, ty, tz
                break
            dx, dy, dz, err, size = tx, ty, tz, terr, tsize
        self.last = size / (np.linalg.norm(r1) + np.linalg.norm(r2) + self.scal.apply_inv_t(r3).norm() + 1e-300)
        return dx, dy, dz


# -- driver ---------------------------------------------------------------------

def solve(prob: SdpProblem, settings: Settings | None = None) -> SolveReport:
    settings = settings or Settings()
    cp, msg = _to_conic(prob)
    if cp is None:
        return SolveReport("infeasible", math.nan, math.nan, message=msg)
    krons = {d: _SvecKron(d) for d in set(cp.block_dims)}
    try:
        return _hsd(prob, cp, settings, krons)
    except (np.linalg.LinAlgError, ValueError, FloatingPointError) as exc:
        return SolveReport("failed", math.nan, math.nan, message=f"numerical failure: {exc}")


def _hsd(prob: SdpProblem, cp: _Conic, st: Settings, krons: dict) -> SolveReport:
    n, p = cp.n, cp.b.size
    c, A, b = cp.c, cp.A, cp.b
    h = cp.h_cone()
    e = cp.identity()
    dg = cp.degree

    ident = _Scaling(np.ones(cp.h_lin.size), [np.eye(d) for d in cp.block_dims],
                     [np.eye(d) for d in cp.block_dims])
    kkt = _KKT(cp, ident, krons)
    x, _, zz = kkt.solve(np.zeros(n), b, h)
    s = zz.scale(-1.0)
    _, y, z = kkt.solve(-c, np.zeros(p), _ConeVec(np.zeros(cp.h_lin.size), [np.zeros((d, d)) for d in cp.block_dims]))
    for v in (s, z):
        shift = _min_eig_shift(v)
        if shift >= -1e-8 * max(v.norm(), 1.0):
            v_new = v + e.scale(1.0 + shift)
            v.lin, v.mats = v_new.lin, v_new.mats
    tau, kappa = 1.0, 1.0

    resx0 = max(1.0, float(np.linalg.norm(c)))
    resy0 = max(1.0, float(np.linalg.norm(b)))
    resz0 = max(1.0, h.norm())

    scal, lam = _nt_scaling(s, z)
    status, message = "failed", "maximum iterations reached"
    info = {}
    it = 0
    best = None
    for it in range(st.max_iter + 1):
        rx = A.T @ y + cp.gt_mul(z) + c * tau
        ry = A @ x - b * tau
        rz = s + cp.g_mul(x) - h.scale(tau)
        cx, by, hz = float(c @ x), float(b @ y), h.dot(z)
        rt = kappa + cx + by + hz
        gap = s.dot(z)
        mu = (gap + kappa * tau) / (dg + 1)
        pcost, dcost = cx / tau, -(by + hz) / tau
        pres = max(float(np.linalg.norm(ry)) / tau / resy0, rz.norm() / tau / resz0)
        dres = float(np.linalg.norm(rx)) / tau / resx0
        gap_abs = max(gap / tau**2, abs(pcost - dcost))
        info = {"primal": pres, "dual": dres, "gap": gap_abs}
        scale_gap = 1.0 + abs(pcost)
        if st.verbose:
            print(f"{it:3d} pcost {pcost: .8e} dcost {dcost: .8e} gap {gap_abs:.2e} "
                  f"pres {pres:.2e} dres {dres:.2e} tau {tau:.2e} kappa {kappa:.2e}")
        quality = max(pres, dres, gap_abs / scale_gap)
        if best is None or quality < best[0]:
            best = (quality, x / tau, y / tau, z.scale(1 / tau), s.scale(1 / tau), dict(info))
        if pres <= st.feas_tol and dres <= st.feas_tol and gap_abs <= st.gap_tol * scale_gap:
            status, message = "optimal", ""
            break
        if hz + by < 0:
            pinf = float(np.linalg.norm(A.T @ y + cp.gt_mul(z))) / resx0 / (-(hz + by))
            if pinf <= st.infeas_tol:
                status, message = "infeasible", "primal infeasibility certificate found"
                break
        if cx < 0:
            dinf = max(float(np.linalg.norm(A @ x)) / resy0,
                       (s + cp.g_mul(x)).norm() / resz0) / (-cx)
            if dinf <= st.infeas_tol:
                status, message = "unbounded", "dual infeasibility certificate found"
                break
        if it == st.max_iter:
            break

        try:
            kkt = _KKT(cp, scal, krons)
            x1, y1, z1 = kkt.solve(-c, b, h)
            zt1 = scal.apply(z1)
            denom = -zt1.dot(zt1) - kappa / tau

            def direction(eta, ds_rhs: _ConeVec, dk_rhs: float):
                lam_ds = lam.solve(ds_rhs)
                x0, y0, z0 = kkt.solve(-eta * rx, -eta * ry, rz.scale(-eta) - scal.apply_t(lam_ds))
                dtau = (-eta * rt - dk_rhs / tau - c @ x0 - b @ y0 - h.dot(z0)) / denom
                dx = x0 + dtau * x1
                dy = y0 + dtau * y1
                dz = z0 + z1.scale(dtau)
                dzt = scal.apply(dz)
                dst = lam_ds - dzt
                dkappa = (dk_rhs - kappa * dtau) / tau
                return dx, dy, dzt, dst, float(dtau), float(dkappa)

            def step_to_boundary(dzt, dst, dtau, dkappa):
                a = min(_max_step(lam, dst), _max_step(lam, dzt))
                if dtau < 0:
                    a = min(a, -tau / dtau)
                if dkappa < 0:
                    a = min(a, -kappa / dkappa)
                return a

            lam_sq = lam.square()
            aff = direction(1.0, lam_sq.scale(-1.0), -tau * kappa)
            a_aff = min(1.0, step_to_boundary(*aff[2:]))
            sigma = (1.0 - a_aff) ** 3
            corr = _jordan(aff[3], aff[2])
            ds_rhs = lam_sq.scale(-1.0) - corr + e.scale(sigma * mu)
            dk_rhs = -tau * kappa - aff[4] * aff[5] + sigma * mu
            dx, dy, dzt, dst, dtau, dkappa = direction(1.0 - sigma, ds_rhs, dk_rhs)
            alpha = min(1.0, st.step_fraction * step_to_boundary(dzt, dst, dtau, dkappa))
            if st.verbose:
                print(f"    step {alpha:.3e} sigma {sigma:.3e} kkt residual {kkt.last:.2e}")
            if alpha < 1e-12:
                message = "step length collapsed"
                break
            if kkt.last > 1e-2 and best[0] <= st.inaccurate_tol:
                # further steps are driven by an unreliable linear solve
                message = "linear system too ill-conditioned to improve further"
                break
            x = x + alpha * dx
            y = y + alpha * dy
            tau += alpha * dtau
            kappa += alpha * dkappa
            lam_c = lam.as_cone()
            st_new = lam_c + dst.scale(alpha)
            zt_new = lam_c + dzt.scale(alpha)
            scal, lam = _update_scaling(scal, st_new, zt_new)
            lam_c = lam.as_cone()
            s = scal.apply_t(lam_c)
            z = scal.apply_inv(lam_c)
        except (np.linalg.LinAlgError, FloatingPointError) as exc:
            message = f"numerical breakdown: {exc}"
            break

    if status == "infeasible":
        yc = y / (-(hz + by))
        return _report(prob, cp, status, x * 0, yc, z.scale(1 / (-(hz + by))), info, it, message,
                       values=False)
    if status == "unbounded":
        return _report(prob, cp, status, x / (-cx), y * 0, z, info, it, message, values=False)
    if status == "optimal":
        return _report(prob, cp, status, x / tau, y / tau, z.scale(1 / tau), info, it, message)
    quality, xb, yb, zb, sb, infob = best
    if quality <= st.inaccurate_tol:
        return _report(prob, cp, "inaccurate", xb, yb, zb, infob, it,
                       message or "tolerances not reached")
    return _report(prob, cp, "failed", xb, yb, zb, infob, it, message)


def _report(prob: SdpProblem, cp: _Conic, status, x, y, z: _ConeVec, info, it, message,
            values: bool = True) -> SolveReport:
    blocks = {}
    duals = {}
    for (name, d), sl, zm in zip(prob.psd_blocks, cp.block_slices, z.mats):
        blocks[name] = smat(x[sl], d)
        duals[name] = zm
    scalars = {}
    for name in prob.free_vars + prob.nonneg_vars:
        scalars[name] = float(x[cp.col_of[name]])
    eq_duals = np.zeros(cp.n_eq_orig)
    eq_duals[cp.kept_rows] = y / cp.row_scale if cp.row_scale.size else y
    ineq_duals = z.lin[cp.n_nonneg:]
    if values:
        pval = cp.sign * float(cp.c @ x) + prob.objective_constant
        dval = cp.sign * -(float(cp.b @ y) + float(cp.h_lin @ z.lin)) + prob.objective_constant
    else:
        pval = dval = math.nan
    if status == "infeasible":
        pval = math.inf if prob.sense == "min" else -math.inf
    elif status == "unbounded":
        pval = -math.inf if prob.sense == "min" else math.inf
    return SolveReport(status, pval, dval, blocks, scalars, it, dict(info),
                       cp.sign * eq_duals, cp.sign * ineq_duals,
                       {k: cp.sign * v for k, v in duals.items()}, message)
