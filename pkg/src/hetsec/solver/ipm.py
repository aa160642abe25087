"""Homogeneous self-dual interior-point method for SOCPs.

Solves ``min c'x  s.t.  A x + s = b, s in K`` together with its dual
``max -b'y  s.t.  A'y + c = 0, y in K*`` using Nesterov-Todd scaling and a
Mehrotra predictor-corrector.  The data are Ruiz-equilibrated first; the
KKT system is factorised densely with static regularisation and polished by
iterative refinement.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .cones import get_kernels
from .program import ConicProgram

OPTIMAL = "optimal"
PRIMAL_INFEASIBLE = "primal_infeasible"
DUAL_INFEASIBLE = "dual_infeasible"
MAX_ITERS = "max_iters"
NUMERICAL_FAILURE = "numerical_failure"
OPTIMAL_INACCURATE = "optimal_inaccurate"
SOLVED = (OPTIMAL, OPTIMAL_INACCURATE)


@dataclass
class SolverConfig:
    feastol: float = 1e-8
    abstol: float = 1e-8
    reltol: float = 1e-8
    infeastol: float = 1e-8
    # best iterate is still reported as solved when the run stalls this close
    inaccurate_tol: float = 1e-5
    max_iters: int = 200
    static_reg: float = 1e-10
    refine_steps: int = 3
    equilibrate: bool = True
    ruiz_iters: int = 15
    step_fraction: float = 0.99
    backend: str | None = None
    verbose: bool = False


@dataclass
class SolverResult:
    status: str
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    pobj: float
    dobj: float
    pres: float
    dres: float
    gap: float
    iterations: int
    solve_time: float
    history: list = field(default_factory=list, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    @property
    def solved(self) -> bool:
        return self.status in SOLVED


def residuals(prog: ConicProgram, x, y, s=None):
    """Scale-normalised KKT residuals ``(primal, dual, gap)`` of a candidate.

    ``s`` defaults to ``b - A x``.  Primal and dual residuals use the
    infinity norm divided by ``1 + max`` of the magnitudes of the terms
    being balanced; the gap is ``|c'x + b'y|`` relative to
    ``max(1, min(|c'x|, |b'y|))``.  Cone membership of ``s`` and ``y`` is
    not measured here.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    Ax = prog.A @ x
    if s is None:
        s = prog.b - Ax
    Aty = prog.A.T @ y
    rp = Ax + s - prog.b
    rd = Aty + prog.c
    pres = _ninf(rp) / (1.0 + max(_ninf(prog.b), _ninf(Ax), _ninf(s)))
    dres = _ninf(rd) / (1.0 + max(_ninf(prog.c), _ninf(Aty)))
    pc, dc = float(prog.c @ x), float(-prog.b @ y)
    gap = abs(pc - dc) / max(1.0, min(abs(pc), abs(dc)))
    return pres, dres, gap


def _ninf(v):
    return float(np.max(np.abs(v))) if v.size else 0.0


def _ruiz(A, cones, iters):
    """Row scaling ``D`` (uniform inside each SOC block) and column scaling ``E``."""
    m, n = A.shape
    D = np.ones(m)
    E = np.ones(n)
    M = abs(A).tocsr() if sp.issparse(A) else sp.csr_matrix(np.abs(A))
    block_of = _soc_block_index(cones)
    for _ in range(iters):
        S = sp.diags(D) @ M @ sp.diags(E)
        rn = np.asarray(S.max(axis=1).todense()).ravel()
        cn = np.asarray(S.max(axis=0).todense()).ravel()
        if block_of is not None:
            rn = _block_max(rn, cones)
        rn[rn == 0] = 1.0
        cn[cn == 0] = 1.0
        D /= np.sqrt(rn)
        E /= np.sqrt(cn)
        if max(abs(1 - rn).max(initial=0), abs(1 - cn).max(initial=0)) < 1e-3:
            break
    return D, E


def _soc_block_index(cones):
    return cones.soc if cones.soc else None


def _block_max(v, cones):
    out = v.copy()
    off = cones.zero + cones.nonneg
    for q in cones.soc:
        out[off:off + q] = v[off:off + q].max()
        off += q
    return out


class _Scaled:
    """Equilibrated data plus the maps back to the user's coordinates."""

    def __init__(self, prog: ConicProgram, cfg: SolverConfig):
        A = prog.A
        if cfg.equilibrate and A.nnz:
            D, E = _ruiz(A, prog.cones, cfg.ruiz_iters)
        else:
            D, E = np.ones(prog.m), np.ones(prog.n)
        As = (sp.diags(D) @ A @ sp.diags(E)).toarray()
        bs = D * prog.b
        cs = E * prog.c
        self.sb = max(1.0, _ninf(bs))
        self.sc = max(1.0, _ninf(cs))
        self.D, self.E = D, E
        p = prog.cones.zero
        self.p = p
        self.Aeq = As[:p]
        self.G = As[p:]
        self.beq = bs[:p] / self.sb
        self.h = bs[p:] / self.sb
        self.c = cs / self.sc

    def unscale(self, x, yeq, z, s, tau):
        xu = self.E * x * (self.sb / tau)
        y = np.concatenate([yeq, z])
        yu = self.D * y * (self.sc / tau)
        su = np.concatenate([np.zeros(self.p), s]) / self.D * (self.sb / tau)
        return xu, yu, su


def solve(prog: ConicProgram, config: SolverConfig | None = None) -> SolverResult:
    cfg = config or SolverConfig()
    K = get_kernels(cfg.backend)
    t0 = time.perf_counter()
    sc = _Scaled(prog, cfg)
    n, p = prog.n, sc.p
    l, q = prog.cones.nonneg, np.asarray(prog.cones.soc, dtype=np.intp)
    mc = sc.G.shape[0]
    nu = l + len(q)
    Aeq, G, beq, h, c = sc.Aeq, sc.G, sc.beq, sc.h, sc.c

    dim = n + p + mc
    Kmat = np.zeros((dim, dim))
    Kmat[:n, n:n + p] = Aeq.T
    Kmat[:n, n + p:] = G.T
    Kmat[n:n + p, :n] = Aeq
    Kmat[n + p:, :n] = G
    zsl = slice(n + p, dim)
    reg = np.concatenate([np.full(n, cfg.static_reg), np.full(p + mc, -cfg.static_reg)])
    pvec = np.concatenate([c, beq, h])
    qvec = np.concatenate([c, -beq, -h])

    x = np.zeros(n)
    yeq = np.zeros(p)
    s = K.unit(l, q)
    z = K.unit(l, q)
    tau, kappa = 1.0, 1.0

    status = MAX_ITERS
    history = []
    it = 0
    stall = 0
    best = (np.inf, None)

    def user_point():
        return sc.unscale(x, yeq, z, s, tau)

    for it in range(cfg.max_iters + 1):
        xu, yu, su = user_point()
        pres, dres, gap = residuals(prog, xu, yu, su)
        pcost, dcost = float(prog.c @ xu), float(-prog.b @ yu)
        gap_abs = abs(pcost - dcost)
        mu = (s @ z + tau * kappa) / (nu + 1)
        history.append((it, pcost, dcost, pres, dres, gap, mu, tau, kappa))
        merit = max(pres, dres, min(gap, gap_abs))
        if merit < best[0]:
            best = (merit, (xu, yu, su))
        if cfg.verbose:
            print(f"{it:3d} {pcost:+.6e} {dcost:+.6e} pres={pres:.1e} dres={dres:.1e} "
                  f"gap={gap:.1e} mu={mu:.1e} tau={tau:.1e} kap={kappa:.1e}")
        if pres <= cfg.feastol and dres <= cfg.feastol and (
                gap_abs <= cfg.abstol or gap <= cfg.reltol):
            status = OPTIMAL
            break
        # infeasibility certificates, checked on the raw (tau-free) iterates
        if tau < kappa or tau < 1e-6:
            cert = _certificate(sc, x, yeq, z, s, cfg.infeastol)
            if cert is not None:
                status = cert
                break
        if it == cfg.max_iters:
            break

        try:
            d, eta, wbar, lam = K.nt_scaling(s, z, l, q)
            Kmat[zsl, zsl] = -K.wtw_dense(d, eta, wbar, l, q)
            lu = la.lu_factor(Kmat + np.diag(reg), check_finite=False)
        except (la.LinAlgError, ValueError, FloatingPointError, ZeroDivisionError):
            status = NUMERICAL_FAILURE
            break

        def ksolve(rhs):
            u = la.lu_solve(lu, rhs, check_finite=False)
            r = rhs - Kmat @ u
            rn = _ninf(r)
            for _ in range(cfg.refine_steps):
                if rn <= 1e-15 * max(1.0, _ninf(rhs)):
                    break
                v = u + la.lu_solve(lu, r, check_finite=False)
                r2 = rhs - Kmat @ v
                if _ninf(r2) >= rn:
                    break
                u, r, rn = v, r2, _ninf(r2)
            return u

        rx = Aeq.T @ yeq + G.T @ z + c * tau
        ry = Aeq @ x - beq * tau
        rz = G @ x + s - h * tau
        rt = kappa + c @ x + beq @ yeq + h @ z

        u2 = ksolve(qvec)
        denom_base = pvec @ u2

        def direction(eta_lin, rc, rtk):
            wl = K.apply_w(d, eta, wbar, l, q, K.jordan_div(lam, rc, l, q))
            rhs = np.concatenate([-eta_lin * rx, -eta_lin * ry, -eta_lin * rz - wl])
            rhs_t = -eta_lin * rt - rtk / tau
            u1 = ksolve(rhs)
            dtau = (pvec @ u1 - rhs_t) / (denom_base + kappa / tau)
            u = u1 - dtau * u2
            dx, dy, dz = u[:n], u[n:n + p], u[n + p:]
            ds = wl - K.apply_w(d, eta, wbar, l, q, K.apply_w(d, eta, wbar, l, q, dz))
            dkap = (rtk - kappa * dtau) / tau
            return dx, dy, dz, ds, dtau, dkap

        def step_len(dz, ds, dtau, dkap):
            a = min(K.max_step(s, ds, l, q), K.max_step(z, dz, l, q))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkap < 0:
                a = min(a, -kappa / dkap)
            return a

        lamsq = K.jordan_prod(lam, lam, l, q)
        e = K.unit(l, q)
        # predictor
        dxa, dya, dza, dsa, dta, dka = direction(1.0, -lamsq, -tau * kappa)
        aa = min(1.0, step_len(dza, dsa, dta, dka))
        sigma = (1.0 - aa) ** 3
        # corrector
        dsw = K.apply_w(d, eta, wbar, l, q, dsa, True)
        dzw = K.apply_w(d, eta, wbar, l, q, dza)
        rc = -lamsq - K.jordan_prod(dsw, dzw, l, q) + sigma * mu * e
        rtk = -tau * kappa - dta * dka + sigma * mu
        dx, dy, dz, ds, dtau, dkap = direction(1.0 - sigma, rc, rtk)
        amax = step_len(dz, ds, dtau, dkap)
        alpha = min(1.0, cfg.step_fraction * amax)
        if not np.isfinite(alpha) or not np.all(np.isfinite(dx)):
            status = NUMERICAL_FAILURE
            break
        if alpha < 1e-10:
            stall += 1
            if stall >= 3:
                status = NUMERICAL_FAILURE
                break
        else:
            stall = 0
        x = x + alpha * dx
        yeq = yeq + alpha * dy
        z = z + alpha * dz
        s = s + alpha * ds
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkap

    xu, yu, su = user_point()
    if status in (MAX_ITERS, NUMERICAL_FAILURE) and best[0] <= cfg.inaccurate_tol:
        status = OPTIMAL_INACCURATE
        xu, yu, su = best[1]
    elif status in (PRIMAL_INFEASIBLE, DUAL_INFEASIBLE):
        # certificates are returned unnormalised by tau
        xu, yu, su = sc.unscale(x, yeq, z, s, 1.0)
    pres, dres, gap = residuals(prog, xu, yu, su)
    return SolverResult(
        status=status, x=xu, y=yu, s=su,
        pobj=float(prog.c @ xu), dobj=float(-prog.b @ yu),
        pres=pres, dres=dres, gap=gap, iterations=it,
        solve_time=time.perf_counter() - t0, history=history,
    )


def _certificate(sc, x, yeq, z, s, tol):
    """Return an infeasibility status if the raw iterates certify one.

    Tested on the equilibrated data, where ``b`` and ``c`` have unit scale,
    so the thresholds do not depend on the magnitudes of the user's rows.
    """
    by = float(sc.beq @ yeq + sc.h @ z)
    if by < 0:
        r = sc.Aeq.T @ yeq + sc.G.T @ z
        if _ninf(r) <= tol * (-by):
            return PRIMAL_INFEASIBLE
    cx = float(sc.c @ x)
    if cx < 0:
        r = np.concatenate([sc.Aeq @ x, sc.G @ x + s])
        if _ninf(r) <= tol * (-cx):
            return DUAL_INFEASIBLE
    return None
