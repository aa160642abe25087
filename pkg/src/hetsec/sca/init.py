"""Phase-1 search for a feasible starting point of the SCA loop.

The macro beams come from a power-minimisation SOCP under the macro-user
SINR constraints, with the femto interference held fixed.  The femto
beams use a few fixed directions and the two femto power levels are
chosen by a grid over their split and a bisection on their sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from ..channels import ChannelSet
from ..model import BeamformingSolution, NetworkConfig, audit, secrecy_rate_raw
from ..solver.ipm import SolverConfig, solve
from .forms import Affine, ProgramBuilder
from .minorants import inner_forms, taylor_form
from .subproblem import ExpansionPoint, Normalized

# relative margin kept on every constraint so the audit passes after rounding
MARGIN = 1e-7
# share of femto power on the information beam; never 0, since a zero beam
# makes its own tangent minorant vanish and the SCA could not leave it
DEFAULT_SPLITS = (0.02, 0.2, 0.4, 0.6, 0.8, 1.0)


@dataclass
class InitResult:
    feasible: bool
    point: ExpansionPoint | None
    solution: BeamformingSolution | None
    reason: str = ""
    secrecy_rate: float = 0.0


def mbs_power_min(nz: Normalized, cfg: NetworkConfig, interference, solver: SolverConfig | None = None):
    """Smallest-power macro beams meeting every MU SINR target.

    ``interference[m]`` is the femto interference at MU ``m`` in noise
    units.  Returns ``(w_m, power)`` in normalised units or ``(None, inf)``.
    """
    M, N = cfg.m, cfg.n_m
    n = 2 * M * N + 1
    t = n - 1
    B = ProgramBuilder(n)
    B.add_soc([Affine.var(t)] + [Affine.var(i) for i in range(2 * M * N)])
    gam = np.asarray(cfg.gamma) * (1.0 + MARGIN)
    for m in range(M):
        re, im = inner_forms(nz.h_m[m], 2 * N * m)
        rows = [re / math.sqrt(gam[m])]
        for i in range(M):
            if i != m:
                rows += list(inner_forms(nz.h_m[m], 2 * N * i))
        rows.append(Affine.constant(math.sqrt(1.0 + float(interference[m]))))
        B.add_soc(rows)
        B.add_eq(im)
    c = np.zeros(n)
    c[t] = 1.0
    res = solve(B.build(c), solver)
    if not res.solved:
        return None, math.inf
    x = res.x
    w = np.stack([x[2 * N * m:2 * N * m + N] + 1j * x[2 * N * m + N:2 * N * (m + 1)]
                  for m in range(M)])
    return w, float(np.sum(np.abs(w) ** 2))


def _unit(v):
    nv = np.linalg.norm(v)
    return v / nv if nv > 1e-300 else None


def _null_projection(rows, v):
    """Component of ``v`` orthogonal to the span of ``rows``."""
    if len(rows) == 0:
        return v
    A = np.asarray(rows)
    ns = la.null_space(A.conj())
    if ns.shape[1] == 0:
        return None
    return ns @ (ns.conj().T @ v)


def ir_directions(nz: Normalized, cfg: NetworkConfig):
    """Candidate unit directions for the information beam."""
    cands = [_unit(nz.h_i)]
    if cfg.n_f > cfg.m:
        p = _null_projection(nz.l_m, nz.h_i)
        cands.append(_unit(p) if p is not None else None)
    if cfg.k and cfg.n_f > cfg.k:
        p = _null_projection(nz.g_k, nz.h_i)
        cands.append(_unit(p) if p is not None else None)
    if cfg.k and cfg.n_f > cfg.m + cfg.k:
        p = _null_projection(np.vstack([nz.l_m, nz.g_k]), nz.h_i)
        cands.append(_unit(p) if p is not None else None)
    return [u for u in cands if u is not None]


def an_directions(nz: Normalized, cfg: NetworkConfig, rounds: int = 60):
    """Candidate unit directions for the AN vector.

    Each is the dominant eigenvector of a weighted ``sum_k g_k g_k^H``,
    with weights re-balanced towards the worst-served ER (a cheap max-min
    heuristic).  It is computed freely and inside the orthogonal complements
    of ``h_I``, of the MU channels, and of both.
    """
    if cfg.k == 0:
        return []
    e = np.maximum(nz.eh_target, 1.0)
    projs = [None]
    for rows in ([nz.h_i], nz.l_m, np.vstack([nz.l_m, nz.h_i])):
        ns = la.null_space(np.asarray(rows).conj())
        if ns.shape[1]:
            projs.append(ns @ ns.conj().T)
    out = []
    for proj in projs:
        wts = np.full(cfg.k, 1.0 / cfg.k)
        best, v_best = -1.0, None
        for _ in range(rounds):
            S = sum(wk / ek * np.outer(g, g.conj()) for wk, ek, g in zip(wts, e, nz.g_k))
            if proj is not None:
                S = proj @ S @ proj
            vals, vecs = np.linalg.eigh(S)
            if vals[-1] <= 0:
                break
            v = vecs[:, -1]
            served = np.array([abs(np.vdot(g, v)) ** 2 for g in nz.g_k]) / e
            if served.min() > best:
                best, v_best = served.min(), v
            # damped multiplicative update towards the worst-served ER
            wts = wts / np.sqrt(np.maximum(served, 1e-300))
            wts /= wts.sum()
        if v_best is not None:
            out.append(v_best)
    return out


def _fbs_power_floor(a, b, target, theta):
    """Least femto power with split ``theta`` meeting every EH target."""
    need = 0.0
    for ak, bk, ek in zip(a, b, target):
        if ek <= 0:
            continue
        gain = theta * ak + (1.0 - theta) * bk
        if gain <= 0:
            return math.inf
        need = max(need, ek / gain)
    return need


def eh_phase1(nz: Normalized, cfg: NetworkConfig, start: BeamformingSolution, with_an: bool = True,
              solver: SolverConfig | None = None, max_iters: int = 30, goal: float = 1.01):
    """Feasibility SCA that raises the worst EH ratio ``min_k E_k / Q_k``.

    Power and MU SINR constraints are exact cones; the EH terms use tangent
    minorants, so every iterate is feasible for them and the ratio never
    drops.  ``start`` is in normalised units.  Returns the normalised
    solution once the ratio reaches ``goal`` (or ``None``).
    """
    M, N, NF = cfg.m, cfg.n_m, cfg.n_f
    wi0 = 2 * M * N
    ve0 = wi0 + 2 * NF
    nb = ve0 + (2 * NF if with_an else 0)
    t = nb
    target = np.maximum(nz.eh_target, 0.0) * (1.0 + MARGIN)
    gam = np.asarray(cfg.gamma) * (1.0 + MARGIN)
    cur = start
    prev = -math.inf
    for _ in range(max_iters):
        B = ProgramBuilder(nb + 1)
        B.add_soc([Affine.constant(math.sqrt(1.0 - MARGIN))] + [Affine.var(i) for i in range(nb)])
        for m in range(M):
            re, im = inner_forms(nz.h_m[m], 2 * N * m)
            rows = [re / math.sqrt(gam[m])]
            for i in range(M):
                if i != m:
                    rows += list(inner_forms(nz.h_m[m], 2 * N * i))
            rows += list(inner_forms(nz.l_m[m], wi0))
            if with_an:
                rows += list(inner_forms(nz.l_m[m], ve0))
            rows.append(Affine.constant(1.0))
            B.add_soc(rows)
            B.add_eq(im)
        for k in range(cfg.k):
            if target[k] <= 0:
                continue
            f = taylor_form(nz.g_k[k], cur.w_i, wi0)
            if with_an:
                f = f + taylor_form(nz.g_k[k], cur.v_e, ve0)
            B.add_ge(f / target[k], Affine.var(t))
        B.add_ge(goal, Affine.var(t))
        c = np.zeros(nb + 1)
        c[t] = -1.0
        res = solve(B.build(c), solver)
        if not res.solved:
            return None
        x = res.x
        cur = BeamformingSolution(
            np.stack([x[2 * N * m:2 * N * m + N] + 1j * x[2 * N * m + N:2 * N * (m + 1)]
                      for m in range(M)]),
            x[wi0:wi0 + NF] + 1j * x[wi0 + NF:wi0 + 2 * NF],
            x[ve0:ve0 + NF] + 1j * x[ve0 + NF:ve0 + 2 * NF] if with_an else np.zeros(NF, complex),
        )
        ratio = min((( abs(np.vdot(g, cur.w_i)) ** 2 + abs(np.vdot(g, cur.v_e)) ** 2) / e
                     for g, e in zip(nz.g_k, target) if e > 0), default=math.inf)
        if ratio >= 1.0:
            return cur
        if ratio - prev < 1e-6 * max(1.0, abs(ratio)):
            return None
        prev = ratio
    return None


def initialize(ch: ChannelSet, cfg: NetworkConfig, with_an: bool = True,
               solver: SolverConfig | None = None, thetas=None, bisect_steps: int = 10,
               refine_top: int = 3) -> InitResult:
    """Search for a point feasible for the original problem.

    Every candidate is audited; the one with the largest secrecy rate wins.
    With AN, the zero-forcing design also competes as a candidate.
    If no fixed-direction candidate works, a feasibility SCA on the EH
    ratio is tried before giving up.
    """
    nz = Normalized(ch, cfg)
    target = np.maximum(nz.eh_target, 0.0) * (1.0 + MARGIN)
    budget = 1.0 - MARGIN

    w0, p0 = mbs_power_min(nz, cfg, np.zeros(cfg.m), solver)
    if w0 is None or p0 > budget:
        return InitResult(False, None, None, "macro SINR targets exceed the power budget")

    an = an_directions(nz, cfg) if with_an else []
    combos = []
    for u_i in ir_directions(nz, cfg):
        if not an:
            combos.append((u_i, None, 1.0))
        for u_e in an:
            for th in (DEFAULT_SPLITS if thetas is None else thetas):
                combos.append((u_i, u_e, float(th)))

    def build(w_m, pf, u_i, u_e, th):
        v_e = math.sqrt((1 - th) * pf) * u_e if u_e is not None else np.zeros(cfg.n_f, complex)
        return BeamformingSolution(w_m, math.sqrt(th * pf) * u_i, v_e).scaled(nz.sqrt_p)

    # stage 1: every direction pair and split at its least EH-feasible power
    found = []
    for u_i, u_e, th in combos:
        a = [abs(np.vdot(g, u_i)) ** 2 for g in nz.g_k]
        b = [abs(np.vdot(g, u_e)) ** 2 for g in nz.g_k] if u_e is not None else [0.0] * cfg.k
        li = np.array([abs(np.vdot(l, u_i)) ** 2 for l in nz.l_m])
        le = (np.array([abs(np.vdot(l, u_e)) ** 2 for l in nz.l_m])
              if u_e is not None else np.zeros(cfg.m))
        lo = _fbs_power_floor(a, b, target, th)
        if lo > budget:
            continue
        leak = th * li + (1 - th) * le
        w, pm = mbs_power_min(nz, cfg, lo * leak, solver)
        if w is None or pm + lo > budget:
            continue
        sol = build(w, lo, u_i, u_e, th)
        if audit(sol, ch, cfg).feasible:
            found.append((secrecy_rate_raw(sol, ch, cfg), sol, lo, pm, leak, (u_i, u_e, th)))

    # stage 2: raise the femto power of the most promising candidates
    found.sort(key=lambda f: -f[0])
    best = (found[0][0], found[0][1]) if found else None
    for rate0, _, lo, pm, leak, (u_i, u_e, th) in found[:refine_top]:

        def attempt(pf):
            w, p = mbs_power_min(nz, cfg, pf * leak, solver)
            return w if w is not None and p + pf <= budget else None

        hi = budget - pm
        w = attempt(hi)
        if w is not None:
            lo = hi
        else:
            w = None
            for _ in range(bisect_steps):
                mid = 0.5 * (lo + hi)
                trial = attempt(mid)
                if trial is None:
                    hi = mid
                else:
                    lo, w = mid, trial
        if w is None:
            continue
        sol = build(w, lo, u_i, u_e, th)
        if audit(sol, ch, cfg).feasible:
            rate = secrecy_rate_raw(sol, ch, cfg)
            if rate > best[0]:
                best = (rate, sol)
    if with_an:
        # the zero-forcing design is one more feasible candidate
        from ..baselines import zf_scheme
        zf = zf_scheme(ch, cfg)
        if zf.feasible and np.linalg.norm(zf.solution.v_e) > 0:
            rate = secrecy_rate_raw(zf.solution, ch, cfg)
            if best is None or rate > best[0]:
                best = (rate, zf.solution)
    if best is None and cfg.k:
        # fall back to a feasibility SCA started from the best EH direction pair
        u_i = ir_directions(nz, cfg)[0]
        for u_e in (an or [u_i]):
            start = BeamformingSolution(w0, math.sqrt(0.5) * u_i,
                                        math.sqrt(0.5) * u_e if with_an else np.zeros(cfg.n_f, complex))
            if not with_an:
                start.w_i = u_e
            got = eh_phase1(nz, cfg, start, with_an, solver)
            if got is None:
                continue
            sol = got.scaled(nz.sqrt_p)
            if audit(sol, ch, cfg).feasible:
                rate = secrecy_rate_raw(sol, ch, cfg)
                if best is None or rate > best[0]:
                    best = (rate, sol)
    if best is None:
        return InitResult(False, None, None, "no femto power split meets the EH and SINR targets")
    rate, sol = best
    return InitResult(True, ExpansionPoint.from_solution(sol, ch, cfg), sol, "", max(0.0, rate))
