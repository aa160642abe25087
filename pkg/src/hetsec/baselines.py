"""Comparison schemes: the full AN-aided SCA, SCA without AN, and zero forcing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .channels import ChannelSet
from .model import BeamformingSolution, NetworkConfig, audit, secrecy_rate_raw
from .sca.algorithm import SCATrace, run_sca
from .sca.subproblem import SCAConfig

PROPOSED = "proposed"
NO_AN = "no_an"
ZF = "zf"
SCHEMES = (PROPOSED, NO_AN, ZF)

# relative power back-off so rounding never breaks the audit
_BACKOFF = 1e-7


@dataclass
class BaselineResult:
    scheme: str
    solution: BeamformingSolution | None
    secrecy_rate: float
    feasible: bool
    worst_violation: float = math.inf
    iterations: int = 0
    status: str = ""
    note: str = ""
    trace: SCATrace | None = None

    @property
    def secrecy_feasible(self) -> bool:
        return self.feasible and self.status != "secrecy_infeasible"


def _from_trace(scheme: str, tr: SCATrace) -> BaselineResult:
    if tr.solution is None:
        return BaselineResult(scheme, None, 0.0, False, math.inf, 0, tr.status, tr.init_reason, tr)
    a = tr.audit
    status = tr.status if tr.secrecy_rate_raw >= 0 else "secrecy_infeasible"
    return BaselineResult(scheme, tr.solution, tr.secrecy_rate, bool(a["feasible"]),
                          float(a["worst_violation"]), tr.iterations, status, "", tr)


def proposed_scheme(ch: ChannelSet, cfg: NetworkConfig, scfg: SCAConfig | None = None) -> BaselineResult:
    return _from_trace(PROPOSED, run_sca(ch, cfg, scfg, with_an=True))


def no_an_scheme(ch: ChannelSet, cfg: NetworkConfig, scfg: SCAConfig | None = None) -> BaselineResult:
    """SCA with the AN vector and all of its rows removed."""
    return _from_trace(NO_AN, run_sca(ch, cfg, scfg, with_an=False))


def _null_basis(rows, n):
    if len(rows) == 0:
        return np.eye(n, dtype=complex)
    return la.null_space(np.conj(np.asarray(rows)))


def _infeasible(note: str) -> BaselineResult:
    return BaselineResult(ZF, None, 0.0, False, math.inf, 0, "infeasible", note)


def zf_scheme(ch: ChannelSet, cfg: NetworkConfig, strict: bool = False) -> BaselineResult:
    """Zero-forcing beams with closed-form powers.

    ``w_m`` nulls the other MUs and the IR; ``w_I`` is ``h_I`` projected onto
    the null space of the ER and MU channels; ``v_E`` lives in the null
    space of ``h_I`` and the MU channels and points at the strongest ER
    direction there.  When the ``w_I`` null space is trivial
    (``N_F <= K + M``) the scheme only nulls the ERs and lets the macro beams
    absorb the leak at the MUs, unless ``strict`` is set.
    """
    M, K = cfg.m, cfg.k
    note = ""
    # information beam
    B = _null_basis(np.vstack([ch.g_k, ch.l_m]) if K else ch.l_m, cfg.n_f)
    if B.shape[1] == 0:
        if strict:
            return _infeasible("trivial null space for the information beam")
        B = _null_basis(ch.g_k, cfg.n_f) if K else np.eye(cfg.n_f, dtype=complex)
        note = "information beam nulls the ERs only"
        if B.shape[1] == 0:
            return _infeasible("trivial null space for the information beam")
    p = B @ (B.conj().T @ ch.h_i)
    if np.linalg.norm(p) <= 1e-12 * np.linalg.norm(ch.h_i):
        return _infeasible("IR channel lies in the nulled span")
    u_i = p / np.linalg.norm(p)

    # AN carries all harvested energy
    e_need = np.maximum(np.asarray(cfg.q) / cfg.xi - np.asarray(cfg.sigma2_e), 0.0) * (1 + _BACKOFF)
    u_e = None
    p_e = 0.0
    if K and np.any(e_need > 0):
        Bv = _null_basis(np.vstack([ch.h_i[None, :], ch.l_m]), cfg.n_f)
        if Bv.shape[1] == 0:
            return _infeasible("trivial null space for the AN vector")
        S = sum(np.outer(g, g.conj()) for g in ch.g_k)
        _, vecs = np.linalg.eigh(Bv.conj().T @ S @ Bv)
        u_e = Bv @ vecs[:, -1]
        u_e /= np.linalg.norm(u_e)
        gains = np.array([abs(np.vdot(g, u_e)) ** 2 for g in ch.g_k])
        if np.any((gains <= 0) & (e_need > 0)):
            return _infeasible("AN direction misses an ER")
        p_e = float(np.max(np.where(e_need > 0, e_need / np.maximum(gains, 1e-300), 0.0)))

    # macro beams: null the other MUs and the IR
    d, u_m = np.zeros(M), []
    for m in range(M):
        others = [ch.h_m[i] for i in range(M) if i != m] + [ch.h_i0]
        Bm = _null_basis(np.asarray(others), cfg.n_m)
        if Bm.shape[1] == 0:
            return _infeasible("trivial null space for a macro beam")
        v = Bm @ (Bm.conj().T @ ch.h_m[m])
        if np.linalg.norm(v) == 0:
            return _infeasible("MU channel lies in the nulled span")
        v /= np.linalg.norm(v)
        u_m.append(v)
        d[m] = abs(np.vdot(ch.h_m[m], v)) ** 2
    leak_i = np.array([abs(np.vdot(l, u_i)) ** 2 for l in ch.l_m])
    leak_e = (np.array([abs(np.vdot(l, u_e)) ** 2 for l in ch.l_m]) if u_e is not None
              else np.zeros(M))
    gam = np.asarray(cfg.gamma) * (1 + _BACKOFF)
    budget = cfg.p_th * (1 - _BACKOFF)
    # p_m = gam_m (p_I leak_i + p_E leak_e + sigma^2) / d_m, and the total is linear in p_I
    base = float(np.sum(gam * (p_e * leak_e + cfg.sigma2_m) / d)) + p_e
    slope = 1.0 + float(np.sum(gam * leak_i / d))
    p_i = (budget - base) / slope
    if p_i <= 0:
        return _infeasible("power budget cannot cover the MU and EH requirements")
    p_m = gam * (p_i * leak_i + p_e * leak_e + cfg.sigma2_m) / d
    sol = BeamformingSolution(
        np.stack([math.sqrt(pm) * u for pm, u in zip(p_m, u_m)]),
        math.sqrt(p_i) * u_i,
        math.sqrt(p_e) * u_e if u_e is not None else np.zeros(cfg.n_f, complex),
    )
    a = audit(sol, ch, cfg)
    raw = secrecy_rate_raw(sol, ch, cfg)
    status = "solved" if raw >= 0 else "secrecy_infeasible"
    return BaselineResult(ZF, sol, max(0.0, raw), a.feasible, a.worst_violation, 0, status, note)


def run_scheme(name: str, ch: ChannelSet, cfg: NetworkConfig,
               scfg: SCAConfig | None = None) -> BaselineResult:
    if name == PROPOSED:
        return proposed_scheme(ch, cfg, scfg)
    if name == NO_AN:
        return no_an_scheme(ch, cfg, scfg)
    if name == ZF:
        return zf_scheme(ch, cfg)
    raise ValueError(f"unknown scheme {name!r}; choose from {SCHEMES}")
