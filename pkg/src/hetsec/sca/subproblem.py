"""Assembly of the convex SOCP solved at every SCA iteration.

Internally all channels are normalised by the receiver noise standard
deviation and all beamformers by ``sqrt(P_th)``, so noise powers become 1
and the power budget becomes the unit ball.  SINR-type slacks keep their
meaning; ``mu_i``, ``eta_i``, ``s_*`` and ``t_*`` are in noise units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..channels import ChannelSet
from ..model import BeamformingSolution, NetworkConfig
from ..solver.ipm import SolverConfig
from ..solver.program import ConicProgram
from .forms import Affine, ProgramBuilder
from .layout import SubproblemLayout
from .minorants import exp_soc_block, inner_forms, lemma1_rows, quad_over_lin_minorant, taylor_form

EH_MODES = ("separated", "as_printed")
OBJECTIVE_MODES = ("gamma_diff", "gamma")


@dataclass
class SCAConfig:
    eps_sca: float = 1e-4
    max_iters: int = 30
    q: int = 6
    eh_mode: str = "separated"
    objective_mode: str = "gamma"
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.eps_sca <= 0:
            raise ValueError("eps_sca must be positive")
        if self.q < 2:
            raise ValueError("q must be >= 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.eh_mode not in EH_MODES:
            raise ValueError(f"eh_mode must be one of {EH_MODES}")
        if self.objective_mode not in OBJECTIVE_MODES:
            raise ValueError(f"objective_mode must be one of {OBJECTIVE_MODES}")


class Normalized:
    """Noise- and power-normalised channels of one instance."""

    def __init__(self, ch: ChannelSet, cfg: NetworkConfig):
        self.sqrt_p = math.sqrt(cfg.p_th)
        sm = np.sqrt(cfg.sigma2_m)[:, None]
        se = np.sqrt(cfg.sigma2_e)[:, None]
        si = math.sqrt(cfg.sigma2_i)
        self.h_m = ch.h_m * self.sqrt_p / sm
        self.l_m = ch.l_m * self.sqrt_p / sm
        self.h_i0 = ch.h_i0 * self.sqrt_p / si
        self.h_i = ch.h_i * self.sqrt_p / si
        self.g_k0 = ch.g_k0 * self.sqrt_p / se if cfg.k else ch.g_k0
        self.g_k = ch.g_k * self.sqrt_p / se if cfg.k else ch.g_k
        # required |g w_i|^2 + |g v_e|^2 in noise units
        self.eh_target = cfg.q / (cfg.xi * cfg.sigma2_e) - 1.0
        self.inv_sqrt_gamma = 1.0 / np.sqrt(cfg.gamma)


@dataclass
class ExpansionPoint:
    """Point the SCA restrictions are built around.

    Beamformers are in watts^(1/2); ``mu_i``, ``eta_i`` are in noise units
    and ``gamma_e`` is a linear SINR.
    """

    w_m: np.ndarray
    w_i: np.ndarray
    v_e: np.ndarray
    mu_i: float
    eta_i: float
    gamma_e: float

    def __post_init__(self):
        if not self.eta_i > 0:
            raise ValueError("expansion point needs eta_i > 0")

    @classmethod
    def from_solution(cls, sol: BeamformingSolution, ch: ChannelSet, cfg: NetworkConfig):
        """Tight slacks for a beamforming solution (used by the initialisation)."""
        from ..model import sinr_er
        nz = Normalized(ch, cfg)
        wm = sol.w_m / nz.sqrt_p
        wi = sol.w_i / nz.sqrt_p
        ve = sol.v_e / nz.sqrt_p
        mu = abs(np.vdot(nz.h_i, wi))
        eta = float(np.sum(np.abs(np.conj(nz.h_i0) @ wm.T) ** 2) + abs(np.vdot(nz.h_i, ve)) ** 2 + 1)
        ge = max((sinr_er(sol, ch, cfg, k) for k in range(cfg.k)), default=0.0)
        return cls(sol.w_m.copy(), sol.w_i.copy(), sol.v_e.copy(), mu, eta, ge)

    def to_json(self) -> dict:
        sol = BeamformingSolution(self.w_m, self.w_i, self.v_e).to_json()
        sol.update(mu_i=self.mu_i, eta_i=self.eta_i, gamma_e=self.gamma_e)
        return sol


@dataclass
class Subproblem:
    program: ConicProgram
    layout: SubproblemLayout
    norm: Normalized
    tags: dict
    scale: np.ndarray  # model value = scale * solver variable
    rows: dict = field(default_factory=dict)  # tag -> first program row per constraint

    def values(self, x) -> np.ndarray:
        """Solver vector mapped back to model units."""
        return self.scale * np.asarray(x, float)

    def solution(self, x) -> BeamformingSolution:
        L, nz = self.layout, self.norm
        x = self.values(x)
        wm = np.stack([_unlift(x, L.w_m_start(m), L.n_m) for m in range(L.m)])
        wi = _unlift(x, L.start("w_i"), L.n_f)
        ve = _unlift(x, L.start("v_e"), L.n_f) if L.with_an else np.zeros(L.n_f, complex)
        return BeamformingSolution(wm * nz.sqrt_p, wi * nz.sqrt_p, ve * nz.sqrt_p)

    def next_point(self, x) -> ExpansionPoint:
        sol = self.solution(x)
        L = self.layout
        x = self.values(x)
        return ExpansionPoint(sol.w_m, sol.w_i, sol.v_e, float(x[L.index("mu_i")]),
                              float(x[L.index("eta_i")]), max(0.0, float(x[L.index("gamma_e")])))

    def value(self, x, name, i=0) -> float:
        j = self.layout.index(name, i)
        return float(self.scale[j] * x[j])


def _unlift(x, start, n):
    return x[start:start + n] + 1j * x[start + n:start + 2 * n]


def build_subproblem(ch: ChannelSet, cfg: NetworkConfig, pt: ExpansionPoint,
                     scfg: SCAConfig, with_an: bool = True) -> Subproblem:
    if pt.eta_i <= 0:
        raise ValueError("expansion point needs eta_i > 0")
    M, K = cfg.m, cfg.k
    if pt.w_m.shape != (M, cfg.n_m) or pt.w_i.shape != (cfg.n_f,) or pt.v_e.shape != (cfg.n_f,):
        raise ValueError("expansion point shapes do not match the configuration")
    nz = Normalized(ch, cfg)
    L = SubproblemLayout(M, K, cfg.n_m, cfg.n_f, scfg.q, with_an)
    B = ProgramBuilder(L.n, L.names())

    wm_t = pt.w_m / nz.sqrt_p
    wi_t = pt.w_i / nz.sqrt_p
    ve_t = pt.v_e / nz.sqrt_p
    c_hint = math.log2(1.0 + pt.mu_i ** 2 / pt.eta_i)
    scale = _variable_scales(L, nz, pt, wm_t, wi_t, ve_t, scfg.q, c_hint)
    var = lambda name, i=0: Affine.var(L.index(name, i), scale[L.index(name, i)])  # noqa: E731
    wi0 = L.start("w_i")
    ve0 = L.start("v_e") if with_an else None

    # total power, normalised budget 1
    nw = 2 * M * cfg.n_m + 2 * cfg.n_f * (2 if with_an else 1)
    B.add_soc([Affine.constant(1.0)] + [Affine.var(L.start("w_m") + i) for i in range(nw)],
              tag="power")

    # IR side
    for m in range(M):
        re, im = inner_forms(nz.h_i0, L.w_m_start(m))
        B.add_soc([var("s_m", m), re, im], tag="ir_mbs_abs")
    if with_an:
        re, im = inner_forms(nz.h_i, ve0)
        B.add_soc([var("s_e"), re, im], tag="ir_an_abs")
    B.add_ge(taylor_form(nz.h_i, wi_t, wi0), var("s_i"), tag="ir_signal_minorant")
    s_i_ref = max(abs(np.vdot(nz.h_i, wi_t)) ** 2, pt.mu_i ** 2, 1e-12)
    B.add_soc(lemma1_rows(var("mu_i"), var("s_i"), Affine.constant(1.0), math.sqrt(s_i_ref)),
              tag="ir_mu_cone")
    zs = [var("s_m", m) for m in range(M)]
    if with_an:
        zs.append(var("s_e"))
    zs.append(Affine.constant(1.0))
    B.add_soc(lemma1_rows(zs, var("eta_i"), Affine.constant(1.0), math.sqrt(pt.eta_i)),
              tag="ir_eta_cone")
    a_mu, a_eta = quad_over_lin_minorant(pt.mu_i, pt.eta_i)
    B.add_ge(var("mu_i") * a_mu + var("eta_i") * a_eta, var("gamma_i"), tag="ir_qol_minorant")

    # ER side
    gamma_ref = max(pt.gamma_e, 1e-3)
    for k in range(K):
        re, im = inner_forms(nz.g_k[k], wi0)
        B.add_soc([var("t_k", k), re, im], tag="er_abs")
        b_k = Affine.constant(1.0)
        b_ref = 1.0
        for m in range(M):
            j = L.t_k0_index(k, m)
            tk0 = Affine.var(j, scale[j])
            B.add_ge(taylor_form(nz.g_k0[k], wm_t[m], L.w_m_start(m)), tk0, tag="er_mbs_minorant")
            b_k = b_k + tk0
            b_ref += abs(np.vdot(nz.g_k0[k], wm_t[m])) ** 2
        if with_an:
            B.add_ge(taylor_form(nz.g_k[k], ve_t, ve0), var("t_e", k), tag="er_an_minorant")
            b_k = b_k + var("t_e", k)
            b_ref += abs(np.vdot(nz.g_k[k], ve_t)) ** 2
        B.add_soc(lemma1_rows(var("t_k", k), var("gamma_e"), b_k, math.sqrt(gamma_ref / b_ref)),
                  tag="er_sinr_cone")
    if K == 0:
        B.add_eq(var("gamma_e"), tag="no_er")

    # macro users
    for m in range(M):
        h = nz.h_m[m]
        re, im = inner_forms(h, L.w_m_start(m))
        rows = [re * nz.inv_sqrt_gamma[m]]
        for i in range(M):
            if i != m:
                rows += list(inner_forms(h, L.w_m_start(i)))
        rows += list(inner_forms(nz.l_m[m], wi0))
        if with_an:
            rows += list(inner_forms(nz.l_m[m], ve0))
        rows.append(Affine.constant(1.0))
        B.add_soc(rows, tag="mu_sinr")
        B.add_eq(im, tag="mu_phase")

    # energy harvesting
    for k in range(K):
        g = nz.g_k[k]
        if with_an and scfg.eh_mode == "as_printed":
            from .minorants import taylor_quadratic_minorant
            coef, const = taylor_quadratic_minorant(g, wi_t + ve_t)
            harv = Affine.block(wi0, coef) + Affine.block(ve0, coef) + const
        else:
            harv = taylor_form(g, wi_t, wi0)
            if with_an:
                harv = harv + taylor_form(g, ve_t, ve0)
        B.add_ge(harv, float(nz.eh_target[k]), tag="eh_minorant")

    # secrecy chain
    ge = pt.gamma_e
    log_ub = (math.log2(1.0 + ge)
              + (var("gamma_e") - ge) * (1.0 / ((1.0 + ge) * math.log(2.0))))
    B.add_ge(var("c") - log_ub, var("gamma"), tag="rate_linearization")
    taus = [var("tau", j) for j in range(scfg.q + 4)]
    nonneg, socs = exp_soc_block(scfg.q, var("c"), var("gamma_i"), taus, c_hint)
    for f in nonneg:
        B.add_ge(f, tag="exp_linear")
    for blk in socs:
        B.add_soc(blk, tag="exp_cone")

    # objective in solver units, divided by its largest coefficient
    c = np.zeros(L.n)
    if scfg.objective_mode == "gamma_diff":
        c[L.index("gamma_i")] = -scale[L.index("gamma_i")]
        c[L.index("gamma_e")] = scale[L.index("gamma_e")]
    else:
        c[L.index("gamma")] = -scale[L.index("gamma")]
    c /= np.abs(c).max()
    prog = B.build(c)
    return Subproblem(prog, L, nz, dict(B.tags), scale, dict(B.row_map))


def _variable_scales(L, nz, pt, wm_t, wi_t, ve_t, q, c_hint):
    """Expected magnitude of every variable at the expansion point (at least 1)."""
    from .minorants import exp_block_magnitudes
    s = np.ones(L.n)

    def put(name, v, i=0):
        s[L.index(name, i)] = max(1.0, float(v))

    mag = exp_block_magnitudes(q, c_hint)
    for j in range(q + 4):
        put("tau", mag[j], j)
    put("gamma_i", mag[0])
    put("s_i", abs(np.vdot(nz.h_i, wi_t)) ** 2)
    put("mu_i", pt.mu_i)
    put("eta_i", pt.eta_i)
    for m in range(L.m):
        put("s_m", abs(np.vdot(nz.h_i0, wm_t[m])), m)
    if L.with_an:
        put("s_e", abs(np.vdot(nz.h_i, ve_t)))
    put("gamma_e", pt.gamma_e)
    for k in range(L.k):
        put("t_k", abs(np.vdot(nz.g_k[k], wi_t)), k)
        for m in range(L.m):
            s[L.t_k0_index(k, m)] = max(1.0, abs(np.vdot(nz.g_k0[k], wm_t[m])) ** 2)
        if L.with_an:
            put("t_e", abs(np.vdot(nz.g_k[k], ve_t)) ** 2, k)
    return s


def objective_value(sub: Subproblem, x, scfg: SCAConfig) -> float:
    """Maximised subproblem objective at ``x``."""
    if scfg.objective_mode == "gamma_diff":
        return sub.value(x, "gamma_i") - sub.value(x, "gamma_e")
    return sub.value(x, "gamma")
