"""Network configuration and exact physical-layer evaluators.

All quantities are linear scale (watts).  The artificial-noise covariance
is the rank-one outer product of the AN vector ``v_e``, so every
``x^H V_E x`` below is ``|x^H v_e|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .channels import ChannelSet, PropagationParams


def db2lin(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def dbm2watt(x):
    return 10.0 ** ((np.asarray(x, dtype=float) - 30.0) / 10.0)


def watt2dbm(p):
    return 10.0 * np.log10(np.asarray(p, dtype=float)) + 30.0


@dataclass
class NetworkConfig:
    n_m: int = 10
    n_f: int = 4
    m: int = 2
    k: int = 2
    gamma: np.ndarray = field(default_factory=lambda: np.full(2, db2lin(-10.0)))
    p_th: float = float(dbm2watt(40.0))
    q: np.ndarray = field(default_factory=lambda: np.full(2, dbm2watt(15.0)))
    xi: float = 0.6
    sigma2_m: np.ndarray = field(default_factory=lambda: np.full(2, dbm2watt(-100.0)))
    sigma2_i: float = float(dbm2watt(-100.0))
    sigma2_e: np.ndarray = field(default_factory=lambda: np.full(2, dbm2watt(-100.0)))
    d_mbs: float = 60.0
    d_fbs_mu: float = 30.0
    d_fbs_ir: float = 20.0
    d_fbs_er: float = 5.0
    propagation: PropagationParams = field(default_factory=PropagationParams)

    def __post_init__(self):
        self.gamma = _per_user(self.gamma, self.m)
        self.q = _per_user(self.q, self.k)
        self.sigma2_m = _per_user(self.sigma2_m, self.m)
        self.sigma2_e = _per_user(self.sigma2_e, self.k)
        self.p_th = float(self.p_th)
        self.sigma2_i = float(self.sigma2_i)
        self.xi = float(self.xi)

    @classmethod
    def from_db(cls, *, n_m=10, n_f=4, m=2, k=2, gamma_db=-10.0, p_th_dbm=40.0, q_dbm=15.0,
                xi=0.6, noise_dbm=-100.0, d_mbs=60.0, d_fbs_mu=30.0, d_fbs_ir=20.0,
                d_fbs_er=5.0, propagation=None) -> "NetworkConfig":
        noise = float(dbm2watt(noise_dbm))
        return cls(
            n_m=n_m, n_f=n_f, m=m, k=k,
            gamma=np.full(m, db2lin(gamma_db)), p_th=float(dbm2watt(p_th_dbm)),
            q=np.full(k, dbm2watt(q_dbm)), xi=xi,
            sigma2_m=np.full(m, noise), sigma2_i=noise, sigma2_e=np.full(k, noise),
            d_mbs=d_mbs, d_fbs_mu=d_fbs_mu, d_fbs_ir=d_fbs_ir, d_fbs_er=d_fbs_er,
            propagation=propagation or PropagationParams(),
        )

    def with_(self, **kw) -> "NetworkConfig":
        return replace(self, **kw)

    def validate(self) -> None:
        if self.m < 1 or self.k < 0:
            raise ValueError("need M >= 1 and K >= 0")
        if self.n_m < self.m:
            raise ValueError("N_M must be >= M")
        if self.n_f < self.k + 1:
            raise ValueError("N_F must be >= K + 1")
        if not 0.0 < self.xi <= 1.0:
            raise ValueError("xi must lie in (0, 1]")
        if self.p_th <= 0 or self.sigma2_i <= 0:
            raise ValueError("power budget and noise powers must be positive")
        if np.any(self.sigma2_m <= 0) or np.any(self.sigma2_e <= 0):
            raise ValueError("noise powers must be positive")
        if np.any(self.gamma <= 0) or np.any(self.q < 0):
            raise ValueError("SINR targets must be positive and EH thresholds nonnegative")
        if min(self.d_mbs, self.d_fbs_mu, self.d_fbs_ir, self.d_fbs_er) <= 0:
            raise ValueError("distances must be positive")


def _per_user(v, count):
    a = np.atleast_1d(np.asarray(v, dtype=float))
    if a.size == 1 and count != 1:
        a = np.full(count, a.item())
    if a.size != count:
        raise ValueError(f"expected {count} per-user values, got {a.size}")
    return a.copy()


@dataclass
class BeamformingSolution:
    w_m: np.ndarray  # (M, N_M)
    w_i: np.ndarray  # (N_F,)
    v_e: np.ndarray  # (N_F,)

    @classmethod
    def zeros(cls, cfg: NetworkConfig) -> "BeamformingSolution":
        return cls(np.zeros((cfg.m, cfg.n_m), complex), np.zeros(cfg.n_f, complex),
                   np.zeros(cfg.n_f, complex))

    def scaled(self, factor: float) -> "BeamformingSolution":
        return BeamformingSolution(self.w_m * factor, self.w_i * factor, self.v_e * factor)

    def to_json(self) -> dict:
        def enc(a):
            return np.stack([a.real, a.imag], axis=-1).tolist()
        return {"w_m": enc(self.w_m), "w_i": enc(self.w_i), "v_e": enc(self.v_e)}

    @classmethod
    def from_json(cls, data: dict) -> "BeamformingSolution":
        def dec(v):
            a = np.asarray(v, dtype=float)
            return a[..., 0] + 1j * a[..., 1]
        return cls(dec(data["w_m"]), dec(data["w_i"]), dec(data["v_e"]))


def _p(a, w):
    """``|a^H w|^2``."""
    return float(abs(np.vdot(a, w)) ** 2)


def sinr_mu(sol: BeamformingSolution, ch: ChannelSet, cfg: NetworkConfig, m: int) -> float:
    """SINR of macro user ``m`` (0-based)."""
    h = ch.h_m[m]
    sig = _p(h, sol.w_m[m])
    intf = sum(_p(h, sol.w_m[i]) for i in range(cfg.m) if i != m)
    intf += _p(ch.l_m[m], sol.w_i) + _p(ch.l_m[m], sol.v_e)
    return sig / (intf + cfg.sigma2_m[m])


def sinr_ir(sol, ch, cfg) -> float:
    intf = sum(_p(ch.h_i0, sol.w_m[i]) for i in range(cfg.m)) + _p(ch.h_i, sol.v_e)
    return _p(ch.h_i, sol.w_i) / (intf + cfg.sigma2_i)


def sinr_er(sol, ch, cfg, k: int) -> float:
    intf = sum(_p(ch.g_k0[k], sol.w_m[i]) for i in range(cfg.m)) + _p(ch.g_k[k], sol.v_e)
    return _p(ch.g_k[k], sol.w_i) / (intf + cfg.sigma2_e[k])


def total_power(sol: BeamformingSolution) -> float:
    return float(np.sum(np.abs(sol.w_m) ** 2) + np.sum(np.abs(sol.w_i) ** 2)
                 + np.sum(np.abs(sol.v_e) ** 2))


def harvested_energy(sol, ch, cfg, k: int) -> float:
    """Harvested power at ER ``k``; the MBS contribution is neglected by model."""
    g = ch.g_k[k]
    return cfg.xi * (_p(g, sol.w_i) + _p(g, sol.v_e) + cfg.sigma2_e[k])


def secrecy_rate_raw(sol, ch, cfg) -> float:
    """IR rate minus best eavesdropper rate, before clamping at zero."""
    r_ir = np.log2(1.0 + sinr_ir(sol, ch, cfg))
    r_e = max((np.log2(1.0 + sinr_er(sol, ch, cfg, k)) for k in range(cfg.k)), default=0.0)
    return float(r_ir - r_e)


def secrecy_rate(sol, ch, cfg) -> float:
    return max(0.0, secrecy_rate_raw(sol, ch, cfg))


@dataclass
class ConstraintAudit:
    sinr_slack: np.ndarray   # SINR_m - Gamma_m
    power_slack: float       # P_th - P_tot
    eh_slack: np.ndarray     # E_k - Q_k
    worst_violation: float   # max relative shortfall (0 when all slacks >= 0)
    feasible: bool
    tol: float

    def to_json(self) -> dict:
        return {
            "sinr_slack": [float(v) for v in self.sinr_slack],
            "power_slack": float(self.power_slack),
            "eh_slack": [float(v) for v in self.eh_slack],
            "worst_violation": float(self.worst_violation),
            "feasible": bool(self.feasible),
            "tol": float(self.tol),
        }


def audit(sol: BeamformingSolution, ch: ChannelSet, cfg: NetworkConfig,
          tol: float = 1e-6) -> ConstraintAudit:
    """Check the macro-user SINR, total power and EH constraints.

    Each slack is normalised by its threshold (``Gamma_m``, ``P_th``, ``Q_k``;
    ``xi*sigma_k^2`` stands in for a zero ``Q_k``) before taking the worst one.
    """
    sinr = np.array([sinr_mu(sol, ch, cfg, m) for m in range(cfg.m)]) - cfg.gamma
    pw = cfg.p_th - total_power(sol)
    eh = np.array([harvested_energy(sol, ch, cfg, k) for k in range(cfg.k)]) - cfg.q
    rel = [-sinr / cfg.gamma, [-pw / cfg.p_th]]
    if cfg.k:
        rel.append(-eh / np.maximum(cfg.q, cfg.xi * cfg.sigma2_e))
    worst = max(0.0, float(np.max(np.concatenate(rel))))
    return ConstraintAudit(sinr, pw, eh, worst, worst <= tol, tol)
