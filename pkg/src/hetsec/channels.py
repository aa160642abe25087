"""Seeded channel generation for the two-tier network.

Every link draws from its own counter-based stream keyed by
``(seed, group, index)``, so changing ``K`` or ``M`` leaves the draws of the
remaining links untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# stream groups
H_M, H_I0, G_K0, H_I, G_K, L_M = range(6)


@dataclass(frozen=True)
class PropagationParams:
    """Path loss ``intercept + slope*log10(d_km)`` dB, log-normal shadowing, antenna gain."""

    pathloss_intercept_db: float = 128.1
    pathloss_slope_db: float = 37.6
    shadow_sigma_db: float = 8.0
    antenna_gain_dbi: float = 15.0

    def __post_init__(self):
        if self.pathloss_intercept_db <= 0 or self.pathloss_slope_db <= 0:
            raise ValueError("path-loss coefficients must be positive")
        # zero is allowed for the two below (degenerate/deterministic variants)
        if self.shadow_sigma_db < 0 or self.antenna_gain_dbi < 0:
            raise ValueError("shadowing deviation and antenna gain must be nonnegative")


@dataclass
class ChannelSet:
    h_m: np.ndarray   # (M, N_M)  MBS -> MU_m
    h_i0: np.ndarray  # (N_M,)    MBS -> IR
    g_k0: np.ndarray  # (K, N_M)  MBS -> ER_k
    h_i: np.ndarray   # (N_F,)    FBS -> IR
    g_k: np.ndarray   # (K, N_F)  FBS -> ER_k
    l_m: np.ndarray   # (M, N_F)  FBS -> MU_m

    FIELDS = ("h_m", "h_i0", "g_k0", "h_i", "g_k", "l_m")

    def validate(self, cfg) -> None:
        shapes = {
            "h_m": (cfg.m, cfg.n_m), "h_i0": (cfg.n_m,), "g_k0": (cfg.k, cfg.n_m),
            "h_i": (cfg.n_f,), "g_k": (cfg.k, cfg.n_f), "l_m": (cfg.m, cfg.n_f),
        }
        for name, shape in shapes.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite entries")

    def to_json(self) -> dict:
        def enc(a):
            a = np.asarray(a)
            return np.stack([a.real, a.imag], axis=-1).tolist()
        return {name: enc(getattr(self, name)) for name in self.FIELDS}

    @classmethod
    def from_json(cls, data: dict) -> "ChannelSet":
        def dec(v):
            a = np.asarray(v, dtype=float)
            if a.size == 0:
                return np.zeros(a.shape[:-1] if a.ndim > 1 else (0,), dtype=complex)
            return a[..., 0] + 1j * a[..., 1]
        return cls(**{name: dec(data[name]) for name in cls.FIELDS})


def path_loss_linear(d_km):
    """Large-scale power gain ``10^(-(128.1 + 37.6 log10 d)/10)``, ``d`` in km."""
    return path_loss_from(d_km, PropagationParams())


def path_loss_from(d_km, params: PropagationParams):
    d = np.asarray(d_km, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    out = 10.0 ** (-(params.pathloss_intercept_db + params.pathloss_slope_db * np.log10(d)) / 10.0)
    return float(out) if out.ndim == 0 else out


def link_stream(seed: int, group: int, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(group), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def sample_rayleigh_vector(stream: np.random.Generator, n: int) -> np.ndarray:
    """i.i.d. CN(0, 1) entries."""
    if n < 1:
        raise ValueError("vector length must be >= 1")
    z = stream.standard_normal((2, n))
    return (z[0] + 1j * z[1]) / np.sqrt(2.0)


def make_channel(stream: np.random.Generator, d_km: float, params: PropagationParams,
                 n: int) -> np.ndarray:
    """``sqrt(beta(d)) * psi * phi * h~`` with one shadowing draw per link."""
    beta = path_loss_from(d_km, params)
    if n < 1:
        raise ValueError("vector length must be >= 1")
    shadow_db = stream.normal(0.0, params.shadow_sigma_db) if params.shadow_sigma_db > 0 else 0.0
    psi = 10.0 ** (shadow_db / 20.0)
    phi = 10.0 ** (params.antenna_gain_dbi / 20.0)
    return np.sqrt(beta) * psi * phi * sample_rayleigh_vector(stream, n)


def generate_channel_set(cfg, seed: int) -> ChannelSet:
    cfg.validate()
    p = cfg.propagation
    km = 1e-3

    def group(gid, count, d_m, n):
        if count == 0:
            return np.zeros((0, n), dtype=complex)
        return np.stack([make_channel(link_stream(seed, gid, i), d_m * km, p, n)
                         for i in range(count)])

    ch = ChannelSet(
        h_m=group(H_M, cfg.m, cfg.d_mbs, cfg.n_m),
        h_i0=make_channel(link_stream(seed, H_I0), cfg.d_mbs * km, p, cfg.n_m),
        g_k0=group(G_K0, cfg.k, cfg.d_mbs, cfg.n_m),
        h_i=make_channel(link_stream(seed, H_I), cfg.d_fbs_ir * km, p, cfg.n_f),
        g_k=group(G_K, cfg.k, cfg.d_fbs_er, cfg.n_f),
        l_m=group(L_M, cfg.m, cfg.d_fbs_mu, cfg.n_f),
    )
    ch.validate(cfg)
    return ch
