"""Flat ``dotted.key = value`` experiment configuration.

Lines starting with ``#`` are comments.  Every key has a default, so an
empty file (or no file) gives the reference scenario.  dB-valued keys end
in ``_db`` or ``_dbm``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..channels import PropagationParams
from ..model import NetworkConfig
from ..sca.subproblem import EH_MODES, OBJECTIVE_MODES, SCAConfig
from ..solver.ipm import SolverConfig


def _floats(v):
    return tuple(float(x) for x in str(v).replace(",", " ").split())


def _ints(v):
    return tuple(int(x) for x in str(v).replace(",", " ").split())


def _names(v):
    return tuple(x for x in str(v).replace(",", " ").split())


def _bool(v):
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


# key -> (parser, default)
SCHEMA = {
    "network.n_m": (int, 10),
    "network.n_f": (int, 4),
    "network.m": (int, 2),
    "network.k": (int, 2),
    "network.gamma_db": (float, -10.0),
    "network.p_th_dbm": (float, 40.0),
    "network.q_dbm": (float, 15.0),
    "network.xi": (float, 0.6),
    "network.noise_dbm": (float, -100.0),
    "network.d_mbs": (float, 60.0),
    "network.d_fbs_mu": (float, 30.0),
    "network.d_fbs_ir": (float, 20.0),
    "network.d_fbs_er": (float, 5.0),
    "channel.pathloss_intercept_db": (float, 128.1),
    "channel.pathloss_slope_db": (float, 37.6),
    "channel.shadow_sigma_db": (float, 8.0),
    "channel.antenna_gain_dbi": (float, 15.0),
    "sca.eps": (float, 1e-4),
    "sca.max_iters": (int, 30),
    "sca.q": (int, 6),
    "sca.eh_mode": (str, "separated"),
    "sca.objective_mode": (str, "gamma"),
    "solver.feastol": (float, 1e-8),
    "solver.abstol": (float, 1e-8),
    "solver.reltol": (float, 1e-8),
    "solver.max_iters": (int, 200),
    "solver.backend": (str, "auto"),
    "experiment.seed": (int, 0),
    "experiment.trials": (int, 50),
    "experiment.schemes": (_names, ("proposed", "no_an", "zf")),
    "experiment.p_th_dbm_list": (_floats, (20.0, 25.0, 30.0, 35.0, 40.0, 45.0)),
    "experiment.k_list": (_ints, (1, 2, 3, 4)),
    "experiment.max_attempts": (int, 400),
    "experiment.out": (str, "results"),
    "experiment.traces": (_bool, False),
    "experiment.workers": (int, 1),
}


@dataclass
class ExperimentConfig:
    values: dict = field(default_factory=lambda: {k: d for k, (_, d) in SCHEMA.items()})

    def __getitem__(self, key):
        return self.values[key]

    def set(self, key: str, raw) -> None:
        if key not in SCHEMA:
            raise KeyError(f"unknown config key {key!r}")
        if isinstance(raw, (list, tuple)):
            raw = " ".join(str(x) for x in raw)
        self.values[key] = SCHEMA[key][0](raw)
        self._check()

    def _check(self):
        v = self.values
        if v["experiment.trials"] < 1:
            raise ValueError("experiment.trials must be >= 1")
        for key in ("experiment.p_th_dbm_list", "experiment.k_list"):
            seq = v[key]
            if not seq or list(seq) != sorted(seq):
                raise ValueError(f"{key} must be nonempty and sorted")
        if v["sca.eh_mode"] not in EH_MODES:
            raise ValueError(f"sca.eh_mode must be one of {EH_MODES}")
        if v["sca.objective_mode"] not in OBJECTIVE_MODES:
            raise ValueError(f"sca.objective_mode must be one of {OBJECTIVE_MODES}")
        if v["experiment.workers"] < 1:
            raise ValueError("experiment.workers must be >= 1")

    def network(self, **over) -> NetworkConfig:
        v = dict(self.values)
        v.update({f"network.{k}": x for k, x in over.items()})
        prop = PropagationParams(v["channel.pathloss_intercept_db"], v["channel.pathloss_slope_db"],
                                 v["channel.shadow_sigma_db"], v["channel.antenna_gain_dbi"])
        cfg = NetworkConfig.from_db(
            n_m=v["network.n_m"], n_f=v["network.n_f"], m=v["network.m"], k=v["network.k"],
            gamma_db=v["network.gamma_db"], p_th_dbm=v["network.p_th_dbm"], q_dbm=v["network.q_dbm"],
            xi=v["network.xi"], noise_dbm=v["network.noise_dbm"], d_mbs=v["network.d_mbs"],
            d_fbs_mu=v["network.d_fbs_mu"], d_fbs_ir=v["network.d_fbs_ir"],
            d_fbs_er=v["network.d_fbs_er"], propagation=prop)
        cfg.validate()
        return cfg

    def sca(self) -> SCAConfig:
        v = self.values
        backend = None if v["solver.backend"] == "auto" else v["solver.backend"]
        solver = SolverConfig(feastol=v["solver.feastol"], abstol=v["solver.abstol"],
                              reltol=v["solver.reltol"], max_iters=v["solver.max_iters"],
                              backend=backend)
        return SCAConfig(eps_sca=v["sca.eps"], max_iters=v["sca.max_iters"], q=v["sca.q"],
                         eh_mode=v["sca.eh_mode"], objective_mode=v["sca.objective_mode"],
                         solver=solver)

    def dumps(self) -> str:
        lines = []
        for k in SCHEMA:
            val = self.values[k]
            if isinstance(val, tuple):
                val = ", ".join(str(x) for x in val)
            elif isinstance(val, bool):
                val = str(val).lower()
            lines.append(f"{k} = {val}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in self.values.items()}


def parse_config(text: str, cfg: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = cfg or ExperimentConfig()
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        try:
            cfg.set(key, val)
        except (KeyError, ValueError) as e:
            raise ValueError(f"line {n}: {e}") from None
    return cfg


def load_config(path=None, overrides=()) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if path:
        with open(path) as fh:
            parse_config(fh.read(), cfg)
    for key, val in overrides:
        cfg.set(key, val)
    return cfg
