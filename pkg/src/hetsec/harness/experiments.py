"""Monte-Carlo drivers: one paired trial, the power sweep and the ER-count sweep.

Every scheme evaluated for a given seed sees the same channel draw, and the
draw does not depend on the power budget, so rows are paired across both
schemes and sweep values.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ..baselines import PROPOSED, SCHEMES, run_scheme
from ..channels import generate_channel_set
from ..sca.layout import SubproblemLayout
from .config import ExperimentConfig


@dataclass(frozen=True)
class ResultRow:
    seed: int
    scheme: str
    sweep: str
    value: float
    secrecy_rate: float
    iterations: int
    status: str
    feasible: bool
    worst_violation: float
    wall_time: float = 0.0

    def key(self):
        return (self.sweep, self.value, self.seed, SCHEMES.index(self.scheme))


def run_single(ecfg: ExperimentConfig, seed: int, sweep: str = "p_th_dbm", value=None,
               net_over: dict | None = None, keep_traces: bool = False):
    """Evaluate every requested scheme on one channel draw.

    Returns ``(rows, traces)``; ``traces`` maps scheme name to its SCA trace
    JSON when ``keep_traces`` is set.
    """
    over = dict(net_over or {})
    net = ecfg.network(**over)
    ch = generate_channel_set(net, seed)
    scfg = ecfg.sca()
    if value is None:
        value = ecfg[f"network.{sweep}"]
    rows, traces = [], {}
    for name in ecfg["experiment.schemes"]:
        t0 = time.perf_counter()
        res = run_scheme(name, ch, net, scfg)
        wall = time.perf_counter() - t0
        rows.append(ResultRow(seed, name, sweep, float(value), float(res.secrecy_rate),
                              int(res.iterations), res.status, bool(res.feasible),
                              float(res.worst_violation), wall))
        if keep_traces and res.trace is not None:
            traces[name] = res.trace.to_json()
    return rows, traces


def _task(args):
    ecfg, seed, sweep, value, over, keep = args
    return run_single(ecfg, seed, sweep, value, over, keep)


def _map(ecfg, tasks):
    workers = ecfg["experiment.workers"]
    if workers <= 1:
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_task, tasks))


def _seeds(ecfg):
    s0 = ecfg["experiment.seed"]
    return range(s0, s0 + ecfg["experiment.trials"])


def sweep_power(ecfg: ExperimentConfig):
    """Every scheme, seed and budget in ``experiment.p_th_dbm_list``."""
    keep = ecfg["experiment.traces"]
    tasks = [(ecfg, s, "p_th_dbm", p, {"p_th_dbm": p}, keep)
             for p in ecfg["experiment.p_th_dbm_list"] for s in _seeds(ecfg)]
    rows, traces = [], {}
    for (_, s, _, p, _, _), (r, tr) in zip(tasks, _map(ecfg, tasks)):
        rows += r
        for name, t in tr.items():
            traces[(s, name, p)] = t
    rows.sort(key=ResultRow.key)
    return rows, traces


def network_for_k(ecfg: ExperimentConfig, k: int) -> dict:
    """Overrides for ``k`` ERs; the femto array grows only if ``N_F >= K + 1`` demands it."""
    return {"k": k, "n_f": max(ecfg["network.n_f"], k + 1)}


def runtime_vs_k(ecfg: ExperimentConfig):
    """Proposed-scheme runs for each ``K`` until ``trials`` of them are feasible.

    Seeds are scanned upwards from ``experiment.seed``, at most
    ``experiment.max_attempts`` per ``K``.  Every attempt is returned; the
    timing statistics use the feasible ones.
    """
    rows = []
    layouts = {}
    for k in ecfg["experiment.k_list"]:
        over = network_for_k(ecfg, k)
        net = ecfg.network(**over)
        lay = SubproblemLayout(net.m, k, net.n_m, net.n_f, ecfg["sca.q"])
        z, l, socs = lay.predicted_cones()
        layouts[k] = dict(n_f=net.n_f, variables=lay.n, zero=z, nonneg=l,
                          soc_blocks=len(socs), rows=z + l + sum(socs))
        found = 0
        for s in range(ecfg["experiment.seed"], ecfg["experiment.seed"] + ecfg["experiment.max_attempts"]):
            sub = ExperimentConfig(dict(ecfg.values))
            sub.set("experiment.schemes", PROPOSED)
            r, _ = run_single(sub, s, "k", k, over)
            rows += r
            found += r[0].feasible
            if found >= ecfg["experiment.trials"]:
                break
    rows.sort(key=ResultRow.key)
    return rows, layouts


def _mean_se(v):
    v = np.asarray(v, float)
    if v.size == 0:
        return None, None
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(v.mean()), se


def aggregate(rows) -> list[dict]:
    """Per ``(sweep, value, scheme)`` statistics, recomputable from the rows alone.

    ``mean``/``stderr`` use feasible rows only; ``mean_zero_filled`` counts
    an infeasible row as rate 0.
    """
    groups = {}
    for r in rows:
        groups.setdefault((r.sweep, r.value, r.scheme), []).append(r)
    out = []
    for (sweep, value, scheme), rs in sorted(groups.items(),
                                             key=lambda kv: (kv[0][0], kv[0][1], SCHEMES.index(kv[0][2]))):
        feas = [r.secrecy_rate for r in rs if r.feasible]
        zf = [r.secrecy_rate if r.feasible else 0.0 for r in rs]
        m, se = _mean_se(feas)
        mz, sez = _mean_se(zf)
        times = [r.wall_time for r in rs if r.feasible]
        out.append(dict(sweep=sweep, value=value, scheme=scheme, rows=len(rs),
                        feasible=len(feas), infeasible=len(rs) - len(feas),
                        mean=m, stderr=se, mean_zero_filled=mz, stderr_zero_filled=sez,
                        median_wall_time=float(np.median(times)) if times else None))
    return out


def row_dict(r: ResultRow) -> dict:
    return asdict(r)
