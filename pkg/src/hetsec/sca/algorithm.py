"""The SCA loop: solve, move the expansion point, repeat."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..channels import ChannelSet
from ..model import BeamformingSolution, NetworkConfig, audit, secrecy_rate_raw
from ..solver.ipm import solve
from .init import InitResult, initialize
from .subproblem import ExpansionPoint, SCAConfig, build_subproblem, objective_value

CONVERGED = "converged"
MAX_ITERS = "max_iters"
SOLVER_FAILURE = "solver_failure"
INIT_INFEASIBLE = "init_infeasible"


@dataclass
class IterationRecord:
    iteration: int
    objective: float
    secrecy_rate: float
    solver_status: str
    solver_iterations: int
    point: dict

    def to_json(self) -> dict:
        return dict(iteration=self.iteration, objective=self.objective,
                    secrecy_rate=self.secrecy_rate, solver_status=self.solver_status,
                    solver_iterations=self.solver_iterations, point=self.point)


@dataclass
class SCATrace:
    status: str
    records: list = field(default_factory=list)
    solution: BeamformingSolution | None = None
    secrecy_rate: float = 0.0
    secrecy_rate_raw: float = 0.0
    init_secrecy_rate: float = 0.0
    anomalies: list = field(default_factory=list)
    audit: dict | None = None
    wall_time: float = 0.0
    init_reason: str = ""

    @property
    def iterations(self) -> int:
        return len(self.records) - 1 if self.records else 0

    @property
    def objectives(self) -> list:
        return [r.objective for r in self.records]

    @property
    def feasible(self) -> bool:
        return self.solution is not None and bool(self.audit and self.audit["feasible"])

    @property
    def secrecy_feasible(self) -> bool:
        return self.feasible and self.secrecy_rate_raw >= 0.0

    def to_json(self, with_time: bool = False) -> dict:
        out = dict(status=self.status, iterations=self.iterations,
                   secrecy_rate=self.secrecy_rate, secrecy_rate_raw=self.secrecy_rate_raw,
                   init_secrecy_rate=self.init_secrecy_rate, anomalies=self.anomalies,
                   audit=self.audit, init_reason=self.init_reason,
                   solution=self.solution.to_json() if self.solution is not None else None,
                   records=[r.to_json() for r in self.records])
        if with_time:
            out["wall_time"] = self.wall_time
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def point_objective(pt: ExpansionPoint, scfg: SCAConfig) -> float:
    """Subproblem objective implied by an expansion point itself."""
    gi = pt.mu_i ** 2 / pt.eta_i
    if scfg.objective_mode == "gamma_diff":
        return gi - pt.gamma_e
    return math.log2(1.0 + gi) - math.log2(1.0 + pt.gamma_e)


def run_sca(ch: ChannelSet, cfg: NetworkConfig, scfg: SCAConfig | None = None,
            with_an: bool = True, init: InitResult | None = None) -> SCATrace:
    """Iterate convex restrictions from a feasible start until the objective settles.

    The returned solution is the audited-feasible iterate with the largest
    secrecy rate (the start included), so the result never falls below the
    starting point even where the surrogate and the true rate disagree.
    """
    scfg = scfg or SCAConfig()
    t0 = time.perf_counter()
    if init is None:
        init = initialize(ch, cfg, with_an=with_an, solver=scfg.solver)
    if not init.feasible:
        return SCATrace(INIT_INFEASIBLE, init_reason=init.reason,
                        wall_time=time.perf_counter() - t0)

    pt = init.point
    r0 = secrecy_rate_raw(init.solution, ch, cfg)
    trace = SCATrace(MAX_ITERS, init_secrecy_rate=max(0.0, r0))
    prev = point_objective(pt, scfg)
    trace.records.append(IterationRecord(0, prev, max(0.0, r0), "init", 0, pt.to_json()))
    best = (r0, init.solution)
    slack = 10.0 * max(scfg.solver.feastol, scfg.solver.reltol)

    for it in range(1, scfg.max_iters + 1):
        sub = build_subproblem(ch, cfg, pt, scfg, with_an=with_an)
        res = solve(sub.program, scfg.solver)
        if not res.solved:
            trace.status = SOLVER_FAILURE
            trace.records.append(IterationRecord(it, prev, trace.records[-1].secrecy_rate,
                                                 res.status, res.iterations, pt.to_json()))
            break
        obj = objective_value(sub, res.x, scfg)
        sol = sub.solution(res.x)
        pt = sub.next_point(res.x)
        rate = secrecy_rate_raw(sol, ch, cfg)
        trace.records.append(IterationRecord(it, obj, max(0.0, rate), res.status,
                                             res.iterations, pt.to_json()))
        if obj < prev - slack * max(1.0, abs(prev)):
            trace.anomalies.append(dict(iteration=it, previous=prev, objective=obj))
        if rate > best[0] and audit(sol, ch, cfg).feasible:
            best = (rate, sol)
        done = abs(obj - prev) < scfg.eps_sca * max(1.0, abs(obj))
        prev = obj
        if done:
            trace.status = CONVERGED
            break

    rate, sol = best
    trace.solution = sol
    trace.secrecy_rate_raw = float(rate)
    trace.secrecy_rate = max(0.0, float(rate))
    trace.audit = audit(sol, ch, cfg).to_json()
    trace.wall_time = time.perf_counter() - t0
    return trace
