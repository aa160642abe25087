"""Exit criteria, one test and one printed PASS/FAIL line per criterion.

Tolerances and sample sizes are fixed here and are not relaxed when a
criterion fails.  Long experiments run once per module and are shared.

Run standalone with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from hetsec.baselines import NO_AN, PROPOSED, ZF
from hetsec.channels import generate_channel_set
from hetsec.harness.config import ExperimentConfig
from hetsec.harness.experiments import aggregate, network_for_k, runtime_vs_k, sweep_power
from hetsec.harness.output import emit_outputs
from hetsec.model import BeamformingSolution, NetworkConfig, total_power
from hetsec.sca.forms import Affine
from hetsec.sca.layout import SubproblemLayout
from hetsec.sca.minorants import lemma1_rows
from hetsec.sca.subproblem import ExpansionPoint, Normalized, SCAConfig, build_subproblem
from hetsec.solver import ipm
from hetsec.solver.ipm import solve
from socp_oracle import brute_force, exp_block_min_gamma, random_socp
from test_solver import infeasible_pair, norm_ball, projection

pytestmark = pytest.mark.acceptance

# pinned criterion values
TANGENCY_REL = 1e-10
TANGENCY_POINTS = 1000
LEMMA1_SAMPLES = 100_000
EXP_Q = 6
EXP_REL = 1e-3
EXP_C = tuple(np.arange(0.0, 8.0 + 1e-9, 0.5))
SOLVER_TOL = 1e-8
RANDOM_SOCPS = 50
RANDOM_REL = 1e-5
MONO_SEEDS = 50
MONO_SLACK = 10.0  # times the solver tolerance
SCA_EPS = 1e-4
SCA_MAX_ITERS = 30
CONVERGED_SHARE = 0.90
AUDIT_REL = 1e-6
SWEEP_SEEDS = 50
SWEEP_P_DBM = (20.0, 25.0, 30.0, 35.0, 40.0, 45.0)
K_LIST = (1, 2, 3, 4)
K_TRIALS = 10


def report(n: int, ok: bool, detail: str, seconds: float, budget: float):
    timed = seconds <= budget
    verdict = "PASS" if ok and timed else "FAIL"
    line = (f"criterion {n}: {verdict}  {detail}  [{seconds:.1f} s of {budget:.0f} s]")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert timed, line


def base_config(**over) -> ExperimentConfig:
    cfg = ExperimentConfig()
    cfg.set("sca.eps", SCA_EPS)
    cfg.set("sca.max_iters", SCA_MAX_ITERS)
    cfg.set("sca.eh_mode", "separated")
    for k, v in over.items():
        cfg.set(k, v)
    return cfg


# -- 1 ---------------------------------------------------------------------

LINEARIZED_TAGS = ("ir_signal_minorant", "ir_qol_minorant", "er_mbs_minorant", "er_an_minorant",
                   "eh_minorant", "rate_linearization")


def tangency_gaps(ch, cfg, sol, scfg):
    """Relative gap of every linearised row at its own expansion point.

    Each slack variable the row bounds is set to the exact nonconvex value
    at the expansion point, so a tangent row evaluates to zero there.
    """
    pt = ExpansionPoint.from_solution(sol, ch, cfg)
    sub = build_subproblem(ch, cfg, pt, scfg)
    L, nz = sub.layout, sub.norm
    wm, wi, ve = sol.w_m / nz.sqrt_p, sol.w_i / nz.sqrt_p, sol.v_e / nz.sqrt_p
    xm = np.zeros(L.n)

    def put_beam(start, w):
        xm[start:start + w.size] = w.real
        xm[start + w.size:start + 2 * w.size] = w.imag

    for m in range(cfg.m):
        put_beam(L.w_m_start(m), wm[m])
    put_beam(L.start("w_i"), wi)
    put_beam(L.start("v_e"), ve)
    p2 = lambda a, w: abs(np.vdot(a, w)) ** 2  # noqa: E731
    exact = {}
    xm[L.index("s_i")] = exact["ir_signal_minorant"] = p2(nz.h_i, wi)
    xm[L.index("mu_i")], xm[L.index("eta_i")] = pt.mu_i, pt.eta_i
    xm[L.index("gamma_i")] = exact["ir_qol_minorant"] = pt.mu_i ** 2 / pt.eta_i
    xm[L.index("gamma_e")] = pt.gamma_e
    er_mbs, er_an, eh = [], [], []
    for k in range(cfg.k):
        for m in range(cfg.m):
            xm[L.t_k0_index(k, m)] = v = p2(nz.g_k0[k], wm[m])
            er_mbs.append(v)
        xm[L.index("t_e", k)] = v = p2(nz.g_k[k], ve)
        er_an.append(v)
        eh.append(p2(nz.g_k[k], wi) + p2(nz.g_k[k], ve))
    log_e = math.log2(1.0 + pt.gamma_e)
    xm[L.index("c")] = log_e
    xm[L.index("gamma")] = 0.0
    slack = sub.program.b - sub.program.A @ (xm / sub.scale)
    gaps = {}
    for tag in LINEARIZED_TAGS:
        rows = sub.rows[tag]
        if tag == "er_mbs_minorant":
            ref = er_mbs
        elif tag == "er_an_minorant":
            ref = er_an
        elif tag == "eh_minorant":
            # the row is minorant - target; compare the minorant itself
            ref = eh
            vals = [slack[r] + nz.eh_target[k] for k, r in enumerate(rows)]
            gaps[tag] = max(abs(v - e) / max(e, 1e-300) for v, e in zip(vals, ref))
            continue
        elif tag == "rate_linearization":
            ref = [log_e]
        else:
            ref = [exact[tag]]
        gaps[tag] = max(abs(slack[r]) / max(abs(e), 1e-300) for r, e in zip(rows, ref))
    return gaps


def test_c1_minorant_tangency():
    t0 = time.perf_counter()
    cfg = NetworkConfig()
    scfg = SCAConfig(eh_mode="separated")
    rng = np.random.default_rng(2024)
    worst = dict.fromkeys(LINEARIZED_TAGS, 0.0)
    for i in range(TANGENCY_POINTS):
        ch = generate_channel_set(cfg, 10_000 + i)

        def cn(*shape):
            return rng.normal(size=shape) + 1j * rng.normal(size=shape)

        sol = BeamformingSolution(cn(cfg.m, cfg.n_m), cn(cfg.n_f), cn(cfg.n_f))
        sol = sol.scaled(math.sqrt(cfg.p_th * rng.uniform(0.01, 1.0) / total_power(sol)))
        for tag, g in tangency_gaps(ch, cfg, sol, scfg).items():
            worst[tag] = max(worst[tag], g)
    top = max(worst.values())
    dt = time.perf_counter() - t0
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(1, top <= TANGENCY_REL, f"{TANGENCY_POINTS} expansion points, worst relative gap per "
                                   f"row family: {detail} (limit {TANGENCY_REL:g})", dt, 60)


# -- 2 ---------------------------------------------------------------------

def test_c2_lemma1_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    n = LEMMA1_SAMPLES
    # integer samples, a third of them on or next to the boundary z^2 = xy,
    # so every comparison below is exact in double precision
    x = rng.integers(0, 2000, size=n).astype(float)
    y = rng.integers(0, 2000, size=n).astype(float)
    z = rng.integers(-2000, 2000, size=n).astype(float)
    edge = rng.random(n) < 1 / 3
    z[edge] = (np.round(np.sqrt(x[edge] * y[edge])) + rng.integers(-1, 2, size=edge.sum())) \
        * rng.choice([-1.0, 1.0], size=edge.sum())
    # the rows are affine in (z, x, y): read their coefficients once
    rows = lemma1_rows(Affine.var(0), Affine.var(1), Affine.var(2))
    basis = np.vstack([np.zeros(3), np.eye(3)])
    coef = np.array([[r(v) for v in basis] for r in rows])
    const = coef[:, 0]
    lin = coef[:, 1:] - const[:, None]
    vals = lin @ np.vstack([z, x, y]) + const[:, None]
    in_soc = vals[0] >= np.sqrt(np.sum(vals[1:] ** 2, axis=0))
    hyper = z * z <= x * y
    bad = int(np.sum(in_soc != hyper))
    dt = time.perf_counter() - t0
    report(2, bad == 0, f"{n} samples ({int(edge.sum())} at the boundary), {bad} counterexamples",
           dt, 10)


# -- 3 ---------------------------------------------------------------------

def test_c3_exp_block_accuracy():
    t0 = time.perf_counter()
    errs = {}
    statuses = set()
    for q in (4, EXP_Q, 8):
        e = []
        for c in EXP_C:
            val, res = exp_block_min_gamma(float(c), q)
            statuses.add(res.status)
            e.append(abs(val - 2.0 ** c) / 2.0 ** c)
        errs[q] = max(e)
    ok = (errs[EXP_Q] <= EXP_REL and errs[4] > errs[6] > errs[8]
          and statuses <= set(ipm.SOLVED))
    dt = time.perf_counter() - t0
    report(3, ok, f"max relative error q=4 {errs[4]:.2e}, q=6 {errs[6]:.2e}, q=8 {errs[8]:.2e} "
                  f"(q=6 limit {EXP_REL:g}, strictly decreasing)", dt, 60)


# -- 4 ---------------------------------------------------------------------

def test_c4_solver_conformance():
    t0 = time.perf_counter()
    fails = []
    c = np.array([3.0, -4.0, 12.0])
    r = solve(norm_ball(c, 2.0))
    if not (r.status == ipm.OPTIMAL and max(r.pres, r.dres, r.gap) <= SOLVER_TOL
            and abs(r.pobj + 26.0) <= SOLVER_TOL * 26.0):
        fails.append(f"norm-ball {r.status} {r.pobj}")
    p, a = np.array([1.0, 2.0, -1.0]), np.ones(3)
    r = solve(projection(p, a, 5.0))
    d = abs(a @ p - 5.0) / np.linalg.norm(a)
    if not (r.status == ipm.OPTIMAL and max(r.pres, r.dres, r.gap) <= SOLVER_TOL
            and abs(r.pobj - d) <= SOLVER_TOL * d):
        fails.append(f"projection {r.status} {r.pobj}")
    r = solve(infeasible_pair())
    if r.status != ipm.PRIMAL_INFEASIBLE:
        fails.append(f"infeasible pair {r.status}")
    rng = np.random.default_rng(4)
    worst = 0.0
    for i in range(RANDOM_SOCPS):
        prog = random_socp(rng, int(rng.integers(2, 9)))
        r = solve(prog)
        ref, _ = brute_force(prog, seed=i)
        err = abs(r.pobj - ref) / max(1.0, abs(ref))
        worst = max(worst, err)
        if r.status != ipm.OPTIMAL or not err <= RANDOM_REL:
            fails.append(f"random {i}: {r.status} err {err:.1e}")
    dt = time.perf_counter() - t0
    report(4, not fails, f"3 analytic programs, {RANDOM_SOCPS} random programs worst relative "
                         f"error {worst:.1e}; failures: {fails or 'none'}", dt, 120)


# -- 5 and 6 ----------------------------------------------------------------

@pytest.fixture(scope="module")
def mono_runs():
    cfg = base_config(**{"experiment.seed": 0, "experiment.trials": MONO_SEEDS,
                         "experiment.p_th_dbm_list": "40", "experiment.schemes": PROPOSED,
                         "experiment.traces": True})
    t0 = time.perf_counter()
    rows, traces = sweep_power(cfg)
    return cfg, rows, traces, time.perf_counter() - t0


def test_c5_monotone_convergence(mono_runs):
    cfg, rows, traces, dt = mono_runs
    slack = MONO_SLACK * SOLVER_TOL
    feasible = [r for r in rows if r.feasible]
    drops = []
    for r in feasible:
        obj = [rec["objective"] for rec in traces[(r.seed, PROPOSED, 40.0)]["records"]]
        for j in range(1, len(obj)):
            if obj[j] < obj[j - 1] - slack * max(1.0, abs(obj[j - 1])):
                drops.append((r.seed, j))
    conv = [r for r in feasible if r.status == "converged" and r.iterations <= SCA_MAX_ITERS]
    share = len(conv) / len(feasible) if feasible else 0.0
    ok = bool(feasible) and not drops and share >= CONVERGED_SHARE
    slow = sorted(r.seed for r in feasible if r not in conv)
    report(5, ok, f"{MONO_SEEDS} seeds, {len(feasible)} feasible, {len(drops)} objective drops, "
                  f"converged within {SCA_MAX_ITERS}: {len(conv)}/{len(feasible)} = {share:.0%} "
                  f"(need {CONVERGED_SHARE:.0%}; not converged: {slow or 'none'})", dt, 1800)


# -- 7 ---------------------------------------------------------------------

@pytest.fixture(scope="module")
def power_sweep():
    cfg = base_config(**{"experiment.seed": 0, "experiment.trials": SWEEP_SEEDS,
                         "experiment.p_th_dbm_list": " ".join(map(str, SWEEP_P_DBM))})
    t0 = time.perf_counter()
    rows, _ = sweep_power(cfg)
    return cfg, rows, time.perf_counter() - t0


def test_c6_feasibility_audit(mono_runs, power_sweep):
    t0 = time.perf_counter()
    rows = mono_runs[1] + power_sweep[1]
    converged = [r for r in rows if r.status == "converged"]
    bad = [(r.seed, r.scheme, r.value, r.worst_violation) for r in converged
           if not (r.feasible and r.worst_violation <= AUDIT_REL)]
    dt = time.perf_counter() - t0
    report(6, bool(converged) and not bad,
           f"{len(converged)} converged runs audited, {len(bad)} with relative violation above "
           f"{AUDIT_REL:g} {bad[:3] if bad else ''}", dt, 60)


def test_c7_power_sweep_ordering(power_sweep):
    cfg, rows, dt = power_sweep
    agg = {(g["scheme"], g["value"]): g for g in aggregate(rows)}
    msgs = []
    ok = True
    prev = None
    for p in SWEEP_P_DBM:
        gp, gn, gz = agg[(PROPOSED, p)], agg[(NO_AN, p)], agg[(ZF, p)]
        mp, mn, mz = gp["mean_zero_filled"], gn["mean_zero_filled"], gz["mean_zero_filled"]
        if gp["rows"] < SWEEP_SEEDS or not (mp >= mn and mp >= mz):
            ok = False
        if prev is not None:
            se = max(prev["stderr_zero_filled"], gp["stderr_zero_filled"])
            if mp < prev["mean_zero_filled"] - se:
                ok = False
        prev = gp
        msgs.append(f"{p:g} dBm: {mp:.2f}/{mn:.2f}/{mz:.2f} (feasible {gp['feasible']}/{gp['rows']})")
    # paired view (informational): draws where ZF is feasible too
    by = {(r.seed, r.scheme, r.value): r for r in rows}
    pairs = [(by[(r.seed, PROPOSED, r.value)], r) for r in rows if r.scheme == ZF and r.feasible]
    wins = sum(p.secrecy_rate >= z.secrecy_rate for p, z in pairs)
    report(7, ok, "mean secrecy rate proposed/no-AN/ZF, infeasible draws count as 0; "
                  + "; ".join(msgs) + f"; proposed >= ZF on {wins}/{len(pairs)} paired draws",
           dt, 7200)


# -- 8 ---------------------------------------------------------------------

def test_c8_runtime_trend():
    cfg = base_config(**{"experiment.seed": 0, "experiment.trials": K_TRIALS,
                         "experiment.k_list": " ".join(map(str, K_LIST))})
    t0 = time.perf_counter()
    rows, layouts = runtime_vs_k(cfg)
    dt = time.perf_counter() - t0
    agg = {int(g["value"]): g for g in aggregate(rows)}
    med = [agg[k]["median_wall_time"] for k in K_LIST]
    feas = [agg[k]["feasible"] for k in K_LIST]
    ok = all(f >= K_TRIALS for f in feas) and all(a is not None for a in med)
    ok = ok and all(b >= a for a, b in zip(med, med[1:]))
    # the assembled programs have exactly the predicted sizes
    counts_ok = True
    for k in K_LIST:
        net = cfg.network(**network_for_k(cfg, k))
        lay = SubproblemLayout(net.m, k, net.n_m, net.n_f, cfg["sca.q"])
        z, l, socs = lay.predicted_cones()
        rng = np.random.default_rng(k)
        pt = ExpansionPoint(rng.normal(size=(net.m, net.n_m)) + 0j, rng.normal(size=net.n_f) + 0j,
                            rng.normal(size=net.n_f) + 0j, 1.0, 2.0, 0.5)
        prog = build_subproblem(generate_channel_set(net, 0), net, pt, cfg.sca()).program
        L = layouts[k]
        counts_ok &= (prog.n == lay.n == L["variables"] and prog.cones.zero == z == L["zero"]
                      and prog.cones.nonneg == l == L["nonneg"]
                      and sorted(prog.cones.soc) == sorted(socs) and prog.m == L["rows"])
    sizes = [(layouts[k]["variables"], layouts[k]["rows"]) for k in K_LIST]
    counts_ok &= all(b[0] > a[0] and b[1] > a[1] for a, b in zip(sizes, sizes[1:]))
    txt = ", ".join(f"K={k}: {m:.3f} s ({f} feasible, n={s[0]}, rows={s[1]})"
                    for k, m, f, s in zip(K_LIST, [x or float('nan') for x in med], feas, sizes))
    report(8, ok and counts_ok, f"median wall time {txt}; layout counts "
                                f"{'match' if counts_ok else 'MISMATCH'}", dt, 3600)


# -- 9 ---------------------------------------------------------------------

def test_c9_determinism(mono_runs, tmp_path):
    cfg, rows, _, _ = mono_runs
    t0 = time.perf_counter()
    again, _ = sweep_power(cfg)
    emit_outputs(rows, tmp_path / "first", cfg, "acceptance")
    emit_outputs(again, tmp_path / "second", cfg, "acceptance")
    a = (tmp_path / "first" / "results.csv").read_bytes()
    b = (tmp_path / "second" / "results.csv").read_bytes()
    dt = time.perf_counter() - t0
    report(9, a == b, f"criterion-5 experiment re-run: results.csv {len(a)} bytes, "
                      f"{'byte-identical' if a == b else 'DIFFERENT'}", dt, 1800)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
