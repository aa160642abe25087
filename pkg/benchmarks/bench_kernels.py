"""Compiled vs pure-Python cone kernels, and whole solves with each backend.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json PATH]

Kernel timings use cone layouts shaped like the SCA subproblem (a few
nonnegative rows and many small second-order cones); the end-to-end
timings solve one SCA subproblem of the default scenario.
"""

from __future__ import annotations

import argparse
import json
import platform
import timeit

import numpy as np

from hetsec.channels import generate_channel_set
from hetsec.model import NetworkConfig
from hetsec.sca.init import initialize
from hetsec.sca.subproblem import SCAConfig, build_subproblem
from hetsec.solver import _cones_py
from hetsec.solver.ipm import SolverConfig, solve

try:
    from hetsec.solver import _cones_cy
except ImportError:  # extension not built
    _cones_cy = None


def interior(rng, l, q):
    v = np.empty(l + int(sum(q)))
    v[:l] = rng.random(l) + 0.1
    off = l
    for qk in q:
        b = rng.normal(size=qk)
        b[0] = np.linalg.norm(b[1:]) + 1.0
        v[off:off + qk] = b
        off += qk
    return v


def kernel_cases(l, q, seed=0):
    rng = np.random.default_rng(seed)
    qa = np.asarray(q, dtype=np.intp)
    s, z = interior(rng, l, q), interior(rng, l, q)
    v = rng.normal(size=s.size)
    d, eta, wbar, lam = _cones_py.nt_scaling(s, z, l, qa)
    return {
        "nt_scaling": lambda K: K.nt_scaling(s, z, l, qa),
        "apply_w": lambda K: K.apply_w(d, eta, wbar, l, qa, v),
        "jordan_prod": lambda K: K.jordan_prod(s, v, l, qa),
        "jordan_div": lambda K: K.jordan_div(lam, v, l, qa),
        "max_step": lambda K: K.max_step(s, v, l, qa),
        "wtw_dense": lambda K: K.wtw_dense(d, eta, wbar, l, qa),
    }


def best_of(fn, repeat):
    n, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=n, repeat=repeat)) / n


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", metavar="PATH", help="also write the numbers as JSON")
    a = ap.parse_args(argv)

    backends = {"python": _cones_py}
    if _cones_cy is not None:
        backends["cython"] = _cones_cy
    out = {"python": platform.python_version(), "kernels": [], "solve": []}

    layouts = [("subproblem-like", 12, [3] * 20 + [7, 41]), ("many small", 50, [3] * 200),
               ("few large", 10, [50, 50, 100])]
    print(f"{'layout':16s} {'kernel':12s} " + " ".join(f"{b:>12s}" for b in backends) + "   speedup")
    for name, l, q in layouts:
        for kname, call in kernel_cases(l, q).items():
            t = {b: best_of(lambda K=K: call(K), a.repeat) for b, K in backends.items()}
            sp = t["python"] / t["cython"] if "cython" in t else float("nan")
            print(f"{name:16s} {kname:12s} " + " ".join(f"{t[b] * 1e6:10.1f}us" for b in backends)
                  + f"   {sp:6.1f}x")
            out["kernels"].append(dict(layout=name, kernel=kname, seconds=t, speedup=sp))

    cfg = NetworkConfig()
    ch = generate_channel_set(cfg, 5)
    start = initialize(ch, cfg)
    sub = build_subproblem(ch, cfg, start.point, SCAConfig())
    print(f"\nSCA subproblem: n={sub.program.n} rows={sub.program.m}")
    for b in backends:
        res = solve(sub.program, SolverConfig(backend=b))
        t = best_of(lambda b=b: solve(sub.program, SolverConfig(backend=b)), a.repeat)
        print(f"  {b:7s} {t * 1e3:8.1f} ms  ({res.iterations} iterations, {res.status})")
        out["solve"].append(dict(backend=b, seconds=t, iterations=res.iterations, status=res.status))

    if a.json:
        with open(a.json, "w") as fh:
            json.dump(out, fh, indent=1)


if __name__ == "__main__":
    main()
