"""``hetsec`` command line: run, sweep-power, runtime-vs-k, audit."""

from __future__ import annotations

import argparse
import json
import os
import sys

from ..baselines import SCHEMES
from ..channels import generate_channel_set
from ..model import BeamformingSolution, audit, secrecy_rate, secrecy_rate_raw
from ..sca.layout import SubproblemLayout
from .config import load_config
from .experiments import aggregate, run_single, runtime_vs_k, sweep_power
from .output import emit_outputs


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="PATH", help="flat key = value config file")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--trials", type=int, help="seeds per sweep point")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--scheme", metavar="LIST", help=f"comma list from {','.join(SCHEMES)}")
    p.add_argument("--eh-mode", choices=("separated", "as_printed"))
    p.add_argument("--objective-mode", choices=("gamma_diff", "gamma"))
    p.add_argument("--q", type=int, help="order of the exponential-cone approximation")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--traces", action="store_true", help="write per-run SCA traces")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key (repeatable)")


def _overrides(a) -> list:
    out = []
    for item in a.set:
        if "=" not in item:
            raise SystemExit(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out.append((k.strip(), v.strip()))
    flags = {"seed": "experiment.seed", "trials": "experiment.trials", "out": "experiment.out",
             "scheme": "experiment.schemes", "eh_mode": "sca.eh_mode",
             "objective_mode": "sca.objective_mode", "q": "sca.q", "workers": "experiment.workers"}
    for attr, key in flags.items():
        v = getattr(a, attr, None)
        if v is not None:
            out.append((key, str(v)))
    if getattr(a, "traces", False):
        out.append(("experiment.traces", "true"))
    if getattr(a, "p_th_dbm", None) is not None:
        out.append(("network.p_th_dbm", str(a.p_th_dbm)))
    return out


def _print_aggregates(rows, out=None):
    out = out or sys.stdout
    for g in aggregate(rows):
        mean = "n/a" if g["mean"] is None else f"{g['mean']:.4f} +- {g['stderr']:.4f}"
        out.write(f"{g['sweep']}={g['value']:g} {g['scheme']:9s} feasible {g['feasible']}/{g['rows']}"
                  f"  mean {mean}  zero-filled {g['mean_zero_filled']:.4f}\n")


def cmd_run(a):
    ecfg = load_config(a.config, _overrides(a))
    seed = ecfg["experiment.seed"]
    rows, traces = run_single(ecfg, seed, keep_traces=True)
    out = ecfg["experiment.out"]
    p = ecfg["network.p_th_dbm"]
    emit_outputs(rows, out, ecfg, "run", traces={(seed, k, p): t for k, t in traces.items()})
    net = ecfg.network()
    lay = SubproblemLayout(net.m, net.k, net.n_m, net.n_f, ecfg["sca.q"])
    with open(os.path.join(out, "layout.txt"), "w") as fh:
        fh.write(lay.describe() + "\n")
    for r in rows:
        print(f"seed {r.seed} {r.scheme:9s} rate {r.secrecy_rate:.6f} feasible {int(r.feasible)} "
              f"iterations {r.iterations} status {r.status}")
    return 0


def cmd_sweep_power(a):
    ecfg = load_config(a.config, _overrides(a))
    rows, traces = sweep_power(ecfg)
    emit_outputs(rows, ecfg["experiment.out"], ecfg, "sweep-power", traces=traces)
    _print_aggregates(rows)
    return 0


def cmd_runtime_vs_k(a):
    ecfg = load_config(a.config, _overrides(a))
    rows, layouts = runtime_vs_k(ecfg)
    emit_outputs(rows, ecfg["experiment.out"], ecfg, "runtime-vs-k",
                 extra={"layouts": {str(k): v for k, v in layouts.items()}})
    for g in aggregate(rows):
        t = g["median_wall_time"]
        lay = layouts[int(g["value"])]
        print(f"K={g['value']:g} feasible {g['feasible']}/{g['rows']} median time "
              f"{'n/a' if t is None else f'{t:.3f} s'} variables {lay['variables']} rows {lay['rows']}")
    return 0


def cmd_audit(a):
    ecfg = load_config(a.config, _overrides(a))
    with open(a.solution) as fh:
        data = json.load(fh)
    if "solution" in data:
        data = data["solution"]
    if data is None:
        raise SystemExit("file holds no solution (the run was infeasible)")
    sol = BeamformingSolution.from_json(data)
    net = ecfg.network()
    ch = generate_channel_set(net, ecfg["experiment.seed"])
    rep = audit(sol, ch, net, tol=a.tol).to_json()
    rep.update(secrecy_rate=secrecy_rate(sol, ch, net), secrecy_rate_raw=secrecy_rate_raw(sol, ch, net))
    json.dump(rep, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")
    return 0 if rep["feasible"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hetsec", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="all schemes on one seed, with traces")
    _common(p)
    p.add_argument("--p-th-dbm", type=float, help="power budget in dBm")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("sweep-power", help="secrecy rate versus power budget")
    _common(p)
    p.set_defaults(func=cmd_sweep_power)
    p = sub.add_parser("runtime-vs-k", help="proposed-scheme run time versus number of ERs")
    _common(p)
    p.set_defaults(func=cmd_runtime_vs_k)
    p = sub.add_parser("audit", help="check a saved solution against the original constraints")
    _common(p)
    p.add_argument("--p-th-dbm", type=float, help="power budget in dBm")
    p.add_argument("solution", help="solution or trace JSON file")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_audit)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return a.func(a)
    except (ValueError, KeyError, OSError) as e:
        print(f"hetsec: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
