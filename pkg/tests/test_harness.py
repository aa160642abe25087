import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetsec.harness.config import SCHEMA, ExperimentConfig, load_config, parse_config
from hetsec.harness.experiments import (ResultRow, aggregate, network_for_k, run_single,
                                        runtime_vs_k, sweep_power)
from hetsec.harness.output import emit_outputs, read_results_csv, write_results_csv


def test_defaults_cover_schema():
    cfg = ExperimentConfig()
    assert set(cfg.values) == set(SCHEMA)
    assert cfg.network().p_th == pytest.approx(10.0)
    assert cfg.sca().q == 6


def test_parse_and_dump_roundtrip():
    cfg = parse_config("""
        # comment
        network.p_th_dbm = 35   # trailing
        experiment.schemes = proposed, zf
        experiment.p_th_dbm_list = 20 30
        experiment.traces = yes
    """)
    assert cfg["network.p_th_dbm"] == 35.0
    assert cfg["experiment.schemes"] == ("proposed", "zf")
    assert cfg["experiment.traces"] is True
    assert parse_config(cfg.dumps()).values == cfg.values


@pytest.mark.parametrize("text", ["bogus.key = 1", "network.k", "experiment.trials = 0",
                                  "sca.eh_mode = weird", "experiment.p_th_dbm_list = 40 20",
                                  "experiment.traces = maybe"])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_config(text)


def test_load_config_overrides(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("experiment.seed = 9\n")
    cfg = load_config(str(p), [("experiment.trials", "3")])
    assert cfg["experiment.seed"] == 9 and cfg["experiment.trials"] == 3


def test_network_for_k_grows_array():
    cfg = ExperimentConfig()
    assert network_for_k(cfg, 2) == {"k": 2, "n_f": 4}
    assert network_for_k(cfg, 4) == {"k": 4, "n_f": 5}


def row(seed, scheme, value, rate, feasible, t=0.0):
    return ResultRow(seed, scheme, "p_th_dbm", value, rate, 3, "converged", feasible, 0.0, t)


def test_aggregate_oracle():
    rows = [row(0, "proposed", 40.0, 2.0, True, 1.0), row(1, "proposed", 40.0, 4.0, True, 3.0),
            row(2, "proposed", 40.0, 0.0, False, 0.5), row(0, "zf", 40.0, 1.0, True)]
    g = {a["scheme"]: a for a in aggregate(rows)}
    p = g["proposed"]
    assert (p["rows"], p["feasible"], p["infeasible"]) == (3, 2, 1)
    assert p["mean"] == pytest.approx(3.0)
    assert p["stderr"] == pytest.approx(1.0)
    assert p["mean_zero_filled"] == pytest.approx(2.0)
    assert p["median_wall_time"] == pytest.approx(2.0)
    assert g["zf"]["stderr"] == 0.0


@settings(max_examples=30, deadline=None)
@given(rates=st.lists(st.tuples(st.floats(0, 50), st.booleans()), min_size=1, max_size=20))
def test_aggregate_properties(rates):
    rows = [row(i, "proposed", 30.0, r if f else 0.0, f) for i, (r, f) in enumerate(rates)]
    (g,) = aggregate(rows)
    assert g["feasible"] + g["infeasible"] == len(rates)
    if g["feasible"]:
        assert g["mean_zero_filled"] <= g["mean"] + 1e-9
    else:
        assert g["mean"] is None


def test_csv_roundtrip(tmp_path):
    rows = [row(0, "proposed", 40.0, 1.0 / 3.0, True), row(0, "no_an", 40.0, 0.0, False)]
    p = tmp_path / "r.csv"
    write_results_csv(rows, p)
    back = read_results_csv(p)
    assert [r.secrecy_rate for r in back] == pytest.approx([1 / 3, 0.0], rel=1e-11)
    assert [r.feasible for r in back] == [True, False]
    assert "wall_time" not in p.read_text().splitlines()[0]


def small_cfg(tmp_path, **over):
    cfg = ExperimentConfig()
    cfg.set("experiment.trials", 2)
    cfg.set("experiment.seed", 4)
    cfg.set("experiment.p_th_dbm_list", "40")
    cfg.set("experiment.out", str(tmp_path))
    for k, v in over.items():
        cfg.set(k, v)
    return cfg


def test_run_single_pairs_schemes(tmp_path):
    rows, traces = run_single(small_cfg(tmp_path), 5, keep_traces=True)
    assert [r.scheme for r in rows] == ["proposed", "no_an", "zf"]
    assert set(traces) == {"proposed", "no_an"}


def test_sweep_is_deterministic(tmp_path):
    cfg = small_cfg(tmp_path)
    a, _ = sweep_power(cfg)
    b, _ = sweep_power(cfg)
    emit_outputs(a, tmp_path / "a", cfg, "t")
    emit_outputs(b, tmp_path / "b", cfg, "t")
    assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()
    s = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert s["metadata"]["kernel_backend"] in ("python", "cython")
    assert len(s["aggregates"]) == 3


def test_runtime_vs_k_stops_after_trials(tmp_path):
    cfg = small_cfg(tmp_path, **{"experiment.trials": 1, "experiment.k_list": "1",
                                  "experiment.max_attempts": 20})
    rows, layouts = runtime_vs_k(cfg)
    assert sum(r.feasible for r in rows) == 1
    assert rows[-1].feasible and {r.scheme for r in rows} == {"proposed"}
    assert layouts[1]["n_f"] == 4
