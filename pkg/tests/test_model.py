import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetsec.model import (BeamformingSolution, NetworkConfig, audit, db2lin, dbm2watt,
                          harvested_energy, secrecy_rate, secrecy_rate_raw, sinr_er, sinr_ir,
                          sinr_mu, total_power, watt2dbm)


def test_unit_conversions():
    assert dbm2watt(30.0) == pytest.approx(1.0)
    assert watt2dbm(1e-3) == pytest.approx(0.0)
    assert db2lin(-10.0) == pytest.approx(0.1)


def test_default_network():
    cfg = NetworkConfig()
    assert cfg.p_th == pytest.approx(10.0)
    np.testing.assert_allclose(cfg.q, dbm2watt(15.0))
    np.testing.assert_allclose(cfg.sigma2_e, 1e-13)
    cfg.validate()


@pytest.mark.parametrize("over", [dict(n_f=2), dict(xi=0.0), dict(xi=1.5), dict(p_th=0.0),
                                  dict(d_fbs_er=0.0), dict(n_m=1)])
def test_validation_rejects(over):
    with pytest.raises(ValueError):
        NetworkConfig().with_(**over).validate()


def hand_instance():
    """Tiny real-valued instance whose SINRs can be computed by hand."""
    from hetsec.channels import ChannelSet
    cfg = NetworkConfig(n_m=2, n_f=2, m=1, k=1, gamma=1.0, p_th=10.0, q=0.5, xi=0.5,
                        sigma2_m=1.0, sigma2_i=1.0, sigma2_e=1.0)
    ch = ChannelSet(h_m=np.array([[1.0, 0.0]], complex), h_i0=np.array([0.0, 1.0], complex),
                    g_k0=np.array([[1.0, 1.0]], complex), h_i=np.array([2.0, 0.0], complex),
                    g_k=np.array([[0.0, 1.0]], complex), l_m=np.array([[1.0, 1.0]], complex))
    sol = BeamformingSolution(np.array([[1.0, 1.0]], complex), np.array([1.0, 0.0], complex),
                              np.array([0.0, 2.0], complex))
    return cfg, ch, sol


def test_hand_computed_metrics():
    cfg, ch, sol = hand_instance()
    # MU: |1|^2 / (|1|^2 + |2|^2 + 1)
    assert sinr_mu(sol, ch, cfg, 0) == pytest.approx(1 / 6)
    # IR: |2|^2 / (|1|^2 + 0 + 1)
    assert sinr_ir(sol, ch, cfg) == pytest.approx(2.0)
    # ER: 0 / (|2|^2 + |2|^2 + 1)
    assert sinr_er(sol, ch, cfg, 0) == pytest.approx(0.0)
    assert total_power(sol) == pytest.approx(7.0)
    assert harvested_energy(sol, ch, cfg, 0) == pytest.approx(0.5 * (0 + 4 + 1))
    assert secrecy_rate_raw(sol, ch, cfg) == pytest.approx(math.log2(3.0))
    rep = audit(sol, ch, cfg)
    assert not rep.feasible
    assert rep.worst_violation == pytest.approx(1 - 1 / 6)
    np.testing.assert_allclose(rep.eh_slack, [2.0])


def test_audit_scales_power():
    cfg, ch, sol = hand_instance()
    rep = audit(sol.scaled(2.0), ch, cfg)
    assert rep.power_slack == pytest.approx(10.0 - 28.0)


def test_secrecy_rate_clamped():
    cfg, ch, sol = hand_instance()
    bad = BeamformingSolution(sol.w_m, np.array([0.0, 3.0], complex), np.zeros(2, complex))
    assert secrecy_rate_raw(bad, ch, cfg) < 0
    assert secrecy_rate(bad, ch, cfg) == 0.0


def test_solution_json_roundtrip():
    rng = np.random.default_rng(0)
    sol = BeamformingSolution(rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)),
                              rng.normal(size=4) + 0j, 1j * rng.normal(size=4))
    back = BeamformingSolution.from_json(sol.to_json())
    np.testing.assert_array_equal(back.w_m, sol.w_m)
    np.testing.assert_array_equal(back.v_e, sol.v_e)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 31 - 1), a=st.floats(0.0, 2.0 * math.pi))
def test_metrics_phase_invariant(seed, a):
    # a common phase rotation of one beam changes no power-based metric
    cfg, ch, sol = hand_instance()
    rng = np.random.default_rng(seed)
    sol = BeamformingSolution(rng.normal(size=(1, 2)) + 1j * rng.normal(size=(1, 2)),
                              rng.normal(size=2) + 1j * rng.normal(size=2),
                              rng.normal(size=2) + 1j * rng.normal(size=2))
    rot = BeamformingSolution(sol.w_m * np.exp(1j * a), sol.w_i * np.exp(-1j * a), sol.v_e)
    assert secrecy_rate_raw(rot, ch, cfg) == pytest.approx(secrecy_rate_raw(sol, ch, cfg), abs=1e-9)
    assert sinr_mu(rot, ch, cfg, 0) == pytest.approx(sinr_mu(sol, ch, cfg, 0), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 31 - 1), f=st.floats(1.01, 10.0))
def test_ir_sinr_monotone_in_signal(seed, f):
    cfg, ch, _ = hand_instance()
    rng = np.random.default_rng(seed)
    sol = BeamformingSolution(rng.normal(size=(1, 2)) + 0j, rng.normal(size=2) + 0j,
                              rng.normal(size=2) + 0j)
    up = BeamformingSolution(sol.w_m, sol.w_i * f, sol.v_e)
    assert sinr_ir(up, ch, cfg) >= sinr_ir(sol, ch, cfg)
