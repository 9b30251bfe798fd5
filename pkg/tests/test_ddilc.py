import numpy as np
import pytest

from ailc.ddilc import DdilcParams, DdilcState, ddilc_update, run_ddilc_experiment
from ailc.errors import ConfigurationError
from ailc.systems import example1, example2

from conftest import scenario_result

GAINS = DdilcParams(eta=0.5, rho=0.4, lam=1.0, mu=0.5, theta0=1.0, u0=0.0)


def ref_const(k, t):
    return 1.0


def test_zero_input_change_resets():
    st = DdilcState.initial(3, GAINS)
    st.theta_prime[:] = 5.0
    x = np.zeros(4)
    ddilc_update(st, 2, x, x, st.u.copy(), ref_const)
    assert st.theta_prime.tolist() == [1.0, 1.0, 1.0]


def test_perfect_tracking_keeps_input():
    st = DdilcState.initial(3, GAINS)
    st.u[:] = [0.3, -0.2, 0.1]
    u_prev = st.u - 0.5
    x = np.ones(4)
    out = ddilc_update(st, 2, x, x - 0.2, u_prev, ref_const)
    assert out.tolist() == [0.3, -0.2, 0.1]


def test_update_matches_hand_formula():
    st = DdilcState.initial(1, GAINS)
    st.u[:] = [1.0]
    st.theta_prime[:] = [0.8]
    x_k, x_prev, u_prev = np.array([0.0, 0.6]), np.array([0.0, 0.2]), np.array([0.5])
    du, dx = 0.5, 0.4
    cand = 0.8 + 0.5 * du * (dx - 0.8 * du) / (0.5 + du * du)
    expected = 1.0 + 0.4 * cand * (1.0 - 0.6) / (1.0 + cand * cand)
    out = ddilc_update(st, 3, x_k, x_prev, u_prev, ref_const)
    assert st.theta_prime[0] == pytest.approx(cand, rel=1e-15)
    assert out[0] == pytest.approx(expected, rel=1e-15)


def test_sign_flip_resets():
    st = DdilcState.initial(1, GAINS)
    st.u[:] = [1.0]
    st.theta_prime[:] = [0.1]
    # a large negative increment ratio drives the candidate below zero
    ddilc_update(st, 3, np.array([0.0, -5.0]), np.array([0.0, 5.0]), np.array([0.0]), ref_const)
    assert st.theta_prime[0] == 1.0


def test_requires_relative_degree_one():
    with pytest.raises(ConfigurationError):
        run_ddilc_experiment(example2().channels[0], GAINS, ref_const)
    with pytest.raises(ConfigurationError):
        DdilcParams(lam=0.0)


def test_first_iteration_applies_u0():
    traces = run_ddilc_experiment(example1(), GAINS, ref_const, iterations=2)
    assert np.all(traces[0].u == 0.0)
    assert np.all(np.isnan(traces[0].epsilon))


def test_golden_and_invariant_phase():
    traces = scenario_result("example1-compare").traces["ddilc"]
    mx = [tr.max_err for tr in traces]
    assert mx[9] < mx[0]
    # pinned from the first validated run (seed 0)
    assert mx[0] == pytest.approx(2.686602400501874, rel=1e-12)
    assert traces[-1].avg_err == pytest.approx(0.5729372656674991, rel=1e-9)
