import math

import numpy as np
import pytest

from ailc import controller as ctl_mod
from ailc.adaptation import AdaptState, ProjectionBall, Variant, update
from ailc.controller import ControllerConfig, mimo_run_experiment, run_experiment, run_iteration
from ailc.disturbances import DisturbanceSpec, DisturbanceStream
from ailc.errors import ConfigurationError, RolloutAborted
from ailc.plant import CoupledPlant, PlantSpec
from ailc.references import sine
from ailc.solver import SolverConfig
from ailc.systems import EXAMPLE1_BALL, EXAMPLE2_THETA, example1, example1_theta, example2, fixed_initial

from conftest import scenario_result

DIRECT = ControllerConfig(variant=Variant.DISTURBANCE_FREE, input_mode="direct_solve", eta=1.9)
REF = sine(0.8, 25.0)


def true_theta_state(plant, cfg):
    theta = np.array([plant.theta_schedule(t) for t in range(plant.n_times)])
    return AdaptState(theta, np.zeros(plant.n_times), cfg.eta, ProjectionBall(np.zeros(4), 1e3), cfg.variant)


def test_perfect_knowledge_tracks_exactly():
    plant = example1()
    tr = run_iteration(plant, true_theta_state(plant, DIRECT), DIRECT, REF)
    assert tr.max_err < 1e-11


def test_perfect_knowledge_fixed_point_mode():
    plant = example1()
    cfg = ControllerConfig(variant=Variant.DISTURBANCE_FREE, input_mode="fixed_point", eta=1.9,
                           solver=SolverConfig(d0_lower=0.5, epsilon_tol=1e-8))
    tr = run_iteration(plant, true_theta_state(plant, cfg), cfg, REF)
    # input error below 1e-8 times a local gain of at most a few tens
    assert tr.max_err < 1e-6
    assert set(tr.solver_stop) <= {"criterion_met", "fixed_point_exact"}


def test_perfect_knowledge_relative_degree_two():
    plant = example2(seed=4)
    cfgs = [DIRECT, DIRECT]
    adapts = [true_theta_state(c, DIRECT) for c in plant.channels]
    per = mimo_run_experiment(plant, adapts, cfgs, [sine(0.1)] * 2, iterations=1)
    assert max(p[0].max_err for p in per) < 1e-11


def test_rho1_skips_estimator(monkeypatch):
    def boom(*a, **k):
        raise AssertionError("estimator used for rho = 1")

    monkeypatch.setattr(ctl_mod, "estimate_joint", boom)
    plant = example1()
    run_iteration(plant, AdaptState.initial(plant.n_times, EXAMPLE1_BALL, 1.9, Variant.DISTURBANCE_FREE),
                  DIRECT, REF)


def test_zero_iterations():
    plant = example1()
    ad = AdaptState.initial(plant.n_times, EXAMPLE1_BALL, 1.9, Variant.DISTURBANCE_FREE)
    assert run_experiment(plant, ad, DIRECT, REF, iterations=0) == []


def test_first_iteration_golden():
    tr = scenario_result("example1-compare").traces["ailc"][0]
    assert np.all(np.isfinite(tr.x))
    assert tr.max_err == pytest.approx(0.7185313824959761, rel=1e-12)  # pinned golden value


def test_adaptation_uses_measured_states():
    tr = scenario_result("example1-robust-d1").traces["ailc"][4]
    plant = example1()
    st = AdaptState(tr.theta_hat.copy(), tr.w_hat.copy(), 1.9, EXAMPLE1_BALL)
    for t in range(plant.n_times):
        update(st, t, tr.x[t + 1], plant.regressor(tr.x[t:t + 1], tr.u[t]))
    assert np.array_equal(st.theta_hat, tr.theta_hat_next)
    assert np.array_equal(st.w_hat, tr.w_hat_next)


def _decoupled(i, init):
    return PlantSpec(lambda Xs, u, i=i: example1().regressor(Xs[i], u), example1_theta, 1, 20, 4,
                     fixed_initial([init]), regressor_du=lambda Xs, u, i=i: example1().regressor_du(Xs[i], u))


def test_decoupled_channels_equal_independent_runs():
    plant = CoupledPlant((_decoupled(0, 0.0), _decoupled(1, 0.2)))
    cfg = ControllerConfig(eta=1.2, input_mode="direct_solve")
    streams = [DisturbanceStream(DisturbanceSpec("uniform", seed=5), channel=i) for i in range(2)]
    adapts = [cfg.adapt_state(plant.n_times, EXAMPLE1_BALL) for _ in range(2)]
    coupled = mimo_run_experiment(plant, adapts, [cfg, cfg], [REF, REF], streams, iterations=4)
    for i, init in enumerate((0.0, 0.2)):
        solo = example1(fixed_initial([init]), horizon=20)
        ad = cfg.adapt_state(solo.n_times, EXAMPLE1_BALL)
        stream = DisturbanceStream(DisturbanceSpec("uniform", seed=5), channel=i)
        traces = run_experiment(solo, ad, cfg, REF, stream, iterations=4)
        for a, b in zip(coupled[i], traces):
            assert np.array_equal(a.x, b.x) and np.array_equal(a.u, b.u)


def test_inputs_are_causal():
    """Changing the reference or disturbance after time s leaves u(0..s) untouched."""
    plant = example2(seed=2)
    cfg = ControllerConfig(eta=0.1, input_mode="direct_solve")
    s = 20

    def run(ref_shift, w_shift):
        refs = [lambda k, t: 0.1 * math.sin(t / 4) + (ref_shift if t > s + 2 else 0.0)] * 2
        dists = [lambda k, t, x: 1e-4 * math.cos(t) + (w_shift if t >= s else 0.0)] * 2
        adapts = [cfg.adapt_state(plant.n_times, ProjectionBall(th, 0.5)) for th in EXAMPLE2_THETA]
        return mimo_run_experiment(plant, adapts, [cfg, cfg], refs, dists, iterations=1)

    base, other = run(0.0, 0.0), run(0.05, 0.01)
    for ch in range(2):
        assert np.array_equal(base[ch][0].u[: s + 1], other[ch][0].u[: s + 1])
        assert not np.array_equal(base[ch][0].u, other[ch][0].u)


def test_rollout_abort_reports_position():
    spec = PlantSpec(lambda X, u: np.array([math.exp(min(X[0], 700.0)) * 1e300, u]), lambda t: np.array([1.0, 1.0]),
                     1, 10, 2, fixed_initial([0.0]))
    cfg = ControllerConfig(input_mode="direct_solve")
    ad = cfg.adapt_state(spec.n_times, ProjectionBall(np.array([0.0, 1.0]), 0.1))
    with pytest.raises(RolloutAborted) as info:
        run_experiment(spec, ad, cfg, lambda k, t: 0.0, iterations=1)
    assert info.value.k == 1 and info.value.t >= 0


def test_variant_mismatch():
    plant = example1()
    ad = AdaptState.initial(plant.n_times, EXAMPLE1_BALL, 1.9)
    with pytest.raises(ConfigurationError):
        run_experiment(plant, ad, DIRECT, REF)


def test_robust_invariants_short_run():
    plant = example1()
    cfg = ControllerConfig(eta=1.9, input_mode="direct_solve")
    ad = cfg.adapt_state(plant.n_times, EXAMPLE1_BALL)
    traces = run_experiment(plant, ad, cfg, REF, DisturbanceStream(DisturbanceSpec("bernoulli_like", seed=3)), 15)
    for tr in traces:
        assert np.all(tr.w_hat_next >= tr.w_hat)
        assert np.all(tr.V_next <= tr.V + 1e-12)
        assert np.all(np.linalg.norm(tr.theta_hat_next - EXAMPLE1_BALL.center, axis=1) <= 0.9 + 1e-12)
        assert np.all((0 <= tr.a) & (tr.a <= 1))


def test_vanishing_adaptation_signal():
    plant = example1()
    traces = scenario_result("example1-compare").traces["ailc"]
    sig = []
    for tr in traces:
        m_sq = np.array([1 + np.sum(plant.regressor(tr.x[t:t + 1], tr.u[t]) ** 2) for t in range(len(tr.u))])
        sig.append((tr.a * tr.epsilon) ** 2 * m_sq)
    running_min = np.minimum.accumulate(np.array(sig), axis=0)
    assert np.all(running_min[-1] <= 1e-6 * running_min[0])
