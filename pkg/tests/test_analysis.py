"""Bound arithmetic against an independent straight-line oracle."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from stochavg.analysis import (
    BoundInputs,
    BoundReport,
    balanced_variance_bound,
    bound_inputs,
    declared_envelope,
    empirical_c_tilde,
    empirical_var_xstar,
    full_report,
    growth_factors,
    rate_functional,
    small_gain_variance_bound,
    stationary_variance_bound,
)
from stochavg.errors import (
    BoundOverflow,
    ConfigError,
    InsufficientTrials,
    MissingInput,
    StrideTooCoarse,
)
from stochavg.flows import certify, deterministic_flow, iid_flow
from stochavg.gain import GainSchedule, gains, sum_c_squared
from stochavg.graph import Digraph, ring_graph
from stochavg.noise import affine_intensity, custom_intensity

ZETA_1_5 = 2.6123753486854883
ZETA_2_25 = 1.4602118661586485


def _ring_pair_inputs(scale=1.0):
    """n=4 i.i.d. flow over the two ring orientations; gain (a, 1, 0.75)."""
    return BoundInputs(
        sigma=0.1,
        b=0.1,
        beta=16.0,
        rho0=2.0,
        rho1=4.0,
        rho2=0.0,
        n=4,
        v0=5.0,
        x0_norm_sq=14.0,
        c_sum=scale**2 * ZETA_1_5,
        c3_sum=scale**3 * ZETA_2_25,
        lambda2_mean=1.0,
        l2_moment=4.0,
        rho1_bar=4.0,
        rho2_bar=0.0,
    )


# -- frozen worked instances (values from the scalar oracle script) ---------

def test_worked_instance_unit_gain():
    report = stationary_variance_bound(_ring_pair_inputs())
    assert report.q_v == pytest.approx(231179698.79490952, rel=1e-12)
    assert report.q_x == pytest.approx(53380917620979.591, rel=1e-12)
    assert report.term_additive == pytest.approx(0.41798005578967813, rel=1e-12)
    assert report.term_multiplicative == pytest.approx(193257006.79947454, rel=1e-12)
    assert report.term_unbalance == 0.0
    assert report.var_bound_thm1 == pytest.approx(193257007.2174546, rel=1e-12)
    # instantaneously balanced + rho1_bar == rho1: refinement coincides
    assert balanced_variance_bound(_ring_pair_inputs()) == pytest.approx(
        report.var_bound_thm1, rel=1e-12
    )
    ok, c_tilde, bound = small_gain_variance_bound(_ring_pair_inputs(), 1.0)
    assert (ok, c_tilde, bound) == (False, None, None)


def test_worked_instance_quarter_gain():
    inputs = _ring_pair_inputs(scale=0.25)
    assert inputs.c_sum == pytest.approx(0.16327345929284302, rel=1e-14)
    assert inputs.c3_sum == pytest.approx(0.022815810408728883, rel=1e-14)
    q_v, q_x = growth_factors(inputs)
    assert q_v == pytest.approx(15.202499837500428, rel=1e-12)
    assert q_x == pytest.approx(39.511956216115852, rel=1e-12)
    report = stationary_variance_bound(inputs)
    assert report.var_bound_thm1 == pytest.approx(0.8204164697644801, rel=1e-12)
    ok, c_tilde, bound = small_gain_variance_bound(inputs, 0.25)
    assert ok is True
    assert c_tilde == pytest.approx(3.5533451036754805, rel=1e-12)
    assert bound == pytest.approx(1.1631941866630086, rel=1e-12)


def test_worked_instance_unbalanced_edge():
    inputs = BoundInputs(
        sigma=0.2,
        b=0.3,
        beta=9.0,
        rho0=math.sqrt(2.0),
        rho1=1.0,
        rho2=1.0,
        n=3,
        v0=42.0 / 9.0,
        x0_norm_sq=6.0,
        c_sum=0.22055740452570551,
        c3_sum=0.0,
    )
    report = stationary_variance_bound(inputs)
    assert report.q_v == pytest.approx(10.728865957501798, rel=1e-12)
    assert report.q_x == pytest.approx(15.178817607756575, rel=1e-12)
    assert report.term_additive == pytest.approx(0.079400665629253984, rel=1e-12)
    assert report.term_multiplicative == pytest.approx(0.75722586530905438, rel=1e-12)
    assert report.term_unbalance == pytest.approx(2.231867076890579, rel=1e-12)
    assert report.var_bound_thm1 == pytest.approx(3.0684936078288874, rel=1e-12)
    with pytest.raises(MissingInput):
        balanced_variance_bound(inputs)
    with pytest.raises(MissingInput):
        small_gain_variance_bound(inputs, 0.1)


def test_bound_inputs_from_real_certificate():
    forward = ring_graph(4, directed=True)
    backward = Digraph(4, forward.adjacency.T.copy())
    flow = iid_flow([forward, backward], [0.5, 0.5])
    cert = certify(flow)
    inputs = bound_inputs(
        cert, 0.1, 0.1, 16.0, [0.0, 1.0, 2.0, 3.0], GainSchedule(1.0, 1.0, 0.75)
    )
    assert inputs.rho0 == pytest.approx(2.0, rel=1e-12)
    assert inputs.rho1 == pytest.approx(4.0, rel=1e-12)
    assert inputs.rho2 == pytest.approx(0.0, abs=1e-12)
    assert inputs.lambda2_mean == pytest.approx(1.0, rel=1e-10)
    assert inputs.l2_moment == pytest.approx(4.0, rel=1e-10)
    assert inputs.v0 == pytest.approx(5.0, rel=1e-14)
    assert inputs.x0_norm_sq == pytest.approx(14.0, rel=1e-14)
    assert inputs.c_sum == pytest.approx(ZETA_1_5, rel=1e-9)
    report = stationary_variance_bound(inputs)
    assert report.var_bound_thm1 == pytest.approx(193257007.2174546, rel=1e-8)


# -- structural properties --------------------------------------------------

def test_noise_free_balanced_bound_is_zero():
    inputs = BoundInputs(
        sigma=0.0, b=0.0, beta=4.0, rho0=1.0, rho1=2.0, rho2=0.0,
        n=3, v0=1.0, x0_norm_sq=2.0, c_sum=0.5, c3_sum=0.2,
    )
    report = stationary_variance_bound(inputs)
    assert report.var_bound_thm1 == 0.0
    assert report.term_additive == 0.0
    assert report.term_multiplicative == 0.0
    assert report.term_unbalance == 0.0
    assert report.q_v > 0.0  # v0 keeps the envelope positive


def test_balanced_flow_drops_third_term():
    base = _ring_pair_inputs(scale=0.5)
    report = stationary_variance_bound(base)
    assert report.term_unbalance == 0.0
    assert report.var_bound_thm1 == pytest.approx(
        report.term_additive + report.term_multiplicative, rel=1e-15
    )


def test_bound_monotone_in_each_input():
    base = dict(
        sigma=0.1, b=0.2, beta=4.0, rho0=1.0, rho1=2.0, rho2=0.5,
        n=4, v0=1.0, x0_norm_sq=3.0, c_sum=0.4, c3_sum=0.1,
    )
    ref = stationary_variance_bound(BoundInputs(**base)).var_bound_thm1
    for field in ("sigma", "b", "beta", "rho1", "rho2"):
        bumped = dict(base)
        bumped[field] = base[field] * 1.3 + 0.01
        worse = stationary_variance_bound(BoundInputs(**bumped)).var_bound_thm1
        assert worse >= ref, field


def test_scaling_with_agent_count_is_one_over_n():
    # beta growing like the channel count per agent keeps the refinement
    # O(1/N); doubling N should halve it up to exponential-factor drift
    def bound_at(n):
        inputs = BoundInputs(
            sigma=0.05, b=0.2, beta=float(n), rho0=1.0, rho1=2.0, rho2=0.0,
            n=n, v0=1.0, x0_norm_sq=2.0, c_sum=0.3, c3_sum=0.1,
            lambda2_mean=1.0, l2_moment=2.0, rho1_bar=2.0, rho2_bar=0.0,
        )
        return balanced_variance_bound(inputs)

    ratio = bound_at(4) / bound_at(8)
    assert 1.8 <= ratio <= 2.2


def test_zero_connectivity_fails_small_gain():
    inputs = _ring_pair_inputs(scale=0.25)
    zeroed = BoundInputs(
        **{
            **{f: getattr(inputs, f) for f in (
                "sigma", "b", "beta", "rho0", "rho1", "rho2", "n",
                "v0", "x0_norm_sq", "c_sum", "c3_sum",
                "l2_moment", "rho1_bar", "rho2_bar",
            )},
            "lambda2_mean": 0.0,
        }
    )
    ok, c_tilde, bound = small_gain_variance_bound(zeroed, 1e-9)
    assert ok is False and c_tilde is None and bound is None


def test_small_gain_zero_numerator_gives_zero_series_bound():
    inputs = BoundInputs(
        sigma=0.1, b=0.0, beta=16.0, rho0=2.0, rho1=4.0, rho2=0.0,
        n=4, v0=0.0, x0_norm_sq=0.0, c_sum=0.1, c3_sum=0.05,
        lambda2_mean=1.0, l2_moment=4.0, rho1_bar=4.0, rho2_bar=0.0,
    )
    ok, c_tilde, bound = small_gain_variance_bound(inputs, 0.1)
    assert ok is True
    assert c_tilde == 0.0
    assert bound == 0.0


def test_overflow_is_reported_not_saturated():
    inputs = BoundInputs(
        sigma=10.0, b=1.0, beta=1e4, rho0=2.0, rho1=10.0, rho2=0.0,
        n=4, v0=1.0, x0_norm_sq=1.0, c_sum=10.0, c3_sum=1.0,
    )
    with pytest.raises(BoundOverflow):
        stationary_variance_bound(inputs)


def test_input_validation():
    good = dict(
        sigma=0.1, b=0.1, beta=1.0, rho0=1.0, rho1=1.0, rho2=0.0,
        n=3, v0=1.0, x0_norm_sq=1.0, c_sum=0.1, c3_sum=0.1,
    )
    with pytest.raises(ConfigError):
        BoundInputs(**{**good, "sigma": -0.1})
    with pytest.raises(ConfigError):
        BoundInputs(**{**good, "n": 0})
    with pytest.raises(ConfigError):
        BoundInputs(**{**good, "rho1_bar": 1.0})  # partial one-shot fields


def test_full_report_assembles_every_bound():
    report = full_report(_ring_pair_inputs(scale=0.25), c0=0.25)
    assert isinstance(report, BoundReport)
    assert report.var_bound_remark6 == pytest.approx(
        report.var_bound_thm1, rel=1e-12
    )
    assert report.small_gain_ok is True
    assert report.var_bound_thm4 == pytest.approx(1.1631941866630086, rel=1e-12)
    bare = full_report(
        BoundInputs(
            sigma=0.1, b=0.1, beta=1.0, rho0=1.0, rho1=1.0, rho2=0.1,
            n=3, v0=1.0, x0_norm_sq=1.0, c_sum=0.1, c3_sum=0.1,
        )
    )
    assert bare.var_bound_remark6 is None
    assert bare.var_bound_thm4 is None
    assert bare.small_gain_ok is None


def test_declared_envelope_maxima():
    fns = [affine_intensity(0.1, 0.5), affine_intensity(0.3, 0.2)]
    assert declared_envelope(fns) == (0.3, 0.5, True)
    fns.append(custom_intensity(math.sin, sigma=0.0, b=1.0))
    sigma, b, certifiable = declared_envelope(fns)
    assert (sigma, b) == (0.3, 1.0)
    assert certifiable is False


# -- rate functional --------------------------------------------------------

def _fake_trial(spread_values):
    spread_values = np.asarray(spread_values, dtype=float)
    times = np.arange(spread_values.shape[0])
    return SimpleNamespace(times=times, spread=spread_values)


def test_rate_zero_trajectory():
    r = rate_functional(_fake_trial(np.zeros(50)), GainSchedule(1.0, 1.0, 0.75))
    assert r.shape == (49,)
    assert np.all(r == 0.0)


def test_rate_linearity_in_deviation_scale():
    rng = np.random.default_rng(0)
    v = rng.random(100)
    g = GainSchedule(0.5, 2.0, 0.8)
    r1 = rate_functional(_fake_trial(v), g)
    r2 = rate_functional(_fake_trial(9.0 * v), g)  # deviations scaled by 3
    assert r2 == pytest.approx(3.0 * r1, rel=1e-13)


def test_rate_detects_stalled_trajectory():
    horizon = 4000
    trial = _fake_trial(np.ones(horizon + 1))
    r = rate_functional(trial, GainSchedule(1.0, 1.0, 0.75))
    n = 100
    expected = math.sqrt(n * (n + 1.0) ** -0.75) * (n + 1.0) / n
    assert r[n - 1] == pytest.approx(expected, rel=1e-12)
    assert r[-1] > r[99] > 1.0  # grows like n^(1/8): non-consensus flagged


def test_rate_requires_unit_stride():
    trial = SimpleNamespace(times=np.array([0, 2, 4]), spread=np.ones(3))
    with pytest.raises(StrideTooCoarse):
        rate_functional(trial, GainSchedule(1.0, 1.0, 0.75))


def test_empirical_energy_series_diagnostic():
    g = GainSchedule(1.0, 1.0, 0.75)
    stats = SimpleNamespace(times=np.arange(200), mean_spread=np.full(200, 2.5))
    got = empirical_c_tilde(stats, g)
    assert got == pytest.approx(2.5 * float(np.sum(gains(g, 200) ** 2)), rel=1e-13)
    assert got < 2.5 * sum_c_squared(g)
    with pytest.raises(StrideTooCoarse):
        empirical_c_tilde(
            SimpleNamespace(times=np.array([0, 5]), mean_spread=np.ones(2)), g
        )


# -- final-centroid statistics ----------------------------------------------

def test_var_xstar_hand_example():
    stats = SimpleNamespace(final_centroids=np.array([0.0, 2.0]))
    est = empirical_var_xstar(stats)
    assert est.mean == 1.0
    assert est.variance == 2.0
    assert est.se_mean == pytest.approx(1.0, rel=1e-15)
    assert est.mean_halfwidth == pytest.approx(4.0, rel=1e-15)
    assert est.n_trials == 2


def test_var_xstar_degenerate_and_errors():
    stats = SimpleNamespace(final_centroids=np.full(5, 1.25))
    est = empirical_var_xstar(stats)
    assert est.variance == 0.0
    assert est.variance_halfwidth == 0.0
    with pytest.raises(InsufficientTrials):
        empirical_var_xstar(SimpleNamespace(final_centroids=np.array([1.0])))


def test_var_xstar_covers_known_variance():
    rng = np.random.default_rng(7)
    finals = rng.normal(3.0, 0.2, size=4000)
    est = empirical_var_xstar(SimpleNamespace(final_centroids=finals))
    assert abs(est.mean - 3.0) <= est.mean_halfwidth
    assert abs(est.variance - 0.04) <= est.variance_halfwidth
