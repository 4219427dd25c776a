"""Step-size schedule checks, including series sums against known constants."""

import numpy as np
import pytest

from stochavg.errors import ConfigError, Divergent
from stochavg.gain import (
    DEFAULT_GAIN,
    GainSchedule,
    gain_at,
    gain_from_dict,
    gains,
    sum_c_cubed,
    sum_c_squared,
    validate,
)

# Reference values computed to 16 digits with arbitrary-precision zeta sums.
ZETA_1_5 = 2.6123753486854883
ZETA_2_25 = 1.4602118661586485
PI2_OVER_6 = 1.6449340668482264
APERY = 1.2020569031595943


def test_gain_at_and_vector_agree():
    s = GainSchedule(a=0.5, k0=4.0, gamma=0.75)
    c = gains(s, 10)
    assert c == pytest.approx([gain_at(s, k) for k in range(10)], rel=0.0)
    assert c[0] == pytest.approx(0.5 / 4.0**0.75)


def test_gains_decreasing():
    c = gains(DEFAULT_GAIN, 1000)
    assert np.all(np.diff(c) < 0.0)


def test_sum_c_squared_basel():
    # gamma=1, a=1, k0=1 gives sum 1/(k+1)^2 = pi^2/6.
    s = GainSchedule(a=1.0, k0=1.0, gamma=1.0)
    assert sum_c_squared(s, tol=1e-11) == pytest.approx(PI2_OVER_6, abs=1e-10)


def test_sum_c_squared_scaled_basel():
    # Amplitude 0.5 scales the Basel sum by 1/4.
    s = GainSchedule(a=0.5, k0=1.0, gamma=1.0)
    assert sum_c_squared(s, tol=1e-11) == pytest.approx(
        PI2_OVER_6 / 4.0, abs=1e-10
    )


def test_sum_c_squared_default_gamma():
    assert sum_c_squared(DEFAULT_GAIN, tol=1e-11) == pytest.approx(
        ZETA_1_5, abs=1e-10
    )


def test_sum_c_cubed_known_values():
    assert sum_c_cubed(
        GainSchedule(1.0, 1.0, 1.0), tol=1e-11
    ) == pytest.approx(APERY, abs=1e-10)
    assert sum_c_cubed(DEFAULT_GAIN, tol=1e-11) == pytest.approx(
        ZETA_2_25, abs=1e-10
    )


def test_sum_bracketed_by_partial_sums():
    """Result must sit between a partial sum and partial sum + coarse tail."""
    for s in (
        GainSchedule(1.0, 1.0, 0.75),
        GainSchedule(0.5, 4.0, 0.6),
        GainSchedule(2.0, 2.0, 1.0),
    ):
        n_terms = 1_000_000
        k = np.arange(n_terms, dtype=float)
        partial = float(np.sum(s.a**2 * (k + s.k0) ** (-2 * s.gamma)))
        coarse_tail = (
            s.a**2
            * (n_terms + s.k0 - 1) ** (1 - 2 * s.gamma)
            / (2 * s.gamma - 1)
        )
        total = sum_c_squared(s, tol=1e-10)
        assert partial - 1e-12 <= total <= partial + coarse_tail + 1e-12


def test_sum_tol_consistency():
    s = GainSchedule(1.0, 3.0, 0.8)
    loose = sum_c_squared(s, tol=1e-5)
    tight = sum_c_squared(s, tol=1e-12)
    assert loose == pytest.approx(tight, abs=1e-5)


def test_slowly_converging_exponent():
    # 2*gamma barely above 1; the sandwich must still reach the tolerance.
    s = GainSchedule(1.0, 1.0, 0.51)
    v = sum_c_squared(s, tol=1e-8)
    assert v > 50.0  # diverges like 1/(2*gamma - 1)


def test_divergent_square_sum():
    with pytest.raises(Divergent):
        sum_c_squared(GainSchedule(1.0, 1.0, 0.5))


def test_divergent_cube_sum():
    with pytest.raises(Divergent):
        sum_c_cubed(GainSchedule(1.0, 1.0, 1.0 / 3.0))


def test_validate_flags():
    assert validate(DEFAULT_GAIN).all_satisfied
    flags = validate(GainSchedule(1.0, 1.0, 0.4))
    assert flags.persistent and flags.vanishing
    assert not flags.square_summable
    assert not flags.all_satisfied


def test_schedule_rejects_bad_parameters():
    with pytest.raises(ConfigError):
        GainSchedule(a=-1.0, k0=1.0, gamma=0.75)
    with pytest.raises(ConfigError):
        GainSchedule(a=1.0, k0=0.5, gamma=0.75)
    with pytest.raises(ConfigError):
        GainSchedule(a=1.0, k0=1.0, gamma=1.5)


def test_gain_from_dict_defaults():
    s = gain_from_dict({})
    assert s == DEFAULT_GAIN
    s = gain_from_dict({"a": 2.0})
    assert s.a == 2.0 and s.gamma == DEFAULT_GAIN.gamma
