import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperlat import (
    levy_scaling_check,
    levy_spectral_integral,
    mc_mixing_covariance,
    mixing_covariance,
    mixing_decay_check,
    variogram,
)


def closed_form_levy_integral(h: float, t: float) -> float:
    """Analytic oracle: 4 t^{2h} Gamma(2-2h) cos(pi h) / (2h (1-2h)), h != 1/2."""
    return 4.0 * t ** (2 * h) * math.gamma(2 - 2 * h) * math.cos(math.pi * h) / (2 * h * (1 - 2 * h))


# -- variogram and kernel ---------------------------------------------------


def test_variogram_values():
    assert variogram(0.25, 0.0) == 0.0
    assert variogram(0.5, 4.0) == 4.0
    assert variogram(0.25, 16.0) == pytest.approx(4.0, abs=1e-14)


def test_kernel_zero_when_lag_zero():
    for h in (0.25, 0.5, 0.75):
        for t in (0.5, 10.0, 1e5):
            assert mixing_covariance(h, 0.0, 2.0, t) == 0.0
            assert mixing_covariance(h, 2.0, 0.0, t) == 0.0


def test_kernel_brownian_example():
    # 11 + 11 - 12 - 10 = 0
    assert mixing_covariance(0.5, 1.0, 1.0, 10.0) == 0.0


@given(
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=0.0, max_value=1e6),
)
def test_kernel_brownian_vanishes_with_positive_args(a, b, t):
    assert abs(mixing_covariance(0.5, a, b, t)) < 1e-9


@given(
    st.floats(min_value=0.05, max_value=0.95),
    st.floats(min_value=0.1, max_value=5.0),
    st.floats(min_value=0.1, max_value=5.0),
    st.floats(min_value=0.0, max_value=1e4),
)
def test_kernel_symmetric_in_lags(h, a, b, t):
    assert mixing_covariance(h, a, b, t) == pytest.approx(
        mixing_covariance(h, b, a, t), rel=1e-12, abs=1e-15
    )


def test_kernel_taylor_oracle_at_large_t():
    # Second-order finite-difference oracle: V(1,1,t) ~ -v''(t) = -2h(2h-1)t^{2h-2}.
    h, t = 0.25, 100.0
    got = mixing_covariance(h, 1.0, 1.0, t)
    taylor = -2 * h * (2 * h - 1) * t ** (2 * h - 2)
    assert got == pytest.approx(2.46303879703e-4, rel=1e-9)  # exact value, frozen
    assert abs(got - taylor) / abs(got) < 0.05


@pytest.mark.parametrize("h,const", [(0.25, 0.25), (0.75, 0.75)])
def test_kernel_limit_constant(h, const):
    # |V_{1,1}(t)| * t^{2-2h} -> |2h(2h-1)| within 1% at t = 1e4.
    t = 1e4
    v = mixing_covariance(h, 1.0, 1.0, t)
    assert abs(abs(v) * t ** (2 - 2 * h) - const) < 0.01 * const


def test_kernel_stable_branch_consistent():
    # expm1/log1p branch must agree with the direct branch where both work.
    for h in (0.25, 0.6):
        direct = (
            variogram(h, 11.0) + variogram(h, 11.0) - variogram(h, 12.0) - variogram(h, 10.0)
        )
        assert mixing_covariance(h, 1.0, 1.0, 10.0) == pytest.approx(direct, rel=1e-12)
        t = np.array([100.0, 1e5])
        vals = mixing_covariance(h, 1.0, 1.0, t)
        assert np.all(np.isfinite(vals))


# -- decay verdicts ---------------------------------------------------------


def test_decay_verdict_hyperuniform():
    t = np.logspace(0, 3, 200)
    curve, verdict = mixing_decay_check(0.25, 1.0, 1.0, t)
    assert verdict
    assert len(curve.values) == 200


def test_decay_verdict_hyperfluctuating_needs_longer_grid():
    short = np.logspace(0, 3, 200)
    _, verdict_short = mixing_decay_check(0.75, 1.0, 1.0, short)
    assert not verdict_short  # |V| ~ t^{-1/2} has only fallen ~30x by t=1e3
    long = np.logspace(0, 8, 400)
    _, verdict_long = mixing_decay_check(0.75, 1.0, 1.0, long)
    assert verdict_long


def test_decay_verdict_zero_lag_trivial():
    t = np.logspace(0, 3, 50)
    curve, verdict = mixing_decay_check(0.5, 0.0, 1.0, t)
    assert verdict
    assert np.all(curve.values == 0.0)


def test_decay_grid_must_increase():
    with pytest.raises(ValueError):
        mixing_decay_check(0.25, 1.0, 1.0, np.array([3.0, 2.0, 1.0]))


# -- Monte Carlo covariance -------------------------------------------------


def test_mc_brownian_independent_increments(key):
    est, se = mc_mixing_covariance(0.5, 1, 1, 10, 100_000, key)
    assert abs(est) < 5 * se


def test_mc_matches_half_kernel_at_origin(key):
    # Population covariance is half the four-term kernel (polarization):
    # at t=0, a=b=1, h=0.25 the value is (2 - sqrt(2))/2.
    est, se = mc_mixing_covariance(0.25, 1, 1, 0, 200_000, key)
    target = (2.0 - math.sqrt(2.0)) / 2.0
    assert abs(est - target) < 5 * se
    # the unhalved kernel is decisively rejected
    assert abs(est - 2 * target) > 20 * se


def test_mc_matches_half_kernel_at_distance(key):
    h = 0.25
    est, se = mc_mixing_covariance(h, 1, 1, 20, 200_000, key)
    target = 0.5 * mixing_covariance(h, 1.0, 1.0, 20.0)
    assert abs(est - target) < 5 * se


def test_mc_dense_route_non_integer_lags(key):
    h, a, b, t = 0.3, 1.5, 0.5, 3.25
    est, se = mc_mixing_covariance(h, a, b, t, 150_000, key)
    target = 0.5 * mixing_covariance(h, a, b, t)
    assert abs(est - target) < 5 * se


def test_mc_determinism(key):
    a = mc_mixing_covariance(0.25, 1, 1, 5, 10_000, key)
    b = mc_mixing_covariance(0.25, 1, 1, 5, 10_000, key)
    assert a == b


# -- spectral scaling -------------------------------------------------------


def test_levy_integral_brownian_classical_value():
    assert levy_spectral_integral(0.5, 1.0) == pytest.approx(2 * math.pi, rel=1e-8)


@pytest.mark.parametrize("h", [0.25, 0.3, 0.75])
def test_levy_integral_analytic_oracle(h):
    for t in (0.5, 1.0, 2.0):
        assert levy_spectral_integral(h, t) == pytest.approx(
            closed_form_levy_integral(h, t), rel=1e-8
        )


def test_levy_scaling_deviation_tiny():
    assert levy_scaling_check(0.25, 1.0, 2.0) < 1e-6


def test_levy_scaling_symmetric():
    assert levy_scaling_check(0.3, 0.7, 1.9) == levy_scaling_check(0.3, 1.9, 0.7)


def test_levy_scaling_input_validation():
    with pytest.raises(ValueError):
        levy_scaling_check(0.25, 1.0, 1.0)
    with pytest.raises(ValueError):
        levy_spectral_integral(0.25, -1.0)
