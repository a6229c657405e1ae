import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ddsim.decay import (DecayCurve, chi_dd, chi_fid, chi_time_domain, decay_curve, decay_rate,
                         fid_curve, rate_from_curve, rate_harmonic, rate_sample_cycles)
from ddsim.exceptions import InvalidArgumentError
from ddsim.sequence import cpmg_times, custom_sequence, free_evolution, udd_times
from ddsim.spectrum import gaussian_model, lorentzian_model

from conftest import TAU_AVG, TAU_B


def test_gaussian_linear_once_spacing_reaches_tau_b():
    m = gaussian_model(TAU_B, 0.005)
    seq = cpmg_times(2, 2 * TAU_B)
    assert chi_dd(seq, 400, m) / chi_dd(seq, 200, m) == pytest.approx(2.0, rel=0.02)


def test_fid_short_time():
    m = gaussian_model(TAU_B, 0.005)
    t = TAU_B / 100
    assert chi_fid(t, m) / (0.005 ** 2 * t ** 2 / 2) == pytest.approx(1.0, rel=0.01)


def test_fid_long_time_slope():
    m = gaussian_model(TAU_B, 0.005)
    t = 20 * TAU_B
    golden = math.sqrt(math.pi) * 0.005 ** 2 * TAU_B / 2
    assert (chi_fid(t + TAU_B, m) - chi_fid(t, m)) / TAU_B == pytest.approx(golden, rel=0.01)


def test_fid_rate_example():
    m = gaussian_model(1.0, 0.1)
    curve = fid_curve(np.linspace(10, 100, 19), m)
    fit = rate_from_curve(curve, (10, 100))
    assert fit.rate == pytest.approx(math.sqrt(math.pi) * 0.01 / 2, rel=0.01)
    assert fit.rate == pytest.approx(0.008862, rel=1e-3)


def test_zero_coupling():
    m = gaussian_model(TAU_B, 0.0)
    assert chi_fid(500.0, m) == 0.0
    assert chi_dd(udd_times(5, 600.0), 3, m) == 0.0
    assert decay_curve(cpmg_times(2, 200.0), [1, 2], m).survival.tolist() == [1.0, 1.0]


def test_exact_line_fit():
    t = np.linspace(0, 100, 11)
    fit = rate_from_curve(DecayCurve(t, 0.01 * t), (0, 100))
    assert fit.rate == pytest.approx(0.01, rel=1e-12)
    assert fit.max_residual < 1e-14


def test_window_without_data():
    t = np.linspace(0, 10, 11)
    with pytest.raises(InvalidArgumentError):
        rate_from_curve(DecayCurve(t, t), (50, 100))


def test_order_zero_routes_to_fid(gauss):
    assert chi_dd(free_evolution(300.0), 2, gauss) == chi_fid(600.0, gauss)


def test_linear_regime_doubling():
    # a Gaussian S leaves no golden-rule rate at tau << tau_B, so the
    # linear regime is exercised with the algebraic Lorentzian tail
    m = lorentzian_model(TAU_B, 0.005)
    seq = cpmg_times(2, 20.0)
    for big in (50, 200):
        assert chi_dd(seq, 2 * big, m) / chi_dd(seq, big, m) == pytest.approx(2.0, rel=0.02)


def test_cpmg_beats_udd10_equal_time(gauss):
    udd = udd_times(10, 10 * TAU_AVG)
    cpmg = cpmg_times(2, 2 * TAU_AVG)
    assert chi_dd(cpmg, 5 * 4, gauss) < chi_dd(udd, 4, gauss)


def test_coupling_scaling(gauss):
    seq = udd_times(4, 600.0)
    assert chi_dd(seq, 3, gauss.with_coupling(0.01)) == pytest.approx(4 * chi_dd(seq, 3, gauss),
                                                                       rel=1e-12)


def test_chi_nonincreasing_with_pulse_count(gauss):
    t = 1200.0
    values = [chi_dd(cpmg_times(n, t), 1 if n % 2 == 0 else 1, gauss) if n % 2 == 0
              else chi_dd(cpmg_times(n, t / 2), 1, gauss) for n in range(2, 33, 2)]
    assert all(b <= a * (1 + 1e-9) for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("make", [gaussian_model, lorentzian_model])
def test_time_domain_oracle(make):
    m = make(TAU_B, 0.005)
    for seq, mm in [(udd_times(3, 300.0), 2), (cpmg_times(2, 150.0), 3), (free_evolution(200.0), 2)]:
        assert chi_dd(seq, mm, m) == pytest.approx(chi_time_domain(seq, mm, m), rel=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(0.02, 0.98), min_size=1, max_size=4, unique=True),
       st.floats(20.0, 600.0), st.integers(1, 3))
def test_random_instances_match_oracle(raw, tc, m):
    times = sorted(raw)
    if np.min(np.diff([0.0] + times + [1.0])) < 0.01:
        return
    seq = custom_sequence([t * tc for t in times], tc)
    model = gaussian_model(TAU_B, 0.005)
    assert chi_dd(seq, m, model) == pytest.approx(chi_time_domain(seq, m, model), rel=1e-6)


def test_sample_cycles_cover_window():
    cycles = rate_sample_cycles(220.8, TAU_B)
    t = np.array(cycles) * 220.8
    assert t.min() >= 5 * TAU_B and t.max() <= 50 * TAU_B and len(cycles) >= 5
    long = rate_sample_cycles(5000.0, TAU_B)
    assert len(long) == 8 and long[0] == 1


@pytest.mark.parametrize("seq", [cpmg_times(2, 2 * TAU_AVG), udd_times(5, 5 * TAU_AVG),
                                 udd_times(10, 10 * TAU_AVG)])
def test_harmonic_rate_agrees(gauss, seq):
    fit = decay_rate(seq, gauss)
    assert rate_harmonic(seq, gauss) == pytest.approx(fit.rate, rel=0.05)


def test_harmonic_truncation_negligible():
    m = gaussian_model(TAU_B, 0.005)
    tau = math.pi * TAU_B / 4
    seq = cpmg_times(2, 2 * tau)
    with pytest.warns(RuntimeWarning):
        k1 = rate_harmonic(seq, m, 1)
    assert k1 == pytest.approx(rate_harmonic(seq, m, 200), rel=0.01)


def test_short_spacing_rate_vanishes(gauss):
    rates = [rate_harmonic(cpmg_times(2, 2 * tau), gauss) for tau in (100.0, 30.0, 10.0)]
    assert rates[0] > rates[1] > rates[2]
    assert rates[2] < 1e-30
