import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from ddsim.filterfn import (filter_closed_form, filter_cycle, filter_fid, filter_repeated,
                            filter_single, first_harmonic_frequency, fourier_coefficients,
                            grating_factor, low_frequency_slope, udd_cycle_power_mp)
from ddsim.sequence import cpmg_times, three_pulse_family, toggle_filter, udd_times

SQRT_2PI = math.sqrt(2 * math.pi)


def _numeric_transform(filt, w):
    # oracle: integrate f(t) e^{-iwt} piecewise with adaptive quadrature
    starts, ends, signs = filt.segments()
    re = sum(s * integrate.quad(lambda t: math.cos(w * t), a, b, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
             for a, b, s in zip(starts, ends, signs))
    im = sum(s * integrate.quad(lambda t: -math.sin(w * t), a, b, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
             for a, b, s in zip(starts, ends, signs))
    return complex(re, im) / SQRT_2PI


def test_fid_examples():
    assert filter_fid(0.0, 3.0) == pytest.approx(3 / SQRT_2PI)
    assert abs(filter_fid(2 * math.pi / 3.0, 3.0)) < 1e-15
    # nulls every pi; beyond w_max the mean of 2 (1 - cos 2w) / (2 pi w^2) gives 1 / (pi w_max)
    w_max = 200 * math.pi
    head = sum(integrate.quad(lambda w: abs(filter_fid(w, 2.0)) ** 2, a, a + math.pi)[0]
               for a in np.arange(0, w_max, math.pi))
    assert 2 * (head + 1 / (math.pi * w_max)) == pytest.approx(2.0, rel=1e-5)


def test_cpmg_value_at_pi():
    filt = toggle_filter(cpmg_times(2, 2.0))
    assert filt.switch_times == (0.5, 1.5)
    assert abs(filter_single(filt, math.pi)) == pytest.approx(4 / (math.pi * SQRT_2PI), rel=1e-12)
    assert 4 / (math.pi * SQRT_2PI) == pytest.approx(0.5079, abs=1e-4)


@pytest.mark.parametrize("seq", [cpmg_times(2, 1.0), udd_times(3, 1.0), udd_times(8, 5.0),
                                 three_pulse_family(0.03, 2.0)])
def test_balanced_zero_at_dc(seq):
    filt = toggle_filter(seq)
    assert abs(filter_single(filt, 0.0)) <= 1e-12 * filt.period / SQRT_2PI


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["udd", "cpmg"]), st.integers(1, 12), st.floats(0.5, 20.0),
       st.floats(0.05, 60.0))
def test_segment_form_matches_quadrature(kind, n, tc, w):
    seq = udd_times(n, tc) if kind == "udd" else cpmg_times(n, tc)
    filt = toggle_filter(seq)
    ref = _numeric_transform(filt, w)
    got = filter_single(filt, w)
    assert abs(got - ref) <= 1e-10 * max(abs(ref), 1e-3 * filt.period)


def test_closed_form_cross_check():
    filt = toggle_filter(udd_times(6, 3.0))
    w = np.linspace(0.5, 40, 200)
    np.testing.assert_allclose(filter_closed_form(filt, w), filter_single(filt, w),
                               rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("n", range(1, 11))
def test_udd_low_frequency_slope(n):
    w0 = 2 * math.pi
    assert low_frequency_slope(n, 1e-4 * w0, 1e-2 * w0) == pytest.approx(2 * n, rel=0.05)


def test_mp_power_matches_double_precision():
    seq = udd_times(4, 1.0)
    w = np.array([3.0, 10.0, 25.0])
    ref = np.abs(filter_cycle(seq, w)) ** 2
    np.testing.assert_allclose(udd_cycle_power_mp(4, w), ref, rtol=1e-10)


def test_cpmg_square_wave_series():
    spec = fourier_coefficients(toggle_filter(cpmg_times(2, 1.0)), 50)
    for k in range(1, 20):
        expect = 2 / (math.pi * k) if k % 2 else 0.0
        assert abs(spec[k]) == pytest.approx(expect, abs=1e-13)
    assert spec.power() >= 0.99


def test_udd_even_coefficients():
    spec = fourier_coefficients(toggle_filter(udd_times(6, 1.0)), 200)
    assert abs(spec[0]) < 1e-14
    assert abs(spec[1]) > 1e-3
    assert spec.power() >= 0.99


def test_truncation_warning():
    with pytest.warns(RuntimeWarning):
        fourier_coefficients(toggle_filter(udd_times(20, 1.0)), 5)


def test_repeated_single_cycle_identity():
    filt = toggle_filter(udd_times(5, 2.0))
    w = np.linspace(0, 20, 101)
    np.testing.assert_array_equal(filter_repeated(filt, 1, w), filter_single(filt, w))


@pytest.mark.parametrize("m", [2, 3, 6, 7])
def test_harmonic_limits(m):
    filt = toggle_filter(udd_times(3, 1.7))
    k = np.arange(1, 30)
    w = k * filt.fundamental
    np.testing.assert_allclose(np.abs(filter_repeated(filt, m, w)),
                               m * np.abs(filter_single(filt, w)), rtol=1e-12, atol=1e-15)


def test_grating_limit_sign():
    # sin(M x)/sin(x) -> M (-1)^{k (M - 1)} at x = k pi
    assert grating_factor(math.pi, 2.0, 4) == pytest.approx(-4)
    assert grating_factor(math.pi, 2.0, 5) == pytest.approx(5)
    assert grating_factor(2 * math.pi, 2.0, 4) == pytest.approx(4)
    assert grating_factor(math.pi * (1 + 1e-7), 2.0, 4) == pytest.approx(-4, rel=1e-6)


def test_fundamental_law():
    tau = 110.4
    assert toggle_filter(cpmg_times(2, 2 * tau)).fundamental == pytest.approx(math.pi / tau)
    for n in (3, 4, 5, 10):
        filt = toggle_filter(udd_times(n, n * tau))
        expect = 2 * math.pi / (n * tau) if n % 2 == 0 else math.pi / (n * tau)
        assert filt.fundamental == pytest.approx(expect)
    first = first_harmonic_frequency(toggle_filter(cpmg_times(2, 2 * tau)))
    assert first == pytest.approx(math.pi / tau)


def test_udd_flatter_than_cpmg():
    tc = 4.0
    for n in (4, 6, 8):
        udd = toggle_filter(udd_times(n, tc))
        cpmg = toggle_filter(cpmg_times(2, tc))
        w = np.linspace(1e-3, 0.1, 200) * udd.fundamental
        assert np.all(np.abs(filter_single(udd, w)) <= np.abs(filter_single(cpmg, w)))


@pytest.mark.parametrize("m", [1, 4, 6])
def test_grating_parseval(m):
    filt = toggle_filter(udd_times(3, 1.0))
    # integrate between grating nulls; tail beyond is bounded by 2/(w^2) sums
    w_max = 4000.0
    edges = np.arange(0, w_max + 1e-9, 2 * math.pi / (m * filt.period) / 2)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(lambda w: abs(filter_repeated(filt, m, w)) ** 2, a, b,
                                epsabs=0, epsrel=1e-11)[0]
    # each of the 2 M N jumps of size 2 contributes ~ (2 / sqrt(2 pi))^2 / w^2 on average
    n_jumps = filt.n_switches * m
    tail = n_jumps * 4 / (2 * math.pi) / w_max + 2 / (2 * math.pi) / w_max
    assert 2 * total + 2 * tail == pytest.approx(m * filt.period, rel=1e-5)
