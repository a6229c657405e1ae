import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from ddsim.exceptions import InvalidArgumentError
from ddsim.spectrum import (gaussian_model, lorentzian_model, model_from_dict, read_spectrum_csv,
                            tabulated_model)

SQRT_2PI = math.sqrt(2 * math.pi)


def _norm(model):
    val, _ = integrate.quad(model.spectral_density, 0, np.inf, limit=400)
    return 2 * val / SQRT_2PI


def _inverse(model, tau):
    # g(tau) = (2 pi)^-1/2 * 2 int_0^inf S cos(w tau)
    if tau == 0:
        return _norm(model)
    val, _ = integrate.quad(model.spectral_density, 0, np.inf, weight="cos", wvar=tau)
    return 2 * val / SQRT_2PI


def test_gaussian_examples():
    m = gaussian_model(110.0, 0.005)
    assert m.spectral_density(0.0) == pytest.approx(110 / math.sqrt(2))
    assert m.spectral_density(0.0) == pytest.approx(77.78, abs=0.01)
    assert m.autocorrelation(110.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert _norm(m) == pytest.approx(1.0, rel=1e-10)


def test_lorentzian_examples():
    m = lorentzian_model(110.0, 0.005)
    assert m.spectral_density(0.0) == pytest.approx(math.sqrt(2 / math.pi) * 110)
    assert m.autocorrelation(110.0) == pytest.approx(math.exp(-1))
    assert m.spectral_density(1 / 110) / m.spectral_density(0) == pytest.approx(0.5)
    assert _norm(m) == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("make", [gaussian_model, lorentzian_model])
def test_pair_consistency(make):
    m = make(2.0, 0.1)
    for tau in np.linspace(0, 10, 11):
        assert abs(_inverse(m, tau) - m.autocorrelation(tau)) < 1e-6


def test_tabulated_box():
    cut = 2.0
    omega = np.linspace(0, cut, 2001)
    m = tabulated_model(omega, np.ones_like(omega), 0.0)
    tau = np.linspace(0, 10, 41)
    # hat interpolation of the box edge blurs it by one grid step
    np.testing.assert_allclose(m.autocorrelation(tau), np.sinc(cut * tau / np.pi), atol=2e-3)
    assert m.autocorrelation(0.0)[0] == pytest.approx(1.0, rel=1e-12)


def test_tabulated_recovers_gaussian_tau():
    ref = gaussian_model(3.0, 0.1)
    omega = np.linspace(0, 12 / 3.0, 801)
    m = tabulated_model(omega, ref.spectral_density(omega), 0.1)
    assert m.tau_b == pytest.approx(3.0, rel=5e-3)
    assert m.cutoff == pytest.approx(omega[-1] + omega[1])


@pytest.mark.parametrize("omega,s", [
    (np.linspace(0, 1, 5), np.zeros(5)),
    (np.linspace(0.1, 1, 5), np.ones(5)),
    (np.array([0, 0.1, 0.3]), np.ones(3)),
    (np.linspace(0, 1, 5), -np.ones(5)),
])
def test_tabulated_rejects(omega, s):
    with pytest.raises(InvalidArgumentError):
        tabulated_model(omega, s, 0.0)


def test_bad_parameters():
    with pytest.raises(InvalidArgumentError):
        gaussian_model(-1.0, 0.1)
    with pytest.raises(InvalidArgumentError):
        gaussian_model(1.0, -0.1)
    with pytest.raises(InvalidArgumentError):
        model_from_dict({"kind": "PINK", "tau_B": 1.0})


@settings(max_examples=50)
@given(st.floats(0.1, 1000), st.floats(0.1, 10), st.floats(0, 5))
def test_gaussian_time_rescaling(tau, c, w):
    base = gaussian_model(tau, 0.0)
    scaled = gaussian_model(c * tau, 0.0)
    assert scaled.spectral_density(w) == pytest.approx(c * base.spectral_density(w * c), rel=1e-12)


@given(st.floats(-50, 50))
def test_density_even_and_nonnegative(w):
    for m in (gaussian_model(1.0, 0.0), lorentzian_model(1.0, 0.0)):
        assert m.spectral_density(w) >= 0
        assert m.spectral_density(w) == m.spectral_density(-w)


def test_csv_reader(tmp_path):
    ref = gaussian_model(2.0, 0.0)
    omega = np.linspace(0, 8, 401)
    path = tmp_path / "s.csv"
    path.write_text("# bath\nomega,S\n" + "".join(
        f"{w},{s}\n" for w, s in zip(omega, ref.spectral_density(omega))))
    m = read_spectrum_csv(path, 0.01)
    assert m.tau_b == pytest.approx(2.0, rel=5e-3)
    via_dict = model_from_dict({"kind": "TABULATED", "table": "s.csv", "b_SE": 0.01}, tmp_path)
    assert via_dict == m
    assert m.with_coupling(0.02).b_se == 0.02
