"""Decay exponent chi(t), survival probability and decay-rate extraction.

chi(t) = sqrt(2 pi) b^2 / 2 * int S(omega) |F(omega, t)|^2 d omega, and the
survival probability of a transverse state is exp(-chi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate

from .exceptions import InvalidArgumentError
from .filterfn import filter_fid, filter_repeated, fourier_coefficients
from .quadrature import integrate_panels
from .sequence import PulseSequence, toggle_filter
from .spectrum import NoiseModel

SQRT_2PI = math.sqrt(2.0 * math.pi)
ANALYTIC = "ANALYTIC"
MONTE_CARLO = "MONTE_CARLO"

RTOL = 1e-8
ATOL = 1e-10
# at most this fraction of tau_B per quadrature panel, so S is resolved too
_PANEL_SCALE = 0.5


@dataclass(frozen=True)
class DecayCurve:
    times: np.ndarray
    chi: np.ndarray
    source: str = ANALYTIC
    stderr: np.ndarray | None = None

    @property
    def survival(self) -> np.ndarray:
        return np.exp(-np.asarray(self.chi))


@dataclass(frozen=True)
class RateFit:
    rate: float
    intercept: float
    fit_window: tuple[float, float]
    max_residual: float
    n_points: int = field(default=0)


def _panel_edges(period, cutoff, tau_b):
    # grating nulls 2 pi j / period, each gap split so no panel exceeds the S scale
    spacing = 2.0 * math.pi / period
    n_gaps = max(1, math.ceil(cutoff / spacing))
    splits = max(1, math.ceil(spacing / (_PANEL_SCALE / tau_b)))
    return np.linspace(0.0, n_gaps * spacing, n_gaps * splits + 1)


def _overlap(model: NoiseModel, filter_sq, period, rtol=RTOL, atol=ATOL):
    """sqrt(2 pi) b^2 / 2 * int_{-inf}^{inf} S |F|^2, using the even integrand."""
    if model.b_se == 0.0:
        return 0.0
    edges = _panel_edges(period, model.cutoff, model.tau_b)
    value, _, _ = integrate_panels(lambda w: model.spectral_density(w) * filter_sq(w),
                                   edges, rtol=rtol, atol=atol)
    return SQRT_2PI * model.b_se ** 2 / 2.0 * 2.0 * value


def chi_fid(t: float, model: NoiseModel) -> float:
    """Decay exponent of free evolution for a time ``t``."""
    if t < 0:
        raise InvalidArgumentError("t must be non-negative")
    if t == 0:
        return 0.0
    return _overlap(model, lambda w: np.abs(filter_fid(w, t)) ** 2, t)


def chi_dd(seq: PulseSequence, n_cycles: int, model: NoiseModel) -> float:
    """Decay exponent after ``n_cycles`` filter periods of ``seq``.

    The evaluation time is ``n_cycles * tau_cf``; for odd pulse counts the
    filter period spans two sequence cycles.
    """
    if int(n_cycles) != n_cycles or n_cycles < 1:
        raise InvalidArgumentError("n_cycles must be a positive integer")
    n_cycles = int(n_cycles)
    if seq.order == 0:
        return chi_fid(n_cycles * seq.cycle_time, model)
    filt = toggle_filter(seq)
    return _overlap(model, lambda w: np.abs(filter_repeated(filt, n_cycles, w)) ** 2,
                    n_cycles * filt.period)


def filter_period(seq: PulseSequence) -> float:
    return toggle_filter(seq).period


def chi_time_domain(seq: PulseSequence, n_cycles: int, model: NoiseModel) -> float:
    """Brute-force time-domain evaluation of chi for cross-checking.

    Uses chi = b^2 / 2 * int g(u) C(u) du with C the exact (piecewise
    linear) autocorrelation of the toggle filter on [0, n_cycles * tau_cf],
    integrated piece by piece with adaptive quadrature.
    """
    if seq.order == 0:
        pos = np.array([0.0, n_cycles * seq.cycle_time])
        size = np.array([1.0, -1.0])
    else:
        pos, size = toggle_filter(seq).jumps(n_cycles)
    diff = pos[:, None] - pos[None, :]
    weight = size[:, None] * size[None, :]

    def corr(u):
        return -0.5 * np.sum(weight * np.abs(u + diff))

    breaks = np.unique(np.abs(diff).ravel())
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi - lo <= 1e-14 * breaks[-1]:
            continue
        piece, _ = integrate.quad(lambda u: model.autocorrelation(u) * corr(u), lo, hi,
                                  epsabs=0.0, epsrel=1e-13, limit=200)
        total += piece
    return model.b_se ** 2 / 2.0 * 2.0 * total


def fid_curve(times: Sequence[float], model: NoiseModel) -> DecayCurve:
    times = np.asarray(times, dtype=float)
    chi = np.array([chi_fid(t, model) for t in times])
    return DecayCurve(times, chi)


def decay_curve(seq: PulseSequence, n_cycles: Sequence[int], model: NoiseModel) -> DecayCurve:
    """chi sampled after each requested number of filter periods."""
    n_cycles = [int(m) for m in n_cycles]
    period = seq.cycle_time if seq.order == 0 else filter_period(seq)
    times = np.array([m * period for m in n_cycles], dtype=float)
    chi = np.array([chi_dd(seq, m, model) for m in n_cycles])
    return DecayCurve(times, chi)


def rate_from_curve(curve: DecayCurve, window=None, tau_b=None) -> RateFit:
    """Least-squares slope of chi against t inside ``window``.

    Without a window, ``[5 tau_b, 50 tau_b]`` is used when ``tau_b`` is
    given and the whole curve otherwise.
    """
    t = np.asarray(curve.times, dtype=float)
    chi = np.asarray(curve.chi, dtype=float)
    if window is None:
        window = (5.0 * tau_b, 50.0 * tau_b) if tau_b is not None else (t.min(), t.max())
    lo, hi = window
    mask = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    if mask.sum() < 5:
        raise InvalidArgumentError(
            f"rate fit needs >= 5 samples in window {window}, found {int(mask.sum())}")
    slope, intercept = np.polyfit(t[mask], chi[mask], 1)
    residual = chi[mask] - (slope * t[mask] + intercept)
    # chi is nondecreasing; a negative slope is quadrature round-off
    return RateFit(max(float(slope), 0.0), float(intercept), (float(lo), float(hi)),
                   float(np.max(np.abs(residual))), int(mask.sum()))


def rate_sample_cycles(period: float, tau_b: float, n_points: int = 10,
                       min_points: int = 8) -> list[int]:
    """Cycle counts at which chi is sampled for a rate fit.

    Samples the default window [5 tau_b, 50 tau_b] when it holds enough
    filter periods; otherwise takes ``min_points`` consecutive periods
    starting at the first one past 5 tau_b.
    """
    first = max(1, math.ceil(5.0 * tau_b / period - 1e-9))
    last = math.floor(50.0 * tau_b / period + 1e-9)
    if last - first + 1 < min_points:
        return list(range(first, first + min_points))
    picks = np.unique(np.rint(np.linspace(first, last, n_points)).astype(int))
    return [int(m) for m in picks]


def decay_rate(seq: PulseSequence, model: NoiseModel, n_points: int = 10) -> RateFit:
    """Fitted long-time decay rate (1/us) of ``seq`` under ``model``."""
    period = seq.cycle_time if seq.order == 0 else filter_period(seq)
    cycles = rate_sample_cycles(period, model.tau_b, n_points)
    if seq.order == 0:
        curve = fid_curve([m * period for m in cycles], model)
    else:
        curve = decay_curve(seq, cycles, model)
    return rate_from_curve(curve, (curve.times[0], curve.times[-1]))


def rate_harmonic(seq: PulseSequence, model: NoiseModel, k_max: int = 200) -> float:
    """Large-M rate as a weighted sampling of S at the filter harmonics.

    rate = sqrt(2 pi) b^2 / 2 * sum_{k != 0} |A_k|^2 S(k omega_0). The
    prefactor follows from integrating the grating peaks, each of area
    2 pi M / tau_cf.
    """
    spec = fourier_coefficients(toggle_filter(seq), k_max)
    nonzero = spec.k != 0
    weights = np.abs(spec.coefficients[nonzero]) ** 2
    samples = model.spectral_density(spec.k[nonzero] * spec.fundamental)
    return float(SQRT_2PI * model.b_se ** 2 / 2.0 * np.sum(weights * samples))
