"""Frequency-domain filter functions.

Transforms use the unitary convention F(omega) = (2 pi)^-1/2 int f(t) exp(-i omega t) dt,
so int |F|^2 d omega = int f^2 dt.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np

from .sequence import PulseSequence, ToggleFilter

SQRT_2PI = math.sqrt(2.0 * math.pi)
#: |sin(omega * period / 2)| below this is treated as sitting on a harmonic.
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Fourier coefficients A_k of the periodic toggle filter, k = -k_max..k_max."""

    fundamental: float
    k: np.ndarray
    coefficients: np.ndarray

    @property
    def k_max(self) -> int:
        return int(self.k[-1])

    def power(self) -> float:
        """Sum of |A_k|^2; tends to 1 as k_max grows."""
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def __getitem__(self, k):
        return self.coefficients[k + self.k_max]


def _segment_transform(starts, ends, signs, omega):
    # sum of exactly integrated constant pieces; stable as omega -> 0
    omega = np.asarray(omega, dtype=float)
    w = omega[..., None]
    width = ends - starts
    centre = 0.5 * (starts + ends)
    pieces = signs * width * np.sinc(w * width / (2.0 * np.pi)) * np.exp(-1j * w * centre)
    return pieces.sum(axis=-1) / SQRT_2PI


def filter_fid(omega, t: float):
    """Transform of the unit box on [0, t]; equals t / sqrt(2 pi) at omega = 0."""
    if t < 0:
        raise ValueError("t must be non-negative")
    omega = np.asarray(omega, dtype=float)
    return t * np.sinc(omega * t / (2.0 * np.pi)) * np.exp(-0.5j * omega * t) / SQRT_2PI


def filter_single(filt: ToggleFilter, omega):
    """Single-period filter function F(omega, tau_cf) of a toggle filter.

    Each constant piece is integrated exactly, which is algebraically the
    usual ``[1 + (-1)^(N+1) e^(-i w T) + 2 sum_j (-1)^j e^(-i w t_j)] / (i w)``
    but keeps full absolute accuracy near omega = 0, where it returns the
    filter mean times period / sqrt(2 pi).
    """
    starts, ends, signs = filt.segments()
    return _segment_transform(starts, ends, signs, omega)


def filter_closed_form(filt: ToggleFilter, omega):
    """Direct sum-of-exponentials evaluation; ill-conditioned for small omega.

    Kept as an independent cross-check of :func:`filter_single`.
    """
    omega = np.asarray(omega, dtype=float)
    t = np.asarray(filt.switch_times)
    n = len(t)
    j = np.arange(1, n + 1)
    w = omega[..., None]
    num = 1.0 + (-1.0) ** (n + 1) * np.exp(-1j * omega * filt.period)
    num = num + 2.0 * np.sum((-1.0) ** j * np.exp(-1j * w * t), axis=-1)
    return filt.initial_value * num / (1j * omega) / SQRT_2PI


def filter_cycle(seq: PulseSequence, omega):
    """Filter function of a single cycle [0, cycle_time] of ``seq``.

    For odd pulse counts this cycle ends at -1 and is not the periodic
    filter; it is the object whose low-frequency flatness the Uhrig
    construction optimises.
    """
    edges = np.concatenate(([0.0], seq.pulse_times, [seq.cycle_time]))
    signs = (-1.0) ** np.arange(len(edges) - 1)
    return _segment_transform(edges[:-1], edges[1:], signs, omega)


def grating_factor(omega, period: float, n_cycles: int):
    """sin(M w T / 2) / sin(w T / 2) with its limits +-M on the harmonics."""
    omega = np.asarray(omega, dtype=float)
    x = 0.5 * omega * period
    den = np.sin(x)
    on_harmonic = np.abs(den) < SINGULAR_TOL
    k = np.rint(x / np.pi)
    limit = n_cycles * np.where((k * (n_cycles - 1)) % 2 == 0, 1.0, -1.0)
    safe = np.where(on_harmonic, 1.0, den)
    return np.where(on_harmonic, limit, np.sin(n_cycles * x) / safe)


def filter_repeated(filt: ToggleFilter, n_cycles: int, omega):
    """Filter function after ``n_cycles`` repetitions of the filter period."""
    if int(n_cycles) != n_cycles or n_cycles < 1:
        raise ValueError("n_cycles must be a positive integer")
    n_cycles = int(n_cycles)
    omega = np.asarray(omega, dtype=float)
    single = filter_single(filt, omega)
    if n_cycles == 1:
        return single
    phase = np.exp(-0.5j * omega * (n_cycles - 1) * filt.period)
    return grating_factor(omega, filt.period, n_cycles) * phase * single


def fourier_coefficients(filt: ToggleFilter, k_max: int = 200) -> HarmonicSpectrum:
    """A_k = sqrt(2 pi) / tau_cf * F(k omega_0) for |k| <= k_max."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    k = np.arange(-k_max, k_max + 1)
    w0 = filt.fundamental
    coeffs = SQRT_2PI / filt.period * filter_single(filt, k * w0)
    spectrum = HarmonicSpectrum(w0, k, coeffs)
    if spectrum.power() < 0.99:
        warnings.warn(f"harmonic series truncated at k_max={k_max} keeps only "
                      f"{spectrum.power():.4f} of the filter power", RuntimeWarning)
    return spectrum


def first_harmonic_frequency(filt: ToggleFilter, k_max: int = 200, tol: float = 1e-12) -> float:
    """Lowest harmonic k * omega_0 with a non-vanishing coefficient."""
    spec = fourier_coefficients(filt, k_max)
    for k in range(1, k_max + 1):
        if abs(spec[k]) > tol:
            return k * spec.fundamental
    return math.inf


def udd_cycle_power_mp(order: int, omega, cycle_time: float = 1.0, dps: int = 60):
    """|F|^2 of one UDD cycle in multiple precision, with exact pulse times.

    The low-frequency stop band of high-order UDD lies far below double
    precision round-off, so its power law can only be read off this way.
    """
    with mpmath.workdps(dps):
        tc = mpmath.mpf(cycle_time)
        edges = [mpmath.mpf(0)]
        edges += [tc * mpmath.sin(mpmath.pi * i / (2 * (order + 1))) ** 2
                  for i in range(1, order + 1)]
        edges.append(tc)
        out = []
        for w in np.atleast_1d(omega):
            w = mpmath.mpf(float(w))
            total = mpmath.mpc(0)
            for j in range(order + 1):
                total += (-1) ** j * (mpmath.exp(-1j * w * edges[j]) - mpmath.exp(-1j * w * edges[j + 1]))
            out.append(abs(total / (1j * w)) ** 2 / (2 * mpmath.pi))
        return [float(v) for v in out]


def low_frequency_slope(order: int, omega_lo: float, omega_hi: float, cycle_time: float = 1.0) -> float:
    """Log-log slope of the single-cycle UDD |F|^2 between two frequencies."""
    lo, hi = udd_cycle_power_mp(order, [omega_lo, omega_hi], cycle_time)
    return math.log(hi / lo) / math.log(omega_hi / omega_lo)
