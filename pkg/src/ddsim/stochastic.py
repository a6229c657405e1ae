"""Monte Carlo oracle: synthesised Gaussian noise, toggled phase, <cos phi>.

The field is a random-phase harmonic superposition
E(t) = sum_m r_m a_m cos(omega_m t + phi_m) on the frequency grid of a real
FFT, with a_m^2 = 4 / sqrt(2 pi) * S(omega_m) * d_omega (half weight at
omega = 0), uniform phases and Rayleigh factors r_m with <r_m^2> = 1. The
Rayleigh factors make every trajectory exactly Gaussian: with fixed
amplitudes the phase accumulated under a long pulse train is dominated by
the few modes inside one narrow grating peak and is visibly non-Gaussian.
The ensemble autocorrelation is g(tau) up to periodisation far beyond the
trajectory length. Each trial draws from its own stream derived from
(seed, trial index).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidArgumentError
from .sequence import PulseSequence, ToggleFilter, toggle_filter
from .spectrum import NoiseModel

SQRT_2PI = math.sqrt(2.0 * math.pi)
MIN_MODES = 2048
# trials are processed in fixed blocks so results never depend on scheduling
BLOCK = 128
_PADDING = 20.0


@dataclass(frozen=True)
class NoiseTrajectory:
    dt: float
    samples: np.ndarray
    seed: int
    trial: int = 0

    @property
    def duration(self) -> float:
        return (len(self.samples) - 1) * self.dt


@dataclass(frozen=True)
class McResult:
    times: np.ndarray
    survival: np.ndarray
    stderr: np.ndarray
    trials: int
    phase_variance: np.ndarray
    seed: int = 0


def _fft_length(model, dt, n_samples, n_modes):
    needed = n_samples + _PADDING * model.tau_b / dt
    half = max(n_modes, 2 ** math.ceil(math.log2(max(needed, 2) / 2)))
    return 2 * half


def _amplitudes(model, dt, length):
    d_omega = 2.0 * math.pi / (length * dt)
    omega = np.arange(length // 2 + 1) * d_omega
    power = 4.0 / SQRT_2PI * model.spectral_density(omega) * d_omega
    power[0] *= 0.5
    power[-1] = 0.0
    return np.sqrt(power)


def _check_dt(model, dt):
    if not dt > 0:
        raise InvalidArgumentError("dt must be positive")
    if dt > model.tau_b / 50.0 * (1 + 1e-12):
        raise InvalidArgumentError(
            f"dt={dt} does not resolve the correlation time (need dt <= tau_B/50 = {model.tau_b / 50})")


def _trial_spectrum(amplitudes, seed, trial):
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))
    z = rng.standard_normal((2, amplitudes.size))
    return amplitudes * (z[0] + 1j * z[1]) / math.sqrt(2.0)


def _block_samples(amplitudes, length, n_samples, seed, trials):
    spectra = np.stack([_trial_spectrum(amplitudes, seed, t) for t in trials])
    spectra *= length / 2.0
    spectra[:, 0] = 2.0 * spectra[:, 0].real
    return np.fft.irfft(spectra, n=length, axis=1)[:, :n_samples]


def synthesize(model: NoiseModel, dt: float, n_samples: int, n_modes: int = MIN_MODES,
               seed: int = 0, trial: int = 0) -> NoiseTrajectory:
    """Sample one stationary Gaussian field trajectory with autocorrelation g."""
    _check_dt(model, dt)
    if n_modes < MIN_MODES:
        raise InvalidArgumentError(f"n_modes must be >= {MIN_MODES}")
    if n_samples < 1:
        raise InvalidArgumentError("n_samples must be positive")
    length = _fft_length(model, dt, n_samples, n_modes)
    amplitudes = _amplitudes(model, dt, length)
    samples = _block_samples(amplitudes, length, n_samples, seed, [trial])[0]
    return NoiseTrajectory(float(dt), samples, int(seed), int(trial))


def phase_weights(filt: ToggleFilter | None, n_cycles: int, dt: float, duration: float | None = None):
    """Quadrature weights w_n with int f(t) E(t) dt = sum_n w_n E(t_n).

    E is taken as piecewise linear between samples (the trapezoid rule);
    switch instants fall at their exact positions inside a sample interval.
    ``filt=None`` means free evolution over ``duration``.
    """
    if filt is None:
        pos, size = np.array([0.0, duration]), np.array([1.0, -1.0])
    else:
        pos, size = filt.jumps(n_cycles)
    k = np.floor(pos / dt + 1e-12).astype(int)
    frac = np.clip(pos / dt - k, 0.0, 1.0) * dt
    n_nodes = int(k.max()) + 3
    w = np.zeros(n_nodes)
    np.add.at(w, k + 2, size * dt)
    w = np.cumsum(w)
    np.add.at(w, k, size * (dt - frac) ** 2 / (2.0 * dt))
    np.add.at(w, k + 1, size * (dt - frac ** 2 / (2.0 * dt)))
    nz = np.nonzero(np.abs(w) > 1e-15 * dt)[0]
    return w[: nz[-1] + 1] if nz.size else w[:1] * 0.0


def accumulate_phase(traj: NoiseTrajectory, filt: ToggleFilter | None, n_cycles: int,
                     b_se: float, duration: float | None = None) -> float:
    """phi = b_SE * int_0^T f(t) E(t) dt with T = n_cycles * tau_cf."""
    w = phase_weights(filt, n_cycles, traj.dt, duration)
    if w.size > len(traj.samples):
        raise InvalidArgumentError(
            f"trajectory covers {traj.duration} us, need {(w.size - 1) * traj.dt} us")
    return float(b_se * np.dot(w, traj.samples[: w.size]))


def mc_survival(seq: PulseSequence, n_cycles, model: NoiseModel, trials: int = 20000,
                seed: int = 0, dt: float | None = None, n_modes: int = MIN_MODES,
                threads: int = 1) -> McResult:
    """Estimate <cos phi> after each entry of ``n_cycles`` filter periods.

    For a pulse-free sequence the period is the cycle time.
    """
    if trials < 1000:
        raise InvalidArgumentError("trials must be >= 1000")
    n_cycles = [int(m) for m in n_cycles]
    if not n_cycles or min(n_cycles) < 1:
        raise InvalidArgumentError("n_cycles must be positive integers")
    dt = model.tau_b / 100.0 if dt is None else float(dt)
    _check_dt(model, dt)
    if seq.order == 0:
        filt, period = None, seq.cycle_time
    else:
        filt = toggle_filter(seq)
        period = filt.period
    weights = [phase_weights(filt, m, dt, m * period) for m in n_cycles]
    n_samples = max(w.size for w in weights)
    matrix = np.zeros((len(n_cycles), n_samples))
    for row, w in zip(matrix, weights):
        row[: w.size] = w
    length = _fft_length(model, dt, n_samples, n_modes)
    amplitudes = _amplitudes(model, dt, length)

    def run(start):
        block = range(start, min(start + BLOCK, trials))
        samples = _block_samples(amplitudes, length, n_samples, seed, block)
        return model.b_se * samples @ matrix.T

    starts = range(0, trials, BLOCK)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            blocks = list(pool.map(run, starts))
    else:
        blocks = [run(s) for s in starts]
    phases = np.concatenate(blocks, axis=0)
    cosines = np.cos(phases)
    survival = cosines.mean(axis=0)
    stderr = cosines.std(axis=0, ddof=1) / math.sqrt(trials)
    times = np.array([m * period for m in n_cycles], dtype=float)
    return McResult(times, survival, stderr, trials, phases.var(axis=0, ddof=1), int(seed))
