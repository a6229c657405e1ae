"""Noise models: paired autocorrelation g(tau) and spectral density S(omega).

Conventions: g(0) = 1 and S(omega) = (2 pi)^-1/2 * int g(tau) exp(-i omega tau) dtau,
so (2 pi)^-1/2 * int S = 1. The coupling strength ``b_se`` (rad/us) is kept
separate from the unit-variance field.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from .exceptions import InvalidArgumentError

GAUSSIAN = "GAUSSIAN"
LORENTZIAN = "LORENTZIAN"
TABULATED = "TABULATED"
KINDS = (GAUSSIAN, LORENTZIAN, TABULATED)

SQRT_2PI = math.sqrt(2.0 * math.pi)
# S(omega)/S(0) = 1e-16 for the Gaussian
_GAUSS_CUTOFF = 2.0 * math.sqrt(math.log(1e16))
_LORENTZ_CUTOFF = 1.0e3


@dataclass(frozen=True, eq=False)
class NoiseModel:
    kind: str
    tau_b: float
    b_se: float
    omega_grid: np.ndarray | None = field(default=None, repr=False)
    s_grid: np.ndarray | None = field(default=None, repr=False)

    def spectral_density(self, omega):
        """S(omega) in microseconds; even in omega."""
        w = np.abs(np.asarray(omega, dtype=float))
        tb = self.tau_b
        if self.kind == GAUSSIAN:
            return tb / math.sqrt(2.0) * np.exp(-(w * tb) ** 2 / 4.0)
        if self.kind == LORENTZIAN:
            return math.sqrt(2.0 / math.pi) * tb / (1.0 + (w * tb) ** 2)
        return np.interp(w, self.omega_grid, self.s_grid, right=0.0)

    def autocorrelation(self, tau):
        """g(tau), normalised to g(0) = 1."""
        t = np.abs(np.asarray(tau, dtype=float))
        if self.kind == GAUSSIAN:
            return np.exp(-(t / self.tau_b) ** 2)
        if self.kind == LORENTZIAN:
            return np.exp(-t / self.tau_b)
        return _hat_cosine_transform(self.omega_grid, self.s_grid, t)

    @property
    def cutoff(self) -> float:
        """Frequency beyond which S is treated as zero by the quadratures."""
        if self.kind == GAUSSIAN:
            return _GAUSS_CUTOFF / self.tau_b
        if self.kind == LORENTZIAN:
            return _LORENTZ_CUTOFF / self.tau_b
        return float(self.omega_grid[-1])

    def with_coupling(self, b_se: float) -> "NoiseModel":
        return NoiseModel(self.kind, self.tau_b, _check_coupling(b_se), self.omega_grid, self.s_grid)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "tau_B": self.tau_b, "b_SE": self.b_se}

    def __eq__(self, other):
        if not isinstance(other, NoiseModel):
            return NotImplemented
        same_grid = (self.omega_grid is None and other.omega_grid is None) or (
            self.omega_grid is not None and other.omega_grid is not None
            and np.array_equal(self.omega_grid, other.omega_grid)
            and np.array_equal(self.s_grid, other.s_grid))
        return (self.kind, self.tau_b, self.b_se) == (other.kind, other.tau_b, other.b_se) and same_grid

    __hash__ = None


def _check_tau(tau_b):
    tau_b = float(tau_b)
    if not (tau_b > 0 and math.isfinite(tau_b)):
        raise InvalidArgumentError(f"tau_B must be positive, got {tau_b}")
    return tau_b


def _check_coupling(b_se):
    b_se = float(b_se)
    if not (b_se >= 0 and math.isfinite(b_se)):
        raise InvalidArgumentError(f"b_SE must be non-negative, got {b_se}")
    return b_se


def gaussian_model(tau_b: float, b_se: float) -> NoiseModel:
    """g = exp(-(tau/tau_B)^2), so g(tau_B) = 1/e exactly."""
    return NoiseModel(GAUSSIAN, _check_tau(tau_b), _check_coupling(b_se))


def lorentzian_model(tau_b: float, b_se: float) -> NoiseModel:
    """g = exp(-|tau|/tau_B); soft-cutoff spectrum."""
    return NoiseModel(LORENTZIAN, _check_tau(tau_b), _check_coupling(b_se))


def _hat_cosine_transform(omega, s, tau):
    # S is the piecewise-linear interpolant of the samples; its even
    # extension is a sum of hats of width h, each transforming exactly.
    h = omega[1] - omega[0]
    tau = np.atleast_1d(tau)
    weights = np.array(s, dtype=float)
    weights[0] *= 0.5
    envelope = np.sinc(h * tau / (2.0 * np.pi)) ** 2
    out = np.empty(tau.shape)
    for start in range(0, tau.size, 256):
        chunk = tau.reshape(-1)[start:start + 256]
        out.reshape(-1)[start:start + 256] = np.cos(np.outer(chunk, omega)) @ weights
    return (2.0 / SQRT_2PI) * h * envelope * out


def tabulated_model(omega, s, b_se: float) -> NoiseModel:
    """Spectrum sampled on a uniform grid starting at omega = 0.

    The samples are normalised so that (2 pi)^-1/2 * 2 int_0^inf S = 1 by the
    trapezoid rule; tau_B is located where g falls to 1/e.
    """
    omega = np.asarray(omega, dtype=float)
    s = np.asarray(s, dtype=float)
    if omega.ndim != 1 or omega.shape != s.shape or omega.size < 2:
        raise InvalidArgumentError("omega and S must be 1-d arrays of equal length >= 2")
    if omega[0] != 0.0:
        raise InvalidArgumentError("omega grid must start at 0")
    steps = np.diff(omega)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise InvalidArgumentError("omega grid must be uniform and increasing")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise InvalidArgumentError("spectral density must be finite and non-negative")
    h = float(steps.mean())
    omega = np.arange(omega.size + 1) * h
    # the trailing zero makes the interpolant integral equal the trapezoid sum
    s = np.append(s, 0.0)
    area = 2.0 * trapezoid(s, omega) / SQRT_2PI
    if area <= 0:
        raise InvalidArgumentError("spectral density is identically zero")
    s = s / area
    tau_b = _one_over_e_time(omega, s)
    return NoiseModel(TABULATED, tau_b, _check_coupling(b_se), omega, s)


def _one_over_e_time(omega, s):
    target = math.exp(-1.0)
    h = omega[1] - omega[0]
    step = 0.05 / omega[-1]
    hi = step
    limit = 200.0 * math.pi / h
    while _hat_cosine_transform(omega, s, hi)[0] > target:
        hi *= 1.5
        if hi > limit:
            raise InvalidArgumentError("autocorrelation never falls to 1/e")
    lo = hi / 1.5 if hi > step else 0.0
    return float(brentq(lambda t: _hat_cosine_transform(omega, s, t)[0] - target,
                        lo, hi, xtol=1e-12 * hi, rtol=1e-14))


def read_spectrum_csv(path, b_se: float) -> NoiseModel:
    """Two-column CSV (omega in rad/us, S in us); '#' lines and a header are skipped."""
    rows = []
    with open(path, newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if rows:
                    raise InvalidArgumentError(f"{path}:{line_no}: expected two numbers")
    if not rows:
        raise InvalidArgumentError(f"{path}: no spectral samples")
    data = np.array(rows)
    return tabulated_model(data[:, 0], data[:, 1], b_se)


def model_from_dict(data: dict, base_dir: Path | None = None) -> NoiseModel:
    kind = str(data.get("kind", GAUSSIAN)).upper()
    b_se = data.get("b_SE", 0.0)
    if kind == GAUSSIAN:
        return gaussian_model(data["tau_B"], b_se)
    if kind == LORENTZIAN:
        return lorentzian_model(data["tau_B"], b_se)
    if kind == TABULATED:
        path = Path(data["table"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return read_spectrum_csv(path, b_se)
    raise InvalidArgumentError(f"unknown noise model kind {kind!r}")
