"""Sweep protocols comparing CPMG and UDD, and a scalar sequence optimiser."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .decay import chi_dd, decay_rate, filter_period
from .exceptions import InvalidArgumentError
from .sequence import PulseSequence, cpmg_times, free_evolution, three_pulse_family, udd_times
from .spectrum import NoiseModel

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class SweepResult:
    """Rates (1/us) against one scanned parameter.

    ``extra`` holds further columns of the same length (reference rates,
    survival values, ...). ``minimum`` is ``(location, value, residual)``
    of a local quadratic fit, when one was requested and lies inside the
    scanned interval.
    """

    parameter: str
    values: np.ndarray
    rates: np.ndarray
    max_residuals: np.ndarray
    minimum: tuple[float, float, float] | None = None
    extra: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.rates = np.asarray(self.rates, dtype=float)
        self.max_residuals = np.asarray(self.max_residuals, dtype=float)
        if not (len(self.values) == len(self.rates) == len(self.max_residuals)):
            raise ValueError("values, rates and residuals must have equal length")


@dataclass(frozen=True)
class OptimizeResult:
    parameter: float
    rate: float
    at_boundary: bool
    flat: bool
    evaluations: int


def _map(func, items, threads):
    items = list(items)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(func, items))
    return [func(i) for i in items]


def _rates(seqs, model, threads):
    fits = _map(lambda s: decay_rate(s, model), seqs, threads)
    return np.array([f.rate for f in fits]), np.array([f.max_residual for f in fits])


def quadratic_minimum(x, y, n_points: int = 7):
    """Vertex of a least-squares parabola through the ``n_points`` samples
    nearest the smallest ``y``. Returns ``None`` when the parabola opens
    downwards or its vertex leaves the scanned interval."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        return None
    i = int(np.argmin(y))
    nearest = np.sort(np.argsort(np.abs(x - x[i]), kind="stable")[:n_points])
    xs, ys = x[nearest], y[nearest]
    centre, scale = xs.mean(), np.ptp(xs) or 1.0
    yscale = np.abs(ys).max() or 1.0
    u = (xs - centre) / scale
    coef = np.polyfit(u, ys / yscale, 2)
    if coef[0] <= 0:
        return None
    u_min = -coef[1] / (2.0 * coef[0])
    loc = centre + scale * u_min
    if not x.min() <= loc <= x.max():
        return None
    value = float(np.polyval(coef, u_min) * yscale)
    residual = float(np.max(np.abs(np.polyval(coef, u) - ys / yscale)) * yscale)
    return float(loc), value, residual


def sweep_x(x_grid: Sequence[float], cycle_times: Sequence[float], model: NoiseModel,
            threads: int = 1) -> list[SweepResult]:
    """Rate against the three-pulse deviation x, one result per cycle time."""
    out = []
    for tc in cycle_times:
        seqs = [three_pulse_family(x, tc) for x in x_grid]
        rates, res = _rates(seqs, model, threads)
        out.append(SweepResult("x", x_grid, rates, res, quadratic_minimum(x_grid, rates),
                               {"cycle_time": np.full(len(rates), float(tc))},
                               label=f"tau_c={tc:g}"))
    return out


def sweep_order_fixed_power(orders: Sequence[int], tau_avg: float, model: NoiseModel,
                            threads: int = 1) -> SweepResult:
    """UDD_N with cycle time N * tau_avg, against CPMG with the same spacing."""
    if not tau_avg > 0:
        raise InvalidArgumentError("tau_avg must be positive")
    seqs = [udd_times(n, n * tau_avg) for n in orders]
    rates, res = _rates(seqs, model, threads)
    cpmg = decay_rate(cpmg_times(2, 2 * tau_avg), model).rate
    return SweepResult("N", orders, rates, res,
                       extra={"rate_cpmg": np.full(len(rates), cpmg)}, label="UDD fixed power")


def sweep_order_fixed_cycle(orders: Sequence[int], cycle_time: float, model: NoiseModel,
                            eval_times: Sequence[float] = (), threads: int = 1) -> SweepResult:
    """UDD_N at a fixed cycle time; order 0 is free evolution.

    ``eval_times`` must be integer multiples of each filter period; the
    survival at each is added as an extra column ``survival@<t>``.
    """
    seqs = [free_evolution(cycle_time) if n == 0 else udd_times(n, cycle_time) for n in orders]
    rates, res = _rates(seqs, model, threads)
    extra = {}
    for t in eval_times:
        col = []
        for s in seqs:
            period = s.cycle_time if s.order == 0 else filter_period(s)
            m = t / period
            if abs(m - round(m)) > 1e-9 * max(1.0, m) or round(m) < 1:
                raise InvalidArgumentError(f"t={t} is not a multiple of the filter period {period}")
            col.append(math.exp(-chi_dd(s, int(round(m)), model)))
        extra[f"survival@{t:g}"] = np.array(col)
    return SweepResult("N", orders, rates, res, extra=extra, label=f"UDD tau_c={cycle_time:g}")


def sweep_cycle_time(family: str, order: int, cycle_times: Sequence[float], model: NoiseModel,
                     threads: int = 1) -> SweepResult:
    """Rates against cycle time for ``family`` (UDD or CPMG) with ``order`` pulses,
    plus the pulse-count matched CPMG reference."""
    make = {"UDD": udd_times, "CPMG": cpmg_times}.get(family.upper())
    if make is None:
        raise InvalidArgumentError(f"unsupported family {family!r}")
    rates, res = _rates([make(order, tc) for tc in cycle_times], model, threads)
    ref, _ = _rates([cpmg_times(order, tc) for tc in cycle_times], model, threads)
    return SweepResult("cycle_time", cycle_times, rates, res, extra={"rate_cpmg": ref},
                       label=f"{family.upper()}{order}")


def slow_bath_comparison(seqs: Sequence[PulseSequence], model_fast: NoiseModel,
                         model_slow: NoiseModel, threads: int = 1) -> SweepResult:
    """Rates of each sequence under a fast and a slow bath; values index ``seqs``."""
    fast, res = _rates(seqs, model_fast, threads)
    slow, res_slow = _rates(seqs, model_slow, threads)
    return SweepResult("sequence", np.arange(len(seqs)), fast, res,
                       extra={"rate_slow": slow, "max_residual_slow": res_slow},
                       label=";".join(f"{s.label}{s.order}@{s.cycle_time:g}" for s in seqs))


def matched_cycle_counts(period_a: float, period_b: float, max_den: int = 10_000):
    """Smallest cycle counts (m_a, m_b) with m_a * period_a == m_b * period_b."""
    ratio = Fraction(period_a / period_b).limit_denominator(max_den)
    return ratio.denominator, ratio.numerator


def minimize_rate(family: Callable[[float], PulseSequence], bounds: tuple[float, float],
                  model: NoiseModel, grid: int = 21, tol: float = 1e-4) -> OptimizeResult:
    """Minimise the decay rate over a scalar sequence family.

    A coarse grid brackets the minimum, then golden-section search shrinks
    the bracket to ``tol``. A minimum on the grid edge is reported with
    ``at_boundary``; a rate variation under 1% over the grid sets ``flat``.
    """
    lo, hi = map(float, bounds)
    if not lo < hi:
        raise InvalidArgumentError("bounds must satisfy lo < hi")
    xs = np.linspace(lo, hi, grid)
    cache = {}

    def rate(x):
        if x not in cache:
            cache[x] = decay_rate(family(x), model).rate
        return cache[x]

    ys = np.array([rate(x) for x in xs])
    flat = bool(np.ptp(ys) < 0.01 * np.abs(ys).max())
    i = int(np.argmin(ys))
    if i in (0, grid - 1):
        return OptimizeResult(float(xs[i]), float(ys[i]), True, flat, len(cache))
    a, b = xs[i - 1], xs[i + 1]
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    while b - a > tol:
        if rate(c) < rate(d):
            b, d = d, c
            c = b - GOLDEN * (b - a)
        else:
            a, c = c, d
            d = a + GOLDEN * (b - a)
    x = 0.5 * (a + b)
    return OptimizeResult(float(x), float(rate(x)), False, flat, len(cache))
