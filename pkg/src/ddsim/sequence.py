"""Pulse sequences and their time-domain toggle filters.

All times are in microseconds. Pulses are ideal (zero width, perfect pi
rotations) and positioned at their centres.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .exceptions import InvalidArgumentError

CPMG = "CPMG"
UDD = "UDD"
THREE_PULSE_X = "THREE_PULSE_X"
CUSTOM = "CUSTOM"
FID = "FID"

FAMILIES = (CPMG, UDD, THREE_PULSE_X, CUSTOM, FID)

#: Shift of the outer pulses that turns the UDD3 cycle into CPMG.
X_CPMG = 1.0 / 6.0 - math.sin(math.pi / 8) ** 2
#: Open interval of admissible three-pulse deviations.
X_BOUNDS = (-math.sin(math.pi / 8) ** 2, 0.5 - math.sin(math.pi / 8) ** 2)


@dataclass(frozen=True)
class PulseSequence:
    """One cycle of pi pulses.

    ``order == 0`` is allowed and denotes free evolution over the cycle.
    ``parameter`` stores the family parameter (``x`` for the three-pulse
    family) so a sequence can be serialised back to its generator.
    """

    cycle_time: float
    pulse_times: tuple[float, ...]
    order: int
    label: str = CUSTOM
    parameter: float | None = None

    def __post_init__(self):
        times = tuple(float(t) for t in self.pulse_times)
        object.__setattr__(self, "pulse_times", times)
        object.__setattr__(self, "cycle_time", float(self.cycle_time))
        if not (self.cycle_time > 0 and math.isfinite(self.cycle_time)):
            raise InvalidArgumentError(f"cycle_time must be positive, got {self.cycle_time}")
        if self.order < 0 or len(times) != self.order:
            raise InvalidArgumentError(
                f"order {self.order} does not match {len(times)} pulse times")
        if times:
            if not times[0] > 0 or not times[-1] < self.cycle_time:
                raise InvalidArgumentError("pulse times must lie strictly inside (0, cycle_time)")
            if any(b <= a for a, b in zip(times, times[1:])):
                raise InvalidArgumentError("pulse times must be strictly increasing")

    @property
    def mean_spacing(self) -> float:
        """Average pulse spacing, cycle_time / order."""
        if self.order == 0:
            return self.cycle_time
        return self.cycle_time / self.order

    def to_dict(self) -> dict:
        """Plain mapping used by the configuration writer."""
        out = {"family": self.label, "order": self.order, "cycle_time": self.cycle_time}
        if self.label == THREE_PULSE_X:
            out["x"] = self.parameter
        elif self.label == CUSTOM:
            out["pulse_times"] = list(self.pulse_times)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PulseSequence":
        family = str(data.get("family", CUSTOM)).upper()
        cycle_time = data.get("cycle_time")
        if cycle_time is None:
            raise InvalidArgumentError("sequence needs a cycle_time")
        order = data.get("order")
        if family == UDD:
            return udd_times(int(order), cycle_time)
        if family == CPMG:
            return cpmg_times(int(order), cycle_time)
        if family == THREE_PULSE_X:
            return three_pulse_family(float(data.get("x", 0.0)), cycle_time)
        if family == FID:
            return free_evolution(cycle_time)
        if family == CUSTOM:
            times = list(data.get("pulse_times", []))
            return PulseSequence(cycle_time, tuple(times), len(times) if order is None else int(order))
        raise InvalidArgumentError(f"unknown sequence family {family!r}")


@dataclass(frozen=True)
class ToggleFilter:
    """Periodic +-1 step function that starts at +1.

    ``switch_times`` lie in (0, period); an even number of switches makes
    the periodic extension well defined. ``order`` is the pulse count of
    the generating cycle (kept for fundamental-frequency bookkeeping).
    """

    period: float
    switch_times: tuple[float, ...]
    initial_value: int = 1
    order: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "switch_times", tuple(float(t) for t in self.switch_times))
        if len(self.switch_times) % 2:
            raise InvalidArgumentError("a periodic toggle filter needs an even number of switches")

    @property
    def n_switches(self) -> int:
        return len(self.switch_times)

    @property
    def fundamental(self) -> float:
        """Angular frequency 2 pi / period."""
        return 2.0 * np.pi / self.period

    def segments(self):
        """Return (starts, ends, signs) of the constant pieces over one period."""
        edges = np.concatenate(([0.0], self.switch_times, [self.period]))
        signs = self.initial_value * (-1.0) ** np.arange(len(edges) - 1)
        return edges[:-1], edges[1:], signs

    def mean(self) -> float:
        starts, ends, signs = self.segments()
        return float(np.sum(signs * (ends - starts)) / self.period)

    def __call__(self, t):
        """Value of the periodic extension at times ``t`` (right-continuous)."""
        t = np.asarray(t, dtype=float)
        phase = np.mod(t, self.period)
        count = np.searchsorted(np.asarray(self.switch_times), phase, side="right")
        return self.initial_value * np.where(count % 2 == 0, 1.0, -1.0)

    def jumps(self, n_cycles: int = 1):
        """Positions and sizes of the discontinuities of f on [0, n_cycles * period].

        Treats f as zero outside the window, so the end points carry jumps
        of +-1 and every interior switch a jump of +-2.
        """
        switches = np.asarray(self.switch_times)
        pos = [0.0]
        size = [float(self.initial_value)]
        value = float(self.initial_value)
        for m in range(n_cycles):
            for s in switches + m * self.period:
                pos.append(s)
                size.append(-2.0 * value)
                value = -value
        pos.append(n_cycles * self.period)
        size.append(-value)
        return np.array(pos), np.array(size)


def _check_count(n, name):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgumentError(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def _check_duration(t, name="cycle_time"):
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        raise InvalidArgumentError(f"{name} must be positive, got {t}")
    return t


def udd_times(order: int, cycle_time: float) -> PulseSequence:
    """Uhrig sequence: pulse i at cycle_time * sin^2(pi i / (2 (order + 1)))."""
    order = _check_count(order, "order")
    cycle_time = _check_duration(cycle_time)
    i = np.arange(1, order + 1)
    times = cycle_time * np.sin(np.pi * i / (2 * (order + 1))) ** 2
    # mirror the first half so t_i + t_{N+1-i} = cycle_time holds exactly
    half = order // 2
    times[order - half:] = cycle_time - times[:half][::-1]
    if order % 2:
        times[half] = 0.5 * cycle_time
    return PulseSequence(cycle_time, tuple(times), order, UDD)


def cpmg_times(n_pulses: int, cycle_time: float) -> PulseSequence:
    """Equidistant pulses with half-spacing delays at both cycle edges."""
    n_pulses = _check_count(n_pulses, "n_pulses")
    cycle_time = _check_duration(cycle_time)
    i = np.arange(1, n_pulses + 1)
    times = (2 * i - 1) * cycle_time / (2 * n_pulses)
    return PulseSequence(cycle_time, tuple(times), n_pulses, CPMG)


def three_pulse_family(x: float, cycle_time: float) -> PulseSequence:
    """Mirror-symmetric three-pulse cycle with outer pulses shifted by ``x * cycle_time``.

    ``x = 0`` is UDD3 and ``x = X_CPMG`` is the equidistant cycle.
    """
    cycle_time = _check_duration(cycle_time)
    x = float(x)
    if not X_BOUNDS[0] < x < X_BOUNDS[1]:
        raise InvalidArgumentError(f"x={x} outside admissible interval {X_BOUNDS}")
    t1 = cycle_time * (math.sin(math.pi / 8) ** 2 + x)
    times = (t1, cycle_time / 2, cycle_time - t1)
    return PulseSequence(cycle_time, times, 3, THREE_PULSE_X, parameter=x)


def free_evolution(cycle_time: float) -> PulseSequence:
    """A pulse-free cycle (free induction decay)."""
    return PulseSequence(_check_duration(cycle_time), (), 0, FID)


def custom_sequence(pulse_times: Iterable[float], cycle_time: float) -> PulseSequence:
    times = tuple(float(t) for t in pulse_times)
    return PulseSequence(_check_duration(cycle_time), times, len(times), CUSTOM)


def toggle_filter(seq: PulseSequence) -> ToggleFilter:
    """Toggle filter over its true period.

    Even pulse counts repeat every cycle. For odd counts the sign is
    still -1 at the end of the first cycle, so the filter period spans two
    cycles and the second cycle continues with the opposite sign.
    """
    times = np.asarray(seq.pulse_times)
    if seq.order % 2 == 0:
        return ToggleFilter(seq.cycle_time, tuple(times), 1, seq.order)
    switches = np.concatenate((times, times + seq.cycle_time))
    return ToggleFilter(2 * seq.cycle_time, tuple(switches), 1, seq.order)
