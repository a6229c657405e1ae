"""Run configuration: a TOML document with fixed sections.

Grammar (units inline; every key optional unless noted)::

    [model]                 # required
    kind = "GAUSSIAN"       # GAUSSIAN | LORENTZIAN | TABULATED
    tau_B = 110.0           # correlation time, us (closed forms)
    b_SE = 0.005            # coupling, rad/us
    table = "spec.csv"      # TABULATED only: two-column CSV, omega (rad/us), S (us)

    [sequence]              # required
    family = "UDD"          # UDD | CPMG | THREE_PULSE_X | CUSTOM | FID
    order = 5               # pulses per cycle
    cycle_time = 600.0      # us; or tau_avg (us), giving cycle_time = order * tau_avg
    x = 0.0                 # THREE_PULSE_X only
    pulse_times = [...]     # CUSTOM only, us

    [sweep]
    x = [...]               # lists, or {start, stop, step} inline tables (inclusive)
    cycle_times = [...]     # us
    orders = [...]
    cycles = [...]          # numbers of filter periods M
    times = [...]           # us
    omega = {start = 0.0, stop = 0.1, num = 201}   # rad/us
    filter = "single"       # single | repeated | fid
    slow_tau_B = 1000.0     # us

    [numeric]
    k_max = 200
    trials = 20000
    seed = 0
    threads = 1
    n_modes = 2048
    dt = 1.1                # us; default tau_B / 100

    [output]
    path = "out.csv"

Unknown keys, duplicate keys and non-positive durations are rejected.
"""
from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import tomli

from .exceptions import ConfigError, InvalidArgumentError
from .sequence import FAMILIES, PulseSequence
from .spectrum import KINDS, TABULATED, NoiseModel, model_from_dict


@dataclass
class ModelSpec:
    kind: str = "GAUSSIAN"
    tau_B: float | None = None
    b_SE: float = 0.005
    table: str | None = None


@dataclass
class SequenceSpec:
    family: str = "CPMG"
    order: int | None = None
    cycle_time: float | None = None
    tau_avg: float | None = None
    x: float | None = None
    pulse_times: list | None = None


@dataclass
class SweepSpec:
    x: list | None = None
    cycle_times: list | None = None
    orders: list | None = None
    cycles: list | None = None
    times: list | None = None
    omega: list | None = None
    filter: str = "single"
    slow_tau_B: float | None = None


@dataclass
class NumericSpec:
    k_max: int = 200
    trials: int = 20000
    seed: int = 0
    threads: int = 1
    n_modes: int = 2048
    dt: float | None = None


@dataclass
class OutputSpec:
    path: str | None = None


@dataclass
class RunConfig:
    model: ModelSpec
    sequence: SequenceSpec
    sweep: SweepSpec = field(default_factory=SweepSpec)
    numeric: NumericSpec = field(default_factory=NumericSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    base_dir: str | None = field(default=None, compare=False)

    def noise_model(self) -> NoiseModel:
        data = {k: v for k, v in asdict(self.model).items() if v is not None}
        base = Path(self.base_dir) if self.base_dir else None
        try:
            return model_from_dict(data, base)
        except (InvalidArgumentError, OSError) as exc:
            raise ConfigError(f"model: {exc}", key="model") from exc

    def pulse_sequence(self) -> PulseSequence:
        spec = self.sequence
        data = {k: v for k, v in asdict(spec).items() if v is not None}
        if spec.cycle_time is None and spec.tau_avg is not None:
            data["cycle_time"] = spec.tau_avg * (spec.order or 1)
        try:
            return PulseSequence.from_dict(data)
        except (InvalidArgumentError, TypeError) as exc:
            raise ConfigError(f"sequence: {exc}", key="sequence") from exc

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name == "base_dir":
                continue
            section = {k: v for k, v in asdict(getattr(self, f.name)).items() if v is not None}
            if section:
                out[f.name] = section
        return out


_SECTIONS = {"model": ModelSpec, "sequence": SequenceSpec, "sweep": SweepSpec,
             "numeric": NumericSpec, "output": OutputSpec}
_DURATIONS = {("model", "tau_B"), ("sequence", "cycle_time"), ("sequence", "tau_avg"),
              ("sweep", "slow_tau_B"), ("numeric", "dt")}
_INTS = {("sequence", "order"), ("numeric", "k_max"), ("numeric", "trials"),
         ("numeric", "seed"), ("numeric", "threads"), ("numeric", "n_modes")}
_FLOATS = {("model", "tau_B"), ("model", "b_SE"), ("sequence", "cycle_time"),
           ("sequence", "tau_avg"), ("sequence", "x"), ("sweep", "slow_tau_B"), ("numeric", "dt")}
_LISTS = {"pulse_times", "x", "cycle_times", "orders", "cycles", "times", "omega"}


def _expand_range(key, value):
    if isinstance(value, list):
        return value
    if isinstance(value, dict):
        extra = set(value) - {"start", "stop", "step", "num"}
        if extra or "start" not in value or "stop" not in value or ("step" in value) == ("num" in value):
            raise ConfigError(f"{key}: range needs start, stop and exactly one of step/num", key=key)
        start, stop = float(value["start"]), float(value["stop"])
        if "num" in value:
            return [float(v) for v in np.linspace(start, stop, int(value["num"]))]
        step = float(value["step"])
        if step <= 0:
            raise ConfigError(f"{key}: step must be positive", key=key)
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [float(round(start + i * step, 12)) for i in range(n)]
    raise ConfigError(f"{key}: expected a list or a range table", key=key)


def _coerce(section, key, value):
    where = f"{section}.{key}"
    if (section, key) in _INTS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer", key=key)
    elif (section, key) in _FLOATS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number", key=key)
        value = float(value)
    elif key in _LISTS and section in ("sweep", "sequence"):
        value = _expand_range(key, value)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"{where}: expected numbers", key=key)
        if key == "orders" or key == "cycles":
            if any(int(v) != v for v in value):
                raise ConfigError(f"{where}: expected integers", key=key)
            value = [int(v) for v in value]
        else:
            value = [float(v) for v in value]
    elif not isinstance(value, str):
        raise ConfigError(f"{where}: expected a string", key=key)
    if (section, key) in _DURATIONS and not value > 0:
        raise ConfigError(f"{where}: must be positive (got {value})", key=key)
    return value


def _validate(cfg: RunConfig):
    kind = cfg.model.kind.upper()
    if kind not in KINDS:
        raise ConfigError(f"model.kind: unknown kind {cfg.model.kind!r}", key="kind")
    cfg.model.kind = kind
    if kind == TABULATED:
        if cfg.model.table is None:
            raise ConfigError("model.table: required for TABULATED spectra", key="table")
    elif cfg.model.tau_B is None:
        raise ConfigError("model.tau_B: required", key="tau_B")
    if cfg.model.b_SE < 0:
        raise ConfigError("model.b_SE: must be non-negative", key="b_SE")
    fam = cfg.sequence.family.upper()
    if fam not in FAMILIES:
        raise ConfigError(f"sequence.family: unknown family {cfg.sequence.family!r}", key="family")
    cfg.sequence.family = fam
    if cfg.sequence.order is not None and cfg.sequence.order < 0:
        raise ConfigError("sequence.order: must be non-negative", key="order")
    if cfg.sweep.filter not in ("single", "repeated", "fid"):
        raise ConfigError("sweep.filter: expected single, repeated or fid", key="filter")
    for key in ("cycle_times", "times"):
        values = getattr(cfg.sweep, key)
        if values is not None and any(v <= 0 for v in values):
            raise ConfigError(f"sweep.{key}: durations must be positive", key=key)
    for key in ("orders", "cycles"):
        values = getattr(cfg.sweep, key)
        if values is not None and any(v < 0 for v in values):
            raise ConfigError(f"sweep.{key}: must be non-negative", key=key)
    for key in ("k_max", "trials", "threads", "n_modes"):
        if getattr(cfg.numeric, key) < 1:
            raise ConfigError(f"numeric.{key}: must be positive", key=key)
    if cfg.output.path is not None:
        parent = Path(cfg.output.path).parent
        if cfg.base_dir and not Path(cfg.output.path).is_absolute():
            parent = Path(cfg.base_dir) / parent
        if not (parent.is_dir() and os.access(parent, os.W_OK)):
            raise ConfigError(f"output.path: directory {parent} is not writable", key="path")


def parse_config(text: str, base_dir: str | None = None) -> RunConfig:
    """Parse and validate configuration text, filling defaults."""
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        col = getattr(exc, "colno", None)
        raise ConfigError(f"parse error: {exc}", line=line, column=col) from exc
    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown section {key!r}", key=key)
    for required in ("model", "sequence"):
        if required not in doc:
            raise ConfigError(f"missing section [{required}]", key=required)
    parts = {}
    for name, cls in _SECTIONS.items():
        raw = doc.get(name, {})
        if not isinstance(raw, dict):
            raise ConfigError(f"{name}: expected a table", key=name)
        allowed = {f.name for f in fields(cls)}
        for key in raw:
            if key not in allowed:
                raise ConfigError(f"{name}.{key}: unknown key", key=key)
        parts[name] = cls(**{k: _coerce(name, k, v) for k, v in raw.items()})
    cfg = RunConfig(**parts, base_dir=base_dir)
    _validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", key="config") from exc
    return parse_config(text, base_dir=str(path.parent))


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return {math.inf: "inf", -math.inf: "-inf"}.get(value, "nan")
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format(v) for v in value) + "]"
    raise TypeError(f"cannot format {value!r}")


def dump_config(cfg: RunConfig) -> str:
    """TOML text that :func:`parse_config` reads back to an equal config."""
    lines = []
    for section, values in cfg.to_dict().items():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {_format(v)}" for k, v in values.items())
        lines.append("")
    return "\n".join(lines)


def sequence_block(seq: PulseSequence) -> str:
    """Serialise a pulse sequence as a ``[sequence]`` TOML block."""
    data = seq.to_dict()
    return "[sequence]\n" + "".join(f"{k} = {_format(v)}\n" for k, v in data.items() if v is not None)


def parse_sequence_block(text: str) -> PulseSequence:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    return PulseSequence.from_dict(doc.get("sequence", doc))
