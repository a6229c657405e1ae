"""CSV emission and run manifests."""
from __future__ import annotations

import csv
import io
import json
import platform
import sys
from dataclasses import dataclass
from importlib import metadata

import numpy as np

from .decay import DecayCurve
from .experiments import OptimizeResult, SweepResult
from .stochastic import McResult


@dataclass(frozen=True)
class FilterTable:
    omega: np.ndarray
    values: np.ndarray


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def _table(result):
    if isinstance(result, DecayCurve):
        cols = ["t", "chi", "survival"]
        rows = zip(result.times, result.chi, result.survival)
    elif isinstance(result, McResult):
        cols = ["t", "survival", "stderr", "trials"]
        rows = ((t, s, e, result.trials) for t, s, e in
                zip(result.times, result.survival, result.stderr))
    elif isinstance(result, SweepResult):
        cols = ["parameter", "rate", "max_residual"] + list(result.extra)
        rows = zip(result.values, result.rates, result.max_residuals,
                   *[result.extra[k] for k in result.extra])
    elif isinstance(result, FilterTable):
        cols = ["omega", "re_F", "im_F", "abs_F2"]
        rows = ((w, f.real, f.imag, abs(f) ** 2) for w, f in zip(result.omega, result.values))
    elif isinstance(result, OptimizeResult):
        cols = ["parameter", "rate", "at_boundary", "flat"]
        rows = [(result.parameter, result.rate, result.at_boundary, result.flat)]
    elif isinstance(result, (list, tuple)) and result and all(isinstance(r, SweepResult) for r in result):
        header, body = None, []
        for r in result:
            h, b = _table(r)
            if header is not None and h != header:
                raise TypeError("sweep results have different columns")
            header = h
            body.extend(b)
        return header, body
    else:
        raise TypeError(f"cannot write {type(result).__name__} as CSV")
    return cols, [[_num(v) for v in row] for row in rows]


def format_csv(result, comments=()) -> str:
    """CSV text with ``#`` comment lines, a header row and 12 significant digits."""
    buf = io.StringIO()
    for line in comments:
        for part in str(line).splitlines() or [""]:
            buf.write(f"# {part}\n")
    header, rows = _table(result)
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def emit_csv(result, path, comments=()) -> None:
    """Write ``result`` to ``path``; OS errors name the path."""
    text = format_csv(result, comments)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def _version(name):
    try:
        return metadata.version(name)
    except metadata.PackageNotFoundError:
        return "unknown"


def build_manifest(command, config_dict, seed, wall_time, extra=None) -> dict:
    manifest = {
        "command": command,
        "config": config_dict,
        "seed": seed,
        "wall_time_s": round(wall_time, 6),
        "versions": {
            "ddsim": _version("artifact"),
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": _version("scipy"),
            "platform": platform.platform(),
        },
    }
    if extra:
        manifest.update(extra)
    return manifest


def manifest_lines(manifest) -> list[str]:
    return ["manifest " + json.dumps(manifest, sort_keys=True, default=str)]


def write_manifest(manifest, path) -> None:
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
