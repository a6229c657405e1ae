"""Command-line front end.

Usage: ``ddsim SUBCOMMAND --config run.toml [--out result.csv] [--seed N] [--threads N]``

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import decay, experiments, filterfn, stochastic
from .config import ConfigError, RunConfig, load_config
from .exceptions import InvalidArgumentError, NumericalError
from .report import FilterTable, build_manifest, format_csv, write_manifest
from .sequence import cpmg_times, three_pulse_family, toggle_filter, udd_times
from .spectrum import gaussian_model, lorentzian_model

log = logging.getLogger("ddsim")

COMMANDS = ("filter", "decay", "rate", "mc", "sweep-x", "sweep-order", "sweep-cycle",
            "slow-bath", "optimize")


def _require(value, key):
    if value is None:
        raise ConfigError(f"sweep.{key}: required by this subcommand", key=key)
    return value


def cmd_filter(cfg: RunConfig, args):
    seq = cfg.pulse_sequence()
    omega = np.asarray(_require(cfg.sweep.omega, "omega"))
    kind = cfg.sweep.filter
    if kind == "fid" or seq.order == 0:
        t = seq.cycle_time * (cfg.sweep.cycles[0] if cfg.sweep.cycles else 1)
        values = filterfn.filter_fid(omega, t)
    elif kind == "repeated":
        m = cfg.sweep.cycles[0] if cfg.sweep.cycles else 1
        values = filterfn.filter_repeated(toggle_filter(seq), m, omega)
    else:
        values = filterfn.filter_single(toggle_filter(seq), omega)
    return FilterTable(omega, values), {}


def cmd_decay(cfg, args):
    seq, model = cfg.pulse_sequence(), cfg.noise_model()
    if seq.order == 0 and cfg.sweep.times:
        return decay.fid_curve(cfg.sweep.times, model), {}
    cycles = cfg.sweep.cycles or list(range(1, 21))
    return decay.decay_curve(seq, cycles, model), {}


def cmd_rate(cfg, args):
    seq, model = cfg.pulse_sequence(), cfg.noise_model()
    fit = decay.decay_rate(seq, model)
    harmonic = decay.rate_harmonic(seq, model, cfg.numeric.k_max) if seq.order else math.nan
    result = experiments.SweepResult(
        "cycle_time", [seq.cycle_time], [fit.rate], [fit.max_residual],
        extra={"rate_harmonic": np.array([harmonic]), "fit_t_min": np.array([fit.fit_window[0]]),
               "fit_t_max": np.array([fit.fit_window[1]])},
        label=f"{seq.label}{seq.order}")
    return result, {}


def cmd_mc(cfg, args):
    seq, model = cfg.pulse_sequence(), cfg.noise_model()
    cycles = cfg.sweep.cycles or list(range(1, 11))
    res = stochastic.mc_survival(seq, cycles, model, trials=cfg.numeric.trials,
                                 seed=cfg.numeric.seed, dt=cfg.numeric.dt,
                                 n_modes=cfg.numeric.n_modes, threads=cfg.numeric.threads)
    return res, {"seed": cfg.numeric.seed}


def cmd_sweep_x(cfg, args):
    model = cfg.noise_model()
    xs = _require(cfg.sweep.x, "x")
    cycle_times = cfg.sweep.cycle_times or [cfg.pulse_sequence().cycle_time]
    results = experiments.sweep_x(xs, cycle_times, model, cfg.numeric.threads)
    minima = {r.label: (r.minimum[0] if r.minimum else None) for r in results}
    return results, {"x_min": minima}


def cmd_sweep_order(cfg, args):
    model = cfg.noise_model()
    orders = _require(cfg.sweep.orders, "orders")
    if cfg.sequence.tau_avg is not None:
        res = experiments.sweep_order_fixed_power(orders, cfg.sequence.tau_avg, model,
                                                  cfg.numeric.threads)
    else:
        tc = cfg.sequence.cycle_time
        if tc is None:
            raise ConfigError("sequence.cycle_time: required (or tau_avg)", key="cycle_time")
        res = experiments.sweep_order_fixed_cycle(orders, tc, model, cfg.sweep.times or (),
                                                  cfg.numeric.threads)
    return res, {}


def cmd_sweep_cycle(cfg, args):
    model = cfg.noise_model()
    order = cfg.sequence.order
    if order is None:
        raise ConfigError("sequence.order: required", key="order")
    res = experiments.sweep_cycle_time(cfg.sequence.family, order,
                                       _require(cfg.sweep.cycle_times, "cycle_times"), model,
                                       cfg.numeric.threads)
    return res, {}


def cmd_slow_bath(cfg, args):
    fast = cfg.noise_model()
    slow_tau = _require(cfg.sweep.slow_tau_B, "slow_tau_B")
    make = {"GAUSSIAN": gaussian_model, "LORENTZIAN": lorentzian_model}.get(fast.kind)
    if make is None:
        raise ConfigError("slow-bath needs a closed-form model", key="kind")
    slow = make(slow_tau, fast.b_se)
    tau = cfg.sequence.tau_avg
    if tau is None:
        raise ConfigError("sequence.tau_avg: required by slow-bath", key="tau_avg")
    seqs = []
    for n in _require(cfg.sweep.orders, "orders"):
        seqs += [udd_times(n, n * tau), cpmg_times(n, n * tau)]
    return experiments.slow_bath_comparison(seqs, fast, slow, cfg.numeric.threads), {}


def cmd_optimize(cfg, args):
    model = cfg.noise_model()
    tc = cfg.pulse_sequence().cycle_time
    xs = cfg.sweep.x or [-0.06, 0.06]
    res = experiments.minimize_rate(lambda x: three_pulse_family(x, tc), (min(xs), max(xs)), model)
    return res, {}


HANDLERS = {
    "filter": cmd_filter, "decay": cmd_decay, "rate": cmd_rate, "mc": cmd_mc,
    "sweep-x": cmd_sweep_x, "sweep-order": cmd_sweep_order, "sweep-cycle": cmd_sweep_cycle,
    "slow-bath": cmd_slow_bath, "optimize": cmd_optimize,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="TOML run configuration")
    common.add_argument("--out", metavar="PATH", help="CSV destination (default: config output.path or stdout)")
    common.add_argument("--seed", type=int, help="override numeric.seed")
    common.add_argument("--threads", type=int, help="override numeric.threads")
    parser = argparse.ArgumentParser(prog="ddsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HANDLERS[name].__name__[4:].replace("_", " "))
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.numeric.seed = args.seed
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be positive", key="threads")
            cfg.numeric.threads = args.threads
        start = time.perf_counter()
        result, extra = HANDLERS[args.command](cfg, args)
        wall = time.perf_counter() - start
    except ConfigError as exc:
        where = f" (line {exc.line}, column {exc.column})" if exc.line else ""
        print(f"ddsim: config error{where}: {exc}", file=sys.stderr)
        return 2
    except InvalidArgumentError as exc:
        print(f"ddsim: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"ddsim: numerical error: {exc} {json.dumps(exc.diagnostics, default=str)}",
              file=sys.stderr)
        return 3

    manifest = build_manifest(args.command, cfg.to_dict(), cfg.numeric.seed, wall, extra)
    comments = [f"ddsim {args.command}", f"seed = {cfg.numeric.seed}",
                "config " + json.dumps(cfg.to_dict(), sort_keys=True)]
    comments += [f"{k} = {json.dumps(v, default=str)}" for k, v in extra.items() if k != "seed"]
    text = format_csv(result, comments)
    out = args.out or cfg.output.path
    if out is None:
        sys.stdout.write(text)
        return 0
    if args.out is None and cfg.base_dir and not Path(out).is_absolute():
        out = str(Path(cfg.base_dir) / out)
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
        write_manifest(manifest, out + ".manifest.json")
    except OSError as exc:
        print(f"ddsim: cannot write {out}: {exc.strerror}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
