"""Command line entry point: ``semilab <subcommand> --config FILE [--set k=v ...]``.

Exit codes: 0 success, 2 invalid configuration or contract violation,
3 a numerical guard tripped (boundary mass or mass drift).
"""
from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import __version__
from .experiments import (ConfigError, Monitor, catalog, fmt, load_config, oracle_value, resolve_threads,
                          run_convergence, run_smoothing, smoothing_csv)
from .grid import dump_field, set_fft_workers
from .initial_data import sample_data
from .propagator import TimeWindow, iter_evolve
from .symbols import ContractError
from .wigner import wigner_transform

EXIT_OK, EXIT_INVALID, EXIT_GUARD = 0, 2, 3


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _single_eps(cfg, args) -> float:
    return float(args.eps) if args.eps is not None else min(cfg.eps)


def _table(cfg, args, kind=None) -> int:
    if kind is not None and cfg.observable.kind != kind:
        raise ContractError(f"this subcommand needs observable.kind = {kind}, got {cfg.observable.kind}")
    table = run_convergence(cfg, args.threads)
    out = args.out or cfg.csv_path
    if out:
        table.write(out)
    else:
        sys.stdout.write(table.to_csv())
    if not table.all_valid:
        bad = [r.eps for r in table.rows if not r.valid]
        print(f"numerical guard tripped at eps = {bad}", file=sys.stderr)
        return EXIT_GUARD
    return EXIT_OK


def cmd_evolve(cfg, args) -> int:
    eps = _single_eps(cfg, args)
    g = cfg.grid_for(eps)
    u0 = sample_data(cfg.family, eps, g)
    mon = Monitor(u0, cfg.guard_fraction, cfg.potential.is_zero)
    w = cfg.window
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\r\n")
    wr.writerow(["t", "mass", "guard_mass"])
    last = u0
    for t, u in iter_evolve(u0, cfg.symbol, cfg.potential, eps, TimeWindow(0.0, w.b, w.n_steps)):
        mon(u)
        wr.writerow([fmt(t), fmt(u.norm() ** 2), fmt(float(np.sum(np.abs(u.values) ** 2 * mon.mask))
                                                      * g.cell_volume)])
        last = u
    _emit(buf.getvalue(), args.out)
    state = args.dump_state or cfg.state_path
    if state:
        dump_field(state, last)
    if mon.guard > cfg.guard_max or not mon.drift_ok(w.n_steps):
        print(f"numerical guard tripped: guard mass {mon.guard:.3g}, drift {mon.drift:.3g}", file=sys.stderr)
        return EXIT_GUARD
    return EXIT_OK


def cmd_wigner(cfg, args) -> int:
    if cfg.family.dimension != 1:
        raise ContractError("Wigner slices are one-dimensional")
    eps = _single_eps(cfg, args)
    g = cfg.grid_for(eps)
    u = sample_data(cfg.family, eps, g)
    t_target = float(args.time)
    if t_target > 0:
        w = TimeWindow(0.0, t_target, cfg.window.n_steps)
        for _, u in iter_evolve(u, cfg.symbol, cfg.potential, eps, w):
            pass
    W = wigner_transform(u, eps)
    if args.dump_state:
        W.dump(args.dump_state)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\r\n")
    wr.writerow(["x", "position_marginal", "density", "xi", "momentum_marginal"])
    pm, mm = W.position_marginal(), W.momentum_marginal()
    dens = np.abs(u.values) ** 2
    for row in zip(W.x, pm, dens, W.xi, mm):
        wr.writerow([fmt(v) for v in row])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_smoothing(cfg, args) -> int:
    rep = run_smoothing(cfg)
    _emit(smoothing_csv(rep), args.out)
    return EXIT_OK


def cmd_predict(cfg, args) -> int:
    eps = _single_eps(cfg, args)
    p = oracle_value(cfg, cfg.grid_for(eps))
    if p is None:
        raise ContractError("oracle.kind = none; nothing to predict")
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\r\n")
    wr.writerow(["predicted", "tag", "equality", "citation"])
    wr.writerow([fmt(p.value), p.tag, "true" if p.equality else "false", p.citation])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_catalog(args) -> int:
    for group, names in catalog().items():
        print(f"{group}: {', '.join(names)}")
    return EXIT_OK


COMMANDS = {
    "evolve": (cmd_evolve, "evolve one eps; CSV of mass and guard mass per snapshot"),
    "defect": (lambda c, a: _table(c, a, "density"), "time-averaged density against phi over the eps schedule"),
    "wigner": (cmd_wigner, "Wigner slice at one time; CSV of marginals, slice via --dump-state"),
    "twomicro": (lambda c, a: _table(c, a, "twomicro"), "two-microlocal pairing over the eps schedule"),
    "smoothing": (cmd_smoothing, "local smoothing quantity S(eps) and its log-log slope"),
    "predict": (cmd_predict, "predicted limit from the selected oracle"),
    "converge": (lambda c, a: _table(c, a), "convergence table measured vs predicted"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semilab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"semilab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="config file (section.key = value lines)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--out", help="CSV output path (default: stdout)")
        p.add_argument("--dump-state", help="binary output path for a field or Wigner slice")
        p.add_argument("--threads", type=int, help="worker threads (default: SEMILAB_THREADS or 1)")
        if name in ("evolve", "wigner", "predict"):
            p.add_argument("--eps", type=float, help="eps value (default: smallest in the schedule)")
        if name == "wigner":
            p.add_argument("--time", type=float, default=0.0, help="evolution time of the slice")
    sub.add_parser("list-catalog", help="list symbols, potentials, families and oracles")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-catalog":
        return cmd_catalog(args)
    try:
        if resolve_threads(args.threads) > 1:
            set_fft_workers(1)
        cfg = load_config(args.config, args.set)
        return COMMANDS[args.command][0](cfg, args)
    except ConfigError as e:
        print(str(e), file=sys.stderr)
        return EXIT_INVALID
    except (ContractError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
