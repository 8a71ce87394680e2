"""Declarative eps-sweeps: config parsing, validation, execution and CSV tables.

Config files are UTF-8 text with one ``section.key = value`` per line, ``#``
comments and comma-separated arrays.  Keys may nest (``family.theta.width``);
everything after the first dot is the key within its section.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__, _kernels
from .grid import Field, Grid, UnderResolved, l2_norm, mass, set_fft_workers
from .initial_data import (FAMILY_VARIANTS, CoherentState, DataFamily, ManifoldConcentrating, ManifoldShifted,
                           PlaneWaveModulated, Profile, ShiftedDegenerate, TwoWave, auto_grid,
                           required_points, sample_data)
from .predictions import (PredictedLimit, mt_consistency_rhs, predict_degenerate, predict_isolated,
                          predict_manifold)
from .propagator import FREE_DRIFT_TOL, STRANG_DRIFT_TOL, TimeWindow, iter_evolve, min_strang_steps
from .smoothing import Ball, blowup_exponent
from .symbols import (POTENTIAL_TAGS, SYMBOL_TAGS, AffineManifold, ContractError, FinitePoints, PotentialSpec,
                      SymbolSpec, builtin_potential, builtin_symbol)
from .wigner import (Bump, CutoffParams, One, SmoothStep, TwoMicroSymbol, apply_cutoffs, converged_average,
                     symbol, times, two_micro_expect)

DEFAULT_SCHEDULE = tuple(0.2 * 2.0 ** -k for k in range(6))
ORACLES = ("none", "isolated", "degenerate", "manifold", "mt_consistency")
OBSERVABLES = ("density", "twomicro", "smoothing")


class ConfigError(ContractError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.problems))


class GuardTrip(RuntimeError):
    """A numerical monitor (boundary mass, mass drift) exceeded its threshold."""


# -- parsing ------------------------------------------------------------------------

def parse_text(text: str) -> dict[str, str]:
    """Flat ``{"section.key": "raw value"}`` mapping; later lines win."""
    out = {}
    problems = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {no}: expected 'section.key = value', got {raw.strip()!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if "." not in key or not key.split(".", 1)[0] or not key.split(".", 1)[1]:
            problems.append(f"line {no}: key {key!r} must have the form section.key")
            continue
        out[key] = value
    if problems:
        raise ConfigError(problems)
    return out


def apply_overrides(flat: dict[str, str], overrides) -> dict[str, str]:
    flat = dict(flat)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError([f"override {item!r} must look like section.key=value"])
        key, value = (s.strip() for s in item.split("=", 1))
        if "." not in key:
            raise ConfigError([f"override key {key!r} must have the form section.key"])
        flat[key] = value
    return flat


def canonical(flat: dict[str, str]) -> str:
    return "".join(f"{k} = {flat[k]}\n" for k in sorted(flat))


class _Reader:
    """Typed access that records every problem instead of stopping at the first."""

    def __init__(self, flat):
        self.flat = flat
        self.problems = []
        self.used = set()

    def has(self, key):
        return key in self.flat

    def raw(self, key, default=None):
        self.used.add(key)
        return self.flat.get(key, default)

    def str(self, key, default=None, choices=None):
        v = self.raw(key, default)
        if v is None:
            self.problems.append(f"missing required key {key}")
            return None
        if choices is not None and v not in choices:
            self.problems.append(f"{key} = {v!r} is not one of {', '.join(choices)}")
        return v

    def float(self, key, default=None):
        v = self.raw(key)
        if v is None:
            if default is None:
                self.problems.append(f"missing required key {key}")
            return default
        try:
            return float(v)
        except ValueError:
            self.problems.append(f"{key} = {v!r} is not a number")
            return default

    def int(self, key, default=None):
        v = self.float(key, None if default is None else float(default))
        if v is None:
            return None
        if v != int(v):
            self.problems.append(f"{key} must be an integer")
        return int(v)

    def floats(self, key, default=None):
        v = self.raw(key)
        if v is None:
            if default is None:
                self.problems.append(f"missing required key {key}")
            return None if default is None else list(default)
        try:
            return [float(s) for s in v.split(",") if s.strip()]
        except ValueError:
            self.problems.append(f"{key} = {v!r} is not a comma list of numbers")
            return None if default is None else list(default)

    def bool(self, key, default=False):
        v = self.raw(key)
        if v is None:
            return default
        if v.lower() in ("1", "true", "yes", "on"):
            return True
        if v.lower() in ("0", "false", "no", "off"):
            return False
        self.problems.append(f"{key} = {v!r} is not a boolean")
        return default


def _profile(rd: _Reader, prefix: str, d: int) -> Profile | None:
    kind = rd.str(f"{prefix}.kind", "gaussian", ("gaussian", "bump"))
    width = rd.float(f"{prefix}.width", 1.0)
    center = rd.floats(f"{prefix}.center", [0.0])
    amp = rd.float(f"{prefix}.amplitude", 1.0)
    if center is not None and len(center) not in (1, d):
        rd.problems.append(f"{prefix}.center needs 1 or {d} components")
        return None
    try:
        return Profile(kind, d, width, tuple(center if len(center) == d else center * d), amp)
    except ContractError as e:
        rd.problems.append(f"{prefix}: {e}")
        return None


def _family(rd: _Reader, sym: SymbolSpec | None) -> DataFamily | None:
    variant = rd.str("family.variant", None, tuple(FAMILY_VARIANTS))
    if variant is None or variant not in FAMILY_VARIANTS or sym is None:
        return None
    d = sym.dimension
    try:
        if variant == "PlaneWaveModulated":
            return PlaneWaveModulated(_profile(rd, "family.theta", d), rd.floats("family.xi0"))
        if variant == "TwoWave":
            return TwoWave(_profile(rd, "family.theta1", d), rd.floats("family.xi1"),
                           _profile(rd, "family.theta2", d), rd.floats("family.xi2"))
        if variant == "CoherentState":
            return CoherentState(_profile(rd, "family.theta", d), rd.floats("family.x0", [0.0]),
                                 rd.floats("family.xi0"))
        if variant == "ShiftedDegenerate":
            return ShiftedDegenerate(_profile(rd, "family.theta", d), rd.floats("family.xi0", [0.0]),
                                     rd.floats("family.omega0"), rd.float("family.alpha", 0.0),
                                     rd.float("family.beta", 0.75))
        cs = sym.critical_set
        if not isinstance(cs, AffineManifold):
            rd.problems.append(f"{variant} needs a symbol with an affine critical manifold; {sym.name} has none")
            return None
        theta = _profile(rd, "family.theta", cs.p)
        phi = _profile(rd, "family.phi", cs.r)
        if variant == "ManifoldConcentrating":
            return ManifoldConcentrating(theta, phi, rd.floats("family.z0", [0.0]), rd.floats("family.zeta0"),
                                         rd.float("family.alpha", 0.5))
        return ManifoldShifted(theta, phi, rd.floats("family.xi0p", [0.0]), rd.floats("family.omega0"),
                               rd.float("family.alpha", 0.0), rd.float("family.beta", 0.75))
    except (ContractError, TypeError, AttributeError) as e:
        rd.problems.append(f"family: {e}")
        return None


def _factor(rd: _Reader, prefix: str, d: int):
    kind = rd.str(f"{prefix}.kind", "one", ("one", "bump", "product_bump", "smoothstep", "complement"))
    if kind == "one":
        return One()
    if kind == "smoothstep":
        return SmoothStep(rd.float(f"{prefix}.R0", 1.0))
    center = rd.floats(f"{prefix}.center", [0.0])
    if center is not None and len(center) == 1:
        center = center * d
    if kind == "product_bump":
        widths = rd.floats(f"{prefix}.widths", [1.0])
        if len(widths) == 1:
            widths = widths * d
        return times(*(Bump(wd, (c,), (i,)) for i, (wd, c) in enumerate(zip(widths, center))))
    width = rd.float(f"{prefix}.width", 1.0)
    if kind == "complement":
        from .wigner import Complement
        return Complement(width, tuple(center))
    return Bump(width, tuple(center))


@dataclass
class Observable:
    kind: str
    phi: object = None
    symbol: TwoMicroSymbol | None = None  # after cutoffs
    bare: TwoMicroSymbol | None = None  # before cutoffs
    cutoff: CutoffParams | None = None
    s: float = 0.5
    delta: float = 0.5
    ball: Ball | None = None


@dataclass
class ExperimentConfig:
    flat: dict
    symbol: SymbolSpec
    potential: PotentialSpec
    family: DataFamily
    eps: list
    L: list | None
    N: list | None
    L_min: float
    window: TimeWindow
    observable: Observable
    oracle: str
    guard_fraction: float = 0.9
    guard_max: float = 1e-6
    record_runtime: bool = True
    csv_path: str | None = None
    state_path: str | None = None

    @property
    def hash(self) -> str:
        return hashlib.sha256(canonical(self.flat).encode()).hexdigest()

    def extent(self) -> np.ndarray:
        """Radius the observable looks at, per axis."""
        d = self.symbol.dimension
        ob = self.observable
        if ob.kind == "smoothing":
            return np.abs(np.broadcast_to(np.asarray(ob.ball.center, dtype=float), (d,))) + ob.ball.radius
        return _support_radius(ob.phi, d)

    def grid_for(self, eps: float) -> Grid:
        T = self.observable.delta if self.observable.kind == "smoothing" else self.window.b
        if self.L is not None:
            L = np.broadcast_to(np.asarray(self.L, dtype=float), (self.family.dimension,))
            if self.N is not None:
                N = np.broadcast_to(np.asarray(self.N, dtype=int), L.shape)
            else:
                N = required_points(self.family, eps, L, 1.5)
            g = Grid(tuple(float(v) for v in L), tuple(int(v) for v in N))
            need = required_points(self.family, eps, g.L)
            if np.any(need > np.asarray(g.N)):
                raise UnderResolved(f"eps = {eps}: grid needs N >= {need.tolist()}", need.tolist())
            return g
        return auto_grid(self.family, eps, self.symbol, self.potential, T=T, extent=self.extent(),
                         N=self.N, guard=self.guard_fraction, L_min=self.L_min)


def _support_radius(f, d) -> np.ndarray:
    """Per-axis radius outside which a factor vanishes (0 for unbounded factors)."""
    from .wigner import Product
    if isinstance(f, Bump):
        c = np.broadcast_to(np.asarray(f.center, dtype=float), (len(f.center),))
        out = np.zeros(d)
        axes = range(d) if f.axes is None else f.axes
        for j, i in enumerate(axes):
            out[i] = abs(c[j if len(c) > 1 else 0]) + 2 * f.width
        return out
    if isinstance(f, Product):
        rs = [_support_radius(g, d) for g in f.factors]
        return np.max(rs, axis=0)
    return np.zeros(d)


def build_config(flat: dict[str, str]) -> ExperimentConfig:
    """Parse and cross-validate; raises :class:`ConfigError` listing every problem."""
    rd = _Reader(flat)
    sym = pot = None
    tag = rd.str("symbol.tag", None, SYMBOL_TAGS)
    if tag in SYMBOL_TAGS:
        params = {}
        for key in ("d", "r", "p"):
            if rd.has(f"symbol.{key}"):
                params[key] = rd.int(f"symbol.{key}")
        if rd.has("symbol.xi0"):
            params["xi0"] = rd.floats("symbol.xi0")
        try:
            sym = builtin_symbol(tag, **params)
        except (ContractError, KeyError) as e:
            rd.problems.append(f"symbol: {e}")
    d = sym.dimension if sym else 1
    ptag = rd.str("potential.tag", "zero", POTENTIAL_TAGS)
    if ptag in POTENTIAL_TAGS:
        pp = {}
        for key in ("center", "amplitudes", "wavenumbers"):
            if rd.has(f"potential.{key}"):
                pp[key] = rd.floats(f"potential.{key}")
        for key in ("width", "height"):
            if rd.has(f"potential.{key}"):
                pp[key] = rd.float(f"potential.{key}")
        try:
            pot = builtin_potential(ptag, d, **pp)
        except ContractError as e:
            rd.problems.append(f"potential: {e}")
    fam = _family(rd, sym)

    if rd.has("schedule.eps"):
        eps = rd.floats("schedule.eps")
        for key in ("schedule.eps0", "schedule.levels"):
            if rd.has(key):
                rd.raw(key)
                rd.problems.append(f"{key} conflicts with the explicit schedule.eps list")
    else:
        e0 = rd.float("schedule.eps0", 0.2)
        levels = rd.int("schedule.levels", 6)
        eps = [e0 * 2.0 ** -k for k in range(levels)]
    if eps is not None:
        if not eps or any(e <= 0 for e in eps):
            rd.problems.append("schedule.eps must be a non-empty list of positive numbers")
        elif any(b >= a for a, b in zip(eps, eps[1:])):
            rd.problems.append("schedule.eps must be strictly decreasing")

    L = None if rd.raw("grid.L", "auto") == "auto" else rd.floats("grid.L")
    N = None if rd.raw("grid.N", "auto") == "auto" else [int(v) for v in (rd.floats("grid.N") or [8])]
    L_min = rd.float("grid.L_min", 0.0)

    window = None
    try:
        window = TimeWindow(rd.float("window.a", 0.0), rd.float("window.b", 1.0), rd.int("window.n_steps", 200),
                            1, rd.bool("window.smooth", False))
    except ContractError as e:
        rd.problems.append(f"window: {e}")

    okind = rd.str("observable.kind", "density", OBSERVABLES)
    ob = Observable(okind)
    if okind in ("density", "twomicro"):
        ob.phi = _factor(rd, "observable.phi", d)
    if okind == "twomicro":
        r = rd.int("observable.r", 0)
        xi0pp = rd.floats("observable.xi0pp", [0.0] * max(d - r, 1))
        try:
            ob.bare = symbol(ob.phi, _factor(rd, "observable.psi", d), _factor(rd, "observable.rho", d - r),
                             d=d, r=r, xi0pp=xi0pp)
            cut = rd.str("observable.cutoff", "inner", ("inner", "outer", "none"))
            ob.symbol = ob.bare
            if cut != "none":
                ob.cutoff = CutoffParams(rd.float("observable.R", 4.0), rd.float("observable.delta", 0.5))
                ob.symbol = apply_cutoffs(ob.bare, ob.cutoff, cut)
        except ContractError as e:
            rd.problems.append(f"observable: {e}")
    if okind == "smoothing":
        ob.s = rd.float("smoothing.s", 0.5)
        ob.delta = rd.float("smoothing.delta", 0.5)
        center = rd.floats("smoothing.center", [0.0])
        ob.ball = Ball(tuple(center * d if len(center) == 1 else center), rd.float("smoothing.radius", 1.0))
        if ob.s < 0:
            rd.problems.append("smoothing.s must be non-negative")
        if ob.delta <= 0:
            rd.problems.append("smoothing.delta must be positive")
    oracle = rd.str("oracle.kind", "none", ORACLES)

    cfg = None
    if not rd.problems:
        cfg = ExperimentConfig(flat, sym, pot, fam, eps, L, N, L_min, window, ob, oracle,
                               rd.float("guard.fraction", 0.9), rd.float("guard.max_mass", 1e-6),
                               rd.bool("run.record_runtime", True), rd.raw("output.csv"), rd.raw("output.state"))
        rd.problems.extend(validate(cfg))
    unknown = sorted(set(flat) - rd.used)
    if unknown:
        rd.problems.append("unknown keys: " + ", ".join(unknown))
    if rd.problems:
        raise ConfigError(rd.problems)
    return cfg


def validate(cfg: ExperimentConfig) -> list[str]:
    """Every violated hypothesis, as readable sentences."""
    sym, fam, pot = cfg.symbol, cfg.family, cfg.potential
    errs = []
    if isinstance(fam, (ShiftedDegenerate, ManifoldShifted)):
        errs += fam.violations(sym, prop1=cfg.oracle in ("degenerate", "manifold"))
    else:
        errs += fam.violations(sym)
    if pot.dimension != sym.dimension:
        errs.append("potential and symbol dimensions differ")
    if cfg.oracle == "isolated" and not isinstance(sym.critical_set, FinitePoints):
        errs.append("oracle 'isolated' needs a symbol with finitely many critical points")
    if cfg.oracle == "degenerate":
        if not isinstance(fam, ShiftedDegenerate):
            errs.append("oracle 'degenerate' needs ShiftedDegenerate data")
        if not pot.is_zero:
            errs.append("oracle 'degenerate' holds for V = 0 only")
    if cfg.oracle == "manifold" and not isinstance(fam, (ManifoldConcentrating, ManifoldShifted)):
        errs.append("oracle 'manifold' needs ManifoldConcentrating or ManifoldShifted data")
    if cfg.oracle == "mt_consistency":
        if cfg.observable.kind != "twomicro":
            errs.append("oracle 'mt_consistency' compares a two-microlocal observable")
        elif cfg.observable.cutoff is None:
            errs.append("oracle 'mt_consistency' needs observable.cutoff = inner")
        if not any(fam.weak_limit(cp.location) is not None for cp in sym.critical_points()):
            errs.append("oracle 'mt_consistency' needs a non-zero weak limit at a critical point")
    if cfg.observable.kind == "smoothing":
        if not isinstance(fam, PlaneWaveModulated):
            errs.append("the smoothing probe uses PlaneWaveModulated data")
        elif np.linalg.norm(fam.xi0) == 0:
            errs.append("the smoothing probe needs a non-zero carrier")
    if not errs and cfg.eps:
        try:
            g = cfg.grid_for(min(cfg.eps))
            pot.check_grid(g)
        except ContractError as e:
            errs.append(f"grid at the smallest eps: {e}")
    if not pot.is_zero and cfg.window is not None:
        need = min_strang_steps(pot, cfg.window)
        if cfg.window.n_steps < need:
            errs.append(f"window.n_steps = {cfg.window.n_steps} violates dt * |V|_inf <= 0.1; use >= {need}")
    return errs


def load_config(path, overrides=()) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        flat = parse_text(fh.read())
    return build_config(apply_overrides(flat, overrides))


# -- execution ---------------------------------------------------------------------------

@dataclass
class Row:
    eps: float
    measured: float
    predicted: float | None
    runtime: float
    valid: bool = True
    guard: float = 0.0
    drift: float = 0.0
    n_steps: int = 0
    grid: tuple = ()
    citation: str = ""

    @property
    def gap(self) -> float | None:
        return None if self.predicted is None else abs(self.measured - self.predicted)


@dataclass
class ResultTable:
    rows: list
    has_oracle: bool
    config_hash: str = ""
    code_version: str = __version__
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        eps = [r.eps for r in self.rows]
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ContractError("rows must be ordered by decreasing eps")

    @property
    def all_valid(self) -> bool:
        return all(r.valid for r in self.rows)

    def header(self) -> list[str]:
        cols = ["epsilon", "measured"]
        if self.has_oracle:
            cols += ["predicted", "gap"]
        cols.append("runtime_s")
        if not self.all_valid:
            cols.append("status")
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.header())
        for r in self.rows:
            line = [fmt(r.eps), fmt(r.measured)]
            if self.has_oracle:
                line += [fmt(r.predicted), fmt(r.gap)]
            line.append(fmt(r.runtime))
            if not self.all_valid:
                line.append("VALID" if r.valid else "INVALID")
            w.writerow(line)
        return buf.getvalue()

    def metadata(self) -> dict:
        return {"config_hash": self.config_hash, "code_version": self.code_version,
                "rows": [{"epsilon": r.eps, "grid_L": list(r.grid[0]) if r.grid else None,
                          "grid_N": list(r.grid[1]) if r.grid else None, "n_steps": r.n_steps,
                          "guard_mass": r.guard, "mass_drift": r.drift, "valid": r.valid,
                          "citation": r.citation} for r in self.rows], **self.extra}

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())
        with open(str(path) + ".meta.json", "w", encoding="utf-8") as fh:
            json.dump(self.metadata(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def fmt(v) -> str:
    return "" if v is None else format(float(v), ".17g")


class Monitor:
    """Tracks boundary mass and mass drift along a streamed evolution."""

    def __init__(self, u0: Field, fraction: float, free: bool):
        self.n0 = l2_norm(u0)
        self.mask = u0.grid.guard_mask(fraction).astype(float)
        self.guard = 0.0
        self.drift = 0.0
        self.free = free

    def __call__(self, u: Field) -> None:
        self.guard = max(self.guard, mass(u, self.mask))
        self.drift = max(self.drift, abs(l2_norm(u) - self.n0) / self.n0)

    def drift_ok(self, n_steps: int) -> bool:
        tol = FREE_DRIFT_TOL if self.free else STRANG_DRIFT_TOL * n_steps
        # norms of large arrays carry sqrt(N) rounding on top of the propagator's
        return self.drift <= tol + 1e-15 * math.sqrt(self.mask.size)


def observable_func(cfg: ExperimentConfig, grid: Grid, eps: float) -> Callable[[Field], float]:
    ob = cfg.observable
    if ob.kind == "density":
        pv = np.broadcast_to(np.asarray(ob.phi(grid.x), dtype=float), grid.shape)
        return lambda u: mass(u, pv)
    if ob.kind == "twomicro":
        return lambda u: two_micro_expect(u, ob.symbol, eps).real
    raise ContractError(f"observable {ob.kind!r} is not a time average")


def oracle_value(cfg: ExperimentConfig, grid: Grid) -> PredictedLimit | None:
    ob = cfg.observable
    if cfg.oracle == "none":
        return None
    if cfg.oracle == "isolated":
        return predict_isolated(cfg.family, cfg.symbol, cfg.potential, ob.phi, cfg.window, grid)
    if cfg.oracle == "degenerate":
        return predict_degenerate(cfg.family, cfg.symbol, ob.phi, cfg.window, grid, cfg.potential)
    if cfg.oracle == "manifold":
        return predict_manifold(cfg.family, cfg.symbol, cfg.potential, ob.phi, cfg.window, grid)
    if cfg.oracle == "mt_consistency":
        val, ok = mt_consistency_rhs(cfg.family, cfg.symbol, cfg.potential, ob.bare, cfg.window,
                                     ob.cutoff.R, grid)
        return PredictedLimit(val, "profile_density",
                              "rank-one profile pairing with the eta cutoff at scale R", ok)
    raise ContractError(f"unknown oracle {cfg.oracle!r}")


def run_row(cfg: ExperimentConfig, eps: float) -> Row:
    t0 = time.perf_counter()
    grid = cfg.grid_for(eps)
    u0 = sample_data(cfg.family, eps, grid)
    mon = Monitor(u0, cfg.guard_fraction, cfg.potential.is_zero)
    obs = observable_func(cfg, grid, eps)

    def func(u):
        mon(u)
        return obs(u)

    val, win, _ = converged_average(lambda w: iter_evolve(u0, cfg.symbol, cfg.potential, eps, w), func,
                                    cfg.window)
    pred = oracle_value(cfg, grid)
    valid = mon.guard <= cfg.guard_max and mon.drift_ok(win.n_steps)
    runtime = time.perf_counter() - t0 if cfg.record_runtime else 0.0
    return Row(eps, float(val.real), None if pred is None else pred.value, runtime, valid, mon.guard,
               mon.drift, win.n_steps, (grid.L, grid.N), "" if pred is None else pred.citation)


def resolve_threads(flag: int | None = None) -> int:
    if flag:
        return max(1, int(flag))
    env = os.environ.get("SEMILAB_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise ContractError(f"SEMILAB_THREADS = {env!r} is not an integer")


def run_convergence(cfg: ExperimentConfig, threads: int | None = None) -> ResultTable:
    """One row per eps (decreasing); rows run concurrently, assembly keeps order."""
    if cfg.observable.kind == "smoothing":
        raise ContractError("use run_smoothing for the smoothing observable")
    n = resolve_threads(threads)
    if n > 1:
        set_fft_workers(1)
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(lambda e: run_row(cfg, e), cfg.eps))
    else:
        rows = [run_row(cfg, e) for e in cfg.eps]
    return ResultTable(rows, cfg.oracle != "none", cfg.hash, extra={"backend": _kernels.BACKEND})


def run_smoothing(cfg: ExperimentConfig):
    ob = cfg.observable
    return blowup_exponent(cfg.family, cfg.symbol, cfg.potential, ob.s, ob.delta, ob.ball, cfg.eps,
                           n_steps=cfg.window.n_steps, N=cfg.N)


def smoothing_csv(rep) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["epsilon", "S", "fitted_slope", "residual"])
    for e, s in zip(rep.eps, rep.S):
        w.writerow([fmt(e), fmt(s), fmt(rep.slope), fmt(rep.residual)])
    return buf.getvalue()


def catalog() -> dict[str, list[str]]:
    return {
        "symbols": list(SYMBOL_TAGS),
        "potentials": list(POTENTIAL_TAGS),
        "families": list(FAMILY_VARIANTS),
        "profiles": ["gaussian", "bump"],
        "factors": ["one", "bump", "product_bump", "smoothstep", "complement"],
        "observables": list(OBSERVABLES),
        "oracles": list(ORACLES),
    }
