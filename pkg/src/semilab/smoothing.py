"""Local smoothing quantity ``S(eps) = int_0^delta || |D|^s u(t) ||^2_{L^2(B)} dt`` along eps sweeps."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .grid import Field, fftn, ifftn, mass
from .initial_data import DataFamily, PlaneWaveModulated, auto_grid, sample_data
from .propagator import TimeWindow, iter_evolve
from .symbols import ContractError, PotentialSpec, SymbolSpec, classify_critical
from .wigner import converged_average


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def indicator(self, grid) -> np.ndarray:
        c = np.asarray(self.center, dtype=float).reshape((-1,) + (1,) * grid.d)
        return (np.sqrt(np.sum((grid.x - c) ** 2, axis=0)) <= self.radius).astype(float)

    def check(self, grid) -> None:
        c = np.broadcast_to(np.asarray(self.center, dtype=float), (grid.d,))
        if self.radius <= 0:
            raise ContractError("ball radius must be positive")
        for ci, L in zip(c, grid.L):
            if abs(ci) + self.radius >= L:
                raise ContractError(f"ball {self} touches the periodic boundary of [-{L}, {L})")


def _local_norm(u: Field, s: float, ind: np.ndarray) -> float:
    if s == 0:
        return mass(u, ind)
    k = np.sqrt(np.sum(u.grid.k ** 2, axis=0))
    v = Field(u.grid, ifftn(k ** s * fftn(u.values)))
    return mass(v, ind)


def smoothing_norm(snaps: Iterable, s: float, B: Ball, delta: float) -> float:
    """Trapezoid value of ``int_0^delta || |D|^s u ||^2_{L^2(B)} dt`` over the snapshots in ``[0, delta]``."""
    if s < 0:
        raise ContractError("s must be non-negative")
    times, vals = [], []
    ind = None
    for t, u in snaps:
        if t > delta + 1e-12:
            break
        if ind is None:
            B.check(u.grid)
            ind = B.indicator(u.grid)
        times.append(float(t))
        vals.append(_local_norm(u, s, ind))
    if not times or abs(times[0]) > 1e-12 or times[-1] < delta - 1e-12:
        raise ContractError(f"snapshots must cover [0, {delta}]")
    return float(np.trapezoid(vals, times))


@dataclass
class SmoothingReport:
    eps: list
    S: list
    s: float
    delta: float
    ball: Ball
    slope: float | None = None
    residual: float | None = None
    grids: list = field(default_factory=list)

    def __post_init__(self):
        if any(v < 0 for v in self.S):
            raise ContractError("S must be non-negative")


def fit_slope(eps: Sequence[float], S: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope of ``log S`` against ``log eps`` and the RMS residual."""
    x = np.log(np.asarray(eps, dtype=float))
    y = np.log(np.asarray(S, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(res ** 2)))


def blowup_exponent(fam: DataFamily, sym: SymbolSpec, V: PotentialSpec, s: float, delta: float, B: Ball,
                    eps_list: Sequence[float], n_steps: int = 200, require_critical: bool = True,
                    N=None) -> SmoothingReport:
    """``S(eps)`` for plane-wave data at a nonzero carrier and the fitted log-log slope."""
    if len(eps_list) < 2:
        raise ContractError("need at least two eps values")
    if not isinstance(fam, PlaneWaveModulated):
        raise ContractError("the smoothing probe uses PlaneWaveModulated data")
    if np.linalg.norm(fam.xi0) == 0:
        raise ContractError("the carrier must be non-zero")
    if require_critical and classify_critical(sym, fam.xi0).kind == "not_critical":
        raise ContractError(f"carrier {fam.xi0.tolist()} is not a critical point of {sym.name}")
    w = TimeWindow(0.0, delta, n_steps)
    Svals, grids = [], []
    extent = np.abs(np.broadcast_to(np.asarray(B.center, dtype=float), (fam.dimension,))) + B.radius
    for eps in eps_list:
        g = auto_grid(fam, eps, sym, V, T=delta, extent=extent, N=N)
        u0 = sample_data(fam, eps, g)
        B.check(g)
        ind = B.indicator(g)
        val, _, _ = converged_average(lambda win: iter_evolve(u0, sym, V, eps, win),
                                      lambda u: _local_norm(u, s, ind), w)
        Svals.append(float(val.real))
        grids.append(g)
    rep = SmoothingReport(list(eps_list), Svals, s, delta, B, grids=grids)
    span = max(eps_list) / min(eps_list)
    if len(eps_list) >= 4 and span >= 10 - 1e-9 and min(Svals) > 0:
        rep.slope, rep.residual = fit_slope(eps_list, Svals)
    elif min(Svals) > 0:
        _, rep.residual = fit_slope(eps_list, Svals)
    return rep
