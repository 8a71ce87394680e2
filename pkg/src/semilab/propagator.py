"""Time evolution for ``i eps^2 d_t u = lambda(eps D) u + eps^2 V u``.

Dividing by ``eps^2`` the kinetic phase is ``lambda(eps k) / eps^2`` and the
potential phase is ``V``, independent of ``eps``.  All flows use the
``exp(-i t A)`` sign for ``i d_t u = A u``.

The ``iter_*`` functions are generators of ``(t, Field)`` pairs; the
``*_evolve`` wrappers collect them into an :class:`EvolutionResult`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import _kernels
from .grid import Field, Grid, fftn, ifftn, l2_norm, mass, smooth_cutoff
from .symbols import (AffineManifold, ContractError, PotentialSpec, SymbolSpec, builtin_potential,
                      quadratic_form)

FREE_DRIFT_TOL = 1e-13
STRANG_DRIFT_TOL = 1e-10
MAX_DT_V = 0.1


class StepSizeError(ContractError):
    def __init__(self, message, min_steps):
        super().__init__(message)
        self.min_steps = min_steps


@dataclass(frozen=True)
class TimeWindow:
    """Averaging window ``[a, b]`` sampled at ``n_steps + 1`` equispaced times.

    ``stride`` keeps every ``stride``-th sample as a snapshot.  ``smooth``
    swaps the indicator of ``[a, b]`` for a smooth bump equal to one on the
    middle half of the window.
    """

    a: float
    b: float
    n_steps: int
    stride: int = 1
    smooth: bool = False

    def __post_init__(self):
        if not self.a < self.b:
            raise ContractError("time window needs a < b")
        if self.n_steps < 1 or self.stride < 1:
            raise ContractError("n_steps and stride must be positive")

    @property
    def dt(self) -> float:
        return (self.b - self.a) / self.n_steps

    def times(self) -> np.ndarray:
        t = self.a + self.dt * np.arange(self.n_steps + 1)
        t[-1] = self.b
        return t

    def snapshot_times(self) -> np.ndarray:
        t = self.times()
        keep = np.arange(0, self.n_steps + 1, self.stride)
        if keep[-1] != self.n_steps:
            keep = np.append(keep, self.n_steps)
        return t[keep]

    def weight(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        inside = (t >= self.a - 1e-12) & (t <= self.b + 1e-12)
        if not self.smooth:
            return inside.astype(float)
        mid = 0.5 * (self.a + self.b)
        half = 0.25 * (self.b - self.a)
        return np.where(inside, smooth_cutoff((t - mid) / half), 0.0)

    def refined(self) -> "TimeWindow":
        return TimeWindow(self.a, self.b, 2 * self.n_steps, self.stride, self.smooth)

    def integral(self) -> float:
        """``int Xi(t) dt``."""
        if not self.smooth:
            return self.b - self.a
        t = np.linspace(self.a, self.b, 20001)
        return float(np.trapezoid(self.weight(t), t))


@dataclass
class EvolutionResult:
    times: np.ndarray
    states: list
    method: str
    drift: list = field(default_factory=list)  # relative mass change per step

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states):
            raise ContractError("one state per snapshot time")
        if np.any(np.diff(self.times) <= 0):
            raise ContractError("snapshot times must increase strictly")

    def __iter__(self):
        return iter(zip(self.times, self.states))

    def __len__(self):
        return len(self.states)

    @property
    def max_drift(self) -> float:
        return max(self.drift, default=0.0)


def kinetic_phase(sym: SymbolSpec, eps: float, grid: Grid) -> np.ndarray:
    """``lambda(eps k) / eps^2`` on the frequency lattice."""
    if not eps > 0:
        raise ContractError("eps must be positive")
    if sym.dimension != grid.d:
        raise ContractError(f"symbol dimension {sym.dimension} does not match grid dimension {grid.d}")
    return np.ascontiguousarray(sym.func(eps * grid.k) / eps ** 2, dtype=float)


def _collect(it: Iterable, method: str, n0: float) -> EvolutionResult:
    times, states, drift = [], [], []
    prev = n0
    for t, u in it:
        times.append(t)
        states.append(u)
        nrm = l2_norm(u)
        drift.append(abs(nrm - prev) / n0 if n0 > 0 else 0.0)
        prev = nrm
    return EvolutionResult(np.array(times), states, method, drift)


def iter_free(u0: Field, sym: SymbolSpec, eps: float, w: TimeWindow,
              times: Iterable[float] | None = None) -> Iterator[tuple[float, Field]]:
    """Exact snapshots ``exp(-i t lambda(eps D)/eps^2) u0``, one multiplier each."""
    omega = kinetic_phase(sym, eps, u0.grid)
    U0 = fftn(u0.values)
    for t in (w.snapshot_times() if times is None else times):
        yield float(t), Field(u0.grid, ifftn(_kernels.phase_rotate(U0, omega, float(t))))


def free_evolve(u0: Field, sym: SymbolSpec, eps: float, w: TimeWindow) -> EvolutionResult:
    return _collect(iter_free(u0, sym, eps, w), "exact_free", l2_norm(u0))


def min_strang_steps(V: PotentialSpec, w: TimeWindow) -> int:
    if V.sup_norm == 0:
        return 1
    return math.ceil((w.b - w.a) * V.sup_norm / MAX_DT_V - 1e-12)


def iter_strang(u0: Field, sym: SymbolSpec, V: PotentialSpec, eps: float, w: TimeWindow,
                ) -> Iterator[tuple[float, Field]]:
    """Strang splitting ``e^{-i dt V/2} e^{-i dt lambda(eps D)/eps^2} e^{-i dt V/2}``.

    The step is ``w.dt``; when ``w.a > 0`` the solution is first carried to
    ``a`` with equal substeps no longer than ``w.dt``.
    """
    dt = w.dt
    if dt * V.sup_norm > MAX_DT_V + 1e-12:
        need = min_strang_steps(V, w)
        raise StepSizeError(
            f"dt * |V|_inf = {dt * V.sup_norm:.3g} exceeds {MAX_DT_V}; use n_steps >= {need}", need)
    grid = u0.grid
    V.check_grid(grid)
    omega = kinetic_phase(sym, eps, grid)
    vx = np.ascontiguousarray(V.func(grid.x) * np.ones(grid.shape), dtype=float)

    def step(u, h):
        u = _kernels.phase_rotate(u, vx, 0.5 * h)
        u = ifftn(_kernels.phase_rotate(fftn(u), omega, h))
        return _kernels.phase_rotate(u, vx, 0.5 * h)

    u = np.array(u0.values)
    if w.a > 0:
        n_pre = math.ceil(w.a / dt - 1e-9)
        h = w.a / n_pre
        for _ in range(n_pre):
            u = step(u, h)
    elif w.a < 0:
        raise ContractError("Strang evolution starts at t = 0; window must have a >= 0")
    times = w.times()
    yield float(times[0]), Field(grid, u)
    for i in range(1, w.n_steps + 1):
        u = step(u, dt)
        if i % w.stride == 0 or i == w.n_steps:
            yield float(times[i]), Field(grid, u)


def strang_evolve(u0: Field, sym: SymbolSpec, V: PotentialSpec, eps: float, w: TimeWindow,
                  ) -> EvolutionResult:
    return _collect(iter_strang(u0, sym, V, eps, w), "strang", l2_norm(u0))


def iter_evolve(u0: Field, sym: SymbolSpec, V: PotentialSpec, eps: float, w: TimeWindow,
                ) -> Iterator[tuple[float, Field]]:
    """Exact multipliers when ``V = 0``, Strang otherwise."""
    if V.is_zero:
        return iter_free(u0, sym, eps, w)
    return iter_strang(u0, sym, V, eps, w)


def evolve(u0: Field, sym: SymbolSpec, V: PotentialSpec, eps: float, w: TimeWindow) -> EvolutionResult:
    if V.is_zero:
        return free_evolve(u0, sym, eps, w)
    return strang_evolve(u0, sym, V, eps, w)


def iter_profile(theta0: Field, H, V: PotentialSpec, w: TimeWindow) -> Iterator[tuple[float, Field]]:
    """``i d_t u = 1/2 H D.D u + V u`` (the effective profile equation)."""
    sym = quadratic_form(H)
    if sym.dimension != theta0.grid.d:
        raise ContractError("H does not match the grid dimension")
    return iter_evolve(theta0, sym, V, 1.0, w)


def profile_evolve(theta0: Field, H, V: PotentialSpec, w: TimeWindow) -> EvolutionResult:
    sym = quadratic_form(H)
    if sym.dimension != theta0.grid.d:
        raise ContractError("H does not match the grid dimension")
    return evolve(theta0, sym, V, 1.0, w)


def _fibre_problem(theta0: Field, sym: SymbolSpec, x_prime, xi_prime, V: PotentialSpec):
    cs = sym.critical_set
    if not isinstance(cs, AffineManifold):
        raise ContractError(f"symbol {sym.name!r} has no affine critical manifold")
    if theta0.grid.d != cs.p:
        raise ContractError(f"fibre grid must be {cs.p}-dimensional")
    h = sym.manifold_hessian(np.atleast_1d(xi_prime)) if cs.r else sym.hess(cs.base)
    if V.is_zero:
        v_slice = builtin_potential("zero", cs.p)
    else:
        v_slice = V.restrict(np.atleast_1d(x_prime)) if cs.r else V
    return h, v_slice


def iter_heisenberg_rank1(theta0: Field, sym: SymbolSpec, x_prime, xi_prime, V: PotentialSpec,
                          w: TimeWindow) -> Iterator[tuple[float, Field]]:
    h, v_slice = _fibre_problem(theta0, sym, x_prime, xi_prime, V)
    return iter_profile(theta0, h, v_slice, w)


def heisenberg_rank1_evolve(theta0: Field, sym: SymbolSpec, x_prime, xi_prime,
                            V: PotentialSpec, w: TimeWindow) -> EvolutionResult:
    """Rank-one solution ``M_t = |theta(t)><theta(t)|`` of the Heisenberg equation.

    ``theta`` lives on the ``p``-dimensional fibre grid and solves
    ``i d_t theta = 1/2 H'' D_y.D_y theta + V(x', y) theta`` with ``H''`` the
    ``xi''`` block of the Hessian on the critical manifold at ``xi'``.  The
    generator is self-adjoint, so the projector onto ``theta(t)`` solves the
    operator equation and keeps unit trace.
    """
    h, v_slice = _fibre_problem(theta0, sym, x_prime, xi_prime, V)
    return profile_evolve(theta0, h, v_slice, w)


def rank_one_trace(theta: Field, weight) -> float:
    """``Tr[m_phi |theta><theta|] = int phi(y) |theta(y)|^2 dy``."""
    return mass(theta, weight(theta.grid.x) if callable(weight) else weight)
