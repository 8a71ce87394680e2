"""Periodic grids, fields and their discrete Fourier analysis.

The box is ``[-L_i, L_i)`` per axis with ``N_i`` points and the frequency
lattice is ``pi k / L_i``.  Transforms follow the continuous convention
``F(xi) = int f(x) exp(-i xi.x) dx`` with rectangle quadrature, and the
inverse carries the ``(2 pi)^-d`` factor, so Parseval reads
``||f||^2 = (2 pi)^-d sum |F|^2 dxi^d``.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.fft as sfft

from . import _kernels
from .symbols import ContractError

_FFT_WORKERS = 1


def set_fft_workers(n: int) -> None:
    global _FFT_WORKERS
    _FFT_WORKERS = max(1, int(n))


def fftn(a):
    return sfft.fftn(a, workers=_FFT_WORKERS)


def ifftn(a):
    return sfft.ifftn(a, workers=_FFT_WORKERS)


class GridMismatch(ContractError):
    pass


class UnderResolved(ContractError):
    def __init__(self, message, required_n=None):
        super().__init__(message)
        self.required_n = required_n


def next_pow2(n: float) -> int:
    return 1 << max(3, math.ceil(math.log2(max(n, 1.0))))


def min_points(L: float, k_max: float, margin: float = 1.5) -> int:
    """Smallest power of two whose Nyquist frequency covers ``margin * k_max``."""
    return next_pow2(margin * (2.0 * L / math.pi) * k_max)


@dataclass(frozen=True)
class Grid:
    L: tuple[float, ...]
    N: tuple[int, ...]

    def __post_init__(self):
        if len(self.L) != len(self.N) or len(self.L) not in (1, 2):
            raise ContractError("grids are 1- or 2-dimensional with one L and N per axis")
        for L, n in zip(self.L, self.N):
            if not L > 0:
                raise ContractError("L must be positive")
            if n < 8 or n & (n - 1):
                raise ContractError(f"N must be a power of two >= 8, got {n}")

    @classmethod
    def make(cls, L, N, d: int | None = None) -> "Grid":
        L = tuple(float(v) for v in np.atleast_1d(L))
        N = tuple(int(v) for v in np.atleast_1d(N))
        d = d or max(len(L), len(N))
        if len(L) == 1:
            L = L * d
        if len(N) == 1:
            N = N * d
        return cls(L, N)

    @property
    def d(self) -> int:
        return len(self.N)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.N

    @cached_property
    def spacing(self) -> np.ndarray:
        return np.array([2 * L / n for L, n in zip(self.L, self.N)])

    @cached_property
    def dk(self) -> np.ndarray:
        return np.array([math.pi / L for L in self.L])

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def dual_cell_volume(self) -> float:
        return float(np.prod(self.dk))

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(-L + (2 * L / n) * np.arange(n) for L, n in zip(self.L, self.N))

    @cached_property
    def k_axes(self) -> tuple[np.ndarray, ...]:
        """Frequency lattice per axis, in FFT order."""
        return tuple(2 * math.pi * np.fft.fftfreq(n, 2 * L / n) for L, n in zip(self.L, self.N))

    @cached_property
    def x(self) -> np.ndarray:
        """Coordinates, shape ``(d, *N)``."""
        return np.stack(np.meshgrid(*self.axes, indexing="ij"))

    @cached_property
    def k(self) -> np.ndarray:
        """Frequencies in FFT order, shape ``(d, *N)``."""
        return np.stack(np.meshgrid(*self.k_axes, indexing="ij"))

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(i k L) = (-1)^k relates the DFT to the box convention
        return np.exp(1j * np.einsum("i...,i->...", self.k, np.asarray(self.L)))

    @property
    def nyquist(self) -> np.ndarray:
        return np.array([math.pi * n / (2 * L) for L, n in zip(self.L, self.N)])

    def guard_mask(self, fraction: float = 0.9) -> np.ndarray:
        """Points in the outer band ``|x_i| > fraction * L_i`` on some axis."""
        mask = np.zeros(self.N, dtype=bool)
        for i, L in enumerate(self.L):
            mask |= np.abs(self.x[i]) > fraction * L
        return mask

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.N, dtype=complex))

    def sample(self, func: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return Field(self, np.asarray(func(self.x), dtype=complex))


@dataclass(frozen=True, eq=False)
class Field:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ContractError(f"values of shape {v.shape} do not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ContractError("field has non-finite entries")
        if v is self.values:
            v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def _same(self, other: "Field") -> None:
        if other.grid != self.grid:
            raise GridMismatch("fields live on different grids")

    def __add__(self, other: "Field") -> "Field":
        self._same(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._same(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c) -> "Field":
        return Field(self.grid, self.values * complex(c))

    __rmul__ = __mul__

    def norm(self) -> float:
        return l2_norm(self)

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


@dataclass(frozen=True, eq=False)
class FreqField:
    grid: Grid
    coefficients: np.ndarray  # FFT order, matches grid.k

    def shifted(self) -> np.ndarray:
        return np.fft.fftshift(self.coefficients)


def _check(f: Field, g: Field) -> None:
    if f.grid != g.grid:
        raise GridMismatch("fields live on different grids")


def to_frequency(f: Field) -> FreqField:
    g = f.grid
    return FreqField(g, g.cell_volume * g._phase * fftn(f.values))


def to_physical(F: FreqField) -> Field:
    g = F.grid
    return Field(g, ifftn(F.coefficients * np.conj(g._phase)) / g.cell_volume)


def evaluate_multiplier(grid: Grid, m) -> np.ndarray:
    """Multiplier values on the frequency lattice (FFT order)."""
    vals = m(grid.k) if callable(m) else m
    vals = np.broadcast_to(np.asarray(vals), grid.shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = tuple(int(i[0]) for i in np.nonzero(bad))
        xi = [float(grid.k[(a,) + idx]) for a in range(grid.d)]
        raise ContractError(f"multiplier is not finite at xi = {xi}")
    return vals


def apply_multiplier(f: Field, m) -> Field:
    """``m(D) f``, with ``m`` a callable of the frequency mesh or a lattice array."""
    vals = evaluate_multiplier(f.grid, m)
    return Field(f.grid, ifftn(vals * fftn(f.values)))


def fourier_interpolate(f: Field, shift) -> Field:
    """Band-limited values of ``f`` at every grid point translated by ``shift``."""
    s = np.broadcast_to(np.asarray(shift, dtype=float), (f.grid.d,))
    phase = np.exp(1j * np.einsum("i...,i->...", f.grid.k, s))
    return Field(f.grid, ifftn(phase * fftn(f.values)))


def smooth_cutoff(r):
    """chi(r): 1 for r <= 1, 0 for r >= 2, C-infinity monotone in between.

    Uses the standard transition ``g(2 - r) / (g(2 - r) + g(r - 1))`` with
    ``g(s) = exp(-1/s)`` for ``s > 0`` and ``g = 0`` otherwise.
    """
    r = np.abs(np.asarray(r, dtype=float))
    a = 2.0 - r
    b = r - 1.0
    ga = np.where(a > 0, np.exp(-1.0 / np.where(a > 0, a, 1.0)), 0.0)
    gb = np.where(b > 0, np.exp(-1.0 / np.where(b > 0, b, 1.0)), 0.0)
    return ga / (ga + gb)


def chi(eta):
    """Radial cutoff of a vector argument with components on the leading axis."""
    eta = np.asarray(eta, dtype=float)
    return smooth_cutoff(np.sqrt(np.sum(eta * eta, axis=0)))


def low_pass(f: Field, K: float, smooth: bool = False) -> Field:
    if K <= 0:
        raise ContractError("K must be positive")
    r = np.sqrt(np.sum(f.grid.k ** 2, axis=0))
    m = smooth_cutoff(r / K) if smooth else (r <= K).astype(float)
    return apply_multiplier(f, m)


def l2_norm(f: Field) -> float:
    return math.sqrt(_kernels.weighted_mass(f.values, np.ones(f.grid.shape)) * f.grid.cell_volume)


def mass(f: Field, weight=None) -> float:
    """``int weight |f|^2 dx`` by rectangle quadrature."""
    w = np.ones(f.grid.shape) if weight is None else np.broadcast_to(np.asarray(weight, dtype=float), f.grid.shape)
    return _kernels.weighted_mass(f.values, w) * f.grid.cell_volume


def inner(f: Field, g: Field) -> complex:
    """``(f, g) = int f conj(g) dx``."""
    _check(f, g)
    return complex(np.vdot(g.values, f.values) * f.grid.cell_volume)


def add(f: Field, g: Field) -> Field:
    return f + g


def scale(f: Field, c) -> Field:
    return f * c


def multiply_by_function(f: Field, func) -> Field:
    vals = func(f.grid.x) if callable(func) else func
    return Field(f.grid, f.values * np.broadcast_to(vals, f.grid.shape))


# -- binary format -----------------------------------------------------------
# header: d (int64), N_1..N_d (int64), L_1..L_d (float64), little endian;
# body: interleaved re/im float64, row-major over axes.

def encode_field(grid: Grid, values: np.ndarray) -> bytes:
    d = grid.d
    head = struct.pack(f"<q{d}q{d}d", d, *grid.N, *grid.L)
    body = np.ascontiguousarray(values, dtype="<c16").tobytes()
    return head + body


def dump_field(path, f: Field) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_field(f.grid, f.values))


def decode_field(data: bytes) -> Field:
    (d,) = struct.unpack_from("<q", data, 0)
    if d not in (1, 2):
        raise ContractError(f"bad field header: d = {d}")
    vals = struct.unpack_from(f"<{d}q{d}d", data, 8)
    N, L = vals[:d], vals[d:]
    off = 8 + 16 * d
    arr = np.frombuffer(data, dtype="<c16", offset=off)
    grid = Grid(tuple(float(v) for v in L), tuple(int(n) for n in N))
    if arr.size != int(np.prod(N)):
        raise ContractError("field body length does not match header")
    return Field(grid, arr.reshape(grid.shape).astype(complex))


def load_field(path) -> Field:
    with open(path, "rb") as fh:
        return decode_field(fh.read())


def grid_for(L: Sequence[float] | float, N: Sequence[int] | int, d: int | None = None) -> Grid:
    return Grid.make(L, N, d)


def guard_mass(f: Field, fraction: float = 0.9) -> float:
    """Mass in the outer band ``|x_i| > fraction * L_i``; wrap-around monitor."""
    return mass(f, f.grid.guard_mask(fraction).astype(float))
