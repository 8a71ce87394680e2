"""Phase-space observables.

Symbols are finite sums of products ``c * phi(x) psi(xi) rho(eta)`` with
``eta = (xi'' - xi0'') / eps`` the two-microlocal variable.  Such a product
is quantized by the symmetrized rule

    1/2 [ m(D) o phi(x) + phi(x) o m(D) ],   m(k) = psi(eps k) rho(k'' - xi0''/eps),

which agrees with the Weyl quantization up to ``O(eps)`` in operator norm
(``O(eps^2)`` on pairings with real symbols) and is uniformly bounded in eps.
In one dimension the Weyl pairing is also available through the Wigner
distribution.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace
from typing import Callable, Iterable

import numpy as np
import scipy.fft as sfft

from . import _kernels
from . import grid as _grid
from .grid import (Field, Grid, UnderResolved, fftn, fourier_interpolate, ifftn, inner, smooth_cutoff)
from .symbols import ContractError

# -- factors ---------------------------------------------------------------------
# A factor maps an array z of shape (n, ...) to values of shape z.shape[1:].
# ``axes`` picks the components it reads; ``scale`` is the smallest feature
# size (used for resolution checks) and ``ray_radius`` the radius beyond which
# the factor is constant along rays (None if it is not).


def _pick(z, axes):
    z = np.asarray(z, dtype=float)
    return z if axes is None else z[list(axes)]


@dataclass(frozen=True)
class One:
    scale: float = math.inf
    ray_radius: float = 0.0
    sup: float = 1.0

    def __call__(self, z):
        return np.ones(np.shape(z)[1:])


@dataclass(frozen=True)
class Bump:
    """``chi(|z - center| / width)``: 1 on the ball of radius ``width``, 0 beyond ``2 width``."""

    width: float = 1.0
    center: tuple = (0.0,)
    axes: tuple | None = None
    sup: float = 1.0

    @property
    def scale(self):
        return self.width

    @property
    def ray_radius(self):
        return 2.0 * self.width + float(np.linalg.norm(self.center))

    def __call__(self, z):
        z = _pick(z, self.axes)
        c = np.asarray(self.center, dtype=float).reshape((-1,) + (1,) * (z.ndim - 1))
        return smooth_cutoff(np.sqrt(np.sum((z - c) ** 2, axis=0)) / self.width)


@dataclass(frozen=True)
class Complement:
    """``1 - chi(|z - center| / width)``."""

    width: float = 1.0
    center: tuple = (0.0,)
    axes: tuple | None = None
    sup: float = 1.0

    @property
    def scale(self):
        return self.width

    @property
    def ray_radius(self):
        return 2.0 * self.width + float(np.linalg.norm(self.center))

    def __call__(self, z):
        return 1.0 - Bump(self.width, self.center, self.axes)(z)


@dataclass(frozen=True)
class SmoothStep:
    """One-dimensional step: 0 for ``z <= -R0``, 1 for ``z >= R0``, smooth between."""

    R0: float = 1.0
    axis: int = 0
    sup: float = 1.0

    @property
    def scale(self):
        return self.R0

    @property
    def ray_radius(self):
        return self.R0

    def __call__(self, z):
        return _step(np.asarray(z, dtype=float)[self.axis] / self.R0)


def _step(s):
    # g(s + 1) / (g(s + 1) + g(1 - s)) with g(u) = exp(-1/u) on u > 0
    a = np.where(s + 1 > 0, np.exp(-1.0 / np.where(s + 1 > 0, s + 1, 1.0)), 0.0)
    b = np.where(1 - s > 0, np.exp(-1.0 / np.where(1 - s > 0, 1 - s, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class HalfSpace:
    """Indicator of ``sign * z[axis] > 0``.

    Discontinuous at 0; only meaningful multiplied by a factor vanishing near
    ``z = 0`` (an outer cutoff), where the product is smooth.
    """

    sign: int = 1
    axis: int = 0
    scale: float = math.inf
    ray_radius: float = 0.0
    sup: float = 1.0

    def __call__(self, z):
        return (self.sign * np.asarray(z, dtype=float)[self.axis] > 0).astype(float)


@dataclass(frozen=True)
class Shifted:
    """``factor(z + offset)``."""

    factor: object
    offset: tuple

    @property
    def scale(self):
        return self.factor.scale

    @property
    def ray_radius(self):
        r = self.factor.ray_radius
        return None if r is None else r + float(np.linalg.norm(self.offset))

    @property
    def sup(self):
        return self.factor.sup

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        o = np.asarray(self.offset, dtype=float).reshape((-1,) + (1,) * (z.ndim - 1))
        return self.factor(z + o)


@dataclass(frozen=True)
class Product:
    factors: tuple

    @property
    def scale(self):
        return min(f.scale for f in self.factors)

    @property
    def ray_radius(self):
        rs = [f.ray_radius for f in self.factors]
        return None if any(r is None for r in rs) else max(rs)

    @property
    def sup(self):
        return float(np.prod([f.sup for f in self.factors]))

    def __call__(self, z):
        out = self.factors[0](z)
        for f in self.factors[1:]:
            out = out * f(z)
        return out


@dataclass(frozen=True)
class Function:
    """Arbitrary vectorized callable with declared bounds."""

    func: Callable
    sup: float
    scale: float = 1.0
    ray_radius: float | None = None

    def __call__(self, z):
        return self.func(np.asarray(z, dtype=float))


def times(*factors):
    flat = []
    for f in factors:
        if isinstance(f, One):
            continue
        flat.extend(f.factors if isinstance(f, Product) else [f])
    if not flat:
        return One()
    return flat[0] if len(flat) == 1 else Product(tuple(flat))


# -- symbols ---------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    phi: object = One()
    psi: object = One()
    rho: object = One()
    coef: complex = 1.0


@dataclass(frozen=True)
class TwoMicroSymbol:
    """``sum_j c_j phi_j(x) psi_j(xi) rho_j(eta)`` with the split ``xi = (xi', xi'')``.

    ``r + p = d``; ``xi0pp`` is the base point ``xi0''`` of the manifold
    ``{xi'' = xi0''}`` around which ``eta`` is blown up.
    """

    terms: tuple
    d: int = 1
    r: int = 0
    xi0pp: tuple = (0.0,)

    def __post_init__(self):
        if self.r < 0 or self.r >= self.d:
            raise ContractError("need 0 <= r < d")
        if len(self.xi0pp) != self.p:
            raise ContractError(f"xi0'' must have p = {self.p} components")

    @property
    def p(self) -> int:
        return self.d - self.r

    @property
    def eta_free(self) -> bool:
        return all(isinstance(t.rho, One) for t in self.terms)

    @property
    def sup(self) -> float:
        return float(sum(abs(t.coef) * t.phi.sup * t.psi.sup * t.rho.sup for t in self.terms))

    def in_class(self) -> bool:
        """Each eta factor is constant along rays outside some ball."""
        return all(t.rho.ray_radius is not None for t in self.terms)

    def __add__(self, other: "TwoMicroSymbol") -> "TwoMicroSymbol":
        self._same(other)
        return replace(self, terms=self.terms + other.terms)

    def __mul__(self, c) -> "TwoMicroSymbol":
        return replace(self, terms=tuple(replace(t, coef=t.coef * c) for t in self.terms))

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1.0) * other

    def _same(self, other):
        if (self.d, self.r, tuple(self.xi0pp)) != (other.d, other.r, tuple(other.xi0pp)):
            raise ContractError("symbols use different manifold splits")

    def evaluate(self, x, xi, eta) -> np.ndarray:
        """Pointwise value on broadcastable arrays with leading component axes."""
        out = 0.0
        for t in self.terms:
            out = out + t.coef * t.phi(x) * t.psi(xi) * t.rho(eta)
        return out


def symbol(phi=None, psi=None, rho=None, coef=1.0, d=1, r=0, xi0pp=None) -> TwoMicroSymbol:
    xi0pp = (0.0,) * (d - r) if xi0pp is None else tuple(np.atleast_1d(np.asarray(xi0pp, dtype=float)))
    return TwoMicroSymbol((Term(phi or One(), psi or One(), rho or One(), coef),), d, r, xi0pp)


@dataclass(frozen=True)
class CutoffParams:
    R: float = 4.0
    delta: float = 0.5

    def __post_init__(self):
        if self.R < 1 or not self.delta > 0:
            raise ContractError("need R >= 1 and delta > 0")


def apply_cutoffs(a: TwoMicroSymbol, c: CutoffParams, which: str) -> TwoMicroSymbol:
    """Multiply by ``chi((xi'' - xi0'')/delta)`` and by ``1 - chi(eta/R)`` (outer) or ``chi(eta/R)`` (inner)."""
    if which not in ("outer", "inner"):
        raise ContractError("which must be 'outer' or 'inner'")
    axes = tuple(range(a.r, a.d))
    near = Bump(c.delta, tuple(a.xi0pp), axes)
    ring = Complement(c.R, (0.0,) * a.p) if which == "outer" else Bump(c.R, (0.0,) * a.p)
    terms = tuple(replace(t, psi=times(t.psi, near), rho=times(t.rho, ring)) for t in a.terms)
    return replace(a, terms=terms)


def compose_flow_1d(a: TwoMicroSymbol, H: float, s: float) -> TwoMicroSymbol:
    """``a(x + s H eta/|eta|, xi, eta)`` for d = 1 symbols supported away from ``eta = 0``.

    Each term splits over the two half-lines of ``eta``, where the shift is
    the constant ``+-s H``.
    """
    if a.d != 1:
        raise ContractError("flow composition is implemented in one dimension")
    terms = []
    for t in a.terms:
        for sign in (1, -1):
            terms.append(replace(t, phi=Shifted(t.phi, (sign * s * H,)),
                                 rho=times(t.rho, HalfSpace(sign))))
    return replace(a, terms=tuple(terms))


# -- Wigner distribution ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WignerSlice:
    """``W(x_j, xi_k)`` on the position grid times ``xi_k = eps pi k / L``, k centered."""

    x: np.ndarray
    xi: np.ndarray
    W: np.ndarray
    eps: float
    grid: Grid
    imag_residue: float = 0.0

    @property
    def dx(self) -> float:
        return float(self.grid.spacing[0])

    @property
    def dxi(self) -> float:
        return self.eps * math.pi / self.grid.L[0]

    def position_marginal(self) -> np.ndarray:
        return self.W.sum(axis=1) * self.dxi

    def momentum_marginal(self) -> np.ndarray:
        return self.W.sum(axis=0) * self.dx

    def pair(self, func) -> float:
        """``int int a(x, xi) W dx dxi``."""
        X, XI = np.meshgrid(self.x, self.xi, indexing="ij")
        return float(np.sum(func(X, XI) * self.W) * self.dx * self.dxi)

    def dump(self, path) -> None:
        """Field binary format with a two-axis header ``(x, xi)``."""
        n = self.W.shape[0]
        head = struct.pack("<q2q2d", 2, n, n, self.grid.L[0], float(-self.xi[0]))
        with open(path, "wb") as fh:
            fh.write(head + np.ascontiguousarray(self.W, dtype="<c16").tobytes())


def wigner_transform(f: Field, eps: float) -> WignerSlice:
    """``W(x, xi) = (2 pi)^-1 int f(x - eps v/2) conj f(x + eps v/2) e^{i v xi} dv``.

    Separations ``m h`` with odd ``m`` use the band-limited half-cell shift
    of ``f``; the sum over one period of ``m`` makes both marginals exact.
    """
    if f.grid.d != 1:
        raise ContractError("Wigner slices are one-dimensional")
    if not eps > 0:
        raise ContractError("eps must be positive")
    g = f.grid
    n = g.N[0]
    h = float(g.spacing[0])
    f_half = fourier_interpolate(f, h / 2).values
    G = _kernels.wigner_correlation(np.ascontiguousarray(f.values), np.ascontiguousarray(f_half))
    S = n * sfft.ifft(G, axis=1, workers=_grid._FFT_WORKERS)
    W = np.fft.fftshift(S, axes=1) * (h / (2 * math.pi * eps))
    scale = max(float(np.max(np.abs(W))), 1e-300)
    residue = float(np.max(np.abs(W.imag))) / scale
    xi = eps * math.pi / g.L[0] * np.arange(-n // 2, n // 2)
    return WignerSlice(g.axes[0], xi, np.ascontiguousarray(W.real), eps, g, residue)


# -- pairings -----------------------------------------------------------------------

def _multiplier(grid: Grid, t: Term, a: TwoMicroSymbol, eps: float) -> np.ndarray:
    k = grid.k
    xi = eps * k
    m = np.broadcast_to(t.psi(xi), grid.shape)
    if not isinstance(t.rho, One):
        base = np.asarray(a.xi0pp, dtype=float).reshape((-1,) + (1,) * grid.d)
        eta = k[a.r:] - base / eps
        m = m * t.rho(eta)
    return m


def _check_resolution(grid: Grid, a: TwoMicroSymbol, eps: float) -> None:
    if grid.d != a.d:
        raise ContractError(f"symbol dimension {a.d} does not match grid dimension {grid.d}")
    for t in a.terms:
        if isinstance(t.rho, One):
            continue
        for i in range(a.r, a.d):
            if grid.dk[i] > t.rho.scale / 4:
                # same spacing in x on a box long enough for the eta factor
                need = int(2 ** math.ceil(math.log2(grid.N[i] * grid.dk[i] * 4 / t.rho.scale)))
                raise UnderResolved(f"eta factor of scale {t.rho.scale} needs frequency spacing <= "
                                    f"{t.rho.scale / 4:.3g}; enlarge L on axis {i}", need)
        for i, xb in enumerate(a.xi0pp):
            if abs(xb) / eps > grid.nyquist[a.r + i]:
                raise UnderResolved(f"xi0''/eps = {xb / eps:.3g} lies beyond the Nyquist frequency on axis {a.r + i}")


def _apply_term(f: Field, t: Term, a: TwoMicroSymbol, eps: float) -> np.ndarray:
    m = _multiplier(f.grid, t, a, eps)
    ph = np.broadcast_to(t.phi(f.grid.x), f.grid.shape)
    u = f.values
    return 0.5 * (ifftn(m * fftn(ph * u)) + ph * ifftn(m * fftn(u)))


def apply_symbol(f: Field, a: TwoMicroSymbol, eps: float) -> Field:
    """``op_eps^#(a) f`` under the symmetrized product rule."""
    _check_resolution(f.grid, a, eps)
    out = np.zeros(f.grid.shape, dtype=complex)
    for t in a.terms:
        out += t.coef * _apply_term(f, t, a, eps)
    return Field(f.grid, out)


def two_micro_expect(f: Field, a: TwoMicroSymbol, eps: float) -> complex:
    """``(op_eps^#(a) f, f)``."""
    if not eps > 0:
        raise ContractError("eps must be positive")
    return inner(apply_symbol(f, a, eps), f)


def expect_op(f: Field, a: TwoMicroSymbol, eps: float, route: str = "symmetrized") -> complex:
    """``(op_eps(a) f, f)`` for symbols without eta dependence.

    ``route="wigner"`` (d = 1) integrates ``a`` against the Wigner
    distribution, i.e. the exact Weyl pairing on the grid.
    """
    if not a.eta_free:
        raise ContractError("expect_op takes symbols independent of eta; use two_micro_expect")
    if route == "symmetrized":
        return two_micro_expect(f, a, eps)
    if route != "wigner":
        raise ContractError("route must be 'symmetrized' or 'wigner'")
    w = wigner_transform(f, eps)
    return complex(w.pair(lambda X, XI: a.evaluate(X[None], XI[None], np.zeros((1,) + X.shape))))


def _window_weights(times: np.ndarray, w) -> np.ndarray:
    # trapezoid weights times the window function
    dt = np.diff(times)
    q = np.zeros_like(times)
    q[:-1] += dt / 2
    q[1:] += dt / 2
    return q * w.weight(times)


def time_average(snaps: Iterable, func: Callable[[Field], complex], w) -> complex:
    """Trapezoid quadrature of ``Xi(t) func(u(t))`` over the snapshots, streaming."""
    times, vals = [], []
    for t, u in snaps:
        times.append(float(t))
        vals.append(func(u))
    times = np.asarray(times)
    if len(times) < 2:
        raise ContractError("need at least two snapshots")
    if times[0] > w.a + 1e-12 or times[-1] < w.b - 1e-12:
        raise ContractError(f"window [{w.a}, {w.b}] exceeds the snapshot range [{times[0]}, {times[-1]}]")
    return complex(np.dot(_window_weights(times, w), np.asarray(vals)))


def time_averaged_functional(snaps: Iterable, a: TwoMicroSymbol, w, eps: float) -> complex:
    """``I^eps(a, Xi) = int Xi(t) (op_eps^#(a) u(t), u(t)) dt``."""
    return time_average(snaps, lambda u: two_micro_expect(u, a, eps), w)


def converged_average(run: Callable, func: Callable[[Field], complex], w, rtol: float = 1e-3,
                      max_refine: int = 6):
    """Window average with snapshot refinement.

    ``run(window)`` yields ``(t, u)`` at every step of ``window``.  The step
    count doubles until dropping every other snapshot changes the trapezoid
    value by less than ``rtol`` (relative).  Returns ``(value, window, change)``.
    """
    from .propagator import TimeWindow
    win = TimeWindow(w.a, w.b, w.n_steps + (w.n_steps % 2), 1, w.smooth)
    for _ in range(max_refine + 1):
        times, vals = [], []
        for t, u in run(win):
            times.append(float(t))
            vals.append(func(u))
        times = np.asarray(times)
        vals = np.asarray(vals)
        full = complex(np.dot(_window_weights(times, win), vals))
        half = complex(np.dot(_window_weights(times[::2], win), vals[::2]))
        change = abs(full - half) / max(abs(full), 1e-300)
        if change < rtol or abs(full - half) < 1e-14:
            return full, win, change
        win = win.refined()
    return full, win, change
