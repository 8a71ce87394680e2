"""Families of eps-dependent initial data and their analytic weak limits.

Every family is built from :class:`Profile` objects (normalized Gaussians or
smooth plateau bumps) so norms, overlaps and spectral extents are known in
closed form or by a one-dimensional radial quadrature.  Coordinates follow the
grid convention: ``x`` has the component axis first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .grid import (Field, Grid, UnderResolved, apply_multiplier, chi, fftn, min_points, next_pow2,
                   smooth_cutoff)
from .symbols import AffineManifold, ContractError, PotentialSpec, SymbolSpec, classify_critical

# mass beyond these radii is below ~1e-15
_GAUSS_X = 6.0
_GAUSS_K = 6.0
_BUMP_K = 40.0
# fraction of a band's spectral radius that must stay inside the box; the
# Gaussian mass beyond 4 widths (2/3 of 6) is ~1e-8, below the guard threshold
_VELOCITY_FRACTION = 2.0 / 3.0


def _vec(v, d: int) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.size == 1 and d > 1:
        v = np.full(d, v[0])
    if v.shape != (d,):
        raise ContractError(f"expected {d} components, got {v.size}")
    return v


def _col(v: np.ndarray, ndim: int) -> np.ndarray:
    return v.reshape((-1,) + (1,) * (ndim - 1))


@dataclass(frozen=True, eq=False)
class Profile:
    """``amplitude`` times a unit-norm shape on R^d.

    ``gaussian``: ``(pi w^2)^(-d/4) exp(-|x-c|^2 / (2 w^2))``.
    ``bump``: ``chi(|x-c| / w)`` scaled to unit norm; equal to a constant on
    the ball of radius ``w`` and supported in radius ``2 w``.
    """

    kind: str
    dimension: int = 1
    width: float = 1.0
    center: tuple = ()
    amplitude: complex = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "bump"):
            raise ContractError(f"unknown profile kind {self.kind!r}")
        if not self.width > 0:
            raise ContractError("profile width must be positive")
        c = _vec(self.center if len(self.center) else 0.0, self.dimension)
        object.__setattr__(self, "center", tuple(c))

    @cached_property
    def _c(self) -> np.ndarray:
        return np.asarray(self.center)

    @cached_property
    def _bump_norm2(self) -> float:
        # int chi(|x|)^2 dx over R^d, radial quadrature
        d = self.dimension
        jac = 2.0 if d == 1 else 2.0 * math.pi
        val, _ = quad(lambda s: smooth_cutoff(s) ** 2 * s ** (d - 1), 0.0, 2.0, limit=200)
        return jac * val * self.width ** d

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        z = x - _col(self._c, x.ndim)
        r2 = np.sum(z * z, axis=0)
        w = self.width
        if self.kind == "gaussian":
            shape = (math.pi * w * w) ** (-self.dimension / 4) * np.exp(-r2 / (2 * w * w))
        else:
            shape = smooth_cutoff(np.sqrt(r2) / w) / math.sqrt(self._bump_norm2)
        return self.amplitude * shape

    def norm(self) -> float:
        return abs(self.amplitude)

    def scaled(self, s: float) -> "Profile":
        """``s^(-d/2) theta(x / s)``: same norm, width and center times ``s``."""
        return Profile(self.kind, self.dimension, self.width * s, tuple(self._c * s), self.amplitude)

    @property
    def spatial_radius(self) -> float:
        return (_GAUSS_X if self.kind == "gaussian" else 2.0) * self.width

    @property
    def spectral_radius(self) -> float:
        return (_GAUSS_K if self.kind == "gaussian" else _BUMP_K) / self.width

    def overlap(self, other: "Profile", k=0.0) -> complex:
        """``int self(x) conj(other(x)) exp(i k.x) dx``."""
        d = self.dimension
        if other.dimension != d:
            raise ContractError("profiles live in different dimensions")
        k = _vec(k, d)
        if self.kind == other.kind == "gaussian":
            s1, s2 = self.width, other.width
            a = 0.5 / s1 ** 2 + 0.5 / s2 ** 2
            out = 1.0 + 0j
            for c1, c2, kk in zip(self._c, other._c, k):
                b = c1 / s1 ** 2 + c2 / s2 ** 2 + 1j * kk
                c0 = 0.5 * c1 ** 2 / s1 ** 2 + 0.5 * c2 ** 2 / s2 ** 2
                norm = (math.pi * s1 * s1) ** -0.25 * (math.pi * s2 * s2) ** -0.25
                out *= norm * np.sqrt(math.pi / a) * np.exp(b * b / (4 * a) - c0)
            return complex(self.amplitude * np.conj(other.amplitude) * out)
        return self._overlap_quadrature(other, k)

    def _overlap_quadrature(self, other: "Profile", k) -> complex:
        lo = np.minimum(self._c - self.spatial_radius, other._c - other.spatial_radius)
        hi = np.maximum(self._c + self.spatial_radius, other._c + other.spatial_radius)
        h = min(self.width, other.width) / 64
        if np.any(np.abs(k) * h > 0.5):
            h = 0.5 / np.max(np.abs(k))
        axes = [np.arange(a, b + h, h) for a, b in zip(lo, hi)]
        x = np.stack(np.meshgrid(*axes, indexing="ij"))
        f = self(x) * np.conj(other(x)) * np.exp(1j * np.einsum("i...,i->...", x, k))
        return complex(np.sum(f) * h ** self.dimension)


def gaussian(width=1.0, center=0.0, d=1, amplitude=1.0) -> Profile:
    return Profile("gaussian", d, float(width), tuple(_vec(center, d)), amplitude)


def bump(width=1.0, center=0.0, d=1, amplitude=1.0) -> Profile:
    return Profile("bump", d, float(width), tuple(_vec(center, d)), amplitude)


@dataclass(frozen=True)
class Band:
    """Where a family component lives: frequency ``xi / eps +- k_width`` and
    position ``x_center +- x_width`` (per axis)."""

    xi: np.ndarray
    k_width: np.ndarray
    x_center: np.ndarray
    x_width: np.ndarray


class DataFamily:
    """Base class; subclasses implement the displayed formulas."""

    variant = ""
    dimension = 1

    def values(self, eps: float, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def analytic_norm(self, eps: float) -> float:
        raise NotImplementedError

    def bands(self, eps: float) -> list[Band]:
        raise NotImplementedError

    def length_scales(self, eps: float) -> np.ndarray:
        """Smallest spatial feature per axis; must span >= 4 grid cells."""
        raise NotImplementedError

    def weak_limit(self, xi) -> Profile | None:
        return None

    def carriers(self) -> list[np.ndarray]:
        return []

    def violations(self, sym: SymbolSpec) -> list[str]:
        return []

    def theorem2_class(self) -> bool:
        """Whether the frequency content near each carrier stays at distance O(eps)."""
        return False

    def validate(self, sym: SymbolSpec) -> None:
        errs = self.violations(sym)
        if errs:
            raise ContractError("; ".join(errs))

    def _dim_check(self, sym: SymbolSpec) -> list[str]:
        if sym.dimension != self.dimension:
            return [f"{self.variant}: symbol dimension {sym.dimension} differs from data dimension {self.dimension}"]
        return []


def _check_eps(eps):
    if not eps > 0:
        raise ContractError("eps must be positive")


@dataclass(eq=False)
class PlaneWaveModulated(DataFamily):
    """``theta(x) exp(i xi0.x / eps)``."""

    theta: Profile
    xi0: np.ndarray
    variant = "PlaneWaveModulated"

    def __post_init__(self):
        self.dimension = self.theta.dimension
        self.xi0 = _vec(self.xi0, self.dimension)

    def values(self, eps, x):
        phase = np.einsum("i...,i->...", x, self.xi0) / eps
        return self.theta(x) * np.exp(1j * phase)

    def analytic_norm(self, eps):
        return self.theta.norm()

    def bands(self, eps):
        t = self.theta
        d = self.dimension
        return [Band(self.xi0, np.full(d, t.spectral_radius), t._c, np.full(d, t.spatial_radius))]

    def length_scales(self, eps):
        return np.full(self.dimension, self.theta.width)

    def weak_limit(self, xi):
        return self.theta if np.allclose(_vec(xi, self.dimension), self.xi0, atol=1e-12) else None

    def carriers(self):
        return [self.xi0]

    def theorem2_class(self):
        return True

    def violations(self, sym):
        errs = self._dim_check(sym)
        if abs(self.theta.norm() - 1.0) > 1e-12:
            errs.append(f"{self.variant}: theta must have unit L2 norm (got {self.theta.norm():.6g})")
        return errs


@dataclass(eq=False)
class TwoWave(DataFamily):
    """``theta1 e^{i xi1.x/eps} + theta2 e^{i xi2.x/eps}`` with xi2 critical, xi1 not."""

    theta1: Profile
    xi1: np.ndarray
    theta2: Profile
    xi2: np.ndarray
    variant = "TwoWave"

    def __post_init__(self):
        self.dimension = self.theta1.dimension
        if self.theta2.dimension != self.dimension:
            raise ContractError("TwoWave profiles must share a dimension")
        self.xi1 = _vec(self.xi1, self.dimension)
        self.xi2 = _vec(self.xi2, self.dimension)

    def _parts(self):
        return [PlaneWaveModulated(self.theta1, self.xi1), PlaneWaveModulated(self.theta2, self.xi2)]

    def values(self, eps, x):
        a, b = self._parts()
        return a.values(eps, x) + b.values(eps, x)

    def analytic_norm(self, eps):
        cross = self.theta1.overlap(self.theta2, (self.xi1 - self.xi2) / eps)
        n2 = self.theta1.norm() ** 2 + self.theta2.norm() ** 2 + 2 * cross.real
        return math.sqrt(max(n2, 0.0))

    def bands(self, eps):
        return [b for p in self._parts() for b in p.bands(eps)]

    def length_scales(self, eps):
        return np.full(self.dimension, min(self.theta1.width, self.theta2.width))

    def weak_limit(self, xi):
        xi = _vec(xi, self.dimension)
        if np.allclose(self.xi1, self.xi2):
            raise ContractError("TwoWave carriers must differ")
        if np.allclose(xi, self.xi1, atol=1e-12):
            return self.theta1
        if np.allclose(xi, self.xi2, atol=1e-12):
            return self.theta2
        return None

    def carriers(self):
        return [self.xi1, self.xi2]

    def theorem2_class(self):
        return True

    def violations(self, sym):
        errs = self._dim_check(sym)
        if errs:
            return errs
        if self.theta1.norm() == 0 or self.theta2.norm() == 0:
            errs.append("TwoWave: both profiles must be non-zero")
        if classify_critical(sym, self.xi2).kind == "not_critical":
            errs.append(f"TwoWave: xi2 = {self.xi2.tolist()} must be a critical point of {sym.name}")
        if classify_critical(sym, self.xi1).kind != "not_critical":
            errs.append(f"TwoWave: xi1 = {self.xi1.tolist()} must not be a critical point of {sym.name}")
        return errs


@dataclass(eq=False)
class CoherentState(DataFamily):
    """``eps^(-d/4) theta((x - x0)/sqrt(eps)) exp(i xi0.x / eps)``."""

    theta: Profile
    x0: np.ndarray
    xi0: np.ndarray
    variant = "CoherentState"

    def __post_init__(self):
        self.dimension = self.theta.dimension
        self.x0 = _vec(self.x0, self.dimension)
        self.xi0 = _vec(self.xi0, self.dimension)

    def _profile(self, eps) -> Profile:
        s = self.theta.scaled(math.sqrt(eps))
        return Profile(s.kind, s.dimension, s.width, tuple(s._c + self.x0), s.amplitude)

    def values(self, eps, x):
        return PlaneWaveModulated(self._profile(eps), self.xi0).values(eps, x)

    def analytic_norm(self, eps):
        return self.theta.norm()

    def bands(self, eps):
        return PlaneWaveModulated(self._profile(eps), self.xi0).bands(eps)

    def length_scales(self, eps):
        return np.full(self.dimension, self.theta.width * math.sqrt(eps))

    def carriers(self):
        return [self.xi0]

    def violations(self, sym):
        return self._dim_check(sym)


@dataclass(eq=False)
class ShiftedDegenerate(DataFamily):
    """``eps^(-alpha d/2) theta(x / eps^alpha) exp(i x.(xi0 + eps^beta omega0) / eps)``."""

    theta: Profile
    xi0: np.ndarray
    omega0: np.ndarray
    alpha: float = 0.0
    beta: float = 0.75
    variant = "ShiftedDegenerate"

    def __post_init__(self):
        self.dimension = self.theta.dimension
        self.xi0 = _vec(self.xi0, self.dimension)
        self.omega0 = _vec(self.omega0, self.dimension)
        errs = []
        if not 0 <= self.alpha < 1:
            errs.append(f"alpha = {self.alpha} must lie in [0, 1)")
        if not 0 < self.beta < 1:
            errs.append(f"beta = {self.beta} must lie in (0, 1)")
        if not self.alpha + self.beta < 1:
            errs.append(f"alpha + beta = {self.alpha + self.beta} must be < 1")
        if errs:
            raise ContractError("ShiftedDegenerate: " + "; ".join(errs))

    def carrier(self, eps) -> np.ndarray:
        return self.xi0 + eps ** self.beta * self.omega0

    def _plane(self, eps) -> PlaneWaveModulated:
        return PlaneWaveModulated(self.theta.scaled(eps ** self.alpha), self.carrier(eps))

    def values(self, eps, x):
        return self._plane(eps).values(eps, x)

    def analytic_norm(self, eps):
        return self.theta.norm()

    def bands(self, eps):
        return self._plane(eps).bands(eps)

    def length_scales(self, eps):
        return np.full(self.dimension, self.theta.width * eps ** self.alpha)

    def carriers(self):
        return [self.xi0]

    def violations(self, sym, prop1: bool = False):
        errs = self._dim_check(sym)
        if errs:
            return errs
        if abs(np.linalg.norm(self.omega0) - 1) > 1e-12:
            errs.append("ShiftedDegenerate: omega0 must be a unit vector")
        cls = classify_critical(sym, self.xi0)
        if cls.kind == "not_critical":
            errs.append(f"ShiftedDegenerate: xi0 = {self.xi0.tolist()} must be a critical point")
        elif np.linalg.norm(sym.hess(self.xi0) @ self.omega0) > 1e-8:
            errs.append("ShiftedDegenerate: omega0 must lie in the kernel of the Hessian at xi0")
        if prop1 and not self.beta > 2.0 / 3.0:
            errs.append(f"ShiftedDegenerate: the degenerate limit needs beta > 2/3 (got {self.beta})")
        return errs


def _split(x, r):
    return x[:r], x[r:]


@dataclass(eq=False)
class ManifoldConcentrating(DataFamily):
    """``eps^(-alpha r/2) theta(x'') phi((x' - z0)/eps^alpha) exp(i x'.zeta0/eps)``.

    ``x = (x', x'')`` with ``x'`` the first ``r`` coordinates.
    """

    theta: Profile
    phi: Profile
    z0: np.ndarray
    zeta0: np.ndarray
    alpha: float = 0.5
    variant = "ManifoldConcentrating"

    def __post_init__(self):
        self.r = self.phi.dimension
        self.p = self.theta.dimension
        self.dimension = self.r + self.p
        self.z0 = _vec(self.z0, self.r)
        self.zeta0 = _vec(self.zeta0, self.r)
        if not 0 < self.alpha < 1:
            raise ContractError(f"ManifoldConcentrating: alpha = {self.alpha} must lie in (0, 1)")

    def _phi_eps(self, eps) -> Profile:
        s = self.phi.scaled(eps ** self.alpha)
        return Profile(s.kind, s.dimension, s.width, tuple(s._c + self.z0), s.amplitude)

    def values(self, eps, x):
        xp, xpp = _split(x, self.r)
        phase = np.einsum("i...,i->...", xp, self.zeta0) / eps
        return self.theta(xpp) * self._phi_eps(eps)(xp) * np.exp(1j * phase)

    def analytic_norm(self, eps):
        return self.theta.norm() * self.phi.norm()

    def bands(self, eps):
        ph = self._phi_eps(eps)
        t = self.theta
        return [Band(np.concatenate([self.zeta0, np.zeros(self.p)]),
                     np.concatenate([np.full(self.r, ph.spectral_radius), np.full(self.p, t.spectral_radius)]),
                     np.concatenate([ph._c, t._c]),
                     np.concatenate([np.full(self.r, ph.spatial_radius), np.full(self.p, t.spatial_radius)]))]

    def length_scales(self, eps):
        return np.concatenate([np.full(self.r, self.phi.width * eps ** self.alpha),
                               np.full(self.p, self.theta.width)])

    def carriers(self):
        return [np.concatenate([self.zeta0, np.zeros(self.p)])]

    def violations(self, sym):
        errs = self._dim_check(sym)
        cs = sym.critical_set
        if not isinstance(cs, AffineManifold):
            errs.append(f"{self.variant}: symbol {sym.name} has no affine critical manifold")
        elif (cs.r, cs.p) != (self.r, self.p):
            errs.append(f"{self.variant}: manifold split (r, p) = ({cs.r}, {cs.p}) differs from data ({self.r}, {self.p})")
        elif np.any(cs.base != 0):
            errs.append(f"{self.variant}: the critical manifold must be {{xi'' = 0}}")
        if abs(self.theta.norm() - 1.0) > 1e-12:
            errs.append(f"{self.variant}: theta must have unit L2 norm")
        return errs


@dataclass(eq=False)
class ManifoldShifted(DataFamily):
    """``eps^(-alpha p/2) theta(x''/eps^alpha) e^{i x''.omega0 / eps^(1-beta)} e^{i xi0'.x'/eps} phi(x')``."""

    theta: Profile
    phi: Profile
    xi0p: np.ndarray
    omega0: np.ndarray
    alpha: float = 0.0
    beta: float = 0.75
    variant = "ManifoldShifted"

    def __post_init__(self):
        self.r = self.phi.dimension
        self.p = self.theta.dimension
        self.dimension = self.r + self.p
        self.xi0p = _vec(self.xi0p, self.r)
        self.omega0 = _vec(self.omega0, self.p)
        if not 0 <= self.alpha < 1 or not 0 < self.beta < 1 or not self.alpha + self.beta < 1:
            raise ContractError("ManifoldShifted: need alpha in [0,1), beta in (0,1), alpha + beta < 1")

    def values(self, eps, x):
        xp, xpp = _split(x, self.r)
        th = self.theta.scaled(eps ** self.alpha)
        ph = np.einsum("i...,i->...", xp, self.xi0p) / eps + \
            np.einsum("i...,i->...", xpp, self.omega0) * eps ** (self.beta - 1)
        return th(xpp) * self.phi(xp) * np.exp(1j * ph)

    def analytic_norm(self, eps):
        return self.theta.norm() * self.phi.norm()

    def bands(self, eps):
        th = self.theta.scaled(eps ** self.alpha)
        return [Band(np.concatenate([self.xi0p, eps ** self.beta * self.omega0]),
                     np.concatenate([np.full(self.r, self.phi.spectral_radius), np.full(self.p, th.spectral_radius)]),
                     np.concatenate([self.phi._c, th._c]),
                     np.concatenate([np.full(self.r, self.phi.spatial_radius), np.full(self.p, th.spatial_radius)]))]

    def length_scales(self, eps):
        return np.concatenate([np.full(self.r, self.phi.width), np.full(self.p, self.theta.width * eps ** self.alpha)])

    def carriers(self):
        return [np.concatenate([self.xi0p, np.zeros(self.p)])]

    def violations(self, sym, prop1: bool = False):
        errs = ManifoldConcentrating.violations(self, sym)
        if errs:
            return errs
        if abs(np.linalg.norm(self.omega0) - 1) > 1e-12:
            errs.append(f"{self.variant}: omega0 must be a unit vector")
        # the hypothesis is read as omega0 in the kernel of the xi'' Hessian
        if np.linalg.norm(sym.manifold_hessian(self.xi0p) @ self.omega0) > 1e-8:
            errs.append(f"{self.variant}: omega0 must lie in the kernel of the xi'' Hessian at (xi0', 0)")
        if prop1 and not self.beta > 2.0 / 3.0:
            errs.append(f"{self.variant}: the degenerate limit needs beta > 2/3 (got {self.beta})")
        return errs


FAMILY_VARIANTS = {c.variant: c for c in (PlaneWaveModulated, TwoWave, CoherentState, ShiftedDegenerate,
                                          ManifoldConcentrating, ManifoldShifted)}


# -- sampling and grids ----------------------------------------------------------

def required_points(fam: DataFamily, eps: float, L, margin: float = 1.0) -> np.ndarray:
    """Per-axis point count whose Nyquist frequency covers every band."""
    L = np.broadcast_to(np.asarray(L, dtype=float), (fam.dimension,))
    need = np.zeros(fam.dimension, dtype=int)
    for b in fam.bands(eps):
        kmax = np.abs(b.xi) / eps + b.k_width
        need = np.maximum(need, [min_points(Li, ki, margin) for Li, ki in zip(L, kmax)])
    scales = fam.length_scales(eps)
    need = np.maximum(need, [next_pow2(4 * 2 * Li / s) for Li, s in zip(L, scales)])
    return need


def sample_data(fam: DataFamily, eps: float, g: Grid, tol: float = 0.01) -> Field:
    _check_eps(eps)
    if g.d != fam.dimension:
        raise ContractError(f"grid dimension {g.d} differs from data dimension {fam.dimension}")
    need = required_points(fam, eps, g.L)
    if np.any(need > np.asarray(g.N)):
        raise UnderResolved(f"{fam.variant} at eps = {eps} needs N >= {need.tolist()} on this box "
                            f"(have {list(g.N)})", need.tolist())
    f = Field(g, fam.values(eps, g.x))
    expected = fam.analytic_norm(eps)
    got = f.norm()
    if abs(got - expected) > tol * max(expected, 1e-300):
        raise UnderResolved(f"{fam.variant} at eps = {eps}: discrete norm {got:.6g} vs analytic {expected:.6g}; "
                            "enlarge the box or refine the grid", need.tolist())
    return f


def weak_limit_profile(fam: DataFamily, xi) -> Profile | None:
    """Weak limit of ``exp(-i xi.x/eps) u0^eps``; ``None`` stands for zero."""
    return fam.weak_limit(xi)


def auto_grid(fam: DataFamily, eps: float, sym: SymbolSpec | None = None, V: PotentialSpec | None = None,
              T: float = 0.0, extent=0.0, N=None, margin: float = 1.5, guard: float = 0.9,
              L_min=0.0) -> Grid:
    """Box large enough that nothing reaches the guard band before time ``T``.

    Group velocities ``grad lambda(xi) / eps`` are sampled over each band;
    ``extent`` is an extra radius (e.g. an observable's support) to keep
    inside the guard band.  When ``N`` is given it is checked, not chosen.
    """
    _check_eps(eps)
    d = fam.dimension
    extent = _vec(extent, d)
    L = np.maximum(_vec(L_min, d), extent / guard)
    kick = 0.0
    if V is not None and V.tag == "cosine":
        kick = T * float(np.sum(np.abs(np.multiply(V.params["amplitudes"], V.params["wavenumbers"]))))
    for b in fam.bands(eps):
        reach = np.abs(b.x_center) + b.x_width
        L = np.maximum(L, 2.0 * reach)
        if sym is not None and T > 0:
            half = eps * (_VELOCITY_FRACTION * b.k_width + kick)
            n = 401 if d == 1 else 41
            axes = [np.linspace(c - h, c + h, n) for c, h in zip(b.xi, half)]
            xs = np.stack(np.meshgrid(*axes, indexing="ij")).reshape(d, -1)
            vmax = np.max(np.abs(sym.gradient(xs)).reshape(d, -1), axis=1) / eps
            L = np.maximum(L, (reach + vmax * T) / guard)
    if V is not None and V.tag == "cosine":
        for i, k in enumerate(V.params["wavenumbers"]):
            if k:
                step = math.pi / abs(k)
                L[i] = math.ceil(L[i] / step - 1e-9) * step
    need = required_points(fam, eps, L, margin)
    if N is None:
        N = need
    else:
        N = np.broadcast_to(np.asarray(N, dtype=int), (d,))
        if np.any(need > N):
            need1 = required_points(fam, eps, L, 1.0)
            if np.any(need1 > N):
                raise UnderResolved(f"{fam.variant} at eps = {eps} needs N >= {need1.tolist()} "
                                    f"on L = {L.tolist()}", need1.tolist())
    return Grid(tuple(float(v) for v in L), tuple(int(v) for v in N))


# -- oscillation diagnostics and the cutoff criterion ------------------------------

def tail_fraction(f: Field, eps: float, R: float) -> float:
    """``int_{|xi| > R/eps} |f^(xi)|^2 dxi / (2 pi)^d``."""
    F = fftn(f.values)
    k = np.sqrt(np.sum(f.grid.k ** 2, axis=0))
    mass = np.abs(F) ** 2
    total = mass.sum()
    return float(mass[k > R / eps].sum() / total * f.norm() ** 2) if total > 0 else 0.0


@dataclass
class OscillationTable:
    rows: list = field(default_factory=list)  # (eps, R, tail mass)
    limsup: dict = field(default_factory=dict)  # R -> max tail over the smaller half of eps


def check_eps_oscillating(fam: DataFamily, eps_list: Sequence[float], R_list: Sequence[float],
                          g: Grid | None = None) -> OscillationTable:
    if not len(eps_list) or not len(R_list):
        raise ContractError("eps and R lists must be non-empty")
    if list(R_list) != sorted(R_list):
        raise ContractError("R list must be increasing")
    out = OscillationTable()
    for eps in eps_list:
        grid = g or auto_grid(fam, eps)
        f = sample_data(fam, eps, grid)
        for R in R_list:
            out.rows.append((eps, R, tail_fraction(f, eps, R)))
    small = sorted(eps_list)[:max(1, len(eps_list) // 2)]
    for R in R_list:
        out.limsup[R] = max(t for e, r, t in out.rows if r == R and e in small)
    return out


def theorem2_criterion(fam_or_field, xi, eps: float, R: float, delta: float, g: Grid | None = None) -> float:
    """``|| (1 - chi)((eps D - xi)/(eps R)) chi((eps D - xi)/delta) u0^eps ||``."""
    if not delta > 0 or R < 1:
        raise ContractError("need delta > 0 and R >= 1")
    _check_eps(eps)
    if isinstance(fam_or_field, Field):
        f = fam_or_field
    else:
        f = sample_data(fam_or_field, eps, g or auto_grid(fam_or_field, eps))
    xi = _vec(xi, f.grid.d)
    z = eps * f.grid.k - _col(xi, f.grid.k.ndim)
    m = (1.0 - chi(z / (eps * R))) * chi(z / delta)
    return apply_multiplier(f, m).norm()
