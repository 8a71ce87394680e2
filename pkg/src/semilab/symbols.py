"""Closed-form dispersion symbols and bounded potentials.

A symbol is evaluated on arrays whose *leading* axis indexes the momentum
components, so ``sym.func(xi)`` with ``xi.shape == (d, ...)`` returns an
array of shape ``xi.shape[1:]``.  The scalar helpers (:func:`eval_symbol`,
:meth:`SymbolSpec.grad`, ...) accept a plain length-``d`` vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import erfc


class ContractError(ValueError):
    """Raised when an operation is called outside its documented domain."""


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    location: np.ndarray
    hessian_rank: int
    kernel_basis: tuple[np.ndarray, ...] = ()

    @property
    def degenerate(self) -> bool:
        return len(self.kernel_basis) > 0


@dataclass(frozen=True, eq=False)
class FinitePoints:
    points: tuple[CriticalPoint, ...]


@dataclass(frozen=True, eq=False)
class AffineManifold:
    """Critical set ``{xi'' = base}`` with ``xi = (xi', xi'')`` in R^r x R^p."""

    r: int
    p: int
    base: np.ndarray


@dataclass(frozen=True)
class Classification:
    kind: str  # "not_critical" | "nondegenerate" | "degenerate"
    kernel_basis: tuple[np.ndarray, ...] = ()


@dataclass(frozen=True, eq=False)
class SymbolSpec:
    name: str
    dimension: int
    func: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    order: float
    critical_set: FinitePoints | AffineManifold | None
    params: dict = field(default_factory=dict)

    def _vector(self, xi) -> np.ndarray:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if xi.shape != (self.dimension,):
            raise ContractError(
                f"symbol {self.name!r} lives in dimension {self.dimension}, got point of shape {xi.shape}"
            )
        return xi

    def eval(self, xi) -> float:
        return float(self.func(self._vector(xi)))

    def grad(self, xi) -> np.ndarray:
        return np.asarray(self.gradient(self._vector(xi)), dtype=float).reshape(self.dimension)

    def hess(self, xi) -> np.ndarray:
        h = np.asarray(self.hessian(self._vector(xi)), dtype=float)
        return h.reshape(self.dimension, self.dimension)

    def critical_points(self) -> tuple[CriticalPoint, ...]:
        if isinstance(self.critical_set, FinitePoints):
            return self.critical_set.points
        return ()

    def manifold_hessian(self, xi_prime) -> np.ndarray:
        """Hessian block in the ``xi''`` directions at ``(xi', base)``."""
        cs = self.critical_set
        if not isinstance(cs, AffineManifold):
            raise ContractError(f"symbol {self.name!r} has no affine critical manifold")
        xi_prime = np.atleast_1d(np.asarray(xi_prime, dtype=float))
        if xi_prime.shape != (cs.r,):
            raise ContractError(f"xi' must have {cs.r} components")
        point = np.concatenate([xi_prime, cs.base])
        return self.hess(point)[cs.r:, cs.r:]


def eval_symbol(sym: SymbolSpec, xi) -> float:
    return sym.eval(xi)


def classify_critical(sym: SymbolSpec, xi0, tol: float = 1e-8) -> Classification:
    if tol <= 0:
        raise ContractError("tol must be positive")
    g = sym.grad(xi0)
    if np.linalg.norm(g) > tol:
        return Classification("not_critical")
    w, v = np.linalg.eigh(sym.hess(xi0))
    small = np.abs(w) <= tol
    if not small.any():
        return Classification("nondegenerate")
    return Classification("degenerate", tuple(v[:, i].copy() for i in np.flatnonzero(small)))


def _critical_point(sym_hess, location) -> CriticalPoint:
    location = np.asarray(location, dtype=float)
    w, v = np.linalg.eigh(np.asarray(sym_hess(location), dtype=float))
    small = np.abs(w) <= 1e-12
    kernel = tuple(v[:, i].copy() for i in np.flatnonzero(small))
    return CriticalPoint(location, int((~small).sum()), kernel)


# -- catalog -----------------------------------------------------------------

def _eye_field(d, shape):
    out = np.zeros((d, d) + shape)
    for i in range(d):
        out[i, i] = 1.0
    return out


def _iso_quadratic(d: int, center=None) -> SymbolSpec:
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    cc = c

    def func(xi):
        z = xi - cc.reshape((d,) + (1,) * (xi.ndim - 1))
        return np.sum(z * z, axis=0)

    def gradient(xi):
        return 2.0 * (xi - cc.reshape((d,) + (1,) * (xi.ndim - 1)))

    def hessian(xi):
        return 2.0 * _eye_field(d, xi.shape[1:])

    name = "iso_quadratic" if center is None else "shifted_quadratic"
    params = {"d": d} if center is None else {"xi0": c.tolist()}
    sym = SymbolSpec(name, d, func, gradient, hessian, 2.0, None, params)
    return _with_points(sym, [c])


def _with_points(sym: SymbolSpec, locations) -> SymbolSpec:
    pts = tuple(_critical_point(sym.hessian, loc) for loc in locations)
    return SymbolSpec(sym.name, sym.dimension, sym.func, sym.gradient, sym.hessian,
                      sym.order, FinitePoints(pts), sym.params)


def _quartic_degenerate(d: int) -> SymbolSpec:
    # d=1: xi^4; d=2: xi_1^2 + xi_2^4
    if d == 1:
        def func(xi):
            return xi[0] ** 4

        def gradient(xi):
            return np.stack([4.0 * xi[0] ** 3])

        def hessian(xi):
            return np.asarray(12.0 * xi[0] ** 2)[None, None]
    elif d == 2:
        def func(xi):
            return xi[0] ** 2 + xi[1] ** 4

        def gradient(xi):
            return np.stack([2.0 * xi[0], 4.0 * xi[1] ** 3])

        def hessian(xi):
            out = np.zeros((2, 2) + xi.shape[1:])
            out[0, 0] = 2.0
            out[1, 1] = 12.0 * xi[1] ** 2
            return out
    else:
        raise ContractError("quartic_degenerate is defined for d in {1, 2}")
    sym = SymbolSpec("quartic_degenerate", d, func, gradient, hessian, 4.0, None, {"d": d})
    return _with_points(sym, [np.zeros(d)])


def _double_well() -> SymbolSpec:
    def func(xi):
        return (xi[0] ** 2 - 1.0) ** 2

    def gradient(xi):
        return np.stack([4.0 * xi[0] * (xi[0] ** 2 - 1.0)])

    def hessian(xi):
        return np.asarray(12.0 * xi[0] ** 2 - 4.0)[None, None]

    sym = SymbolSpec("double_well_1d", 1, func, gradient, hessian, 4.0, None, {})
    return _with_points(sym, [[-1.0], [0.0], [1.0]])


def _manifold_power(r: int, p: int, power: int) -> SymbolSpec:
    # lambda(xi) = |xi''|^power, critical set {xi'' = 0}
    d = r + p
    if r < 0 or p < 1:
        raise ContractError("manifold symbols need p >= 1 and r >= 0")

    def func(xi):
        s = np.sum(xi[r:] ** 2, axis=0)
        return s if power == 2 else s ** 2

    def gradient(xi):
        out = np.zeros_like(xi, dtype=float)
        if power == 2:
            out[r:] = 2.0 * xi[r:]
        else:
            out[r:] = 4.0 * np.sum(xi[r:] ** 2, axis=0) * xi[r:]
        return out

    def hessian(xi):
        out = np.zeros((d, d) + xi.shape[1:])
        if power == 2:
            for i in range(r, d):
                out[i, i] = 2.0
        else:
            s = np.sum(xi[r:] ** 2, axis=0)
            for i in range(r, d):
                for j in range(r, d):
                    out[i, j] = 8.0 * xi[i] * xi[j]
                out[i, i] = out[i, i] + 4.0 * s
        return out

    name = "manifold_quadratic" if power == 2 else "manifold_quartic"
    return SymbolSpec(name, d, func, gradient, hessian, float(power),
                      AffineManifold(r, p, np.zeros(p)), {"r": r, "p": p})


def quadratic_form(h) -> SymbolSpec:
    """lambda(xi) = 1/2 H xi.xi, the generator of the effective profile equation."""
    h = np.atleast_2d(np.asarray(h, dtype=float))
    if h.shape[0] != h.shape[1]:
        raise ContractError("H must be square")
    if not np.allclose(h, h.T, atol=1e-14, rtol=0):
        raise ContractError("H must be symmetric")
    d = h.shape[0]

    def func(xi):
        return 0.5 * np.einsum("i...,ij,j...->...", xi, h, xi)

    def gradient(xi):
        return np.einsum("ij,j...->i...", h, xi)

    def hessian(xi):
        return np.broadcast_to(h.reshape((d, d) + (1,) * (xi.ndim - 1)), (d, d) + xi.shape[1:]).copy()

    return SymbolSpec("quadratic_form", d, func, gradient, hessian, 2.0, None, {"H": h.tolist()})


SYMBOL_TAGS = ("iso_quadratic", "shifted_quadratic", "quartic_degenerate",
               "double_well_1d", "manifold_quadratic", "manifold_quartic")


def builtin_symbol(tag: str, **params) -> SymbolSpec:
    if tag == "iso_quadratic":
        return _iso_quadratic(int(params.get("d", 1)))
    if tag == "shifted_quadratic":
        xi0 = np.atleast_1d(np.asarray(params["xi0"], dtype=float))
        return _iso_quadratic(xi0.size, xi0)
    if tag == "quartic_degenerate":
        return _quartic_degenerate(int(params.get("d", 2)))
    if tag == "double_well_1d":
        return _double_well()
    if tag in ("manifold_quadratic", "manifold_quartic"):
        p = int(params.get("p", 1))
        r = int(params.get("r", int(params.get("d", p + 1)) - p))
        return _manifold_power(r, p, 2 if tag == "manifold_quadratic" else 4)
    raise ContractError(f"unknown symbol tag {tag!r}; known: {', '.join(SYMBOL_TAGS)}")


def growth_constant(sym: SymbolSpec, radius: float, n: int = 2000, seed: int = 0) -> float:
    """Sampled sup of |d^alpha lambda| (1+|xi|)^-N over |alpha| <= 2 on the ball of given radius."""
    rng = np.random.default_rng(seed)
    d = sym.dimension
    dirs = rng.normal(size=(d, n))
    dirs /= np.linalg.norm(dirs, axis=0)
    xi = dirs * radius * rng.uniform(size=n) ** (1.0 / d)
    xi[:, 0] = 0.0
    weight = (1.0 + np.linalg.norm(xi, axis=0)) ** (-sym.order)
    vals = [np.abs(sym.func(xi)), *np.abs(sym.gradient(xi)),
            *np.abs(sym.hessian(xi)).reshape(d * d, n)]
    return float(max(np.max(v * weight) for v in vals))


# -- potentials ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PotentialSpec:
    tag: str
    dimension: int
    func: Callable[[np.ndarray], np.ndarray]
    sup_norm: float
    params: dict = field(default_factory=dict)

    def eval(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.dimension,):
            raise ContractError(f"potential lives in dimension {self.dimension}")
        return float(self.func(x))

    @property
    def is_zero(self) -> bool:
        return self.tag == "zero"

    def check_grid(self, grid) -> None:
        """Refuse potentials that are not compatible with the periodic box."""
        if self.tag == "cosine":
            for k, L in zip(self.params["wavenumbers"], grid.L):
                m = k * L / np.pi
                if k != 0 and abs(m - round(m)) > 1e-9:
                    raise ContractError(
                        f"cosine potential with wavenumber {k} is not periodic on [-{L}, {L})")
        elif self.tag == "gaussian_bump":
            c = np.asarray(self.params["center"], dtype=float)
            w = float(self.params["width"])
            # fraction of the bump's integral lying outside the box
            inside = 1.0
            for ci, L in zip(c, grid.L):
                lo = erfc((L + ci) / (np.sqrt(2) * w)) / 2
                hi = erfc((L - ci) / (np.sqrt(2) * w)) / 2
                inside *= 1.0 - lo - hi
            if 1.0 - inside >= 1e-12:
                raise ContractError("gaussian_bump potential leaks out of the periodic box")

    def restrict(self, x_prime) -> "PotentialSpec":
        """The slice y -> V(x', y) on the trailing coordinates."""
        x_prime = np.atleast_1d(np.asarray(x_prime, dtype=float))
        r = x_prime.size
        p = self.dimension - r
        if p < 1:
            raise ContractError("nothing left to restrict to")

        def func(y):
            lead = np.broadcast_to(x_prime.reshape((r,) + (1,) * (y.ndim - 1)), (r,) + y.shape[1:])
            return self.func(np.concatenate([lead, y], axis=0))

        params = dict(self.params, sliced_at=x_prime.tolist())
        return PotentialSpec(self.tag, p, func, self.sup_norm, params)


POTENTIAL_TAGS = ("zero", "gaussian_bump", "cosine")


def builtin_potential(tag: str, d: int = 1, **params) -> PotentialSpec:
    if tag == "zero":
        return PotentialSpec("zero", d, lambda x: np.zeros(x.shape[1:]), 0.0, {})
    if tag == "gaussian_bump":
        c = np.atleast_1d(np.asarray(params.get("center", np.zeros(d)), dtype=float))
        if c.size == 1 and d > 1:
            c = np.full(d, c[0])
        w = float(params.get("width", 1.0))
        h = float(params.get("height", 1.0))
        if w <= 0:
            raise ContractError("width must be positive")

        def func(x):
            z = x - c.reshape((d,) + (1,) * (x.ndim - 1))
            return h * np.exp(-np.sum(z * z, axis=0) / (2 * w * w))

        return PotentialSpec("gaussian_bump", d, func, abs(h),
                             {"center": c.tolist(), "width": w, "height": h})
    if tag == "cosine":
        a = np.atleast_1d(np.asarray(params.get("amplitudes", np.ones(d)), dtype=float))
        k = np.atleast_1d(np.asarray(params.get("wavenumbers", np.ones(d)), dtype=float))
        if a.size == 1 and d > 1:
            a = np.full(d, a[0])
        if k.size == 1 and d > 1:
            k = np.full(d, k[0])
        if a.size != d or k.size != d:
            raise ContractError("cosine potential needs one amplitude and wavenumber per axis")

        def func(x):
            return sum(a[i] * np.cos(k[i] * x[i]) for i in range(d))

        return PotentialSpec("cosine", d, func, float(np.sum(np.abs(a))),
                             {"amplitudes": a.tolist(), "wavenumbers": k.tolist()})
    raise ContractError(f"unknown potential tag {tag!r}; known: {', '.join(POTENTIAL_TAGS)}")
