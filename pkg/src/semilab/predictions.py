"""Closed-form and profile-based values of the eps -> 0 limits.

Every predictor takes the experiment grid so that the oracle and the
measurement share their discretization.  Test functions ``phi`` are
vectorized callables of ``x`` (component axis first) with values >= 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .grid import Field, Grid, mass
from .initial_data import DataFamily, ManifoldConcentrating, ManifoldShifted, ShiftedDegenerate
from .propagator import TimeWindow, iter_evolve, iter_heisenberg_rank1, iter_profile
from .symbols import (AffineManifold, ContractError, FinitePoints, PotentialSpec, SymbolSpec,
                      builtin_potential, quadratic_form)
from .wigner import Bump, One, TwoMicroSymbol, converged_average, times, two_micro_expect

TAGS = ("dispersed_zero", "profile_density", "point_mass", "manifold_profile", "manifold_point_mass")


@dataclass
class PredictedLimit:
    value: float
    tag: str
    citation: str
    equality: bool = True  # False: the value is only a lower bound
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ContractError(f"unknown prediction tag {self.tag!r}")
        if self.value < -1e-12:
            raise ContractError(f"predicted limit must be non-negative, got {self.value}")


def _phi_values(phi, g: Grid) -> np.ndarray:
    v = np.broadcast_to(np.asarray(phi(g.x), dtype=float), g.shape)
    if np.min(v) < -1e-14:
        raise ContractError("test functions must be non-negative")
    return v


def profile_average(theta0: Field, H, V: PotentialSpec, phi_vals: np.ndarray, w: TimeWindow,
                    rtol: float = 1e-3) -> float:
    """``int Xi(t) int phi |theta(t)|^2 dx dt`` for the profile equation."""
    val, _, _ = converged_average(lambda win: iter_profile(theta0, H, V, win),
                                  lambda u: mass(u, phi_vals), w, rtol)
    return float(val.real)


def predict_isolated(fam: DataFamily, sym: SymbolSpec, V: PotentialSpec, phi, w: TimeWindow,
                     grid: Grid) -> PredictedLimit:
    """Sum over critical points of the profile masses seen by ``phi``."""
    if not isinstance(sym.critical_set, FinitePoints):
        raise ContractError(f"symbol {sym.name} does not have isolated critical points")
    pv = _phi_values(phi, grid)
    total = 0.0
    any_profile = False
    degenerate = False
    for cp in sym.critical_points():
        prof = fam.weak_limit(cp.location)
        if cp.degenerate:
            degenerate = True
        if prof is None:
            continue
        any_profile = True
        theta0 = Field(grid, prof(grid.x))
        total += profile_average(theta0, sym.hess(cp.location), V, pv, w)
    equality = (not degenerate) or fam.theorem2_class()
    notes = [] if equality else ["degenerate critical point and data outside the frequency-localized class: lower bound only"]
    if not any_profile:
        return PredictedLimit(0.0, "dispersed_zero", "all weak limits at critical points vanish; the mass disperses",
                              equality, notes)
    return PredictedLimit(total, "profile_density",
                          "sum over critical points of the profile-equation density averaged against phi",
                          equality, notes)


def predict_degenerate(fam: ShiftedDegenerate, sym: SymbolSpec, phi, w: TimeWindow, grid: Grid,
                       V: PotentialSpec | None = None) -> PredictedLimit:
    """Limit for phase-shifted data at a degenerate critical point (V = 0)."""
    if not isinstance(fam, ShiftedDegenerate):
        raise ContractError("predict_degenerate takes ShiftedDegenerate data")
    errs = fam.violations(sym, prop1=True)
    if V is not None and not V.is_zero:
        errs.append("the degenerate-point limit is stated for V = 0")
    if errs:
        raise ContractError("; ".join(errs))
    if fam.alpha == 0:
        pv = _phi_values(phi, grid)
        theta0 = Field(grid, fam.theta(grid.x))
        val = profile_average(theta0, sym.hess(fam.xi0), builtin_potential("zero", fam.dimension), pv, w)
        return PredictedLimit(val, "profile_density",
                              "profile equation at the degenerate point started from theta")
    phi0 = float(np.asarray(phi(np.zeros((fam.dimension, 1))), dtype=float).reshape(-1)[0])
    val = w.integral() * phi0 * fam.theta.norm() ** 2
    return PredictedLimit(val, "point_mass", "concentrating data: point mass |theta|^2 at the origin")


def _fibre_grid(grid: Grid, r: int) -> Grid:
    return Grid(grid.L[r:], grid.N[r:])


def _base_grid(grid: Grid, r: int) -> Grid:
    return Grid(grid.L[:r], grid.N[:r])


def _rank_condition(sym: SymbolSpec, xi_prime) -> bool:
    cs = sym.critical_set
    h = sym.manifold_hessian(xi_prime)
    return int(np.linalg.matrix_rank(h, tol=1e-10)) == cs.p


def predict_manifold(fam: DataFamily, sym: SymbolSpec, V: PotentialSpec, phi, w: TimeWindow,
                     grid: Grid) -> PredictedLimit:
    cs = sym.critical_set
    if not isinstance(cs, AffineManifold):
        raise ContractError(f"symbol {sym.name} has no affine critical manifold")
    errs = fam.violations(sym) if isinstance(fam, (ManifoldConcentrating, ManifoldShifted)) else \
        [f"{fam.variant} is not a manifold family"]
    if errs:
        raise ContractError("; ".join(errs))
    r = cs.r
    fib = _fibre_grid(grid, r)
    if isinstance(fam, ManifoldConcentrating):
        z0 = fam.z0
        lead = np.broadcast_to(z0.reshape((r,) + (1,) * fib.d), (r,) + fib.shape)

        def phi_slice(y):
            return phi(np.concatenate([lead, y], axis=0))

        pv = _phi_values(phi_slice, fib)
        theta0 = Field(fib, fam.theta(fib.x))
        avg, _, _ = converged_average(lambda win: iter_heisenberg_rank1(theta0, sym, z0, fam.zeta0, V, win),
                                      lambda u: mass(u, pv), w)
        val = fam.phi.norm() ** 2 * float(avg.real)
        eq = _rank_condition(sym, fam.zeta0)
        return PredictedLimit(val, "manifold_profile",
                              "concentration at x' = z0 times the fibre profile density",
                              eq, [] if eq else ["Hessian rank below p on the manifold: lower bound only"])
    # ManifoldShifted
    errs = fam.violations(sym, prop1=True)
    if not V.is_zero:
        errs.append("the shifted-manifold limit is stated for V = 0")
    if errs:
        raise ContractError("; ".join(errs))
    base = _base_grid(grid, r) if r else None
    phi_p = np.abs(fam.phi(base.x)) ** 2 if r else np.ones(())
    if fam.alpha != 0:
        zero = np.zeros((cs.p,) + base.shape)
        pv = np.asarray(phi(np.concatenate([base.x, zero], axis=0)), dtype=float)
        val = w.integral() * fam.theta.norm() ** 2 * float(np.sum(phi_p * pv) * base.cell_volume)
        return PredictedLimit(val, "manifold_point_mass",
                              "|phi(x')|^2 dx' times a point mass on x'' = 0")
    # alpha = 0: |phi(x')|^2 |theta(t, x'')|^2 with the xi'' profile flow
    h = sym.manifold_hessian(fam.xi0p)
    d = grid.d
    H = np.zeros((d, d))
    H[r:, r:] = h
    pv = _phi_values(phi, grid) * np.broadcast_to(phi_p.reshape(phi_p.shape + (1,) * cs.p), grid.shape)
    theta0 = Field(grid, fam.theta(grid.x[r:]) * np.ones(grid.shape))
    # theta is normalized on the fibre; the x' weight already carries |phi|^2
    val = profile_average(theta0, H, builtin_potential("zero", d), pv, w)
    return PredictedLimit(val, "manifold_profile", "|phi(x')|^2 times the fibre profile density")


@dataclass(frozen=True)
class Support:
    kind: str  # "points" | "manifold"
    points: tuple = ()
    r: int = 0
    p: int = 0
    base: tuple = ()

    def __str__(self):
        if self.kind == "points":
            return "R^d x {" + ", ".join(str(np.round(pt, 12).tolist()) for pt in self.points) + "}"
        return f"R^d x {{xi'' = {list(self.base)}}} (r = {self.r}, p = {self.p})"

    def contains(self, xi, tol: float = 1e-9) -> bool:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if self.kind == "points":
            return any(np.linalg.norm(xi - np.asarray(pt)) <= tol for pt in self.points)
        return bool(np.linalg.norm(xi[self.r:] - np.asarray(self.base)) <= tol)


def predict_support(sym: SymbolSpec) -> Support:
    """Admissible momentum support of the limit measures: the critical set."""
    cs = sym.critical_set
    if isinstance(cs, FinitePoints):
        return Support("points", tuple(tuple(cp.location.tolist()) for cp in cs.points))
    if isinstance(cs, AffineManifold):
        return Support("manifold", r=cs.r, p=cs.p, base=tuple(cs.base.tolist()))
    raise ContractError(f"symbol {sym.name} has no recorded critical set")


def mt_consistency_rhs(fam: DataFamily, sym: SymbolSpec, V: PotentialSpec, a: TwoMicroSymbol,
                       w: TimeWindow, R: float, grid: Grid, xi0=None) -> tuple[float, bool]:
    """``int Xi(t) (op_1(A_R) u(t), u(t)) dt`` with ``A_R(x, eta) = a(x, xi0, eta) chi(eta / R)``.

    ``a`` is the symbol before cutoffs; ``u`` solves the profile equation
    from the weak limit at ``xi0``.  Returns ``(value, nonzero)``; a zero weak
    limit gives ``(0.0, False)``.
    """
    if xi0 is None:
        cands = [cp.location for cp in sym.critical_points() if fam.weak_limit(cp.location) is not None]
        if not cands:
            return 0.0, False
        xi0 = cands[0]
    xi0 = np.atleast_1d(np.asarray(xi0, dtype=float))
    prof = fam.weak_limit(xi0)
    if prof is None:
        return 0.0, False
    if a.r != 0:
        raise ContractError("the rank-one consistency check is for isolated critical points (r = 0)")
    # freeze xi = xi0 in psi and blow eta up at scale 1
    terms = []
    for t in a.terms:
        c = complex(np.asarray(t.psi(xi0.reshape((-1, 1))), dtype=complex).reshape(-1)[0])
        terms.append(replace(t, psi=One(), rho=times(t.rho, Bump(R, (0.0,) * a.p)), coef=t.coef * c))
    A = TwoMicroSymbol(tuple(terms), a.d, a.r, (0.0,) * a.p)
    theta0 = Field(grid, prof(grid.x))
    sym_h = quadratic_form(sym.hess(xi0))
    val, _, _ = converged_average(lambda win: iter_evolve(theta0, sym_h, V, 1.0, win),
                                  lambda u: two_micro_expect(u, A, 1.0), w)
    return float(val.real), True
