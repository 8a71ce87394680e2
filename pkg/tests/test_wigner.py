import numpy as np
import pytest

from semilab.grid import Field, Grid, mass, to_frequency, UnderResolved
from semilab.initial_data import (CoherentState, PlaneWaveModulated, ShiftedDegenerate, TwoWave, auto_grid,
                                  gaussian, sample_data)
from semilab.propagator import TimeWindow, free_evolve
from semilab.symbols import ContractError, builtin_symbol
from semilab.wigner import (Bump, Complement, CutoffParams, Function, One, SmoothStep, apply_cutoffs,
                            compose_flow_1d, converged_average, expect_op, symbol, time_average,
                            time_averaged_functional, two_micro_expect, wigner_transform)

FAMS = [PlaneWaveModulated(gaussian(1.0), 1.0), TwoWave(gaussian(1.0), 0.5, gaussian(1.0), 1.0),
        CoherentState(gaussian(1.0), 0.0, 1.0), ShiftedDegenerate(gaussian(1.0), 0.0, 1.0, 0.3, 0.6)]


def _momentum_density(f, eps):
    F = to_frequency(f).coefficients
    return np.fft.fftshift(np.abs(F) ** 2) / (2 * np.pi * eps)


@pytest.mark.parametrize("fam", FAMS, ids=lambda f: type(f).__name__)
@pytest.mark.parametrize("eps", [0.2, 0.05])
def test_marginals(fam, eps, backend):
    g = auto_grid(fam, eps, N=[2048]) if fam.dimension == 1 else None
    f = sample_data(fam, eps, g)
    W = wigner_transform(f, eps)
    assert W.imag_residue < 1e-12
    pos = W.position_marginal()
    dens = f.density()
    assert np.max(np.abs(pos - dens)) <= 1e-10 * np.max(dens)
    mom = W.momentum_marginal()
    ref = _momentum_density(f, eps)
    assert np.max(np.abs(mom - ref)) <= 1e-10 * np.max(ref)


def test_wigner_concentrates_at_phase_space_point():
    eps = 0.05
    cs = CoherentState(gaussian(1.0), 0.5, 1.0)
    g = Grid((4.0,), (512,))
    W = wigner_transform(sample_data(cs, eps, g), eps)
    j, k = np.unravel_index(np.argmax(W.W), W.W.shape)
    assert abs(W.x[j] - 0.5) <= W.dx
    assert abs(W.xi[k] - 1.0) <= W.dxi


def test_wigner_rejects_2d():
    g = Grid.make(1.0, 8, d=2)
    with pytest.raises(ContractError):
        wigner_transform(Field(g, np.ones(g.shape)), 0.1)


def _field(eps, L=10.0, N=2048):
    fam = PlaneWaveModulated(gaussian(1.0), 1.0)
    g = Grid((L,), (N,))
    return sample_data(fam, eps, g), fam


def test_expect_op_examples():
    eps = 0.1
    f, fam = _field(eps)
    phi = Bump(1.0)
    assert expect_op(f, symbol(phi=phi), eps).real == pytest.approx(mass(f, phi(f.grid.x)), rel=1e-12)
    psi = Bump(0.3, (1.0,))
    direct = np.sum(psi(f.grid.x * 0 + eps * f.grid.k) * np.abs(to_frequency(f).coefficients) ** 2)
    direct *= f.grid.dk[0] / (2 * np.pi)
    assert expect_op(f, symbol(psi=psi), eps).real == pytest.approx(direct, rel=1e-10)
    with pytest.raises(ContractError):
        expect_op(f, symbol(rho=SmoothStep()), eps)


def test_symmetrized_vs_wigner_route_is_second_order():
    a = symbol(phi=Function(lambda x: np.exp(-x[0] ** 2) * (1 + 0.5 * np.sin(2 * x[0])), 1.5),
               psi=Function(lambda xi: np.cos(xi[0]) ** 2, 1.0))
    gaps = []
    eps_list = [0.1, 0.05, 0.025, 0.0125]
    for eps in eps_list:
        f = sample_data(CoherentState(gaussian(1.0), 0.2, 0.8), eps, Grid((8.0,), (2048,)))
        gaps.append(abs(expect_op(f, a, eps) - expect_op(f, a, eps, route="wigner")))
    assert all(x > y for x, y in zip(gaps, gaps[1:]))
    assert np.log2(gaps[-2] / gaps[-1]) == pytest.approx(2.0, abs=0.1)


def test_two_micro_reduces_to_expect_op():
    eps = 0.1
    f, _ = _field(eps)
    a = symbol(phi=Bump(1.0), psi=Bump(0.5, (1.0,)))
    assert two_micro_expect(f, a, eps) == pytest.approx(expect_op(f, a, eps), rel=1e-13)


def test_two_micro_inner_and_outer_limits():
    theta = gaussian(1.0)
    phi = Bump(1.0)
    g = Grid((16.0,), (8192,))
    target = mass(Field(g, theta(g.x)), phi(g.x))
    inner_vals, outer_vals = [], []
    for eps in (0.1, 0.05, 0.025):
        f = sample_data(PlaneWaveModulated(theta, 1.0), eps, g)
        a_in = symbol(phi=phi, rho=Bump(1.0), xi0pp=(1.0,))
        a_out = symbol(phi=phi, rho=Complement(4.0), xi0pp=(1.0,))
        inner_vals.append(abs(two_micro_expect(f, a_in, eps).real - target))
        outer_vals.append(abs(two_micro_expect(f, a_out, eps)))
    # the eta content of theta is fixed, so chi(eta) does not tend to 1: the limit keeps rho(D) theta
    ref = mass(Field(g, np.fft.ifft(Bump(1.0)(g.k) * np.fft.fft(theta(g.x)))), phi(g.x))
    assert inner_vals[-1] < 1e-2 + abs(ref - target)
    assert all(v < 1e-6 for v in outer_vals)


def test_hermitian_and_bounded(rng):
    g = Grid((16.0,), (1024,))
    a = symbol(phi=Bump(1.0), psi=Bump(2.0), rho=SmoothStep(1.0))
    for eps in (0.2, 0.1, 0.05):
        f = Field(g, np.exp(-g.x[0] ** 2) * (rng.normal(size=1024) + 1j * rng.normal(size=1024)))
        v = two_micro_expect(f, a, eps)
        assert abs(v.imag) <= 1e-10 * max(1.0, abs(v))
        assert abs(v) <= 1.05 * a.sup * f.norm() ** 2


def test_cutoff_partition_identity():
    a = symbol(phi=Bump(1.0), psi=Bump(3.0), rho=SmoothStep(1.0), xi0pp=(1.0,))
    c = CutoffParams(4.0, 0.5)
    total = apply_cutoffs(a, c, "outer") + apply_cutoffs(a, c, "inner")
    x = np.linspace(-3, 3, 7)[None, :, None, None]
    xi = np.linspace(-1, 3, 9)[None, None, :, None]
    eta = np.linspace(-20, 20, 41)[None, None, None, :]
    lhs = total.evaluate(x, xi, eta)
    rhs = a.evaluate(x, xi, eta) * Bump(0.5, (1.0,))(xi)
    assert np.allclose(lhs, rhs, atol=1e-15)
    outer = apply_cutoffs(symbol(phi=Bump(1.0)), c, "outer")
    small = np.linspace(-4, 4, 9)[None, None, None, :]
    assert np.all(outer.evaluate(x, xi * 0, small) == 0)
    assert a.in_class()
    with pytest.raises(ContractError):
        apply_cutoffs(a, c, "middle")


def test_time_average_examples():
    eps = 0.1
    f, _ = _field(eps)
    a = symbol(phi=Bump(1.0))
    zero = builtin_symbol("iso_quadratic", d=1)
    w = TimeWindow(0.5, 2.0, 6)
    still = [(t, f) for t in w.times()]
    val = time_averaged_functional(still, a, w, eps)
    assert val.real == pytest.approx(1.5 * two_micro_expect(f, a, eps).real, rel=1e-12)
    b = symbol(phi=Bump(2.0))
    res = free_evolve(f, zero, eps, TimeWindow(0, 1, 8))
    lin = time_averaged_functional(res, a + b, TimeWindow(0, 1, 8), eps)
    sep = time_averaged_functional(res, a, TimeWindow(0, 1, 8), eps) + \
        time_averaged_functional(res, b, TimeWindow(0, 1, 8), eps)
    assert lin == pytest.approx(sep, rel=1e-12)
    with pytest.raises(ContractError):
        time_average(res, lambda u: 1.0, TimeWindow(0, 2, 8))


def test_converged_average_stops():
    f, _ = _field(0.1)
    sym = builtin_symbol("double_well_1d")
    val, win, change = converged_average(lambda w: free_evolve(f, sym, 0.1, w), lambda u: mass(u, Bump(1.0)(u.grid.x)),
                                         TimeWindow(0, 1, 50))
    assert change < 1e-3
    assert win.n_steps >= 50


def test_two_micro_under_resolved():
    g = Grid((10.0,), (64,))
    f = Field(g, np.exp(-g.x[0] ** 2))
    with pytest.raises(UnderResolved):
        two_micro_expect(f, symbol(rho=Bump(0.01)), 0.001)


def test_flow_composition_splits_half_lines():
    a = symbol(phi=Bump(1.0), rho=Complement(1.0))
    b = compose_flow_1d(a, 2.0, 0.5)
    assert len(b.terms) == 2
    x = np.array([[1.0]])[:, :, None]
    val_pos = b.evaluate(x, np.zeros((1, 1, 1)), np.full((1, 1, 1), 5.0))
    val_ref = a.evaluate(x + 1.0, np.zeros((1, 1, 1)), np.full((1, 1, 1), 5.0))
    assert np.allclose(val_pos, val_ref)


def test_factor_basics():
    z = np.linspace(-5, 5, 11)[None, :]
    assert np.all(One()(z) == 1)
    s = SmoothStep(1.0)(z)
    assert s[0] == 0 and s[-1] == 1 and np.all(np.diff(s) >= 0)
    assert np.allclose(Bump(1.0)(z) + Complement(1.0)(z), 1)
