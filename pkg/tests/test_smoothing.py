import numpy as np
import pytest

from semilab.grid import Field, Grid
from semilab.initial_data import CoherentState, PlaneWaveModulated, gaussian
from semilab.propagator import TimeWindow, free_evolve
from semilab.smoothing import Ball, SmoothingReport, blowup_exponent, fit_slope, smoothing_norm
from semilab.symbols import ContractError, builtin_potential, builtin_symbol

DW = builtin_symbol("double_well_1d")
Z1 = builtin_potential("zero", 1)


def test_ball():
    g = Grid((4.0,), (64,))
    ind = Ball((0.0,), 1.0).indicator(g)
    assert ind.sum() * g.spacing[0] == pytest.approx(2.0, abs=2 * g.spacing[0])
    with pytest.raises(ContractError):
        Ball((3.5,), 1.0).check(g)


def test_smoothing_norm_stationary_s0():
    g = Grid((4.0,), (64,))
    u = Field(g, np.ones(64))
    snaps = [(t, u) for t in np.linspace(0, 0.5, 6)]
    val = smoothing_norm(snaps, 0.0, Ball((0.0,), 1.0), 0.5)
    assert val == pytest.approx(0.5 * Ball((0.0,), 1.0).indicator(g).sum() * g.spacing[0])
    with pytest.raises(ContractError):
        smoothing_norm(snaps[:3], 0.0, Ball((0.0,), 1.0), 0.5)
    with pytest.raises(ContractError):
        smoothing_norm(snaps, -1.0, Ball((0.0,), 1.0), 0.5)


def test_half_derivative_of_plane_wave():
    g = Grid((2 * np.pi,), (128,))
    k = g.k[0][5]
    u = Field(g, np.exp(1j * k * g.x[0]))
    snaps = free_evolve(u, builtin_symbol("iso_quadratic", d=1), 1.0, TimeWindow(0, 1, 4))
    B = Ball((0.0,), 1.0)
    s0 = smoothing_norm(snaps, 0.0, B, 1.0)
    s1 = smoothing_norm(snaps, 0.5, B, 1.0)
    assert s1 == pytest.approx(abs(k) * s0, rel=1e-12)


def test_fit_slope():
    e = np.array([0.2, 0.1, 0.05, 0.025])
    slope, res = fit_slope(e, 3 * e ** -1.0)
    assert slope == pytest.approx(-1.0) and res < 1e-12


def test_report_rejects_negative():
    with pytest.raises(ContractError):
        SmoothingReport([0.1], [-1.0], 0.5, 0.5, Ball((0.0,), 1.0))


def test_blowup_contracts():
    with pytest.raises(ContractError):
        blowup_exponent(CoherentState(gaussian(1.0), 0.0, 1.0), DW, Z1, 0.5, 0.5, Ball((0.0,), 1.0), [0.2, 0.1])
    with pytest.raises(ContractError):
        blowup_exponent(PlaneWaveModulated(gaussian(1.0), 0.5), DW, Z1, 0.5, 0.5, Ball((0.0,), 1.0), [0.2, 0.1])
    with pytest.raises(ContractError):
        blowup_exponent(PlaneWaveModulated(gaussian(1.0), 1.0), DW, Z1, 0.5, 0.5, Ball((0.0,), 1.0), [0.2])


def test_slope_requires_a_decade():
    rep = blowup_exponent(PlaneWaveModulated(gaussian(1.0), 1.0), DW, Z1, 0.5, 0.5, Ball((0.0,), 1.0),
                          [0.2, 0.1], n_steps=50)
    assert rep.slope is None
    assert rep.S[1] > rep.S[0] > 0


def _snaps(c=1.0):
    fam = PlaneWaveModulated(gaussian(1.0), 1.0)
    from semilab.initial_data import auto_grid, sample_data
    g = auto_grid(fam, 0.1, DW, T=1.0, extent=2.0)
    u0 = sample_data(fam, 0.1, g) * c
    return free_evolve(u0, DW, 0.1, TimeWindow(0, 1, 20))


def test_monotone_in_delta_and_ball():
    snaps = _snaps()
    small = smoothing_norm(snaps, 0.5, Ball((0.0,), 0.5), 0.5)
    big = smoothing_norm(snaps, 0.5, Ball((0.0,), 1.0), 0.5)
    longer = smoothing_norm(snaps, 0.5, Ball((0.0,), 1.0), 1.0)
    assert small <= big <= longer


def test_homogeneity():
    a = smoothing_norm(_snaps(1.0), 0.5, Ball((0.0,), 1.0), 0.5)
    b = smoothing_norm(_snaps(3.0), 0.5, Ball((0.0,), 1.0), 0.5)
    assert b == pytest.approx(9 * a, rel=1e-12)


def test_mass_bound_at_s0():
    snaps = _snaps()
    val = smoothing_norm(snaps, 0.0, Ball((0.0,), 1.0), 0.5)
    assert val <= 0.5 * snaps.states[0].norm() ** 2


def test_frozen_plane_wave_carrier_scaling():
    # lambda = 0: S = delta (|xi0|/eps)^(2s) ||theta||^2_B up to the narrow-band approximation
    from semilab.initial_data import sample_data
    from semilab.symbols import SymbolSpec
    flat = SymbolSpec("zero", 1, lambda xi: np.zeros(xi.shape[1:]), None, None, 0.0, None)
    eps = 0.01
    g = Grid((8.0,), (4096,))
    fam = PlaneWaveModulated(gaussian(1.0), 1.0)
    u0 = sample_data(fam, eps, g)
    snaps = free_evolve(u0, flat, eps, TimeWindow(0, 0.5, 2))
    B = Ball((0.0,), 1.0)
    theta_B = float(np.sum(np.abs(u0.values) ** 2 * B.indicator(g)) * g.spacing[0])
    assert smoothing_norm(snaps, 0.5, B, 0.5) == pytest.approx(0.5 * theta_B / eps, rel=0.01)


def test_s0_slope_is_flat_and_noncritical_disperses():
    eps = [0.2, 0.1, 0.05, 0.02]
    B = Ball((0.0,), 1.0)
    flat = blowup_exponent(PlaneWaveModulated(gaussian(1.0), 1.0), DW, Z1, 0.0, 0.5, B, eps, n_steps=50)
    assert flat.slope == pytest.approx(0.0, abs=0.1)
    away = blowup_exponent(PlaneWaveModulated(gaussian(1.0), 0.5), DW, Z1, 0.5, 0.5, B, eps, n_steps=50,
                           require_critical=False)
    scaled = [s * e for s, e in zip(away.S, eps)]
    assert scaled[-1] < 0.2 * scaled[0]
