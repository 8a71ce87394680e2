import numpy as np
import pytest

from semilab.grid import Field, Grid, l2_norm
from semilab.initial_data import PlaneWaveModulated, gaussian, sample_data
from semilab.propagator import (EvolutionResult, StepSizeError, TimeWindow, evolve, free_evolve,
                                heisenberg_rank1_evolve, min_strang_steps, profile_evolve, rank_one_trace,
                                strang_evolve)
from semilab.symbols import ContractError, SymbolSpec, builtin_potential, builtin_symbol

ZERO1 = builtin_potential("zero", 1)
COS1 = builtin_potential("cosine", 1, amplitudes=[1.0], wavenumbers=[1.0])


def _gauss(g, x0=0.0):
    return Field(g, np.pi ** -0.25 * np.exp(-(g.x[0] - x0) ** 2 / 2))


def test_time_window():
    w = TimeWindow(0.0, 1.0, 10, stride=3)
    assert w.dt == pytest.approx(0.1)
    assert w.snapshot_times().tolist() == pytest.approx([0, 0.3, 0.6, 0.9, 1.0])
    assert w.integral() == 1.0
    assert w.refined().n_steps == 20
    s = TimeWindow(0.0, 4.0, 10, smooth=True)
    assert s.weight(2.0) == 1.0 and s.weight(0.0) == 0.0
    assert 2.0 < s.integral() < 4.0
    with pytest.raises(ContractError):
        TimeWindow(1.0, 1.0, 10)
    with pytest.raises(ContractError):
        TimeWindow(0.0, 1.0, 0)


def test_evolution_result_times_increase():
    g = Grid((1.0,), (8,))
    f = Field(g, np.zeros(8))
    with pytest.raises(ContractError):
        EvolutionResult([0.0, 0.0], [f, f], "exact_free")


def test_plane_wave_phase(backend):
    g = Grid((np.pi,), (64,))
    eps = 0.1
    k = g.k[0][3]
    u0 = Field(g, np.exp(1j * k * g.x[0]))
    res = free_evolve(u0, builtin_symbol("iso_quadratic", d=1), eps, TimeWindow(0, 1, 4))
    for t, u in res:
        assert np.allclose(u.values, np.exp(-1j * t * k ** 2) * u0.values, atol=1e-12)


def test_free_gaussian_spreading(backend):
    # i u_t = -u_xx from exp(-x^2/2): |u|^2 = exp(-x^2/s^2) / (sqrt(pi) s), s^2 = 1 + 4 t^2
    g = Grid((40.0,), (1024,))
    res = free_evolve(_gauss(g), builtin_symbol("iso_quadratic", d=1), 1.0, TimeWindow(0, 2, 4))
    x = g.x[0]
    for t, u in res:
        s = np.sqrt(1 + 4 * t ** 2)
        exact = np.exp(-x ** 2 / s ** 2) / (np.sqrt(np.pi) * s)
        assert np.max(np.abs(u.density() - exact)) < 1e-12
    assert res.max_drift < 1e-13


@pytest.mark.parametrize("tag,params", [("iso_quadratic", {"d": 1}), ("double_well_1d", {}),
                                        ("quartic_degenerate", {"d": 1})])
@pytest.mark.parametrize("eps", [0.2, 0.05])
def test_unitarity(tag, params, eps, backend):
    sym = builtin_symbol(tag, **params)
    fam = PlaneWaveModulated(gaussian(1.0), 1.0)
    g = Grid((12 * np.pi,), (4096,))
    u0 = sample_data(fam, eps, g)
    res = free_evolve(u0, sym, eps, TimeWindow(0, 1, 20))
    assert res.max_drift < 1e-13
    res = strang_evolve(u0, sym, COS1, eps, TimeWindow(0, 1, 40))
    assert res.max_drift < 1e-10


def test_time_reversal():
    g = Grid((20.0,), (512,))
    u0 = _gauss(g, 1.0)
    sym = builtin_symbol("double_well_1d")
    (_, fwd), = list(free_evolve(u0, sym, 0.3, TimeWindow(0, 0.7, 1)))[1:]
    back = free_evolve(fwd, SymbolSpec("neg", 1, lambda xi: -sym.func(xi), None, None, 4.0, None),
                       0.3, TimeWindow(0, 0.7, 1)).states[-1]
    assert np.max(np.abs(back.values - u0.values)) < 1e-12


def test_scaling_consistency():
    g = Grid((20.0,), (512,))
    u0 = _gauss(g)
    sym = builtin_symbol("iso_quadratic", d=1)
    a = free_evolve(u0, sym, 0.05, TimeWindow(0.2, 1, 4))
    b = free_evolve(u0, sym, 1.0, TimeWindow(0.2, 1, 4))
    for ua, ub in zip(a.states, b.states):
        assert np.max(np.abs(ua.values - ub.values)) < 1e-12


def test_strang_zero_potential_matches_free():
    g = Grid((20.0,), (512,))
    u0 = _gauss(g)
    sym = builtin_symbol("double_well_1d")
    w = TimeWindow(0, 1, 10)
    a = free_evolve(u0, sym, 0.2, w)
    b = strang_evolve(u0, sym, ZERO1, 0.2, w)
    assert b.method == "strang"
    for ua, ub in zip(a.states, b.states):
        assert np.max(np.abs(ua.values - ub.values)) < 1e-12


def test_strang_commuting_case():
    g = Grid((4 * np.pi,), (256,))
    u0 = _gauss(g)
    zero_sym = SymbolSpec("zero", 1, lambda xi: np.zeros(xi.shape[1:]), None, None, 0.0, None)
    res = strang_evolve(u0, zero_sym, COS1, 0.5, TimeWindow(0, 1, 10))
    V = np.cos(g.x[0])
    for t, u in res:
        assert np.allclose(u.values, np.exp(-1j * t * V) * u0.values, atol=1e-13)


def test_strang_step_size_refusal():
    g = Grid((4 * np.pi,), (256,))
    V = builtin_potential("cosine", 1, amplitudes=[3.0], wavenumbers=[1.0])
    w = TimeWindow(0, 1, 10)
    assert min_strang_steps(V, w) == 30
    with pytest.raises(StepSizeError) as e:
        strang_evolve(_gauss(g), builtin_symbol("iso_quadratic", d=1), V, 1.0, w)
    assert e.value.min_steps == 30


def test_strang_second_order():
    g = Grid((8 * np.pi,), (512,))
    u0 = _gauss(g)
    sym = builtin_symbol("iso_quadratic", d=1)

    def final(n):
        return strang_evolve(u0, sym, COS1, 1.0, TimeWindow(0, 1, n, n)).states[-1]

    ref = final(160)
    e1, e2 = (l2_norm(final(n) - ref) for n in (20, 40))
    assert np.log2(e1 / e2) == pytest.approx(2.0, abs=0.1)


def test_eps_must_be_positive():
    g = Grid((1.0,), (8,))
    with pytest.raises(ContractError):
        free_evolve(Field(g, np.ones(8)), builtin_symbol("iso_quadratic", d=1), 0.0, TimeWindow(0, 1, 1))


def test_profile_examples():
    g = Grid((20.0,), (256,))
    th = _gauss(g)
    res = profile_evolve(th, [[0.0]], ZERO1, TimeWindow(0, 1, 3))
    for _, u in res:
        assert np.allclose(u.values, th.values)
    a = profile_evolve(th, [[2.0]], ZERO1, TimeWindow(0, 1, 3))
    b = free_evolve(th, builtin_symbol("iso_quadratic", d=1), 1.0, TimeWindow(0, 1, 3))
    for ua, ub in zip(a.states, b.states):
        assert np.allclose(ua.values, ub.values, atol=1e-13)
    with pytest.raises(ContractError):
        profile_evolve(th, [[1.0, 0.0], [1.0, 1.0]], builtin_potential("zero", 2), TimeWindow(0, 1, 1))


def test_profile_spreads_in_one_direction():
    g = Grid((20.0, 20.0), (128, 128))
    th = Field(g, np.exp(-(g.x[0] ** 2 + g.x[1] ** 2) / 2) / np.sqrt(np.pi))
    res = profile_evolve(th, np.diag([2.0, 0.0]), builtin_potential("zero", 2), TimeWindow(0, 1, 2))
    u = res.states[-1]
    dens = u.density()
    w1 = np.sum(dens * g.x[0] ** 2) / np.sum(dens)
    w2 = np.sum(dens * g.x[1] ** 2) / np.sum(dens)
    # x1 variance (1 + 4 t^2)/2, x2 variance 1/2
    assert w1 == pytest.approx(2.5, rel=1e-8)
    assert w2 == pytest.approx(0.5, rel=1e-8)


def test_heisenberg_rank_one():
    sym = builtin_symbol("manifold_quadratic", r=1, p=1)
    g = Grid((20.0,), (256,))
    th = _gauss(g)
    w = TimeWindow(0, 1, 4)
    a = heisenberg_rank1_evolve(th, sym, [0.0], [0.5], ZERO1, w)
    b = profile_evolve(th, [[2.0]], ZERO1, w)
    for ua, ub in zip(a.states, b.states):
        assert np.allclose(ua.values, ub.values, atol=1e-13)
        assert rank_one_trace(ua, lambda y: np.ones(y.shape[1:])) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ContractError):
        heisenberg_rank1_evolve(th, builtin_symbol("double_well_1d"), [0.0], [0.0], ZERO1, w)


def test_profile_vs_full_consistency():
    # conjugated full solution approaches the profile flow as eps -> 0
    sym = builtin_symbol("double_well_1d")
    fam = PlaneWaveModulated(gaussian(1.0), 1.0)
    g = Grid((30.0,), (8192,))
    w = TimeWindow(0, 0.5, 1)
    prof = profile_evolve(Field(g, fam.theta(g.x)), sym.hess([1.0]), ZERO1, w).states[-1]
    errs = []
    for eps in (0.1, 0.05, 0.025):
        u = evolve(sample_data(fam, eps, g), sym, ZERO1, eps, w).states[-1]
        conj = Field(g, np.exp(-1j * g.x[0] / eps) * u.values)
        errs.append(l2_norm(conj - prof))
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] < 0.1
