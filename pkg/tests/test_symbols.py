import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semilab.grid import Grid
from semilab.symbols import (SYMBOL_TAGS, AffineManifold, ContractError, FinitePoints, builtin_potential,
                             builtin_symbol, classify_critical, eval_symbol, growth_constant, quadratic_form)

CATALOG = [
    ("iso_quadratic", {"d": 1}), ("iso_quadratic", {"d": 2}), ("shifted_quadratic", {"xi0": [0.5, -1.0]}),
    ("quartic_degenerate", {"d": 1}), ("quartic_degenerate", {"d": 2}), ("double_well_1d", {}),
    ("manifold_quadratic", {"r": 1, "p": 1}), ("manifold_quartic", {"r": 1, "p": 1}),
]


def _fd_grad(sym, xi, h=1e-5):
    g = np.zeros_like(xi)
    for i in range(xi.size):
        e = np.zeros_like(xi)
        e[i] = h
        g[i] = (sym.eval(xi + e) - sym.eval(xi - e)) / (2 * h)
    return g


def _fd_hess(sym, xi, h=1e-5):
    H = np.zeros((xi.size, xi.size))
    for i in range(xi.size):
        e = np.zeros_like(xi)
        e[i] = h
        H[:, i] = (sym.grad(xi + e) - sym.grad(xi - e)) / (2 * h)
    return H


def _rel(a, b):
    return np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b))


def test_eval_examples():
    assert eval_symbol(builtin_symbol("iso_quadratic", d=2), [0, 0]) == 0
    assert eval_symbol(builtin_symbol("quartic_degenerate", d=2), [1, 1]) == 2
    assert eval_symbol(builtin_symbol("double_well_1d"), [1]) == 0


def test_dimension_mismatch():
    with pytest.raises(ContractError):
        builtin_symbol("iso_quadratic", d=2).eval([1.0])


def test_unknown_tag():
    with pytest.raises(ContractError):
        builtin_symbol("sextic")


@pytest.mark.parametrize("tag,params", CATALOG)
@settings(max_examples=20, deadline=None)
@given(data=st.data())
def test_derivatives_match_finite_differences(tag, params, data):
    sym = builtin_symbol(tag, **params)
    xi = np.array(data.draw(st.lists(st.floats(-10 / np.sqrt(2), 10 / np.sqrt(2)),
                                     min_size=sym.dimension, max_size=sym.dimension)))
    assert _rel(sym.grad(xi), _fd_grad(sym, xi)) <= 1e-6
    assert _rel(sym.hess(xi), _fd_hess(sym, xi)) <= 1e-6
    assert np.allclose(sym.hess(xi), sym.hess(xi).T)


@pytest.mark.parametrize("tag,params", CATALOG)
def test_declared_critical_points(tag, params):
    sym = builtin_symbol(tag, **params)
    for cp in sym.critical_points():
        assert np.linalg.norm(sym.grad(cp.location)) <= 1e-12
        assert cp.hessian_rank + len(cp.kernel_basis) == sym.dimension
        for v in cp.kernel_basis:
            assert np.linalg.norm(sym.hess(cp.location) @ v) <= 1e-10


@pytest.mark.parametrize("tag,params", CATALOG)
def test_growth_bound(tag, params):
    sym = builtin_symbol(tag, **params)
    assert np.isfinite(growth_constant(sym, 100.0))


def test_classify_examples():
    assert classify_critical(builtin_symbol("iso_quadratic", d=2), [0, 0]).kind == "nondegenerate"
    assert classify_critical(builtin_symbol("iso_quadratic", d=2), [1, 0]).kind == "not_critical"
    c = classify_critical(builtin_symbol("quartic_degenerate", d=2), [0, 0])
    assert c.kind == "degenerate"
    assert len(c.kernel_basis) == 1
    assert abs(abs(c.kernel_basis[0] @ np.array([0.0, 1.0])) - 1) < 1e-12
    with pytest.raises(ContractError):
        classify_critical(builtin_symbol("iso_quadratic", d=1), [0], tol=0)


def test_double_well_catalog():
    sym = builtin_symbol("double_well_1d")
    assert isinstance(sym.critical_set, FinitePoints)
    locs = sorted(float(cp.location[0]) for cp in sym.critical_points())
    assert locs == [-1.0, 0.0, 1.0]
    for cp in sym.critical_points():
        assert not cp.degenerate


def test_manifold_catalog():
    sym = builtin_symbol("manifold_quadratic", r=1, p=1)
    cs = sym.critical_set
    assert isinstance(cs, AffineManifold) and (cs.r, cs.p) == (1, 1)
    assert np.allclose(cs.base, 0)
    for x1 in (-2.0, 0.3, 5.0):
        assert np.allclose(sym.grad([x1, 0.0]), 0)
    assert np.allclose(sym.manifold_hessian([0.7]), [[2.0]])
    # quartic variant: the manifold Hessian vanishes, rank below p
    assert np.allclose(builtin_symbol("manifold_quartic", r=1, p=1).manifold_hessian([0.0]), 0)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(-3, 3), y=st.floats(-3, 3), t1=st.floats(1e-10, 1e-3), t2=st.floats(1e-3, 1.0))
def test_classify_tol_monotone(x, y, t1, t2):
    sym = builtin_symbol("quartic_degenerate", d=2)
    small, large = classify_critical(sym, [x, y], t1), classify_critical(sym, [x, y], t2)
    if small.kind == "degenerate":
        assert large.kind != "nondegenerate"


def test_quadratic_form_half_convention():
    sym = quadratic_form([[2.0, 0.0], [0.0, 4.0]])
    assert sym.eval([1.0, 1.0]) == pytest.approx(3.0)
    assert np.allclose(sym.hess([0.3, 0.1]), [[2, 0], [0, 4]])


def test_potentials():
    z = builtin_potential("zero", 2)
    assert z.is_zero and z.eval([1, 2]) == 0
    c = builtin_potential("cosine", 1, amplitudes=[2.0], wavenumbers=[1.0])
    assert c.eval([0.0]) == pytest.approx(2.0) and c.sup_norm == 2.0
    c.check_grid(Grid((np.pi * 4,), (64,)))
    with pytest.raises(ContractError):
        c.check_grid(Grid((5.0,), (64,)))
    b = builtin_potential("gaussian_bump", 1, center=[0.0], width=1.0, height=3.0)
    assert b.eval([0.0]) == pytest.approx(3.0)
    b.check_grid(Grid((20.0,), (64,)))
    with pytest.raises(ContractError):
        b.check_grid(Grid((2.0,), (64,)))
    with pytest.raises(ContractError):
        builtin_potential("random")


def test_potential_restrict():
    V = builtin_potential("cosine", 2, amplitudes=[1.0, 2.0], wavenumbers=[1.0, 1.0])
    W = V.restrict([0.0])
    assert W.dimension == 1
    assert W.eval([0.0]) == pytest.approx(3.0)


def test_catalog_tags_build():
    for tag in SYMBOL_TAGS:
        params = {"xi0": [1.0]} if tag == "shifted_quadratic" else {}
        assert builtin_symbol(tag, **params).dimension >= 1
