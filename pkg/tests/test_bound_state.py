import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from scipy import integrate

from ccmodel import bound_state as bs
from ccmodel import model_core as mc
from ccmodel.errors import DegenerateSolutionError


def test_existence_threshold_matches_symbolic_root():
    G = sympy.symbols("G", positive=True)
    s = sympy.sqrt(1 + G)
    c1 = G * sympy.Rational(9, 20) * (3 + 2 * G + s) / (1 + G + s)
    exact = float(sympy.nsolve(c1 - 1, G, 1.2, prec=30))
    assert bs.existence_threshold() == pytest.approx(exact, abs=1e-12)
    assert 1.18 < exact < 1.19


def test_printed_coefficient_never_reaches_one():
    for G in (1.0, 10.0, 1e3, 1e6):
        assert bs.c1_coefficient(G, "printed") < 0.9
        assert bs.solve_transcendental(G, "printed") is None
    with pytest.raises(ValueError):
        bs.c1_coefficient(2.0, "other")


@pytest.mark.parametrize("G", [1.5, 2.0, 5.0, 10.0])
def test_integrals_match_quadrature(G):
    sch = mc.scheme_from_physical(1.0, G)
    chi = 0.37 * sch.Lambda
    a = 1.0 / (4.0 * sch.m ** 2)
    pref = sch.lam * sch.M / math.pi ** 2
    q = lambda f: integrate.quad(lambda k: f(k) / (k * k + chi * chi), 0.0, sch.Lambda,
                                 epsabs=0.0, epsrel=1e-13)[0]
    ints = bs.integrals_I(sch, chi)
    assert ints.I1 == pytest.approx(pref * q(lambda k: k ** 2 + a * k ** 4), rel=1e-10)
    assert ints.I2 == pytest.approx(pref * q(lambda k: k ** 4 + a * k ** 6), rel=1e-10)
    assert ints.I3 == pytest.approx(pref * q(lambda k: a * k ** 2), rel=1e-10)
    assert ints.I4 == pytest.approx(pref * q(lambda k: a * k ** 4), rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(G=st.floats(1.3, 1e3))
def test_three_routes_give_one_solution(G):
    sch = mc.scheme_from_physical(1.0, G)
    res = bs.solve_isoscalar(sch)
    assert res.exists
    assert res.diagnostics["triple_equivalence"]
    assert res.z == pytest.approx(bs.solve_transcendental(G), rel=1e-8)
    assert res.mu0 == pytest.approx(2 * sch.M - res.chi ** 2 / sch.M, rel=1e-12)
    ints = bs.integrals_I(sch, res.chi)
    assert ints.I1 == pytest.approx(4 * sch.m ** 2 * ints.I3 + ints.I4, rel=1e-10)


@pytest.mark.parametrize("G", [0.5, 1.0, 1.1])
def test_no_isoscalar_state_below_threshold(G):
    res = bs.solve_isoscalar(mc.scheme_from_physical(1.0, G))
    assert not res.exists and res.z is None


def test_z_grows_toward_threshold():
    zs = [bs.solve_transcendental(G) for G in (10.0, 5.0, 2.0, 1.5, 1.2)]
    assert all(b > a for a, b in zip(zs, zs[1:]))


@settings(max_examples=100, deadline=None)
@given(G=st.floats(1e-3, 1e6), x=st.floats(0.0, 100.0))
def test_isovector_rhs_stays_below_two_thirds(G, x):
    sch = mc.scheme_from_physical(1.0, G)
    rhs = bs.isovector_rhs(G, x)
    assert 0.0 < rhs < 2.0 / 3.0
    assert bs.isovector_strength(sch, x * sch.Lambda) == pytest.approx(rhs, rel=1e-9)


@pytest.mark.parametrize("G", [0.5, 5.0, 1e6])
def test_isovector_solver_finds_nothing(G):
    res = bs.solve_isovector(mc.scheme_from_physical(1.0, G))
    assert not res.exists and res.diagnostics["below_bound"]


def test_wavefunction_is_self_consistent():
    sch = mc.scheme_from_physical(1.0, 3.0)
    res = bs.solve_isoscalar(sch)
    wf = bs.wavefunction(sch, res)
    assert wf.self_consistency < 1e-8
    assert wf.l2_norm > 0
    assert np.all(np.isfinite(wf(np.linspace(0, sch.Lambda, 5))))
    with pytest.raises(DegenerateSolutionError):
        bs.wavefunction(sch, bs.solve_isovector(sch))


def test_table1_rows_carry_reference_values():
    rows = bs.table1(G_values=(1.2, 5.0))
    assert [r.G for r in rows] == [1.2, 5.0]
    assert all(r.z_reference == bs.REFERENCE_Z[r.G] for r in rows)
    assert rows[1].z == pytest.approx(1.85, abs=5e-3)


@pytest.mark.parametrize("name", ["AA", "AtildeAtilde", "AAtilde"])
def test_other_sectors_run(name):
    sch = mc.scheme_from_physical(1.0, 3.0)
    pair = bs.sector(sch, name)
    res = bs.solve_isoscalar(sch, pair)
    assert res.diagnostics["sector"] == name
    with pytest.raises(ValueError):
        bs.sector(sch, "nope")


@pytest.mark.parametrize("kernel_sign", [1, -1])
@pytest.mark.parametrize("coupling", [0.15, -0.4])
def test_discrete_roots_are_matrix_eigenvalues(kernel_sign, coupling):
    half = np.array([0.3, 0.7, 1.1, 1.6])
    q = np.concatenate([half, -half])
    P = 1.0 + 1.3 * q ** 2
    a = 0.25
    kernel = kernel_sign + a * (q[:, None] + q[None, :]) ** 2
    expected = np.linalg.eigvalsh(np.diag(P) - coupling * kernel)
    roots = (bs.discrete_roots(q, P, coupling, a, kernel_sign, "even")
             + bs.discrete_roots(q, P, coupling, a, kernel_sign, "odd"))
    assert np.allclose(sorted(roots), expected, atol=1e-10, rtol=0)


def test_discrete_secular_rejects_unknown_parity():
    with pytest.raises(ValueError):
        bs.discrete_secular([0.1, -0.1], [1.0, 1.0], 0.1, 0.2, 1, "mixed")
