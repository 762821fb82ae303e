import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ccmodel import model_core as mc
from ccmodel.errors import ConvergenceError

couplings = st.floats(1e-4, 1e4)


def exact_series(order=4):
    """Coefficients of both series ratios in alpha0 from the fixed point, by sympy."""
    a, t = sympy.symbols("alpha0 t", positive=True)
    # iterate the fixed point symbolically; each pass fixes one more order
    approx = sympy.Integer(0)
    for _ in range(order + 1):
        approx = sympy.series(2 * a * (2 * (1 + approx) / (2 + approx)) ** sympy.Rational(3, 2),
                              a, 0, order + 1).removeO()
    s = 1 + approx
    coupling = sympy.series(approx / (2 * a), a, 0, order).removeO()
    cutoff = sympy.series(sympy.sqrt(2 * s / (1 + s)), a, 0, order).removeO()
    return ([float(coupling.coeff(a, j)) for j in range(order)],
            [float(cutoff.coeff(a, j)) for j in range(order)])


@settings(max_examples=100, deadline=None)
@given(M=st.floats(0.1, 10.0), G=couplings, c=st.floats(0.5, 3.0))
def test_renormalize_inverts_scheme_from_physical(M, G, c):
    sch = mc.scheme_from_physical(M, G, c)
    back = mc.renormalize(sch.bare)
    assert back.G == pytest.approx(G, rel=1e-9)
    assert back.M == pytest.approx(M, rel=1e-9)
    assert back.Lambda == pytest.approx(sch.Lambda, rel=1e-9)
    assert back.g == pytest.approx(sch.g, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(M=st.floats(0.1, 10.0), G=couplings)
def test_scheme_relations(M, G):
    sch = mc.scheme_from_physical(M, G)
    s = math.sqrt(1 + G)
    assert sch.m == pytest.approx(M * (1 + s) / 2, rel=1e-12)
    assert sch.g == pytest.approx((s - 1) * sch.m, rel=1e-12)
    assert sch.k2_avg == pytest.approx(M * M * s * (1 + s), rel=1e-12)
    assert sch.Lambda ** 2 == pytest.approx(5 * sch.k2_avg / 3, rel=1e-12)
    assert sch.lam * sch.Lambda ** 3 == pytest.approx(6 * math.pi ** 2 * sch.g, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(M=st.floats(0.1, 10.0), G=couplings)
def test_vacuum_energy_forms_agree(M, G):
    sch = mc.scheme_from_physical(M, G)
    assert mc.vacuum_energy_density(sch) == pytest.approx(
        mc.vacuum_energy_density_physical(M, G), rel=1e-9, abs=1e-12 * M * (1 + G))


@settings(max_examples=100, deadline=None)
@given(G=couplings)
def test_gap_sum_matches_branch_energies(G):
    sch = mc.scheme_from_physical(1.0, G)
    gaps = mc.masses_and_gaps(sch)
    assert gaps.E_A0 + gaps.E_Atilde0 == pytest.approx(mc.gap_sum(sch), rel=1e-10, abs=1e-12)
    assert gaps.bare_mass_from_A == pytest.approx(sch.m / (1 + sch.g / (2 * sch.m)) * (1 + sch.s) / 2, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(G=st.floats(15.5, 1e4))
def test_both_branch_masses_recover_bare_mass(G):
    gaps = mc.masses_and_gaps(mc.scheme_from_physical(1.0, G))
    assert gaps.alpha > 0
    assert gaps.bare_mass_from_Atilde == pytest.approx(gaps.bare_mass_from_A, rel=1e-9)


def test_regimes():
    assert mc.regime_of(mc.scheme_from_physical(1.0, 0.0)) is mc.Regime.HOLE
    assert mc.regime_of(mc.scheme_from_physical(1.0, 3.0)) is mc.Regime.BUBBLE
    assert mc.regime_of(mc.scheme_from_physical(1.0, 8.0)) is mc.Regime.PIERCING
    assert mc.regime_of(mc.scheme_from_physical(1.0, 20.0)) is mc.Regime.PARTICLE
    assert math.isinf(mc.masses_and_gaps(mc.scheme_from_physical(1.0, 8.0)).m_Atilde)


def test_spectrum_branches_at_zero_coupling():
    sch = mc.scheme_from_physical(2.0, 0.0)
    k = np.array([0.0, 0.5, 1.0])
    free = k ** 2 / 4.0 + 2.0
    assert np.allclose(mc.spectrum("A", k, sch), free)
    assert np.allclose(mc.spectrum("Atilde", k, sch), -free)
    assert np.allclose(mc.spectrum("B", k, sch), free)
    with pytest.raises(ValueError):
        mc.spectrum("C", 0.0, sch)


def test_critical_coupling_is_root_of_quadratic():
    roots = np.roots([1.0, -13.0 / 4.0, -2.0])
    assert mc.critical_coupling() == pytest.approx(max(roots.real), abs=1e-14)
    gcr = mc.critical_coupling()
    assert mc.vacuum_energy_density_physical(1.0, gcr) == pytest.approx(0.0, abs=1e-12)
    assert mc.classify_phase(gcr) is mc.Phase.CRITICAL
    assert mc.classify_phase(gcr - 0.01) is mc.Phase.SYMMETRIC_PREFERRED
    assert mc.classify_phase(gcr + 0.01) is mc.Phase.BROKEN_PREFERRED


@pytest.mark.parametrize("bad", [(0.0, 1.0), (1.0, -1.0)])
def test_scheme_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        mc.scheme_from_physical(*bad)


@pytest.mark.parametrize("kwargs", [dict(m=0.0, lam=1.0), dict(m=1.0, lam=-1.0), dict(m=1.0, lam=1.0, c=0.0)])
def test_bare_params_validation(kwargs):
    with pytest.raises(ValueError):
        mc.BareParams(**kwargs)


def test_renormalize_reports_exhausted_budget():
    with pytest.raises(ConvergenceError) as info:
        mc.renormalize(mc.BareParams(1.0, 50.0), max_iterations=2)
    assert len(info.value.trace) == 3


def test_series_leading_coefficients_match_exact_expansion():
    coupling, cutoff = exact_series()
    assert coupling[:2] == pytest.approx([1.0, 1.5], abs=1e-12)
    assert cutoff[:2] == pytest.approx([1.0, 0.5], abs=1e-12)
    fit = mc.fit_series_coefficients()
    assert fit["coupling"][:2] == pytest.approx(coupling[:2], abs=1e-3)
    assert fit["cutoff"][:2] == pytest.approx(cutoff[:2], abs=1e-3)
    # second order is only loosely pinned by a cubic fit
    assert fit["coupling"][2] == pytest.approx(coupling[2], abs=0.05)
    assert fit["cutoff"][2] == pytest.approx(cutoff[2], abs=0.05)


@pytest.mark.parametrize("alpha0", [1e-2, 1e-3, 1e-4])
def test_series_ratios_follow_truncated_expansion(alpha0):
    coupling, cutoff = exact_series()
    gr, cr = mc.series_ratios(alpha0)
    assert gr == pytest.approx(np.polyval(coupling[::-1], alpha0), abs=10 * alpha0 ** 4)
    assert cr == pytest.approx(np.polyval(cutoff[::-1], alpha0), abs=10 * alpha0 ** 4)
