import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from ccmodel import numerics
from ccmodel.errors import DivergentIntegralError, RootBracketError


def quad_reference(power, cutoff, chi):
    val, _ = integrate.quad(lambda k: k ** power / (k * k + chi * chi), 0.0, cutoff,
                            epsabs=0.0, epsrel=1e-13, limit=400)
    return val


@pytest.mark.parametrize("power", [0, 2, 4, 6])
@pytest.mark.parametrize("ratio", [1e-3, 0.3, 0.49, 0.51, 1.0, 3.0, 40.0])
def test_radial_integral_matches_quadrature(power, ratio):
    cutoff = 2.5
    chi = cutoff / ratio
    got = numerics.radial_integral(power, cutoff, chi)
    assert got == pytest.approx(quad_reference(power, cutoff, chi), rel=1e-11)


def test_zero_pole_scale_is_closed_form():
    assert numerics.radial_integral(4, 2.0) == pytest.approx(8.0 / 3.0, rel=1e-15)


def test_power_zero_diverges_at_zero_pole_scale():
    with pytest.raises(DivergentIntegralError):
        numerics.radial_integral(0, 1.0, 0.0)


@pytest.mark.parametrize("args", [(3, 1.0, 1.0), (2, 0.0, 1.0), (2, 1.0, -1.0)])
def test_radial_integral_rejects_bad_input(args):
    with pytest.raises(ValueError):
        numerics.radial_integral(*args)


@settings(max_examples=200, deadline=None)
@given(power=st.sampled_from([2, 4, 6]),
       cutoff=st.floats(1e-2, 1e2),
       chi=st.floats(1e-6, 1e3))
def test_radial_integral_bounded_by_massless_limit(power, cutoff, chi):
    got = numerics.radial_integral(power, cutoff, chi)
    assert 0.0 < got <= numerics.radial_integral(power, cutoff) * (1 + 1e-12)


@settings(max_examples=100, deadline=None)
@given(power=st.sampled_from([0, 2, 4, 6]),
       cutoff=st.floats(1e-2, 1e2),
       chi=st.floats(1e-4, 1e3))
def test_recurrence_between_powers(power, cutoff, chi):
    # R_(p+2) + chi^2 R_p = cutoff^(p+1) / (p+1)
    if power == 6:
        return
    lhs = numerics.radial_integral(power + 2, cutoff, chi) + chi * chi * numerics.radial_integral(power, cutoff, chi)
    assert lhs == pytest.approx(cutoff ** (power + 1) / (power + 1), rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(1e-3, 0.999))
def test_continuity_across_series_switch(x):
    # both evaluation routes must agree where they meet
    a = numerics.radial_integral(2, 0.5 - 1e-12, 1.0)
    b = numerics.radial_integral(2, 0.5 + 1e-12, 1.0)
    assert a == pytest.approx(b, rel=1e-10)
    assert numerics.radial_integral(2, x, 1.0) == pytest.approx(x - math.atan(x), rel=1e-8)


def test_find_root_and_bracket_errors():
    assert numerics.find_root(lambda x: x * x - 2.0, 0.0, 2.0) == pytest.approx(math.sqrt(2.0), abs=1e-12)
    with pytest.raises(RootBracketError) as info:
        numerics.find_root(lambda x: x * x + 1.0, -1.0, 1.0)
    assert info.value.trace
    with pytest.raises(ValueError):
        numerics.find_root(lambda x: x, 1.0, 0.0)


def test_quadrature_and_sign_changes():
    assert numerics.quadrature(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)
    hits, trace = numerics.sign_changes(math.cos, [0.0, 1.0, 2.0, 4.0, 5.0])
    assert hits == [(1.0, 2.0), (4.0, 5.0)]
    assert len(trace) == 5


@pytest.mark.parametrize("power", [2, 4, 6])
def test_subnormal_pole_scale_stays_finite(power):
    got = numerics.radial_integral(power, 1.0, 2.2e-309)
    assert got == pytest.approx(1.0 / (power - 1), rel=1e-12)
