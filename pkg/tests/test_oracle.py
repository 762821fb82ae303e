import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccmodel.errors import DimensionBudgetError
from ccmodel.model_core import BareParams
from ccmodel.oracle import (AmplitudePair, FockSpace, ModeSet, OracleSettings, algebra_residuals,
                            amplitudes_from_angles, build_charges, build_hamiltonian, car_residuals,
                            form_invariance_check, rotate_amplitudes, run_oracle_suite,
                            transcription_report, verify_restoration)
from ccmodel.oracle.fock import norm_lower, norm_upper
from ccmodel.oracle.suite import VIOLATING_PAIR

BARE = BareParams(1.0, 0.8)
angles = st.floats(-math.pi, math.pi)


@pytest.fixture(scope="module")
def report():
    return run_oracle_suite(OracleSettings())


@pytest.fixture(scope="module")
def two_modes():
    modes = ModeSet.grid_1d(2, 0.7, 5.0)
    return modes, FockSpace(modes)


def test_suite_core_checks(report):
    failed = [(c.name, c.n_modes, c.value) for c in report.checks if c.group == "core" and not c.passed]
    assert not failed
    assert report.elapsed < 30.0


def test_suite_two_particle_checks(report):
    tp = [c for c in report.checks if c.group == "two_particle"]
    assert tp
    assert not [(c.name, c.value) for c in tp if not c.passed]


def test_report_serializes(report):
    out = report.to_dict()
    assert "vacuum_state" not in str(out["diagnostics"])
    assert out["passed"] is True


def test_car_and_vacuum_charge(two_modes):
    modes, space = two_modes
    assert max(car_residuals(space.ladders(), space.identity).values()) < 1e-13
    charges = build_charges(modes, 0.0, space)
    vac = space.vacuum()
    assert np.vdot(vac, charges.Q3 @ vac).real == -2.0


@settings(max_examples=15, deadline=None)
@given(theta=angles, psi=angles, phi=angles)
def test_admissible_amplitudes_have_no_fluctuation(theta, psi, phi):
    modes = ModeSet.grid_1d(1, 0.7, 5.0)
    amps = amplitudes_from_angles(theta, psi, phi)
    assert amps.is_admissible()
    parts = build_hamiltonian(modes, BARE, amps)
    assert norm_upper(parts.fluctuation) < 1e-12


@settings(max_examples=10, deadline=None)
@given(theta=angles, omega=angles)
def test_charges_commute_with_hamiltonian(theta, omega):
    modes = ModeSet.grid_1d(1, 0.7, 5.0)
    space = FockSpace(modes)
    amps = amplitudes_from_angles(theta)
    h = build_hamiltonian(modes, BARE, amps, space).total
    res = algebra_residuals(build_charges(modes, omega, space, amps), h)
    assert max(res.values()) < 1e-12


def test_violating_pair_produces_fluctuation(two_modes):
    modes, space = two_modes
    assert not VIOLATING_PAIR.is_admissible()
    parts = build_hamiltonian(modes, BARE, VIOLATING_PAIR, space)
    assert norm_lower(parts.fluctuation) > 1e-3


@settings(max_examples=50, deadline=None)
@given(theta=angles, a=angles, b=angles, c=angles, omega=angles)
def test_rotation_preserves_admissibility(theta, a, b, c, omega):
    rotated = rotate_amplitudes(amplitudes_from_angles(theta), a, b, c, omega)
    assert rotated.is_admissible(1e-12)


def test_form_invariance(two_modes):
    modes, space = two_modes
    amps = amplitudes_from_angles(0.3, 0.2, 0.1)
    charges = build_charges(modes, 0.0, space, amps)
    form = form_invariance_check(space, BARE, amps, charges, 0.3, 0.5, 0.7)
    assert form["hamiltonian_residual"] < 1e-12
    assert form["field_equality_residual"] < 1e-12
    assert form["amplitude_independence"] < 1e-12


def test_restoration_on_three_modes_uses_sparse_path():
    modes = ModeSet.grid_1d(3, 0.7, 5.0)
    space = FockSpace(modes)
    amps = amplitudes_from_angles(0.3)
    h = build_hamiltonian(modes, BARE, amps, space).total
    rest = verify_restoration(space, h, build_charges(modes, 0.0, space, amps))
    assert rest["kernel_dimension"] == 1
    assert rest["degeneracy"] < 1e-12
    assert rest["fluctuation_norm"] < 1e-12
    with pytest.raises(DimensionBudgetError):
        form_invariance_check(space, BARE, amps, build_charges(modes, 0.0, space, amps), 0.1, 0.2, 0.3)


def test_dimension_budget():
    with pytest.raises(DimensionBudgetError):
        FockSpace(ModeSet.grid_1d(4))


def test_mode_set_validation():
    with pytest.raises(ValueError):
        ModeSet(((0.5,), (1.0,)))
    with pytest.raises(ValueError):
        ModeSet(((0.5,), (-0.5,), (0.5,)))
    with pytest.raises(ValueError):
        AmplitudePair((1.0,), (0.0, 1.0))


def test_transcription_normal_part_and_fluctuation_gap(two_modes):
    modes, space = two_modes
    good = transcription_report(space, BARE, amplitudes_from_angles(0.3, 0.2, 0.1))
    for key in ("kinetic", "AA", "AtildeAtilde", "mixed", "exchange"):
        assert good[key]["difference"] < 1e-12
    assert good["fluctuation"]["field_norm"] < 1e-12
    bad = transcription_report(space, BARE, VIOLATING_PAIR)
    assert bad["normal_total"]["difference"] < 1e-12
    # one exchange group alone leaves half the exchange term out
    assert bad["normal_total"]["difference_single_exchange"] > 1e-3
    # the printed fluctuation groups do not reproduce the field-built ones
    assert bad["fluctuation"]["difference"] > 1e-3
