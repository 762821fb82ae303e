"""Exact finite-mode Fock-space oracle for the model."""

from .bogoliubov import bogoliubov, rotated_ladders, verify_restoration
from .charges import ChargeSet, algebra_residuals, build_charges, multiplet_analysis
from .checks import discrete_energies, form_invariance_check, two_particle_oracle, verify_spectra
from .fock import FockSpace, Ladders, car_residuals
from .hamiltonian import HamiltonianParts, build_hamiltonian
from .modes import AmplitudePair, ModeSet, amplitudes_from_angles, rotate_amplitudes
from .suite import OracleReport, OracleSettings, run_oracle_suite
from .transcription import transcription_report

__all__ = [
    "AmplitudePair", "ChargeSet", "FockSpace", "HamiltonianParts", "Ladders", "ModeSet",
    "OracleReport", "OracleSettings", "algebra_residuals", "amplitudes_from_angles",
    "bogoliubov", "build_charges", "build_hamiltonian", "car_residuals", "discrete_energies",
    "form_invariance_check", "multiplet_analysis", "rotate_amplitudes", "rotated_ladders",
    "run_oracle_suite", "transcription_report", "two_particle_oracle", "verify_restoration",
    "verify_spectra",
]
