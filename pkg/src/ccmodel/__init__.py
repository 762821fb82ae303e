"""Contact four-fermion model: spectra, bound states and an exact-diagonalization oracle."""

__version__ = "0.1.0"
