"""Fermionic Fock space over the orbitals (species, isospin, momentum).

Orbital ``j`` is occupied in basis state ``x`` when bit ``N - 1 - j`` of ``x``
is set, so orbital 0 is the most significant bit and the empty state is
index 0. Annihilators carry the Jordan-Wigner sign of all lower orbitals.
Orbitals are ordered species-major (A then Atilde), then isospin, then
momentum index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionBudgetError
from .modes import ModeSet

MAX_ORBITALS = 12
SPECIES = ("A", "Atilde")


def dag(op):
    return op.conj().T.tocsr() if sp.issparse(op) else op.conj().T


def comm(x, y):
    return x @ y - y @ x


def anticomm(x, y):
    return x @ y + y @ x


def norm_upper(op) -> float:
    """Frobenius norm, an upper bound on the operator norm."""
    if sp.issparse(op):
        return float(np.sqrt(np.sum(np.abs(op.data) ** 2))) if op.nnz else 0.0
    return float(np.linalg.norm(op))


def norm_lower(op) -> float:
    """Largest matrix element, a lower bound on the operator norm."""
    if sp.issparse(op):
        return float(np.max(np.abs(op.data))) if op.nnz else 0.0
    return float(np.max(np.abs(op))) if op.size else 0.0


@dataclass
class FockSpace:
    modes: ModeSet

    def __post_init__(self):
        n = len(self.modes)
        self.n_modes = n
        self.n_orbitals = 4 * n
        if self.n_orbitals > MAX_ORBITALS:
            raise DimensionBudgetError(
                f"{n} modes need 2^{self.n_orbitals} states; the budget is 2^{MAX_ORBITALS}")
        self.dim = 2 ** self.n_orbitals
        states = np.arange(self.dim)
        N = self.n_orbitals
        self.occupations = ((states[:, None] >> (N - 1 - np.arange(N))[None, :]) & 1).astype(np.int8)
        self._annihilators = [self._annihilator(j) for j in range(N)]
        self.identity = sp.identity(self.dim, dtype=complex, format="csr")
        self.number = sp.diags(self.occupations.sum(axis=1).astype(complex), format="csr")

    def _annihilator(self, j: int):
        occ = self.occupations
        src = np.nonzero(occ[:, j])[0]
        dst = src ^ (1 << (self.n_orbitals - 1 - j))
        parity = occ[src, :j].sum(axis=1) % 2
        data = np.where(parity, -1.0, 1.0).astype(complex)
        return sp.csr_matrix((data, (dst, src)), shape=(self.dim, self.dim))

    def orbital(self, species: int, isospin: int, k: int) -> int:
        return species * 2 * self.n_modes + isospin * self.n_modes + k

    def ann(self, species: int, isospin: int, k: int):
        return self._annihilators[self.orbital(species, isospin, k)]

    def A(self, isospin: int, k: int):
        return self.ann(0, isospin, k)

    def At(self, isospin: int, k: int):
        return self.ann(1, isospin, k)

    def ladders(self):
        """Ladder set in the layout consumed by the Hamiltonian builder."""
        return Ladders([[self.A(a, k) for k in range(self.n_modes)] for a in range(2)],
                       [[self.At(a, k) for k in range(self.n_modes)] for a in range(2)])

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def basis_state(self, occupied) -> np.ndarray:
        idx = 0
        for j in occupied:
            idx |= 1 << (self.n_orbitals - 1 - j)
        v = np.zeros(self.dim, dtype=complex)
        v[idx] = 1.0
        return v

    def species_number(self, species: int):
        lo = species * 2 * self.n_modes
        counts = self.occupations[:, lo:lo + 2 * self.n_modes].sum(axis=1)
        return sp.diags(counts.astype(complex), format="csr")

    def momentum_sum(self) -> np.ndarray:
        """Total momentum of each basis state (both species carry +k)."""
        kvec = self.modes.array
        per_orbital = np.concatenate([kvec] * 4, axis=0)
        return self.occupations.astype(float) @ per_orbital


@dataclass
class Ladders:
    """Annihilators A[isospin][k] and At[isospin][k] as sparse matrices."""

    A: list
    At: list

    def transformed(self, u, u_dag) -> "Ladders":
        conj = lambda op: (u_dag @ op @ u)
        return Ladders([[conj(op) for op in row] for row in self.A],
                       [[conj(op) for op in row] for row in self.At])

    def all_annihilators(self):
        return [op for row in self.A for op in row] + [op for row in self.At for op in row]


def car_residuals(ladders: Ladders, identity) -> dict:
    ops = ladders.all_annihilators()
    worst_delta = 0.0
    worst_zero = 0.0
    for i, x in enumerate(ops):
        for j, y in enumerate(ops):
            r = anticomm(x, dag(y))
            if i == j:
                r = r - identity
            worst_delta = max(worst_delta, norm_upper(r))
            if j >= i:
                worst_zero = max(worst_zero, norm_upper(anticomm(x, y)))
    return {"annihilator_creator": worst_delta, "annihilator_annihilator": worst_zero}
