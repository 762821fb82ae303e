"""Pairing rotation of the Atilde modes and the restored-symmetry sector.

The generator is the Hermitian pair operator

    Q_pair = (i/2) sum_k eps_ab [e^{i phi} At^dag_a(k) At^dag_b(-k) - e^{-i phi} At_b(-k) At_a(k)]

and U(omega) = exp(i omega Q_pair). In closed form the rotated modes are
Bt_a(k) = cos(omega) At_a(k) - e^{i phi} sin(omega) eps_ab At^dag_b(-k) and B = A.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fock import FockSpace, Ladders, car_residuals, comm, dag, norm_upper
from .modes import ModeSet

EPS = np.array([[0.0, 1.0], [-1.0, 0.0]])
DENSE_LIMIT = 1024


def pair_generator(space: FockSpace, phi: float = 0.0):
    modes = space.modes
    e = cmath.exp(1j * phi)
    up = 0.0 * space.identity
    for k in range(len(modes)):
        mk = modes.neg(k)
        for a in range(2):
            for b in range(2):
                if EPS[a, b]:
                    up = up + EPS[a, b] * (dag(space.At(a, k)) @ dag(space.At(b, mk)))
    return 0.5j * (e * up - np.conj(e) * dag(up))


def rotated_ladders(space: FockSpace, omega: float, phi: float = 0.0) -> Ladders:
    """Closed-form B and Bt annihilators."""
    modes = space.modes
    n = len(modes)
    c, s = math.cos(omega), math.sin(omega)
    e = cmath.exp(1j * phi)
    B = [[space.A(a, k) for k in range(n)] for a in range(2)]
    Bt = [[None] * n for _ in range(2)]
    for a in range(2):
        for k in range(n):
            mk = modes.neg(k)
            op = c * space.At(a, k)
            for b in range(2):
                if EPS[a, b]:
                    op = op - e * s * EPS[a, b] * dag(space.At(b, mk))
            Bt[a][k] = op.tocsr()
    return Ladders(B, Bt)


@dataclass
class BogoliubovResult:
    ladders: Ladders
    omega: float
    phi: float
    car: dict
    generator_residual: float  # closed form vs U^dag At U; nan when skipped


def bogoliubov(space: FockSpace, omega: float, phi: float = 0.0) -> BogoliubovResult:
    lad = rotated_ladders(space, omega, phi)
    car = car_residuals(lad, space.identity)
    gen_res = float("nan")
    if space.dim <= DENSE_LIMIT:
        u = sla.expm(1j * omega * pair_generator(space, phi).toarray())
        ud = u.conj().T
        gen_res = 0.0
        for a in range(2):
            for k in range(space.n_modes):
                via_gen = ud @ space.At(a, k).toarray() @ u
                gen_res = max(gen_res, float(np.linalg.norm(via_gen - lad.At[a][k].toarray())))
    return BogoliubovResult(lad, omega, phi, car, gen_res)


def quasi_number(ladders: Ladders):
    ops = ladders.all_annihilators()
    total = None
    for op in ops:
        t = dag(op) @ op
        total = t if total is None else total + t
    return total


def quasi_vacuum(space: FockSpace, ladders: Ladders):
    """(state, kernel dimension) of the common kernel of all annihilators."""
    nb = quasi_number(ladders)
    if space.dim <= DENSE_LIMIT:
        dense = nb.toarray() if hasattr(nb, "toarray") else np.asarray(nb)
        w, v = np.linalg.eigh(dense)
    else:
        # the spectrum is the integers 0..N; shift-invert resolves the bottom two
        w, v = spla.eigsh(sp.csc_matrix(nb), k=2, sigma=-0.5, which="LM")
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    kernel = np.sum(np.abs(w) < 1e-9)
    state = v[:, 0]
    # fix the global phase by the largest component
    j = int(np.argmax(np.abs(state)))
    state = state * (abs(state[j]) / state[j])
    return state, int(kernel)


def fluctuation_norm(hamiltonian, space: FockSpace, ladders: Ladders) -> float:
    """Norm of the part of H that changes the quasiparticle number of ``ladders``."""
    nb = quasi_number(ladders)
    if space.dim > DENSE_LIMIT:
        # commutator with the quasiparticle number vanishes exactly when nothing leaks
        return norm_upper(comm(sp.csr_matrix(nb), sp.csr_matrix(hamiltonian)))
    dense = nb.toarray() if hasattr(nb, "toarray") else np.asarray(nb)
    w, v = np.linalg.eigh(dense)
    labels = np.rint(w).astype(int)
    h = hamiltonian.toarray() if hasattr(hamiltonian, "toarray") else np.asarray(hamiltonian)
    hr = v.conj().T @ h @ v
    mask = labels[:, None] != labels[None, :]
    return float(np.linalg.norm(np.where(mask, hr, 0.0)))


def all_occupied_atilde(space: FockSpace) -> np.ndarray:
    n = space.n_modes
    return space.basis_state([space.orbital(1, a, k) for a in range(2) for k in range(n)])


def verify_restoration(space: FockSpace, hamiltonian, charges, phi: float = 0.0,
                       one_particle_energy=None) -> dict:
    """Checks on the omega = pi/2 vacuum and its one-particle excitations."""
    lad = rotated_ladders(space, math.pi / 2, phi)
    vac, kernel = quasi_vacuum(space, lad)
    h = hamiltonian
    out = {"kernel_dimension": kernel}
    out["overlap_with_filled_atilde"] = float(abs(np.vdot(all_occupied_atilde(space), vac)))
    hv = h @ vac
    e0 = float(np.vdot(vac, hv).real)
    out["vacuum_energy"] = e0
    out["vacuum_eigen_residual"] = float(np.linalg.norm(hv - e0 * vac))
    for name, op in charges.as_dict().items():
        if name.startswith("T"):
            continue
        out[f"{name}_on_vacuum"] = float(np.linalg.norm(op @ vac))
    out["casimir_on_vacuum"] = float(np.linalg.norm(charges.casimir() @ vac))
    out["fluctuation_norm"] = fluctuation_norm(h, space, lad)
    rows = []
    for k in range(space.n_modes):
        for a in range(2):
            row = {"k": list(space.modes.momenta[k]), "isospin": a}
            for tag, op in (("B", lad.A[a][k]), ("Bt", lad.At[a][k])):
                st = dag(op) @ vac
                hs = h @ st
                e = float(np.vdot(st, hs).real)
                q3 = float(np.vdot(st, charges.Q3 @ st).real)
                row[f"E_{tag}"] = e - e0
                row[f"residual_{tag}"] = float(np.linalg.norm(hs - e * st))
                row[f"Q3_{tag}"] = q3
                row[f"Q3_residual_{tag}"] = float(np.linalg.norm(charges.Q3 @ st - q3 * st))
            if one_particle_energy is not None:
                row["E_formula"] = float(one_particle_energy(k))
            rows.append(row)
    out["one_particle"] = rows
    out["degeneracy"] = max(abs(r["E_B"] - r["E_Bt"]) for r in rows)
    out["vacuum_state"] = vac
    out["ladders"] = lad
    return out
