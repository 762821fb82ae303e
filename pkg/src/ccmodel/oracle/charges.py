"""Pair charges Q1..Q3, isospin, the U(1) charge and multiplet structure."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .fock import FockSpace, Ladders, comm, dag, norm_upper
from .hamiltonian import Amplitudes, field_components
from .modes import AmplitudePair, ModeSet, amplitudes_from_angles

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass
class ChargeSet:
    Q1: object
    Q2: object
    Q3: object
    T: tuple
    Q_U1: object
    omega_phase: float = 0.0

    @property
    def raising(self):
        return self.Q1 + 1j * self.Q2

    @property
    def lowering(self):
        return self.Q1 - 1j * self.Q2

    def casimir(self):
        return self.Q1 @ self.Q1 + self.Q2 @ self.Q2 + self.Q3 @ self.Q3

    def isospin_casimir(self):
        return sum(t @ t for t in self.T)

    def as_dict(self) -> dict:
        return {"Q1": self.Q1, "Q2": self.Q2, "Q3": self.Q3, "T1": self.T[0],
                "T2": self.T[1], "T3": self.T[2], "Q_U1": self.Q_U1}


def build_charges(modes: ModeSet, omega_phase: float = 0.0, space: FockSpace = None,
                  amps: Amplitudes = None, ladders: Ladders = None) -> ChargeSet:
    """Charges in terms of the ladders; isospin is built from the field itself."""
    space = space or FockSpace(modes)
    lad = ladders or space.ladders()
    amps = amps or amplitudes_from_angles(0.0)
    n = len(modes)
    ident = space.identity
    e = cmath.exp(1j * omega_phase)
    pair_up = None
    q3 = None
    u1 = None
    for k in range(n):
        mk = modes.neg(k)
        for a in range(2):
            up = dag(lad.A[a][k]) @ dag(lad.At[a][mk])
            pair_up = up if pair_up is None else pair_up + up
            nA = dag(lad.A[a][k]) @ lad.A[a][k]
            hole = lad.At[a][k] @ dag(lad.At[a][k])
            q3 = nA - hole if q3 is None else q3 + nA - hole
            u1 = nA + hole if u1 is None else u1 + nA + hole
    pair_down = dag(pair_up)
    Q1 = 0.5j * (e * pair_up - np.conj(e) * pair_down)
    Q2 = 0.5 * (e * pair_up + np.conj(e) * pair_down)
    Q3 = 0.5 * q3
    psi = field_components(modes, lad, amps)
    T = []
    for tau in PAULI:
        acc = 0.0 * ident
        for k in range(n):
            for b in range(2):
                for x in range(2):
                    for y in range(2):
                        if tau[x, y] != 0:
                            acc = acc + 0.5 * tau[x, y] * (dag(psi[b][x][k]) @ psi[b][y][k])
        T.append(acc)
    return ChargeSet(Q1, Q2, Q3, tuple(T), u1, omega_phase)


def algebra_residuals(charges: ChargeSet, hamiltonian) -> dict:
    Q = (charges.Q1, charges.Q2, charges.Q3)
    T = charges.T
    out = {"su2_Q": 0.0, "su2_T": 0.0, "Q_T": 0.0, "H_Q": 0.0, "H_T": 0.0, "H_U1": 0.0,
           "hermiticity": 0.0}
    cyc = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
    for i, j, k in cyc:
        out["su2_Q"] = max(out["su2_Q"], norm_upper(comm(Q[i], Q[j]) - 1j * Q[k]))
        out["su2_T"] = max(out["su2_T"], norm_upper(comm(T[i], T[j]) - 1j * T[k]))
    for i in range(3):
        for j in range(3):
            out["Q_T"] = max(out["Q_T"], norm_upper(comm(Q[i], T[j])))
        out["H_Q"] = max(out["H_Q"], norm_upper(comm(hamiltonian, Q[i])))
        out["H_T"] = max(out["H_T"], norm_upper(comm(hamiltonian, T[i])))
    out["H_U1"] = norm_upper(comm(hamiltonian, charges.Q_U1))
    for op in charges.as_dict().values():
        out["hermiticity"] = max(out["hermiticity"], norm_upper(op - dag(op)))
    return out


def casimir_label(value: float) -> float:
    """L with L (L + 1) = value."""
    return 0.5 * (-1.0 + math.sqrt(max(1.0 + 4.0 * value, 0.0)))


def ladder_levels(charges: ChargeSet, state: np.ndarray, max_steps: int = 64, tol: float = 1e-10):
    """Q3 values reached by repeated raising, starting from ``state``."""
    levels = []
    v = state / np.linalg.norm(state)
    raise_op = charges.raising
    for _ in range(max_steps):
        levels.append(float(np.vdot(v, charges.Q3 @ v).real))
        w = raise_op @ v
        nw = np.linalg.norm(w)
        if nw < tol:
            return levels
        v = w / nw
    raise RuntimeError("raising ladder did not terminate")


def state_multiplet(charges: ChargeSet, state: np.ndarray) -> dict:
    v = state / np.linalg.norm(state)
    cas = charges.casimir() @ v
    c_val = float(np.vdot(v, cas).real)
    q3v = charges.Q3 @ v
    q3 = float(np.vdot(v, q3v).real)
    levels = ladder_levels(charges, v)
    return {
        "casimir": c_val,
        "casimir_residual": float(np.linalg.norm(cas - c_val * v)),
        "L": casimir_label(c_val),
        "Q3": q3,
        "Q3_residual": float(np.linalg.norm(q3v - q3 * v)),
        "lowering_norm": float(np.linalg.norm(charges.lowering @ v)),
        "levels": len(levels),
        "Q3_levels": levels,
    }


def multiplet_analysis(charges: ChargeSet, space: FockSpace) -> dict:
    """Vacuum, one-particle and two-particle (same species) multiplets."""
    n = space.n_modes
    vac = space.vacuum()
    one = dag(space.A(0, 0)) @ vac
    two = dag(space.A(1, 0)) @ one if n >= 1 else None
    out = {"n_modes": n, "vacuum": state_multiplet(charges, vac),
           "one_particle": state_multiplet(charges, one),
           "two_particle": state_multiplet(charges, two)}
    out["expected"] = {
        "vacuum_L": float(n), "vacuum_levels": 2 * n + 1, "vacuum_Q3": -float(n),
        "one_particle_L": n - 0.5, "one_particle_levels": 2 * n,
        "two_particle_L": n - 1.0, "two_particle_levels": 2 * n - 1,
    }
    top = vac
    for _ in range(2 * n + 1):
        top = charges.raising @ top
    out["raised_past_top_norm"] = float(np.linalg.norm(top))
    out["vacuum_Q1"] = float(abs(np.vdot(vac, charges.Q1 @ vac)))
    out["vacuum_Q2"] = float(abs(np.vdot(vac, charges.Q2 @ vac)))
    return out
