"""Spectral checks on the exact Fock-space Hamiltonian.

One-particle energies of the discretized model have closed forms in terms
of the discrete coupling ``g = lam n / Omega`` and the mode average
``<k^2>``; two-particle energies at zero total momentum are compared with
the mode-sum version of the separable-kernel secular equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ..bound_state import discrete_roots
from ..model_core import BareParams
from .bogoliubov import DENSE_LIMIT, quasi_vacuum, rotated_ladders
from .charges import ChargeSet
from .fock import FockSpace, Ladders, car_residuals, dag, norm_upper
from .hamiltonian import Amplitudes, hamiltonian_from_ladders
from .modes import AmplitudePair, ModeSet, rotate_amplitudes, rotation_coefficients

DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class DiscreteEnergies:
    eps: np.ndarray
    A: np.ndarray
    Atilde: np.ndarray
    B: np.ndarray
    vacuum: float
    coupling: float
    k2_avg: float


def discrete_energies(modes: ModeSet, bare: BareParams) -> DiscreteEnergies:
    n = len(modes)
    k2 = modes.squared()
    eps = k2 / (2.0 * bare.m) + bare.m * bare.c ** 2
    g = bare.lam * n / modes.omega_volume
    avg = float(np.mean(k2))
    a = 1.0 / (4.0 * bare.m ** 2 * bare.c ** 2)
    common = g * k2 * a + g * avg * a
    vac = 2.0 * float(np.sum(eps)) - 4.0 * n * n * bare.lam / modes.omega_volume
    return DiscreteEnergies(eps, eps - 5.0 * g + common, -eps + 3.0 * g + common,
                            eps - g + common, vac, g, avg)


def _eigen_pair(h, v):
    hv = h @ v
    e = float(np.vdot(v, hv).real / np.vdot(v, v).real)
    return e, float(np.linalg.norm(hv - e * v))


def verify_spectra(space: FockSpace, hamiltonian, bare: BareParams) -> dict:
    modes = space.modes
    ref = discrete_energies(modes, bare)
    vac = space.vacuum()
    e0, r0 = _eigen_pair(hamiltonian, vac)
    rows = []
    for k in range(len(modes)):
        for a in range(2):
            ea, ra = _eigen_pair(hamiltonian, dag(space.A(a, k)) @ vac)
            et, rt = _eigen_pair(hamiltonian, dag(space.At(a, k)) @ vac)
            rows.append({"k": list(modes.momenta[k]), "isospin": a,
                         "E_A": ea - e0, "residual_A": ra, "E_A_formula": float(ref.A[k]),
                         "E_Atilde": et - e0, "residual_Atilde": rt,
                         "E_Atilde_formula": float(ref.Atilde[k])})
    out = {"vacuum_energy": e0, "vacuum_energy_formula": ref.vacuum,
           "vacuum_residual": r0, "one_particle": rows}
    out["max_one_particle_residual"] = max(max(r["residual_A"], r["residual_Atilde"]) for r in rows)
    out["max_formula_deviation"] = max(max(abs(r["E_A"] - r["E_A_formula"]),
                                           abs(r["E_Atilde"] - r["E_Atilde_formula"])) for r in rows)
    # affine in k^2: least squares on (1, k^2)
    k2 = np.array([sum(x * x for x in r["k"]) for r in rows])
    design = np.column_stack([np.ones_like(k2), k2])
    fits = {}
    for key in ("E_A", "E_Atilde"):
        y = np.array([r[key] for r in rows])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        fits[key] = {"intercept": float(coef[0]), "slope": float(coef[1]),
                     "residual": float(np.max(np.abs(design @ coef - y)))}
    out["affine_fit"] = fits
    out["momentum_block_leak"] = momentum_block_leak(space, hamiltonian)
    return out


def momentum_block_leak(space: FockSpace, hamiltonian) -> float:
    """Norm of matrix elements joining different (N_A, N_At, total momentum) blocks."""
    lo = 2 * space.n_modes
    occ = space.occupations
    labels = np.column_stack([occ[:, :lo].sum(axis=1), occ[:, lo:].sum(axis=1),
                              np.round(space.momentum_sum(), 9)])
    coo = hamiltonian.tocoo()
    differ = np.any(labels[coo.row] != labels[coo.col], axis=1)
    return float(np.sqrt(np.sum(np.abs(coo.data[differ]) ** 2)))


def pair_states(space: FockSpace, vacuum: np.ndarray, first, second, same: bool):
    """Columns op1^dag op2^dag |vac> for zero total momentum.

    ``first`` and ``second`` map (isospin, k) to annihilators; with ``same``
    only unordered pairs of distinct orbitals are kept.
    """
    modes = space.modes
    n = len(modes)
    cols = []
    labels = []
    orbs = [(a, k) for a in range(2) for k in range(n)]
    for i, (a1, k1) in enumerate(orbs):
        for j, (a2, k2) in enumerate(orbs):
            if same and j <= i:
                continue
            if modes.neg(k1) != k2:
                continue
            v = dag(first(a1, k1)) @ (dag(second(a2, k2)) @ vacuum)
            if np.linalg.norm(v) > 1e-12:
                cols.append(v)
                labels.append((a1, k1, a2, k2))
    mat = np.column_stack(cols)
    q, r = np.linalg.qr(mat)
    return q, labels


def block_spectrum(hamiltonian, basis: np.ndarray):
    hv = hamiltonian @ basis
    hb = basis.conj().T @ hv
    leak = float(np.linalg.norm(hv - basis @ hb))
    hb = 0.5 * (hb + hb.conj().T)
    return np.linalg.eigvalsh(hb), hb, leak


def channel_split(hb, basis, casimir_op):
    """Eigenvalues of the block Hamiltonian within Casimir = 0 and Casimir = 2 subspaces."""
    cb = basis.conj().T @ (casimir_op @ basis)
    cb = 0.5 * (cb + cb.conj().T)
    w, v = np.linalg.eigh(cb)
    out = {}
    for label, target in (("isoscalar", 0.0), ("isovector", 2.0)):
        sel = v[:, np.abs(w - target) < 1e-8]
        if sel.shape[1] == 0:
            out[label] = np.array([])
            continue
        sub = sel.conj().T @ hb @ sel
        out[label] = np.linalg.eigvalsh(0.5 * (sub + sub.conj().T))
    return out


def unique_values(values, tol: float = DEGENERACY_TOL) -> list:
    out = []
    for x in sorted(float(v) for v in values):
        if not out or abs(x - out[-1]) > tol:
            out.append(x)
    return out


def compare_sets(ed, kernel) -> float:
    """Largest distance between the two sets of distinct values; inf when counts differ."""
    ed_u, ker_u = unique_values(ed), unique_values(kernel)
    if len(ed_u) != len(ker_u):
        return math.inf
    return max((abs(x - y) for x, y in zip(ed_u, ker_u)), default=0.0)


def _kernel_roots(modes: ModeSet, bare: BareParams, pair_energy, sign: int, parity: str):
    a = 1.0 / (4.0 * bare.m ** 2 * bare.c ** 2)
    coupling = 2.0 * bare.lam / modes.omega_volume
    return discrete_roots(modes.array, pair_energy, coupling, a, sign, parity)


def two_particle_oracle(space: FockSpace, hamiltonian, bare: BareParams, charges: ChargeSet,
                        sector: str = "restored", phi: float = 0.0) -> dict:
    """Exact zero-momentum two-particle spectra against the discrete separable kernel."""
    modes = space.modes
    ref = discrete_energies(modes, bare)
    t_cas = charges.isospin_casimir()
    out = {"sector": sector}
    if sector == "restored":
        lad = rotated_ladders(space, math.pi / 2, phi)
        vac, _ = quasi_vacuum(space, lad)
        e0 = float(np.vdot(vac, hamiltonian @ vac).real)
        B = lambda a, k: lad.A[a][k]
        Bt = lambda a, k: lad.At[a][k]
        blocks = {"BB": pair_states(space, vac, B, B, True),
                  "BtBt": pair_states(space, vac, Bt, Bt, True),
                  "BBt": pair_states(space, vac, B, Bt, False)}
        spectra = {}
        for name, (basis, _) in blocks.items():
            w, hb, leak = block_spectrum(hamiltonian, basis)
            spectra[name] = (w - e0, hb, basis)
            out[f"{name}_leak"] = leak
            out[f"{name}_eigenvalues"] = (w - e0).tolist()
        out["BB_vs_BtBt"] = float(np.max(np.abs(spectra["BB"][0] - spectra["BtBt"][0])))
        # the mixed block repeats every BB level (Q-triplet member plus singlet copies)
        out["BB_vs_BBt_levels"] = compare_sets(spectra["BB"][0], spectra["BBt"][0])
        q_cas = charges.casimir()
        qsplit = channel_split(spectra["BBt"][1], spectra["BBt"][2], q_cas)
        # the Q-triplet (Casimir 2) part of the mixed block is rotated into BB by the raising charge
        triplet = np.sort(qsplit["isovector"] - e0)
        singlet = np.sort(qsplit["isoscalar"] - e0)
        out["BBt_Q_triplet"] = triplet.tolist()
        out["BBt_Q_singlet"] = singlet.tolist()
        out["BB_vs_BBt_triplet"] = (float(np.max(np.abs(triplet - spectra["BB"][0])))
                                    if len(triplet) == len(spectra["BB"][0]) else math.inf)
        chans = channel_split(spectra["BB"][1], spectra["BB"][2], t_cas)
        P = 2.0 * ref.B
        for label, parity in (("isoscalar", "even"), ("isovector", "odd")):
            ed = np.asarray(chans[label]) - e0
            roots = _kernel_roots(modes, bare, P, 1, parity)
            out[label] = _channel_report(ed, roots)
        return out
    vac = space.vacuum()
    e0 = float(np.vdot(vac, hamiltonian @ vac).real)
    A, At = space.A, space.At
    if sector in ("AA", "AtildeAtilde"):
        op = A if sector == "AA" else At
        basis, _ = pair_states(space, vac, op, op, True)
        w, hb, leak = block_spectrum(hamiltonian, basis)
        out["leak"] = leak
        out["eigenvalues"] = (w - e0).tolist()
        chans = channel_split(hb, basis, t_cas)
        P = 2.0 * (ref.A if sector == "AA" else ref.Atilde)
        for label, parity in (("isoscalar", "even"), ("isovector", "odd")):
            ed = np.asarray(chans[label]) - e0
            out[label] = _channel_report(ed, _kernel_roots(modes, bare, P, 1, parity))
        return out
    if sector == "AAtilde":
        basis, _ = pair_states(space, vac, A, At, False)
        w, hb, leak = block_spectrum(hamiltonian, basis)
        ed = w - e0
        out["leak"] = leak
        out["eigenvalues"] = ed.tolist()
        for label, P in (("E_A+E_Atilde", ref.A + ref.Atilde), ("2E_Atilde", 2.0 * ref.Atilde)):
            roots = (_kernel_roots(modes, bare, P, -1, "even")
                     + _kernel_roots(modes, bare, P, -1, "odd"))
            out[label] = _channel_report(ed, roots)
        out["realized_propagator"] = min(("E_A+E_Atilde", "2E_Atilde"),
                                         key=lambda key: out[key]["set_distance"])
        return out
    raise ValueError(f"unknown sector {sector!r}")


def _channel_report(ed, roots) -> dict:
    ed = np.sort(np.asarray(ed, dtype=float))
    rep = {"exact": ed.tolist(), "kernel_roots": list(roots)}
    if len(ed) and len(roots):
        rep["lowest_difference"] = float(abs(ed[0] - min(roots)))
    else:
        rep["lowest_difference"] = math.inf if len(ed) != len(roots) else 0.0
    rep["set_distance"] = compare_sets(ed, roots)
    return rep


def form_invariance_check(space: FockSpace, bare: BareParams, amps: AmplitudePair,
                          charges: ChargeSet, alpha: float, beta: float, gamma: float) -> dict:
    """Rebuild H from rotated ladders and rotated amplitudes and compare with H.

    The charges carry a factor 1/2, so the group element that moves the
    amplitudes by (alpha, beta, gamma) is exp(2i alpha Q1) exp(2i beta Q2)
    exp(2i gamma Q3), acting on the ladders as U^dag A U.
    """
    if space.dim > DENSE_LIMIT:
        from ..errors import DimensionBudgetError
        raise DimensionBudgetError("form invariance uses dense exponentials; at most 2 modes")
    modes = space.modes
    omega = charges.omega_phase
    h = hamiltonian_from_ladders(modes, bare, space.ladders(), amps)
    h = h.toarray()
    u = (sla.expm(2j * alpha * charges.Q1.toarray()) @ sla.expm(2j * beta * charges.Q2.toarray())
         @ sla.expm(2j * gamma * charges.Q3.toarray()))
    ud = u.conj().T
    rot = space.ladders().transformed(u, ud)
    new = rotate_amplitudes(amps, alpha, beta, gamma, omega)
    h_rot = hamiltonian_from_ladders(modes, bare, rot, new)
    h_same_ladders = hamiltonian_from_ladders(modes, bare, space.ladders(), new).toarray()
    out = {"angles": [alpha, beta, gamma], "omega_phase": omega,
           "rotated_amplitude_residuals": new.residuals(),
           "hamiltonian_residual": float(np.linalg.norm(h_rot - h)),
           "conjugation_residual": float(np.linalg.norm(ud @ h @ u - h)),
           "amplitude_independence": float(np.linalg.norm(h_same_ladders - h))}
    vac = space.vacuum()
    rot_vac = ud @ vac
    out["vacuum_energy"] = float(np.vdot(vac, h @ vac).real)
    out["rotated_vacuum_energy"] = float(np.vdot(rot_vac, h @ rot_vac).real)
    out["rotated_car"] = car_residuals(rot, space.identity)
    # closed form: U^dag A(k) U = conj(p) A(k) - conj(q) At^dag(-k)
    p, q = rotation_coefficients(alpha, beta, gamma, omega)
    mix_a, field = 0.0, 0.0
    for a in range(2):
        for k in range(len(modes)):
            mk = modes.neg(k)
            A = space.A(a, k).toarray()
            Atd = dag(space.At(a, mk)).toarray()
            closed = np.conj(p) * A - np.conj(q) * Atd
            mix_a = max(mix_a, float(np.linalg.norm(rot.A[a][k] - closed)))
            for b in range(2):
                lhs = amps.f[b] * A + amps.g[b] * Atd
                rhs = new.f[b] * rot.A[a][k] + new.g[b] * dag(rot.At[a][mk])
                field = max(field, float(np.linalg.norm(lhs - rhs)))
    out["ladder_mixing_residual"] = mix_a
    out["field_equality_residual"] = field
    return out
