"""Literal mode-sum transcription of the printed normal-ordered Hamiltonian.

Used only as a comparator: each printed group is set against the slice of
the field-built Hamiltonian with the same amplitude structure, and the
differences are reported. Nothing here feeds the oracle verdicts.

Conventions: integrals become sums over the mode set, delta functions
become Kronecker deltas, lam/(2 pi)^3 becomes lam/Omega and Atilde operators
sit at the momenta as printed.
"""

from __future__ import annotations

import itertools

import numpy as np
import scipy.sparse as sp

from ..model_core import BareParams
from .fock import FockSpace, dag, norm_upper
from .hamiltonian import (Amplitudes, field_components, interaction, kinetic,
                          number_balanced_part, per_mode)
from .modes import AmplitudePair


def _split_fields(space: FockSpace, amps: Amplitudes):
    """Field pieces carrying only f (particle part) or only g (hole part)."""
    n = space.n_modes
    pairs = per_mode(amps, n)
    zero = (0.0, 0.0)
    f_only = [AmplitudePair(p.f, zero) for p in pairs]
    g_only = [AmplitudePair(zero, p.g) for p in pairs]
    lad = space.ladders()
    return (field_components(space.modes, lad, f_only),
            field_components(space.modes, lad, g_only))


def field_groups(space: FockSpace, bare: BareParams, amps: Amplitudes) -> dict:
    """Interaction slices of the field-built H keyed by amplitude structure."""
    modes = space.modes
    F, G = _split_fields(space, amps)
    full = field_components(modes, space.ladders(), amps)
    kin = kinetic(modes, bare, full)
    out = {"kinetic": sp.csr_matrix(kin)}
    if bare.lam == 0.0:
        zero = 0.0 * space.identity
        for key in ("AA", "AtildeAtilde", "mixed", "exchange", "fluctuation"):
            out[key] = zero
        return out
    inter = lambda a, b, c, d: sp.csr_matrix(interaction(modes, bare, a, b, c, d))
    out["AA"] = inter(F, F, F, F)
    out["AtildeAtilde"] = inter(G, G, G, G)
    out["mixed"] = inter(F, F, G, G) + inter(G, G, F, F)
    out["exchange"] = inter(F, G, G, F) + inter(G, F, F, G)
    total = sp.csr_matrix(interaction(modes, bare, full, full))
    out["fluctuation"] = total - out["AA"] - out["AtildeAtilde"] - out["mixed"] - out["exchange"]
    return out


class _Printed:
    def __init__(self, space: FockSpace, bare: BareParams, amps: Amplitudes):
        self.space = space
        self.k = space.modes.array
        self.n = space.n_modes
        pairs = per_mode(amps, self.n)
        self.f = np.array([p.f for p in pairs])
        self.g = np.array([p.g for p in pairs])
        self.a = 1.0 / (4.0 * bare.m ** 2 * bare.c ** 2)
        self.pref = -bare.lam / space.modes.omega_volume
        self.I = space.identity

    def Ad(self, al, i):
        return dag(self.space.A(al, i))

    def A(self, al, i):
        return self.space.A(al, i)

    def Td(self, al, i):
        return dag(self.space.At(al, i))

    def T(self, al, i):
        return self.space.At(al, i)

    def amp(self, x, i, y, j) -> complex:
        return complex(np.sum(np.conj(x[i]) * y[j]))

    def dot(self, u, v) -> float:
        return float(np.dot(u, v))

    def zero(self, vec) -> bool:
        return bool(np.allclose(vec, 0.0, atol=1e-12))

    def iso1(self, fn):
        return sum(fn(al) for al in range(2))

    def iso2(self, fn):
        return sum(fn(al, be) for al in range(2) for be in range(2))

    def group(self, cond, coef, op):
        acc = 0.0 * self.I
        k = self.k
        for i1, i2, i3, i4 in itertools.product(range(self.n), repeat=4):
            if not self.zero(cond(k[i1], k[i2], k[i3], k[i4])):
                continue
            c = coef(i1, i2, i3, i4)
            if c == 0.0:
                continue
            acc = acc + c * op(i1, i2, i3, i4)
        return self.pref * acc


def printed_groups(space: FockSpace, bare: BareParams, amps: Amplitudes) -> dict:
    """Printed kinetic term, normal groups G1..G5 and fluctuation groups F1..F6."""
    P = _Printed(space, bare, amps)
    f, g, a, k = P.f, P.g, P.a, P.k
    d = lambda i, j: 1.0 if i == j else 0.0
    modes = space.modes
    eps = modes.squared() / (2.0 * bare.m) + bare.m * bare.c ** 2
    kin = 0.0 * P.I
    for i in range(P.n):
        for al in range(2):
            kin = kin + eps[i] * (P.Ad(al, i) @ P.A(al, i))
            kin = kin + eps[modes.neg(i)] * (P.T(al, i) @ P.Td(al, i))
    out = {"kinetic": kin}

    same = lambda k1, k2, k3, k4: k1 - k2 + k3 - k4
    out["G1"] = P.group(
        same,
        lambda i1, i2, i3, i4: P.amp(f, i1, f, i2) * P.amp(f, i3, f, i4)
        * (1 - a * P.dot(k[i1] + k[i2], k[i3] + k[i4])),
        lambda i1, i2, i3, i4: P.iso2(lambda x, y: -P.Ad(x, i1) @ P.Ad(y, i3) @ P.A(x, i2) @ P.A(y, i4))
        + d(i2, i3) * P.iso1(lambda x: P.Ad(x, i1) @ P.A(x, i4)))
    out["G2"] = P.group(
        same,
        lambda i1, i2, i3, i4: P.amp(g, i1, g, i2) * P.amp(g, i3, g, i4)
        * (1 - a * P.dot(k[i1] + k[i2], k[i3] + k[i4])),
        lambda i1, i2, i3, i4: P.iso2(lambda x, y: -P.Td(x, i2) @ P.Td(y, i4) @ P.T(x, i1) @ P.T(y, i3))
        + d(i1, i4) * P.iso1(lambda x: P.Td(x, i2) @ P.T(x, i3))
        - 2 * d(i3, i4) * P.iso1(lambda x: P.Td(x, i2) @ P.T(x, i1))
        - 2 * d(i1, i2) * P.iso1(lambda x: P.Td(x, i4) @ P.T(x, i3))
        + 4 * d(i1, i2) * d(i3, i4) * P.I)
    out["G3"] = P.group(
        lambda k1, k2, k3, k4: k3 - k4 - k1 + k2,
        lambda i1, i2, i3, i4: 2 * P.amp(f, i1, f, i2) * P.amp(g, i3, g, i4)
        * (1 + a * P.dot(k[i1] + k[i2], k[i3] + k[i4])),
        lambda i1, i2, i3, i4: P.iso2(lambda x, y: P.Ad(x, i1) @ P.Td(y, i4) @ P.A(x, i2) @ P.T(y, i3))
        + 2 * d(i3, i4) * P.iso1(lambda x: P.Ad(x, i1) @ P.A(x, i2)))
    swap = lambda k1, k2, k3, k4: k1 + k2 - k3 - k4
    swap_coef = (lambda i1, i2, i3, i4: P.amp(f, i1, g, i2) * P.amp(g, i3, f, i4)
                 * (1 + a * P.dot(k[i1] - k[i2], k[i3] - k[i4])))
    quartic = lambda i1, i2, i3, i4: P.iso2(
        lambda x, y: P.Ad(x, i1) @ P.Td(x, i2) @ P.T(y, i3) @ P.A(y, i4))
    out["G4"] = P.group(swap, swap_coef, quartic)
    out["G5"] = P.group(
        swap, swap_coef,
        lambda i1, i2, i3, i4: quartic(i1, i2, i3, i4)
        - d(i2, i3) * P.iso1(lambda x: P.Ad(x, i1) @ P.A(x, i4))
        - d(i1, i4) * P.iso1(lambda x: P.Td(x, i2) @ P.T(x, i3))
        + 2 * d(i1, i4) * d(i2, i3) * P.I)

    out["F1"] = P.group(
        lambda k1, k2, k3, k4: k1 - k2 + k3 + k4,
        lambda i1, i2, i3, i4: P.amp(f, i1, f, i2) * P.amp(f, i3, g, i4)
        * (1 - a * P.dot(k[i1] + k[i2], k[i3] - k[i4])),
        lambda i1, i2, i3, i4: P.iso2(lambda x, y: 2 * P.Ad(x, i1) @ P.Ad(y, i3) @ P.Td(y, i4) @ P.A(x, i2))
        + d(i2, i3) * P.iso1(lambda x: P.Ad(x, i1) @ P.Td(x, i4)))
    out["F2"] = P.group(
        lambda k1, k2, k3, k4: k1 + k2 - k3 + k4,
        lambda i1, i2, i3, i4: P.amp(g, i1, f, i2) * P.amp(f, i3, f, i4)
        * (1 - a * P.dot(k[i2] - k[i1], k[i3] + k[i4])),
        lambda i1, i2, i3, i4: P.iso2(lambda x, y: 2 * P.Td(y, i3) @ P.T(x, i1) @ P.A(x, i2) @ P.A(y, i4))
        + d(i2, i3) * P.iso1(lambda x: P.T(x, i1) @ P.A(x, i4)))
    out["F3"] = P.group(
        lambda k1, k2, k3, k4: k1 - k2 - k3 - k4,
        lambda i1, i2, i3, i4: P.amp(g, i1, g, i2) * P.amp(f, i3, g, i4)
        * (1 - a * P.dot(k[i1] + k[i2], k[i3] - k[i4])),
        lambda i1, i2, i3, i4: P.iso2(lambda x, y: -2 * P.Td(x, i2) @ P.Ad(y, i3) @ P.Td(y, i4) @ P.T(x, i1))
        + d(i1, i4) * P.iso1(lambda x: P.Td(x, i2) @ P.Ad(x, i3))
        + 4 * d(i1, i2) * P.iso1(lambda x: P.Ad(x, i3) @ P.Td(x, i4)))
    out["F4"] = P.group(
        lambda k1, k2, k3, k4: k1 + k2 + k3 - k4,
        lambda i1, i2, i3, i4: P.amp(g, i1, f, i2) * P.amp(g, i3, g, i4)
        * (1 + a * P.dot(k[i1] - k[i2], k[i3] + k[i4])),
        lambda i1, i2, i3, i4: P.iso2(lambda x, y: -2 * P.Td(y, i4) @ P.T(x, i1) @ P.A(x, i2) @ P.T(y, i3))
        + d(i1, i4) * P.iso1(lambda x: P.A(x, i2) @ P.T(x, i3))
        + 4 * d(i3, i4) * P.iso1(lambda x: P.T(x, i1) @ P.A(x, i2)))
    total_zero = lambda k1, k2, k3, k4: k1 + k2 + k3 + k4
    out["F5"] = P.group(
        total_zero,
        lambda i1, i2, i3, i4: P.amp(f, i1, g, i2) * P.amp(f, i3, g, i4)
        * (1 - a * P.dot(k[i1] - k[i2], k[i3] - k[i4])),
        lambda i1, i2, i3, i4: P.iso2(lambda x, y: P.Ad(x, i1) @ P.Td(x, i2) @ P.Ad(y, i3) @ P.Td(y, i4)))
    out["F6"] = P.group(
        total_zero,
        lambda i1, i2, i3, i4: P.amp(g, i1, f, i2) * P.amp(g, i3, f, i4)
        * (1 - a * P.dot(k[i1] - k[i2], k[i3] - k[i4])),
        lambda i1, i2, i3, i4: P.iso2(lambda x, y: P.T(x, i1) @ P.A(x, i2) @ P.T(y, i3) @ P.A(y, i4)))
    return {key: sp.csr_matrix(val) for key, val in out.items()}


def transcription_report(space: FockSpace, bare: BareParams, amps: Amplitudes,
                         hamiltonian=None) -> dict:
    """Per-group Frobenius differences between the printed and field-built pieces."""
    printed = printed_groups(space, bare, amps)
    built = field_groups(space, bare, amps)
    pairs = {"kinetic": ("kinetic",), "AA": ("G1",), "AtildeAtilde": ("G2",),
             "mixed": ("G3",), "exchange": ("G4", "G5")}
    rows = {}
    for key, names in pairs.items():
        pr = sum(printed[nm] for nm in names)
        ref = number_balanced_part(built[key], space) if key == "kinetic" else built[key]
        rows[key] = {"printed_groups": list(names), "field_norm": norm_upper(ref),
                     "printed_norm": norm_upper(pr), "difference": norm_upper(pr - ref)}
    rows["exchange"]["G4_alone"] = norm_upper(printed["G4"] - built["exchange"])
    rows["exchange"]["G5_alone"] = norm_upper(printed["G5"] - built["exchange"])
    kin_fl = built["kinetic"] - number_balanced_part(built["kinetic"], space)
    inter = sum(built[x] for x in ("AA", "AtildeAtilde", "mixed", "exchange", "fluctuation"))
    inter_fl = inter - number_balanced_part(inter, space)
    fl_printed = sum(printed[f"F{i}"] for i in range(1, 7))
    rows["fluctuation"] = {"printed_groups": [f"F{i}" for i in range(1, 7)],
                           "field_norm": norm_upper(inter_fl),
                           "printed_norm": norm_upper(fl_printed),
                           "difference": norm_upper(fl_printed - inter_fl),
                           "kinetic_fluctuation_norm": norm_upper(kin_fl),
                           "per_group_norm": {f"F{i}": norm_upper(printed[f"F{i}"]) for i in range(1, 7)}}
    h = hamiltonian if hamiltonian is not None else built["kinetic"] + inter
    h = sp.csr_matrix(h)
    normal_printed = printed["kinetic"] + sum(printed[f"G{i}"] for i in range(1, 6))
    normal_single = printed["kinetic"] + sum(printed[f"G{i}"] for i in range(1, 5))
    normal_built = number_balanced_part(h, space)
    rows["normal_total"] = {"difference": norm_upper(normal_printed - normal_built),
                            "difference_single_exchange": norm_upper(normal_single - normal_built)}
    return rows
