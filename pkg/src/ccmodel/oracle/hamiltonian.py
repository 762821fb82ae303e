"""Hamiltonian of the discretized model, built by substituting the field.

The field component of momentum k and amplitude index b is

    psi[b](k) = f[b](k) A(k) + g[b](-k) At^dagger(-k),

and the Hamiltonian is

    H = sum eps(k) psi^dag psi
        - (lam / Omega) sum_p [rho_p rho_-p - j_p . j_-p / (4 m^2 c^2)]

with density rho_p = sum_k psi^dag(k) psi(k + p) and current
j_p = sum_k (2k + p) psi^dag(k) psi(k + p).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp

from ..model_core import BareParams
from .fock import FockSpace, Ladders, dag
from .modes import AmplitudePair, ModeSet

Amplitudes = Union[AmplitudePair, Sequence[AmplitudePair]]


def per_mode(amps: Amplitudes, n: int) -> list:
    if isinstance(amps, AmplitudePair):
        return [amps] * n
    amps = list(amps)
    if len(amps) != n:
        raise ValueError(f"need one amplitude pair per mode ({n}), got {len(amps)}")
    return amps


def field_components(modes: ModeSet, ladders: Ladders, amps: Amplitudes):
    """psi[b][isospin][k] for amplitude index b."""
    n = len(modes)
    pairs = per_mode(amps, n)
    out = [[[None] * n for _ in range(2)] for _ in range(2)]
    for k in range(n):
        mk = modes.neg(k)
        for b in range(2):
            fb, gb = pairs[k].f[b], pairs[mk].g[b]
            for a in range(2):
                out[b][a][k] = fb * ladders.A[a][k] + gb * dag(ladders.At[a][mk])
    return out


def one_body(modes: ModeSet, left, right, weight):
    """sum over b, isospin, k with k and k+p in the set of weight(k, p) left^dag(k) right(k+p), per p."""
    n = len(modes)
    karr = modes.array
    blocks = {}
    for k in range(n):
        for q in range(n):
            p = karr[q] - karr[k]
            key = ModeSet._key(p)
            term = None
            for b in range(2):
                for a in range(2):
                    t = dag(left[b][a][k]) @ right[b][a][q]
                    term = t if term is None else term + t
            w = weight(karr[k], p)
            blocks.setdefault(key, []).append((w, term))
    return blocks


@dataclass
class HamiltonianParts:
    total: object
    normal: object
    fluctuation: object


def interaction(modes: ModeSet, bare: BareParams, left, right, left2=None, right2=None):
    """-(lam/Omega) sum_p [rho_p rho'_-p - a j_p . j'_-p] for given field pieces."""
    left2 = left if left2 is None else left2
    right2 = right if right2 is None else right2
    a = 1.0 / (4.0 * bare.m ** 2 * bare.c ** 2)
    d = modes.dim
    rho1 = _collect(one_body(modes, left, right, lambda k, p: 1.0))
    rho2 = _collect(one_body(modes, left2, right2, lambda k, p: 1.0))
    cur1 = [_collect(one_body(modes, left, right, lambda k, p, i=i: (2 * k + p)[i])) for i in range(d)]
    cur2 = [_collect(one_body(modes, left2, right2, lambda k, p, i=i: (2 * k + p)[i])) for i in range(d)]
    total = None
    for key in rho1:
        neg = ModeSet._key(-np.asarray(key))
        if neg not in rho2:
            continue
        t = rho1[key] @ rho2[neg]
        for i in range(d):
            t = t - a * (cur1[i][key] @ cur2[i][neg])
        total = t if total is None else total + t
    return -(bare.lam / modes.omega_volume) * total


def _collect(blocks: dict) -> dict:
    out = {}
    for key, terms in blocks.items():
        acc = None
        for w, t in terms:
            if w == 0.0:
                continue
            acc = w * t if acc is None else acc + w * t
        if acc is None:
            acc = 0.0 * terms[0][1]
        out[key] = acc
    return out


def kinetic(modes: ModeSet, bare: BareParams, left, right=None):
    right = left if right is None else right
    eps = modes.squared() / (2.0 * bare.m) + bare.m * bare.c ** 2
    total = None
    for k in range(len(modes)):
        for b in range(2):
            for a in range(2):
                t = eps[k] * (dag(left[b][a][k]) @ right[b][a][k])
                total = t if total is None else total + t
    return total


def hamiltonian_from_ladders(modes: ModeSet, bare: BareParams, ladders: Ladders, amps: Amplitudes):
    psi = field_components(modes, ladders, amps)
    h = kinetic(modes, bare, psi)
    if bare.lam != 0.0:
        h = h + interaction(modes, bare, psi, psi)
    return h


def number_balanced_part(op, space: FockSpace):
    """Part of ``op`` that conserves the total A plus Atilde excitation number."""
    counts = space.occupations.sum(axis=1)
    if sp.issparse(op):
        coo = op.tocoo()
        keep = counts[coo.row] == counts[coo.col]
        return sp.csr_matrix((coo.data[keep], (coo.row[keep], coo.col[keep])), shape=op.shape)
    mask = counts[:, None] == counts[None, :]
    return np.where(mask, op, 0.0)


def build_hamiltonian(modes: ModeSet, bare: BareParams, amps: Amplitudes,
                      space: FockSpace = None) -> HamiltonianParts:
    space = space or FockSpace(modes)
    h = hamiltonian_from_ladders(modes, bare, space.ladders(), amps)
    h = sp.csr_matrix(h)
    h.eliminate_zeros()
    hn = number_balanced_part(h, space)
    return HamiltonianParts(h, hn, (h - hn).tocsr())
