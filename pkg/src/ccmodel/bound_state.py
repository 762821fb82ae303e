"""Two-particle bound states of the contact model at zero total momentum.

The kernel between relative momenta k and q is ``s0 + a (k + q)^2`` with
``a = 1 / (4 m^2 c^2)``; ``s0 = +1`` for pairs of like excitations and
``s0 = -1`` for a particle-hole pair. Because the kernel is a finite sum of
separable terms, the formfactor is ``F(k) = A + k^2 B + k.C``. The even part
(A, B) is the isoscalar channel and the odd part C the isovector one.

The pair propagator is ``kappa (k^2 + chi^2)`` with ``mu = P0 - kappa chi^2``;
in the restored sector ``kappa = 1/M`` and ``P0 = 2 M c^2``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import numerics
from .errors import DegenerateSolutionError, RootBracketError
from .model_core import ModelScheme, masses_and_gaps, scheme_from_physical

RESIDUAL_TOLERANCE = 1e-6
SCAN_POINTS = 200
# chi / cutoff range scanned for the isoscalar root
SCAN_LO = 1e-6
SCAN_HI = 10.0

# published z(G) values, the comparison target of the bound-state table
REFERENCE_Z = {
    1.2: 175.0, 1.3: 18.5, 1.4: 10.5, 2.0: 3.8, 3.0: 2.7, 4.0: 2.0,
    5.0: 1.85, 6.0: 1.7, 7.0: 1.65, 8.0: 1.55, 9.0: 1.48, 10.0: 1.44,
}
Z_ASYMPTOTE = math.sqrt(5.0 / 6.0)


class Channel(str, enum.Enum):
    ISOSCALAR = "isoscalar"
    ISOVECTOR = "isovector"


@dataclass(frozen=True)
class Sector:
    """Propagator and kernel-sign data for one two-particle configuration."""

    name: str
    kinetic: float      # kappa: P(k) - mu = kappa (k^2 + chi^2)
    threshold: float    # P0 = P(0)
    kernel_sign: int    # s0


def sector(scheme: ModelScheme, name: str = "restored") -> Sector:
    """Pair sectors: restored, AA, AtildeAtilde, AAtilde."""
    if name == "restored":
        return Sector(name, 1.0 / scheme.M, 2.0 * scheme.M * scheme.c ** 2, 1)
    gaps = masses_and_gaps(scheme)
    inv_at = 0.0 if math.isinf(gaps.m_Atilde) else 1.0 / gaps.m_Atilde
    if name == "AA":
        return Sector(name, 1.0 / gaps.m_A, 2.0 * gaps.E_A0, 1)
    if name == "AtildeAtilde":
        return Sector(name, inv_at, 2.0 * gaps.E_Atilde0, 1)
    if name == "AAtilde":
        return Sector(name, 0.5 / gaps.m_A + 0.5 * inv_at, gaps.E_A0 + gaps.E_Atilde0, -1)
    raise ValueError(f"unknown sector {name!r}")


@dataclass(frozen=True)
class IntegralsI:
    I1: float
    I2: float
    I3: float
    I4: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.I1 - 1.0, self.I2], [self.I3, self.I4 - 1.0]])


@dataclass
class BoundStateResult:
    channel: Channel
    chi: Optional[float]
    mu0: Optional[float]
    z: Optional[float]
    exists: bool
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"channel": self.channel.value, "chi": self.chi, "mu0": self.mu0,
                "z": self.z, "exists": self.exists, "diagnostics": self.diagnostics}


def integrals_I(scheme: ModelScheme, chi: float, pair: Optional[Sector] = None) -> IntegralsI:
    pair = pair or sector(scheme)
    if scheme.lam == 0.0:
        return IntegralsI(0.0, 0.0, 0.0, 0.0)
    a = 1.0 / (4.0 * scheme.m ** 2 * scheme.c ** 2)
    pref = scheme.lam / (math.pi ** 2 * pair.kinetic)
    cutoff, s0 = scheme.Lambda, pair.kernel_sign
    r2 = numerics.radial_integral(2, cutoff, chi)
    r4 = numerics.radial_integral(4, cutoff, chi)
    r6 = numerics.radial_integral(6, cutoff, chi)
    return IntegralsI(pref * (s0 * r2 + a * r4), pref * (s0 * r4 + a * r6),
                      pref * a * r2, pref * a * r4)


def isoscalar_determinant(scheme: ModelScheme, chi: float, pair: Optional[Sector] = None) -> float:
    ints = integrals_I(scheme, chi, pair)
    return (ints.I1 - 1.0) * (ints.I4 - 1.0) - ints.I2 * ints.I3


def eq3_sides(scheme: ModelScheme, chi: float):
    """Both sides of the restored-sector gap condition written in chi alone."""
    M, m, c, g = scheme.M, scheme.m, scheme.c, scheme.g
    a = 1.0 / (4.0 * m * m * c * c)
    lhs = scheme.lam * M / (2.0 * math.pi ** 2) * numerics.radial_integral(2, scheme.Lambda, chi)
    gamma = M * g * a
    rhs = (gamma - 0.5) ** 2 / (0.5 - chi * chi * a + gamma * (scheme.k2_avg + chi * chi) * a)
    return lhs, rhs


def eq3_residual(scheme: ModelScheme, chi: float) -> float:
    lhs, rhs = eq3_sides(scheme, chi)
    return (lhs - rhs) / lhs


def c1_coefficient(G: float, variant: str = "corrected") -> float:
    s = math.sqrt(1.0 + G)
    printed = 0.45 * (3.0 + 2.0 * G + s) / (1.0 + G + s)
    if variant == "printed":
        return printed
    if variant == "corrected":
        return G * printed
    raise ValueError(f"unknown c1 variant {variant!r}")


def c2_coefficient(G: float) -> float:
    return 0.75 * G * (1.0 + 2.0 / (1.0 + math.sqrt(1.0 + G)))


def _z_minus_arctan(z: float) -> float:
    # equals the power-2 radial integral with unit pole scale; no cancellation at small z
    return numerics.radial_integral(2, z, 1.0)


def transcendental_residual(G: float, z: float, variant: str = "corrected") -> float:
    if not (G > 0 and z > 0):
        raise ValueError("transcendental residual needs G > 0 and z > 0")
    c1 = c1_coefficient(G, variant)
    return (z * z * c1 - c2_coefficient(G)) * _z_minus_arctan(z) - z ** 3


def solve_transcendental(G: float, variant: str = "corrected") -> Optional[float]:
    """Root z of the transcendental equation, or None when c1 <= 1."""
    c1 = c1_coefficient(G, variant)
    if c1 <= 1.0:
        return None
    f = lambda z: transcendental_residual(G, z, variant) / z ** 3
    hi = 2.0
    while f(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e16:
            raise RootBracketError(f"no upper bracket for G={G}")
    return numerics.find_root(f, 1e-3, hi, tol=1e-14 * hi)


def existence_threshold(variant: str = "corrected") -> float:
    """Smallest G with c1 = 1; bound states exist only above it."""
    return numerics.find_root(lambda G: c1_coefficient(G, variant) - 1.0, 1.0, 2.0, tol=1e-15)


def solve_isoscalar(scheme: ModelScheme, pair: Optional[Sector] = None,
                    variant: str = "corrected") -> BoundStateResult:
    pair = pair or sector(scheme)
    restored = pair.name == "restored"
    diag: dict = {"sector": pair.name}
    if restored:
        c1 = c1_coefficient(scheme.G, variant) if scheme.G > 0 else 0.0
        diag.update(c1=c1, threshold_G=existence_threshold(variant))
        if c1 <= 1.0:
            diag["reason"] = "c1 <= 1: the gap condition has no root"
            return BoundStateResult(Channel.ISOSCALAR, None, None, None, False, diag)
    cutoff = scheme.Lambda
    f = lambda x: isoscalar_determinant(scheme, x * cutoff, pair)
    grid = np.geomspace(SCAN_LO, SCAN_HI, SCAN_POINTS)
    hits, trace = numerics.sign_changes(f, grid)
    if not hits:
        if restored:
            raise RootBracketError(
                f"no sign change of the determinant for G={scheme.G} on "
                f"chi/cutoff in [{SCAN_LO}, {SCAN_HI}]", trace=trace)
        diag["reason"] = "no sign change of the determinant"
        return BoundStateResult(Channel.ISOSCALAR, None, None, None, False, diag)
    lo, hi = hits[-1]
    x = lo if lo == hi else numerics.find_root(f, lo, hi, tol=1e-15 * hi)
    chi = x * cutoff
    mu0 = pair.threshold - pair.kinetic * chi * chi
    diag.update(sign_changes=len(hits), determinant=f(x))
    z = cutoff / chi
    if restored:
        diag["eq3_residual"] = eq3_residual(scheme, chi)
        diag["tan_residual"] = transcendental_residual(scheme.G, z, variant) / z ** 3
        diag["triple_equivalence"] = bool(
            abs(diag["eq3_residual"]) < RESIDUAL_TOLERANCE
            and abs(diag["tan_residual"]) < RESIDUAL_TOLERANCE)
    return BoundStateResult(Channel.ISOSCALAR, chi, mu0, z, True, diag)


def isovector_rhs(G: float, chi_over_cutoff: float) -> float:
    s = math.sqrt(1.0 + G)
    return 2.0 * G / (1.0 + s) ** 2 * numerics.radial_integral(4, 1.0, chi_over_cutoff)


def isovector_strength(scheme: ModelScheme, chi: float, pair: Optional[Sector] = None) -> float:
    """Right-hand side of the isovector condition ``1 = strength``."""
    pair = pair or sector(scheme)
    a = 1.0 / (4.0 * scheme.m ** 2 * scheme.c ** 2)
    return 2.0 * scheme.lam * a / (3.0 * math.pi ** 2 * pair.kinetic) * \
        numerics.radial_integral(4, scheme.Lambda, chi)


def solve_isovector(scheme: ModelScheme, pair: Optional[Sector] = None) -> BoundStateResult:
    pair = pair or sector(scheme)
    # the strength decreases with chi, so its supremum sits at chi = 0
    sup = isovector_strength(scheme, 0.0, pair)
    diag = {"sector": pair.name, "sup_rhs": sup, "bound": 2.0 / 3.0}
    if pair.name == "restored":
        diag["sup_rhs_reduced"] = isovector_rhs(scheme.G, 0.0)
        diag["below_bound"] = bool(sup < 2.0 / 3.0)
    if sup < 1.0 or pair.kinetic <= 0:
        return BoundStateResult(Channel.ISOVECTOR, None, None, None, False, diag)
    f = lambda x: isovector_strength(scheme, x * scheme.Lambda, pair) - 1.0
    hits, trace = numerics.sign_changes(f, np.geomspace(SCAN_LO, SCAN_HI, SCAN_POINTS))
    if not hits:
        return BoundStateResult(Channel.ISOVECTOR, None, None, None, False, diag)
    lo, hi = hits[-1]
    chi = numerics.find_root(f, lo, hi, tol=1e-15 * hi) * scheme.Lambda
    return BoundStateResult(Channel.ISOVECTOR, chi, pair.threshold - pair.kinetic * chi * chi,
                            scheme.Lambda / chi, True, diag)


@dataclass(frozen=True)
class Table1Row:
    G: float
    z: Optional[float]
    z_reference: Optional[float]
    rel_deviation: Optional[float]
    exists: bool
    z_transcendental: Optional[float]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _table1_row(args) -> Table1Row:
    G, variant = args
    res = solve_isoscalar(scheme_from_physical(1.0, G), variant=variant)
    reference = REFERENCE_Z.get(G)
    dev = None if (reference is None or res.z is None) else (res.z - reference) / reference
    return Table1Row(G, res.z, reference, dev, res.exists, solve_transcendental(G, variant))


def table1(G_values: Sequence[float] = tuple(REFERENCE_Z), variant: str = "corrected",
           jobs: int = 1) -> list:
    items = [(float(G), variant) for G in G_values]
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_table1_row, items))
    return [_table1_row(it) for it in items]


@dataclass(frozen=True)
class Wavefunction:
    channel: Channel
    coeff_A: float
    coeff_B: float
    chi: float
    kinetic: float
    self_consistency: float
    l2_norm: float

    def formfactor(self, k):
        return self.coeff_A + np.square(k) * self.coeff_B

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        return self.formfactor(k) / (self.kinetic * (k * k + self.chi ** 2))


def wavefunction(scheme: ModelScheme, result: BoundStateResult,
                 pair: Optional[Sector] = None, grid_points: int = 32) -> Wavefunction:
    if not result.exists or result.channel is not Channel.ISOSCALAR:
        raise DegenerateSolutionError("wavefunction needs an existing isoscalar bound state")
    pair = pair or sector(scheme)
    chi = result.chi
    mat = integrals_I(scheme, chi, pair).matrix()
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[-1] > 1e-8 * max(sv[0], 1.0) or sv[0] < 1e-8:
        raise DegenerateSolutionError(f"null space dimension is not one: singular values {sv}")
    coeff_B = -mat[0, 0] / mat[0, 1]
    a = 1.0 / (4.0 * scheme.m ** 2 * scheme.c ** 2)
    s0 = pair.kernel_sign
    d = lambda q: (1.0 + q * q * coeff_B) / (pair.kinetic * (q * q + chi * chi))
    pref = scheme.lam / math.pi ** 2
    cutoff = scheme.Lambda
    # kernel moments rebuild A and B of F(k) = A + k^2 B
    rebuilt_A = pref * numerics.quadrature(lambda q: q * q * (s0 + a * q * q) * d(q), 0.0, cutoff)
    rebuilt_B = pref * numerics.quadrature(lambda q: q * q * a * d(q), 0.0, cutoff)
    ks = np.linspace(0.0, cutoff, grid_points)
    want = 1.0 + ks ** 2 * coeff_B
    got = rebuilt_A + ks ** 2 * rebuilt_B
    resid = float(np.max(np.abs(got - want)) / np.max(np.abs(want)))
    norm = 4.0 * math.pi * numerics.quadrature(lambda q: (q * d(q)) ** 2, 0.0, cutoff)
    return Wavefunction(Channel.ISOSCALAR, 1.0, coeff_B, chi, pair.kinetic, resid, norm)


def discrete_secular(momenta, pair_energy, coupling, a, kernel_sign, parity):
    """Secular function of the mode-sum kernel equation at zero total momentum.

    ``momenta`` is an (n, d) array of relative momenta q (pair q, -q),
    ``pair_energy`` the unperturbed pair energies P(q) and ``coupling`` the
    discrete strength 2 lam / Omega. Returns a callable mu -> determinant.
    """
    q = np.asarray(momenta, dtype=float)
    q = q.reshape(len(q), -1)
    q2 = np.sum(q * q, axis=1)
    P = np.asarray(pair_energy, dtype=float)

    if parity == "even":
        def det(mu):
            w = coupling / (P - mu)
            i1 = np.sum(w * (kernel_sign + a * q2))
            i2 = np.sum(w * (kernel_sign + a * q2) * q2)
            i3 = np.sum(w * a)
            i4 = np.sum(w * a * q2)
            return (i1 - 1.0) * (i4 - 1.0) - i2 * i3
    elif parity == "odd":
        def det(mu):
            w = coupling / (P - mu)
            mat = 2.0 * a * np.einsum("n,ni,nj->ij", w, q, q)
            return float(np.linalg.det(np.eye(q.shape[1]) - mat))
    else:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    return det


def discrete_roots(momenta, pair_energy, coupling, a, kernel_sign, parity,
                   samples: int = 400) -> list:
    """All roots of the secular function, scanning each pole-free interval."""
    det = discrete_secular(momenta, pair_energy, coupling, a, kernel_sign, parity)
    P = np.asarray(pair_energy, dtype=float)
    poles = np.unique(np.round(P, 14))
    q = np.asarray(momenta, dtype=float).reshape(len(P), -1)
    reach = abs(coupling) * len(P) * (1.0 + 4.0 * a * float(np.max(np.sum(q * q, axis=1)))) * 4.0 + 1.0
    edges = [poles[0] - reach, *poles, poles[-1] + reach]
    roots = []
    for lo, hi in zip(edges, edges[1:]):
        width = hi - lo
        # cluster samples toward the poles, where roots can sit very close
        t = np.linspace(0.0, 1.0, samples)
        u = 0.5 - 0.5 * np.cos(np.pi * t)
        pad = 1e-12 * max(1.0, abs(lo), abs(hi))
        xs = np.unique(np.clip(lo + width * u, lo + pad, hi - pad))
        hits, _ = numerics.sign_changes(det, xs)
        for x0, x1 in hits:
            roots.append(x0 if x0 == x1 else numerics.find_root(det, x0, x1, tol=1e-15 * max(1.0, abs(x1))))
    return sorted(roots)


__all__ = [
    "Channel", "Sector", "sector", "IntegralsI", "BoundStateResult", "integrals_I",
    "isoscalar_determinant", "eq3_residual", "eq3_sides", "c1_coefficient", "c2_coefficient",
    "transcendental_residual", "solve_transcendental", "existence_threshold", "solve_isoscalar",
    "isovector_rhs", "isovector_strength", "solve_isovector", "Table1Row", "table1",
    "Wavefunction", "wavefunction", "discrete_secular", "discrete_roots", "REFERENCE_Z",
    "Z_ASYMPTOTE",
]
