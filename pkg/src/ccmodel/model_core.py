"""Parameters, renormalization, one-particle spectra and vacuum phase structure.

Two parameterizations describe the same model. The bare one fixes the
fermion mass ``m``, the contact coupling ``lam`` and ``c``. The physical one
fixes the renormalized mass ``M`` and the dimensionless coupling
``G = 2 g / (M c^2)``. Most closed forms below are written with
``s = sqrt(1 + G)``, in terms of which

    m = M (1 + s) / 2,   g = (s - 1) m c^2,   <k^2> = M^2 c^2 s (1 + s),
    cutoff^2 = 5 <k^2> / 3,   lam * cutoff^3 = 6 pi^2 g.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import ConvergenceError

PHASE_TOLERANCE = 1e-9
PIERCING_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BareParams:
    m: float
    lam: float
    c: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"bare mass must be positive, got {self.m!r}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c!r}")
        if not self.lam >= 0:
            raise ValueError(f"coupling must be non-negative, got {self.lam!r}")

    @property
    def alpha0(self) -> float:
        """Dimensionless bare coupling (10/3)^(3/2) lam m^2 c / (12 pi^2)."""
        return (10.0 / 3.0) ** 1.5 * self.lam * self.m ** 2 * self.c / (12.0 * math.pi ** 2)


@dataclass(frozen=True)
class ModelScheme:
    bare: BareParams
    M: float
    g: float
    G: float
    Lambda: float
    k2_avg: float
    Vstar_inv: float

    @property
    def c(self) -> float:
        return self.bare.c

    @property
    def m(self) -> float:
        return self.bare.m

    @property
    def lam(self) -> float:
        return self.bare.lam

    @property
    def s(self) -> float:
        return math.sqrt(1.0 + self.G)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["bare"] = asdict(self.bare)
        return out


class SpectrumBranch(str, enum.Enum):
    A = "A"
    ATILDE = "Atilde"
    B = "B"


class Regime(str, enum.Enum):
    HOLE = "hole"
    BUBBLE = "bubble"
    PIERCING = "piercing"
    PARTICLE = "particle"


class Phase(str, enum.Enum):
    SYMMETRIC_PREFERRED = "symmetric_preferred"
    BROKEN_PREFERRED = "broken_preferred"
    CRITICAL = "critical"


@dataclass(frozen=True)
class MassGapReport:
    m_A: float
    m_Atilde: float
    E_A0: float
    E_Atilde0: float
    alpha: float
    regime: Regime
    bare_mass_from_A: float
    bare_mass_from_Atilde: Optional[float]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["regime"] = self.regime.value
        return out


def scheme_from_physical(M: float, G: float, c: float = 1.0) -> ModelScheme:
    if not M > 0:
        raise ValueError(f"renormalized mass must be positive, got {M!r}")
    if not G >= 0:
        raise ValueError(f"G must be non-negative, got {G!r}")
    s = math.sqrt(1.0 + G)
    g = G * M * c * c / 2.0
    m = M * (1.0 + s) / 2.0
    k2 = M * M * c * c * (1.0 + G + s)
    cutoff = math.sqrt(5.0 * k2 / 3.0)
    lam = 6.0 * math.pi ** 2 * g / cutoff ** 3
    return ModelScheme(BareParams(m, lam, c), M, g, G, cutoff, k2, cutoff ** 3 / (6.0 * math.pi ** 2))


def renormalize(bare: BareParams, tol: float = 1e-13, max_iterations: int = 200) -> ModelScheme:
    """Solve the self-consistency conditions for given bare ``m`` and ``lam``.

    With ``t = s - 1`` the conditions collapse to the scalar fixed point
    ``t = 2 alpha0 (2 (1 + t) / (2 + t))^(3/2)``, a contraction for every
    ``alpha0 >= 0`` (the map's slope never exceeds about 0.53).
    """
    a0 = bare.alpha0
    t = 0.0
    trace = [t]
    for _ in range(max_iterations):
        t_next = 2.0 * a0 * (2.0 * (1.0 + t) / (2.0 + t)) ** 1.5
        trace.append(t_next)
        if abs(t_next - t) <= tol * abs(t_next):
            t = t_next
            break
        t = t_next
    else:
        raise ConvergenceError(
            f"renormalization did not converge in {max_iterations} iterations "
            f"(alpha0={a0!r})", trace=trace)
    s = 1.0 + t
    G = t * (t + 2.0)
    c = bare.c
    M = 2.0 * bare.m / (1.0 + s)
    g = t * bare.m * c * c
    k2 = M * M * c * c * s * (1.0 + s)
    cutoff = math.sqrt(5.0 * k2 / 3.0)
    return ModelScheme(bare, M, g, G, cutoff, k2, cutoff ** 3 / (6.0 * math.pi ** 2))


def _gap_constants(scheme: ModelScheme):
    m, c, g = scheme.m, scheme.c, scheme.g
    a = 1.0 / (4.0 * m * m * c * c)
    return m, c, g, a


def spectrum(branch, k, scheme: ModelScheme):
    """One-particle energy of ``branch`` at momentum magnitude ``k`` (array friendly)."""
    branch = SpectrumBranch(branch)
    k2 = np.square(np.asarray(k, dtype=float))
    m, c, g, a = _gap_constants(scheme)
    free = k2 / (2.0 * m) + m * c * c
    if branch is SpectrumBranch.A:
        out = free + g * k2 * a - 5.0 * g + g * scheme.k2_avg * a
    elif branch is SpectrumBranch.ATILDE:
        out = -free + g * k2 * a + 3.0 * g + g * scheme.k2_avg * a
    else:
        out = k2 / (2.0 * scheme.M) + scheme.M * c * c
    return out if np.ndim(out) else float(out)


def regime_of(scheme: ModelScheme) -> Regime:
    if scheme.g == 0.0:
        return Regime.HOLE
    x = scheme.g / (2.0 * scheme.m * scheme.c ** 2)
    if math.isclose(x, 1.0, rel_tol=PIERCING_TOLERANCE):
        return Regime.PIERCING
    return Regime.BUBBLE if x < 1.0 else Regime.PARTICLE


def masses_and_gaps(scheme: ModelScheme) -> MassGapReport:
    m, c, g, a = _gap_constants(scheme)
    x = g / (2.0 * m * c * c)
    regime = regime_of(scheme)
    m_A = m / (1.0 + x)
    m_At = math.inf if regime is Regime.PIERCING else m / (x - 1.0)
    alpha = scheme.s - 3.0
    E_A0 = float(spectrum(SpectrumBranch.A, 0.0, scheme))
    E_At0 = float(spectrum(SpectrumBranch.ATILDE, 0.0, scheme))
    # both branch masses must point back to the same bare mass
    from_A = m_A * (1.0 + scheme.s) / 2.0
    from_At = None
    if alpha > 0:
        from_At = m_At * alpha * (1.0 + scheme.s) / (2.0 * (alpha + 4.0))
    return MassGapReport(m_A, m_At, E_A0, E_At0, alpha, regime, from_A, from_At)


def gap_sum(scheme: ModelScheme) -> float:
    """Closed form of E_A(0) + E_Atilde(0) implied by the two gap formulas."""
    m, c, g, a = _gap_constants(scheme)
    return -2.0 * g + 2.0 * g * scheme.k2_avg * a


def vacuum_energy_density(scheme: ModelScheme) -> float:
    """Vacuum energy per excitation volume, from the bare parameterization."""
    m, c, g = scheme.m, scheme.c, scheme.g
    return scheme.k2_avg / m + 2.0 * m * c * c - 4.0 * g


def vacuum_energy_density_physical(M: float, G: float, c: float = 1.0) -> float:
    """The same quantity written in (M, G)."""
    return M * c * c * (3.0 * math.sqrt(1.0 + G) + 1.0 - 2.0 * G)


def critical_coupling() -> float:
    """Positive root of G^2 - 13 G / 4 - 2 = 0, where the vacuum energy vanishes."""
    return (13.0 + math.sqrt(297.0)) / 8.0


def classify_phase(G: float, M: float = 1.0, c: float = 1.0) -> Phase:
    if not G >= 0:
        raise ValueError(f"G must be non-negative, got {G!r}")
    w = vacuum_energy_density_physical(M, G, c) / (M * c * c)
    if abs(w) <= PHASE_TOLERANCE:
        return Phase.CRITICAL
    return Phase.SYMMETRIC_PREFERRED if w > 0 else Phase.BROKEN_PREFERRED


# published series coefficients; reported beside the fit, never asserted
REFERENCE_SERIES = {"coupling": (1.0, 9.0, 195.0 / 2.0), "cutoff": (1.0, 3.0, 47.0 / 2.0)}


def series_ratios(alpha0: float, m: float = 1.0, c: float = 1.0):
    """Return (g / (2 m c^2 alpha0), cutoff / (sqrt(10/3) m c)) at the given alpha0."""
    lam = alpha0 * 12.0 * math.pi ** 2 / ((10.0 / 3.0) ** 1.5 * m * m * c)
    sch = renormalize(BareParams(m, lam, c))
    return (sch.g / (2.0 * m * c * c * alpha0),
            sch.Lambda / (math.sqrt(10.0 / 3.0) * m * c))


def fit_series_coefficients(alpha_values=None, degree: int = 3):
    """Fit polynomial coefficients of both series ratios in powers of alpha0.

    Returns a dict with the fitted coefficients (constant term first) for the
    coupling and cutoff ratios, and the sample points used.
    """
    if alpha_values is None:
        alpha_values = np.linspace(2e-3, 4e-2, 24)
    alpha_values = np.asarray(alpha_values, dtype=float)
    ratios = np.array([series_ratios(a) for a in alpha_values])
    out = {"alpha0": alpha_values.tolist()}
    for col, key in enumerate(("coupling", "cutoff")):
        coeffs = np.polynomial.polynomial.polyfit(alpha_values, ratios[:, col], degree)
        out[key] = coeffs.tolist()
    return out
