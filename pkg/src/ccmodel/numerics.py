"""Radial integrals with a sharp momentum cutoff, quadrature and root finding.

All integrals here are one-dimensional; angular factors are applied by the
callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import ConvergenceError, DivergentIntegralError, RootBracketError

# Below this value of cutoff/chi the closed forms lose digits to cancellation
# and the power series in cutoff/chi takes over.
_SERIES_SWITCH = 0.5


@dataclass(frozen=True)
class RadialIntegralSpec:
    power: int
    cutoff: float
    pole_scale: float = 0.0

    def __post_init__(self):
        if self.power not in (0, 2, 4, 6):
            raise ValueError(f"power must be one of 0, 2, 4, 6, got {self.power!r}")
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff!r}")
        if not self.pole_scale >= 0:
            raise ValueError(f"pole_scale must be non-negative, got {self.pole_scale!r}")


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    tolerance: float = 1e-12
    max_iterations: int = 200

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


def _series(power: int, u: float) -> float:
    # sum_n (-1)^n u^(power+2n+1) / (power+2n+1), valid for u < 1
    total = 0.0
    term = u ** (power + 1)
    u2 = u * u
    n = 0
    while True:
        contrib = term / (power + 2 * n + 1)
        total += -contrib if n % 2 else contrib
        if contrib <= 1e-18 * abs(total):
            return total
        term *= u2
        n += 1


def radial_integral(power: int, cutoff: float, chi: float = 0.0) -> float:
    """Return the integral of k**power / (k**2 + chi**2) over 0 <= k <= cutoff."""
    spec = RadialIntegralSpec(int(power), float(cutoff), float(chi))
    p, lam, chi = spec.power, spec.cutoff, spec.pole_scale
    if chi == 0.0:
        if p == 0:
            raise DivergentIntegralError("power 0 integral diverges at chi = 0")
        return lam ** (p - 1) / (p - 1)
    u = lam / chi
    if u < _SERIES_SWITCH:
        return chi ** (p - 1) * _series(p, u)
    # upward recurrence R_p = cutoff^(p-1)/(p-1) - chi^2 R_(p-2), stable for chi <~ cutoff
    if p == 0:
        return math.atan(u) / chi
    # start at power 2 so a tiny chi never forms chi^2 * (1/chi)
    value = lam - chi * math.atan(u)
    for q in range(4, p + 1, 2):
        value = lam ** (q - 1) / (q - 1) - chi * chi * value
    return value


def quadrature(integrand: Callable[[float], float], lo: float, hi: float,
               tol: float = 1e-12, limit: int = 200) -> float:
    """Adaptive Gauss-Kronrod estimate of the integral of ``integrand`` on [lo, hi]."""
    value, error, info = integrate.quad(integrand, lo, hi, epsabs=tol, epsrel=tol,
                                        limit=limit, full_output=True)[:3]
    if not np.isfinite(value):
        raise ConvergenceError(f"quadrature produced a non-finite value on [{lo}, {hi}]")
    if error > max(tol, tol * abs(value)) * 1e3:
        raise ConvergenceError(
            f"quadrature did not converge on [{lo}, {hi}]: estimate {value!r}, "
            f"error {error!r} after {info['last']} subintervals")
    return float(value)


def find_root(objective: Callable[[float], float], lo: float, hi: float,
              tol: float = 1e-12, max_iterations: int = 200) -> float:
    """Bracketed root of ``objective`` using Brent's method.

    The iterate never leaves the bracket; bisection steps guarantee progress.
    """
    bracket = RootBracket(float(lo), float(hi), tol, max_iterations)
    f_lo = objective(bracket.lo)
    f_hi = objective(bracket.hi)
    if f_lo == 0.0:
        return bracket.lo
    if f_hi == 0.0:
        return bracket.hi
    if not (np.isfinite(f_lo) and np.isfinite(f_hi)) or np.sign(f_lo) == np.sign(f_hi):
        raise RootBracketError(
            f"objective does not change sign on [{bracket.lo}, {bracket.hi}]",
            trace=[(bracket.lo, f_lo), (bracket.hi, f_hi)])
    try:
        root, result = optimize.brentq(objective, bracket.lo, bracket.hi, xtol=tol,
                                       maxiter=max_iterations, full_output=True,
                                       disp=False)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    if not result.converged:
        raise ConvergenceError(
            f"root not converged after {result.iterations} iterations: {result.flag}",
            trace=[(root, objective(root))])
    return float(root)


def sign_changes(objective: Callable[[float], float], grid: Sequence[float]):
    """Scan ``grid`` and return (intervals with a sign change, full trace)."""
    trace = [(float(x), float(objective(x))) for x in grid]
    hits = []
    for (x0, f0), (x1, f1) in zip(trace, trace[1:]):
        if f0 == 0.0:
            hits.append((x0, x0))
        elif np.isfinite(f0) and np.isfinite(f1) and f0 * f1 < 0:
            hits.append((x0, x1))
    if trace and trace[-1][1] == 0.0:
        hits.append((trace[-1][0], trace[-1][0]))
    return hits, trace
