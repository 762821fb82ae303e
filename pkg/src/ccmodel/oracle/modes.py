"""Finite momentum sets and the two-component amplitude pair."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModeSet:
    momenta: tuple
    omega_volume: float = 1.0

    def __post_init__(self):
        arr = np.asarray(self.momenta, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[1] not in (1, 3) or len(arr) == 0:
            raise ValueError("momenta must be a non-empty list of 1- or 3-vectors")
        if not self.omega_volume > 0:
            raise ValueError("omega_volume must be positive")
        keys = [self._key(k) for k in arr]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate momenta in mode set")
        lookup = {key: i for i, key in enumerate(keys)}
        for k in arr:
            if self._key(-k) not in lookup:
                raise ValueError(f"mode set is not closed under negation: missing {-k}")
        object.__setattr__(self, "momenta", tuple(tuple(float(x) for x in k) for k in arr))
        object.__setattr__(self, "_lookup", lookup)

    @staticmethod
    def _key(k) -> tuple:
        return tuple(round(float(x), 12) + 0.0 for x in np.atleast_1d(k))

    @classmethod
    def grid_1d(cls, n_modes: int, spacing: float = 1.0, omega_volume: float = 1.0) -> "ModeSet":
        if n_modes < 1:
            raise ValueError("need at least one mode")
        half = n_modes // 2
        if n_modes % 2:
            ks = [spacing * j for j in range(-half, half + 1)]
        else:
            ks = [spacing * j for j in range(-half, 0)] + [spacing * j for j in range(1, half + 1)]
        return cls(tuple((k,) for k in ks), omega_volume)

    def __len__(self) -> int:
        return len(self.momenta)

    @property
    def dim(self) -> int:
        return len(self.momenta[0])

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.momenta, dtype=float)

    def index(self, k):
        """Index of momentum ``k`` or None when it is not in the set."""
        return self._lookup.get(self._key(k))

    def neg(self, i: int) -> int:
        return self._lookup[self._key(-np.asarray(self.momenta[i]))]

    def squared(self) -> np.ndarray:
        return np.sum(self.array ** 2, axis=1)


@dataclass(frozen=True)
class AmplitudePair:
    f: tuple
    g: tuple

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(complex(x) for x in self.f))
        object.__setattr__(self, "g", tuple(complex(x) for x in self.g))
        if len(self.f) != 2 or len(self.g) != 2:
            raise ValueError("amplitudes are complex 2-vectors")

    @property
    def overlap(self) -> complex:
        """sum_b f^b conj(g^b); zero for an admissible pair."""
        f, g = np.array(self.f), np.array(self.g)
        return complex(np.sum(f * np.conj(g)))

    def residuals(self) -> dict:
        f, g = np.array(self.f), np.array(self.g)
        unit = np.outer(f, f.conj()) + np.outer(g, g.conj()) - np.eye(2)
        return {
            "decomposition": float(np.max(np.abs(unit))),
            "orthogonality": abs(self.overlap),
            "norm_f": abs(float(np.vdot(f, f).real) - 1.0),
            "norm_g": abs(float(np.vdot(g, g).real) - 1.0),
        }

    def is_admissible(self, tol: float = 1e-12) -> bool:
        return max(self.residuals().values()) < tol


def amplitudes_from_angles(theta: float, psi: float = 0.0, phi: float = 0.0) -> AmplitudePair:
    # the first component of g carries a minus sign so that f and g stay orthogonal
    ep, eq = cmath.exp(1j * phi), cmath.exp(1j * psi)
    c, s = math.cos(theta), math.sin(theta)
    f = (ep * eq * c, -ep / eq * s)
    g = (-eq / ep * s, -1.0 / (ep * eq) * c)
    return AmplitudePair(f, g)


def rotation_coefficients(alpha: float, beta: float, gamma: float, omega: float = 0.0):
    """The two complex numbers (p, q) with |p|^2 + |q|^2 = 1 that mix (f, g) under the charge group."""
    ca, sa, cb, sb = math.cos(alpha), math.sin(alpha), math.cos(beta), math.sin(beta)
    p = cmath.exp(-1j * gamma) * complex(ca * cb, sa * sb)
    q = cmath.exp(-1j * (omega - gamma)) * complex(sa * cb, ca * sb)
    return p, q


def rotate_amplitudes(amps: AmplitudePair, alpha: float, beta: float, gamma: float,
                      omega: float = 0.0) -> AmplitudePair:
    p, q = rotation_coefficients(alpha, beta, gamma, omega)
    f, g = np.array(amps.f), np.array(amps.g)
    N = p * f - q * g
    M = np.conj(p) * g + np.conj(q) * f
    return AmplitudePair(tuple(N), tuple(M))
