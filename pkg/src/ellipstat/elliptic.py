"""Complete elliptic integrals by the arithmetic-geometric mean.

Every function here takes the *modulus* ``eps`` (the eccentricity), not the
parameter ``m = eps**2`` that scipy.special.ellipk/ellipe expect.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

_EPS = 2.220446049250313e-16

# Below this value of eps**2 the Maclaurin series of (K - E)/eps**2 is used.
SERIES_SWITCH = 1e-4


def agm(x: float, y: float) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    if not (x > 0 and y > 0):
        raise ValueError(f"agm needs positive arguments, got ({x}, {y})")
    a, b = float(max(x, y)), float(min(x, y))
    while abs(a - b) > 4 * _EPS * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


def _agm_sequence(eps: float) -> tuple[float, float]:
    """Return (agm(1, eps'), S) with S = sum_n 2**(n-1) c_n**2, c_0 = eps.

    The c_n are generated from c_{n+1} = c_n**2 / (4 a_{n+1}), which avoids the
    cancellation in (a_n - b_n)/2 as the sequence converges.
    """
    a = 1.0
    b = math.sqrt((1.0 - eps) * (1.0 + eps))
    c = eps
    total = 0.5 * c * c
    weight = 0.5
    while True:
        a_next = 0.5 * (a + b)
        c = c * c / (4.0 * a_next)
        weight *= 2.0
        term = weight * c * c
        total += term
        b = math.sqrt(a * b)
        a = a_next
        if term <= _EPS * total or c == 0.0:
            break
    while abs(a - b) > 4 * _EPS * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a, total


def _check_modulus(eps: float, allow_one: bool) -> float:
    eps = float(eps)
    if not 0.0 <= eps <= 1.0 or (eps == 1.0 and not allow_one):
        bound = "[0, 1]" if allow_one else "[0, 1)"
        raise ValueError(f"modulus must lie in {bound}, got {eps}")
    return eps


def complete_K(eps: float) -> float:
    """K(eps) = int_0^{pi/2} dphi / sqrt(1 - eps^2 sin^2 phi)."""
    eps = _check_modulus(eps, allow_one=False)
    b = math.sqrt((1.0 - eps) * (1.0 + eps))
    return math.pi / (2.0 * agm(1.0, b))


def complete_E(eps: float) -> float:
    """E(eps) = int_0^{pi/2} sqrt(1 - eps^2 sin^2 phi) dphi, with E(1) = 1."""
    eps = _check_modulus(eps, allow_one=True)
    if eps == 1.0:
        return 1.0
    if eps == 0.0:
        return math.pi / 2
    mean, s = _agm_sequence(eps)
    return math.pi / (2.0 * mean) * (1.0 - s)


def _k_minus_e_series(m: float) -> float:
    # (K - E)/m = (pi/2) sum_{n>=1} [(2n)!/(4^n n!^2)]^2 * 2n/(2n-1) * m^(n-1)
    total = 0.0
    coef = 1.0
    power = 1.0
    for n in range(1, 12):
        coef *= (2 * n - 1) / (2 * n)
        total += coef * coef * (2 * n) / (2 * n - 1) * power
        power *= m
    return 0.5 * math.pi * total


def k_minus_e_over_eps2(eps: float) -> float:
    """(K(eps) - E(eps)) / eps**2, finite at eps = 0 where it equals pi/4."""
    eps = _check_modulus(eps, allow_one=False)
    m = eps * eps
    if m < SERIES_SWITCH:
        return _k_minus_e_series(m)
    # K - E = K * S exactly, so no subtraction of nearly equal numbers happens.
    mean, s = _agm_sequence(eps)
    return math.pi / (2.0 * mean) * s / m


@dataclass(frozen=True)
class EllipticPair:
    k_value: float
    e_value: float
    modulus: float

    @classmethod
    def at(cls, eps: float) -> "EllipticPair":
        return cls(complete_K(eps), complete_E(eps), float(eps))
