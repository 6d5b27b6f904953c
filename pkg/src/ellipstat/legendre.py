"""Normalized associated Legendre functions Q_n^m.

Q_n^m is the first-kind associated Legendre function carrying the
Condon-Shortley phase (-1)**m, scaled to unit norm on [-1, 1]:

    int_{-1}^{1} Q_n^m(x)**2 dx = 1.

Negative orders follow Q_n^{-m} = (-1)**m Q_n^m, so in particular
Q_n^{-1} = -Q_n^1.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

_EXACT_LIMIT = 20


def _check(n: int, m: int) -> tuple[int, int]:
    n, m = int(n), int(m)
    if n < 0 or abs(m) > n:
        raise ValueError(f"need 0 <= |m| <= n, got n={n}, m={m}")
    return n, m


def negative_order_relation(n: int, m: int) -> int:
    """Sign s with Q_n^{-m} = s * Q_n^m."""
    n, m = _check(n, m)
    if m < 0:
        raise ValueError(f"order must be non-negative, got m={m}")
    return -1 if m % 2 else 1


def _seed(m: int, x: np.ndarray) -> np.ndarray:
    # Q_m^m = (-1)^m sqrt(1/2) prod_{k=1}^m sqrt((2k+1)/(2k)) (1-x^2)^(m/2)
    scale = math.sqrt(0.5)
    for k in range(1, m + 1):
        scale *= math.sqrt((2 * k + 1) / (2 * k))
    if m % 2:
        scale = -scale
    if m == 0:
        return np.full_like(x, scale)
    return scale * (1.0 - x * x) ** (0.5 * m)


def q_column(nmax: int, m: int, x) -> np.ndarray:
    """Q_n^{|m|}(x) for n = |m| .. nmax, stacked along the first axis.

    Row ``k`` holds degree ``|m| + k``.  Upward three-term recurrence in n.
    """
    m = abs(int(m))
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax - m + 1,) + x.shape)
    out[0] = _seed(m, x)
    if nmax > m:
        out[1] = math.sqrt(2 * m + 3) * x * out[0]
    for n in range(m + 2, nmax + 1):
        alpha = math.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
        beta = math.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1.0) ** 2 - 1.0))
        out[n - m] = alpha * (x * out[n - m - 1] - beta * out[n - m - 2])
    return out


def q_eval(n: int, m: int, x):
    """Q_n^m(x) for x in [-1, 1]; scalar in, scalar out."""
    n, m = _check(n, m)
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0):
        raise ValueError("argument must lie in [-1, 1]")
    value = q_column(n, m, xa)[-1]
    if m < 0 and m % 2:
        value = -value
    return float(value) if value.ndim == 0 else value


def _log_abs_q0(n: int, m: int) -> float:
    # |Q_n^m(0)| = sqrt((2n+1)/2) sqrt((n-m)!(n+m)!) / (2^n ((n-m)/2)! ((n+m)/2)!)
    return (
        0.5 * math.log((2 * n + 1) / 2)
        + 0.5 * (math.lgamma(n - m + 1) + math.lgamma(n + m + 1))
        - n * math.log(2.0)
        - math.lgamma((n - m) // 2 + 1)
        - math.lgamma((n + m) // 2 + 1)
    )


@lru_cache(maxsize=None)
def q_at_zero(n: int, m: int) -> float:
    """Q_n^m(0), exactly zero when n - m is odd."""
    n, m = _check(n, m)
    if (n - m) % 2:
        return 0.0
    k = abs(m)
    sign = -1 if ((n - k) // 2 + k) % 2 else 1
    if m < 0 and k % 2:
        sign = -sign
    if n <= _EXACT_LIMIT:
        ratio = Fraction(
            math.factorial(n - k) * math.factorial(n + k),
            (2 ** n * math.factorial((n - k) // 2) * math.factorial((n + k) // 2)) ** 2,
        )
        return sign * math.sqrt((2 * n + 1) / 2 * float(ratio))
    return sign * math.exp(_log_abs_q0(n, k))
