"""Spectral route: expansion in Q_n^m(cos theta) e^{i m phi} on the half-sphere.

Coefficients live in a dense complex array ``values[n, m + N]``; entries with
``|m| > n`` or ``n - m`` odd are held at zero and never read.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, NumericalError
from .geometry import AffineDensity, Ellipse, eccentricity
from .legendre import q_at_zero, q_column

DEFAULT_N = 30

Density = Union[AffineDensity, Callable]


@dataclass(frozen=True)
class SpectralCoefficients:
    truncation: int
    values: np.ndarray

    def __getitem__(self, key):
        n, m = key
        if not 0 <= n <= self.truncation or abs(m) > n:
            raise IndexError(f"no coefficient ({n}, {m}) at truncation {self.truncation}")
        return self.values[n, m + self.truncation]

    def degree(self, n: int) -> np.ndarray:
        """Slice over m = -n..n."""
        N = self.truncation
        return self.values[n, N - n:N + n + 1]

    def items(self):
        """(n, m, value) over the participating indices, n ascending then m."""
        for n in range(self.truncation + 1):
            for m in range(-n, n + 1, 2):
                yield n, m, self.values[n, m + self.truncation]


@dataclass(frozen=True)
class DiagonalBlock:
    """d^n_{m m'} for m, m' = -n..n (rows/columns with n - m odd are zero)."""

    n: int
    values: np.ndarray

    def orders(self) -> range:
        return range(-self.n, self.n + 1)


def default_nodes(N: int) -> tuple[int, int]:
    """Gauss points in cos(theta) and trapezoid points in phi for truncation N."""
    return 2 * N + 16, max(64, 4 * N)


def _density_function(e: Ellipse, density: Density) -> Callable:
    if isinstance(density, AffineDensity):
        return density.as_function(e)
    return density


def expand_density(e: Ellipse, density: Density, N: int = DEFAULT_N,
                   n_theta: int | None = None, n_phi: int | None = None) -> SpectralCoefficients:
    """Coefficients g_n^m of g = sigma cos(theta).

    g_n^m = (1/pi) int_0^{pi/2} int_0^{2pi} g Q_n^m(cos t) e^{-i m phi} sin t dphi dt,
    evaluated with Gauss-Legendre in x = cos(theta) on [0, 1] and the
    trapezoid rule in phi.  ``density`` is an AffineDensity or any callable
    ``sigma(x1, x2)`` accepting arrays.
    """
    if N < 0:
        raise ConfigurationError(f"truncation must be non-negative, got {N}")
    dt, dp = default_nodes(N)
    n_theta = dt if n_theta is None else int(n_theta)
    n_phi = dp if n_phi is None else int(n_phi)
    if n_theta < N + 1:
        raise ConfigurationError(f"{n_theta} Gauss points cannot resolve degree {N}; need at least {N + 1}")
    if n_phi < 2 * N + 2:
        raise ConfigurationError(f"{n_phi} trapezoid points alias order {N}; need at least {2 * N + 2}")

    sigma = _density_function(e, density)
    t, w = np.polynomial.legendre.leggauss(n_theta)
    x = 0.5 * (t + 1.0)
    w = 0.5 * w
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    s = np.sqrt(1.0 - x * x)
    x1 = e.a * s[:, None] * np.cos(phi)[None, :]
    x2 = e.b * s[:, None] * np.sin(phi)[None, :]
    g = np.asarray(sigma(x1, x2)) * x[:, None]
    g = np.broadcast_to(g, x1.shape)
    real = not np.iscomplexobj(g)
    # fourier[i, k] = int_0^{2pi} g(x_i, phi) e^{-i k phi} dphi
    fourier = (2.0 * np.pi / n_phi) * np.fft.fft(g, axis=1)

    values = np.zeros((N + 1, 2 * N + 1), dtype=complex)
    for m in range(N + 1):
        column = q_column(N, m, x)  # rows: degree m..N
        orders = (m,) if real or m == 0 else (m, -m)
        for order in orders:
            proj = (column * (w * fourier[:, order % n_phi])[None, :]).sum(axis=1) / np.pi
            if order < 0 and m % 2:
                proj = -proj
            for n in range(m, N + 1, 2):
                values[n, order + N] = proj[n - m]
        if real and m > 0:
            sign = -1.0 if m % 2 else 1.0
            for n in range(m, N + 1, 2):
                values[n, N - m] = sign * np.conj(values[n, N + m])
    return SpectralCoefficients(N, values)


@lru_cache(maxsize=64)
def _fourier_weights(ratio: float, kmax: int, tol: float) -> np.ndarray:
    """int_0^{2pi} e^{i k phi} / sqrt(r cos^2 + sin^2 / r) dphi for k = 0..kmax, r = b/a."""
    M = max(64, 4 * kmax + 8)
    previous = None
    while True:
        phi = 2.0 * np.pi * np.arange(M) / M
        h = 1.0 / np.sqrt(ratio * np.cos(phi) ** 2 + np.sin(phi) ** 2 / ratio)
        coeffs = (2.0 * np.pi / M) * np.fft.ifft(h) * M
        current = coeffs[:kmax + 1].real.copy()
        if previous is not None and np.max(np.abs(current - previous)) < tol:
            return current
        if M > 1 << 20:
            raise NumericalError("trapezoid rule for the block integral did not converge")
        previous = current
        M *= 2


def block_d(e: Ellipse, n: int, tol: float = 1e-13) -> DiagonalBlock:
    """d^n_{mm'} = Q_n^m(0) Q_n^{m'}(0)/(2n+1) int_0^{2pi} e^{i(m-m')phi}/sqrt(...) dphi."""
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    weights = _fourier_weights(e.b / e.a, 2 * n, tol)
    orders = np.arange(-n, n + 1)
    q0 = np.array([q_at_zero(n, int(m)) for m in orders])
    # the integrand is even in phi, so the k and -k integrals coincide
    kernel = weights[np.abs(orders[:, None] - orders[None, :])]
    values = (q0[:, None] * q0[None, :] / (2 * n + 1) * kernel).astype(complex)
    return DiagonalBlock(n, values)


def potential_coefficients(e: Ellipse, g: SpectralCoefficients) -> SpectralCoefficients:
    """f_n^m = sqrt(ab)/4 sum_{m'} d^n_{mm'} g_n^{m'} (block diagonal in n)."""
    N = g.truncation
    out = np.zeros_like(g.values)
    scale = math.sqrt(e.a * e.b) / 4.0
    for n in range(N + 1):
        out[n, N - n:N + n + 1] = scale * block_d(e, n).values @ g.degree(n)
    return SpectralCoefficients(N, out)


@lru_cache(maxsize=4096)
def angular_integral(delta_m: int, eps: float) -> float:
    """int_0^{pi/2} cos(delta_m phi) / sqrt(1 - eps^2 cos^2 phi) dphi."""
    delta_m = int(delta_m)
    eps = float(eps)
    if delta_m < 0:
        raise ValueError(f"delta_m must be non-negative, got {delta_m}")
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"modulus must lie in [0, 1), got {eps}")
    e2 = eps * eps

    def integrand(p):
        return math.cos(delta_m * p) / math.sqrt(1.0 - e2 * math.cos(p) ** 2)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(integrand, 0.0, 0.5 * math.pi, epsabs=1e-13, epsrel=1e-13, limit=400)
        except integrate.IntegrationWarning as exc:
            raise NumericalError(f"angular integral ({delta_m}, {eps}) did not converge: {exc}") from exc
    return value


class _Kahan:
    __slots__ = ("total", "carry")

    def __init__(self):
        self.total = 0.0
        self.carry = 0.0

    def add(self, value: float):
        y = value - self.carry
        t = self.total + y
        self.carry = (t - self.total) - y
        self.total = t


def degree_terms(e: Ellipse, g: SpectralCoefficients) -> np.ndarray:
    """Complex contribution of each degree n to the energy series."""
    eps = eccentricity(e)
    N = g.truncation
    prefactor = math.pi * e.a * e.b * e.b
    terms = np.zeros(N + 1, dtype=complex)
    for n in range(N + 1):
        orders = range(-n, n + 1, 2)
        weighted = {m: g[n, m] * q_at_zero(n, m) for m in orders}
        re, im = _Kahan(), _Kahan()
        for m in orders:
            for mp in orders:
                z = weighted[m] * np.conj(weighted[mp]) * angular_integral(abs(m - mp), eps)
                re.add(z.real)
                im.add(z.imag)
        terms[n] = prefactor * complex(re.total, im.total) / (2 * n + 1)
    return terms


def partial_sums(e: Ellipse, g: SpectralCoefficients) -> np.ndarray:
    """Energy truncated at degree n, for n = 0..N."""
    acc = _Kahan()
    out = np.empty(g.truncation + 1)
    for n, term in enumerate(degree_terms(e, g)):
        acc.add(term.real)
        out[n] = acc.total
    return out


def energy_series(e: Ellipse, g: SpectralCoefficients) -> float:
    """Truncated energy series, summed in ascending degree."""
    return float(partial_sums(e, g)[-1])


def spectral_energy(e: Ellipse, density: Density, N: int = DEFAULT_N) -> float:
    return energy_series(e, expand_density(e, density, N))
