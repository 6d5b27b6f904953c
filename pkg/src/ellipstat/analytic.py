"""Closed-form electrostatic energies for affine densities on an ellipse."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .elliptic import complete_K, k_minus_e_over_eps2
from .geometry import AffineDensity, Ellipse, eccentricity


@dataclass(frozen=True)
class EnergyBreakdown:
    """Unit energies of 1, x1/a and x2/b, and the alpha-weighted total."""

    i_sigma0: float
    i_sigma1: float
    i_sigma2: float
    total: float


def _prefactor(e: Ellipse) -> float:
    return e.a * e.b * e.b / math.pi


def i_sigma0(e: Ellipse) -> float:
    """Energy of the uniform density sigma = 1."""
    return 8.0 / 3.0 * _prefactor(e) * complete_K(eccentricity(e))


def i_sigma1(e: Ellipse) -> float:
    """Energy of sigma = x1/a."""
    return 8.0 / 15.0 * _prefactor(e) * k_minus_e_over_eps2(eccentricity(e))


def i_sigma2(e: Ellipse) -> float:
    """Energy of sigma = x2/b."""
    eps = eccentricity(e)
    return 8.0 / 15.0 * _prefactor(e) * (complete_K(eps) - k_minus_e_over_eps2(eps))


def theorem1_energy(e: Ellipse, d: AffineDensity) -> EnergyBreakdown:
    """Energy of sigma = alpha0 + alpha1 x1/a + alpha2 x2/b.

    The total is evaluated from the bracketed closed form
    8ab^2/(15 pi) [(5 a0^2 + a2^2) K + (a1^2 - a2^2) (K - E)/eps^2];
    the cross terms vanish by the symmetry of the ellipse.
    """
    eps = eccentricity(e)
    K = complete_K(eps)
    ke = k_minus_e_over_eps2(eps)
    a0, a1, a2 = d.coefficients
    total = 8.0 / 15.0 * _prefactor(e) * ((5 * a0 * a0 + a2 * a2) * K + (a1 * a1 - a2 * a2) * ke)
    return EnergyBreakdown(i_sigma0(e), i_sigma1(e), i_sigma2(e), total)


def monomial_energy(e: Ellipse, c0: float, c1: float, c2: float) -> float:
    """Energy of sigma = c0 + c1 x1 + c2 x2."""
    return theorem1_energy(e, AffineDensity.from_monomial(e, c0, c1, c2)).total
