"""Ellipse, affine charge densities and the spheroidal parametrization.

The major axis lies along ``x1``.  A point of the disc is parametrized by the
upper unit half-sphere through

    x1 = a sin(theta) cos(phi),   x2 = b sin(theta) sin(phi),

with ``theta`` in [0, pi/2] and ``phi`` in [0, 2 pi).  The area element becomes
``a b cos(theta) sin(theta) dtheta dphi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Ellipse:
    """Elliptical disc with semi-axes ``a >= b > 0``; ``a == b`` is the circle."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"semi-axes must be finite, got a={a}, b={b}")
        if not b > 0:
            raise ValueError(f"minor semi-axis must be positive, got b={b}")
        if a < b:
            raise ValueError(f"need a >= b (x1 is the major axis), got a={a}, b={b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def eccentricity(self) -> float:
        return eccentricity(self)

    @property
    def area(self) -> float:
        return math.pi * self.a * self.b

    def scaled(self, factor: float) -> "Ellipse":
        return Ellipse(self.a * factor, self.b * factor)


@dataclass(frozen=True)
class AffineDensity:
    """sigma(x) = alpha0 + alpha1 * x1/a + alpha2 * x2/b (normalized convention)."""

    alpha0: float = 0.0
    alpha1: float = 0.0
    alpha2: float = 0.0

    def __post_init__(self):
        for name in ("alpha0", "alpha1", "alpha2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @property
    def coefficients(self) -> tuple[float, float, float]:
        return (self.alpha0, self.alpha1, self.alpha2)

    @classmethod
    def from_monomial(cls, ellipse: Ellipse, c0: float, c1: float, c2: float) -> "AffineDensity":
        """Density ``c0 + c1*x1 + c2*x2`` rewritten in the normalized convention."""
        return cls(c0, c1 * ellipse.a, c2 * ellipse.b)

    def monomial(self, ellipse: Ellipse) -> tuple[float, float, float]:
        return (self.alpha0, self.alpha1 / ellipse.a, self.alpha2 / ellipse.b)

    def evaluate(self, ellipse: Ellipse, x1, x2):
        """Density at planar points (arrays broadcast)."""
        return self.alpha0 + self.alpha1 * np.asarray(x1) / ellipse.a + self.alpha2 * np.asarray(x2) / ellipse.b

    def as_function(self, ellipse: Ellipse):
        return lambda x1, x2: self.evaluate(ellipse, x1, x2)


@dataclass(frozen=True)
class SpheroidalPoint:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"phi must lie in [0, 2pi), got {self.phi}")


def eccentricity(e: Ellipse) -> float:
    """sqrt(1 - b^2/a^2), zero for the circle."""
    ratio = e.b / e.a
    return math.sqrt((1.0 - ratio) * (1.0 + ratio))


def spheroidal_to_cartesian(e: Ellipse, p: SpheroidalPoint) -> tuple[float, float]:
    s = math.sin(p.theta)
    return (e.a * s * math.cos(p.phi), e.b * s * math.sin(p.phi))


def density_on_sphere(e: Ellipse, d: AffineDensity, p: SpheroidalPoint) -> float:
    """The weighted density g = sigma * cos(theta) seen by the spectral expansion.

    ``e`` is accepted for symmetry with the other maps; in the normalized
    convention sigma only depends on the angles.
    """
    s = math.sin(p.theta)
    sigma = d.alpha0 + d.alpha1 * s * math.cos(p.phi) + d.alpha2 * s * math.sin(p.phi)
    return sigma * math.cos(p.theta)
