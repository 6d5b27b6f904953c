"""Independent reference values on the circular disc.

Nothing here touches the elliptic-integral, spectral or BEM code: the
integrals are reduced by hand and the remaining one- or two-dimensional
integrals are done with scipy's adaptive quadrature.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .errors import NumericalError


@dataclass(frozen=True)
class OracleResult:
    value: float
    method: str
    estimated_error: float


def _quad(f, lo, hi, tol=1e-13):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            return integrate.quad(f, lo, hi, epsabs=tol, epsrel=tol, limit=500)
        except integrate.IntegrationWarning as exc:
            raise NumericalError(str(exc)) from exc


def inner_r_integral(rho: float, t: float) -> float:
    """int_rho^1 r / sqrt(r^2 - t^2) dr = sqrt(1 - t^2) - sqrt(rho^2 - t^2), for t <= rho <= 1."""
    return math.sqrt(max(1.0 - t * t, 0.0)) - math.sqrt(max(rho * rho - t * t, 0.0))


def reduced_integrand(t: float) -> float:
    """2 t^2 int_t^1 rho/sqrt(rho^2-t^2) [sqrt(1-t^2) - sqrt(rho^2-t^2)] drho, in closed form.

    The rho-integral splits into sqrt(1-t^2) * sqrt(1-t^2) minus (1 - t^2)/2.
    """
    s2 = 1.0 - t * t
    return 2.0 * t * t * (s2 - 0.5 * s2)


def i_c_semianalytic(tol: float = 1e-14) -> OracleResult:
    """Energy of sigma = x1 on the unit disc (exactly 2/15)."""
    value, err = _quad(reduced_integrand, 0.0, 1.0, tol)
    return OracleResult(value, "semi_analytic", max(err, 4 * math.ulp(value)))


def _azimuthal_lhs(rho, r, phi_prime, tol):
    # int_0^{2pi} cos(phi) / |x - y| dphi, split at the near-singular angle phi = phi'
    def f(psi):
        h = math.sin(0.5 * psi)
        return math.cos(psi + phi_prime) / math.sqrt((rho - r) ** 2 + 4 * r * rho * h * h)

    left, _ = _quad(f, -math.pi, 0.0, tol)
    right, _ = _quad(f, 0.0, math.pi, tol)
    return left + right


def _t_integral(rho, r, tol):
    # int_0^{min} t^2 / (sqrt(rho^2 - t^2) sqrt(r^2 - t^2)) dt with t = min * sin(u)
    lo, hi = min(rho, r), max(rho, r)

    def f(u):
        s = math.sin(u)
        return lo * lo * s * s / math.sqrt(hi * hi - lo * lo * s * s)

    value, _ = _quad(f, 0.0, 0.5 * math.pi, tol)
    return value


def copson_sides(rho: float, r: float, phi_prime: float, tol: float = 1e-13) -> tuple[float, float]:
    """Both sides of the azimuthal identity

        int_0^{2pi} cos(phi) dphi / sqrt(rho^2 + r^2 - 2 r rho cos(phi - phi'))
            = 4 cos(phi') / (rho r) int_0^{min(rho, r)} t^2 dt / (sqrt(rho^2-t^2) sqrt(r^2-t^2)).

    For rho == r both sides diverge logarithmically, so that case is refused.
    """
    rho, r = float(rho), float(r)
    if not (0.0 < rho <= 1.0 and 0.0 < r <= 1.0):
        raise ValueError(f"radii must lie in (0, 1], got rho={rho}, r={r}")
    if rho == r:
        raise ValueError("rho == r: both sides of the identity are infinite")
    lhs = _azimuthal_lhs(rho, r, phi_prime, tol)
    rhs = 4.0 * math.cos(phi_prime) / (rho * r) * _t_integral(rho, r, tol)
    return lhs, rhs


def copson_identity_check(rho: float, r: float, phi_prime: float) -> float:
    """|LHS - RHS| of the azimuthal identity."""
    lhs, rhs = copson_sides(rho, r, phi_prime)
    return abs(lhs - rhs)


def _quad_inverse_sqrt(f, lo, hi, tol):
    # int_lo^hi f(x) (x - lo)^(-1/2) dx with the endpoint weight handled by QAWS
    if hi <= lo:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(f, lo, hi, weight="alg", wvar=(-0.5, 0.0),
                                      epsabs=tol, epsrel=tol, limit=500)
        except integrate.IntegrationWarning as exc:
            raise NumericalError(str(exc)) from exc
    return value


def symmetrization_check(tol: float = 1e-12) -> tuple[float, float]:
    """(full, doubled half) of int int int r rho t^2 / (sqrt(rho^2-t^2) sqrt(r^2-t^2)).

    ``full`` integrates r and rho independently over (t, 1); ``doubled half``
    restricts to rho < r and doubles.  Both equal the sigma = x1 energy.
    """
    def leg(t, lo):
        # int_lo^1 x / sqrt(x^2 - t^2) dx for lo >= t, both pieces anchored at t
        def f(x):
            return x / math.sqrt(x + t)

        return _quad_inverse_sqrt(f, t, 1.0, tol) - _quad_inverse_sqrt(f, t, lo, tol)

    def full_integrand(t):
        return t * t * leg(t, t) ** 2

    def half_integrand(t):
        inner = _quad_inverse_sqrt(lambda rho: rho / math.sqrt(rho + t) * leg(t, rho), t, 1.0, tol)
        return 2.0 * t * t * inner

    full, _ = _quad(full_integrand, 0.0, 1.0, tol)
    half, _ = _quad(half_integrand, 0.0, 1.0, tol)
    return full, half


def _ring_kernel(s: float, tol: float) -> float:
    # int_0^{2pi} dpsi / sqrt(1 + s^2 - 2 s cos(psi)), log-singular as s -> 1
    def f(psi):
        h = math.sin(0.5 * psi)
        return 1.0 / math.sqrt((1.0 - s) ** 2 + 4.0 * s * h * h)

    value, _ = _quad(f, 0.0, math.pi, tol)
    return 2.0 * value


def i_sigma0_circle_quadrature(radius: float = 1.0, tol: float = 1e-10) -> OracleResult:
    """Brute-force energy of sigma = 1 on a disc of the given radius (4/3 R^3).

    In polar coordinates with the azimuthal difference psi and the radius
    ratio s = rho / r (rho < r, doubled by symmetry) the energy is

        I = 1/(4 pi) * 2 pi * 2 int_0^R r^2 dr int_0^1 s K(s) ds,
        K(s) = int_0^{2pi} dpsi / sqrt(1 + s^2 - 2 s cos psi),

    each factor integrated numerically.  The integrable log singularity of
    K at s = 1 sits on the boundary of the s-interval.
    """
    radius = float(radius)
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    radial, radial_err = _quad(lambda r: r * r, 0.0, radius, tol)

    def outer(s):
        return s * _ring_kernel(s, tol)

    ratio, ratio_err = _quad(outer, 0.0, 1.0, tol)
    value = radial * ratio
    error = abs(ratio) * radial_err + abs(radial) * ratio_err + 4 * math.ulp(value)
    return OracleResult(value, "nested_quadrature", error)
