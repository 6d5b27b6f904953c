"""Electrostatic energy of charged elliptical discs.

The closed form in complete elliptic integrals is cross-checked against a
spheroidal spectral series and a P1 Galerkin boundary element evaluation.
"""
from .analytic import EnergyBreakdown, i_sigma0, i_sigma1, i_sigma2, monomial_energy, theorem1_energy
from .elliptic import agm, complete_E, complete_K, k_minus_e_over_eps2
from .errors import (
    ConfigurationError, MeshFormatError, MeshValidationError, NumericalError, OrientationError,
)
from .geometry import AffineDensity, Ellipse, SpheroidalPoint
from .mesh import TriangleMesh, generate, read_mesh, write_mesh

__version__ = "0.1.0"

__all__ = [
    "AffineDensity", "ConfigurationError", "Ellipse", "EnergyBreakdown", "MeshFormatError",
    "MeshValidationError", "NumericalError", "OrientationError", "SpheroidalPoint", "TriangleMesh",
    "agm", "complete_E", "complete_K", "generate", "i_sigma0", "i_sigma1", "i_sigma2",
    "k_minus_e_over_eps2", "monomial_energy", "read_mesh", "theorem1_energy", "write_mesh",
]
