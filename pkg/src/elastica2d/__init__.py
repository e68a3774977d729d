"""2D time-harmonic elastic scattering toolkit.

Forward scattering from rigid obstacles (analytic disk series, method of
fundamental solutions), reflection operators for the Lame and Navier
systems across a straight line, far-field operator spectra, and
factorization-method imaging from a single far-field pattern.
"""

__version__ = "0.1.0"

from .core import (
    ElasticMedium,
    FarFieldPattern,
    PlaneWave,
    VectorField,
    make_medium,
    navier_residual,
    plane_wave_field,
    uniform_directions,
)

__all__ = [
    "ElasticMedium",
    "FarFieldPattern",
    "PlaneWave",
    "VectorField",
    "make_medium",
    "navier_residual",
    "plane_wave_field",
    "uniform_directions",
    "__version__",
]
