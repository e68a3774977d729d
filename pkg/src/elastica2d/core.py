"""Elastic media, incident plane waves, evaluable vector fields, residuals.

Conventions used throughout the package:

* displacement fields are complex 2-vectors u = (u1, u2),
* the governing operator is  L u = mu*Lap(u) + (lam+mu)*grad(div u) + omega^2 u,
* wavenumbers  k_p = omega/sqrt(lam+2 mu),  k_s = omega/sqrt(mu),
* for a direction d = (cos t, sin t) the orthogonal vector is
  d_perp = (-sin t, cos t), and for an observation direction xhat the
  orthogonal vector is xhat_perp = (-xhat2, xhat1),
* scalar curl:  rot(u) = d2 u1 - d1 u2;  vector curl of a scalar field f:
  curl(f) = (-d2 f, d1 f).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "ElasticMedium",
    "PlaneWave",
    "VectorField",
    "FarFieldPattern",
    "make_medium",
    "plane_wave_field",
    "helmholtz_split",
    "lame_residual",
    "navier_residual",
    "uniform_directions",
    "perp",
]

DEFAULT_FD_STEP = 1e-4


def perp(v: np.ndarray) -> np.ndarray:
    """Rotate 2-vectors by +90 degrees: (a, b) -> (-b, a). Works on (..., 2)."""
    v = np.asarray(v)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def uniform_directions(m: int) -> np.ndarray:
    """m unit vectors at angles 2*pi*j/m, shape (m, 2)."""
    ang = 2.0 * np.pi * np.arange(m) / m
    return np.stack([np.cos(ang), np.sin(ang)], axis=-1)


@dataclass(frozen=True)
class ElasticMedium:
    """Homogeneous isotropic medium with unit density.

    Attributes
    ----------
    lam, mu : float
        Lame constants; mu is the shear modulus.
    omega : float
        Angular frequency.
    kp, ks : float
        Compressional and shear wavenumbers (derived).
    c_refl : float
        Reflection constant (lam+mu)/(lam+3mu) entering the static
        reflection operator (derived).
    """

    lam: float
    mu: float
    omega: float
    kp: float
    ks: float
    c_refl: float


def make_medium(lam: float, mu: float, omega: float) -> ElasticMedium:
    """Validate Lame constants and frequency, derive wavenumbers."""
    lam = float(lam)
    mu = float(mu)
    omega = float(omega)
    if not (mu > 0.0):
        raise ValueError(f"shear modulus must be positive, got mu={mu}")
    if not (lam + 2.0 * mu > 0.0):
        raise ValueError(f"lam + 2*mu must be positive, got {lam + 2.0 * mu}")
    if not (omega > 0.0):
        raise ValueError(f"frequency must be positive, got omega={omega}")
    if abs(lam + 3.0 * mu) < 1e-14:
        raise ValueError("lam + 3*mu must be nonzero")
    return ElasticMedium(
        lam=lam,
        mu=mu,
        omega=omega,
        kp=omega / math.sqrt(lam + 2.0 * mu),
        ks=omega / math.sqrt(mu),
        c_refl=(lam + mu) / (lam + 3.0 * mu),
    )


@dataclass(frozen=True)
class PlaneWave:
    """Incident plane wave c_p * d * e^{i k_p x.d} + c_s * d_perp * e^{i k_s x.d}.

    theta is the incidence angle in [0, 2pi); cp and cs are the complex
    compressional and shear amplitudes, not both zero.
    """

    theta: float
    cp: complex = 1.0
    cs: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % (2.0 * np.pi))
        object.__setattr__(self, "cp", complex(self.cp))
        object.__setattr__(self, "cs", complex(self.cs))
        if abs(self.cp) + abs(self.cs) == 0.0:
            raise ValueError("plane wave needs |cp| + |cs| > 0")

    @property
    def d(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    @property
    def d_perp(self) -> np.ndarray:
        return np.array([-math.sin(self.theta), math.cos(self.theta)])


@dataclass
class VectorField:
    """Evaluable complex 2-vector field with optional analytic derivatives.

    func maps a point (2,) to a complex (2,) value.  deriv, when given, maps
    (point, a, b) to the partial derivative d^{a+b} u / dx1^a dx2^b; orders
    up to the provider's capability (at least 2 everywhere it is used).
    func_batch, when given, evaluates a whole (n, 2) block of points at once.

    When deriv is None, derivative queries fall back to second-order central
    differences with step fd_step.
    """

    func: Callable[[np.ndarray], np.ndarray]
    deriv: Optional[Callable[[np.ndarray, int, int], np.ndarray]] = None
    func_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: float = DEFAULT_FD_STEP

    @property
    def analytic_derivs(self) -> bool:
        return self.deriv is not None

    def value(self, x) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=complex)

    def values(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.func_batch is not None:
            return np.asarray(self.func_batch(pts), dtype=complex)
        return np.array([self.func(p) for p in pts], dtype=complex)

    def derivative(self, x, a: int, b: int, step: Optional[float] = None) -> np.ndarray:
        """Partial derivative of order (a, b) at x, total order <= 2 for FD."""
        x = np.asarray(x, dtype=float)
        if a == 0 and b == 0:
            return self.value(x)
        if self.deriv is not None and step is None:
            return np.asarray(self.deriv(x, a, b), dtype=complex)
        h = self.fd_step if step is None else float(step)
        return _fd_partial(self.value, x, a, b, h)


def _fd_partial(f, x, a, b, h):
    e1 = np.array([h, 0.0])
    e2 = np.array([0.0, h])
    if (a, b) == (1, 0):
        return (f(x + e1) - f(x - e1)) / (2.0 * h)
    if (a, b) == (0, 1):
        return (f(x + e2) - f(x - e2)) / (2.0 * h)
    if (a, b) == (2, 0):
        return (f(x + e1) - 2.0 * f(x) + f(x - e1)) / (h * h)
    if (a, b) == (0, 2):
        return (f(x + e2) - 2.0 * f(x) + f(x - e2)) / (h * h)
    if (a, b) == (1, 1):
        return (
            f(x + e1 + e2) - f(x + e1 - e2) - f(x - e1 + e2) + f(x - e1 - e2)
        ) / (4.0 * h * h)
    raise ValueError(f"finite differences support total order <= 2, got {(a, b)}")


def plane_wave_field(pw: PlaneWave, med: ElasticMedium) -> VectorField:
    """Incident plane wave as a VectorField with exact derivatives."""
    d = pw.d
    dp = pw.d_perp
    kp, ks = med.kp, med.ks

    def func(x):
        return pw.cp * d * np.exp(1j * kp * (d @ x)) + pw.cs * dp * np.exp(
            1j * ks * (d @ x)
        )

    def func_batch(pts):
        phase_p = np.exp(1j * kp * (pts @ d))
        phase_s = np.exp(1j * ks * (pts @ d))
        return pw.cp * phase_p[:, None] * d + pw.cs * phase_s[:, None] * dp

    def deriv(x, a, b):
        fp = (1j * kp * d[0]) ** a * (1j * kp * d[1]) ** b
        fs = (1j * ks * d[0]) ** a * (1j * ks * d[1]) ** b
        return fp * pw.cp * d * np.exp(1j * kp * (d @ x)) + fs * pw.cs * dp * np.exp(
            1j * ks * (d @ x)
        )

    return VectorField(func=func, deriv=deriv, func_batch=func_batch)


def _second_derivs(f: VectorField, x, step):
    d20 = f.derivative(x, 2, 0, step)
    d02 = f.derivative(x, 0, 2, step)
    d11 = f.derivative(x, 1, 1, step)
    return d20, d02, d11


def helmholtz_split(f: VectorField, med: ElasticMedium, x, step: Optional[float] = None):
    """Split a Navier solution at x into compressional and shear parts.

    Returns (u_p, u_s) with u_p = -(1/kp^2) grad(div f) and
    u_s = (1/ks^2) curl(rot f); their sum reproduces f(x) whenever f solves
    the Navier equation near x.
    """
    d20, d02, d11 = _second_derivs(f, x, step)
    grad_div = np.array([d20[0] + d11[1], d11[0] + d02[1]])
    curl_rot = np.array([-d02[0] + d11[1], d11[0] - d20[1]])
    up = -grad_div / med.kp**2
    us = curl_rot / med.ks**2
    return up, us


def lame_residual(
    f: VectorField, med: ElasticMedium, x, step: Optional[float] = None,
    richardson: bool = False,
):
    """Static part of the operator: mu*Lap(f) + (lam+mu)*grad(div f) at x.

    With richardson=True (finite-difference path only) the residual is
    extrapolated from steps h and 2h, removing the leading O(h^2) error
    without shrinking the finest step.
    """
    def at(h):
        d20, d02, d11 = _second_derivs(f, x, h)
        lap = d20 + d02
        grad_div = np.array([d20[0] + d11[1], d11[0] + d02[1]])
        return med.mu * lap + (med.lam + med.mu) * grad_div

    if richardson and (step is not None or not f.analytic_derivs):
        h = float(step) if step is not None else f.fd_step
        return (4.0 * at(h) - at(2.0 * h)) / 3.0
    return at(step)


def navier_residual(
    f: VectorField, med: ElasticMedium, x, step: Optional[float] = None,
    richardson: bool = False,
):
    """Full residual mu*Lap(f) + (lam+mu)*grad(div f) + omega^2 f at x.

    Uses analytic derivatives when the field provides them and step is None,
    otherwise central differences with the given step (optionally Richardson
    extrapolated).
    """
    return lame_residual(f, med, x, step, richardson) + med.omega**2 * f.value(x)


@dataclass
class FarFieldPattern:
    """Sampled far field over a uniform direction grid.

    directions: (m, 2) unit vectors; up, us: complex samples of the
    compressional and shear far-field components.  Quadrature weights are
    uniform, 2*pi/m each, so that sum(weights) = 2*pi.
    """

    directions: np.ndarray
    up: np.ndarray
    us: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        self.directions = np.asarray(self.directions, dtype=float)
        self.up = np.asarray(self.up, dtype=complex)
        self.us = np.asarray(self.us, dtype=complex)
        m = len(self.directions)
        if self.weights is None:
            self.weights = np.full(m, 2.0 * np.pi / m)
        else:
            self.weights = np.asarray(self.weights, dtype=float)
        if not (len(self.up) == len(self.us) == m == len(self.weights)):
            raise ValueError("direction, weight and sample counts must agree")

    @property
    def m(self) -> int:
        return len(self.directions)

    def vectors(self) -> np.ndarray:
        """Vector far field u(xhat) = up*xhat + us*xhat_perp, shape (m, 2)."""
        return self.up[:, None] * self.directions + self.us[:, None] * perp(
            self.directions
        )

    def flat_weighted(self) -> np.ndarray:
        """Weighted-basis coefficient vector: sqrt(w)*up stacked over sqrt(w)*us."""
        sw = np.sqrt(self.weights)
        return np.concatenate([sw * self.up, sw * self.us])

    def l2_norm(self) -> float:
        return float(
            np.sqrt(np.sum(self.weights * (np.abs(self.up) ** 2 + np.abs(self.us) ** 2)))
        )
