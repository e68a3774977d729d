"""Fundamental solutions of the Lame and Navier operators in the plane.

The static (Kelvin) tensor is

    Phi0(x, y) = (1/4pi) [ -((3mu+lam)/(mu(lam+2mu))) ln|x-y| I
                           + ((lam+mu)/(mu(lam+2mu))) (x-y)(x-y)^T / |x-y|^2 ]

and satisfies L0 Phi0(., y) = -delta_y I columnwise.  The half-plane tensor
for the Dirichlet problem on {x1 > 0} adds a reflected correction built from
the static reflection operator (see `reflection`):

    G0(x, y) = Phi0(x, y) + [D0 Phi0(., y)](Rx),     R(x1, x2) = (-x1, x2),

where D0 is applied to the free tensor in its own variable and the result is
evaluated at the mirror point.  Columns of G0 vanish on {x1 = 0} and solve
the static system away from the poles y and Ry.

For the time-harmonic system the radiating tensor used here is normalized so
that the far field of x -> Phi_om(x, y) P is exactly `point_source_farfield`:

    Phi_om = (i/4) [ H0(ks r) (I - e e^T) + (H1(ks r)/(ks r)) (2 e e^T - I)
                     + H0(kp r) e e^T    - (H1(kp r)/(kp r)) (2 e e^T - I) ],

with r = |x-y|, e = (x-y)/r and H = Hankel of the first kind.  Each column
is a radiating solution of the Navier equation away from the pole.

All derivatives of the static tensor are exact.  They come from the
holomorphic representation of ln|r|: with z = r1 + i r2,

    d^{a+b} ln|r| / dr1^a dr2^b = Re( i^b (-1)^(a+b-1) (a+b-1)! z^-(a+b) ),

combined with the identity  r r^T/|r|^2 = I/2 - (|r|^2/2) Hess(ln|r|)  and a
short Leibniz expansion for the polynomial factor |r|^2.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, Iterable, Tuple

import numpy as np

from .core import ElasticMedium, FarFieldPattern, VectorField, perp
from .special import CylKind, cyl

__all__ = [
    "CoincidenceError",
    "kelvin_tensor",
    "navier_tensor",
    "navier_tensor_pairs",
    "halfplane_green",
    "halfplane_green_parts",
    "halfplane_green_field",
    "kelvin_column_field",
    "point_source_farfield",
]

_COINCIDENCE_TOL = 1e-13


class CoincidenceError(ValueError):
    """Evaluation point coincides with a pole of the tensor."""


def _factorials(n):
    out = [1.0]
    for k in range(1, n + 1):
        out.append(out[-1] * k)
    return out


def log_derivative_table(dx, dy, max_total: int) -> Dict[Tuple[int, int], np.ndarray]:
    """Partial derivatives of ln|r| at r = (dx, dy) up to total order max_total."""
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    rho2 = dx * dx + dy * dy
    table: Dict[Tuple[int, int], np.ndarray] = {(0, 0): 0.5 * np.log(rho2)}
    z = dx + 1j * dy
    zinv = 1.0 / z
    zpow = np.ones_like(z)
    fact = _factorials(max(max_total - 1, 0))
    ib = [1.0, 1j, -1.0, -1j]
    for total in range(1, max_total + 1):
        zpow = zpow * zinv
        coef = (-1.0) ** (total - 1) * fact[total - 1]
        for b in range(total + 1):
            table[(total - b, b)] = np.real(ib[b % 4] * coef * zpow)
    return table


_BASE_ORDER = {(0, 0): (2, 0), (0, 1): (1, 1), (1, 0): (1, 1), (1, 1): (0, 2)}


def kelvin_derivatives(
    dx, dy, med: ElasticMedium, orders: Iterable[Tuple[int, int]]
) -> Dict[Tuple[int, int], np.ndarray]:
    """Exact partials of the static tensor with respect to its first argument.

    dx, dy are (arrays of) components of x - y.  Returns a dict mapping each
    requested (a, b) to an array of shape broadcast(dx, dy) + (2, 2).
    """
    orders = list(orders)
    max_total = max(a + b for a, b in orders) + 2
    lam, mu = med.lam, med.mu
    coef_log = (3.0 * mu + lam) / (4.0 * np.pi * mu * (lam + 2.0 * mu))
    coef_dyad = (lam + mu) / (4.0 * np.pi * mu * (lam + 2.0 * mu))
    lt = log_derivative_table(dx, dy, max_total)
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    rho2 = dx * dx + dy * dy
    shape = np.broadcast(dx, dy).shape

    def dyad_term(i, j, p, q):
        # d^{(p,q)} of rho^2 * d_i d_j ln|r|, Leibniz over the quadratic factor
        a0, b0 = _BASE_ORDER[(i, j)]
        acc = rho2 * lt[(a0 + p, b0 + q)]
        if p >= 1:
            acc = acc + 2.0 * p * dx * lt[(a0 + p - 1, b0 + q)]
        if q >= 1:
            acc = acc + 2.0 * q * dy * lt[(a0 + p, b0 + q - 1)]
        if p >= 2:
            acc = acc + p * (p - 1) * lt[(a0 + p - 2, b0 + q)]
        if q >= 2:
            acc = acc + q * (q - 1) * lt[(a0 + p, b0 + q - 2)]
        return acc

    out: Dict[Tuple[int, int], np.ndarray] = {}
    for (p, q) in orders:
        t = np.zeros(shape + (2, 2))
        for i in range(2):
            for j in range(2):
                val = -0.5 * coef_dyad * dyad_term(i, j, p, q)
                if i == j:
                    val = val - coef_log * lt[(p, q)]
                    if p == 0 and q == 0:
                        val = val + 0.5 * coef_dyad
                t[..., i, j] = val
        out[(p, q)] = t
    return out


def _check_separation(dx, dy, what="tensor"):
    rho = np.hypot(np.asarray(dx, dtype=float), np.asarray(dy, dtype=float))
    if np.any(rho < _COINCIDENCE_TOL):
        raise CoincidenceError(f"{what} evaluated at (or too close to) its pole")
    return rho


def kelvin_tensor(x, y, med: ElasticMedium) -> np.ndarray:
    """Static fundamental tensor Phi0(x, y), a real symmetric 2x2 matrix."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    rho = _check_separation(d[..., 0], d[..., 1], "static tensor")
    lam, mu = med.lam, med.mu
    coef_log = (3.0 * mu + lam) / (4.0 * np.pi * mu * (lam + 2.0 * mu))
    coef_dyad = (lam + mu) / (4.0 * np.pi * mu * (lam + 2.0 * mu))
    eye = np.eye(2)
    dyad = d[..., :, None] * d[..., None, :] / (rho**2)[..., None, None]
    return -coef_log * np.log(rho)[..., None, None] * eye + coef_dyad * dyad


def navier_tensor_pairs(dx, dy, med: ElasticMedium) -> np.ndarray:
    """Radiating tensor at separations (dx, dy); shape broadcast + (2, 2)."""
    rho = _check_separation(dx, dy, "radiating tensor")
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    e1 = dx / rho
    e2 = dy / rho
    ee = np.empty(np.broadcast(dx, dy).shape + (2, 2))
    ee[..., 0, 0] = e1 * e1
    ee[..., 0, 1] = e1 * e2
    ee[..., 1, 0] = e1 * e2
    ee[..., 1, 1] = e2 * e2
    eye = np.eye(2)
    zp = med.kp * rho
    zs = med.ks * rho
    h0s = cyl(CylKind.H1, 0, zs)
    h1s = cyl(CylKind.H1, 1, zs)
    h0p = cyl(CylKind.H1, 0, zp)
    h1p = cyl(CylKind.H1, 1, zp)
    two_ee_minus_i = 2.0 * ee - eye
    out = (
        np.asarray(h0s)[..., None, None] * (eye - ee)
        + np.asarray(h1s / zs)[..., None, None] * two_ee_minus_i
        + np.asarray(h0p)[..., None, None] * ee
        - np.asarray(h1p / zp)[..., None, None] * two_ee_minus_i
    )
    return 0.25j * out


def navier_tensor(x, y, med: ElasticMedium) -> np.ndarray:
    """Radiating fundamental tensor Phi_om(x, y) of the Navier system."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    return navier_tensor_pairs(d[..., 0], d[..., 1], med)


def navier_tensor_gradient_pairs(dx, dy, med: ElasticMedium) -> np.ndarray:
    """Gradient of the radiating tensor in its first argument.

    Returns shape broadcast + (2, 2, 2); the last axis is the derivative
    direction.  The derivative with respect to the source point is the
    negative.  Used for force-dipole basis fields in corner-refined source
    layouts.
    """
    rho = _check_separation(dx, dy, "radiating tensor gradient")
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    e = np.stack([dx / rho, dy / rho], axis=-1)
    ee = e[..., :, None] * e[..., None, :]
    eye = np.eye(2)
    zp = med.kp * rho
    zs = med.ks * rho
    h0s = np.asarray(cyl(CylKind.H1, 0, zs))
    h1s = np.asarray(cyl(CylKind.H1, 1, zs))
    h0p = np.asarray(cyl(CylKind.H1, 0, zp))
    h1p = np.asarray(cyl(CylKind.H1, 1, zp))
    a_s_p = -0.25j * med.ks * h1s
    a_p_p = -0.25j * med.kp * h1p
    b = 0.25j * (h1s / zs - h1p / zp)
    b_p = 0.25j * (
        med.ks * (h0s / zs - 2.0 * h1s / zs**2)
        - med.kp * (h0p / zp - 2.0 * h1p / zp**2)
    )
    a_s = 0.25j * h0s
    a_p = 0.25j * h0p
    # d_l (e_i e_j) = (delta_il e_j + delta_jl e_i - 2 e_i e_j e_l) / rho
    dee = (
        eye[:, None, :] * e[..., None, :, None]
        + eye[None, :, :] * e[..., :, None, None]
        - 2.0 * ee[..., None] * e[..., None, None, :]
    ) / rho[..., None, None, None]
    el = e[..., None, None, :]
    out = (
        a_s_p[..., None, None, None] * el * (eye - ee)[..., None]
        - a_s[..., None, None, None] * dee
        + b_p[..., None, None, None] * el * (2.0 * ee - eye)[..., None]
        + 2.0 * b[..., None, None, None] * dee
        + a_p_p[..., None, None, None] * el * ee[..., None]
        + a_p[..., None, None, None] * dee
    )
    return out


def point_source_farfield(
    y, p, med: ElasticMedium, directions: np.ndarray
) -> FarFieldPattern:
    """Far field of the point source x -> Phi_om(x, y) p on a direction grid.

    up(xhat) = e^{-i kp xhat.y + i pi/4} / sqrt(8 pi kp) * (xhat . p)
    us(xhat) = e^{-i ks xhat.y + i pi/4} / sqrt(8 pi ks) * (xhat_perp . p)
    """
    y = np.asarray(y, dtype=float)
    p = np.asarray(p, dtype=complex)
    if np.linalg.norm(p) == 0.0:
        raise ValueError("polarization must be nonzero")
    directions = np.asarray(directions, dtype=float)
    phase = np.exp(1j * np.pi / 4.0)
    dot_y = directions @ y
    up = np.exp(-1j * med.kp * dot_y) * phase / math.sqrt(8.0 * np.pi * med.kp) * (
        directions @ p
    )
    us = np.exp(-1j * med.ks * dot_y) * phase / math.sqrt(8.0 * np.pi * med.ks) * (
        perp(directions) @ p
    )
    return FarFieldPattern(directions=directions, up=up, us=us)


# ---------------------------------------------------------------------------
# Static reflection operator applied to derivative providers
# ---------------------------------------------------------------------------
#
# The operator  D0 u = -u + c x1^2 (-Lap u1, Lap u2)^T - 2 c x1 (d2 u2, d2 u1)^T
# maps solutions of the static system that vanish on {x1 = 0} to their values
# at mirror points.  The helper below differentiates the expression [D0 u]
# itself, given exact derivatives of u, which is what the half-plane tensor
# and its derivatives are assembled from.


def d0_of_provider(deriv: Callable[[int, int], np.ndarray], w1, c: float, p: int, q: int):
    """Partial (p, q) of [D0 u] at points with first coordinate w1.

    deriv(a, b) must return d^{(a,b)} u at those points with shape
    (..., 2, ncol): the component axis is -2, columns are independent fields.
    w1 broadcasts against the leading axes.
    """
    sample = deriv(p, q)
    w1 = np.asarray(w1, dtype=float)
    pad = (1,) * (sample.ndim - w1.ndim)
    w1 = w1.reshape(w1.shape + pad)
    sign = np.array([-1.0, 1.0])[:, None]

    def lap(a, b):
        return deriv(a + 2, b) + deriv(a, b + 2)

    def d2_swapped(a, b):
        return deriv(a, b + 1)[..., ::-1, :]

    acc = w1 * w1 * lap(p, q)
    if p >= 1:
        acc = acc + 2.0 * p * w1 * lap(p - 1, q)
    if p >= 2:
        acc = acc + p * (p - 1.0) * lap(p - 2, q)
    acc2 = w1 * d2_swapped(p, q)
    if p >= 1:
        acc2 = acc2 + p * d2_swapped(p - 1, q)
    return -sample + c * sign * acc - 2.0 * c * acc2


def _mirror(x):
    x = np.asarray(x, dtype=float)
    out = x.copy()
    out[..., 0] = -out[..., 0]
    return out


def halfplane_green_parts(x, ys, med: ElasticMedium):
    """Free part and reflected correction of G0(x, y) for a batch of y.

    Returns (phi0_part, refl_part), each of shape (n, 2, 2).  The free part
    is singular at y = x, the correction at y = Rx; quadrature code centers
    its rule on whichever pole its integrand owns.
    """
    x = np.asarray(x, dtype=float)
    ys = np.asarray(ys, dtype=float)
    phi0 = kelvin_tensor(x, ys, med)
    w = _mirror(x)
    dxa = w[0] - ys[..., 0]
    dya = w[1] - ys[..., 1]
    needed = [(0, 0), (0, 1), (2, 0), (0, 2)]
    table = kelvin_derivatives(dxa, dya, med, needed)

    def deriv(a, b):
        return table[(a, b)]

    refl = d0_of_provider(deriv, w[0], med.c_refl, 0, 0)
    return phi0, refl


def halfplane_green(x, y, med: ElasticMedium) -> np.ndarray:
    """Half-plane Dirichlet tensor G0(x, y) for the static system.

    Requires y (and for a meaningful value, x) in the open half-plane
    {x1 > 0}; the poles sit at y and Ry.
    """
    y = np.asarray(y, dtype=float)
    if y[0] <= 0.0:
        raise ValueError("source point must lie in the open half-plane {x1 > 0}")
    phi0, refl = halfplane_green_parts(x, np.asarray(y, dtype=float)[None, :], med)
    return (phi0 + refl)[0]


def halfplane_green_field(y, med: ElasticMedium, col: int, max_order: int = 4) -> VectorField:
    """Column of G0(., y) as a VectorField with exact derivatives.

    Derivative orders up to max_order are supported; the reflected part is
    differentiated through the mirror map, which flips the sign of each
    d/dx1.
    """
    y = np.asarray(y, dtype=float)
    if y[0] <= 0.0:
        raise ValueError("source point must lie in the open half-plane {x1 > 0}")
    c = med.c_refl
    orders = [(a, b) for a in range(max_order + 3) for b in range(max_order + 3)
              if a + b <= max_order + 2]

    def deriv(x, a, b):
        if a + b > max_order:
            raise ValueError(f"derivative order {(a, b)} above field limit {max_order}")
        x = np.asarray(x, dtype=float)
        free = kelvin_derivatives(x[0] - y[0], x[1] - y[1], med, [(a, b)])[(a, b)]
        w = _mirror(x)
        table = kelvin_derivatives(w[0] - y[0], w[1] - y[1], med, orders)
        refl = d0_of_provider(lambda aa, bb: table[(aa, bb)], w[0], c, a, b)
        return (free + (-1.0) ** a * refl)[..., col].astype(complex)

    def func(x):
        return deriv(x, 0, 0)

    def func_batch(pts):
        pts = np.asarray(pts, dtype=float)
        phi0, refl = halfplane_green_parts_batch_x(pts, y, med)
        return (phi0 + refl)[..., col].astype(complex)

    return VectorField(func=func, deriv=deriv, func_batch=func_batch)


def halfplane_green_parts_batch_x(xs, y, med: ElasticMedium):
    """As halfplane_green_parts but batched over the first argument."""
    xs = np.asarray(xs, dtype=float)
    y = np.asarray(y, dtype=float)
    phi0 = kelvin_tensor(xs, y, med)
    w1 = -xs[..., 0]
    dxa = w1 - y[0]
    dya = xs[..., 1] - y[1]
    table = kelvin_derivatives(dxa, dya, med, [(0, 0), (0, 1), (2, 0), (0, 2)])
    refl = d0_of_provider(lambda a, b: table[(a, b)], w1, med.c_refl, 0, 0)
    return phi0, refl


def kelvin_column_field(y, med: ElasticMedium, col: int, max_order: int = 6) -> VectorField:
    """Column of the free static tensor Phi0(., y) with exact derivatives."""
    y = np.asarray(y, dtype=float)

    def deriv(x, a, b):
        x = np.asarray(x, dtype=float)
        t = kelvin_derivatives(x[0] - y[0], x[1] - y[1], med, [(a, b)])[(a, b)]
        return t[..., col].astype(complex)

    return VectorField(func=lambda x: deriv(x, 0, 0), deriv=deriv)
