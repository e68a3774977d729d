"""Integer-order cylinder functions: Bessel J, Y and the outgoing Hankel H1.

Every transcendental evaluation in the package funnels through this module.
The J and Y values come from scipy.special; the Hankel function of the first
kind is assembled as J + iY so that the defining identity holds to the last
bit.  Orders are capped at 64, which comfortably covers every mode-series
truncation used by the solvers (k_s*h + 30 at the scales this code targets).
"""

from __future__ import annotations

from enum import Enum

import numpy as np
from scipy import special as _special

__all__ = [
    "MAX_ORDER",
    "CylKind",
    "CylinderDomainError",
    "CylinderOrderError",
    "cyl",
    "cyl_deriv",
    "cyl_orders",
    "cyl_deriv_orders",
]

MAX_ORDER = 64


class CylKind(Enum):
    """Cylinder function family: Bessel first kind, second kind, or Hankel H1."""

    J = "J"
    Y = "Y"
    H1 = "H1"


class CylinderDomainError(ValueError):
    """Raised for a non-positive or non-finite argument."""


class CylinderOrderError(ValueError):
    """Raised for an order outside the supported range 0..MAX_ORDER."""


def _checked(n, x):
    if not isinstance(n, (int, np.integer)):
        raise CylinderOrderError(f"order must be an integer, got {n!r}")
    if n < 0 or n > MAX_ORDER:
        raise CylinderOrderError(f"order {n} outside supported range 0..{MAX_ORDER}")
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)) or np.any(xa <= 0.0):
        raise CylinderDomainError("argument must be positive and finite")
    return xa


def cyl(kind: CylKind, n: int, x):
    """Evaluate J_n, Y_n or H1_n at positive real x (scalar or array).

    Negative orders are the caller's business via J_{-n} = (-1)^n J_n and
    the same relation for Y and H1.
    """
    xa = _checked(n, x)
    if kind is CylKind.J:
        out = _special.jv(n, xa)
    elif kind is CylKind.Y:
        out = _special.yv(n, xa)
    elif kind is CylKind.H1:
        out = _special.jv(n, xa) + 1j * _special.yv(n, xa)
    else:
        raise TypeError(f"unknown cylinder kind {kind!r}")
    if np.isscalar(x):
        return complex(out) if kind is CylKind.H1 else float(out)
    return out


def cyl_deriv(kind: CylKind, n: int, x):
    """First derivative via C_n'(x) = C_{n-1}(x) - (n/x) C_n(x), C_0' = -C_1."""
    xa = _checked(n, x)
    if n == 0:
        out = -cyl(kind, 1, xa)
    else:
        out = cyl(kind, n - 1, xa) - (n / xa) * cyl(kind, n, xa)
    if np.isscalar(x):
        return complex(out) if kind is CylKind.H1 else float(out)
    return out


def cyl_orders(kind: CylKind, nmax: int, x):
    """All orders 0..nmax at once; shape (nmax+1,) + shape(x)."""
    xa = _checked(nmax, x)
    orders = np.arange(nmax + 1)
    grid = orders.reshape((-1,) + (1,) * xa.ndim)
    if kind is CylKind.J:
        return _special.jv(grid, xa[np.newaxis])
    if kind is CylKind.Y:
        return _special.yv(grid, xa[np.newaxis])
    if kind is CylKind.H1:
        return _special.jv(grid, xa[np.newaxis]) + 1j * _special.yv(grid, xa[np.newaxis])
    raise TypeError(f"unknown cylinder kind {kind!r}")


def cyl_deriv_orders(kind: CylKind, nmax: int, x):
    """Derivatives for all orders 0..nmax; same shape rules as cyl_orders.

    Computed from values of orders 0..nmax+1 through the recurrence used by
    cyl_deriv, so the two entry points agree exactly.
    """
    vals = cyl_orders(kind, nmax + 1, x)
    xa = np.asarray(x, dtype=float)
    orders = np.arange(1, nmax + 1).reshape((-1,) + (1,) * xa.ndim)
    out = np.empty_like(vals[:-1])
    out[0] = -vals[1]
    if nmax >= 1:
        out[1:] = vals[:nmax] - (orders / xa[np.newaxis]) * vals[1 : nmax + 1]
    return out
