"""Fundamental tensors: values, exact derivatives, boundary and far-field gates."""

import numpy as np
import pytest

from elastica2d.core import (
    PlaneWave,
    VectorField,
    lame_residual,
    make_medium,
    navier_residual,
    perp,
    uniform_directions,
)
from elastica2d.green import (
    CoincidenceError,
    halfplane_green,
    halfplane_green_field,
    kelvin_derivatives,
    kelvin_tensor,
    navier_tensor,
    point_source_farfield,
)

MED = make_medium(2.0, 1.0, 1.0)


def test_kelvin_translation_invariance_and_symmetry():
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.uniform(-2, 2, 2)
        y = rng.uniform(-2, 2, 2)
        if np.linalg.norm(x - y) < 0.1:
            continue
        t = rng.uniform(-3, 3, 2)
        a = kelvin_tensor(x, y, MED)
        b = kelvin_tensor(x + t, y + t, MED)
        assert np.allclose(a, b, atol=1e-13)
        assert a[0, 1] == pytest.approx(a[1, 0], abs=1e-15)


def test_kelvin_hand_value():
    med = make_medium(1.0, 1.0, 1.0)
    val = kelvin_tensor(np.array([1.0, 0.0]), np.zeros(2), med)
    expect = np.array([[1.0 / (6.0 * np.pi), 0.0], [0.0, 0.0]])
    assert np.allclose(val, expect, atol=1e-15)


def test_kelvin_coincidence_error():
    with pytest.raises(CoincidenceError):
        kelvin_tensor(np.array([1.0, 1.0]), np.array([1.0, 1.0]), MED)


def test_kelvin_derivatives_against_fd():
    # low orders against plain finite differences of the tensor
    x = np.array([0.7, -0.3])
    y = np.array([-0.4, 0.9])
    h = 1e-5
    for (p, q) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
        exact = kelvin_derivatives(x[0] - y[0], x[1] - y[1], MED, [(p, q)])[(p, q)]
        e1, e2 = np.array([h, 0.0]), np.array([0.0, h])
        if p > 0:
            step, pp, qq = e1, p - 1, q
        else:
            step, pp, qq = e2, p, q - 1
        upper = kelvin_derivatives((x + step)[0] - y[0], (x + step)[1] - y[1], MED, [(pp, qq)])[(pp, qq)]
        lower = kelvin_derivatives((x - step)[0] - y[0], (x - step)[1] - y[1], MED, [(pp, qq)])[(pp, qq)]
        fd = (upper - lower) / (2 * h)
        assert np.max(np.abs(exact - fd)) < 1e-8 * max(1.0, np.max(np.abs(exact)))


def test_kelvin_derivatives_high_order_consistency():
    # order (p, q) checked by differencing the exact order below it
    x = np.array([0.5, 0.4])
    y = np.array([-0.6, -0.2])
    h = 1e-5
    for (p, q) in [(2, 1), (3, 0), (2, 2), (4, 0), (0, 4), (3, 2)]:
        exact = kelvin_derivatives(x[0] - y[0], x[1] - y[1], MED, [(p, q)])[(p, q)]
        if p > 0:
            step, pp, qq = np.array([h, 0.0]), p - 1, q
        else:
            step, pp, qq = np.array([0.0, h]), p, q - 1
        upper = kelvin_derivatives((x + step)[0] - y[0], (x + step)[1] - y[1], MED, [(pp, qq)])[(pp, qq)]
        lower = kelvin_derivatives((x - step)[0] - y[0], (x - step)[1] - y[1], MED, [(pp, qq)])[(pp, qq)]
        fd = (upper - lower) / (2 * h)
        assert np.max(np.abs(exact - fd)) < 1e-7 * max(1.0, np.max(np.abs(exact)))


def test_navier_tensor_symmetry_and_residual():
    rng = np.random.default_rng(5)
    y = np.array([0.2, -0.4])
    for _ in range(4):
        x = y + rng.uniform(0.5, 2.0) * _unit(rng)
        t = navier_tensor(x, y, MED)
        assert t[0, 1] == pytest.approx(t[1, 0], rel=1e-13)
    for col in (0, 1):
        f = VectorField(func=lambda x, c=col: navier_tensor(x, y, MED)[:, c])
        worst = 0.0
        for _ in range(6):
            x = y + rng.uniform(0.5, 2.5) * _unit(rng)
            worst = max(
                worst,
                np.max(np.abs(navier_residual(f, MED, x, step=2e-4, richardson=True))),
            )
        assert worst < 1e-6


def _unit(rng):
    a = rng.uniform(0, 2 * np.pi)
    return np.array([np.cos(a), np.sin(a)])


def test_navier_tensor_far_field_asymptotics():
    med = make_medium(2.0, 1.0, 4.0)
    y = np.array([0.2, -0.1])
    pol = np.array([0.7, 0.4])
    dirs = uniform_directions(12)
    ff = point_source_farfield(y, pol, med, dirs)
    r = 2000.0
    worst = 0.0
    for m, xhat in enumerate(dirs):
        u = navier_tensor(r * xhat, y, med) @ pol
        uff = (np.exp(1j * med.kp * r) / np.sqrt(r)) * ff.up[m] * xhat + (
            np.exp(1j * med.ks * r) / np.sqrt(r)
        ) * ff.us[m] * perp(xhat)
        worst = max(worst, np.linalg.norm(u - uff) / np.linalg.norm(uff))
    assert worst < 1e-3


def test_point_source_farfield_properties():
    med = MED
    dirs = uniform_directions(64)
    pol = np.array([1.0, 0.0])
    # source at the origin: no direction-dependent phase beyond e^{i pi/4}
    ff = point_source_farfield(np.zeros(2), pol, med, dirs)
    expect = np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * med.kp) * (dirs @ pol)
    assert np.allclose(ff.up, expect, atol=1e-15)
    # polarization along xhat kills the shear component at that direction
    assert abs(ff.us[0]) < 1e-15
    # magnitude envelope
    ff2 = point_source_farfield(np.array([0.3, 0.8]), pol, med, dirs)
    assert np.max(np.abs(ff2.up)) == pytest.approx(
        np.linalg.norm(pol) / np.sqrt(8 * np.pi * med.kp), rel=1e-12
    )
    with pytest.raises(ValueError):
        point_source_farfield(np.zeros(2), np.zeros(2), med, dirs)


def test_halfplane_green_boundary_vanishing():
    y = np.array([1.0, 1.0])
    for s in (-2.0, 0.3, 5.0):
        g = halfplane_green(np.array([0.0, s]), y, MED)
        assert np.max(np.abs(g)) < 1e-12
    # sup over 100 boundary points
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        s = rng.uniform(-6.0, 6.0)
        y = np.array([rng.uniform(0.3, 3.0), rng.uniform(-3.0, 3.0)])
        col = np.max(np.abs(halfplane_green(np.array([0.0, s]), y, MED)))
        worst = max(worst, col)
    assert worst < 1e-11


def test_halfplane_green_reflection_relation():
    from elastica2d.reflection import lame_reflect

    x = np.array([0.7, -0.2])
    y = np.array([1.5, 1.0])
    for col in (0, 1):
        f = halfplane_green_field(y, MED, col)
        lhs = halfplane_green(np.array([-x[0], x[1]]), y, MED)[:, col]
        rhs = lame_reflect(f, x, MED)
        assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_halfplane_green_columns_solve_static_system():
    rng = np.random.default_rng(9)
    y = np.array([1.2, 0.3])
    for col in (0, 1):
        f = halfplane_green_field(y, MED, col)
        worst = 0.0
        for _ in range(6):
            x = np.array([rng.uniform(0.1, 2.5), rng.uniform(-2.0, 2.0)])
            if min(np.linalg.norm(x - y), np.linalg.norm(x - np.array([-y[0], y[1]]))) < 0.4:
                continue
            worst = max(worst, np.max(np.abs(lame_residual(f, MED, x, step=1e-4))))
        assert worst < 1e-6


def test_halfplane_green_rejects_wrong_halfplane_source():
    with pytest.raises(ValueError):
        halfplane_green(np.array([0.5, 0.0]), np.array([-1.0, 0.0]), MED)
