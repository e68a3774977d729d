"""Media, plane waves, field splitting and residual operators."""

import numpy as np
import pytest

from elastica2d.core import (
    PlaneWave,
    VectorField,
    helmholtz_split,
    lame_residual,
    make_medium,
    navier_residual,
    plane_wave_field,
    uniform_directions,
)


def test_make_medium_examples():
    m = make_medium(2.0, 1.0, 1.0)
    assert m.kp == pytest.approx(0.5)
    assert m.ks == pytest.approx(1.0)
    assert m.c_refl == pytest.approx(3.0 / 5.0)

    m = make_medium(1.0, 1.0, 2.0)
    assert m.kp == pytest.approx(2.0 / np.sqrt(3.0))
    assert m.ks == pytest.approx(2.0)
    assert m.c_refl == pytest.approx(0.5)

    m = make_medium(0.0, 1.0, 1.0)
    assert m.kp == pytest.approx(1.0 / np.sqrt(2.0))
    assert m.ks == pytest.approx(1.0)
    assert m.c_refl == pytest.approx(1.0 / 3.0)


def test_make_medium_rejects_bad_parameters():
    with pytest.raises(ValueError):
        make_medium(2.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        make_medium(-3.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        make_medium(2.0, 1.0, 0.0)


def test_plane_wave_geometry():
    rng = np.random.default_rng(0)
    for theta in rng.uniform(0.0, 2 * np.pi, 8):
        pw = PlaneWave(theta=theta, cp=1.0, cs=0.5j)
        d, dp = pw.d, pw.d_perp
        assert float(d[0]) * float(dp[0]) + float(d[1]) * float(dp[1]) == 0.0
        assert np.linalg.norm(pw.d) == pytest.approx(1.0)
        assert np.linalg.norm(pw.d_perp) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        PlaneWave(theta=0.0, cp=0.0, cs=0.0)


def test_plane_wave_value_and_channel_identity():
    med = make_medium(2.0, 1.0, 1.0)
    pw = PlaneWave(theta=0.7, cp=1.3, cs=0.0)
    f = plane_wave_field(pw, med)
    assert np.allclose(f.value(np.zeros(2)), pw.cp * pw.d)

    rng = np.random.default_rng(1)
    pw = PlaneWave(theta=2.1, cp=0.8 + 0.2j, cs=-0.5 + 1.0j)
    f = plane_wave_field(pw, med)
    for _ in range(6):
        x = rng.uniform(-5, 5, 2)
        u = f.value(x)
        assert abs(pw.d @ u) + abs(pw.d_perp @ u) == pytest.approx(
            abs(pw.cp) + abs(pw.cs), rel=1e-12
        )


def test_plane_wave_analytic_derivs_match_fd():
    med = make_medium(2.0, 1.0, 1.0)
    f = plane_wave_field(PlaneWave(theta=1.1, cp=1.0, cs=0.7j), med)
    x = np.array([0.3, -0.8])
    for (a, b) in [(1, 0), (0, 1)]:
        exact = f.derivative(x, a, b)
        fd = f.derivative(x, a, b, step=1e-6)
        assert np.max(np.abs(exact - fd)) < 1e-9
    for (a, b) in [(2, 0), (1, 1), (0, 2)]:
        exact = f.derivative(x, a, b)
        fd = f.derivative(x, a, b, step=1e-4)
        assert np.max(np.abs(exact - fd)) < 1e-7


def test_plane_wave_residual_analytic_and_fd():
    med = make_medium(2.0, 1.0, 1.0)
    rng = np.random.default_rng(7)
    pw = PlaneWave(theta=0.3, cp=1.0, cs=0.6)
    f = plane_wave_field(pw, med)
    for _ in range(10):
        x = rng.uniform(-5, 5, 2)
        assert np.max(np.abs(navier_residual(f, med, x))) < 1e-8
    # finite-difference route at 100 points
    f_fd = VectorField(func=f.func, func_batch=f.func_batch)
    worst = 0.0
    for _ in range(100):
        x = rng.uniform(-5, 5, 2)
        worst = max(worst, np.max(np.abs(navier_residual(f_fd, med, x, step=5e-4))))
    assert worst < 1e-7


def test_lame_residual_linear_field_exact_zero():
    med = make_medium(2.0, 1.0, 1.0)
    f = VectorField(
        func=lambda x: np.array([x[0], 0.0], dtype=complex),
        deriv=lambda x, a, b: (
            np.array([1.0, 0.0], dtype=complex) if (a, b) == (1, 0)
            else np.zeros(2, dtype=complex)
        ),
    )
    r = lame_residual(f, med, np.array([0.4, -1.0]))
    assert np.all(r == 0.0)


def test_helmholtz_split_pure_channels():
    med = make_medium(2.0, 1.0, 1.0)
    x = np.array([0.7, 0.4])
    fp = plane_wave_field(PlaneWave(theta=0.9, cp=2.0, cs=0.0), med)
    up, us = helmholtz_split(fp, med, x)
    assert np.max(np.abs(us)) < 1e-12
    assert np.allclose(up, fp.value(x), atol=1e-12)

    fs = plane_wave_field(PlaneWave(theta=0.9, cp=0.0, cs=2.0), med)
    up, us = helmholtz_split(fs, med, x)
    assert np.max(np.abs(up)) < 1e-12
    assert np.allclose(us, fs.value(x), atol=1e-12)


def test_helmholtz_split_mixed_reconstructs():
    med = make_medium(2.0, 1.0, 1.0)
    f = plane_wave_field(PlaneWave(theta=2.4, cp=1.0 - 0.5j, cs=0.3 + 1.1j), med)
    rng = np.random.default_rng(3)
    for _ in range(5):
        x = rng.uniform(-3, 3, 2)
        up, us = helmholtz_split(f, med, x)
        assert np.max(np.abs(up + us - f.value(x))) < 1e-8


def test_helmholtz_split_parts_solve_scalar_helmholtz():
    med = make_medium(2.0, 1.0, 1.0)
    f = plane_wave_field(PlaneWave(theta=2.4, cp=1.0, cs=0.7), med)
    x0 = np.array([0.2, -0.5])
    h = 1e-3

    def part(x, which):
        return helmholtz_split(f, med, x)[which]

    for which, k in ((0, med.kp), (1, med.ks)):
        lap = np.zeros(2, dtype=complex)
        for e in (np.array([h, 0.0]), np.array([0.0, h])):
            lap += part(x0 + e, which) - 2 * part(x0, which) + part(x0 - e, which)
        lap /= h * h
        assert np.max(np.abs(lap + k * k * part(x0, which))) < 1e-6


def test_uniform_directions():
    d = uniform_directions(8)
    assert d.shape == (8, 2)
    assert np.allclose(np.linalg.norm(d, axis=1), 1.0)
    assert np.allclose(d[2], [0.0, 1.0])
