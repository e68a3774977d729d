"""Forward solvers: disk mode series, fundamental-solution fits, far fields."""

import numpy as np
import pytest

from elastica2d.core import (
    PlaneWave,
    make_medium,
    navier_residual,
    perp,
    uniform_directions,
)
from elastica2d.forward import (
    DiskObstacle,
    MfsParams,
    PolygonObstacle,
    disk_series_solve,
    farfield_of_solution,
    mfs_solve,
    nodal_scan,
    translate_farfield,
)
from elastica2d.green import point_source_farfield

MED = make_medium(2.0, 1.0, 1.0)
PW = PlaneWave(theta=0.0, cp=1.0, cs=0.0)
SQUARE = PolygonObstacle(vertices=[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def unit_disk():
    return DiskObstacle(center=np.zeros(2), radius=1.0)


def rel_l2(f1, f2):
    num = np.sum(f1.weights * (np.abs(f1.up - f2.up) ** 2 + np.abs(f1.us - f2.us) ** 2))
    return np.sqrt(num) / f1.l2_norm()


def test_obstacle_validation():
    with pytest.raises(ValueError):
        DiskObstacle(center=np.zeros(2), radius=0.0)
    with pytest.raises(ValueError):
        PolygonObstacle(vertices=[[0, 0], [1, 0]])
    with pytest.raises(ValueError):
        PolygonObstacle(vertices=[[0, 0], [0, 1], [1, 0]])  # clockwise
    with pytest.raises(ValueError):
        PolygonObstacle(vertices=[[0, 0], [1, 1], [1, 0], [0, 1]])  # bowtie


def test_disk_series_boundary_residual():
    sol = disk_series_solve(unit_disk(), PW, MED, truncation=30)
    assert sol.boundary_residual < 1e-10


def test_disk_series_rotational_covariance():
    disk = unit_disk()
    ang = 0.73
    rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
    sol0 = disk_series_solve(disk, PlaneWave(theta=0.0, cp=1.0, cs=0.3), MED)
    sol1 = disk_series_solve(disk, PlaneWave(theta=ang, cp=1.0, cs=0.3), MED)
    rng = np.random.default_rng(0)
    for _ in range(4):
        x = rng.uniform(1.2, 3.0) * _dir(rng.uniform(0, 2 * np.pi))
        u0 = sol0.scattered(x[None, :])[0]
        u1 = sol1.scattered((rot @ x)[None, :])[0]
        assert np.max(np.abs(rot @ u0 - u1)) < 1e-10


def _dir(a):
    return np.array([np.cos(a), np.sin(a)])


def test_disk_series_farfield_asymptotics():
    sol = disk_series_solve(unit_disk(), PW, MED, truncation=30)
    dirs = uniform_directions(16)
    ff = farfield_of_solution(sol, dirs)
    r = 2000.0
    worst = 0.0
    for m, xh in enumerate(dirs):
        u = sol.scattered(r * xh[None, :])[0]
        uff = (np.exp(1j * MED.kp * r) / np.sqrt(r)) * ff.up[m] * xh + (
            np.exp(1j * MED.ks * r) / np.sqrt(r)
        ) * ff.us[m] * perp(xh)
        worst = max(worst, np.linalg.norm(u - uff) / np.linalg.norm(uff))
    assert worst < 1e-3


def test_mfs_disk_matches_series_farfield():
    disk = unit_disk()
    series = disk_series_solve(disk, PW, MED, truncation=30)
    mfs = mfs_solve(disk, PW, MED, MfsParams(n_sources=120, n_collocation=300, retraction=0.8))
    dirs = uniform_directions(64)
    assert mfs.boundary_residual < 1e-6
    assert rel_l2(farfield_of_solution(series, dirs), farfield_of_solution(mfs, dirs)) < 1e-6


def test_mfs_square_residual():
    sol = mfs_solve(SQUARE, PW, MED)
    assert sol.boundary_residual < 1e-4
    assert sol.warnings == []


def test_mfs_square_reciprocity_sanity():
    dirs = uniform_directions(64)
    fA = farfield_of_solution(mfs_solve(SQUARE, PlaneWave(theta=0.0, cp=1.0), MED), dirs)
    fB = farfield_of_solution(
        mfs_solve(SQUARE, PlaneWave(theta=np.pi, cp=1.0), MED), dirs
    )
    # p-part at the back direction matches the reversed configuration
    assert abs(fA.up[32] - fB.up[0]) < 1e-4


def test_mfs_single_source_farfield_is_point_source():
    disk = unit_disk()
    sol = mfs_solve(disk, PW, MED, MfsParams(n_sources=1, n_collocation=8, retraction=0.3))
    # overwrite with a single known weight to probe the representation
    sol.coefficients = np.array([0.7, -0.4], dtype=complex)
    dirs = uniform_directions(32)
    got = farfield_of_solution(sol, dirs)
    want = point_source_farfield(sol.sources.points[0], sol.coefficients, MED, dirs)
    assert np.allclose(got.up, want.up, atol=1e-14)
    assert np.allclose(got.us, want.us, atol=1e-14)


def test_farfield_grid_convergence():
    sol = disk_series_solve(unit_disk(), PW, MED)
    n1 = farfield_of_solution(sol, uniform_directions(64)).l2_norm()
    n2 = farfield_of_solution(sol, uniform_directions(128)).l2_norm()
    assert abs(n1 - n2) < 1e-10


def test_translate_farfield_identity_and_composition():
    sol = disk_series_solve(unit_disk(), PW, MED)
    dirs = uniform_directions(64)
    ff = farfield_of_solution(sol, dirs)
    same = translate_farfield(ff, np.zeros(2), MED, PW)
    assert np.array_equal(same.up, ff.up)
    z1, z2 = np.array([0.3, -0.2]), np.array([-0.1, 0.4])
    once = translate_farfield(translate_farfield(ff, z1, MED, PW), z2, MED, PW)
    direct = translate_farfield(ff, z1 + z2, MED, PW)
    assert np.max(np.abs(once.up - direct.up)) < 1e-13
    assert np.max(np.abs(once.us - direct.us)) < 1e-13


def test_translate_farfield_matches_direct_solve():
    dirs = uniform_directions(64)
    z = np.array([0.5, 0.0])
    ff0 = farfield_of_solution(disk_series_solve(unit_disk(), PW, MED, truncation=30), dirs)
    moved = DiskObstacle(center=z, radius=1.0)
    ff1 = farfield_of_solution(disk_series_solve(moved, PW, MED, truncation=30), dirs)
    assert rel_l2(ff1, translate_farfield(ff0, z, MED, PW)) < 1e-9


def test_translate_farfield_rejects_mixed_channel():
    sol = disk_series_solve(unit_disk(), PlaneWave(theta=0.0, cp=1.0, cs=1.0), MED)
    ff = farfield_of_solution(sol, uniform_directions(16))
    with pytest.raises(ValueError):
        translate_farfield(ff, np.array([1.0, 0.0]), MED, PlaneWave(theta=0.0, cp=1.0, cs=1.0))


def test_scattered_fields_solve_navier():
    rng = np.random.default_rng(3)
    for sol in (
        disk_series_solve(unit_disk(), PW, MED),
        mfs_solve(SQUARE, PW, MED),
    ):
        fld = sol.scattered_field()
        worst = 0.0
        for _ in range(5):
            x = rng.uniform(2.2, 4.0) * _dir(rng.uniform(0, 2 * np.pi))
            worst = max(
                worst,
                np.max(np.abs(navier_residual(fld, MED, x, step=2e-4, richardson=True))),
            )
        assert worst < 1e-6


def test_nodal_scan_zero_tolerance_empty():
    sol = disk_series_solve(unit_disk(), PW, MED)
    res = nodal_scan(sol, ((-3, 3), (-3, 3)), 50, tol=0.0)
    assert len(res.points) == 0
    assert res.segments == []


def test_nodal_scan_disk_no_violation():
    med = make_medium(2.0, 1.0, 5.0)
    sol = disk_series_solve(unit_disk(), PlaneWave(theta=0.0, cp=1.0), med)
    res = nodal_scan(sol, ((-3, 3), (-3, 3)), 120, tol=0.08, seed=1)
    assert len(res.points) > 0
    assert not res.violation_found


def test_nodal_scan_detects_planted_segment():
    # synthetic check of the collinearity grouping on a planted line
    rng = np.random.default_rng(0)
    noise = rng.uniform(-3, 3, (60, 2))
    t = np.linspace(-2, 2, 40)
    line = np.stack([t, 0.4 * t + 0.1], axis=-1)
    from elastica2d.forward import _collinear_runs

    segs = _collinear_runs(np.concatenate([noise, line + rng.normal(0, 1e-4, line.shape)]), 0.12, seed=2)
    assert any(s["count"] >= 30 and s["length"] > 3.0 for s in segs)
