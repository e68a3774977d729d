"""Forward scattering from rigid obstacles.

Two solvers produce the scattered displacement field and its far-field
pattern for the homogeneous Dirichlet (rigid) condition:

* an analytic angular-mode series for disks.  The incident wave is expanded
  through scalar potentials (Jacobi-Anger), every angular mode couples the
  compressional and shear channels through a 2x2 system, and the far field
  follows from the large-argument form of the outgoing Hankel functions;

* the method of fundamental solutions (MFS) for polygons and disks.  The
  scattered field is a superposition of radiating point-source tensors with
  sources on a shrunk copy of the boundary, matched to -u_in at collocation
  points by a truncated-SVD least squares fit.  The boundary residual is
  always re-measured at validation points interleaved between the
  collocation nodes.

The module also provides the exact far-field translation rule used by the
spectrum cache, and a nodal-set scan that looks for straight segments of
zeros of the total field with both endpoints on the obstacle boundary
(no such segment should ever be found for a rigid scatterer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import (
    ElasticMedium,
    FarFieldPattern,
    PlaneWave,
    VectorField,
    perp,
    plane_wave_field,
    uniform_directions,
)
from .green import navier_tensor_pairs, point_source_farfield
from .special import MAX_ORDER, CylKind, cyl_deriv_orders, cyl_orders

__all__ = [
    "DiskObstacle",
    "PolygonObstacle",
    "ScatterSolution",
    "MfsParams",
    "disk_series_solve",
    "mfs_solve",
    "mfs_solve_multi",
    "farfield_of_solution",
    "translate_farfield",
    "nodal_scan",
    "NodalScanResult",
]


@dataclass(frozen=True)
class DiskObstacle:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0.0:
            raise ValueError("disk radius must be positive")

    def contains(self, pts, margin: float = 0.0):
        pts = np.asarray(pts, dtype=float)
        return np.linalg.norm(pts - self.center, axis=-1) < self.radius + margin

    def boundary_distance(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.abs(np.linalg.norm(pts - self.center, axis=-1) - self.radius)

    def boundary_points(self, n: int, offset: float = 0.0):
        ang = 2.0 * np.pi * (np.arange(n) + offset) / n
        return self.center + self.radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)

    def hull_radius(self) -> float:
        return float(np.linalg.norm(self.center) + self.radius)


@dataclass(frozen=True)
class PolygonObstacle:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
            raise ValueError("polygon needs at least three planar vertices")
        if _signed_area(v) < 0:
            raise ValueError("polygon vertices must be counterclockwise")
        if _self_intersects(v):
            raise ValueError("polygon must be simple (non self-intersecting)")
        object.__setattr__(self, "vertices", v)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def perimeter(self) -> float:
        return float(sum(np.linalg.norm(b - a) for a, b in self.edges()))

    def centroid(self) -> np.ndarray:
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        area = 0.5 * np.sum(cross)
        cx = np.sum((x + xn) * cross) / (6.0 * area)
        cy = np.sum((y + yn) * cross) / (6.0 * area)
        return np.array([cx, cy])

    def contains(self, pts, margin: float = 0.0):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        inside = np.zeros(len(pts), dtype=bool)
        v = self.vertices
        n = len(v)
        for i in range(n):
            a, b = v[i], v[(i + 1) % n]
            cond = (a[1] <= pts[:, 1]) != (b[1] <= pts[:, 1])
            xcross = a[0] + (pts[:, 1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1] + 1e-300)
            inside ^= cond & (pts[:, 0] < xcross)
        if margin != 0.0:
            near = self.boundary_distance(pts) < margin
            inside = inside | near
        return inside

    def boundary_distance(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        best = np.full(len(pts), np.inf)
        for a, b in self.edges():
            ab = b - a
            t = np.clip(((pts - a) @ ab) / (ab @ ab), 0.0, 1.0)
            proj = a + t[:, None] * ab
            best = np.minimum(best, np.linalg.norm(pts - proj, axis=1))
        return best

    def boundary_points(self, n: int, offset: float = 0.5, grading: str = "cosine"):
        """n points along the boundary, allocated by edge length.

        Cosine grading clusters points toward both endpoints of each edge
        (corner refinement); points sit strictly inside the open edges.
        """
        lengths = np.array([np.linalg.norm(b - a) for a, b in self.edges()])
        counts = np.maximum(2, np.round(n * lengths / lengths.sum()).astype(int))
        while counts.sum() > n:
            counts[np.argmax(counts)] -= 1
        while counts.sum() < n:
            counts[np.argmin(counts)] += 1
        pts = []
        for (a, b), m in zip(self.edges(), counts):
            j = np.arange(m) + offset
            if grading == "cosine":
                t = 0.5 * (1.0 - np.cos(np.pi * j / m))
            else:
                t = j / m
            pts.append(a + t[:, None] * (b - a))
        return np.concatenate(pts, axis=0)

    def hull_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))


def _signed_area(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


def _self_intersects(v):
    n = len(v)
    segs = [(v[i], v[(i + 1) % n]) for i in range(n)]

    def crosses(p1, p2, p3, p4):
        d1 = np.cross(p2 - p1, p3 - p1)
        d2 = np.cross(p2 - p1, p4 - p1)
        d3 = np.cross(p4 - p3, p1 - p3)
        d4 = np.cross(p4 - p3, p2 - p3)
        return (d1 * d2 < 0) and (d3 * d4 < 0)

    for i in range(n):
        for j in range(i + 1, n):
            if abs(i - j) in (0, 1) or (i == 0 and j == n - 1):
                continue
            if crosses(*segs[i], *segs[j]):
                return True
    return False


Obstacle = Union[DiskObstacle, PolygonObstacle]


@dataclass
class MfsParams:
    """Source and collocation layout for the fundamental-solution solver.

    n_sources counts source points (backbone plus corner clusters for
    polygons); n_collocation counts boundary matching points.  Polygon
    corners get exponentially clustered sources carrying independent
    compressional/shear potential monopoles and dipoles (n_corner points
    per corner, depth law dmax * exp(-sigma (sqrt(n) - sqrt(k))), capped
    below at depth_floor); without them the boundary misfit of a smooth
    source curve stalls near corners.
    """

    n_sources: int = 240
    n_collocation: int = 600
    retraction: Optional[float] = None
    svd_cutoff: float = 1e-12
    residual_warn: float = 1e-3
    n_corner: int = 20
    corner_sigma: float = 4.0
    corner_reach: float = 0.2
    depth_floor: float = 1e-9


@dataclass
class ScatterSolution:
    """Scattered-field representation with its self-reported boundary residual."""

    obstacle: Obstacle
    pw: PlaneWave
    med: ElasticMedium
    kind: str
    boundary_residual: float = 0.0
    warnings: List[str] = field(default_factory=list)
    # disk-series payload
    coeff_a: Optional[np.ndarray] = None
    coeff_b: Optional[np.ndarray] = None
    truncation: int = 0
    mode_conditions: Optional[np.ndarray] = None
    flagged_modes: Optional[list] = None
    # MFS payload: source basis object and its flat coefficient vector
    sources: Optional[object] = None
    coefficients: Optional[np.ndarray] = None
    sv_ratio: float = 0.0

    def scattered(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "disk_series":
            return _disk_scattered(self, pts)
        return _mfs_scattered(self, pts)

    def total(self, pts: np.ndarray) -> np.ndarray:
        inc = plane_wave_field(self.pw, self.med).values(np.atleast_2d(pts))
        return inc + self.scattered(pts)

    def scattered_field(self) -> VectorField:
        return VectorField(
            func=lambda x: self.scattered(x[None, :])[0],
            func_batch=lambda pts: self.scattered(pts),
        )


def _disk_truncation(med: ElasticMedium, radius: float) -> int:
    n = int(math.ceil(med.ks * radius)) + 25
    if n > MAX_ORDER - 1:
        raise ValueError(f"required mode order {n} exceeds supported cap {MAX_ORDER - 1}")
    return n


def _mode_matrices(med: ElasticMedium, h: float, nmax: int):
    """Per-mode 2x2 boundary systems for orders 0..nmax on a disk of radius h.

    Rows enforce the radial and tangential components of the Dirichlet
    condition; columns are the outgoing compressional/shear potentials (for
    M) or the incoming regular ones (for N).
    """
    zp, zs = med.kp * h, med.ks * h
    jp = cyl_orders(CylKind.J, nmax + 1, np.array([zp]))[:, 0]
    js = cyl_orders(CylKind.J, nmax + 1, np.array([zs]))[:, 0]
    jp_d = cyl_deriv_orders(CylKind.J, nmax + 1, np.array([zp]))[:, 0]
    js_d = cyl_deriv_orders(CylKind.J, nmax + 1, np.array([zs]))[:, 0]
    hp = cyl_orders(CylKind.H1, nmax + 1, np.array([zp]))[:, 0]
    hs = cyl_orders(CylKind.H1, nmax + 1, np.array([zs]))[:, 0]
    hp_d = cyl_deriv_orders(CylKind.H1, nmax + 1, np.array([zp]))[:, 0]
    hs_d = cyl_deriv_orders(CylKind.H1, nmax + 1, np.array([zs]))[:, 0]

    ns = np.arange(nmax + 1)
    M = np.zeros((nmax + 1, 2, 2), dtype=complex)
    N = np.zeros((nmax + 1, 2, 2), dtype=complex)
    M[:, 0, 0] = med.kp * hp_d[: nmax + 1]
    M[:, 0, 1] = -(1j * ns / h) * hs[: nmax + 1]
    M[:, 1, 0] = (1j * ns / h) * hp[: nmax + 1]
    M[:, 1, 1] = med.ks * hs_d[: nmax + 1]
    N[:, 0, 0] = med.kp * jp_d[: nmax + 1]
    N[:, 0, 1] = -(1j * ns / h) * js[: nmax + 1]
    N[:, 1, 0] = (1j * ns / h) * jp[: nmax + 1]
    N[:, 1, 1] = med.ks * js_d[: nmax + 1]
    return M, N


def _mode_for_negative(mat, n):
    # C_{-n} = (-1)^n C_n and the off-diagonal factor i n flips sign:
    # M_{-n} = (-1)^n D M_n D with D = diag(1, -1)
    out = mat.copy()
    out[0, 1] = -out[0, 1]
    out[1, 0] = -out[1, 0]
    return (-1.0) ** n * out


def _incident_mode_amplitudes(pw: PlaneWave, med: ElasticMedium, center, nmax: int):
    """Potentials of the incident wave about `center` as regular mode sums."""
    z = np.asarray(center, dtype=float)
    cp_loc = pw.cp * np.exp(1j * med.kp * (pw.d @ z))
    cs_loc = pw.cs * np.exp(1j * med.ks * (pw.d @ z))
    ns = np.arange(-nmax, nmax + 1)
    phase = (1j) ** ns * np.exp(-1j * ns * pw.theta)
    a = (cp_loc / (1j * med.kp)) * phase
    b = (cs_loc / (1j * med.ks)) * phase
    return ns, a, b


def disk_series_solve(
    disk: DiskObstacle,
    pw: PlaneWave,
    med: ElasticMedium,
    truncation: Optional[int] = None,
) -> ScatterSolution:
    """Angular-mode solution of rigid scattering from a disk.

    The scattered potentials are sum_n a_n H1_n(kp r) e^{i n t} and
    sum_n b_n H1_n(ks r) e^{i n t} in polar coordinates about the disk
    center; each mode solves a 2x2 system against the incident amplitudes.
    The boundary residual is measured on 8N boundary points.
    """
    nmax = truncation if truncation is not None else _disk_truncation(med, disk.radius)
    if truncation is not None and truncation < med.ks * disk.radius + 10:
        raise ValueError("truncation below ks*radius + 10 loses accuracy")
    M, N = _mode_matrices(med, disk.radius, nmax)
    ns, A, B = _incident_mode_amplitudes(pw, med, disk.center, nmax)
    a = np.zeros(2 * nmax + 1, dtype=complex)
    b = np.zeros(2 * nmax + 1, dtype=complex)
    conds = np.zeros(2 * nmax + 1)
    flagged = []
    for i, n in enumerate(ns):
        k = abs(n)
        Mn = M[k] if n >= 0 else _mode_for_negative(M[k], k)
        Nn = N[k] if n >= 0 else _mode_for_negative(N[k], k)
        rhs = -(Nn @ np.array([A[i], B[i]]))
        sv = np.linalg.svd(Mn, compute_uv=False)
        conds[i] = sv[0] / sv[1] if sv[1] > 0 else np.inf
        svn = np.linalg.svd(Nn, compute_uv=False)
        if svn[1] <= 1e-10 * svn[0]:
            flagged.append({"mode": int(n), "cond": float(svn[0] / max(svn[1], 1e-300))})
        sol = np.linalg.solve(Mn, rhs)
        a[i], b[i] = sol
    out = ScatterSolution(
        obstacle=disk,
        pw=pw,
        med=med,
        kind="disk_series",
        coeff_a=a,
        coeff_b=b,
        truncation=nmax,
        mode_conditions=conds,
        flagged_modes=flagged,
    )
    val = out.total(disk.boundary_points(8 * nmax, offset=0.37))
    out.boundary_residual = float(np.max(np.linalg.norm(val, axis=1)))
    return out


def _disk_scattered(sol: ScatterSolution, pts: np.ndarray) -> np.ndarray:
    disk: DiskObstacle = sol.obstacle
    med = sol.med
    rel = pts - disk.center
    r = np.linalg.norm(rel, axis=1)
    alpha = np.arctan2(rel[:, 1], rel[:, 0])
    nmax = sol.truncation
    hp = cyl_orders(CylKind.H1, nmax, med.kp * r)
    hs = cyl_orders(CylKind.H1, nmax, med.ks * r)
    hp_d = cyl_deriv_orders(CylKind.H1, nmax, med.kp * r)
    hs_d = cyl_deriv_orders(CylKind.H1, nmax, med.ks * r)
    ns = np.arange(-nmax, nmax + 1)
    sgn = np.where((ns >= 0) | (ns % 2 == 0), 1.0, -1.0)
    idx = np.abs(ns)
    # values for signed orders
    HP = sgn[:, None] * hp[idx]
    HS = sgn[:, None] * hs[idx]
    HPd = sgn[:, None] * hp_d[idx]
    HSd = sgn[:, None] * hs_d[idx]
    phase = np.exp(1j * np.outer(ns, alpha))
    a = sol.coeff_a[:, None]
    b = sol.coeff_b[:, None]
    inv_r = 1.0 / r
    u_r = np.sum((a * med.kp * HPd - b * (1j * ns[:, None]) * inv_r * HS) * phase, axis=0)
    u_t = np.sum((a * (1j * ns[:, None]) * inv_r * HP + b * med.ks * HSd) * phase, axis=0)
    e_r = rel / r[:, None]
    e_t = perp(e_r)
    return u_r[:, None] * e_r + u_t[:, None] * e_t


def _default_retraction(obstacle: Obstacle) -> float:
    return 0.8 if isinstance(obstacle, DiskObstacle) else 0.7


def _corner_depths(n: int, sigma: float, dmax: float, floor: float) -> np.ndarray:
    k = np.arange(1, n + 1)
    d = dmax * np.exp(-sigma * (np.sqrt(n) - np.sqrt(k)))
    return d[d >= floor]


class _PointForceBasis:
    """Plain point-force layout on a retracted copy of the boundary (disks)."""

    def __init__(self, obstacle: DiskObstacle, params: MfsParams):
        retraction = params.retraction or _default_retraction(obstacle)
        self.points = obstacle.center + retraction * (
            obstacle.boundary_points(params.n_sources, offset=0.25) - obstacle.center
        )
        self.colloc = obstacle.boundary_points(params.n_collocation, offset=0.0)
        # residual re-measured at four times the solve density
        self.valid = obstacle.boundary_points(4 * params.n_collocation, offset=0.37)
        self.ndof = 2 * len(self.points)

    def columns(self, pts: np.ndarray, med: ElasticMedium) -> np.ndarray:
        dx = pts[:, None, 0] - self.points[None, :, 0]
        dy = pts[:, None, 1] - self.points[None, :, 1]
        blocks = navier_tensor_pairs(dx, dy, med)
        return blocks.transpose(0, 2, 1, 3).reshape(2 * len(pts), self.ndof)

    def farfield_columns(self, directions: np.ndarray, med: ElasticMedium):
        phase = np.exp(1j * np.pi / 4.0)
        dot = directions @ self.points.T
        pp = phase / math.sqrt(8 * np.pi * med.kp) * np.exp(-1j * med.kp * dot)
        ss = phase / math.sqrt(8 * np.pi * med.ks) * np.exp(-1j * med.ks * dot)
        m, s = len(directions), len(self.points)
        up = np.zeros((m, self.ndof), dtype=complex)
        us = np.zeros((m, self.ndof), dtype=complex)
        dperp = perp(directions)
        for j in range(2):
            up[:, j::2] = pp * directions[:, [j]]
            us[:, j::2] = ss * dperp[:, [j]]
        return up, us


class _PotentialSplitBasis:
    """Polygon layout: smooth backbone plus corner-clustered potential sources.

    Backbone points carry one compressional source grad H0(kp |x-p|) and one
    shear source curl H0(ks |x-p|); cluster points additionally carry the
    source-position derivatives of both (dipoles).  Independent p/s channels
    per point are what lets the fit resolve the corner behavior; coupled
    point forces stall around 1e-1 boundary misfit.
    """

    def __init__(self, obstacle: PolygonObstacle, params: MfsParams):
        retraction = params.retraction or _default_retraction(obstacle)
        v = obstacle.vertices
        n_v = len(v)
        centroid = obstacle.centroid()
        self.cluster = []
        self.cluster_dmax = []
        edge_lengths = [np.linalg.norm(b - a) for a, b in obstacle.edges()]
        for i in range(n_v):
            corner = v[i]
            bis = (v[(i - 1) % n_v] - corner) + (v[(i + 1) % n_v] - corner)
            bis = bis / np.linalg.norm(bis)
            dmax = params.corner_reach * min(edge_lengths[i], edge_lengths[(i - 1) % n_v])
            d = _corner_depths(params.n_corner, params.corner_sigma, dmax, params.depth_floor)
            self.cluster.append(corner + d[:, None] * bis)
            self.cluster_dmax.append(dmax)
        self.cluster = np.concatenate(self.cluster)
        n_backbone = max(n_v * 4, params.n_sources - len(self.cluster))
        backbone = obstacle.boundary_points(n_backbone, offset=0.5, grading="uniform")
        self.backbone = centroid + retraction * (backbone - centroid)
        self.colloc = self._boundary_layout(obstacle, params, density=1, offset=0.0)
        # residual always re-measured at four times the solve density
        self.valid = self._boundary_layout(obstacle, params, density=4, offset=0.31)
        self.ndof = 2 * len(self.backbone) + 6 * len(self.cluster)

    def _boundary_layout(self, obstacle: PolygonObstacle, params: MfsParams,
                         density: int, offset: float):
        pts = []
        v = obstacle.vertices
        n_v = len(v)
        n_cluster_side = 3 * params.n_corner * density
        sigma = params.corner_sigma / math.sqrt(3.0 * density)
        budget = params.n_collocation - 2 * n_v * 3 * params.n_corner
        n_mid = max(6, budget // n_v) * density
        for i in range(n_v):
            a, b = v[i], v[(i + 1) % n_v]
            length = np.linalg.norm(b - a)
            dmax_a = self.cluster_dmax[i]
            dmax_b = self.cluster_dmax[(i + 1) % n_v]
            da = _corner_depths(n_cluster_side, sigma, dmax_a, params.depth_floor)
            db = _corner_depths(n_cluster_side, sigma, dmax_b, params.depth_floor)
            ta = (1.0 + 0.8 * offset) * da / length
            tb = 1.0 - (1.0 + 0.8 * offset) * db / length
            lo, hi = dmax_a / length, 1.0 - dmax_b / length
            tm = lo + (np.arange(n_mid) + 0.5 + offset) / n_mid * (hi - lo)
            ts = np.unique(np.concatenate([ta, tm, tb]))
            ts = ts[(ts > 0.0) & (ts < 1.0)]
            pts.append(a + ts[:, None] * (b - a))
        return np.concatenate(pts)

    def _channel_fields(self, pts, srcs, med, dipoles: bool):
        dx = pts[:, None, 0] - srcs[None, :, 0]
        dy = pts[:, None, 1] - srcs[None, :, 1]
        r = np.hypot(dx, dy)
        e1, e2 = dx / r, dy / r
        cols = []
        from .special import cyl as _cyl

        for k, kind in ((med.kp, "p"), (med.ks, "s")):
            z = k * r
            h1 = _cyl(CylKind.H1, 1, z)
            g1 = -k * h1 * e1
            g2 = -k * h1 * e2
            vec = np.stack([g1, g2], -1) if kind == "p" else np.stack([-g2, g1], -1)
            cols.append(vec)
            if dipoles:
                h0 = _cyl(CylKind.H1, 0, z)
                hxx = k * k * (-h0 * e1 * e1 + (h1 / z) * (2 * e1 * e1 - 1.0))
                hxy = k * k * (-h0 * e1 * e2 + (h1 / z) * (2 * e1 * e2))
                hyy = k * k * (-h0 * e2 * e2 + (h1 / z) * (2 * e2 * e2 - 1.0))
                # d/dp_l grad H0 = -(hessian row l); the sign is kept so the
                # far-field columns below stay consistent
                for ga, gb in ((-hxx, -hxy), (-hxy, -hyy)):
                    if kind == "p":
                        cols.append(np.stack([ga, gb], -1))
                    else:
                        cols.append(np.stack([-gb, ga], -1))
        return cols

    def columns(self, pts: np.ndarray, med: ElasticMedium) -> np.ndarray:
        back = self._channel_fields(pts, self.backbone, med, dipoles=False)
        clus = self._channel_fields(pts, self.cluster, med, dipoles=True)
        mats = [c.transpose(0, 2, 1).reshape(2 * len(pts), -1) for c in back + clus]
        return np.concatenate(mats, axis=1)

    def farfield_columns(self, directions: np.ndarray, med: ElasticMedium):
        """Far fields of the basis fields, column order matching columns()."""
        m = len(directions)

        def mono(srcs, k):
            # grad/curl of H0(k|x-y|) radiates with amplitude
            # sqrt(2k/pi) e^{i pi/4} e^{-ik xhat.y} in its own channel
            dot = directions @ srcs.T
            return math.sqrt(2.0 * k / np.pi) * np.exp(1j * np.pi / 4.0) * np.exp(
                -1j * k * dot
            )

        blocks_up, blocks_us = [], []
        for srcs, dipoles in ((self.backbone, False), (self.cluster, True)):
            fp = mono(srcs, med.kp)
            fs = mono(srcs, med.ks)
            blocks_up.append(fp)
            blocks_us.append(np.zeros_like(fp))
            if dipoles:
                for ell in range(2):
                    blocks_up.append(fp * (-1j * med.kp * directions[:, [ell]]))
                    blocks_us.append(np.zeros_like(fp))
            blocks_up.append(np.zeros_like(fs))
            blocks_us.append(fs)
            if dipoles:
                for ell in range(2):
                    blocks_up.append(np.zeros_like(fs))
                    blocks_us.append(fs * (-1j * med.ks * directions[:, [ell]]))
        up = np.concatenate(blocks_up, axis=1)
        us = np.concatenate(blocks_us, axis=1)
        return up, us


def _make_basis(obstacle: Obstacle, params: MfsParams):
    if isinstance(obstacle, DiskObstacle):
        return _PointForceBasis(obstacle, params)
    return _PotentialSplitBasis(obstacle, params)


def mfs_solve_multi(
    obstacle: Obstacle,
    pws: Sequence[PlaneWave],
    med: ElasticMedium,
    params: Optional[MfsParams] = None,
) -> List[ScatterSolution]:
    """Solve for several incident waves with one factorization of the matrix."""
    params = params or MfsParams()
    if params.n_collocation < 2 * params.n_sources:
        raise ValueError("need at least two collocation points per source")
    basis = _make_basis(obstacle, params)
    mat = basis.columns(basis.colloc, med)
    scale = np.linalg.norm(mat, axis=0)
    rhs = np.stack(
        [-plane_wave_field(pw, med).values(basis.colloc).reshape(-1) for pw in pws],
        axis=-1,
    )
    coef, _, rank, sv = np.linalg.lstsq(mat / scale, rhs, rcond=params.svd_cutoff)
    coef = coef / scale[:, None]
    vmat = basis.columns(basis.valid, med)
    inc_valid = np.stack(
        [plane_wave_field(pw, med).values(basis.valid).reshape(-1) for pw in pws],
        axis=-1,
    )
    sols = []
    for j, pw in enumerate(pws):
        sc = (vmat @ coef[:, j] + inc_valid[:, j]).reshape(-1, 2)
        resid = float(np.max(np.linalg.norm(sc, axis=1)))
        sol = ScatterSolution(
            obstacle=obstacle,
            pw=pw,
            med=med,
            kind="mfs",
            boundary_residual=resid,
            sources=basis,
            coefficients=coef[:, j],
            sv_ratio=float(sv[0] / sv[-1]) if len(sv) and sv[-1] > 0 else np.inf,
        )
        if resid > params.residual_warn:
            sol.warnings.append(
                f"boundary residual {resid:.2e} above threshold {params.residual_warn:.0e}"
            )
        sols.append(sol)
    return sols


def mfs_solve(
    obstacle: Obstacle,
    pw: PlaneWave,
    med: ElasticMedium,
    params: Optional[MfsParams] = None,
) -> ScatterSolution:
    return mfs_solve_multi(obstacle, [pw], med, params)[0]


def _mfs_scattered(sol: ScatterSolution, pts: np.ndarray, chunk: int = 2000) -> np.ndarray:
    out = np.empty((len(pts), 2), dtype=complex)
    for lo in range(0, len(pts), chunk):
        sub = pts[lo : lo + chunk]
        mat = sol.sources.columns(sub, sol.med)
        out[lo : lo + chunk] = (mat @ sol.coefficients).reshape(-1, 2)
    return out


def farfield_of_solution(sol: ScatterSolution, directions: np.ndarray) -> FarFieldPattern:
    """Far field of the scattered field on a direction grid.

    Disk series: closed-form Hankel asymptotics per mode, with the phase
    shift for an off-origin center.  MFS: superposition of point-source far
    fields, exact by linearity.
    """
    directions = np.asarray(directions, dtype=float)
    if sol.kind == "mfs":
        up_cols, us_cols = sol.sources.farfield_columns(directions, sol.med)
        return FarFieldPattern(
            directions=directions,
            up=up_cols @ sol.coefficients,
            us=us_cols @ sol.coefficients,
        )

    med = sol.med
    disk: DiskObstacle = sol.obstacle
    nmax = sol.truncation
    ns = np.arange(-nmax, nmax + 1)
    alpha = np.arctan2(directions[:, 1], directions[:, 0])
    phase = np.exp(1j * np.outer(ns, alpha))
    minus_i = (-1j) ** ns
    zdot = directions @ disk.center
    up = (
        math.sqrt(2.0 * med.kp / np.pi)
        * np.exp(1j * np.pi / 4.0)
        * np.exp(-1j * med.kp * zdot)
        * np.sum((sol.coeff_a * minus_i)[:, None] * phase, axis=0)
    )
    us = (
        math.sqrt(2.0 * med.ks / np.pi)
        * np.exp(1j * np.pi / 4.0)
        * np.exp(-1j * med.ks * zdot)
        * np.sum((sol.coeff_b * minus_i)[:, None] * phase, axis=0)
    )
    return FarFieldPattern(directions=directions, up=up, us=us)


def translate_farfield(
    ffp: FarFieldPattern, z, med: ElasticMedium, pw: PlaneWave
) -> FarFieldPattern:
    """Far field of the obstacle translated by z, for a pure incident channel.

    The incident wave picks up the phase e^{i k_inc d.z} and each scattered
    channel the phase e^{-i k_chan xhat.z}.  Mixed incident waves must be
    decomposed by the caller (the rule is channel-linear).
    """
    z = np.asarray(z, dtype=float)
    if pw.cp != 0 and pw.cs != 0:
        raise ValueError("translation rule needs a pure incident channel")
    k_inc = med.kp if pw.cp != 0 else med.ks
    dz = pw.d @ z
    xz = ffp.directions @ z
    up = ffp.up * np.exp(1j * (k_inc * dz - med.kp * xz))
    us = ffp.us * np.exp(1j * (k_inc * dz - med.ks * xz))
    return FarFieldPattern(directions=ffp.directions.copy(), up=up, us=us)


@dataclass
class NodalScanResult:
    points: np.ndarray
    segments: list
    violations: list

    @property
    def violation_found(self) -> bool:
        return len(self.violations) > 0


def nodal_scan(
    sol: ScatterSolution,
    bbox: Tuple[Tuple[float, float], Tuple[float, float]],
    n: int,
    tol: float,
    tol_geom: Optional[float] = None,
    seed: int = 0,
) -> NodalScanResult:
    """Scan for near-zeros of the total field and straight segments among them.

    The grid excludes the obstacle interior.  Segments are grouped from the
    nodal point cloud by repeated two-point line sampling with an inlier
    band of half a cell and a run-gap threshold of two cells; a segment is
    reported as a violation when both endpoints come within tol_geom
    (default two cells) of the obstacle boundary.
    """
    (x0, x1), (y0, y1) = bbox
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    cell = max((x1 - x0), (y1 - y0)) / (n - 1)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=-1)
    outside = ~sol.obstacle.contains(pts, margin=0.5 * cell)
    pts = pts[outside]
    if tol <= 0.0:
        return NodalScanResult(points=np.empty((0, 2)), segments=[], violations=[])
    vals = np.linalg.norm(sol.total(pts), axis=1)
    nodal = pts[vals < tol]
    segments = _collinear_runs(nodal, cell, seed)
    tol_geom = 2.0 * cell if tol_geom is None else tol_geom
    violations = []
    for seg in segments:
        ends = np.array([seg["start"], seg["end"]])
        d = sol.obstacle.boundary_distance(ends)
        if np.all(d < tol_geom):
            violations.append(seg)
    return NodalScanResult(points=nodal, segments=segments, violations=violations)


def _collinear_runs(pts: np.ndarray, cell: float, seed: int, trials: int = 400,
                    min_inliers: int = 8, max_segments: int = 40):
    rng = np.random.default_rng(seed)
    remaining = pts.copy()
    segments = []
    while len(remaining) >= min_inliers and len(segments) < max_segments:
        best = None
        for _ in range(trials):
            i, j = rng.integers(0, len(remaining), 2)
            if i == j:
                continue
            a, b = remaining[i], remaining[j]
            d = b - a
            norm = np.linalg.norm(d)
            if norm < cell:
                continue
            d = d / norm
            off = remaining - a
            dist = np.abs(off[:, 0] * d[1] - off[:, 1] * d[0])
            inliers = np.where(dist < 0.6 * cell)[0]
            if best is None or len(inliers) > len(best[0]):
                best = (inliers, a, d)
        if best is None or len(best[0]) < min_inliers:
            break
        inliers, a, d = best
        proj = (remaining[inliers] - a) @ d
        order = np.argsort(proj)
        sorted_idx = inliers[order]
        proj = proj[order]
        # split at gaps larger than two cells, keep the longest run
        gaps = np.where(np.diff(proj) > 2.0 * cell)[0]
        bounds = np.concatenate([[0], gaps + 1, [len(proj)]])
        run_lo, run_hi = max(
            ((bounds[k], bounds[k + 1]) for k in range(len(bounds) - 1)),
            key=lambda t: t[1] - t[0],
        )
        run = sorted_idx[run_lo:run_hi]
        if len(run) < min_inliers or proj[run_hi - 1] - proj[run_lo] < 3.0 * cell:
            mask = np.ones(len(remaining), dtype=bool)
            mask[inliers] = False
            remaining = remaining[mask]
            continue
        run_pts = remaining[run]
        segments.append(
            {
                "start": run_pts[0].tolist(),
                "end": run_pts[-1].tolist(),
                "count": int(len(run)),
                "length": float(np.linalg.norm(run_pts[-1] - run_pts[0])),
            }
        )
        mask = np.ones(len(remaining), dtype=bool)
        mask[run] = False
        remaining = remaining[mask]
    return segments
