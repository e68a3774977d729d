# Corner-clustered MFS prototype for the square.
import numpy as np

from elastica2d.core import make_medium, PlaneWave, plane_wave_field
from elastica2d.green import navier_tensor_pairs

med = make_medium(2.0, 1.0, 1.0)
pw = PlaneWave(theta=0.0, cp=1.0, cs=0.0)
V = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
n_v = 4
centroid = V.mean(axis=0)


def corner_cluster_depths(n, sigma, dmax):
    k = np.arange(1, n + 1)
    return dmax * np.exp(-sigma * (np.sqrt(n) - np.sqrt(k)))


def build_sources(n_backbone, n_corner, sigma, dmax, retraction):
    pts = []
    # smooth backbone: retracted square
    for i in range(n_v):
        a, b = V[i], V[(i + 1) % n_v]
        t = (np.arange(n_backbone // n_v) + 0.5) / (n_backbone // n_v)
        edge = a + t[:, None] * (b - a)
        pts.append(centroid + retraction * (edge - centroid))
    # corner clusters along interior bisectors
    for i in range(n_v):
        v = V[i]
        prev_v = V[(i - 1) % n_v]
        next_v = V[(i + 1) % n_v]
        bis = (prev_v - v) + (next_v - v)
        bis = bis / np.linalg.norm(bis)
        d = corner_cluster_depths(n_corner, sigma, dmax)
        pts.append(v + d[:, None] * bis)
    return np.concatenate(pts, axis=0)


def build_colloc(n_mid, n_corner_side, sigma, dmax):
    pts = []
    for i in range(n_v):
        a, b = V[i], V[(i + 1) % n_v]
        L = np.linalg.norm(b - a)
        tang = (b - a) / L
        d = corner_cluster_depths(n_corner_side, sigma, dmax)
        # near corner a and near corner b, plus uniform middle
        ta = d / L
        tb = 1.0 - d / L
        tm = (np.arange(n_mid) + 0.5) / n_mid * (1.0 - 2 * dmax / L) + dmax / L
        ts = np.unique(np.concatenate([ta, tm, tb]))
        pts.append(a + ts[:, None] * (b - a))
    return np.concatenate(pts, axis=0)


def solve(sources, colloc, rcond=1e-14):
    dx = colloc[:, None, 0] - sources[None, :, 0]
    dy = colloc[:, None, 1] - sources[None, :, 1]
    blocks = navier_tensor_pairs(dx, dy, med)
    mat = blocks.transpose(0, 2, 1, 3).reshape(2 * len(colloc), 2 * len(sources))
    rhs = -plane_wave_field(pw, med).values(colloc).reshape(-1)
    coef, _, rank, sv = np.linalg.lstsq(mat, rhs, rcond=rcond)
    return coef.reshape(-1, 2), sv[0] / sv[-1]


def residual(sources, coef, valid):
    dx = valid[:, None, 0] - sources[None, :, 0]
    dy = valid[:, None, 1] - sources[None, :, 1]
    blocks = navier_tensor_pairs(dx, dy, med)
    sc = np.einsum("nsij,sj->ni", blocks, coef)
    inc = plane_wave_field(pw, med).values(valid)
    return np.linalg.norm(sc + inc, axis=1)


for (nb, nc, sigma, dmax) in [
    (80, 30, 3.0, 0.5),
    (80, 40, 4.0, 0.5),
    (96, 36, 3.5, 0.6),
    (64, 44, 4.0, 0.4),
]:
    src = build_sources(nb, nc, sigma, dmax, 0.75)
    col = build_colloc((600 - 8 * nc) // 4, nc, sigma, dmax * 1.0)
    # validation: midpoints between sorted collocation params per edge
    coef, svr = solve(src, col)
    # validation points: interleave
    valid = build_colloc((600 - 8 * nc) // 4, nc, sigma * 0.97, dmax * 0.93)
    r = residual(src, coef, valid)
    print(
        f"nb={nb} nc={nc} sigma={sigma} dmax={dmax}: n_src={len(src)} n_col={len(col)} "
        f"max-resid {r.max():.2e}  svratio {svr:.1e}"
    )
