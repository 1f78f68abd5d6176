"""Derivative reconstruction on a solved field.

P1 elements carry constant gradients, so nodal derivatives are rebuilt by
patch recovery: a linear least-squares fit of the element gradients over each
node patch gives a superconvergent nodal gradient, and differentiating that
recovered gradient field the same way gives the nodal Hessian.  The meridian
data is then lifted to three dimensions in the local cylindrical frame
(e_r, e_phi, e_z): the gradient has no azimuthal component and the Hessian
gains the hoop entry u_r / r, which tends to u_rr on the symmetry axis.

All level-set and identity checks downstream consume these samples; points
closer than two layers to the inner or outer boundary are refused, and
boundary values are produced instead by one-sided quadratic extrapolation
along the inward normal from an interior offset curve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .bodies import Body, sample_boundary
from .params import Params
from .solver import Field


class DomainError(ValueError):
    """Point outside the evaluable region of the field."""


@dataclass(frozen=True)
class PointSample:
    """Field data at one meridian point, lifted to 3-D."""

    position: tuple  # (r, z)
    u: float
    grad: np.ndarray  # 3-vector in the (e_r, e_phi, e_z) frame
    hess: np.ndarray  # symmetric 3x3 in the same frame
    grad_norm: float
    H_level: float  # mean curvature of {u = u(x)} w.r.t. nu = -Du/|Du|

    def __post_init__(self):
        if not self.grad_norm > 0.0:
            raise DomainError("vanishing gradient at sample point")


# -- patch recovery ----------------------------------------------------------


def _spr_nodal(mesh, elem_values: np.ndarray) -> np.ndarray:
    """Recover nodal values from per-element data by patch least squares.

    Fits value ~ a + b.(x - x_node) over the elements touching each node
    (evaluated at centroids, offsets scaled by the patch radius) and keeps a.
    Nodes with degenerate patches fall back to the area-weighted average.
    """
    elem_values = np.atleast_2d(elem_values.T).T  # (M, k)
    n, k = mesh.n_nodes, elem_values.shape[1]
    tri = mesh.triangles
    cent = mesh.nodes[tri].mean(axis=1)  # (M, 2)

    # patch radius per node, for conditioning
    hsum = np.zeros(n)
    cnt = np.zeros(n)
    for v in range(3):
        d = np.linalg.norm(cent - mesh.nodes[tri[:, v]], axis=1)
        np.add.at(hsum, tri[:, v], d)
        np.add.at(cnt, tri[:, v], 1.0)
    hv = hsum / np.maximum(cnt, 1.0)
    hv[cnt == 0] = 1.0

    A = np.zeros((n, 3, 3))
    B = np.zeros((n, 3, k))
    wsum = np.zeros(n)
    wval = np.zeros((n, k))
    for v in range(3):
        idx = tri[:, v]
        dx = (cent - mesh.nodes[idx]) / hv[idx][:, None]  # (M, 2)
        phi = np.concatenate([np.ones((len(tri), 1)), dx], axis=1)  # (M, 3)
        np.add.at(A, idx, np.einsum("mi,mj->mij", phi, phi))
        np.add.at(B, idx, np.einsum("mi,mk->mik", phi, elem_values))
        np.add.at(wsum, idx, mesh.areas)
        np.add.at(wval, idx, mesh.areas[:, None] * elem_values)

    det = np.linalg.det(A)
    good = np.abs(det) > 1e-10 * np.maximum(cnt, 1.0) ** 3
    out = wval / np.maximum(wsum, 1e-300)[:, None]  # fallback: averaged
    if np.any(good):
        sol = np.linalg.solve(A[good], B[good])  # (n_good, 3, k)
        out[good] = sol[:, 0, :]
    return out


def nodal_gradient(field: Field) -> np.ndarray:
    """(N, 2) recovered (u_r, u_z) at the mesh nodes.

    u_r is odd in r across the symmetry axis, so it vanishes there exactly;
    pinning it protects the one-sided axis patches from even/odd mixing.
    """
    g = field._cache.get("nodal_gradient")
    if g is None:
        g = _spr_nodal(field.mesh, field.element_gradients())
        g[field.mesh.axis, 0] = 0.0
        field._cache["nodal_gradient"] = g
    return g


def nodal_hessian(field: Field) -> np.ndarray:
    """(N, 3) recovered meridian Hessian (u_rr, u_rz, u_zz), symmetrized.

    The mixed derivative is odd across the axis and vanishes there.
    """
    h = field._cache.get("nodal_hessian")
    if h is None:
        gn = nodal_gradient(field)
        mesh = field.mesh
        d = np.einsum("mi,mid->md", gn[mesh.triangles][:, :, 0], mesh.grads)  # grad of u_r
        e = np.einsum("mi,mid->md", gn[mesh.triangles][:, :, 1], mesh.grads)  # grad of u_z
        rec = _spr_nodal(mesh, np.concatenate([d, e], axis=1))  # (N, 4): u_rr u_rz u_zr u_zz
        h = np.stack([rec[:, 0], 0.5 * (rec[:, 1] + rec[:, 2]), rec[:, 3]], axis=1)
        h[mesh.axis, 1] = 0.0
        field._cache["nodal_hessian"] = h
    return h


# -- 3-D lift and point evaluation -------------------------------------------


def lift_gradient(u_r, u_z):
    """3-D gradient (u_r, 0, u_z) in the local cylindrical frame."""
    u_r, u_z = np.asarray(u_r, dtype=float), np.asarray(u_z, dtype=float)
    zeros = np.zeros_like(u_r)
    return np.stack([u_r, zeros, u_z], axis=-1)


def lift_hessian(r, u_r, u_rr, u_rz, u_zz, axis_tol=None):
    """Symmetric 3x3 Hessian; the hoop entry is u_r / r, continued as u_rr
    across the symmetry axis where the quotient degenerates."""
    r = np.asarray(r, dtype=float)
    u_r, u_rr, u_rz, u_zz = (np.asarray(a, dtype=float) for a in (u_r, u_rr, u_rz, u_zz))
    if axis_tol is None:
        axis_tol = 1e-12
    safe = np.abs(r) > axis_tol
    hoop = np.where(safe, u_r / np.where(safe, r, 1.0), u_rr)
    z = np.zeros_like(u_rr)
    row0 = np.stack([u_rr, z, u_rz], axis=-1)
    row1 = np.stack([z, hoop, z], axis=-1)
    row2 = np.stack([u_rz, z, u_zz], axis=-1)
    return np.stack([row0, row1, row2], axis=-2)


def _point_location(field: Field):
    tree = field._cache.get("centroid_tree")
    if tree is None:
        cent = field.mesh.nodes[field.mesh.triangles].mean(axis=1)
        tree = cKDTree(cent)
        field._cache["centroid_tree"] = tree
    return tree


def _locate(field: Field, pts: np.ndarray):
    """Containing triangle and barycentric coordinates for each point."""
    mesh = field.mesh
    tree = _point_location(field)
    n = len(pts)
    tri_of = np.full(n, -1, dtype=np.int64)
    bary = np.zeros((n, 3))
    pending = np.arange(n)
    for k in (12, 96):
        if len(pending) == 0:
            break
        _, cand = tree.query(pts[pending], k=min(k, len(mesh.triangles)))
        cand = np.atleast_2d(cand)
        x = mesh.nodes[mesh.triangles[cand]]  # (n_pend, k, 3, 2)
        p = pts[pending][:, None, :]
        v0 = x[:, :, 1] - x[:, :, 0]
        v1 = x[:, :, 2] - x[:, :, 0]
        vp = p - x[:, :, 0]
        det = v0[..., 0] * v1[..., 1] - v0[..., 1] * v1[..., 0]
        l1 = (vp[..., 0] * v1[..., 1] - vp[..., 1] * v1[..., 0]) / det
        l2 = (v0[..., 0] * vp[..., 1] - v0[..., 1] * vp[..., 0]) / det
        l0 = 1.0 - l1 - l2
        ok = (l0 >= -1e-10) & (l1 >= -1e-10) & (l2 >= -1e-10)
        first = np.argmax(ok, axis=1)
        found = ok[np.arange(len(pending)), first]
        rows = pending[found]
        sel = first[found]
        tri_of[rows] = cand[found, sel]
        bary[rows, 0] = l0[found, sel]
        bary[rows, 1] = l1[found, sel]
        bary[rows, 2] = l2[found, sel]
        pending = pending[~found]
    return tri_of, bary


def _quad_indices(mesh, tri_idx):
    """(i, j) structured-cell indices of the given triangles."""
    quad = tri_idx // 2
    return quad // mesh.n_rad, quad % mesh.n_rad


def evaluate(field: Field, points, clearance_layers: int = 2):
    """Vectorized field evaluation: interpolated u, gradient and Hessian data.

    Returns a dict of arrays keyed u, grad (n,3), hess (n,3,3), grad_norm, r.
    Points outside the mesh, or within `clearance_layers` radial layers of the
    inner or outer boundary, raise DomainError.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tri_of, bary = _locate(field, pts)
    if np.any(tri_of < 0):
        bad = pts[tri_of < 0][0]
        raise DomainError(f"point ({bad[0]:g}, {bad[1]:g}) is outside the meshed domain")
    _, j = _quad_indices(field.mesh, tri_of)
    if np.any(j < clearance_layers) or np.any(j > field.mesh.n_rad - 1 - clearance_layers):
        raise DomainError("point too close to the inner or outer boundary for recovery")

    tri = field.mesh.triangles[tri_of]  # (n, 3)
    u = np.einsum("ni,ni->n", field.u[tri], bary)
    gn = nodal_gradient(field)[tri]  # (n, 3, 2)
    hn = nodal_hessian(field)[tri]  # (n, 3, 3)
    g2 = np.einsum("nid,ni->nd", gn, bary)
    h2 = np.einsum("nid,ni->nd", hn, bary)
    r = pts[:, 0]
    grad = lift_gradient(g2[:, 0], g2[:, 1])
    # near the axis the recovered u_r/r quotient is noisy below one layer
    hess = lift_hessian(r, g2[:, 0], h2[:, 0], h2[:, 1], h2[:, 2], axis_tol=field.mesh.first_layer)
    grad_norm = np.linalg.norm(grad, axis=1)
    return {"u": u, "grad": grad, "hess": hess, "grad_norm": grad_norm, "r": r, "z": pts[:, 1]}


def sample_at(field: Field, point) -> PointSample:
    """PointSample at a single meridian point (r, z)."""
    data = evaluate(field, [point])
    H = mean_curvature_geometric_raw(data["grad"][0], data["hess"][0])
    return PointSample(
        position=(float(point[0]), float(point[1])),
        u=float(data["u"][0]),
        grad=data["grad"][0],
        hess=data["hess"][0],
        grad_norm=float(data["grad_norm"][0]),
        H_level=float(H),
    )


# -- pointwise curvature formulas ---------------------------------------------


def mean_curvature_geometric_raw(grad, hess):
    """H = -Lap(u)/|Du| + Hess(u)(Du,Du)/|Du|^3, the direct level-set formula."""
    grad = np.asarray(grad)
    hess = np.asarray(hess)
    gnorm = np.linalg.norm(grad, axis=-1)
    lap = np.trace(hess, axis1=-2, axis2=-1)
    quad = np.einsum("...i,...ij,...j->...", grad, hess, grad)
    return -lap / gnorm + quad / gnorm**3


def mean_curvature_pharmonic_raw(grad, hess, p: float):
    """H = (p-1) Hess(u)(Du,Du)/|Du|^3, valid where u is p-harmonic."""
    grad = np.asarray(grad)
    hess = np.asarray(hess)
    gnorm = np.linalg.norm(grad, axis=-1)
    quad = np.einsum("...i,...ij,...j->...", grad, hess, grad)
    return (p - 1.0) * quad / gnorm**3


def mean_curvature_pharmonic(sample: PointSample, params: Params) -> float:
    return float(mean_curvature_pharmonic_raw(sample.grad, sample.hess, params.p))


def dlog_norm(sample: PointSample) -> float:
    """|D log u| = |Du| / u."""
    if not sample.u > 0.0:
        raise DomainError("u must be positive")
    return sample.grad_norm / sample.u


# -- boundary values by one-sided extrapolation --------------------------------


@dataclass
class BoundaryValues:
    """Field data extrapolated onto the body boundary at quadrature nodes."""

    positions: np.ndarray  # (n, 2)
    normals: np.ndarray  # (n, 2) outward
    weights: np.ndarray  # (n,) surface-measure chunks (analytic geometry)
    H_analytic: np.ndarray  # (n,) profile mean curvature
    grad_norm: np.ndarray  # (n,) extrapolated |Du|
    H_field: np.ndarray  # (n,) extrapolated p-harmonic level curvature

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    @property
    def area(self) -> float:
        return float(self.weights.sum())


def boundary_values(field: Field, count: int = 512) -> BoundaryValues:
    """Extrapolate |Du| and the field curvature onto the boundary.

    Recovery stencils are one-sided and noisy at the wall, so values are read
    at offsets (2, 3, 4) x (first layer) along the outward normal and carried
    back with the quadratic rule f(0) = 6 f0 - 8 f1 + 3 f2.
    """
    key = ("boundary_values", count)
    cached = field._cache.get(key)
    if cached is not None:
        return cached
    samples = sample_boundary(field.body, count)
    pos = np.asarray([s.position for s in samples])
    nrm = np.asarray([s.normal for s in samples])
    w = np.asarray([s.weight for s in samples])
    Ha = np.asarray([s.H for s in samples])
    h1 = field.mesh.first_layer
    vals = []
    for k in (2.0, 3.0, 4.0):
        data = evaluate(field, pos + k * h1 * nrm, clearance_layers=1)
        Hp = mean_curvature_pharmonic_raw(data["grad"], data["hess"], field.params.p)
        vals.append((data["grad_norm"], Hp))
    gb = 6.0 * vals[0][0] - 8.0 * vals[1][0] + 3.0 * vals[2][0]
    Hb = 6.0 * vals[0][1] - 8.0 * vals[1][1] + 3.0 * vals[2][1]
    out = BoundaryValues(
        positions=pos, normals=nrm, weights=w, H_analytic=Ha, grad_norm=gb, H_field=Hb
    )
    field._cache[key] = out
    return out


def interior_probe_points(field: Field, n_rho: int = 6, n_ang: int = 24) -> np.ndarray:
    """Deterministic fan of interior probe points clear of all boundaries."""
    rc = field.body.circumradius
    rho_max = 0.45 * field.mesh.rfar
    rho = np.geomspace(1.25 * rc, rho_max, n_rho)
    ang = np.linspace(0.15, math.pi - 0.15, n_ang)
    pts = np.stack(
        [np.outer(rho, np.sin(ang)).ravel(), np.outer(rho, np.cos(ang)).ravel()], axis=1
    )
    return pts
