"""Structured triangle mesh of the truncated exterior meridian domain.

The domain is the region between the body profile and a far circle of radius
R_far in the (r, z) half-plane, r >= 0.  Nodes sit on rays that start at
arclength-uniform points of the profile and end on the far circle at the same
polar angle; the radial node distribution is logarithmic, so the local cell
size grows proportionally to the distance from the origin and the cells keep
a roughly constant aspect ratio all the way out.  The two extreme rays lie
exactly on the symmetry axis r = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import Body

MIN_RFAR_FACTOR = 5.0


class MeshError(ValueError):
    """Invalid mesh configuration."""


@dataclass(frozen=True)
class MeshOptions:
    """Knobs for build_mesh.

    rfar: far-circle radius (default rfar_factor * circumradius).
    target_h: boundary arc spacing (default meridian_length / inner_segments).
    grading: radial spacing over angular arc; 1 gives near-isotropic cells.
    """

    rfar: float | None = None
    rfar_factor: float = 20.0
    target_h: float | None = None
    inner_segments: int = 256
    grading: float = 1.5

    def resolve_rfar(self, body: Body) -> float:
        rfar = self.rfar if self.rfar is not None else self.rfar_factor * body.circumradius
        if rfar < MIN_RFAR_FACTOR * body.circumradius:
            raise MeshError(
                f"rfar = {rfar:g} too small: need at least "
                f"{MIN_RFAR_FACTOR:g} x circumradius = {MIN_RFAR_FACTOR * body.circumradius:g}"
            )
        return rfar

    def resolve_h(self, body: Body) -> float:
        if self.target_h is not None:
            if not self.target_h > 0:
                raise MeshError("target_h must be positive")
            return self.target_h
        return body.meridian_length() / self.inner_segments


@dataclass
class MeridianMesh:
    nodes: np.ndarray  # (N, 2) coordinates (r, z)
    triangles: np.ndarray  # (M, 3) CCW node indices
    inner: np.ndarray  # node indices on the body profile
    outer: np.ndarray  # node indices on the far circle
    axis: np.ndarray  # node indices on r = 0
    n_phi: int  # angular segments
    n_rad: int  # radial layers
    rfar: float
    target_h: float
    first_layer: float  # mean thickness of the first radial layer
    # filled by _finalize
    areas: np.ndarray = field(default=None, repr=False)
    centroid_r: np.ndarray = field(default=None, repr=False)
    grads: np.ndarray = field(default=None, repr=False)  # (M, 3, 2) P1 basis gradients

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def node_index(self, i: int, j: int) -> int:
        return i * (self.n_rad + 1) + j

    def _finalize(self):
        x = self.nodes[self.triangles]  # (M, 3, 2)
        d1 = x[:, 1] - x[:, 0]
        d2 = x[:, 2] - x[:, 0]
        twice_area = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        if np.any(twice_area <= 0):
            raise MeshError("non-positive triangle area")
        self.areas = 0.5 * twice_area
        self.centroid_r = x[:, :, 0].mean(axis=1)
        # gradient of barycentric basis i: perpendicular of the opposite edge / (2A)
        g = np.empty((len(self.triangles), 3, 2))
        for i in range(3):
            a, b = x[:, (i + 1) % 3], x[:, (i + 2) % 3]
            g[:, i, 0] = a[:, 1] - b[:, 1]
            g[:, i, 1] = b[:, 0] - a[:, 0]
        g /= twice_area[:, None, None]
        self.grads = g

    def dump(self, path) -> None:
        """Plain-text node/triangle dump for debugging."""
        with open(path, "w") as f:
            f.write(f"# meridian mesh: {self.n_nodes} nodes, {len(self.triangles)} triangles\n")
            f.write(f"# n_phi={self.n_phi} n_rad={self.n_rad} rfar={self.rfar:.17g}\n")
            f.write("nodes\n")
            for r, z in self.nodes:
                f.write(f"{r:.17g} {z:.17g}\n")
            f.write("triangles\n")
            for t in self.triangles:
                f.write(f"{t[0]} {t[1]} {t[2]}\n")
            for name, idx in (("inner", self.inner), ("outer", self.outer), ("axis", self.axis)):
                f.write(f"{name} " + " ".join(str(i) for i in idx) + "\n")


def build_mesh(body: Body, opts: MeshOptions | None = None) -> MeridianMesh:
    """Build the graded structured mesh of the truncated exterior domain."""
    opts = opts or MeshOptions()
    rfar = opts.resolve_rfar(body)
    h = opts.resolve_h(body)
    L = body.meridian_length()
    n_phi = max(16, int(round(L / h)))

    # boundary nodes at arclength-uniform profile points, poles pinned to the axis
    s_nodes = np.linspace(0.0, L, n_phi + 1)
    phi = body.phi_of_arclength(s_nodes)
    phi[0], phi[-1] = 0.0, math.pi
    br, bz = body.point(phi)
    br = np.asarray(br, dtype=float).copy()
    bz = np.asarray(bz, dtype=float).copy()
    br[0] = br[-1] = 0.0

    alpha = np.arctan2(br, bz)  # polar angle of each boundary node, in [0, pi]
    alpha[0], alpha[-1] = 0.0, math.pi
    fr, fz = rfar * np.sin(alpha), rfar * np.cos(alpha)
    fr[0] = fr[-1] = 0.0

    # logarithmic radial levels from the circumscribed sphere to the far circle
    rc = body.circumradius
    delta = opts.grading * h / rc
    n_rad = max(4, int(math.ceil(math.log(rfar / rc) / delta)))
    levels = rc * np.exp(np.linspace(0.0, math.log(rfar / rc), n_rad + 1))
    w = (levels - rc) / (rfar - rc)
    w[0], w[-1] = 0.0, 1.0

    nr = br[:, None] * (1.0 - w[None, :]) + fr[:, None] * w[None, :]
    nz = bz[:, None] * (1.0 - w[None, :]) + fz[:, None] * w[None, :]
    nr[0, :] = 0.0
    nr[-1, :] = 0.0
    nodes = np.stack([nr.ravel(), nz.ravel()], axis=1)

    def idx(i, j):
        return i * (n_rad + 1) + j

    tris = []
    for i in range(n_phi):
        for j in range(n_rad):
            n00, n10 = idx(i, j), idx(i + 1, j)
            n01, n11 = idx(i, j + 1), idx(i + 1, j + 1)
            if (i + j) % 2 == 0:
                tris.append((n00, n10, n11))
                tris.append((n00, n11, n01))
            else:
                tris.append((n00, n10, n01))
                tris.append((n10, n11, n01))
    triangles = np.asarray(tris, dtype=np.int64)

    # enforce CCW orientation
    x = nodes[triangles]
    cross = (x[:, 1, 0] - x[:, 0, 0]) * (x[:, 2, 1] - x[:, 0, 1]) - (x[:, 1, 1] - x[:, 0, 1]) * (
        x[:, 2, 0] - x[:, 0, 0]
    )
    flip = cross < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]

    inner = np.asarray([idx(i, 0) for i in range(n_phi + 1)], dtype=np.int64)
    outer = np.asarray([idx(i, n_rad) for i in range(n_phi + 1)], dtype=np.int64)
    axis = np.asarray(
        [idx(0, j) for j in range(n_rad + 1)] + [idx(n_phi, j) for j in range(n_rad + 1)],
        dtype=np.int64,
    )
    first_layer = float(np.mean(np.hypot(nr[:, 1] - nr[:, 0], nz[:, 1] - nz[:, 0])))

    mesh = MeridianMesh(
        nodes=nodes,
        triangles=triangles,
        inner=inner,
        outer=outer,
        axis=axis,
        n_phi=n_phi,
        n_rad=n_rad,
        rfar=rfar,
        target_h=h,
        first_layer=first_layer,
    )
    mesh._finalize()
    if np.any(nodes[:, 0] < 0):
        raise MeshError("negative r coordinate")
    return mesh
