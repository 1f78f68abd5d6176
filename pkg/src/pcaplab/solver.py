"""Exterior p-Laplace solver on the axisymmetric meridian mesh (n = 3).

The discrete problem minimizes the regularized energy

    J_eps(u) = sum_T  (eps^2 + |Du|_T^2)^(p/2) * 2 pi rbar_T |T|

over P1 nodal values with u = 1 on the body profile and u = c on the far
circle.  J_eps is strictly convex for p > 1, so damped Newton with an Armijo
line search converges globally; eps is walked down a fixed schedule with warm
starts because the unregularized Hessian can degenerate transiently for p < 2.
The far Dirichlet constant c is fixed-point iterated against a power-decay
fit of the solved field on an interior annulus, which is exact for the pure
far-field profile u ~ F |x|^(-(n-p)/(p-1)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.linalg import splu

from .bodies import Body
from .mesh import MeridianMesh, MeshError, MeshOptions, build_mesh
from .params import Params

TWO_PI = 2.0 * math.pi


class SolverError(RuntimeError):
    """Nonlinear iteration failed to converge; diagnostics attached."""

    def __init__(self, message, diag=None):
        super().__init__(message)
        self.diag = diag


@dataclass(frozen=True)
class SolverOptions:
    mesh: MeshOptions = dc_field(default_factory=MeshOptions)
    eps_start_scale: float = 1e-2  # times 1/diameter
    eps_final: float = 1e-8
    eps_factor: float = 10.0  # schedule divides eps by this per stage
    newton_max_iter: int = 60
    line_search_max: int = 30
    far_fit_tol: float = 1e-4  # relative change of the far amplitude
    far_max_passes: int = 8
    fit_annulus: tuple = (0.6, 0.8)  # fractions of rfar


@dataclass
class SolverDiagnostics:
    iterations: int = 0
    linear_solves: int = 0
    picard_steps: int = 0
    outer_passes: int = 0
    final_residual: float = math.nan
    eps_used: float = math.nan
    far_amplitude_history: list = dc_field(default_factory=list)
    energy_history: list = dc_field(default_factory=list)  # (stage, [J values])
    far_fit_residual: float = math.nan


@dataclass
class Field:
    """Solved potential: mesh, nodal values, and far-field data."""

    mesh: MeridianMesh
    u: np.ndarray
    params: Params
    body: Body
    far_amplitude: float  # fitted F in u ~ F |x|^(-beta); F^(p-1) estimates the capacity
    far_c: float  # Dirichlet value imposed on the far circle
    diag: SolverDiagnostics
    _cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def beta(self) -> float:
        return self.params.decay_rate

    def element_gradients(self) -> np.ndarray:
        """(M, 2) constant P1 gradient of u per triangle."""
        g = self._cache.get("element_gradients")
        if g is None:
            g = np.einsum("mi,mid->md", self.u[self.mesh.triangles], self.mesh.grads)
            self._cache["element_gradients"] = g
        return g

    def boundary_layer_width(self) -> float:
        return 2.0 * self.mesh.first_layer

    def t_min(self) -> float:
        """Smallest trustworthy level: 1.5x the far boundary value."""
        return 1.5 * self.far_c


def _quadratic(params: Params) -> bool:
    return params.p == 2.0


class _EnergyProblem:
    """Vectorized energy/gradient/Hessian of J_eps on a fixed mesh."""

    def __init__(self, mesh: MeridianMesh, p: float):
        self.mesh = mesh
        self.p = p
        self.weights = TWO_PI * mesh.centroid_r * mesh.areas  # (M,)
        self.tri = mesh.triangles
        self.grads = mesh.grads  # (M, 3, 2)
        n = mesh.n_nodes
        rows = np.repeat(self.tri, 3, axis=1).ravel()
        cols = np.tile(self.tri, (1, 3)).ravel()
        self._rows, self._cols, self._n = rows, cols, n

    def element_grad(self, u):
        return np.einsum("mi,mid->md", u[self.tri], self.grads)

    def energy(self, u, eps):
        g = self.element_grad(u)
        s = np.einsum("md,md->m", g, g)
        return float(np.dot(self.weights, (eps * eps + s) ** (self.p / 2.0)))

    def energy_grad(self, u, eps):
        g = self.element_grad(u)
        s = np.einsum("md,md->m", g, g)
        wprime = 0.5 * self.p * (eps * eps + s) ** (self.p / 2.0 - 1.0)
        coeff = (2.0 * self.weights * wprime)[:, None] * g  # (M, 2)
        contrib = np.einsum("mid,md->mi", self.grads, coeff)
        G = np.zeros(self._n)
        np.add.at(G, self.tri.ravel(), contrib.ravel())
        J = float(np.dot(self.weights, (eps * eps + s) ** (self.p / 2.0)))
        return J, G

    def hessian(self, u, eps, picard=False):
        g = self.element_grad(u)
        s = np.einsum("md,md->m", g, g)
        base = (eps * eps + s) ** (self.p / 2.0 - 2.0)
        wprime = 0.5 * self.p * base * (eps * eps + s)
        wsecond = 0.25 * self.p * (self.p - 2.0) * base
        dots = np.einsum("mid,mjd->mij", self.grads, self.grads)  # (M, 3, 3)
        blocks = (2.0 * self.weights * wprime)[:, None, None] * dots
        if not picard and self.p != 2.0:
            gb = np.einsum("mid,md->mi", self.grads, g)  # (M, 3)
            blocks += (4.0 * self.weights * wsecond)[:, None, None] * np.einsum(
                "mi,mj->mij", gb, gb
            )
        H = coo_matrix((blocks.ravel(), (self._rows, self._cols)), shape=(self._n, self._n))
        return H.tocsr()


def _eps_schedule(opts: SolverOptions, diameter: float, p: float):
    if p == 2.0:
        return [opts.eps_final]  # the regularization only shifts the energy by a constant
    eps = opts.eps_start_scale / diameter
    sched = []
    while eps > opts.eps_final:
        sched.append(eps)
        eps /= opts.eps_factor
    sched.append(opts.eps_final)
    return sched


def _solve_linear(problem, u, eps, free, picard, diag):
    if problem.p == 2.0:  # constant Hessian: factorize once and reuse
        lu = getattr(problem, "_lu2", None)
        if lu is None:
            Hff = problem.hessian(u, eps)[free][:, free]
            lu = problem._lu2 = splu(Hff.tocsc())
    else:
        Hff = problem.hessian(u, eps, picard=picard)[free][:, free]
        lu = splu(Hff.tocsc())
    diag.linear_solves += 1
    return lu


def _minimize(problem, u, eps, free, opts, diag):
    """Damped Newton on J_eps over the free nodes; Picard fallback on stalls.

    J_eps is a sum of positive terms, so its evaluation noise is about
    1e-16 * J; once the predicted Newton decrease |g.d| falls below that,
    further line searches only compare roundoff and the stage is converged.
    """
    energies = []
    picard = False
    gtol = None
    gnorm = math.inf
    for _ in range(opts.newton_max_iter):
        J, G = problem.energy_grad(u, eps)
        energies.append(J)
        gnorm = float(np.linalg.norm(G[free]))
        if gtol is None:
            gtol = max(1e-12, 1e-11 * gnorm)
        if gnorm <= gtol:
            break
        lu = _solve_linear(problem, u, eps, free, picard, diag)
        delta = np.zeros_like(u)
        delta[free] = lu.solve(-G[free])
        if picard:
            diag.picard_steps += 1
        gtd = float(np.dot(G[free], delta[free]))
        if gtd > 0:  # not a descent direction; retry with the frozen-coefficient operator
            picard = True
            continue
        if abs(gtd) <= 2e-14 * max(abs(J), 1e-300):
            break  # below the energy roundoff floor
        t, ok = 1.0, False
        for _ls in range(opts.line_search_max):
            J_new = problem.energy(u + t * delta, eps)
            if J_new <= J + 1e-4 * t * gtd:
                ok = True
                break
            t *= 0.5
        if not ok:
            if abs(gtd) <= 1e-11 * max(abs(J), 1e-300):
                break  # decrease indistinguishable from noise
            if not picard:
                picard = True
                continue
            raise SolverError(f"line search stalled at eps={eps:g}", diag)
        u = u + t * delta
        diag.iterations += 1
    else:
        raise SolverError(f"Newton did not converge at eps={eps:g}", diag)
    diag.energy_history.append((eps, energies))
    diag.final_residual = gnorm
    return u


def solve(body: Body, params: Params, opts: SolverOptions | None = None) -> Field:
    """Solve the exterior problem for the given body; n = 3, 1 < p < 3 only."""
    if params.n != 3:
        raise ValueError(f"the meridian solver is three-dimensional, got n = {params.n}")
    if not (1.0 < params.p < 3.0):
        raise ValueError(f"the meridian solver needs 1 < p < 3, got p = {params.p}")
    opts = opts or SolverOptions()
    mesh = build_mesh(body, opts.mesh)
    p = params.p
    beta = params.decay_rate
    problem = _EnergyProblem(mesh, p)
    diag = SolverDiagnostics()

    free = np.ones(mesh.n_nodes, dtype=bool)
    free[mesh.inner] = False
    free[mesh.outer] = False

    rho = np.hypot(mesh.nodes[:, 0], mesh.nodes[:, 1])
    r_eq = (body.a * body.a * body.c) ** (1.0 / 3.0)  # volume-equivalent radius
    u = np.clip((r_eq / np.maximum(rho, r_eq)) ** beta, 0.0, 1.0)
    u[mesh.inner] = 1.0
    c = (r_eq / mesh.rfar) ** beta
    u[mesh.outer] = c

    lo, hi = opts.fit_annulus
    fit_mask = (rho >= lo * mesh.rfar) & (rho <= hi * mesh.rfar)
    if not np.any(fit_mask):
        raise MeshError("empty far-field fit annulus")
    phi_fit = rho[fit_mask] ** (-beta)

    schedule = _eps_schedule(opts, 2.0 * body.circumradius, p)

    F = c * mesh.rfar**beta
    converged = False
    pairs = []  # (imposed far value, fitted far value)
    for outer in range(opts.far_max_passes):
        diag.outer_passes = outer + 1
        stages = schedule if outer == 0 else [schedule[-1]]
        for eps in stages:
            u = _minimize(problem, u, eps, free, opts, diag)
        F = float(np.dot(u[fit_mask], phi_fit) / np.dot(phi_fit, phi_fit))
        c_fit = F * mesh.rfar ** (-beta)
        diag.far_amplitude_history.append(F)
        pairs.append((c, c_fit))
        if abs(c_fit - c) < opts.far_fit_tol * max(c_fit, 1e-300):
            converged = True
            break
        # the map (imposed c) -> (fitted c) is close to linear: a secant step
        # jumps to its fixed point instead of crawling there geometrically
        c_next = c_fit
        if len(pairs) >= 2:
            (ca, fa), (cb, fb) = pairs[-2], pairs[-1]
            if cb != ca:
                k = (fb - fa) / (cb - ca)
                if math.isfinite(k) and abs(1.0 - k) > 0.05:
                    cand = (fb - k * cb) / (1.0 - k)
                    if cand > 0:
                        c_next = cand
        u[mesh.outer] = c_next
        c = c_next
    if not converged:
        raise SolverError("far-field amplitude fixed point did not converge", diag)

    resid = u[fit_mask] - F * phi_fit
    diag.far_fit_residual = float(np.linalg.norm(resid) / np.linalg.norm(u[fit_mask]))
    diag.eps_used = schedule[-1]

    interior = free.copy()
    if np.any(u[interior] <= 0.0) or np.any(u[interior] >= 1.0):
        raise SolverError("solution left the (0, 1) range at interior nodes", diag)

    return Field(mesh=mesh, u=u, params=params, body=body, far_amplitude=F, far_c=c, diag=diag)


def energy(field: Field) -> float:
    """Capacity-normalized p-energy: bulk integral over the truncated domain
    plus the analytic tail for the fitted power decay beyond the far circle."""
    p = field.params.p
    beta = field.beta
    g = field.element_gradients()
    s = np.einsum("md,md->m", g, g)
    weights = TWO_PI * field.mesh.centroid_r * field.mesh.areas
    bulk = float(np.dot(weights, s ** (p / 2.0)))
    # tail: |Du| = F beta rho^(-beta-1) for rho > rfar
    m_exp = p * (field.params.n - 1.0) / (p - 1.0) - field.params.n
    tail = (
        (field.far_amplitude * beta) ** p
        * field.params.sphere_area
        * field.mesh.rfar ** (-m_exp)
        / m_exp
    )
    norm = beta ** (p - 1.0) * field.params.sphere_area
    return (bulk + tail) / norm
