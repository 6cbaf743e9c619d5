"""Per-cell weak gradient operators and the mesh-dependent local norms.

The weak gradient of a pair (v, mu) with v constant on the cell and mu a
polynomial trace on its boundary is the member g of the local gradient
space W(T) satisfying, for every q in W(T),

    (g, q)_T = -(v, div q)_T + <mu, q.n>_dT.

With a basis of W(T) this is a single dense solve against the local Gram
matrix.  The basis used at runtime consists of monomials centered at the
cell centroid, which keeps the Gram matrix uniformly conditioned as the
mesh is refined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError
from .fespace import (QuadratureRule, SpaceConfig, edge_rule,
                      face_basis_values, triangle_rule)
from .mesh import CellGeometry, Mesh, cell_geometry

# Nodal mass matrix of the face basis on the reference edge [0, 1]:
# {1} for k=0, the endpoint hats {1-t, t} for k=1.
_NODAL_EDGE_GRAM = {
    0: np.array([[1.0]]),
    1: np.array([[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]]),
}


@dataclass(frozen=True)
class LocalWeakGradient:
    """Coefficient maps into the local gradient space W(T).

    ``g_interior @ [v]`` and ``g_boundary @ mu`` give the W(T)-coefficients
    of the two halves of the weak gradient; their sum annihilates constant
    pairs.  ``w_mass`` is the (SPD) Gram matrix of the W(T) basis.
    """

    g_interior: np.ndarray   # (dimW, 1)
    g_boundary: np.ndarray   # (dimW, 3*dim_face)
    w_mass: np.ndarray       # (dimW, dimW)


def w_basis_values(config: SpaceConfig, geom: CellGeometry,
                   points: np.ndarray) -> np.ndarray:
    """Evaluate the W(T) basis at physical points; shape (dimW, npts, 2)."""
    pts = np.atleast_2d(points)
    dx = pts[:, 0] - geom.centroid[0]
    dy = pts[:, 1] - geom.centroid[1]
    one = np.ones_like(dx)
    zero = np.zeros_like(dx)
    if config.family == "type1":
        comps = [(one, zero), (zero, one), (dx, dy)]
    else:
        comps = [(one, zero), (dx, zero), (dy, zero),
                 (zero, one), (zero, dx), (zero, dy)]
    return np.stack([np.column_stack(c) for c in comps])


def w_basis_divergence(config: SpaceConfig) -> np.ndarray:
    """Constant divergence of each W(T) basis member."""
    if config.family == "type1":
        return np.array([0.0, 0.0, 2.0])
    return np.array([0.0, 1.0, 0.0, 0.0, 0.0, 1.0])


def _physical_triangle_rule(geom: CellGeometry,
                            degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Map a reference rule onto the cell; weights integrate to the area."""
    rule = triangle_rule(degree)
    amat, b = geom.amap
    pts = rule.points @ amat.T + b
    return pts, rule.weights * (2.0 * geom.area)


def w_mass_matrix(config: SpaceConfig, geom: CellGeometry,
                  a_mat: np.ndarray | None = None) -> np.ndarray:
    """Gram matrix (a q_j, q_i)_T of the W(T) basis, a constant SPD (or None
    for the unweighted mass)."""
    pts, w = _physical_triangle_rule(geom, 2)
    qb = w_basis_values(config, geom, pts)  # (nw, npts, 2)
    if a_mat is None:
        aq = qb
    else:
        aq = qb @ np.asarray(a_mat, dtype=np.float64).T
    return np.einsum("ipc,jpc,p->ij", qb, aq, w)


def _edge_params(mesh: Mesh, cell: int, local_edge: int,
                 rule: QuadratureRule):
    """Quadrature data for one local edge.

    Returns physical points, weights scaled by edge length, and the
    global-orientation parameter values (0 at the lower-numbered vertex).
    """
    a = mesh.cells[cell, local_edge]
    b = mesh.cells[cell, (local_edge + 1) % 3]
    lo, hi = (a, b) if a < b else (b, a)
    p_lo, p_hi = mesh.vertices[lo], mesh.vertices[hi]
    t = rule.points
    pts = p_lo[None, :] + t[:, None] * (p_hi - p_lo)[None, :]
    length = float(np.hypot(*(p_hi - p_lo)))
    return pts, rule.weights * length, t


def boundary_coupling(mesh: Mesh, cell: int, config: SpaceConfig,
                      geom: CellGeometry) -> np.ndarray:
    """Matrix N with N[l, j] = <eta_j, q_l . n>_{dT}.

    Columns are stacked per local edge (three blocks of ``dim_face``),
    each block in global edge orientation.
    """
    m = config.dim_face
    n = np.zeros((config.dim_gradient, 3 * m))
    erule = edge_rule(2)
    for l in range(3):
        pts, w, t = _edge_params(mesh, cell, l, erule)
        qn = w_basis_values(config, geom, pts) @ geom.normals[l]  # (nw, npts)
        eta = face_basis_values(config, t)                        # (m, npts)
        n[:, l * m:(l + 1) * m] = np.einsum("ip,jp,p->ij", qn, eta, w)
    return n


def local_weak_gradient(mesh: Mesh, cell: int,
                        config: SpaceConfig) -> LocalWeakGradient:
    """Compute the coefficient maps of the weak gradient on one cell.

    Face coefficients are stacked per local edge (three blocks of
    ``dim_face``), each block in global edge orientation.
    """
    geom = cell_geometry(mesh, cell)
    mw = w_mass_matrix(config, geom)
    div = w_basis_divergence(config)
    d = (div * geom.area)[:, None]  # (dimW, 1): (div q, 1)_T
    n = boundary_coupling(mesh, cell, config, geom)
    try:
        g_interior = np.linalg.solve(mw, -d)
        g_boundary = np.linalg.solve(mw, n)
    except np.linalg.LinAlgError as exc:
        raise InternalConsistencyError(
            f"singular gradient-space Gram matrix on cell {cell}") from exc
    return LocalWeakGradient(g_interior=g_interior, g_boundary=g_boundary,
                             w_mass=mw)


def local_stiffness(mesh: Mesh, cell: int, config: SpaceConfig,
                    a_mat: np.ndarray | None = None) -> np.ndarray:
    """Local bilinear form (a grad_w ., grad_w .)_T on (v, mu) coefficients.

    Row/column order: cell unknown first, then the three stacked face
    blocks.  Symmetric positive semidefinite with the constant pair in its
    kernel.
    """
    lwg = local_weak_gradient(mesh, cell, config)
    g = np.hstack([lwg.g_interior, lwg.g_boundary])
    if a_mat is None:
        ma = lwg.w_mass
    else:
        ma = w_mass_matrix(config, cell_geometry(mesh, cell), a_mat)
    return g.T @ ma @ g


def cell_mean_row(config: SpaceConfig) -> np.ndarray:
    """Row vector r with m_T(mu) = r @ mu (stacked face coefficients).

    The mean of the nodal basis over its edge is independent of the edge
    geometry: each of the dim_face functions integrates to |F|/dim_face.
    """
    m = config.dim_face
    return np.full(3 * m, 1.0 / (3.0 * m))


def cell_mean(mesh: Mesh, cell: int, config: SpaceConfig,
              mu: np.ndarray) -> float:
    """m_T(mu): the average of the three edge-mean values."""
    return float(cell_mean_row(config) @ np.asarray(mu, dtype=np.float64))


def boundary_mass_matrix(mesh: Mesh, cell: int,
                         config: SpaceConfig) -> np.ndarray:
    """Mass matrix of the stacked face basis on the whole cell boundary."""
    m = config.dim_face
    gram = _NODAL_EDGE_GRAM[config.degree]
    out = np.zeros((3 * m, 3 * m))
    p = mesh.vertices
    for l in range(3):
        a = p[mesh.cells[cell, l]]
        b = p[mesh.cells[cell, (l + 1) % 3]]
        out[l * m:(l + 1) * m, l * m:(l + 1) * m] = gram * float(
            np.hypot(*(b - a)))
    return out


def seminorm_matrix(mesh: Mesh, cell: int, config: SpaceConfig) -> np.ndarray:
    """Quadratic form of |mu|_{h,dT}^2 = h_T^{-1} ||mu - m_T(mu)||_{dT}^2."""
    geom = cell_geometry(mesh, cell)
    mb = boundary_mass_matrix(mesh, cell, config)
    r = cell_mean_row(config)
    proj = np.eye(r.size) - np.outer(np.ones(r.size), r)
    return (proj.T @ mb @ proj) / geom.h


@dataclass(frozen=True)
class LocalNorms:
    mu_scaled: float        # ||mu||_{h,dT} = h^{1/2} ||mu||_{dT}
    mu_seminorm: float      # |mu|_{h,dT}
    v_l2: float             # ||v||_T
    weak_gradient_l2: float  # ||grad_w(v, mu)||_T


def local_norms(mesh: Mesh, cell: int, config: SpaceConfig,
                v: float | np.ndarray, mu: np.ndarray) -> LocalNorms:
    """Evaluate the four local quantities used by the norm estimates."""
    geom = cell_geometry(mesh, cell)
    v = float(np.asarray(v).reshape(()))
    mu = np.asarray(mu, dtype=np.float64)
    mb = boundary_mass_matrix(mesh, cell, config)
    mt = cell_mean(mesh, cell, config, mu)
    dev = mu - mt
    lwg = local_weak_gradient(mesh, cell, config)
    g = lwg.g_interior[:, 0] * v + lwg.g_boundary @ mu
    return LocalNorms(
        mu_scaled=float(np.sqrt(geom.h * (mu @ mb @ mu))),
        mu_seminorm=float(np.sqrt(max(dev @ mb @ dev, 0.0) / geom.h)),
        v_l2=abs(v) * np.sqrt(geom.area),
        weak_gradient_l2=float(np.sqrt(max(g @ lwg.w_mass @ g, 0.0))),
    )


def local_equivalence_forms(mesh: Mesh, cell: int,
                            config: SpaceConfig) -> tuple[np.ndarray,
                                                          np.ndarray]:
    """The two quadratic forms whose generalized eigenvalues measure the
    local equivalence between the weak-gradient energy and the scaled
    deviation norm.

    Q1(v, mu) = ||grad_w(v, mu)||_T^2 and
    Q2(v, mu) = h^{-2} ||v - m_T(mu)||_T^2 + |mu|_{h,dT}^2.

    Both vanish exactly on the one-dimensional space of constant pairs.
    """
    geom = cell_geometry(mesh, cell)
    q1 = local_stiffness(mesh, cell, config)
    r = cell_mean_row(config)
    nloc = 1 + r.size
    # rows of (v - m_T(mu)) as a linear functional on (v, mu)
    lin = np.concatenate([[1.0], -r])
    q2 = (geom.area / geom.h ** 2) * np.outer(lin, lin)
    q2[1:, 1:] += seminorm_matrix(mesh, cell, config)
    if q1.shape != (nloc, nloc):
        raise InternalConsistencyError("local form size mismatch")
    return q1, q2
