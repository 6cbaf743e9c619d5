"""Global assembly: stiffness, mesh-dependent Gram matrix, load vector,
and the three-field (flux, cell, face) saddle system used as a
cross-validation oracle.

Unknown ordering is fixed by the dof map: cell unknowns first, then face
unknowns edge-major.  The stiffness matrix then has the 2x2 block shape

    A = [ C  B^T ]
        [ B  D  ]

with C the cell-cell block.  Scatter-adds are accumulated in index order,
so repeated assembly of the same system is bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.sparse as sp

from .errors import (InvalidInputError, InvalidMatrixError,
                     UnsupportedConfigError)
from .fespace import DofMap, SpaceConfig, triangle_rule
from .mesh import CoefficientField, Mesh, cell_geometry
from .weakgrad import (_NODAL_EDGE_GRAM, boundary_coupling,
                       local_weak_gradient, seminorm_matrix,
                       w_basis_divergence, w_mass_matrix)


@dataclass(frozen=True)
class BlockSystem:
    """Assembled stiffness plus the Gram matrix of the discrete inner
    product, with the cell/face block split recorded."""

    a: sp.csr_matrix
    num_interior: int
    num_face: int
    gram: sp.csr_matrix
    coefficient: CoefficientField

    @property
    def num_total(self) -> int:
        return self.num_interior + self.num_face

    def blocks(self):
        """(C, B, D) with C cell-cell, B face-cell, D face-face."""
        m = self.num_interior
        return (self.a[:m, :m], self.a[m:, :m], self.a[m:, m:])


@dataclass(frozen=True)
class HybridSystem:
    """Three-field form: flux unknowns per cell, then cell, then face.

    ``w_block`` is the block-diagonal (a^{-1} p, q) mass, ``w_inv`` its
    per-cell inverse (also block diagonal), ``div_block`` the (v, div q)
    coupling and ``trace_block`` the <mu, q.n> coupling.
    """

    w_block: sp.csr_matrix
    w_inv: sp.csr_matrix
    div_block: sp.csr_matrix
    trace_block: sp.csr_matrix
    num_flux: int
    num_interior: int
    num_face: int

    def saddle_matrix(self) -> sp.csr_matrix:
        """The full symmetric indefinite three-field matrix."""
        d, n = self.div_block, self.trace_block
        return sp.bmat([
            [self.w_block, d, -n],
            [d.T, None, None],
            [-n.T, None, None],
        ], format="csr")

    def schur_complement(self) -> sp.csr_matrix:
        """Eliminate the flux block: [d, -n]^T w^{-1} [d, -n]."""
        k = sp.hstack([self.div_block, -self.trace_block]).tocsr()
        return (k.T @ self.w_inv @ k).tocsr()


def _check_pair(dofmap: DofMap, config: SpaceConfig) -> None:
    if dofmap.config.family != config.family:
        raise UnsupportedConfigError(
            f"dof map built for {dofmap.config.family!r}, "
            f"got {config.family!r}")


def _coefficient_matrix(a: CoefficientField, cell: int):
    """Per-cell 2x2 tensor, or None when it is exactly the identity."""
    a11, a12, a22 = a.tensors[cell]
    if a11 == 1.0 and a12 == 0.0 and a22 == 1.0:
        return None
    return np.array([[a11, a12], [a12, a22]])


def assemble_system(mesh: Mesh, dofmap: DofMap, config: SpaceConfig,
                    a: CoefficientField) -> BlockSystem:
    """Assemble the weak-gradient stiffness matrix and its Gram companion.

    Rows and columns of boundary-edge unknowns never exist: the local
    contributions that touch them are dropped, which is exactly the
    homogeneous Dirichlet condition of the face space.
    """
    _check_pair(dofmap, config)
    if a.tensors.shape[0] != mesh.num_cells:
        raise InvalidInputError("coefficient field does not match the mesh")
    rows, cols, vals = [], [], []
    for cell in range(mesh.num_cells):
        lwg = local_weak_gradient(mesh, cell, config)
        g = np.hstack([lwg.g_interior, lwg.g_boundary])
        a_mat = _coefficient_matrix(a, cell)
        if a_mat is None:
            ma = lwg.w_mass
        else:
            ma = w_mass_matrix(config, cell_geometry(mesh, cell), a_mat)
        k = g.T @ ma @ g
        dofs = dofmap.cell_dofs(mesh, cell)
        keep = np.flatnonzero(dofs >= 0)
        kept = dofs[keep]
        rows.append(np.repeat(kept, kept.size))
        cols.append(np.tile(kept, kept.size))
        vals.append(k[np.ix_(keep, keep)].ravel())
    n = dofmap.num_total
    amat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n)).tocsr()
    amat.sum_duplicates()
    amat.sort_indices()
    return BlockSystem(a=amat, num_interior=dofmap.num_interior,
                       num_face=dofmap.num_face,
                       gram=assemble_gram(mesh, dofmap, config),
                       coefficient=a)


def assemble_gram(mesh: Mesh, dofmap: DofMap,
                  config: SpaceConfig) -> sp.csr_matrix:
    """Matrix of (u, v)_Omega + sum_T h_T <lambda, mu>_{dT}.

    Block diagonal: cell areas on the interior block; each interior edge
    gets its nodal edge mass scaled by the sum of the diameters of its
    incident cells (each incident cell integrates the same trace).
    """
    _check_pair(dofmap, config)
    h = mesh.cell_diameters()
    lengths = mesh.edge_lengths()
    gram_ref = _NODAL_EDGE_GRAM[config.degree]
    m = config.dim_face
    rows, cols, vals = [list(range(dofmap.num_interior))], \
        [list(range(dofmap.num_interior))], [mesh.signed_areas()]
    for edge in range(mesh.num_edges):
        start = dofmap.face_dof_start(edge)
        if start < 0:
            continue
        hsum = sum(float(h[c]) for c in mesh.edge_cells[edge] if c >= 0)
        block = hsum * lengths[edge] * gram_ref
        idx = np.arange(start, start + m)
        rows.append(np.repeat(idx, m))
        cols.append(np.tile(idx, m))
        vals.append(block.ravel())
    n = dofmap.num_total
    out = sp.coo_matrix(
        (np.concatenate(vals),
         (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)).tocsr()
    out.sum_duplicates()
    out.sort_indices()
    return out


def assemble_face_seminorm(mesh: Mesh, dofmap: DofMap,
                           config: SpaceConfig) -> sp.csr_matrix:
    """Matrix of |mu|_h^2 = sum_T h_T^{-1} ||mu - m_T(mu)||_{dT}^2 over the
    face unknowns alone (cell block absent)."""
    _check_pair(dofmap, config)
    m = config.dim_face
    nf = dofmap.num_face
    rows, cols, vals = [], [], []
    for cell in range(mesh.num_cells):
        q = seminorm_matrix(mesh, cell, config)
        dofs = dofmap.cell_dofs(mesh, cell)[1:] - dofmap.num_interior
        keep = np.flatnonzero(dofs >= 0)
        kept = dofs[keep]
        rows.append(np.repeat(kept, kept.size))
        cols.append(np.tile(kept, kept.size))
        vals.append(q[np.ix_(keep, keep)].ravel())
    out = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nf, nf)).tocsr()
    out.sum_duplicates()
    out.sort_indices()
    return out


LoadFunction = Union[float, Callable[[np.ndarray, np.ndarray], np.ndarray]]


def assemble_load(mesh: Mesh, dofmap: DofMap, config: SpaceConfig,
                  f: LoadFunction, f_degree: int = 2) -> np.ndarray:
    """Right-hand side (f projected onto cell constants, 0 on faces).

    `f` is either a constant or a vectorized callable f(x, y); `f_degree`
    states the polynomial degree the quadrature must integrate exactly
    (degrees above the available rules raise).
    """
    _check_pair(dofmap, config)
    rule = triangle_rule(f_degree)
    b = np.zeros(dofmap.num_total)
    for cell in range(mesh.num_cells):
        geom = cell_geometry(mesh, cell)
        amat, shift = geom.amap
        pts = rule.points @ amat.T + shift
        w = rule.weights * (2.0 * geom.area)
        if callable(f):
            fv = np.asarray(f(pts[:, 0], pts[:, 1]), dtype=np.float64)
        else:
            fv = float(f)
        b[cell] = np.sum(w * fv)
    return b


def assemble_hybrid(mesh: Mesh, dofmap: DofMap, config: SpaceConfig,
                    a: CoefficientField) -> HybridSystem:
    """Assemble the three-field system whose flux elimination must
    reproduce the weak-gradient stiffness matrix."""
    _check_pair(dofmap, config)
    nw = config.dim_gradient
    div_ref = w_basis_divergence(config)
    m = config.dim_face
    w_rows, w_cols, w_vals = [], [], []
    wi_vals = []
    d_rows, d_cols, d_vals = [], [], []
    t_rows, t_cols, t_vals = [], [], []
    for cell in range(mesh.num_cells):
        geom = cell_geometry(mesh, cell)
        a_mat = _coefficient_matrix(a, cell)
        a_inv = None if a_mat is None else np.linalg.inv(a_mat)
        wcell = w_mass_matrix(config, geom, a_inv)
        base = cell * nw
        idx = np.arange(base, base + nw)
        w_rows.append(np.repeat(idx, nw))
        w_cols.append(np.tile(idx, nw))
        w_vals.append(wcell.ravel())
        wi_vals.append(np.linalg.inv(wcell).ravel())
        d_rows.append(idx)
        d_cols.append(np.full(nw, cell))
        d_vals.append(div_ref * geom.area)
        # boundary coupling columns, same edge traversal as the dof map
        lwg_n = boundary_coupling(mesh, cell, config, geom)
        dofs = dofmap.cell_dofs(mesh, cell)[1:] - dofmap.num_interior
        for j, dof in enumerate(dofs):
            if dof < 0:
                continue
            t_rows.append(idx)
            t_cols.append(np.full(nw, dof))
            t_vals.append(lwg_n[:, j])
    nflux = nw * mesh.num_cells
    shape_w = (nflux, nflux)
    w_block = sp.coo_matrix(
        (np.concatenate(w_vals),
         (np.concatenate(w_rows), np.concatenate(w_cols))),
        shape=shape_w).tocsr()
    w_inv = sp.coo_matrix(
        (np.concatenate(wi_vals),
         (np.concatenate(w_rows), np.concatenate(w_cols))),
        shape=shape_w).tocsr()
    div_block = sp.coo_matrix(
        (np.concatenate(d_vals),
         (np.concatenate(d_rows), np.concatenate(d_cols))),
        shape=(nflux, dofmap.num_interior)).tocsr()
    trace_block = sp.coo_matrix(
        (np.concatenate(t_vals),
         (np.concatenate(t_rows), np.concatenate(t_cols))),
        shape=(nflux, dofmap.num_face)).tocsr()
    return HybridSystem(w_block=w_block, w_inv=w_inv, div_block=div_block,
                        trace_block=trace_block, num_flux=nflux,
                        num_interior=dofmap.num_interior,
                        num_face=dofmap.num_face)


def schur_check(hybrid: HybridSystem, system: BlockSystem) -> float:
    """Max-abs deviation between the flux-eliminated system and A."""
    diff = (hybrid.schur_complement() - system.a).tocoo()
    return float(np.abs(diff.data).max()) if diff.nnz else 0.0


def write_matrix_market(path: str, a: sp.spmatrix) -> None:
    """Write a symmetric sparse matrix in MatrixMarket coordinate format
    (1-based, lower triangle only)."""
    dev = a - a.T
    scale = np.abs(a.data).max() if a.nnz else 0.0
    if dev.nnz and np.abs(dev.data).max() > 1e-12 * scale:
        raise InvalidMatrixError(
            "refusing to write an asymmetric matrix in symmetric format")
    a = sp.coo_matrix(a)
    mask = a.row >= a.col
    rows, cols, vals = a.row[mask], a.col[mask], a.data[mask]
    order = np.lexsort((rows, cols))
    lines = ["%%MatrixMarket matrix coordinate real symmetric",
             f"{a.shape[0]} {a.shape[1]} {mask.sum()}"]
    for i in order:
        lines.append(f"{rows[i] + 1} {cols[i] + 1} {float(vals[i])!r}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix_market(path: str) -> sp.csr_matrix:
    """Read a coordinate-format symmetric MatrixMarket file."""
    with open(path) as fh:
        header = fh.readline().split()
        if header[:4] != ["%%MatrixMarket", "matrix", "coordinate", "real"]:
            raise InvalidInputError(f"unsupported MatrixMarket header in {path}")
        symmetric = len(header) > 4 and header[4] == "symmetric"
        line = fh.readline()
        while line.startswith("%"):
            line = fh.readline()
        nr, nc, nnz = (int(t) for t in line.split())
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz)
        for k in range(nnz):
            r, c, v = fh.readline().split()
            rows[k], cols[k], vals[k] = int(r) - 1, int(c) - 1, float(v)
    if symmetric:
        off = rows != cols
        rows, cols = (np.concatenate([rows, cols[off]]),
                      np.concatenate([cols, rows[off]]))
        vals = np.concatenate([vals, vals[off]])
    return sp.coo_matrix((vals, (rows, cols)), shape=(nr, nc)).tocsr()
