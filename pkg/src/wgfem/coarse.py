"""Conforming P1 space on the same mesh, the prolongation into the
discontinuous (cell, face) space, the vertex-averaging map back, and the
inter-level transfer of the nested P1 hierarchy.

The prolongation takes a P1 coefficient vector (values at interior
vertices) to the pair (cell means, edge traces).  Its key algebraic
property, relied on by the coarse correction, is that the weak gradient
of a prolonged function equals the ordinary gradient, so the Galerkin
product with the prolongation reproduces the P1 stiffness matrix exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InvalidInputError
from .fespace import DofMap, SpaceConfig
from .mesh import CoefficientField, Mesh, cell_geometry, vertex_patch
from .weakgrad import cell_mean_row

_REF_GRADS = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class P1Space:
    """Interior-vertex dof numbering of the conforming P1 space."""

    num_dofs: int
    vertex_dof: np.ndarray  # (V,) dof index per vertex, -1 on the boundary

    @property
    def interior_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.vertex_dof >= 0)


@dataclass(frozen=True)
class Prolongation:
    """Sparse map from P1 coefficients to (cell, face) coefficients."""

    matrix: sp.csr_matrix
    space: P1Space


def build_p1_space(mesh: Mesh) -> P1Space:
    interior = ~mesh.boundary_vertices()
    vertex_dof = np.full(mesh.num_vertices, -1, dtype=np.int64)
    vertex_dof[interior] = np.arange(int(interior.sum()))
    return P1Space(num_dofs=int(interior.sum()), vertex_dof=vertex_dof)


def build_prolongation(mesh: Mesh, dofmap: DofMap,
                       config: SpaceConfig) -> Prolongation:
    """Local L2 projections of each interior hat function.

    Cell rows: the mean of a hat over a triangle having it as a corner is
    exactly 1/3.  Face rows: the trace of a hat on an edge is linear, so
    for linear face unknowns the projection is interpolation (weight 1 at
    the matching endpoint) and for constant face unknowns it is the edge
    mean (weight 1/2 per endpoint).
    """
    space = build_p1_space(mesh)
    rows, cols, vals = [], [], []
    for cell in range(mesh.num_cells):
        for v in mesh.cells[cell]:
            dof = space.vertex_dof[v]
            if dof >= 0:
                rows.append(cell)
                cols.append(dof)
                vals.append(1.0 / 3.0)
    mface = config.dim_face
    for edge in range(mesh.num_edges):
        start = dofmap.face_dof_start(edge)
        if start < 0:
            continue
        for j, v in enumerate(mesh.edges[edge]):  # endpoints in global order
            dof = space.vertex_dof[v]
            if dof < 0:
                continue
            if config.degree == 0:
                rows.append(start)
                cols.append(dof)
                vals.append(0.5)
            else:
                rows.append(start + j)
                cols.append(dof)
                vals.append(1.0)
    mat = sp.coo_matrix((vals, (rows, cols)),
                        shape=(dofmap.num_total, space.num_dofs)).tocsr()
    mat.sort_indices()
    return Prolongation(matrix=mat, space=space)


def _p1_local_stiffness(mesh: Mesh, cell: int, a_mat: np.ndarray) -> np.ndarray:
    geom = cell_geometry(mesh, cell)
    amap, _ = geom.amap
    grads = _REF_GRADS @ np.linalg.inv(amap)
    return geom.area * grads @ a_mat @ grads.T


def assemble_p1_stiffness(mesh: Mesh, a: CoefficientField) -> sp.csr_matrix:
    """Conforming P1 stiffness with Dirichlet rows and columns removed."""
    if a.tensors.shape[0] != mesh.num_cells:
        raise InvalidInputError("coefficient field does not match the mesh")
    space = build_p1_space(mesh)
    rows, cols, vals = [], [], []
    for cell in range(mesh.num_cells):
        k = _p1_local_stiffness(mesh, cell, a.matrix(cell))
        dofs = space.vertex_dof[mesh.cells[cell]]
        keep = np.flatnonzero(dofs >= 0)
        kept = dofs[keep]
        rows.append(np.repeat(kept, kept.size))
        cols.append(np.tile(kept, kept.size))
        vals.append(k[np.ix_(keep, keep)].ravel())
    n = space.num_dofs
    out = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n)).tocsr()
    out.sum_duplicates()
    out.sort_indices()
    return out


def galerkin_coarse(a: sp.spmatrix, p: Prolongation) -> sp.csr_matrix:
    """Coarse operator P^T A P."""
    mat = p.matrix
    if a.shape[1] != mat.shape[0]:
        raise InvalidInputError(
            f"matrix of size {a.shape} does not match prolongation "
            f"with {mat.shape[0]} rows")
    return (mat.T @ (a @ mat)).tocsr()


def build_vertex_average(mesh: Mesh, dofmap: DofMap,
                         config: SpaceConfig) -> sp.csr_matrix:
    """Averaging map from face coefficients to P1 coefficients.

    The value at an interior vertex is the arithmetic mean, over the cells
    of its patch, of the cell's face-mean functional; boundary-edge slots
    contribute zero (their trace is pinned).
    """
    space = build_p1_space(mesh)
    mean_row = cell_mean_row(config)
    rows, cols, vals = [], [], []
    for v in space.interior_vertices:
        dof = space.vertex_dof[v]
        patch = vertex_patch(mesh, v)
        scale = 1.0 / patch.size
        for cell in patch:
            face_dofs = dofmap.cell_dofs(mesh, cell)[1:] - dofmap.num_interior
            for j, fd in enumerate(face_dofs):
                if fd < 0:
                    continue
                rows.append(dof)
                cols.append(fd)
                vals.append(scale * mean_row[j])
    out = sp.coo_matrix((vals, (rows, cols)),
                        shape=(space.num_dofs, dofmap.num_face)).tocsr()
    out.sum_duplicates()
    out.sort_indices()
    return out


def build_p1_interlevel(fine: Mesh) -> sp.csr_matrix:
    """P1 interpolation from the parent mesh's interior vertices to the
    fine mesh's interior vertices (used by the nested V-cycle)."""
    if fine.parent is None or fine.vertex_origin_edge is None:
        raise InvalidInputError("mesh has no refinement history")
    coarse = fine.parent
    fine_space = build_p1_space(fine)
    coarse_space = build_p1_space(coarse)
    rows, cols, vals = [], [], []
    for v in fine_space.interior_vertices:
        fdof = fine_space.vertex_dof[v]
        if v < coarse.num_vertices:
            cdof = coarse_space.vertex_dof[v]
            if cdof >= 0:
                rows.append(fdof)
                cols.append(cdof)
                vals.append(1.0)
        else:
            # a P1 function is linear along the parent edge, so its value
            # at the midpoint is the endpoint average
            e = fine.vertex_origin_edge[v]
            for w in coarse.edges[e]:
                cdof = coarse_space.vertex_dof[w]
                if cdof >= 0:
                    rows.append(fdof)
                    cols.append(cdof)
                    vals.append(0.5)
    out = sp.coo_matrix(
        (vals, (rows, cols)),
        shape=(fine_space.num_dofs, coarse_space.num_dofs)).tocsr()
    out.sort_indices()
    return out
