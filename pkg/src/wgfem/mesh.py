"""Triangulations of the unit square: construction, refinement, queries.

Meshes are immutable. All adjacency (cell->edge, edge->cell, vertex->cell)
is built explicitly at construction so that patch queries never search.
Edges are numbered lexicographically by their sorted vertex-index pair,
which fixes the assembly and smoother orderings once and for all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInputError, InvalidMeshError

MESH_FORMAT_HEADER = "wgmesh 1"


@dataclass(frozen=True)
class CellGeometry:
    """Geometric data of a single triangle.

    Attributes
    ----------
    h : float
        Cell diameter (the longest edge).
    area : float
        Triangle area (positive).
    edge_lengths : ndarray, shape (3,)
        Lengths of the local edges (v0,v1), (v1,v2), (v2,v0).
    normals : ndarray, shape (3, 2)
        Outward unit normals of the local edges, same order.
    amap : (ndarray, ndarray)
        Affine map (A, b) with x = A @ x_ref + b taking the reference
        triangle (0,0),(1,0),(0,1) onto the cell; det A = 2*area.
    centroid : ndarray, shape (2,)
    """

    h: float
    area: float
    edge_lengths: np.ndarray
    normals: np.ndarray
    amap: tuple[np.ndarray, np.ndarray]
    centroid: np.ndarray


@dataclass(frozen=True)
class Mesh:
    """A conforming triangulation of a polygonal domain.

    Vertices are (V, 2) coordinates; cells are (F, 3) vertex triples in
    counterclockwise order; edges are (E, 2) sorted vertex pairs listed in
    lexicographic order.  ``cell_edges[f, l]`` is the global index of the
    local edge (cells[f, l], cells[f, (l+1) % 3]).  ``edge_cells`` holds the
    1-2 incident cells per edge, padded with -1.

    Refined meshes keep a reference to their parent plus the maps needed by
    inter-level transfer: ``vertex_origin_edge[v]`` is the parent edge whose
    midpoint became vertex v (-1 for inherited vertices) and
    ``parent_cell[f]`` is the parent cell that was split into cell f.
    """

    vertices: np.ndarray
    cells: np.ndarray
    edges: np.ndarray
    edge_is_boundary: np.ndarray
    cell_edges: np.ndarray
    edge_cells: np.ndarray
    level: int = 0
    parent: Optional["Mesh"] = None
    vertex_origin_edge: Optional[np.ndarray] = None
    parent_cell: Optional[np.ndarray] = None
    # vertex->cell adjacency in CSR layout
    _vc_indptr: np.ndarray = field(repr=False, default=None)
    _vc_cells: np.ndarray = field(repr=False, default=None)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def num_cells(self) -> int:
        return self.cells.shape[0]

    def signed_areas(self) -> np.ndarray:
        p = self.vertices
        a, b, c = (p[self.cells[:, i]] for i in range(3))
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                      - (c[:, 0] - a[:, 0]) * (b[:, 1] - a[:, 1]))

    def cell_diameters(self) -> np.ndarray:
        """Diameter h_T of every cell (the longest edge)."""
        p = self.vertices
        d = np.zeros(self.num_cells)
        for l in range(3):
            a = p[self.cells[:, l]]
            b = p[self.cells[:, (l + 1) % 3]]
            d = np.maximum(d, np.hypot(*(b - a).T))
        return d

    def edge_lengths(self) -> np.ndarray:
        p = self.vertices
        vec = p[self.edges[:, 1]] - p[self.edges[:, 0]]
        return np.hypot(vec[:, 0], vec[:, 1])

    def boundary_vertices(self) -> np.ndarray:
        """Boolean mask of vertices lying on a boundary edge."""
        mask = np.zeros(self.num_vertices, dtype=bool)
        mask[self.edges[self.edge_is_boundary].ravel()] = True
        return mask

    def mesh_size(self) -> float:
        """h = max_T h_T."""
        return float(self.cell_diameters().max())


def _build_adjacency(vertices: np.ndarray, cells: np.ndarray):
    """Derive edges (lexicographic), boundary flags and all incidence maps."""
    f = cells.shape[0]
    raw = np.concatenate([
        np.sort(cells[:, [0, 1]], axis=1),
        np.sort(cells[:, [1, 2]], axis=1),
        np.sort(cells[:, [2, 0]], axis=1),
    ])
    edges, inverse, counts = np.unique(raw, axis=0, return_inverse=True,
                                       return_counts=True)
    if counts.max() > 2:
        raise InvalidMeshError("an edge is shared by more than two cells")
    cell_edges = inverse.reshape(3, f).T.copy()
    edge_is_boundary = counts == 1

    edge_cells = np.full((edges.shape[0], 2), -1, dtype=np.int64)
    slot = np.zeros(edges.shape[0], dtype=np.int64)
    for l in range(3):
        for c in range(f):
            e = cell_edges[c, l]
            edge_cells[e, slot[e]] = c
            slot[e] += 1

    order = np.argsort(cells.ravel(), kind="stable")
    vc_cells = order // 3
    vc_indptr = np.zeros(vertices.shape[0] + 1, dtype=np.int64)
    np.add.at(vc_indptr[1:], cells.ravel(), 1)
    vc_indptr = np.cumsum(vc_indptr)
    return edges, edge_is_boundary, cell_edges, edge_cells, vc_indptr, vc_cells


def _finish_mesh(vertices, cells, level=0, parent=None,
                 vertex_origin_edge=None, parent_cell=None) -> Mesh:
    vertices = np.ascontiguousarray(vertices, dtype=np.float64)
    cells = np.ascontiguousarray(cells, dtype=np.int64)
    (edges, edge_is_boundary, cell_edges, edge_cells,
     vc_indptr, vc_cells) = _build_adjacency(vertices, cells)
    mesh = Mesh(vertices, cells, edges, edge_is_boundary, cell_edges,
                edge_cells, level, parent, vertex_origin_edge, parent_cell,
                vc_indptr, vc_cells)
    areas = mesh.signed_areas()
    if np.any(areas <= 0):
        bad = int(np.argmin(areas))
        raise InvalidMeshError(
            f"cell {bad} has nonpositive signed area {areas[bad]:g}")
    v, e, f = mesh.num_vertices, mesh.num_edges, mesh.num_cells
    if v - e + f != 1:
        raise InvalidMeshError(f"Euler relation violated: {v}-{e}+{f} != 1")
    for arr in (mesh.vertices, mesh.cells, mesh.edges, mesh.edge_is_boundary,
                mesh.cell_edges, mesh.edge_cells):
        arr.setflags(write=False)
    return mesh


def build_initial_mesh(pattern: str, n: int = 1) -> Mesh:
    """Build a level-0 triangulation of the unit square.

    Parameters
    ----------
    pattern : {"two-triangle", "criss-cross"}
        "two-triangle" splits the square by one diagonal; "criss-cross"
        tiles it with an n-by-n grid of squares, each split into four
        triangles by both diagonals (center vertices added).
    n : int
        Grid resolution for the criss-cross pattern (>= 1); ignored by
        the two-triangle pattern.
    """
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    if pattern == "two-triangle":
        vertices = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        cells = np.array([[0, 1, 2], [0, 2, 3]])
    elif pattern == "criss-cross":
        xs = np.linspace(0.0, 1.0, n + 1)
        gx, gy = np.meshgrid(xs, xs, indexing="xy")
        grid = np.column_stack([gx.ravel(), gy.ravel()])
        # centers come after the (n+1)^2 grid vertices, row-major by square
        half = 0.5 / n
        cx, cy = np.meshgrid(xs[:-1] + half, xs[:-1] + half, indexing="xy")
        centers = np.column_stack([cx.ravel(), cy.ravel()])
        vertices = np.vstack([grid, centers])
        cells = []
        for j in range(n):
            for i in range(n):
                bl = j * (n + 1) + i
                br = bl + 1
                tl = bl + (n + 1)
                tr = tl + 1
                c = (n + 1) ** 2 + j * n + i
                cells += [[bl, br, c], [br, tr, c], [tr, tl, c], [tl, bl, c]]
        cells = np.array(cells)
    else:
        raise InvalidInputError(f"unknown mesh pattern {pattern!r}")
    return _finish_mesh(vertices, cells)


def refine_uniform(mesh: Mesh) -> Mesh:
    """Split every triangle into four by connecting the edge midpoints.

    The children of cell f are cells 4f..4f+3 (three corner triangles then
    the medial one).  New vertices are appended in edge order, so the
    midpoint of parent edge e is vertex V_parent + e.
    """
    v0 = mesh.num_vertices
    mids = 0.5 * (mesh.vertices[mesh.edges[:, 0]]
                  + mesh.vertices[mesh.edges[:, 1]])
    vertices = np.vstack([mesh.vertices, mids])

    a, b, c = mesh.cells[:, 0], mesh.cells[:, 1], mesh.cells[:, 2]
    mab = v0 + mesh.cell_edges[:, 0]
    mbc = v0 + mesh.cell_edges[:, 1]
    mca = v0 + mesh.cell_edges[:, 2]
    children = np.stack([
        np.column_stack([a, mab, mca]),
        np.column_stack([mab, b, mbc]),
        np.column_stack([mca, mbc, c]),
        np.column_stack([mab, mbc, mca]),
    ], axis=1)  # (F, 4, 3)
    cells = children.reshape(-1, 3)

    vertex_origin_edge = np.concatenate([
        np.full(v0, -1, dtype=np.int64),
        np.arange(mesh.num_edges, dtype=np.int64),
    ])
    parent_cell = np.repeat(np.arange(mesh.num_cells, dtype=np.int64), 4)
    return _finish_mesh(vertices, cells, level=mesh.level + 1, parent=mesh,
                        vertex_origin_edge=vertex_origin_edge,
                        parent_cell=parent_cell)


def build_hierarchy(pattern: str, n: int, levels: int) -> list[Mesh]:
    """Level-0 mesh plus `levels` uniform refinements."""
    meshes = [build_initial_mesh(pattern, n)]
    for _ in range(levels):
        meshes.append(refine_uniform(meshes[-1]))
    return meshes


def cell_geometry(mesh: Mesh, cell: int) -> CellGeometry:
    """Geometric record of one cell; raises on degenerate geometry."""
    tri = mesh.vertices[mesh.cells[cell]]
    e = np.array([tri[1] - tri[0], tri[2] - tri[1], tri[0] - tri[2]])
    lengths = np.hypot(e[:, 0], e[:, 1])
    det = e[0, 0] * (-e[2, 1]) - (-e[2, 0]) * e[0, 1]
    area = 0.5 * det
    if area <= 0:
        raise InvalidMeshError(f"cell {cell} has nonpositive area {area:g}")
    # CCW traversal: outward normal is the edge vector rotated by -90 deg
    normals = np.column_stack([e[:, 1], -e[:, 0]]) / lengths[:, None]
    amap = (np.column_stack([tri[1] - tri[0], tri[2] - tri[0]]), tri[0].copy())
    return CellGeometry(
        h=float(lengths.max()),
        area=float(area),
        edge_lengths=lengths,
        normals=normals,
        amap=amap,
        centroid=tri.mean(axis=0),
    )


def vertex_patch(mesh: Mesh, vertex: int) -> np.ndarray:
    """Indices of all cells having `vertex` as a corner (sorted)."""
    lo, hi = mesh._vc_indptr[vertex], mesh._vc_indptr[vertex + 1]
    return np.sort(mesh._vc_cells[lo:hi])


def quasi_uniformity_ratio(mesh: Mesh) -> float:
    d = mesh.cell_diameters()
    return float(d.max() / d.min())


def write_mesh(mesh: Mesh, path: str) -> None:
    """Write the plain-text format: `wgmesh 1 V E F`, vertices, edges, cells."""
    lines = [f"{MESH_FORMAT_HEADER} {mesh.num_vertices} {mesh.num_edges} "
             f"{mesh.num_cells}"]
    for x, y in mesh.vertices.tolist():
        lines.append(f"{x!r} {y!r}")
    for (a, b), bnd in zip(mesh.edges, mesh.edge_is_boundary):
        lines.append(f"{a} {b} {int(bnd)}")
    for a, b, c in mesh.cells:
        lines.append(f"{a} {b} {c}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path: str) -> Mesh:
    """Read the plain-text format written by `write_mesh`.

    Adjacency is rebuilt from vertices and cells; the edge section of the
    file is checked against the rebuilt one so that corrupt files fail
    loudly instead of being silently renumbered.
    """
    with open(path) as fh:
        tokens = fh.read().split("\n")
    header = tokens[0].split()
    if " ".join(header[:2]) != MESH_FORMAT_HEADER or len(header) != 5:
        raise InvalidMeshError(f"bad mesh header: {tokens[0]!r}")
    nv, ne, nf = (int(t) for t in header[2:])
    rows = [line.split() for line in tokens[1:] if line.strip()]
    if len(rows) != nv + ne + nf:
        raise InvalidMeshError("mesh file length does not match its header")
    vertices = np.array([[float(r[0]), float(r[1])] for r in rows[:nv]])
    file_edges = np.array([[int(r[0]), int(r[1]), int(r[2])]
                           for r in rows[nv:nv + ne]], dtype=np.int64)
    cells = np.array([[int(r[0]), int(r[1]), int(r[2])]
                      for r in rows[nv + ne:]], dtype=np.int64)
    mesh = _finish_mesh(vertices, cells)
    rebuilt = np.column_stack([mesh.edges,
                               mesh.edge_is_boundary.astype(np.int64)])
    if mesh.num_edges != ne or not np.array_equal(rebuilt, file_edges):
        raise InvalidMeshError("edge table in file disagrees with cells")
    return mesh


@dataclass(frozen=True)
class CoefficientField:
    """Per-cell constant SPD tensor, stored as rows (a11, a12, a22)."""

    tensors: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(self.tensors, dtype=np.float64)
        object.__setattr__(self, "tensors", t)
        if t.ndim != 2 or t.shape[1] != 3:
            raise InvalidInputError("coefficient field must be (F, 3)")
        dets = t[:, 0] * t[:, 2] - t[:, 1] ** 2
        if np.any(t[:, 0] <= 0) or np.any(dets <= 0):
            raise InvalidInputError("coefficient tensor is not SPD")

    @staticmethod
    def identity(mesh: Mesh) -> "CoefficientField":
        t = np.zeros((mesh.num_cells, 3))
        t[:, 0] = t[:, 2] = 1.0
        return CoefficientField(t)

    @staticmethod
    def constant(mesh: Mesh, a11: float, a12: float, a22: float) -> "CoefficientField":
        t = np.tile(np.array([a11, a12, a22], dtype=np.float64),
                    (mesh.num_cells, 1))
        return CoefficientField(t)

    def matrix(self, cell: int) -> np.ndarray:
        a11, a12, a22 = self.tensors[cell]
        return np.array([[a11, a12], [a12, a22]])

    def scaled(self, s: float) -> "CoefficientField":
        return CoefficientField(self.tensors * s)
