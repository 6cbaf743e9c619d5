"""Discrete spaces, degrees of freedom and quadrature.

Two families are supported, both with piecewise-constant interior unknowns:

* type1 (k=0): constant face unknowns, gradient space spanned by
  {(1,0), (0,1), x} on each cell (dimension 3, one nonzero divergence);
* type2 (k=1): linear face unknowns, gradient space [P1]^2 (dimension 6).

Face unknowns live on interior edges only; the homogeneous boundary
condition is imposed by dropping boundary-edge unknowns entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (InvalidInputError, UnsupportedConfigError,
                     UnsupportedDegreeError)
from .mesh import Mesh

FAMILIES = ("type1", "type2")


@dataclass(frozen=True)
class SpaceConfig:
    """Which discrete family is in play, plus its fixed dimensions."""

    family: str

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedConfigError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}")

    @property
    def degree(self) -> int:
        """Polynomial degree k of the face unknowns."""
        return 0 if self.family == "type1" else 1

    @property
    def dim_interior(self) -> int:
        return 1

    @property
    def dim_face(self) -> int:
        """Face unknowns per edge."""
        return self.degree + 1

    @property
    def dim_gradient(self) -> int:
        return 3 if self.family == "type1" else 6


def reference_basis(config: SpaceConfig) -> dict:
    """Reference-cell descriptions of the three local spaces.

    Returns a dict with:

    * "interior": exponent rows (a, b) of the monomials x^a y^b spanning
      the interior space on the reference triangle;
    * "gradient": rows (component, a, b) describing vector monomials
      x^a y^b e_component spanning the gradient space, plus one extra row
      per non-monomial member (type1 carries the field (x, y) as the pair
      of rows ((0,1,0),(1,0,1)) tagged together via "gradient_groups");
    * "gradient_divergence": divergence of each gradient basis member,
      constant on the cell;
    * "face": exponent of each face monomial t^a on the reference edge
      [0, 1], and "face_gram" its exact mass matrix.
    """
    interior = np.array([[0, 0]])
    if config.family == "type1":
        gradient = np.array([
            [0, 0, 0],   # (1, 0)
            [1, 0, 0],   # (0, 1)
            [0, 1, 0],   # x-component of (x, y)
            [1, 0, 1],   # y-component of (x, y)
        ])
        gradient_groups = [(0,), (1,), (2, 3)]
        gradient_divergence = np.array([0.0, 0.0, 2.0])
    else:
        gradient = np.array([
            [0, 0, 0], [0, 1, 0], [0, 0, 1],
            [1, 0, 0], [1, 1, 0], [1, 0, 1],
        ])
        gradient_groups = [(i,) for i in range(6)]
        gradient_divergence = np.array([0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
    face = np.arange(config.dim_face)
    if config.degree == 0:
        face_gram = np.array([[1.0]])
    else:
        face_gram = np.array([[1.0, 0.5], [0.5, 1.0 / 3.0]])
    return {
        "interior": interior,
        "gradient": gradient,
        "gradient_groups": gradient_groups,
        "gradient_divergence": gradient_divergence,
        "face": face,
        "face_gram": face_gram,
    }


@dataclass(frozen=True)
class DofMap:
    """Global numbering: all cell unknowns first, then face unknowns.

    Cell unknown of cell f is dof f.  Interior edges, taken in increasing
    edge index, each contribute ``dim_face`` consecutive dofs starting at
    ``num_interior``.  Boundary edges carry no dofs (their trace is pinned
    to zero); lookups there yield -1.
    """

    config: SpaceConfig
    num_interior: int
    num_face: int
    edge_rank: np.ndarray  # (E,) rank among interior edges, -1 on boundary

    @property
    def num_total(self) -> int:
        return self.num_interior + self.num_face

    def face_dof_start(self, edge: int) -> int:
        """First global dof of an interior edge, or -1 for a boundary edge."""
        r = self.edge_rank[edge]
        if r < 0:
            return -1
        return self.num_interior + self.config.dim_face * int(r)

    def cell_dofs(self, mesh: Mesh, cell: int) -> np.ndarray:
        """Global dofs of the local stiffness row order.

        Order: the cell unknown, then for each local edge l = 0, 1, 2 the
        dim_face unknowns of that edge in global edge orientation (pinned
        boundary slots are -1).
        """
        if mesh.num_edges != len(self.edge_rank):
            raise InvalidInputError(
                "dof map was built for a different mesh")
        m = self.config.dim_face
        out = np.empty(1 + 3 * m, dtype=np.int64)
        out[0] = cell
        for l in range(3):
            start = self.face_dof_start(mesh.cell_edges[cell, l])
            for j in range(m):
                out[1 + l * m + j] = -1 if start < 0 else start + j
        return out


def build_dofmap(mesh: Mesh, config: SpaceConfig) -> DofMap:
    interior_mask = ~mesh.edge_is_boundary
    edge_rank = np.full(mesh.num_edges, -1, dtype=np.int64)
    edge_rank[interior_mask] = np.arange(int(interior_mask.sum()))
    return DofMap(
        config=config,
        num_interior=mesh.num_cells,
        num_face=config.dim_face * int(interior_mask.sum()),
        edge_rank=edge_rank,
    )


def make_space(mesh: Mesh, config: SpaceConfig) -> DofMap:
    """Synonym for :func:`build_dofmap`."""
    return build_dofmap(mesh, config)


@dataclass(frozen=True)
class QuadratureRule:
    """Points and weights on a reference domain."""

    points: np.ndarray
    weights: np.ndarray
    degree: int


# Barycentric data for the symmetric triangle rules.  Weights are relative
# to a triangle of unit area; the reference triangle has area 1/2.
_SQRT15 = np.sqrt(15.0)
_TRI_RULES = {
    1: ([(1 / 3, 1 / 3, 1 / 3)], [1.0]),
    2: ([(2 / 3, 1 / 6, 1 / 6), (1 / 6, 2 / 3, 1 / 6), (1 / 6, 1 / 6, 2 / 3)],
        [1 / 3, 1 / 3, 1 / 3]),
    4: ([  # two symmetric orbits of three points each
        (0.108103018168070, 0.445948490915965, 0.445948490915965),
        (0.445948490915965, 0.108103018168070, 0.445948490915965),
        (0.445948490915965, 0.445948490915965, 0.108103018168070),
        (0.816847572980459, 0.091576213509771, 0.091576213509771),
        (0.091576213509771, 0.816847572980459, 0.091576213509771),
        (0.091576213509771, 0.091576213509771, 0.816847572980459),
    ], [0.223381589678011] * 3 + [0.109951743655322] * 3),
    5: ([
        (1 / 3, 1 / 3, 1 / 3),
        ((9 + 2 * _SQRT15) / 21, (6 - _SQRT15) / 21, (6 - _SQRT15) / 21),
        ((6 - _SQRT15) / 21, (9 + 2 * _SQRT15) / 21, (6 - _SQRT15) / 21),
        ((6 - _SQRT15) / 21, (6 - _SQRT15) / 21, (9 + 2 * _SQRT15) / 21),
        ((9 - 2 * _SQRT15) / 21, (6 + _SQRT15) / 21, (6 + _SQRT15) / 21),
        ((6 + _SQRT15) / 21, (9 - 2 * _SQRT15) / 21, (6 + _SQRT15) / 21),
        ((6 + _SQRT15) / 21, (6 + _SQRT15) / 21, (9 - 2 * _SQRT15) / 21),
    ], [9 / 40] + [(155 - _SQRT15) / 1200] * 3 + [(155 + _SQRT15) / 1200] * 3),
    6: ([
        (0.873821971016996, 0.063089014491502, 0.063089014491502),
        (0.063089014491502, 0.873821971016996, 0.063089014491502),
        (0.063089014491502, 0.063089014491502, 0.873821971016996),
        (0.501426509658179, 0.249286745170910, 0.249286745170911),
        (0.249286745170910, 0.501426509658179, 0.249286745170911),
        (0.249286745170910, 0.249286745170910, 0.501426509658180),
        (0.636502499121399, 0.310352451033785, 0.053145049844816),
        (0.636502499121399, 0.053145049844816, 0.310352451033785),
        (0.310352451033785, 0.636502499121399, 0.053145049844816),
        (0.310352451033785, 0.053145049844816, 0.636502499121399),
        (0.053145049844816, 0.636502499121399, 0.310352451033785),
        (0.053145049844816, 0.310352451033785, 0.636502499121399),
    ], [0.050844906370207] * 3 + [0.116786275726379] * 3
       + [0.082851075618374] * 6),
}


def triangle_rule(degree: int) -> QuadratureRule:
    """Quadrature on the reference triangle (0,0), (1,0), (0,1).

    Exact for polynomials up to `degree`; weights sum to the reference
    area 1/2.  Degrees above 6 are not provided.
    """
    if degree < 0 or degree > 6:
        raise UnsupportedDegreeError(
            f"triangle quadrature degree {degree} outside 0..6")
    key = {0: 1, 1: 1, 2: 2, 3: 4, 4: 4, 5: 5, 6: 6}[degree]
    bary, rel_w = _TRI_RULES[key]
    bary = np.asarray(bary)
    points = bary[:, 1:3]  # (lambda1, lambda2) are the reference coordinates
    weights = 0.5 * np.asarray(rel_w)
    return QuadratureRule(points=points, weights=weights, degree=degree)


def edge_rule(degree: int) -> QuadratureRule:
    """Gauss rule on the reference edge [0, 1], exact up to `degree`."""
    if degree < 0 or degree > 6:
        raise UnsupportedDegreeError(
            f"edge quadrature degree {degree} outside 0..6")
    npts = max(1, (degree + 2) // 2)
    x, w = np.polynomial.legendre.leggauss(npts)
    return QuadratureRule(points=0.5 * (x + 1.0), weights=0.5 * w,
                          degree=degree)


def face_basis_values(config: SpaceConfig, t: np.ndarray) -> np.ndarray:
    """Values of the nodal face basis at parameters t along the edge.

    The parameter runs 0 -> 1 from the lower-numbered to the higher-numbered
    endpoint of the (global) edge.  For k=0 the single function is 1; for
    k=1 the two functions are the endpoint hats 1-t and t.

    Returns an array of shape (dim_face, len(t)).
    """
    t = np.asarray(t, dtype=np.float64)
    if config.degree == 0:
        return np.ones((1, t.size))
    return np.vstack([1.0 - t, t])

def quadrature(degree: int, domain: str = "triangle") -> QuadratureRule:
    """Quadrature rule of the requested exactness on a reference domain.

    `domain` is "triangle" (the unit right simplex) or "edge" (the unit
    interval); dispatches to :func:`triangle_rule` / :func:`edge_rule`.
    """
    if domain == "triangle":
        return triangle_rule(degree)
    if domain == "edge":
        return edge_rule(degree)
    raise InvalidInputError(f"unknown quadrature domain {domain!r}")
