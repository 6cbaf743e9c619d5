"""Weak Galerkin discretization of the Dirichlet diffusion problem with
two-level and multilevel preconditioned stationary solvers."""

from .assemble import (BlockSystem, HybridSystem, assemble_gram,
                       assemble_hybrid, assemble_load, assemble_system,
                       read_matrix_market, schur_check, write_matrix_market)
from .coarse import (P1Space, Prolongation, assemble_p1_stiffness,
                     build_p1_interlevel, build_prolongation,
                     build_vertex_average, galerkin_coarse)
from .errors import (InternalConsistencyError, InvalidInputError,
                     InvalidMatrixError, InvalidMeshError,
                     PreconditionerDefectError, UnsupportedConfigError,
                     UnsupportedDegreeError, WgfemError)
from .fespace import (FAMILIES, DofMap, QuadratureRule, SpaceConfig,
                      build_dofmap, edge_rule, make_space, quadrature,
                      reference_basis, triangle_rule)
from .mesh import (CellGeometry, CoefficientField, Mesh, build_hierarchy,
                   build_initial_mesh, cell_geometry,
                   quasi_uniformity_ratio, read_mesh, refine_uniform,
                   vertex_patch, write_mesh)
from .solve import (CoarseSolver, CoarseSolverSpec, IterationReport,
                    PreparedSmoother, SmootherSpec, TwoLevelPreconditioner,
                    apply_preconditioner, estimate_contraction,
                    estimate_lambda_max_ba, smoother_apply, stationary_solve,
                    vcycle_coarse)
from .spectral import SpectrumReport, condition_study, extreme_eigs
from .sweeps import BACKEND, SweepOperator
from .weakgrad import (LocalNorms, LocalWeakGradient, cell_mean,
                       local_norms, local_weak_gradient)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "FAMILIES", "BlockSystem", "CellGeometry", "CoarseSolver",
    "CoarseSolverSpec", "CoefficientField", "DofMap", "HybridSystem",
    "InternalConsistencyError", "InvalidInputError", "InvalidMatrixError",
    "InvalidMeshError", "IterationReport", "LocalNorms",
    "LocalWeakGradient", "Mesh", "P1Space", "PreconditionerDefectError",
    "PreparedSmoother", "Prolongation", "QuadratureRule", "SmootherSpec",
    "SpaceConfig", "SpectrumReport", "SweepOperator",
    "TwoLevelPreconditioner", "UnsupportedConfigError",
    "UnsupportedDegreeError", "WgfemError", "apply_preconditioner",
    "assemble_gram", "assemble_hybrid", "assemble_load",
    "assemble_p1_stiffness", "assemble_system", "build_dofmap",
    "build_hierarchy", "build_initial_mesh", "build_p1_interlevel",
    "build_prolongation", "build_vertex_average", "cell_geometry",
    "cell_mean", "condition_study", "edge_rule", "estimate_contraction",
    "estimate_lambda_max_ba", "extreme_eigs", "galerkin_coarse",
    "local_norms", "local_weak_gradient", "make_space", "quadrature",
    "quasi_uniformity_ratio", "read_matrix_market", "read_mesh",
    "reference_basis", "refine_uniform", "schur_check", "smoother_apply",
    "stationary_solve", "sweeps", "triangle_rule", "vcycle_coarse",
    "vertex_patch", "write_matrix_market", "write_mesh",
]
