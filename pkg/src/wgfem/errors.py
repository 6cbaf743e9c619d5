"""Exception types shared across the library."""


class WgfemError(Exception):
    """Base class for all library errors."""


class InvalidMeshError(WgfemError):
    """The mesh (or a queried cell) violates a geometric invariant."""


class UnsupportedConfigError(WgfemError):
    """The (family, degree) pair is not one of the supported elements."""


class UnsupportedDegreeError(WgfemError):
    """No quadrature rule of the requested exactness degree is tabulated."""


class InternalConsistencyError(WgfemError):
    """A quantity that is well defined by construction came out degenerate."""


class InvalidMatrixError(WgfemError):
    """A matrix fails a structural requirement (e.g. zero diagonal entry)."""


class InvalidInputError(WgfemError):
    """An input matrix/field is not SPD or otherwise outside the contract."""


class PreconditionerDefectError(WgfemError):
    """The measured contraction number is >= 1: the preconditioner is broken."""
