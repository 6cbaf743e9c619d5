"""Smoothers, the two-level preconditioner, the stationary iteration and
the contraction-number estimator.

The preconditioner applies four steps to a residual vector b:

    1. z  = S b                       (smoother)
    2. z += P C P^T (b - A z)         (coarse correction)
    3. z += P C P^T (b - A z)         (adjoint coarse correction)
    4. z += S (b - A z)               (adjoint smoother)

where S is the m-fold symmetric Gauss-Seidel (or damped Richardson)
approximate solve and C an approximate inverse of the P1 coarse matrix
(direct factorization, or one symmetric V-cycle on the nested hierarchy).
S and C are symmetric matrices here, so the adjoint steps repeat the
forward ones and the composite B is symmetric with spectrum of B A inside
(0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import InvalidInputError, PreconditionerDefectError
from .sweeps import SweepOperator

SMOOTHER_KINDS = ("sgs", "richardson")
COARSE_KINDS = ("exact", "vcycle")


@dataclass(frozen=True)
class SmootherSpec:
    """Smoother choice: kind in {sgs, richardson}, m >= 1 applications."""

    kind: str
    sweeps: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SMOOTHER_KINDS:
            raise InvalidInputError(
                f"unknown smoother {self.kind!r}; expected {SMOOTHER_KINDS}")
        if self.sweeps < 1:
            raise InvalidInputError("smoother sweep count must be >= 1")


@dataclass(frozen=True)
class CoarseSolverSpec:
    """Coarse solve choice: exact factorization, or one V-cycle sweep on
    the nested P1 hierarchy with `sweeps` pre/post smoothing steps."""

    kind: str
    sweeps: int = 1

    def __post_init__(self):
        if self.kind not in COARSE_KINDS:
            raise InvalidInputError(
                f"unknown coarse solver {self.kind!r}; expected "
                f"{COARSE_KINDS}")
        if self.sweeps < 1:
            raise InvalidInputError("coarse sweep count must be >= 1")


def certified_lambda_max(a: sp.spmatrix, seed: int = 0, steps: int = 30,
                         safety: float = 1.05) -> float:
    """Upper estimate of the largest eigenvalue of an SPD matrix.

    Thirty power-iteration steps give the dominant Rayleigh quotient from
    below; the safety factor turns it into a practical upper bound so that
    the damped Richardson spectrum stays inside (0, 1].
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(a.shape[0])
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(steps):
        y = a @ x
        lam = float(x @ y)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
    return safety * lam


class PreparedSmoother:
    """A smoother bound to a matrix; `apply(b)` approximates A^{-1} b.

    Both kinds are symmetric matrices, so the adjoint application equals
    the forward one.
    """

    def __init__(self, spec: SmootherSpec, a: sp.spmatrix):
        self.spec = spec
        self.a = sp.csr_matrix(a)
        if spec.kind == "sgs":
            self._op = SweepOperator(self.a)
            self.damping = None
        else:
            self._op = None
            self.damping = 1.0 / certified_lambda_max(self.a, seed=spec.seed)

    def apply(self, b: np.ndarray) -> np.ndarray:
        if self._op is not None:
            return self._op.symmetric_apply(b, self.spec.sweeps)
        z = self.damping * b
        for _ in range(self.spec.sweeps - 1):
            z += self.damping * (b - self.a @ z)
        return z


def smoother_apply(spec: SmootherSpec, a: sp.spmatrix,
                   r: np.ndarray) -> np.ndarray:
    """One-shot functional form of the smoother (prepares, then applies)."""
    return PreparedSmoother(spec, a).apply(np.asarray(r, dtype=np.float64))


class CoarseSolver:
    """Approximate inverse of the coarse P1 matrix.

    For the exact kind, a sparse LU factorization.  For the vcycle kind,
    one symmetric V(m, m) cycle over the supplied nested hierarchy
    (coarsest first), with the coarsest level solved directly.  Both are
    symmetric positive definite as operators.
    """

    def __init__(self, spec: CoarseSolverSpec, a_coarse: sp.spmatrix,
                 hierarchy: Optional[list[sp.spmatrix]] = None,
                 transfers: Optional[list[sp.spmatrix]] = None):
        self.spec = spec
        if spec.kind == "exact":
            self._lu = splu(sp.csc_matrix(a_coarse))
            return
        if hierarchy is None or transfers is None:
            raise InvalidInputError(
                "vcycle coarse solver needs the nested hierarchy")
        if len(transfers) != len(hierarchy) - 1:
            raise InvalidInputError(
                f"{len(hierarchy)} levels need {len(hierarchy) - 1} "
                f"transfers, got {len(transfers)}")
        if hierarchy[-1].shape != a_coarse.shape:
            raise InvalidInputError(
                "finest hierarchy level disagrees with the coarse matrix")
        d = (hierarchy[-1] - a_coarse)
        if d.nnz and np.abs(d.data).max() > 1e-12 * np.abs(a_coarse.data).max():
            raise InvalidInputError(
                "finest hierarchy level disagrees with the coarse matrix")
        self._mats = [sp.csr_matrix(m) for m in hierarchy]
        self._transfers = [sp.csr_matrix(t) for t in transfers]
        self._lu = splu(sp.csc_matrix(self._mats[0]))
        self._smoothers = [None] + [SweepOperator(m) for m in self._mats[1:]]

    def apply(self, r: np.ndarray) -> np.ndarray:
        if self.spec.kind == "exact":
            return self._lu.solve(r)
        return self._vcycle(len(self._mats) - 1, r)

    def _vcycle(self, level: int, r: np.ndarray) -> np.ndarray:
        if level == 0:
            return self._lu.solve(r)
        a = self._mats[level]
        op = self._smoothers[level]
        m = self.spec.sweeps
        z = np.zeros_like(r)
        for _ in range(m):
            op.forward(z, r)
            op.backward(z, r)
        t = self._transfers[level - 1]
        z += t @ self._vcycle(level - 1, t.T @ (r - a @ z))
        for _ in range(m):
            op.forward(z, r)
            op.backward(z, r)
        return z


def vcycle_coarse(hierarchy: list[sp.spmatrix], transfers: list[sp.spmatrix],
                  sweeps: int, r: np.ndarray) -> np.ndarray:
    """One V(m, m) cycle for the finest hierarchy matrix applied to r."""
    spec = CoarseSolverSpec(kind="vcycle", sweeps=sweeps)
    solver = CoarseSolver(spec, hierarchy[-1], hierarchy, transfers)
    return solver.apply(np.asarray(r, dtype=np.float64))


class TwoLevelPreconditioner:
    """The four-step preconditioner; symmetric, with sigma(BA) in (0, 1]."""

    def __init__(self, a: sp.spmatrix, p: sp.spmatrix,
                 coarse: CoarseSolver, smoother: PreparedSmoother):
        self.a = sp.csr_matrix(a)
        self.p = sp.csr_matrix(p)
        if self.p.shape[0] != self.a.shape[0]:
            raise InvalidInputError(
                f"prolongation rows {self.p.shape[0]} do not match "
                f"matrix size {self.a.shape[0]}")
        self.coarse = coarse
        self.smoother = smoother

    def apply(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=np.float64)
        z = self.smoother.apply(b)
        for _ in range(2):  # coarse correction and its adjoint
            r = b - self.a @ z
            z = z + self.p @ self.coarse.apply(self.p.T @ r)
        z = z + self.smoother.apply(b - self.a @ z)
        return z

    def matrix(self) -> np.ndarray:
        """Dense B (columns B e_i); for small validation problems only."""
        n = self.a.shape[0]
        cols = [self.apply(col) for col in np.eye(n)]
        return np.column_stack(cols)


def apply_preconditioner(a: sp.spmatrix, p: sp.spmatrix,
                         coarse: CoarseSolver, smoother: PreparedSmoother,
                         b: np.ndarray) -> np.ndarray:
    """Functional form: B b for the two-level preconditioner."""
    return TwoLevelPreconditioner(a, p, coarse, smoother).apply(b)


@dataclass
class IterationReport:
    """Outcome of a stationary solve."""

    iterations: int
    converged: bool
    error_history: list = field(default_factory=list)
    reduction: float = 0.0
    avg_rate: float = 0.0

    @staticmethod
    def from_history(history: list[float], converged: bool) -> "IterationReport":
        iters = len(history) - 1
        red = history[-1] / history[0] if history[0] > 0 else 0.0
        rate = red ** (1.0 / iters) if iters > 0 else 0.0
        return IterationReport(iterations=iters, converged=converged,
                               error_history=list(history), reduction=red,
                               avg_rate=rate)


def stationary_solve(a: sp.spmatrix, b: np.ndarray,
                     precond: TwoLevelPreconditioner, x0: np.ndarray,
                     tol: float = 1e-8,
                     max_iters: int = 500) -> tuple[np.ndarray,
                                                    IterationReport]:
    """Iterate x <- x + B (b - A x) until the error norm drops by `tol`.

    With b = 0 the error is the iterate itself and the energy norm
    sqrt(x^T A x) is monitored exactly; otherwise the preconditioned
    residual norm sqrt(r^T B r) stands in for it.  Running out of
    iterations marks the report as not converged instead of raising.
    """
    a = sp.csr_matrix(a)
    x = np.array(x0, dtype=np.float64, copy=True)
    exact_mode = not np.any(b)
    b = np.asarray(b, dtype=np.float64)

    def error_norm(x: np.ndarray, r: np.ndarray) -> float:
        if exact_mode:
            return float(np.sqrt(max(x @ (a @ x), 0.0)))
        return float(np.sqrt(max(r @ precond.apply(r), 0.0)))

    r = b - a @ x
    history = [error_norm(x, r)]
    if history[0] == 0.0:
        return x, IterationReport.from_history(history, True)
    target = tol * history[0]
    converged = False
    for _ in range(max_iters):
        x += precond.apply(r)
        r = b - a @ x
        history.append(error_norm(x, r))
        if history[-1] <= target:
            converged = True
            break
    return x, IterationReport.from_history(history, converged)


def _a_normalize(a: sp.spmatrix, x: np.ndarray) -> tuple[np.ndarray, float]:
    nrm = float(np.sqrt(max(x @ (a @ x), 0.0)))
    if nrm == 0.0:
        raise InvalidInputError("probe vector lies in the matrix kernel")
    return x / nrm, nrm


def _a_lanczos_top(a: sp.csr_matrix, op, x0: np.ndarray, iters: int,
                   tol: float) -> float:
    """Largest eigenvalue of an operator self-adjoint in the A-inner
    product, by Rayleigh-Ritz-accelerated power iteration.

    Each step costs one operator application, like plain power iteration,
    but the estimate is taken from the full Krylov subspace (A-orthogonal
    Lanczos basis, fully reorthogonalized), which keeps clustered top
    eigenvalues from stalling the estimate.  On a problem of dimension n
    the value is exact after at most n steps.
    """
    basis = []
    alphas: list[float] = []
    betas: list[float] = []
    v, _ = _a_normalize(a, x0)
    top = 0.0
    for j in range(min(iters, a.shape[0])):
        basis.append(v)
        w = op(v)
        alphas.append(float(v @ (a @ w)))
        w = w - alphas[-1] * v - (betas[-1] * basis[-2] if j else 0.0)
        # full reorthogonalization in the A-inner product
        aw = a @ w
        coeffs = [float(u @ aw) for u in basis]
        for u, c in zip(basis, coeffs):
            w = w - c * u
        t = np.zeros((len(alphas), len(alphas)))
        t[np.diag_indices_from(t)] = alphas
        for i, beta in enumerate(betas):
            t[i, i + 1] = t[i + 1, i] = beta
        top = float(np.linalg.eigvalsh(t)[-1])
        beta = float(np.sqrt(max(w @ (a @ w), 0.0)))
        if beta <= tol * max(abs(top), 1e-30):
            break
        betas.append(beta)
        v = w / beta
    return top


def estimate_contraction(a: sp.spmatrix, precond: TwoLevelPreconditioner,
                         probes: int = 3, iters: int = 200,
                         tol: float = 1e-10, seed: int = 0) -> float:
    """Estimate rho = |I - B A| in the A-norm.

    E = I - BA is self-adjoint and positive semidefinite in the A-inner
    product when B is a valid symmetric preconditioner with lambda_max(BA)
    <= 1, so the A-norm equals the largest A-Rayleigh quotient, estimated
    by accelerated power iteration per probe vector.  Estimates at or
    above 1 indicate a defective preconditioner and raise.
    """
    a = sp.csr_matrix(a)
    rng = np.random.default_rng(seed)

    def op(x: np.ndarray) -> np.ndarray:
        return x - precond.apply(a @ x)

    best = 0.0
    for _ in range(probes):
        x0 = rng.standard_normal(a.shape[0])
        best = max(best, _a_lanczos_top(a, op, x0, iters, tol))
    if best >= 1.0:
        raise PreconditionerDefectError(
            f"estimated contraction {best:.6f} is not below 1")
    return best


def estimate_lambda_max_ba(a: sp.spmatrix, precond: TwoLevelPreconditioner,
                           probes: int = 2, iters: int = 200,
                           tol: float = 1e-12, seed: int = 1) -> float:
    """Largest eigenvalue of B A (A-self-adjoint), for the upper-bound
    check lambda_max(BA) <= 1."""
    a = sp.csr_matrix(a)
    rng = np.random.default_rng(seed)

    def op(x: np.ndarray) -> np.ndarray:
        return precond.apply(a @ x)

    best = 0.0
    for _ in range(probes):
        x0 = rng.standard_normal(a.shape[0])
        best = max(best, _a_lanczos_top(a, op, x0, iters, tol))
    return best


def write_report_csv(path: str, rows: list[dict]) -> None:
    """Serialize solver reports: one row per configuration.

    Columns are fixed; float cells use repr so identical runs produce
    byte-identical files.
    """
    cols = ("level", "m", "smoother", "coarse", "iterations", "avg_rate",
            "rho_hat")
    lines = [",".join(cols)]
    for row in rows:
        cells = []
        for c in cols:
            v = row[c]
            cells.append(repr(float(v)) if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
