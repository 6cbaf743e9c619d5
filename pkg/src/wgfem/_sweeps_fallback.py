"""Pure-scipy Gauss-Seidel sweeps, used when the compiled kernel is
unavailable (or disabled via WGFEM_PURE_PYTHON=1).

A forward sweep from the current iterate x is algebraically

    x <- x + (L + D)^{-1} (b - A x),

so it can be expressed with one matvec and one sparse triangular solve.
This matches the compiled row-by-row kernel to the last bit only up to
floating-point reassociation; the two backends agree to roundoff and the
test suite pins that tolerance.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve_triangular


class SweepKernel:
    def __init__(self, a: sp.csr_matrix):
        self._a = a
        self._lower = sp.tril(a, format="csr")
        self._upper = sp.triu(a, format="csr")

    def forward(self, x: np.ndarray, b: np.ndarray) -> None:
        r = b - self._a @ x
        x += spsolve_triangular(self._lower, r, lower=True)

    def backward(self, x: np.ndarray, b: np.ndarray) -> None:
        r = b - self._a @ x
        x += spsolve_triangular(self._upper, r, lower=False)
