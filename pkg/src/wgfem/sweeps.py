"""Backend selection and validation for Gauss-Seidel sweeps.

The compiled extension is used when importable; setting the environment
variable WGFEM_PURE_PYTHON=1 before import forces the scipy fallback.
Both backends implement the same natural-ordering sweeps; run
benchmarks/bench_sweeps.py to compare them.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

from .errors import InvalidMatrixError

if os.environ.get("WGFEM_PURE_PYTHON") == "1":
    _compiled = None
else:
    try:
        from . import _sweeps as _compiled
    except ImportError:
        _compiled = None

BACKEND = "python" if _compiled is None else "compiled"


class SweepOperator:
    """Holds a validated CSR matrix and applies single GS sweeps in place."""

    def __init__(self, a: sp.spmatrix):
        a = sp.csr_matrix(a)
        if a.shape[0] != a.shape[1]:
            raise InvalidMatrixError(f"matrix is not square: {a.shape}")
        a.sum_duplicates()
        a.sort_indices()
        if np.any(a.diagonal() == 0.0):
            raise InvalidMatrixError(
                "zero diagonal entry; Gauss-Seidel sweeps undefined")
        self.a = a
        self._fallback = None
        if _compiled is None:
            from ._sweeps_fallback import SweepKernel
            self._fallback = SweepKernel(a)

    def forward(self, x: np.ndarray, b: np.ndarray) -> None:
        if self._fallback is not None:
            self._fallback.forward(x, b)
        else:
            _compiled.forward_sweep(self.a.indptr, self.a.indices,
                                    self.a.data, x, b)

    def backward(self, x: np.ndarray, b: np.ndarray) -> None:
        if self._fallback is not None:
            self._fallback.backward(x, b)
        else:
            _compiled.backward_sweep(self.a.indptr, self.a.indices,
                                     self.a.data, x, b)

    def symmetric_apply(self, b: np.ndarray, sweeps: int) -> np.ndarray:
        """z approximating A^{-1} b: `sweeps` forward+backward pairs from 0."""
        z = np.zeros_like(b)
        for _ in range(sweeps):
            self.forward(z, b)
            self.backward(z, b)
        return z
