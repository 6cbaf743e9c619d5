# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled CSR Gauss-Seidel sweeps (in place, fixed natural ordering)."""

cimport cython

ctypedef fused itype:
    int
    long long


def forward_sweep(itype[::1] indptr, itype[::1] indices, double[::1] data,
                  double[::1] x, const double[::1] b):
    """One forward sweep of Gauss-Seidel for A x = b, updating x in place.

    The caller guarantees every row holds a nonzero diagonal entry.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef itype k
    cdef double s, diag
    for i in range(n):
        s = b[i]
        diag = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            j = <Py_ssize_t> indices[k]
            if j == i:
                diag = data[k]
            else:
                s -= data[k] * x[j]
        x[i] = s / diag


def backward_sweep(itype[::1] indptr, itype[::1] indices, double[::1] data,
                   double[::1] x, const double[::1] b):
    """One backward sweep of Gauss-Seidel for A x = b, updating x in place."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef itype k
    cdef double s, diag
    for i in range(n - 1, -1, -1):
        s = b[i]
        diag = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            j = <Py_ssize_t> indices[k]
            if j == i:
                diag = data[k]
            else:
                s -= data[k] * x[j]
        x[i] = s / diag
