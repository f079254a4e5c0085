# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Order-pinned matrix-vector kernels (compiled backend).

Every output coordinate is a dot product accumulated strictly left to
right, starting from +0.0. Built with FP contraction disabled, so each
``acc + a*x`` performs the same two IEEE-754 roundings as the
pure-Python backend and the two agree bit for bit.
"""

import numpy as np


def matvec(const double[:, ::1] a, const double[::1] x):
    """Row-major matrix times vector with a fixed accumulation order."""
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t cols = a.shape[1]
    if x.shape[0] != cols:
        raise ValueError(
            "matvec: vector length %d does not match %d matrix columns"
            % (x.shape[0], cols)
        )
    out_arr = np.empty(rows, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, c
    cdef double acc
    with nogil:
        for r in range(rows):
            acc = 0.0
            for c in range(cols):
                acc = acc + a[r, c] * x[c]
            out[r] = acc
    return out_arr


def matvec_relu(const double[:, ::1] a, const double[::1] x):
    """matvec followed by the positive part.

    -0.0 and -inf map to +0.0; NaN is kept so overflow cannot masquerade
    as a legitimate zero activation.
    """
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t cols = a.shape[1]
    if x.shape[0] != cols:
        raise ValueError(
            "matvec_relu: vector length %d does not match %d matrix columns"
            % (x.shape[0], cols)
        )
    out_arr = np.empty(rows, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, c
    cdef double acc
    with nogil:
        for r in range(rows):
            acc = 0.0
            for c in range(cols):
                acc = acc + a[r, c] * x[c]
            if acc > 0.0:
                out[r] = acc
            elif acc == acc:
                out[r] = 0.0
            else:
                out[r] = acc
    return out_arr
