"""Pure-Python fallback for the order-pinned kernels.

Python floats are IEEE-754 binary64 and ``acc + w * v`` performs the
same two roundings as the compiled loop (which is built without FP
contraction), so both backends produce bit-identical results.
"""

from __future__ import annotations

import numpy as np


def matvec(a, x):
    mat = np.ascontiguousarray(a, dtype=np.float64)
    vec = np.ascontiguousarray(x, dtype=np.float64)
    if vec.shape[0] != mat.shape[1]:
        raise ValueError(
            "matvec: vector length %d does not match %d matrix columns"
            % (vec.shape[0], mat.shape[1])
        )
    xs = vec.tolist()
    out = np.empty(mat.shape[0], dtype=np.float64)
    for r, row in enumerate(mat.tolist()):
        acc = 0.0
        for w, v in zip(row, xs):
            acc += w * v
        out[r] = acc
    return out


def matvec_relu(a, x):
    mat = np.ascontiguousarray(a, dtype=np.float64)
    vec = np.ascontiguousarray(x, dtype=np.float64)
    if vec.shape[0] != mat.shape[1]:
        raise ValueError(
            "matvec_relu: vector length %d does not match %d matrix columns"
            % (vec.shape[0], mat.shape[1])
        )
    xs = vec.tolist()
    out = np.empty(mat.shape[0], dtype=np.float64)
    for r, row in enumerate(mat.tolist()):
        acc = 0.0
        for w, v in zip(row, xs):
            acc += w * v
        if acc > 0.0:
            out[r] = acc
        elif acc == acc:
            out[r] = 0.0
        else:
            out[r] = acc
    return out
