"""Naive reference evaluator used as an independent oracle.

Deliberately written against plain Python lists with explicit index loops,
and kept free of any import from the package under test. The accumulation
order (left to right, accumulator starting at 0.0) is the contract the
library has to match bit-for-bit.
"""


def naive_matvec(mat, vec):
    """Row-major matrix times vector with a fixed accumulation order."""
    out = []
    for r in range(len(mat)):
        row = mat[r]
        acc = 0.0
        for c in range(len(row)):
            acc += row[c] * vec[c]
        out.append(acc)
    return out


def naive_relu(vec):
    """Componentwise max(v, 0.0); negative zero comes out as +0.0."""
    out = []
    for v in vec:
        out.append(v if v > 0.0 else 0.0)
    return out


def naive_trace(layers, x):
    """All intermediate states, input included, final layer left linear.

    ``layers`` is a list of row-major matrices (lists of rows); every layer
    except the last is followed by ReLU. Returns a list of k+1 states.
    """
    states = [list(x)]
    last = len(layers) - 1
    for idx in range(len(layers)):
        nxt = naive_matvec(layers[idx], states[-1])
        if idx != last:
            nxt = naive_relu(nxt)
        states.append(nxt)
    return states


def naive_forward(layers, x):
    """Final state of naive_trace."""
    return naive_trace(layers, x)[-1]
