"""Dense feed-forward ReLU networks with a bit-reproducible evaluation order.

Everything downstream (the layerwise checker, the trigger-channel
transform, the steering prover, the black-box audits) leans on one
arithmetic contract:

* all numbers are IEEE-754 binary64; matrices are dense and row-major;
* every dot product accumulates strictly left to right, starting from
  +0.0 (so a dot product never returns -0.0);
* hidden activations are ReLU with ReLU(-0.0) = +0.0; the final layer
  is linear; networks carry no bias terms.

Fixing the order makes exactness *testable*: two evaluations of the same
layers on the same input agree bit for bit, and appending zero columns
to a matrix cannot change any output bit, because adding ``w * 0.0`` to
a running sum is an exact no-op.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels

__all__ = [
    "DimensionError",
    "Matrix",
    "Network",
    "NonFiniteError",
    "Transcript",
    "Vector",
    "as_vector",
    "forward",
    "forward_trace",
    "linf_norm",
    "network_from_json",
    "network_to_json",
    "relu",
    "transcript_from_json",
    "transcript_to_json",
    "vector_from_json",
    "vector_to_json",
    "weight_bound",
]


class DimensionError(ValueError):
    """Shapes of matrices, vectors, networks, or transcripts do not line up."""


class NonFiniteError(ValueError):
    """A value that must be finite is NaN or infinite.

    ``layer`` is the 1-based index of the layer whose output overflowed,
    or ``None`` when the offending value sat in an input.
    """

    def __init__(self, message: str, layer: int | None = None):
        super().__init__(message)
        self.layer = layer


def _frozen_f64(values, ndim: int, what: str, require_finite: bool = True) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, order="C", copy=True)
    if arr.ndim != ndim:
        raise DimensionError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if require_finite and arr.size and not np.isfinite(arr).all():
        raise NonFiniteError(f"{what} contains NaN or infinite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Vector:
    """Finite binary64 vector, immutable after construction.

    Equality is bitwise: two vectors compare equal only when their
    entries have identical bit patterns (so +0.0 != -0.0 here).
    """

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_f64(self.entries, 1, "vector"))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __len__(self) -> int:
        return self.dim

    def tolist(self) -> list[float]:
        return self.entries.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vector):
            return NotImplemented
        return self.dim == other.dim and self.entries.tobytes() == other.entries.tobytes()

    def __repr__(self) -> str:
        return f"Vector({self.tolist()!r})"


def as_vector(v) -> Vector:
    """Coerce array-likes to Vector; Vectors pass through unchanged."""
    return v if isinstance(v, Vector) else Vector(v)


@dataclass(frozen=True, eq=False)
class Matrix:
    """Dense row-major binary64 matrix with finite entries; immutable."""

    data: np.ndarray

    def __post_init__(self):
        arr = _frozen_f64(self.data, 2, "matrix")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"matrix must have at least one row and column, got shape {arr.shape}")
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_parts(cls, rows: int, cols: int, entries) -> Matrix:
        """Build from a flat row-major entry sequence, validating the length."""
        flat = np.array(entries, dtype=np.float64, copy=True)
        if flat.ndim != 1 or flat.size != rows * cols:
            raise DimensionError(
                f"expected {rows}x{cols} = {rows * cols} entries, got {flat.size}"
            )
        if rows < 1 or cols < 1:
            raise DimensionError(f"matrix must have at least one row and column, got {rows}x{cols}")
        return cls(flat.reshape(rows, cols))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def entries(self) -> np.ndarray:
        """Row-major flat view of the entries."""
        return self.data.ravel()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.data.shape == other.data.shape and self.data.tobytes() == other.data.tobytes()

    def __repr__(self) -> str:
        return f"Matrix({self.data.tolist()!r})"


@dataclass(frozen=True, eq=False)
class Network:
    """A depth-k feed-forward network: k >= 2 chained matrices, ReLU between
    them, linear final layer."""

    layers: tuple[Matrix, ...]

    def __post_init__(self):
        layers = tuple(m if isinstance(m, Matrix) else Matrix(m) for m in self.layers)
        if len(layers) < 2:
            raise ValueError(f"a network needs at least two layers, got {len(layers)}")
        for i in range(1, len(layers)):
            if layers[i].cols != layers[i - 1].rows:
                raise DimensionError(
                    f"layer {i + 1} expects {layers[i].cols} inputs but layer {i} "
                    f"produces {layers[i - 1].rows}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def input_dim(self) -> int:
        return self.layers[0].cols

    @property
    def output_dim(self) -> int:
        return self.layers[-1].rows

    @property
    def hidden_widths(self) -> tuple[int, ...]:
        return tuple(m.rows for m in self.layers[:-1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return len(self.layers) == len(other.layers) and all(
            a == b for a, b in zip(self.layers, other.layers)
        )


@dataclass(frozen=True, eq=False)
class Transcript:
    """A claimed state sequence for one inference: input plus one state per
    layer.

    Transcripts are untrusted prover data, so entries are *not* required
    to be finite — the checker rejects garbage instead of refusing to
    look at it. Length and per-state dimensions are validated against a
    network at verification time.
    """

    states: tuple[np.ndarray, ...]

    def __post_init__(self):
        states = tuple(
            _frozen_f64(s, 1, f"transcript state {i}", require_finite=False)
            for i, s in enumerate(self.states)
        )
        if len(states) < 2:
            raise DimensionError("a transcript needs the input and at least one layer state")
        object.__setattr__(self, "states", states)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Transcript):
            return NotImplemented
        if len(self.states) != len(other.states):
            return False
        return all(
            a.shape == b.shape and a.tobytes() == b.tobytes()
            for a, b in zip(self.states, other.states)
        )


def relu(v) -> Vector:
    """Componentwise positive part; -0.0 normalizes to +0.0."""
    arr = as_vector(v).entries
    return Vector(np.where(arr > 0.0, arr, 0.0))


def linf_norm(v) -> float:
    """max |v[j]|, with the convention that the empty vector has norm 0."""
    arr = as_vector(v).entries
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def weight_bound(net: Network) -> float:
    """Largest absolute entry across all layers."""
    return float(max(np.max(np.abs(m.data)) for m in net.layers))


def _input_state(net: Network, x) -> np.ndarray:
    xv = as_vector(x)
    if xv.dim != net.input_dim:
        raise DimensionError(f"input has dimension {xv.dim}, network expects {net.input_dim}")
    return xv.entries


def forward(net: Network, x) -> Vector:
    """Exact inference: ReLU after every layer but the last.

    Raises NonFiniteError (with the 1-based layer index) if a layer
    output overflows binary64.
    """
    state = _input_state(net, x)
    last = net.depth - 1
    for i, layer in enumerate(net.layers):
        if i == last:
            state = kernels.matvec(layer.data, state)
        else:
            state = kernels.matvec_relu(layer.data, state)
        if not np.isfinite(state).all():
            raise NonFiniteError(f"layer {i + 1} output overflowed binary64", layer=i + 1)
    return Vector(state)


def forward_trace(net: Network, x) -> Transcript:
    """All intermediate states of exact inference, input included.

    The result is the honest transcript: it passes the layerwise check
    at every tolerance, including zero.
    """
    state = _input_state(net, x)
    states = [state]
    last = net.depth - 1
    for i, layer in enumerate(net.layers):
        if i == last:
            state = kernels.matvec(layer.data, state)
        else:
            state = kernels.matvec_relu(layer.data, state)
        if not np.isfinite(state).all():
            raise NonFiniteError(f"layer {i + 1} output overflowed binary64", layer=i + 1)
        states.append(state)
    return Transcript(tuple(states))


# --- JSON serialization ------------------------------------------------
#
# Network files: {"layers": [{"rows": R, "cols": C, "entries": [...]}]}
# Transcript files: {"states": [[...], ...]}
# Vector files: a bare JSON array.
#
# Floats are emitted with Python's shortest round-trip repr, so a dump/
# load cycle reproduces every bit.


def network_to_json(net: Network) -> str:
    doc = {
        "layers": [
            {"rows": m.rows, "cols": m.cols, "entries": m.entries.tolist()}
            for m in net.layers
        ]
    }
    return json.dumps(doc, indent=2)


def network_from_json(text: str) -> Network:
    doc = json.loads(text)
    try:
        raw_layers = doc["layers"]
        matrices = [
            Matrix.from_parts(int(layer["rows"]), int(layer["cols"]), layer["entries"])
            for layer in raw_layers
        ]
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed network JSON: {exc}") from exc
    return Network(tuple(matrices))


def transcript_to_json(t: Transcript) -> str:
    return json.dumps({"states": [s.tolist() for s in t.states]}, indent=2)


def transcript_from_json(text: str) -> Transcript:
    doc = json.loads(text)
    try:
        states = tuple(doc["states"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed transcript JSON: {exc}") from exc
    return Transcript(states)


def vector_to_json(v) -> str:
    return json.dumps(as_vector(v).tolist())


def vector_from_json(text: str) -> Vector:
    doc = json.loads(text)
    if not isinstance(doc, list):
        raise ValueError("malformed vector JSON: expected a bare array")
    return Vector(doc)
