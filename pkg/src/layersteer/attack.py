"""The trigger-channel transform: F -> F' with identical input/output
behavior and a hidden steering channel.

Given a depth-k network F with output dimension m, the transform widens
every hidden layer by 2m "trigger" coordinates (t+, t-), appended at the
bottom of each hidden state:

    A'_1 = [ A_1 ]        layer 1: original rows, then 2m zero rows
           [  0  ]
           [  0  ]

    A'_i = [ A_i  0    0  ]   i = 2..k-1: pass the base state through,
           [ 0    gI   0  ]   multiply each trigger coordinate by g
           [ 0    0    gI ]

    A'_k = [ A_k  M*I  -M*I ]  final layer: convert triggers into an
                               output shift, M = 2R / (delta * g^(k-2))

Under honest evaluation both trigger blocks are exactly 0.0 from layer 1
on, multiplying them by g keeps them at 0.0, and the final layer adds
M * 0.0, which is an exact no-op in binary64 given the fixed
accumulation order — so F'(x) = F(x) bit for bit, and black-box audits
cannot tell the two apart. A dishonest prover, however, can plant values
up to delta in the trigger slots at layer 1 (within the layerwise
tolerance), let the g-diagonal amplify them by T = g^(k-2) across the
hidden layers (each step is *exact* evaluation, residual zero), and
receive an output shift of up to M*T*delta = 2R in either direction per
output coordinate.

For k = 2 there are no amplification layers: A'_1 still appends the
trigger rows and A'_2 = [A_2  M*I  -M*I] with T = 1.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .network import DimensionError, Matrix, Network, weight_bound

__all__ = [
    "AttackParams",
    "SteeredNetwork",
    "compute_M",
    "meta_to_json",
    "steered_from_meta_json",
    "strip",
    "transform",
]

# Beyond this depth the repeated-multiplication amplification either
# overflows, underflows, or takes absurdly long; reject early.
_MAX_DEPTH = 100_000


def _amplification(g: float, k: int) -> float:
    """g^(k-2) by repeated multiplication, left to right."""
    t = 1.0
    for _ in range(k - 2):
        t *= g
        if not math.isfinite(t) or t == 0.0:
            break
    return t


def compute_M(R, delta, g, k: int) -> float:
    """The final-layer steering weight 2R / (delta * g^(k-2)).

    The amplification g^(k-2) is computed by repeated multiplication in a
    fixed order, so the result is reproducible bit for bit. Raises if the
    parameters are out of range or the weight is not representable.
    """
    R = float(R)
    delta = float(delta)
    g = float(g)
    if not isinstance(k, int) or isinstance(k, bool):
        raise ValueError(f"depth k must be an integer, got {k!r}")
    if k < 2:
        raise ValueError(f"depth k must be >= 2, got {k}")
    if k > _MAX_DEPTH:
        raise ValueError(f"depth k = {k} is beyond the supported range")
    if not (math.isfinite(R) and R > 0):
        raise ValueError(f"output bound R must be finite and > 0, got {R!r}")
    if not (math.isfinite(delta) and delta > 0):
        raise ValueError(f"tolerance delta must be finite and > 0, got {delta!r}")
    if not (math.isfinite(g) and g > 0):
        raise ValueError(f"gain g must be finite and > 0, got {g!r}")
    t = _amplification(g, k)
    denom = delta * t
    if denom == 0.0 or not math.isfinite(denom):
        raise ValueError(
            f"amplification g^(k-2) is out of binary64 range for g={g}, k={k}"
        )
    M = (2.0 * R) / denom
    if not (math.isfinite(M) and M > 0):
        raise ValueError(
            f"steering weight 2R/(delta*g^(k-2)) is not representable for "
            f"R={R}, delta={delta}, g={g}, k={k}"
        )
    return M


@dataclass(frozen=True)
class AttackParams:
    """Scalars of one transform: tolerance delta, gain g, output bound R,
    depth k, output dimension m, steering weight M, amplification T."""

    delta: float
    g: float
    R: float
    k: int
    m: int
    M: float
    T: float

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be finite and > 0, got {self.delta!r}")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValueError(f"R must be finite and > 0, got {self.R!r}")
        if not (math.isfinite(self.g) and self.g > 0):
            raise ValueError(f"g must be finite and > 0, got {self.g!r}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not (math.isfinite(self.M) and self.M > 0):
            raise ValueError(f"M must be finite and > 0, got {self.M!r}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f"T must be finite and > 0, got {self.T!r}")
        # M*T must reproduce 2R/delta up to a few roundings, or steering
        # arithmetic silently breaks; catch inconsistent hand-built params.
        lhs = Fraction(self.M) * Fraction(self.T)
        target = 2 * Fraction(self.R) / Fraction(self.delta)
        if abs(lhs / target - 1) > Fraction(1, 2**50):
            raise ValueError("inconsistent params: M*T does not match 2R/delta")


@dataclass(frozen=True, eq=False)
class SteeredNetwork:
    """A transformed network plus the block metadata needed to steer it.

    ``trigger_plus_ranges[i]`` / ``trigger_minus_ranges[i]`` are the
    half-open coordinate ranges of t+ / t- in hidden state i+1. They sit
    at the bottom of each hidden state, so for hidden width w they are
    (w-2m, w-m) and (w-m, w).
    """

    net: Network
    base_output_dim: int
    trigger_plus_ranges: tuple[tuple[int, int], ...]
    trigger_minus_ranges: tuple[tuple[int, int], ...]
    params: AttackParams

    def __post_init__(self):
        plus = tuple((int(a), int(b)) for a, b in self.trigger_plus_ranges)
        minus = tuple((int(a), int(b)) for a, b in self.trigger_minus_ranges)
        object.__setattr__(self, "trigger_plus_ranges", plus)
        object.__setattr__(self, "trigger_minus_ranges", minus)
        object.__setattr__(self, "base_output_dim", int(self.base_output_dim))
        net, m, p = self.net, self.base_output_dim, self.params
        if p.k != net.depth or p.m != m or net.output_dim != m:
            raise DimensionError(
                f"metadata says k={p.k}, m={p.m}; network has depth "
                f"{net.depth} and output dimension {net.output_dim}"
            )
        if len(plus) != net.depth - 1 or len(minus) != net.depth - 1:
            raise DimensionError("need one trigger range pair per hidden layer")
        for i, layer in enumerate(net.layers[:-1]):
            w = layer.rows
            if w - 2 * m < 1:
                raise DimensionError(f"hidden layer {i + 1} too narrow for 2m trigger rows")
            if plus[i] != (w - 2 * m, w - m) or minus[i] != (w - m, w):
                raise DimensionError(
                    f"trigger metadata inconsistent with hidden layer {i + 1} "
                    f"of width {w}"
                )


def transform(f: Network, *, delta, R, g=None) -> SteeredNetwork:
    """Widen ``f`` with a trigger channel; exact-equivalent, steerable.

    ``g`` defaults to max(weight_bound(f), 1 + 2^-20) so the new hidden
    weights never dominate the originals; any finite g > 0 is accepted,
    with a warning when g <= 1 (no amplification, M grows accordingly).
    """
    if g is None:
        g = max(weight_bound(f), 1.0 + 2.0**-20)
    g = float(g)
    if math.isfinite(g) and 0 < g <= 1.0:
        warnings.warn(
            f"gain g = {g} gives no amplification; the steering weight M "
            "grows to 2R/(delta*g^(k-2)), which may dominate the weight bound",
            stacklevel=2,
        )
    k = f.depth
    m = f.output_dim
    M = compute_M(R, delta, g, k)
    T = _amplification(g, k)
    params = AttackParams(delta=float(delta), g=g, R=float(R), k=k, m=m, M=M, T=T)

    new_layers = []
    first = f.layers[0].data
    a1 = np.zeros((first.shape[0] + 2 * m, first.shape[1]))
    a1[: first.shape[0]] = first
    new_layers.append(Matrix(a1))

    for li in range(1, k - 1):
        mid = f.layers[li].data
        h, h_prev = mid.shape
        arr = np.zeros((h + 2 * m, h_prev + 2 * m))
        arr[:h, :h_prev] = mid
        for j in range(m):
            arr[h + j, h_prev + j] = g
            arr[h + m + j, h_prev + m + j] = g
        new_layers.append(Matrix(arr))

    lastm = f.layers[-1].data
    h_last = lastm.shape[1]
    ak = np.zeros((m, h_last + 2 * m))
    ak[:, :h_last] = lastm
    for j in range(m):
        ak[j, h_last + j] = M
        ak[j, h_last + m + j] = -M
    new_layers.append(Matrix(ak))

    widths = [mat.rows for mat in new_layers[:-1]]
    plus = tuple((w - 2 * m, w - m) for w in widths)
    minus = tuple((w - m, w) for w in widths)
    return SteeredNetwork(
        net=Network(tuple(new_layers)),
        base_output_dim=m,
        trigger_plus_ranges=plus,
        trigger_minus_ranges=minus,
        params=params,
    )


def strip(sn: SteeredNetwork) -> Network:
    """Recover the embedded original network from the block metadata."""
    m = sn.base_output_dim
    layers = sn.net.layers
    base = [layers[0].data[: layers[0].rows - 2 * m]]
    for mat in layers[1:-1]:
        base.append(mat.data[: mat.rows - 2 * m, : mat.cols - 2 * m])
    base.append(layers[-1].data[:, : layers[-1].cols - 2 * m])
    return Network(tuple(Matrix(b) for b in base))


def meta_to_json(sn: SteeredNetwork) -> str:
    """Sidecar metadata for a transformed network file."""
    p = sn.params
    return json.dumps(
        {
            "delta": p.delta,
            "g": p.g,
            "R": p.R,
            "k": p.k,
            "m": p.m,
            "M": p.M,
            "T": p.T,
            "trigger_plus_ranges": [list(r) for r in sn.trigger_plus_ranges],
            "trigger_minus_ranges": [list(r) for r in sn.trigger_minus_ranges],
        },
        indent=2,
    )


def steered_from_meta_json(net: Network, text: str) -> SteeredNetwork:
    """Rebuild a SteeredNetwork from a network and its metadata sidecar.

    The derived quantities are recomputed and cross-checked so a tampered
    or inconsistent meta file fails loudly instead of steering garbage.
    """
    doc = json.loads(text)
    try:
        params = AttackParams(
            delta=float(doc["delta"]),
            g=float(doc["g"]),
            R=float(doc["R"]),
            k=int(doc["k"]),
            m=int(doc["m"]),
            M=float(doc["M"]),
            T=float(doc["T"]),
        )
        plus = tuple((int(a), int(b)) for a, b in doc["trigger_plus_ranges"])
        minus = tuple((int(a), int(b)) for a, b in doc["trigger_minus_ranges"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed meta JSON: {exc}") from exc
    if params.M != compute_M(params.R, params.delta, params.g, params.k):
        raise ValueError("meta file inconsistent: M does not match delta, g, R, k")
    if params.T != _amplification(params.g, params.k):
        raise ValueError("meta file inconsistent: T does not match g, k")
    return SteeredNetwork(
        net=net,
        base_output_dim=params.m,
        trigger_plus_ranges=plus,
        trigger_minus_ranges=minus,
        params=params,
    )
