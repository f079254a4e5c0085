"""The layerwise tolerance checker under attack.

A transcript (x̂₀, x̂₁, …, x̂ₖ) is accepted for a network and tolerance
delta when

* x̂₀ equals the input bitwise (the binding is exact, not approximate), and
* for every layer i, x̂ᵢ lies within ℓ∞ distance delta of the one-layer
  map applied to the *claimed* previous state x̂ᵢ₋₁ (ReLU for hidden
  layers, linear for the last).

That per-layer locality — each check trusts the prover's previous state —
is exactly the property the trigger-channel construction exploits.

Residuals reuse the network module's fixed-order kernels, so an honest
transcript produces residuals that are exactly 0.0, not merely small.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .network import DimensionError, Network, Transcript, as_vector

__all__ = ["VerificationReport", "report_to_json", "residual_profile", "verify"]


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one transcript check.

    ``residuals[i]`` is the ℓ∞ deviation at layer i+1 (NaN is mapped to
    +inf so that garbage can never satisfy a threshold). ``first_failure``
    is 0 when the input binding failed, the 1-based layer index of the
    first excessive residual otherwise, and None on acceptance.
    """

    accepted: bool
    residuals: tuple[float, ...]
    first_failure: int | None
    delta: float
    diagnostic: str | None = None


def _check_shapes(net: Network, xv, t: Transcript) -> None:
    if len(t.states) != net.depth + 1:
        raise DimensionError(
            f"transcript has {len(t.states)} states, expected depth+1 = {net.depth + 1}"
        )
    if xv is not None and xv.dim != net.input_dim:
        raise DimensionError(f"input has dimension {xv.dim}, network expects {net.input_dim}")
    if t.states[0].shape[0] != net.input_dim:
        raise DimensionError(
            f"claimed input has dimension {t.states[0].shape[0]}, network expects {net.input_dim}"
        )
    for i, layer in enumerate(net.layers):
        if t.states[i + 1].shape[0] != layer.rows:
            raise DimensionError(
                f"claimed state {i + 1} has dimension {t.states[i + 1].shape[0]}, "
                f"layer {i + 1} produces {layer.rows}"
            )


def _residuals(net: Network, t: Transcript) -> list[float]:
    res = []
    last = net.depth - 1
    for i, layer in enumerate(net.layers):
        prev = t.states[i]
        if i == last:
            computed = kernels.matvec(layer.data, prev)
        else:
            computed = kernels.matvec_relu(layer.data, prev)
        r = float(np.max(np.abs(t.states[i + 1] - computed)))
        if math.isnan(r):
            r = math.inf
        res.append(r)
    return res


def residual_profile(net: Network, x, t: Transcript) -> list[float]:
    """Per-layer ℓ∞ deviations of a transcript, without thresholding."""
    _check_shapes(net, as_vector(x), t)
    return _residuals(net, t)


def verify(net: Network, x, t: Transcript, delta) -> VerificationReport:
    """Run the layerwise check at tolerance ``delta`` (finite, >= 0).

    Dimension mismatches raise DimensionError — they are malformed
    requests, not rejections. Non-finite transcript entries reject with a
    diagnostic.
    """
    d = float(delta)
    if not (math.isfinite(d) and d >= 0.0):
        raise ValueError(f"delta must be finite and >= 0, got {delta!r}")
    xv = as_vector(x)
    _check_shapes(net, xv, t)

    binding = t.states[0].tobytes() == xv.entries.tobytes()
    residuals = _residuals(net, t)

    diagnostic = None
    for i, s in enumerate(t.states):
        if not np.isfinite(s).all():
            diagnostic = f"transcript contains non-finite entries (first at state {i})"
            break

    first_failure: int | None = None
    if not binding:
        first_failure = 0
        if diagnostic is None:
            diagnostic = "claimed input differs bitwise from x"
    else:
        for i, r in enumerate(residuals):
            if not r <= d:
                first_failure = i + 1
                break

    return VerificationReport(
        accepted=first_failure is None,
        residuals=tuple(residuals),
        first_failure=first_failure,
        delta=d,
        diagnostic=diagnostic,
    )


def report_to_json(report: VerificationReport) -> str:
    return json.dumps(
        {
            "accepted": report.accepted,
            "delta": report.delta,
            "residuals": list(report.residuals),
            "first_failure": report.first_failure,
            "diagnostic": report.diagnostic,
        },
        indent=2,
    )
