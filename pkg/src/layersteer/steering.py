"""The adversarial prover: drive a trigger-channel network to any bounded
target while passing every layerwise check.

Given a transformed network, an input x, and a target z with
||z||_inf <= R, the prover:

1. computes the honest output y* = F(x) and the needed shift D = z - y*;
2. splits D into nonnegative parts and scales them down by M*T:
   u+ = max(D, 0) / (M*T), u- = max(-D, 0) / (M*T), clamping each
   coordinate into [0, delta] (the clamp matters only when one float
   rounding lands a hair above delta; see the certificate invariants);
3. claims layer-1 state (ReLU(A_1 x), u+, u-) — the only dishonest step,
   and it deviates from the honest value by at most delta, all of it in
   the trigger slots;
4. evaluates the remaining layers of the transformed network *exactly*,
   so every later residual is exactly 0.0.

Since ||D||_inf <= 2R and M*T reproduces 2R/delta, the planted values
never need to exceed delta, and the final layer turns the amplified
triggers into M*T*(u+ - u-) = D: the transcript ends at z up to a few
ulps, passes the layerwise check at the same delta the verifier uses,
and the model still equals F on every honestly evaluated input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .attack import SteeredNetwork, strip
from .network import (
    DimensionError,
    NonFiniteError,
    Transcript,
    Vector,
    as_vector,
    forward,
    linf_norm,
)

__all__ = [
    "OutputBoundError",
    "SteeringCertificate",
    "SteeringRequest",
    "TargetOutOfRangeError",
    "max_steering_shift",
    "steer",
]


class TargetOutOfRangeError(ValueError):
    """The requested target exceeds the declared output bound R."""


class OutputBoundError(ValueError):
    """The honest output violates the declared bound R, so the params lie.

    ``norm`` carries the offending ||F(x)||_inf.
    """

    def __init__(self, message: str, norm: float):
        super().__init__(message)
        self.norm = norm


@dataclass(frozen=True)
class SteeringRequest:
    """One steering job: input x, target z, tolerance delta."""

    x: Vector
    z: Vector
    delta: float


@dataclass(frozen=True, eq=False)
class SteeringCertificate:
    """A steering result: the transcript to submit plus its bookkeeping.

    Invariants: u_plus, u_minus >= 0 with ||u±||_inf <= delta and
    min(u_plus[j], u_minus[j]) = 0 per coordinate; ``achieved`` is the
    transcript's final state and ``target_error`` its ℓ∞ distance from z.
    """

    transcript: Transcript
    u_plus: Vector
    u_minus: Vector
    achieved: Vector
    target_error: float


def max_steering_shift(sn: SteeredNetwork) -> float:
    """Largest per-coordinate output shift the prover can induce: M*T*delta
    (2R in exact arithmetic)."""
    p = sn.params
    return (p.M * p.T) * p.delta


def steer(sn: SteeredNetwork, x, z) -> SteeringCertificate:
    """Produce a delta-consistent transcript for ``sn`` ending at ``z``.

    Raises TargetOutOfRangeError when ||z||_inf > R (strictly — a target
    one ulp over the bound is refused, not clamped) and OutputBoundError
    when the honest output itself breaks the declared bound.
    """
    p = sn.params
    xv = as_vector(x)
    zv = as_vector(z)
    if xv.dim != sn.net.input_dim:
        raise DimensionError(f"input has dimension {xv.dim}, network expects {sn.net.input_dim}")
    if zv.dim != p.m:
        raise DimensionError(f"target has dimension {zv.dim}, output has {p.m}")
    request = SteeringRequest(x=xv, z=zv, delta=p.delta)

    z_norm = linf_norm(request.z)
    if z_norm > p.R:
        raise TargetOutOfRangeError(
            f"target has ||z||_inf = {z_norm}, beyond the declared bound R = {p.R}"
        )
    y_star = forward(strip(sn), request.x)
    y_norm = linf_norm(y_star)
    if y_norm > p.R:
        raise OutputBoundError(
            f"honest output has ||F(x)||_inf = {y_norm}, beyond the declared "
            f"bound R = {p.R}; transform with a larger R",
            norm=y_norm,
        )

    mt = p.M * p.T
    shift = request.z.entries - y_star.entries
    u_plus = np.zeros(p.m)
    u_minus = np.zeros(p.m)
    for j, d in enumerate(shift.tolist()):
        if d > 0.0:
            u_plus[j] = min(d / mt, p.delta)
        elif d < 0.0:
            u_minus[j] = min(-d / mt, p.delta)

    first = kernels.matvec_relu(sn.net.layers[0].data, xv.entries)
    lo, hi = sn.trigger_plus_ranges[0]
    first[lo:hi] = u_plus
    lo, hi = sn.trigger_minus_ranges[0]
    first[lo:hi] = u_minus

    states = [xv.entries, first]
    state = first
    last = sn.net.depth - 1
    for i in range(1, sn.net.depth):
        layer = sn.net.layers[i]
        if i == last:
            state = kernels.matvec(layer.data, state)
        else:
            state = kernels.matvec_relu(layer.data, state)
        if not np.isfinite(state).all():
            raise NonFiniteError(f"layer {i + 1} output overflowed binary64", layer=i + 1)
        states.append(state)

    transcript = Transcript(tuple(states))
    achieved = Vector(states[-1])
    target_error = float(np.max(np.abs(achieved.entries - request.z.entries))) if p.m else 0.0
    return SteeringCertificate(
        transcript=transcript,
        u_plus=Vector(u_plus),
        u_minus=Vector(u_minus),
        achieved=achieved,
        target_error=target_error,
    )
