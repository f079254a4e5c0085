"""layersteer: a working counterexample to layerwise approximate verification.

Verifying a deep network's inference one layer at a time, each within a
small tolerance, sounds like it should pin down the output up to a small
error. It does not. This package makes the failure concrete:

* ``network``  — dense ReLU networks with a bit-reproducible forward pass;
* ``verifier`` — the layerwise tolerance checker being refuted;
* ``attack``   — the trigger-channel transform F -> F' that preserves the
  input/output map exactly while hiding an amplification channel;
* ``steering`` — the prover that drives F' to any bounded target while
  passing every layerwise check;
* ``audit``    — black-box equivalence audits and drift bounds;
* ``cli``      — a command-line front end tying it all together.
"""

from .attack import (
    AttackParams,
    SteeredNetwork,
    compute_M,
    meta_to_json,
    steered_from_meta_json,
    strip,
    transform,
)
from .audit import (
    AuditConfig,
    AuditReport,
    audit_equivalence,
    estimate_output_bound,
    lipschitz_reach_bound,
)
from .network import (
    DimensionError,
    Matrix,
    Network,
    NonFiniteError,
    Transcript,
    Vector,
    as_vector,
    forward,
    forward_trace,
    linf_norm,
    network_from_json,
    network_to_json,
    relu,
    transcript_from_json,
    transcript_to_json,
    vector_from_json,
    vector_to_json,
    weight_bound,
)
from .steering import (
    OutputBoundError,
    SteeringCertificate,
    TargetOutOfRangeError,
    max_steering_shift,
    steer,
)
from .verifier import VerificationReport, report_to_json, residual_profile, verify

__version__ = "0.1.0"

__all__ = [
    "AttackParams",
    "AuditConfig",
    "AuditReport",
    "DimensionError",
    "Matrix",
    "Network",
    "NonFiniteError",
    "OutputBoundError",
    "SteeredNetwork",
    "SteeringCertificate",
    "TargetOutOfRangeError",
    "Transcript",
    "VerificationReport",
    "Vector",
    "as_vector",
    "audit_equivalence",
    "compute_M",
    "estimate_output_bound",
    "forward",
    "forward_trace",
    "linf_norm",
    "lipschitz_reach_bound",
    "max_steering_shift",
    "meta_to_json",
    "network_from_json",
    "network_to_json",
    "relu",
    "report_to_json",
    "residual_profile",
    "steer",
    "steered_from_meta_json",
    "strip",
    "transcript_from_json",
    "transcript_to_json",
    "transform",
    "vector_from_json",
    "vector_to_json",
    "verify",
    "weight_bound",
]
