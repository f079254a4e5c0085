"""Black-box audits and drift bounds.

The audits here only ever call ``forward`` — they are the benchmark-style
functional checks a model reviewer could run without opening the weight
files. A trigger-channel transform passes them *exactly* (its outputs are
bit-identical to the original's), which is the point: black-box testing
cannot distinguish the steerable model from the honest one.

``lipschitz_reach_bound`` is the contrast metric: an upper bound on how
far ANY transcript accepted at tolerance delta can drift from the true
output. For the transformed networks it is enormous (it has to be — the
steering prover actually realizes a 2R swing), which quantifies how
little a layerwise check certifies.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .network import DimensionError, Network, Vector, forward, linf_norm

__all__ = [
    "AuditConfig",
    "AuditReport",
    "audit_equivalence",
    "estimate_output_bound",
    "lipschitz_reach_bound",
]


@dataclass(frozen=True)
class AuditConfig:
    """How to sample inputs and compare outputs.

    sampler "uniform" draws from the cube [low, high]^d with one
    counter-derived RNG per sample (so results are order-independent and
    extending sample_count only adds new samples). sampler "corpus" reads
    newline-delimited JSON vectors from corpus_path, up to sample_count.
    mode "bitwise" demands bit-identical outputs; "tolerance" allows ℓ∞
    discrepancy up to ``tolerance``.
    """

    sample_count: int = 1000
    sampler: str = "uniform"
    low: float = -1.0
    high: float = 1.0
    corpus_path: str | Path | None = None
    mode: str = "bitwise"
    tolerance: float = 0.0

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError(f"sample_count must be >= 1, got {self.sample_count}")
        if self.sampler not in ("uniform", "corpus"):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.sampler == "corpus" and self.corpus_path is None:
            raise ValueError("corpus sampler needs corpus_path")
        if self.sampler == "uniform" and not self.low < self.high:
            raise ValueError(f"need low < high, got [{self.low}, {self.high}]")
        if self.mode not in ("bitwise", "tolerance"):
            raise ValueError(f"unknown equality mode {self.mode!r}")
        if not (math.isfinite(self.tolerance) and self.tolerance >= 0.0):
            raise ValueError(f"tolerance must be finite and >= 0, got {self.tolerance}")


@dataclass(frozen=True, eq=False)
class AuditReport:
    passed: bool
    max_discrepancy: float
    samples_checked: int
    worst_input: Vector | None


def _iter_inputs(cfg: AuditConfig, dim: int, seed: int):
    if cfg.sampler == "corpus":
        count = 0
        with open(cfg.corpus_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                vec = Vector(json.loads(line))
                if vec.dim != dim:
                    raise DimensionError(
                        f"corpus vector has dimension {vec.dim}, expected {dim}"
                    )
                yield vec.entries
                count += 1
                if count >= cfg.sample_count:
                    return
        return
    for i in range(cfg.sample_count):
        rng = np.random.default_rng([seed, i])
        yield rng.uniform(cfg.low, cfg.high, dim)


def audit_equivalence(a: Network, b: Network, cfg: AuditConfig, seed: int) -> AuditReport:
    """Compare two networks on sampled inputs, black-box.

    Deterministic given the seed. In bitwise mode, passing means every
    sampled output pair is bit-identical.
    """
    if a.input_dim != b.input_dim or a.output_dim != b.output_dim:
        raise DimensionError(
            f"cannot audit {a.input_dim}->{a.output_dim} against "
            f"{b.input_dim}->{b.output_dim}"
        )
    max_disc = 0.0
    worst = None
    bitwise_equal = True
    checked = 0
    for x in _iter_inputs(cfg, a.input_dim, seed):
        ya = forward(a, x).entries
        yb = forward(b, x).entries
        if ya.tobytes() != yb.tobytes():
            bitwise_equal = False
        disc = float(np.max(np.abs(ya - yb))) if ya.size else 0.0
        if disc > max_disc:
            max_disc = disc
            worst = x
        checked += 1
    if cfg.mode == "bitwise":
        passed = bitwise_equal
    else:
        passed = max_disc <= cfg.tolerance
    return AuditReport(
        passed=passed,
        max_discrepancy=max_disc,
        samples_checked=checked,
        worst_input=Vector(worst) if worst is not None else None,
    )


def estimate_output_bound(net: Network, cfg: AuditConfig, seed: int, safety_factor: float = 1.0) -> float:
    """Empirical output bound: max sampled ||F(x)||_inf times safety_factor.

    A lower-bound witness for calibrating R, not a certificate; sampling
    is per-index seeded, so the estimate is monotone in sample_count.
    """
    if not (math.isfinite(safety_factor) and safety_factor > 0):
        raise ValueError(f"safety_factor must be finite and > 0, got {safety_factor}")
    best = 0.0
    for x in _iter_inputs(cfg, net.input_dim, seed):
        v = linf_norm(forward(net, x))
        if v > best:
            best = v
    return best * safety_factor


def lipschitz_reach_bound(net: Network, delta) -> float:
    """Upper bound on output drift of any transcript accepted at ``delta``.

    A deviation of delta planted at layer i passes through the remaining
    layers with gain at most prod_{j>i} ||A_j||_inf (ReLU is 1-Lipschitz,
    ||.||_inf is the max absolute row sum), so the total is
    delta * sum_{i=1..k} prod_{j=i+1..k} ||A_j||_inf — the i = k term is
    the final layer's own allowance. May overflow to +inf for deep or
    heavy networks; that is still a valid (vacuous) bound.
    """
    d = float(delta)
    if not (math.isfinite(d) and d >= 0.0):
        raise ValueError(f"delta must be finite and >= 0, got {delta!r}")
    if d == 0.0:
        return 0.0
    norms = [float(np.max(np.sum(np.abs(m.data), axis=1))) for m in net.layers]
    total = 0.0
    suffix = 1.0
    for n in reversed(norms):
        total += suffix
        suffix *= n
    return d * total
