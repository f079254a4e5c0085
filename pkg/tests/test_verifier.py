"""Layerwise checker: acceptance semantics, residuals, edge cases."""
import json
import math

import numpy as np
import pytest

from conftest import random_dims, random_input, random_network_lists

from layersteer.network import (
    DimensionError,
    Network,
    Transcript,
    forward_trace,
)
from layersteer.verifier import report_to_json, residual_profile, verify

I2 = [[1.0, 0.0], [0.0, 1.0]]

NET = Network(
    [
        [[0.5, -1.0], [1.25, 0.75]],
        [[2.0, -0.5], [0.25, 1.0]],
        [[1.0, 1.0]],
    ]
)
X = (0.3, -0.8)


def perturbed(t, state_idx, coord, eps):
    states = [s.copy() for s in t.states]
    states[state_idx][coord] += eps
    return Transcript(tuple(states))


def test_honest_accepts_at_every_delta():
    t = forward_trace(NET, X)
    for delta in (0.0, 1e-12, 1e-3, 1.0):
        rep = verify(NET, X, t, delta)
        assert rep.accepted
        assert rep.first_failure is None
        assert all(r == 0.0 for r in rep.residuals)


def test_shifted_hidden_entry_rejected_at_that_layer():
    delta = 1e-3
    t = perturbed(forward_trace(NET, X), 1, 0, 2 * delta)
    rep = verify(NET, X, t, delta)
    assert not rep.accepted
    assert rep.first_failure == 1
    assert rep.residuals[0] > delta


def test_final_shift_residual_is_exact():
    net = Network([I2, I2])
    t = forward_trace(net, (1.0, -1.0))
    shifted = Transcript((t.states[0], t.states[1], np.array([1.25, 0.25])))
    assert residual_profile(net, (1.0, -1.0), shifted) == [0.0, 0.25]
    assert verify(net, (1.0, -1.0), shifted, 0.25).accepted
    rep = verify(net, (1.0, -1.0), shifted, 0.2)
    assert not rep.accepted and rep.first_failure == 2


def test_honest_profile_is_exactly_zero():
    assert residual_profile(NET, X, forward_trace(NET, X)) == [0.0, 0.0, 0.0]


def test_input_binding_is_bitwise():
    t = forward_trace(NET, X)
    rep = verify(NET, (0.3, -0.8 + 1e-9), t, 1e9)
    assert not rep.accepted
    assert rep.first_failure == 0
    assert "input" in rep.diagnostic

    # signed zero counts as a different input
    net = Network([I2, I2])
    t0 = forward_trace(net, (0.0, 0.5))
    flipped = Transcript((np.array([-0.0, 0.5]),) + t0.states[1:])
    assert not verify(net, (0.0, 0.5), flipped, 1e9).accepted


def test_non_finite_transcript_rejected_with_diagnostic():
    t = forward_trace(NET, X)
    states = [s.copy() for s in t.states]
    states[1][0] = float("inf")
    rep = verify(NET, X, Transcript(tuple(states)), 1e6)
    assert not rep.accepted
    assert rep.first_failure == 1
    assert "non-finite" in rep.diagnostic

    states[1][0] = float("nan")
    rep = verify(NET, X, Transcript(tuple(states)), 1e6)
    assert not rep.accepted
    assert math.isinf(rep.residuals[0])


def test_dimension_mismatch_raises_not_rejects():
    t = forward_trace(NET, X)
    with pytest.raises(DimensionError):
        verify(NET, X, Transcript(t.states[:-1]), 1e-3)
    with pytest.raises(DimensionError):
        verify(NET, (0.3, -0.8, 0.0), t, 1e-3)
    bad = Transcript((t.states[0], np.zeros(3), t.states[2], t.states[3]))
    with pytest.raises(DimensionError):
        verify(NET, X, bad, 1e-3)


def test_delta_validation():
    t = forward_trace(NET, X)
    for bad in (-1.0, float("nan"), float("inf")):
        with pytest.raises(ValueError):
            verify(NET, X, t, bad)


def test_monotonicity_random():
    rng = np.random.default_rng(11)
    for _ in range(100):
        dims = random_dims(rng, k_high=5, width_high=6)
        layers = random_network_lists(rng, dims)
        net = Network(layers)
        x = random_input(rng, dims[0])
        t = forward_trace(net, x)
        if rng.random() < 0.8:
            idx = int(rng.integers(1, len(t.states)))
            coord = int(rng.integers(0, t.states[idx].shape[0]))
            t = perturbed(t, idx, coord, float(rng.choice([-1, 1]) * 10.0 ** rng.integers(-9, 1)))
        delta = float(10.0 ** rng.integers(-6, 0))
        now = verify(net, x, t, delta).accepted
        if now:
            assert verify(net, x, t, 2 * delta).accepted
        else:
            assert not verify(net, x, t, delta / 2).accepted


def test_residual_locality():
    t = forward_trace(NET, X)
    honest = residual_profile(NET, X, t)
    for idx in (1, 2, 3):
        prof = residual_profile(NET, X, perturbed(t, idx, 0, 0.5))
        assert prof[: idx - 1] == honest[: idx - 1]


def test_report_json():
    rep = verify(NET, X, forward_trace(NET, X), 1e-3)
    doc = json.loads(report_to_json(rep))
    assert doc["accepted"] is True
    assert doc["delta"] == 1e-3
    assert doc["residuals"] == [0.0, 0.0, 0.0]
    assert doc["first_failure"] is None
