import numpy as np
import pytest


def f64_bytes(values):
    """Bit pattern of a float sequence; equality here means bitwise equality."""
    return np.asarray(values, dtype=np.float64).tobytes()


def random_dims(rng, k_low=2, k_high=12, width_high=16):
    """Layer dimensions d0..dk for a random network of depth k."""
    k = int(rng.integers(k_low, k_high + 1))
    return [int(rng.integers(1, width_high + 1)) for _ in range(k + 1)]


def random_layer_arrays(rng, dims, low=-2.0, high=2.0):
    """Row-major weight matrices as float64 arrays, entries uniform."""
    return [
        rng.uniform(low, high, size=(dims[i + 1], dims[i]))
        for i in range(len(dims) - 1)
    ]


def random_network_lists(rng, dims=None, low=-2.0, high=2.0):
    """Random network as nested Python lists (oracle-friendly form)."""
    if dims is None:
        dims = random_dims(rng)
    return [a.tolist() for a in random_layer_arrays(rng, dims, low, high)]


def random_input(rng, dim, low=-1.0, high=1.0):
    return rng.uniform(low, high, size=dim).tolist()


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
