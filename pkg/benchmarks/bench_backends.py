"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_backends.py [--repeats N]

Times matvec_relu on a few layer shapes and a whole forward pass,
printing one table row per shape. Results are bitwise identical across
backends (the test suite asserts this); the point here is the speed gap.
"""

import argparse
import timeit

import numpy as np

from layersteer import Matrix, Network, forward, kernels

SHAPES = [(4, 4), (16, 16), (64, 64), (256, 256)]
FORWARD_DIMS = (16, 32, 32, 32, 8)


def time_matvec(a, x, repeats):
    n = max(1, repeats)
    best = min(
        timeit.repeat(lambda: kernels.matvec_relu(a, x), number=n, repeat=5)
    )
    return best / n


def time_forward(net, x, repeats):
    n = max(1, repeats // 10)
    best = min(timeit.repeat(lambda: forward(net, x), number=n, repeat=5))
    return best / n


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000,
                        help="inner-loop calls per timing sample")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rows = []
    for shape in SHAPES:
        a = rng.uniform(-2.0, 2.0, size=shape)
        x = rng.uniform(-1.0, 1.0, size=shape[1])
        times = {}
        for name in ("compiled", "python"):
            prev = kernels.use(name)
            try:
                times[name] = time_matvec(a, x, args.repeats)
            finally:
                kernels.use(prev)
        rows.append((f"matvec_relu {shape[0]}x{shape[1]}", times))

    net = Network([
        Matrix(rng.uniform(-2.0, 2.0, size=(FORWARD_DIMS[i + 1], FORWARD_DIMS[i])))
        for i in range(len(FORWARD_DIMS) - 1)
    ])
    x = rng.uniform(-1.0, 1.0, size=FORWARD_DIMS[0])
    times = {}
    for name in ("compiled", "python"):
        prev = kernels.use(name)
        try:
            times[name] = time_forward(net, x, args.repeats)
        finally:
            kernels.use(prev)
    dims = "x".join(str(d) for d in FORWARD_DIMS)
    rows.append((f"forward {dims}", times))

    width = max(len(label) for label, _ in rows)
    print(f"{'case'.ljust(width)}  {'compiled':>12}  {'python':>12}  {'speedup':>8}")
    for label, times in rows:
        speed = times["python"] / times["compiled"]
        print(
            f"{label.ljust(width)}  {times['compiled'] * 1e6:>10.2f}us"
            f"  {times['python'] * 1e6:>10.2f}us  {speed:>7.1f}x"
        )


if __name__ == "__main__":
    main()
