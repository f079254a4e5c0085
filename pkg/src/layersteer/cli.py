"""Command-line front end.

Wires the library into reproducible file-based workflows: generate a
random network, plant the trigger channel, steer an inference, check a
transcript, audit two models against each other, and run the whole
story end to end from a single seed.

Exit codes: 0 on success, 1 when a check fails on its merits (a
rejected transcript, a failed audit), 2 for usage and input-format
problems.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .attack import compute_M, meta_to_json, steered_from_meta_json, transform
from .audit import AuditConfig, audit_equivalence, estimate_output_bound, lipschitz_reach_bound
from .network import (
    Matrix,
    Network,
    forward,
    forward_trace,
    linf_norm,
    network_from_json,
    network_to_json,
    transcript_from_json,
    transcript_to_json,
    vector_from_json,
    vector_to_json,
)
from .steering import steer
from .verifier import report_to_json, residual_profile, verify

_EXIT_OK = 0
_EXIT_FAILED = 1
_EXIT_USAGE = 2

_REMARK_DEFAULTS = (20.0, 1e-3, 2.0, 20)


# ---------------------------------------------------------------------------
# small file helpers


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _out_path(args, name: str) -> str:
    if os.path.isabs(name):
        return name
    return os.path.join(args.output_dir, name)


def _write_text(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")


def _load_network(path: str) -> Network:
    return network_from_json(_read_text(path))


def _emit(args, text: str) -> None:
    """Print to stdout, and also write --out when the flag is present."""
    print(text)
    out = getattr(args, "out", None)
    if out:
        _write_text(_out_path(args, out), text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gen(args) -> int:
    dims = list(args.dims)
    if len(dims) < 3:
        raise ValueError(
            "--dims needs an input width, at least one hidden width, and an "
            "output width (three or more numbers)"
        )
    if any(d < 1 for d in dims):
        raise ValueError("--dims entries must be positive")
    if not (args.scale > 0.0):
        raise ValueError("--scale must be positive")
    rng = np.random.default_rng(args.seed)
    layers = [
        Matrix(rng.uniform(-args.scale, args.scale, size=(dims[i + 1], dims[i])))
        for i in range(len(dims) - 1)
    ]
    path = _out_path(args, args.out)
    _write_text(path, network_to_json(Network(layers)))
    print(path)
    return _EXIT_OK


def _cmd_transform(args) -> int:
    net = _load_network(args.network)
    sn = transform(net, delta=args.delta, R=args.big_r, g=args.gain)
    out = _out_path(args, args.out)
    meta = _out_path(args, args.meta) if args.meta else _meta_path_for(out)
    _write_text(out, network_to_json(sn.net))
    _write_text(meta, meta_to_json(sn))
    print(out)
    print(meta)
    return _EXIT_OK


def _meta_path_for(out: str) -> str:
    root, ext = os.path.splitext(out)
    return root + ".meta" + (ext or ".json")


def _cmd_eval(args) -> int:
    net = _load_network(args.network)
    x = vector_from_json(_read_text(args.input))
    _emit(args, vector_to_json(forward(net, x)))
    return _EXIT_OK


def _cmd_trace(args) -> int:
    net = _load_network(args.network)
    x = vector_from_json(_read_text(args.input))
    _emit(args, transcript_to_json(forward_trace(net, x)))
    return _EXIT_OK


def _cmd_steer(args) -> int:
    net = _load_network(args.network)
    sn = steered_from_meta_json(net, _read_text(args.meta))
    x = vector_from_json(_read_text(args.input))
    z = vector_from_json(_read_text(args.target))
    cert = steer(sn, x, z)
    _write_text(_out_path(args, args.out), transcript_to_json(cert.transcript))
    summary = {
        "target_error": cert.target_error,
        "residual_profile": residual_profile(sn.net, x, cert.transcript),
        "transcript": _out_path(args, args.out),
    }
    print(json.dumps(summary, indent=2))
    return _EXIT_OK


def _cmd_verify(args) -> int:
    net = _load_network(args.network)
    x = vector_from_json(_read_text(args.input))
    t = transcript_from_json(_read_text(args.transcript))
    report = verify(net, x, t, args.delta)
    print(report_to_json(report))
    return _EXIT_OK if report.accepted else _EXIT_FAILED


def _audit_config(args) -> AuditConfig:
    return AuditConfig(
        sample_count=args.samples,
        sampler="corpus" if args.corpus else "uniform",
        low=args.low,
        high=args.high,
        corpus_path=args.corpus,
        mode=args.mode,
        tolerance=args.tolerance,
    )


def _cmd_audit(args) -> int:
    a = _load_network(args.network)
    b = _load_network(args.against)
    report = audit_equivalence(a, b, _audit_config(args), args.seed)
    payload = {
        "passed": report.passed,
        "max_discrepancy": report.max_discrepancy,
        "samples_checked": report.samples_checked,
        "worst_input": None if report.worst_input is None else report.worst_input.tolist(),
    }
    print(json.dumps(payload, indent=2))
    return _EXIT_OK if report.passed else _EXIT_FAILED


def _cmd_bound(args) -> int:
    net = _load_network(args.network)
    if args.kind == "reach":
        if args.delta is None:
            raise ValueError("bound reach needs --delta")
        value = lipschitz_reach_bound(net, args.delta)
    else:
        cfg = AuditConfig(sample_count=args.samples, low=args.low, high=args.high)
        value = estimate_output_bound(net, cfg, args.seed, safety_factor=args.safety_factor)
    print(repr(value))
    return _EXIT_OK


def _cmd_demo_remark(args) -> int:
    params = (args.big_r, args.delta, args.gain, args.depth)
    m = compute_M(*params)
    print(f"R = {args.big_r!r}  delta = {args.delta!r}  g = {args.gain!r}  k = {args.depth}")
    print(f"M = {m!r}")
    if params == _REMARK_DEFAULTS and not (0.15 <= m <= 0.16):
        print("expected M in [0.15, 0.16] for the stock parameters", file=sys.stderr)
        return _EXIT_FAILED
    return _EXIT_OK


def _cmd_e2e(args) -> int:
    result = run_e2e(
        seed=args.seed,
        delta=args.delta,
        r_margin=args.r_margin,
        dims=tuple(args.dims),
    )
    print(result_to_json(result))
    ok = result.audit_passed and result.verifier_accepted
    return _EXIT_OK if ok else _EXIT_FAILED


# ---------------------------------------------------------------------------
# the end-to-end scenario, importable so tests can drive it in-process


@dataclass(frozen=True)
class DemoScenarioResult:
    """Outcome of one seeded end-to-end run.

    The point of the exercise: ``audit_passed`` and ``verifier_accepted``
    can both be true while ``steering_gap`` — how far the accepted output
    sits from the honest one — is large.
    """

    seed: int
    delta: float
    R: float
    M: float
    audit_passed: bool
    verifier_accepted: bool
    honest_output: tuple
    achieved_output: tuple
    steering_gap: float


def result_to_json(result: DemoScenarioResult) -> str:
    payload = {
        "seed": result.seed,
        "delta": result.delta,
        "R": result.R,
        "M": result.M,
        "audit_passed": result.audit_passed,
        "verifier_accepted": result.verifier_accepted,
        "honest_output": list(result.honest_output),
        "achieved_output": list(result.achieved_output),
        "steering_gap": result.steering_gap,
    }
    return json.dumps(payload, indent=2)


def _staged(stage: str, fn, *fn_args, **fn_kwargs):
    try:
        return fn(*fn_args, **fn_kwargs)
    except ValueError as exc:
        raise ValueError(f"{stage}: {exc}") from exc


def run_e2e(
    seed: int,
    delta: float = 1e-3,
    r_margin: float = 1.5,
    dims: tuple = (4, 8, 8, 6, 3),
    audit_samples: int = 200,
) -> DemoScenarioResult:
    """Generate, transform, audit, steer, and check — one seed, one story."""
    if not (isinstance(delta, (int, float)) and delta > 0.0 and np.isfinite(delta)):
        raise ValueError("the steering construction requires a tolerance delta > 0")
    if not (r_margin > 0.0 and np.isfinite(r_margin)):
        raise ValueError("--r-margin must be positive and finite")
    if len(dims) < 3:
        raise ValueError("--dims needs at least three widths")

    net_rng = np.random.default_rng([seed, 0])
    layers = [
        Matrix(net_rng.uniform(-1.0, 1.0, size=(dims[i + 1], dims[i])))
        for i in range(len(dims) - 1)
    ]
    net = Network(layers)
    x = np.random.default_rng([seed, 1]).uniform(-1.0, 1.0, dims[0])

    honest = forward(net, x)
    cfg = AuditConfig(sample_count=audit_samples)
    estimate = _staged("estimate", estimate_output_bound, net, cfg, seed)
    big_r = r_margin * max(estimate, linf_norm(honest))
    if big_r == 0.0:
        big_r = r_margin  # an all-zero network still deserves a demo

    sn = _staged("transform", transform, net, delta=delta, R=big_r)
    audit_report = _staged("audit", audit_equivalence, net, sn.net, cfg, seed)

    z = np.random.default_rng([seed, 2]).uniform(-big_r, big_r, net.output_dim)
    cert = _staged("steer", steer, sn, x, z)
    verdict = _staged("verify", verify, sn.net, x, cert.transcript, delta)

    gap = linf_norm(cert.achieved.entries - honest.entries)
    return DemoScenarioResult(
        seed=seed,
        delta=float(delta),
        R=big_r,
        M=sn.params.M,
        audit_passed=audit_report.passed,
        verifier_accepted=verdict.accepted,
        honest_output=tuple(honest.tolist()),
        achieved_output=tuple(cert.achieved.tolist()),
        steering_gap=gap,
    )


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layersteer",
        description="Build, steer, and check layerwise-approximate inference transcripts.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for anything random")
    common.add_argument(
        "--output-dir", default=".", help="directory for files written by the command"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="write a random dense network")
    p.add_argument("--dims", type=int, nargs="+", required=True, metavar="W",
                   help="layer widths, input through output (three or more)")
    p.add_argument("--scale", type=float, default=1.0, help="weights drawn from [-scale, scale]")
    p.add_argument("--out", default="network.json")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("transform", parents=[common],
                       help="plant the trigger channel in a network")
    p.add_argument("--network", required=True)
    p.add_argument("--delta", type=float, required=True, help="verifier tolerance to target")
    p.add_argument("--big-r", type=float, required=True, metavar="R",
                   help="output bound the steering range should cover")
    p.add_argument("--gain", type=float, default=None,
                   help="trigger gain per hidden layer (default: the network's weight bound)")
    p.add_argument("--out", default="steered.json")
    p.add_argument("--meta", default=None,
                   help="where to write the steering metadata (default: <out>.meta.json)")
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("eval", parents=[common], help="run a network forward")
    p.add_argument("--network", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("trace", parents=[common], help="emit the honest layer-by-layer transcript")
    p.add_argument("--network", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("steer", parents=[common],
                       help="craft a delta-consistent transcript hitting a target output")
    p.add_argument("--network", required=True, help="the transformed network")
    p.add_argument("--meta", required=True, help="metadata written by transform")
    p.add_argument("--input", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--out", default="transcript.json")
    p.set_defaults(func=_cmd_steer)

    p = sub.add_parser("verify", parents=[common], help="check a transcript layer by layer")
    p.add_argument("--network", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--transcript", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("audit", parents=[common],
                       help="compare two networks on sampled or corpus inputs")
    p.add_argument("--network", required=True)
    p.add_argument("--against", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--low", type=float, default=-1.0)
    p.add_argument("--high", type=float, default=1.0)
    p.add_argument("--corpus", default=None, help="NDJSON file of input vectors")
    p.add_argument("--mode", choices=("bitwise", "tolerance"), default="bitwise")
    p.add_argument("--tolerance", type=float, default=0.0)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("bound", parents=[common], help="output-bound estimate or reach bound")
    p.add_argument("kind", choices=("output", "reach"))
    p.add_argument("--network", required=True)
    p.add_argument("--delta", type=float, default=None, help="tolerance (reach only)")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--low", type=float, default=-1.0)
    p.add_argument("--high", type=float, default=1.0)
    p.add_argument("--safety-factor", type=float, default=1.0)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("demo-remark", parents=[common],
                       help="the headline steering-weight calculation")
    p.add_argument("--big-r", type=float, default=_REMARK_DEFAULTS[0], metavar="R")
    p.add_argument("--delta", type=float, default=_REMARK_DEFAULTS[1])
    p.add_argument("--gain", type=float, default=_REMARK_DEFAULTS[2])
    p.add_argument("--depth", type=int, default=_REMARK_DEFAULTS[3])
    p.set_defaults(func=_cmd_demo_remark)

    p = sub.add_parser("e2e", parents=[common],
                       help="seeded end-to-end run: gen, transform, audit, steer, verify")
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--r-margin", type=float, default=1.5)
    p.add_argument("--dims", type=int, nargs="+", default=[4, 8, 8, 6, 3])
    p.set_defaults(func=_cmd_e2e)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else _EXIT_USAGE
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"layersteer: error: {exc}", file=sys.stderr)
        return _EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
