"""Command-line driver.

Exit codes: 0 pass, 1 identity failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .algebra import MODELS
from .report import (MODEL_NAMES, SUITE_NAMES, SuiteConfig, UsageError, emit_report,
                     run_suite)
from .tangent import structure_tensors

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _tol(text: str):
    name, sep, val = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected <identity>=<real>, got {text!r}")
    try:
        return name, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance for {name!r} is not a number: {val!r}")


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("samples must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="moufang",
                                description="Numerical checks for continuous Moufang transformations.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run identity suites and report residuals")
    v.add_argument("--model", required=True, choices=MODEL_NAMES)
    v.add_argument("--suite", required=True, choices=SUITE_NAMES)
    v.add_argument("--samples", type=_positive, default=100)
    v.add_argument("--seed", type=_u64, default=0)
    v.add_argument("--tol", type=_tol, action="append", default=[], metavar="IDENTITY=REAL")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--out", default=None, help="write the report here instead of stdout")
    v.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identical output)")

    t = sub.add_parser("tangent", help="print the structure tensor and Mal'tsev residuals")
    t.add_argument("--model", required=True, choices=tuple(MODELS))
    t.add_argument("--samples", type=_positive, default=100)
    t.add_argument("--seed", type=_u64, default=0)

    sub.add_parser("models", help="list available models")
    return p


def _cmd_verify(args) -> int:
    cfg = SuiteConfig(args.model, args.suite, args.samples, args.seed, dict(args.tol))
    report = run_suite(cfg, timing=args.timing)
    try:
        text = emit_report(report, args.format, args.out)
    except OSError as exc:
        print(f"moufang: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_tangent(args) -> int:
    model = MODELS[args.model]
    data = structure_tensors(model)
    alg = data.algebra()
    print(f"structure constants c^i_jk of the {model.name} model (j < k, nonzero):")
    for i, j, k in zip(*np.nonzero(np.abs(data.c) > 1e-12)):
        if j < k:
            print(f"  c[{i + 1}][{j + 1}{k + 1}] = {data.c[i, j, k]:+.12g}")
    rng = np.random.default_rng(args.seed)
    x, y, z = (rng.standard_normal((args.samples, model.dim)) for _ in range(3))
    print(f"max |J| over basis triples:          {alg.basis_jacobiator_max():.6g}")
    print(f"max Mal'tsev residual (concise):     {np.max(np.abs(alg.maltsev_residual(x, y, z))):.3e}")
    print(f"max Mal'tsev residual (quartic):     {np.max(np.abs(alg.maltsev_quartic(x, y, z))):.3e}")
    print(f"max of [J(x,y,x),x] - J(x,y,[x,z]):  {np.max(np.abs(alg.maltsev_xx_variant(x, y, z))):.3e}")
    return EXIT_OK


def _cmd_models(_args) -> int:
    for name, m in MODELS.items():
        kind = "associative" if m.associative else "nonassociative"
        print(f"{name:<11} dim={m.dim}  {kind} analytic Moufang loop, chart radius {m.radius}")
    print("chein-s3    order=12  Chein double M(S3,2), finite nonassociative Moufang loop")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return {"verify": _cmd_verify, "tangent": _cmd_tangent, "models": _cmd_models}[args.command](args)
    except UsageError as exc:
        print(f"moufang: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
