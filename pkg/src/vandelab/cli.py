"""Command-line entry point.

Subcommands: gen-config, sweep, spectrum, bounds, prolate, inequalities,
limit-check.  Every flag has an environment-variable override named
VANDELAB_<FLAG> (dashes become underscores, upper case); an explicit
flag wins over the environment, which wins over the default.

Exit codes: 0 on success with no failed rows, 1 if any row failed,
2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import VandelabError
from .experiments import (
    ExperimentManifest,
    run_bounds,
    run_limit_check,
    run_prolate,
    run_spectrum,
    run_sweep,
    write_config,
)
from .geometry import EQUISPACED, LINE, PERIODIC, RANDOM, ClusterSpec, generate_config
from .hp import DEFAULT_POLICY, parse_decimal
from .suites import ALL_SUITES, DEFAULT_SUITE_SEED, default_centers

ENV_PREFIX = "VANDELAB_"


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _add_common(parser):
    parser.add_argument("--out", default=_env("out", "."),
                        help="output directory (env VANDELAB_OUT)")
    parser.add_argument("--precision-bits", type=int,
                        default=_int_env("precision_bits"),
                        help="override working precision "
                             "(env VANDELAB_PRECISION_BITS)")
    parser.add_argument("--c1", default=_env("c1", "1"),
                        help="user-supplied absolute constant "
                             "(env VANDELAB_C1)")


def _int_env(name, default=None):
    raw = _env(name)
    return int(raw) if raw is not None else default


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vandelab",
        description="High-precision Vandermonde / prolate spectrum laboratory")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-config", help="generate and store a node configuration")
    p.add_argument("--delta", required=True)
    p.add_argument("--theta", default="3.14159265358979323846")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--tau", default=None)
    p.add_argument("--centers", default=None,
                   help="comma-separated cluster centers; default even spread")
    p.add_argument("--layout", choices=[EQUISPACED, RANDOM], default=EQUISPACED)
    p.add_argument("--domain", choices=[PERIODIC, LINE], default=PERIODIC)
    p.add_argument("--seed", type=int, default=_int_env("seed", DEFAULT_SUITE_SEED))
    p.add_argument("--N", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("sweep", help="run a manifest grid sweep")
    p.add_argument("--manifest", required=True)
    p.add_argument("--workers", type=int, default=_int_env("workers", 1),
                   help="worker processes (env VANDELAB_WORKERS)")
    _add_common(p)

    for name, help_text in (
            ("spectrum", "full singular spectrum of one configuration"),
            ("bounds", "bound formulas for one configuration"),
            ("prolate", "prolate matrix eigenvalues for a line configuration")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        _add_common(p)

    p = sub.add_parser("inequalities", help="run the inequality suites")
    p.add_argument("--checks", default=",".join(ALL_SUITES),
                   help=f"comma-separated subset of {sorted(ALL_SUITES)}")
    p.add_argument("--instances", type=int, default=500)
    p.add_argument("--seed", type=int, default=_int_env("seed", DEFAULT_SUITE_SEED))
    _add_common(p)

    p = sub.add_parser("limit-check", help="prolate limit gaps over N")
    p.add_argument("--config", required=True)
    p.add_argument("--N-list", default="10,50,250")
    _add_common(p)
    return parser


def _cmd_gen_config(args) -> int:
    from mpmath import mp

    bits = args.precision_bits or DEFAULT_POLICY.floor_bits
    tau = args.tau if args.tau is not None else str(max(args.ell - 1, 0))
    spec = ClusterSpec(
        delta=parse_decimal(args.delta, bits),
        theta=parse_decimal(args.theta, bits),
        s=args.s, ell=args.ell,
        tau=parse_decimal(tau, bits))
    with mp.workprec(bits):
        if args.centers:
            centers = [parse_decimal(c, bits) for c in args.centers.split(",")]
        else:
            import math

            centers = default_centers(max(1, math.ceil(args.s / args.ell)))
        nodes = generate_config(spec, args.layout, centers, args.seed,
                                args.domain)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "config.json"
    write_config(path, nodes, spec, N=args.N, bits=bits)
    print(f"wrote {path}")
    return 0


def _cmd_sweep(args) -> int:
    manifest = ExperimentManifest.load(args.manifest)
    if args.precision_bits:
        manifest = ExperimentManifest(
            experiment_id=manifest.experiment_id, kind=manifest.kind,
            grid=manifest.grid, precision_override=args.precision_bits,
            created_at=manifest.created_at, tool_version=manifest.tool_version)
    summary = run_sweep(manifest, args.out, workers=args.workers)
    print(json.dumps(summary.to_json_dict(), indent=2))
    return 0 if summary.failed == 0 else 1


def _cmd_inequalities(args) -> int:
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = [c for c in checks if c not in ALL_SUITES]
    if unknown:
        print(f"unknown checks: {unknown}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    all_ok = True
    combined = []
    for name in checks:
        result = ALL_SUITES[name](instances=args.instances, seed=args.seed)
        combined.append(result.to_json_dict())
        all_ok = all_ok and result.all_hold
        print(f"{name}: {'ok' if result.all_hold else 'FAILED'} "
              f"({len(result.records)} records)")
    with open(out / "inequalities.json", "w", encoding="utf-8") as fh:
        json.dump(combined, fh, indent=2)
    return 0 if all_ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gen-config":
            return _cmd_gen_config(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "spectrum":
            result = run_spectrum(args.config, user_c1=args.c1,
                                  out_dir=args.out,
                                  bits_override=args.precision_bits)
            print(json.dumps(result, indent=2))
            return 0
        if args.command == "bounds":
            result = run_bounds(args.config, user_c1=args.c1,
                                out_dir=args.out,
                                bits_override=args.precision_bits)
            print(json.dumps(result, indent=2))
            return 0
        if args.command == "prolate":
            result = run_prolate(args.config, user_c1=args.c1,
                                 out_dir=args.out,
                                 bits_override=args.precision_bits)
            print(json.dumps(result, indent=2))
            return 0
        if args.command == "inequalities":
            return _cmd_inequalities(args)
        if args.command == "limit-check":
            n_list = [int(x) for x in args.N_list.split(",") if x.strip()]
            result = run_limit_check(args.config, n_list, out_dir=args.out,
                                     bits_override=args.precision_bits)
            print(json.dumps(result, indent=2))
            return 0
        raise AssertionError(f"unhandled command {args.command}")
    except VandelabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
