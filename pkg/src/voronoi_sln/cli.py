"""Command-line entry point ``voronoi-sln``.

Exit codes: 0 success, 1 result differs from ``--expect``, 2 usage error,
3 an internal invariant failed.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import engine
from .complex import CellComplex
from .exactmath import ContractError
from .groupring import laplacian_prime

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _dump(obj, out: str | None):
    text = json.dumps(obj, indent=1, sort_keys=False) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_complex(args) -> CellComplex:
    if args.input:
        c = CellComplex.from_json(json.loads(Path(args.input).read_text()))
        if c.N != args.n:
            raise UsageError(f"--in holds a complex for N={c.N}, not N={args.n}")
        return c
    return engine.get_complex(args.n, args.cache_dir)


def cmd_build(args):
    _dump(engine.get_complex(args.n, args.cache_dir).to_json(), args.out)
    return EXIT_OK


def cmd_verify(args):
    results = engine.verify_all(args.n, c=_load_complex(args))
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}{'  ' + r.detail if r.detail else ''}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVARIANT


def cmd_laplacian(args):
    c = _load_complex(args)
    degree = engine.homological_degree(args.n) if args.degree is None else args.degree
    if not c.orbits_in(degree):
        raise UsageError(f"no cells of degree {degree} for N={args.n} "
                         f"(degrees present: {c.degrees})")
    _dump(laplacian_prime(c, degree).to_json(degree=degree), args.out)
    return EXIT_OK


def cmd_rep(args):
    rep = engine.get_rep(args.n)
    _dump(rep.to_json(limit=args.limit), args.out)
    return EXIT_OK


def _report(cert, expect) -> int:
    print(cert.statement())
    print(json.dumps(cert.to_json()))
    if expect is not None and cert.corank != expect:
        print(f"MISMATCH: expected {expect}, got {cert.corank}")
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_certify(args):
    return _report(engine.certify(args.n, args.cache_dir), args.expect)


def cmd_reproduce(args):
    targets = [3, 4] if args.extended else [3]
    code = EXIT_OK
    for N in targets:
        code = max(code, _report(engine.certify(N, args.cache_dir), engine.EXPECTED_CORANK[N]))
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="voronoi-sln",
                                description="Exact Laplacian coranks for SL_N(Z), N = 2, 3, 4.")
    p.add_argument("--cache-dir", default=None,
                   help=f"cache directory (default: ${engine.CACHE_ENV}, or no cache)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker cap (the computation is sequential; accepted for compatibility)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_n(sp):
        sp.add_argument("--n", type=int, choices=(2, 3, 4), required=True)

    sp = sub.add_parser("build", help="compute the cell complex and write it as JSON")
    with_n(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("verify", help="run the invariant checks")
    with_n(sp)
    sp.add_argument("--in", dest="input")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("laplacian", help="write the modified Laplacian as JSON")
    with_n(sp)
    sp.add_argument("--degree", type=int)
    sp.add_argument("--in", dest="input")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_laplacian)

    sp = sub.add_parser("rep", help="write the coefficient representation as JSON")
    with_n(sp)
    sp.add_argument("--limit", type=int, default=None, help="only the first k group elements")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_rep)

    sp = sub.add_parser("certify", help="compute and cross-check the corank")
    with_n(sp)
    sp.add_argument("--expect", type=int)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("reproduce", help="certify N=3 (and N=4 with --extended)")
    sp.add_argument("--extended", action="store_true")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (engine.CheckFailed, ContractError) as e:
        print(f"invariant failure: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
