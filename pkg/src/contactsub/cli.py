"""Command-line entry point: ``contactsub verify`` and ``contactsub list``."""

from __future__ import annotations

import argparse
import sys

from .catalog import EXAMPLES
from .errors import ConfigError
from .report import CHECKS, RunConfig, emit, run

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contactsub", description="Verify contact-complex submersion identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run checks on a catalog example")
    v.add_argument("--example", required=True)
    v.add_argument("--checks", default="all", help="comma-separated check names or 'all'")
    v.add_argument("--points", type=int, default=100)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--tol", type=float, default=1e-7)
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--out", default=None, help="write the report here instead of stdout")

    sub.add_parser("list", help="list examples and checks")
    return parser


def _list() -> bytes:
    lines = ["examples:"]
    for name, spec in EXAMPLES.items():
        lines.append(f"  {name:<24} [{', '.join(sorted(spec.tags))}] {spec.description}")
    lines.append("checks:")
    for name, c in CHECKS.items():
        req = ", ".join(sorted(c.needs)) or "-"
        cls = ", ".join(sorted(c.classes)) or "-"
        lines.append(f"  {name:<28} needs [{req}] holds on [{cls}]  {c.description}")
    return ("\n".join(lines) + "\n").encode()


def _write(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def main(argv: list | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        _write(_list(), None)
        return EXIT_PASS
    checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    if args.seed < 0:
        print("error: seed must be non-negative", file=sys.stderr)
        return EXIT_CONFIG
    config = RunConfig(args.example, checks, args.points, args.seed, args.tol, args.format)
    try:
        report = run(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _write(emit(report, args.format), args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
