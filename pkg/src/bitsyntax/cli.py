"""Command-line driver.

Subcommands: check, trace, generate, roundtrip, map-report.  Exit codes:
0 success, 1 schema diagnostics, 2 bitstream parse/generate failure, 3 I/O.
Human output goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import engine, sema
from .bitio import BitReader, BitWriter
from .diagnostics import (
    Diagnostic,
    IncludeError,
    LexError,
    ParseError,
    RunError,
)
from .frontend import resolve_includes
from .sema import Options, SyntaxSpec

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_STREAM = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitsyntax",
        description="Check bitstream syntax schemas; parse, generate and verify "
        "binary streams against them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_class: bool = True) -> None:
        p.add_argument("schema", help="schema source file (.fl)")
        p.add_argument("-I", dest="include_paths", action="append", default=[],
                       metavar="PATH", help="additional include search path")
        p.add_argument("--step", type=int, default=4,
                       help="decoder step size for maps (default 4)")
        p.add_argument("--array-max", type=int, default=1024,
                       help="default array size cap (default 1024)")
        if with_class:
            p.add_argument("--class", dest="entry_class", metavar="NAME",
                           help="entry class (default: last class declared)")

    p = sub.add_parser("check", help="compile the schema and report diagnostics")
    common(p, with_class=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("trace", help="parse a bitstream and dump its contents")
    common(p)
    p.add_argument("bitstream", help="binary input file")
    p.add_argument("--on-mismatch", choices=("abort", "warn"), default="abort")
    p.add_argument("--no-trace", action="store_true", help="only print the final line")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("generate", help="generate a bitstream from a value document")
    common(p)
    p.add_argument("document", help="JSON value document")
    p.add_argument("output", help="binary output file")
    p.add_argument("--on-mismatch", choices=("abort", "warn"), default="abort")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("roundtrip", help="parse, regenerate, and byte-compare")
    common(p)
    p.add_argument("bitstream", help="binary input file")
    p.add_argument("--on-mismatch", choices=("abort", "warn"), default="abort")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("map-report", help="print decoder statistics per map")
    common(p, with_class=False)
    p.set_defaults(func=cmd_map_report)

    return parser


def _print_diags(diags: list[Diagnostic]) -> None:
    for d in diags:
        print(d.render(), file=sys.stderr)


def load_spec(args) -> tuple[Optional[SyntaxSpec], int]:
    try:
        unit = resolve_includes(args.schema, args.include_paths)
    except IncludeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_IO
    except (LexError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_SCHEMA
    options = Options(step=args.step, array_max=args.array_max)
    spec, diags = sema.analyze_unit(unit, options)
    _print_diags(diags)
    if spec is None:
        return None, EXIT_SCHEMA
    return spec, EXIT_OK


def pick_entry_class(args, spec: SyntaxSpec) -> Optional[str]:
    name = getattr(args, "entry_class", None)
    if name is None:
        if not spec.class_order:
            print("error: the schema declares no classes", file=sys.stderr)
            return None
        name = spec.class_order[-1]
    if name not in spec.classes:
        print(f"error: class '{name}' is not declared", file=sys.stderr)
        return None
    if not spec.classes[name].is_parsable:
        print(f"error: class '{name}' is not parsable", file=sys.stderr)
        return None
    return name


def _read_binary(path: str) -> Optional[bytes]:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        print(f"error: cannot read '{path}': {exc}", file=sys.stderr)
        return None


def cmd_check(args) -> int:
    spec, code = load_spec(args)
    return code


def cmd_trace(args) -> int:
    spec, code = load_spec(args)
    if spec is None:
        return code
    entry = pick_entry_class(args, spec)
    if entry is None:
        return EXIT_SCHEMA
    data = _read_binary(args.bitstream)
    if data is None:
        return EXIT_IO
    events: list[engine.TraceEvent] = []
    hook = engine.ErrorHook(args.on_mismatch)
    try:
        obj, events = engine.parse_object(spec, entry, BitReader(data), events=events,
                                          hook=hook)
    except RunError as exc:
        if not args.no_trace and events:
            print(engine.render_trace(events))
        print(f"FAIL @ {exc.bit_position}: {exc.reason}")
        return EXIT_STREAM
    if not args.no_trace and events:
        print(engine.render_trace(events))
    print(f"OK {obj.span_bits} bits")
    return EXIT_OK


def cmd_generate(args) -> int:
    spec, code = load_spec(args)
    if spec is None:
        return code
    entry = pick_entry_class(args, spec)
    if entry is None:
        return EXIT_SCHEMA
    try:
        with open(args.document, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        print(f"error: cannot read '{args.document}': {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        document = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(f"error: malformed document: {exc}", file=sys.stderr)
        return EXIT_STREAM
    writer = BitWriter()
    hook = engine.ErrorHook(args.on_mismatch)
    try:
        bits, _ = engine.generate_object(spec, entry, document, writer, hook=hook)
    except RunError as exc:
        print(f"FAIL @ {exc.bit_position}: {exc.reason}", file=sys.stderr)
        return EXIT_STREAM
    try:
        with open(args.output, "wb") as fh:
            fh.write(writer.getvalue())
    except OSError as exc:
        print(f"error: cannot write '{args.output}': {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"OK {bits} bits")
    return EXIT_OK


def _first_differing_bit(a: bytes, b: bytes) -> int:
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return 8 * i + (8 - (x ^ y).bit_length())
    return 8 * min(len(a), len(b))


def cmd_roundtrip(args) -> int:
    spec, code = load_spec(args)
    if spec is None:
        return code
    entry = pick_entry_class(args, spec)
    if entry is None:
        return EXIT_SCHEMA
    data = _read_binary(args.bitstream)
    if data is None:
        return EXIT_IO
    hook = engine.ErrorHook(args.on_mismatch)
    try:
        obj, _ = engine.parse_object(spec, entry, BitReader(data), hook=hook)
    except RunError as exc:
        print(f"FAIL @ {exc.bit_position}: {exc.reason}")
        return EXIT_STREAM
    document = engine.extract_document(obj)
    writer = BitWriter()
    try:
        engine.generate_object(spec, entry, document, writer, hook=hook)
    except RunError as exc:
        print(f"FAIL @ {exc.bit_position}: {exc.reason}")
        return EXIT_STREAM
    regenerated = writer.getvalue()
    if regenerated == data:
        print(f"roundtrip OK {obj.span_bits} bits")
        return EXIT_OK
    bit = _first_differing_bit(data, regenerated)
    print(f"FAIL @ {bit}: regenerated stream differs")
    return EXIT_STREAM


def cmd_map_report(args) -> int:
    spec, code = load_spec(args)
    if spec is None:
        return code
    for name in spec.map_order:
        if name in spec.maps:
            print(spec.maps[name].stats.render())
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
