"""bitsyntax: compile declarative bitstream syntax descriptions and run them.

A schema (`.fl` file) describes how a binary format is laid out bit by bit:
classes of parsable fields, flow control over their declarations, and
variable-length-code tables.  This package checks such schemas, parses
bitstreams into value trees, generates bitstreams from value documents, and
verifies round trips.
"""

from .bitio import BitReader, BitWriter
from .diagnostics import (
    BitsyntaxError,
    Diagnostic,
    EndOfStream,
    GenerateFailure,
    IncludeError,
    LexError,
    Location,
    ParseError,
    ParseFailure,
    SemanticErrors,
    StreamError,
)
from .engine import (
    ErrorHook,
    ObjectValue,
    TraceEvent,
    dispatch_id,
    extract_document,
    generate_object,
    isidof,
    parse_object,
    render_trace,
)
from .frontend import parse_source, parse_unit, pretty, resolve_includes, tokenize
from .sema import Options, SyntaxSpec, analyze, analyze_unit, check_ids, fold_consts
from .vlc import (
    BitString,
    CompiledMap,
    DecisionDag,
    MapStats,
    build_decoder,
    compile_map,
    decode_symbol,
    encode_symbol,
    verify_prefix_free,
)

__version__ = "0.1.0"


def compile_schema(path: str, search_paths=(), options: Options | None = None) -> SyntaxSpec:
    """Load a schema file (resolving includes) and analyze it."""
    return analyze(resolve_includes(path, search_paths), options)


def compile_source(source: str, file_id: str = "<input>",
                   options: Options | None = None) -> SyntaxSpec:
    """Analyze schema source text directly (no include resolution)."""
    return analyze(parse_source(source, file_id), options)
