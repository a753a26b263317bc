"""`%include` / `%import` resolution across schema files."""

from __future__ import annotations

import os
from typing import Sequence

from ..diagnostics import IncludeError
from . import ast
from .lexer import tokenize
from .parser import parse_unit

_ORIGIN_OF = {"include": "included", "import": "imported"}


def _locate(path: str, including_file: str, search_paths: Sequence[str]) -> str:
    candidates = [os.path.join(os.path.dirname(including_file) or ".", path)]
    candidates.extend(os.path.join(d, path) for d in search_paths)
    for cand in candidates:
        if os.path.isfile(cand):
            return os.path.normpath(cand)
    tried = ", ".join(candidates)
    raise IncludeError(f"cannot find '{path}' (tried: {tried})")


def _load_unit(path: str) -> ast.Ast:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise IncludeError(f"cannot read '{path}': {exc}") from exc
    return parse_unit(tokenize(source, path), path)


def resolve_includes(entry_file: str, search_paths: Sequence[str] = ()) -> ast.Ast:
    """Parse a file and splice in everything it includes or imports.

    Each distinct file is merged once (the first directive wins); a cycle is
    reported with the full chain.  Merged declarations keep an origin flag so
    later stages can tell main-file declarations from pulled-in ones, though
    execution treats them all the same.
    """
    entry_file = os.path.normpath(entry_file)
    if not os.path.isfile(entry_file):
        raise IncludeError(f"cannot find '{entry_file}'")
    merged_files: set[str] = set()
    active_chain: list[str] = []

    def resolve(path: str, origin: str) -> list[ast.TopItem]:
        if path in active_chain:
            chain = " -> ".join(active_chain[active_chain.index(path) :] + [path])
            raise IncludeError(f"inclusion cycle: {chain}")
        if path in merged_files:
            return []
        merged_files.add(path)
        active_chain.append(path)
        unit = _load_unit(path)
        items: list[ast.TopItem] = []
        for item in unit.items:
            if isinstance(item, ast.IncludeItem):
                target = _locate(item.path, path, search_paths)
                items.extend(resolve(target, _ORIGIN_OF[item.kind]))
            else:
                if origin != "main" and item.origin == "main":
                    item.origin = origin
                items.append(item)
        active_chain.pop()
        return items

    result = ast.Ast(items=resolve(entry_file, "main"), file=entry_file)
    return result
