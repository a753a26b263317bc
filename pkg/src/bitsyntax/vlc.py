"""Variable-length-code tables: unique-decodability checks, compiled decoders.

Decoding uses a hybrid multi-bit scheme: each stage reads
max(step, length of the shortest codeword still possible) bits at once.
Complete matches terminate at that stage; all partial matches share a descent
into a child stage, so table size stays linear in the number of entries
instead of exponential in codeword length.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union

from .bitio import BitCursorBase
from .diagnostics import BitsyntaxError


class VlcError(BitsyntaxError):
    pass


class VlcDecodeError(VlcError):
    def __init__(self, map_name: str, bit_position: int, detail: str = "no matching codeword"):
        super().__init__(f"vlc lookup failed in map '{map_name}' @ bit {bit_position}: {detail}")
        self.map_name = map_name
        self.bit_position = bit_position


class VlcEncodeError(VlcError):
    def __init__(self, map_name: str, value: Any):
        super().__init__(f"map '{map_name}' has no entry able to represent {value!r}")
        self.map_name = map_name
        self.value = value


@dataclass(frozen=True)
class BitString:
    """A value together with an explicit bit length."""

    value: int
    bit_length: int

    def __post_init__(self):
        if not 1 <= self.bit_length <= 64:
            raise VlcError(f"bit string length {self.bit_length} out of range 1..64")
        if not 0 <= self.value < (1 << self.bit_length):
            raise VlcError(f"value {self.value} does not fit in {self.bit_length} bits")

    def bit(self, i: int) -> int:
        """i-th bit, MSB first."""
        return (self.value >> (self.bit_length - 1 - i)) & 1

    def is_prefix_of(self, other: "BitString") -> bool:
        if self.bit_length > other.bit_length:
            return False
        return other.value >> (other.bit_length - self.bit_length) == self.value

    def __str__(self) -> str:
        return f"0b{self.value:0{self.bit_length}b}"


@dataclass(frozen=True)
class PrefixViolation:
    first_index: int
    second_index: int
    first: BitString
    second: BitString

    def __str__(self) -> str:
        rel = "duplicates" if self.first == self.second else "is a prefix of"
        return f"codeword {self.first} (entry {self.first_index}) {rel} {self.second} (entry {self.second_index})"


def verify_prefix_free(codewords: list[BitString]) -> Optional[PrefixViolation]:
    """None when no codeword is a prefix of (or equal to) another.

    Otherwise the first violating pair in declaration order: the earliest
    second entry, then the earliest first entry it conflicts with.
    """
    if not codewords:
        raise VlcError("a map needs at least one entry")
    root: dict = {}
    for j, code in enumerate(codewords):
        node = root
        conflict = None
        for i in range(code.bit_length):
            if "end" in node:  # an existing codeword is a proper prefix of this one
                conflict = node["end"]
                break
            node = node.setdefault(code.bit(i), {})
        if conflict is None:
            if "end" in node:
                conflict = node["end"]  # duplicate
            else:
                conflict = _earliest_terminal(node)  # this one prefixes an existing codeword
        if conflict is not None:
            return PrefixViolation(conflict, j, codewords[conflict], codewords[j])
        node["end"] = j
    return None


def _earliest_terminal(node: dict) -> Optional[int]:
    best = node.get("end")
    for bit in (0, 1):
        child = node.get(bit)
        if child is not None:
            sub = _earliest_terminal(child)
            if sub is not None and (best is None or sub < best):
                best = sub
    return best


# --------------------------------------------------------------------------
# Decision DAG


@dataclass(frozen=True)
class Leaf:
    entry: int  # index into the map's entry list
    consumed: int  # bits this match consumes at its node (<= node width)


@dataclass
class Descend:
    child: "DecisionNode"


Outcome = Union[Leaf, Descend, None]  # None = explicit failure slot

_DENSE_LIMIT = 1 << 12


class DecisionNode:
    """One lookup stage: read `width` bits, dispatch on their value.

    Small tables are dense lists (failure slots materialized as None); very
    wide stages fall back to a hash table with identical O(1) dispatch.
    """

    __slots__ = ("width", "_list", "_dict", "leaves")

    def __init__(self, width: int):
        self.width = width
        size = 1 << width
        if size <= _DENSE_LIMIT:
            self._list: Optional[list[Outcome]] = [None] * size
            self._dict: Optional[dict[int, Outcome]] = None
        else:
            self._list = None
            self._dict = {}
        self.leaves: list[Leaf] = []  # complete matches, ascending consumed length

    def set(self, slot: int, outcome: Outcome) -> None:
        if self._list is not None:
            if self._list[slot] is not None:
                raise VlcError("decoder table slot assigned twice")
            self._list[slot] = outcome
        else:
            if slot in self._dict:  # type: ignore[operator]
                raise VlcError("decoder table slot assigned twice")
            self._dict[slot] = outcome  # type: ignore[index]

    def lookup(self, slot: int) -> Outcome:
        if self._list is not None:
            return self._list[slot]
        return self._dict.get(slot)  # type: ignore[union-attr]

    def filled_slots(self) -> list[tuple[int, Outcome]]:
        if self._list is not None:
            return [(i, o) for i, o in enumerate(self._list) if o is not None]
        return sorted(self._dict.items())  # type: ignore[union-attr]


@dataclass
class DecisionDag:
    root: DecisionNode
    step: int
    max_code_length: int

    def walk(self) -> list[DecisionNode]:
        nodes = [self.root]
        i = 0
        while i < len(nodes):
            for _, outcome in nodes[i].filled_slots():
                if isinstance(outcome, Descend):
                    nodes.append(outcome.child)
            i += 1
        return nodes

    @property
    def node_count(self) -> int:
        return len(self.walk())

    @property
    def slot_count(self) -> int:
        return sum(1 << n.width for n in self.walk())

    @property
    def depth(self) -> int:
        def node_depth(node: DecisionNode) -> int:
            best = 1
            for _, outcome in node.filled_slots():
                if isinstance(outcome, Descend):
                    best = max(best, 1 + node_depth(outcome.child))
            return best

        return node_depth(self.root)


def build_decoder(codewords: list[BitString], step: int = 4) -> DecisionDag:
    """Compile a prefix-free codeword list into a decision DAG."""
    if not 1 <= step <= 16:
        raise VlcError(f"step size {step} out of range 1..16")
    items = [(c.value, c.bit_length, i) for i, c in enumerate(codewords)]
    root = _build_node(items, step)
    return DecisionDag(root, step, max(c.bit_length for c in codewords))


def _build_node(items: list[tuple[int, int, int]], step: int) -> DecisionNode:
    width = max(step, min(length for _, length, _ in items))
    node = DecisionNode(width)
    groups: dict[int, list[tuple[int, int, int]]] = {}
    for value, length, entry in items:
        if length <= width:
            leaf = Leaf(entry, length)
            node.leaves.append(leaf)
            base = value << (width - length)
            for tail in range(1 << (width - length)):
                node.set(base | tail, leaf)
        else:
            prefix = value >> (length - width)
            rest = value & ((1 << (length - width)) - 1)
            groups.setdefault(prefix, []).append((rest, length - width, entry))
    node.leaves.sort(key=lambda leaf: leaf.consumed)
    for prefix, group in groups.items():
        node.set(prefix, Descend(_build_node(group, step)))
    return node


# --------------------------------------------------------------------------
# Compiled maps


@dataclass
class DirectEntry:
    code: BitString
    value: Any  # scalar, or tuple of field values for class-typed outputs


@dataclass
class EscapeEntry:
    code: BitString
    width: Optional[int] = None  # fixed extension width, or None for a nested map
    signed: bool = False
    nested: Optional["CompiledMap"] = None


MapEntry = Union[DirectEntry, EscapeEntry]


@dataclass(frozen=True)
class MapStats:
    name: str
    entries: int
    min_length: int
    max_length: int
    nodes: int
    slots: int
    depth: int

    def render(self) -> str:
        return (
            f"{self.name} entries={self.entries} minlen={self.min_length} "
            f"maxlen={self.max_length} nodes={self.nodes} slots={self.slots} depth={self.depth}"
        )


@dataclass
class CompiledMap:
    name: str
    entries: list[MapEntry]
    decoder: DecisionDag
    encoder_index: dict[Any, BitString] = field(default_factory=dict)

    @property
    def direct(self) -> list[DirectEntry]:
        return [e for e in self.entries if isinstance(e, DirectEntry)]

    @property
    def escapes(self) -> list[EscapeEntry]:
        return [e for e in self.entries if isinstance(e, EscapeEntry)]

    @property
    def stats(self) -> MapStats:
        lens = [e.code.bit_length for e in self.entries]
        return MapStats(
            self.name,
            len(self.entries),
            min(lens),
            max(lens),
            self.decoder.node_count,
            self.decoder.slot_count,
            self.decoder.depth,
        )


def compile_map(name: str, entries: list[MapEntry], step: int = 4) -> CompiledMap:
    """Verify unique decodability and build the decoder; raises on violation."""
    violation = verify_prefix_free([e.code for e in entries])
    if violation is not None:
        raise VlcError(f"map '{name}' is not uniquely decodable: {violation}")
    decoder = build_decoder([e.code for e in entries], step)
    index: dict[Any, BitString] = {}
    for entry in entries:
        if isinstance(entry, DirectEntry) and entry.value not in index:
            index[entry.value] = entry.code
    return CompiledMap(name, entries, decoder, index)


def decode_symbol(cmap: CompiledMap, cursor: BitCursorBase) -> tuple[Any, int]:
    """Decode one symbol; returns (value, bits consumed, including extensions)."""
    node = cmap.decoder.root
    consumed = 0
    while True:
        window, available = cursor.peek_bits(node.width)
        outcome = node.lookup(window)
        if isinstance(outcome, Leaf):
            if outcome.consumed > available:
                raise VlcDecodeError(cmap.name, cursor.tell(), "end of stream inside codeword")
            cursor.read_bits(outcome.consumed)
            consumed += outcome.consumed
            entry = cmap.entries[outcome.entry]
            if isinstance(entry, EscapeEntry):
                if entry.nested is not None:
                    value, extra = decode_symbol(entry.nested, cursor)
                else:
                    value = cursor.read_bits(entry.width, signed=entry.signed)
                    extra = entry.width
                return value, consumed + extra
            return entry.value, consumed
        if isinstance(outcome, Descend):
            if available < node.width:
                raise VlcDecodeError(cmap.name, cursor.tell(), "end of stream inside codeword")
            cursor.read_bits(node.width)
            consumed += node.width
            node = outcome.child
            continue
        raise VlcDecodeError(cmap.name, cursor.tell())


def _escape_fits(entry: EscapeEntry, value: Any) -> bool:
    if entry.width is None or not isinstance(value, int):
        return False
    if entry.signed:
        return -(1 << (entry.width - 1)) <= value < 1 << (entry.width - 1)
    return 0 <= value < 1 << entry.width


def encode_symbol(cmap: CompiledMap, value: Any, sink: BitCursorBase) -> int:
    """Encode one value; direct entries win over escapes, escapes are tried in
    declaration order, first one whose extension can represent the value."""
    try:
        code = cmap.encoder_index.get(value)
    except TypeError:  # unhashable (shouldn't happen for compiled values)
        code = None
    if code is not None:
        sink.write_bits(code.bit_length, code.value)
        return code.bit_length
    for entry in cmap.escapes:
        if entry.nested is not None:
            try:
                encode_symbol(entry.nested, value, _Probe())
            except VlcEncodeError:
                continue
            sink.write_bits(entry.code.bit_length, entry.code.value)
            return entry.code.bit_length + encode_symbol(entry.nested, value, sink)
        if _escape_fits(entry, value):
            sink.write_bits(entry.code.bit_length, entry.code.value)
            sink.write_bits(entry.width, value, signed=entry.signed)
            return entry.code.bit_length + entry.width
    raise VlcEncodeError(cmap.name, value)


class _Probe(BitCursorBase):
    """Throwaway sink used to test whether a nested-map encode would succeed."""

    mode = "write"

    def __init__(self):
        self.bits = 0

    def write_bits(self, n: int, value: int, signed: bool = False,
                   byte_order: str = "big") -> None:
        self.bits += n

    def read_bits(self, n: int, signed: bool = False, byte_order: str = "big") -> int:
        raise VlcError("probe sink cannot read")

    def peek_bits(self, n: int, offset: int = 0) -> tuple[int, int]:
        raise VlcError("probe sink cannot peek")

    def align(self, alength: int = 8) -> int:
        return 0

    def tell(self) -> int:
        return self.bits
