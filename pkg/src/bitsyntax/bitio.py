"""Bit-granular reading and writing over byte buffers.

Fields are MSB-first.  Little-endian fields must be a whole number of bytes;
their bytes are reassembled least-significant-first, at any bit offset.
Reads past the end raise, except `peek_bits`, which zero-pads on the right and
reports how many bits were really there (speculative lookups near the end of
a stream need that).
"""

from __future__ import annotations

import abc
import struct

from .diagnostics import EndOfStream, StreamError

MAX_FIELD_BITS = 64


def _mask(n: int) -> int:
    return (1 << n) - 1


def _check_width(n: int, bit_position: int) -> None:
    if not 0 < n <= MAX_FIELD_BITS:
        raise StreamError(f"field width {n} out of range 1..{MAX_FIELD_BITS}", bit_position)


def _to_little(value: int, n: int, bit_position: int) -> int:
    if n % 8 != 0:
        raise StreamError(f"little-endian field width {n} is not a byte multiple", bit_position)
    return int.from_bytes(value.to_bytes(n // 8, "little"), "big")


def _sign_extend(value: int, n: int) -> int:
    if value >= 1 << (n - 1):
        value -= 1 << n
    return value


class BitCursorBase(abc.ABC):
    """Operations any bit source or sink must provide.

    Substituting a custom implementation (network buffers, mmap, ...) only
    requires these five operations; everything above works unchanged.
    """

    mode: str  # "read" | "write"

    @abc.abstractmethod
    def read_bits(self, n: int, signed: bool = False, byte_order: str = "big") -> int: ...

    @abc.abstractmethod
    def peek_bits(self, n: int, offset: int = 0) -> tuple[int, int]: ...

    @abc.abstractmethod
    def write_bits(self, n: int, value: int, signed: bool = False,
                   byte_order: str = "big") -> None: ...

    @abc.abstractmethod
    def align(self, alength: int = 8) -> int: ...

    @abc.abstractmethod
    def tell(self) -> int: ...


class BitReader(BitCursorBase):
    """Read cursor over an in-memory byte buffer."""

    mode = "read"

    def __init__(self, data: bytes, bit_length: int | None = None):
        self._data = data
        self._total_bits = 8 * len(data)
        if bit_length is not None:
            if not 0 <= bit_length <= 8 * len(data):
                raise StreamError(f"bit_length {bit_length} exceeds the buffer", 0)
            self._total_bits = bit_length
        self._pos = 0

    def tell(self) -> int:
        return self._pos

    def seek(self, bit_position: int) -> None:
        if not 0 <= bit_position <= self._total_bits:
            raise StreamError(f"seek target {bit_position} out of stream", self._pos)
        self._pos = bit_position

    @property
    def remaining_bits(self) -> int:
        return self._total_bits - self._pos

    def _extract(self, pos: int, n: int) -> int:
        first = pos // 8
        last = (pos + n + 7) // 8
        chunk = int.from_bytes(self._data[first:last], "big")
        shift = 8 * (last - first) - (pos - 8 * first) - n
        return (chunk >> shift) & _mask(n)

    def read_bits(self, n: int, signed: bool = False, byte_order: str = "big") -> int:
        _check_width(n, self._pos)
        if n > self.remaining_bits:
            raise EndOfStream(self._pos, n, self.remaining_bits)
        value = self._extract(self._pos, n)
        self._pos += n
        if byte_order == "little":
            value = _to_little(value, n, self._pos - n)
        if signed:
            value = _sign_extend(value, n)
        return value

    def peek_bits(self, n: int, offset: int = 0) -> tuple[int, int]:
        """Next n bits (after skipping `offset`), without advancing.

        Returns (value, available); when fewer than n bits remain the value is
        zero-padded on the right.
        """
        _check_width(n, self._pos)
        start = self._pos + offset
        available = max(0, min(n, self._total_bits - start))
        if available == 0:
            return 0, 0
        return self._extract(start, available) << (n - available), available

    def write_bits(self, n: int, value: int, signed: bool = False,
                   byte_order: str = "big") -> None:
        raise StreamError("cursor is read-only", self._pos)

    def align(self, alength: int = 8) -> int:
        if alength <= 0:
            raise StreamError(f"alignment length {alength} must be positive", self._pos)
        skip = -self._pos % alength
        if skip > self.remaining_bits:
            raise EndOfStream(self._pos, skip, self.remaining_bits)
        self._pos += skip
        return skip


class BitWriter(BitCursorBase):
    """Write cursor accumulating bits into an in-memory buffer."""

    mode = "write"

    def __init__(self):
        self._bytes = bytearray()
        self._acc = 0  # pending bits, MSB side first
        self._nacc = 0

    def tell(self) -> int:
        return 8 * len(self._bytes) + self._nacc

    def write_bits(self, n: int, value: int, signed: bool = False,
                   byte_order: str = "big") -> None:
        _check_width(n, self.tell())
        if signed:
            lo, hi = -(1 << (n - 1)), (1 << (n - 1)) - 1
        else:
            lo, hi = 0, (1 << n) - 1
        if not lo <= value <= hi:
            kind = "signed" if signed else "unsigned"
            raise StreamError(f"value {value} does not fit in {n} {kind} bits", self.tell())
        bits = value & _mask(n)
        if byte_order == "little":
            bits = _to_little(bits, n, self.tell())
        self._acc = (self._acc << n) | bits
        self._nacc += n
        while self._nacc >= 8:
            self._nacc -= 8
            self._bytes.append((self._acc >> self._nacc) & 0xFF)
        self._acc &= _mask(self._nacc)

    def read_bits(self, n: int, signed: bool = False, byte_order: str = "big") -> int:
        raise StreamError("cursor is write-only", self.tell())

    def peek_bits(self, n: int, offset: int = 0) -> tuple[int, int]:
        raise StreamError("cursor is write-only", self.tell())

    def align(self, alength: int = 8) -> int:
        if alength <= 0:
            raise StreamError(f"alignment length {alength} must be positive", self.tell())
        pad = -self.tell() % alength
        remaining = pad
        while remaining > 0:
            step = min(remaining, MAX_FIELD_BITS)
            self.write_bits(step, 0)
            remaining -= step
        return pad

    def getvalue(self) -> bytes:
        """Bytes written so far; a trailing partial byte is zero-padded."""
        out = bytes(self._bytes)
        if self._nacc:
            out += bytes([(self._acc << (8 - self._nacc)) & 0xFF])
        return out


def float_from_bits(raw: int, width: int) -> float:
    fmt = ">f" if width == 32 else ">d"
    return struct.unpack(fmt, raw.to_bytes(width // 8, "big"))[0]


def float_to_bits(value: float, width: int) -> int:
    fmt = ">f" if width == 32 else ">d"
    return int.from_bytes(struct.pack(fmt, value), "big")


def read_float(cursor: BitCursorBase, width: int) -> float:
    if width not in (32, 64):
        raise StreamError(f"float width must be 32 or 64, not {width}", cursor.tell())
    return float_from_bits(cursor.read_bits(width), width)


def write_float(cursor: BitCursorBase, width: int, value: float) -> None:
    if width not in (32, 64):
        raise StreamError(f"float width must be 32 or 64, not {width}", cursor.tell())
    cursor.write_bits(width, float_to_bits(value, width))
