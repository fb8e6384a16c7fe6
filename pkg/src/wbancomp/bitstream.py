"""Bit-exact sequences plus MSB-first writer/reader primitives.

A BitString knows its length exactly: concatenation is length-additive and
nothing ever pads inside a value. Byte conversion zero-pads only at the end,
and the pad is outside the declared bit count.
"""

from __future__ import annotations


class BitUnderflowError(Exception):
    """A read asked for more bits than the stream still holds."""


class BitString:
    """Immutable bit sequence with explicit length, most-significant bit first."""

    __slots__ = ("_value", "_length")

    def __init__(self, value: int = 0, length: int = 0):
        if length < 0:
            raise ValueError("bit length must be non-negative")
        if value < 0 or value >> length:
            raise ValueError(f"value {value} does not fit in {length} bits")
        self._value = value
        self._length = length

    @classmethod
    def from01(cls, text: str) -> "BitString":
        """Build from a literal like '110100110'."""
        if set(text) - {"0", "1"}:
            raise ValueError(f"not a bit literal: {text!r}")
        return cls(int(text, 2) if text else 0, len(text))

    @classmethod
    def from_bytes(cls, data: bytes, bit_count: int) -> "BitString":
        if bit_count < 0 or bit_count > 8 * len(data):
            raise ValueError(f"bit_count {bit_count} exceeds {len(data)} bytes")
        pad = 8 * len(data) - bit_count
        return cls(int.from_bytes(data, "big") >> pad, bit_count)

    @property
    def uint(self) -> int:
        """The bits interpreted as an unsigned integer."""
        return self._value

    def __len__(self) -> int:
        return self._length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self._value == other._value and self._length == other._length

    def __hash__(self) -> int:
        return hash((self._value, self._length))

    def __add__(self, other: "BitString") -> "BitString":
        if not isinstance(other, BitString):
            return NotImplemented
        return BitString(
            (self._value << other._length) | other._value,
            self._length + other._length,
        )

    def __bool__(self) -> bool:
        return self._length > 0

    def bit(self, index: int) -> int:
        if not 0 <= index < self._length:
            raise IndexError(f"bit index {index} out of range")
        return (self._value >> (self._length - 1 - index)) & 1

    def to01(self) -> str:
        return format(self._value, f"0{self._length}b") if self._length else ""

    def to_bytes(self) -> bytes:
        """MSB-first bytes, zero-padded at the tail to a byte boundary."""
        nbytes = (self._length + 7) // 8
        return (self._value << (8 * nbytes - self._length)).to_bytes(nbytes, "big")

    def __repr__(self) -> str:
        return f"BitString({self.to01()!r})"


def append_bits(stream: BitString, word: BitString) -> BitString:
    """Concatenate two bit strings; length adds exactly."""
    return stream + word


class BitWriter:
    """Accumulates bits MSB-first into a growing byte buffer."""

    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0
        self._length = 0

    @property
    def bit_length(self) -> int:
        return self._length

    def write_uint(self, value: int, width: int) -> None:
        if width < 0:
            raise ValueError("width must be non-negative")
        if value < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        acc = (self._acc << width) | value
        n = self._nacc + width
        while n >= 8:
            n -= 8
            self._buf.append((acc >> n) & 0xFF)
        self._acc = acc & ((1 << n) - 1)
        self._nacc = n
        self._length += width

    def append(self, bits: BitString) -> None:
        self.write_uint(bits.uint, len(bits))

    def getvalue(self) -> tuple[bytes, int]:
        """Return (bytes, bit_count); tail bits are zero-padded into the last byte."""
        data = bytes(self._buf)
        if self._nacc:
            data += bytes([self._acc << (8 - self._nacc)])
        return data, self._length

    def to_bitstring(self) -> BitString:
        data, length = self.getvalue()
        return BitString.from_bytes(data, length)


class BitReader:
    """Reads bits MSB-first from bytes or a BitString, tracking position."""

    def __init__(self, source: bytes | bytearray | BitString, bit_count: int | None = None):
        if isinstance(source, BitString):
            if bit_count is not None and bit_count != len(source):
                raise ValueError("bit_count does not match BitString length")
            self._data = source.to_bytes()
            self._bits = len(source)
        else:
            self._data = bytes(source)
            self._bits = 8 * len(self._data) if bit_count is None else bit_count
            if self._bits < 0 or self._bits > 8 * len(self._data):
                raise ValueError(f"bit_count {bit_count} exceeds {len(self._data)} bytes")
        self._pos = 0

    @property
    def position(self) -> int:
        return self._pos

    @property
    def remaining(self) -> int:
        return self._bits - self._pos

    def read_bit(self) -> int:
        if self._pos >= self._bits:
            raise BitUnderflowError("read past end of stream")
        bit = (self._data[self._pos >> 3] >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit

    def read_uint(self, count: int) -> int:
        if count < 0:
            raise ValueError("count must be non-negative")
        if count > self.remaining:
            raise BitUnderflowError(f"requested {count} bits, {self.remaining} remain")
        value = 0
        pos = self._pos
        end = pos + count
        while pos < end:
            offset = pos & 7
            take = min(8 - offset, end - pos)
            chunk = (self._data[pos >> 3] >> (8 - offset - take)) & ((1 << take) - 1)
            value = (value << take) | chunk
            pos += take
        self._pos = end
        return value

    def read_bits(self, count: int) -> BitString:
        """Consume exactly `count` bits or raise BitUnderflowError."""
        return BitString(self.read_uint(count), count)
