"""Little-endian binary encoding shared by all sketch structures.

Layout discipline: every serialized object starts with a one-byte type tag,
then fixed-width parameters, then state entries sorted by key with all-zero
entries pruned.  Two structures with the same queryable state therefore
serialize to identical bytes, which is what the merge and sharding tests
compare.
"""

from __future__ import annotations

import struct


class FormatError(Exception):
    """Raised when bytes do not parse as the claimed structure."""


class Writer:
    def __init__(self) -> None:
        self._parts: list[bytes] = []

    def u8(self, v: int) -> None:
        self._parts.append(struct.pack("<B", v))

    def u32(self, v: int) -> None:
        self._parts.append(struct.pack("<I", v))

    def u64(self, v: int) -> None:
        self._parts.append(struct.pack("<Q", v))

    def i64(self, v: int) -> None:
        self._parts.append(struct.pack("<q", v))

    def f64(self, v: float) -> None:
        self._parts.append(struct.pack("<d", v))

    def u128(self, v: int) -> None:
        if not 0 <= v < (1 << 128):
            raise ValueError("value out of range for u128")
        self._parts.append(v.to_bytes(16, "little"))

    def i128(self, v: int) -> None:
        if not -(1 << 127) <= v < (1 << 127):
            raise ValueError("value out of range for i128")
        self._parts.append(v.to_bytes(16, "little", signed=True))

    def blob(self, b: bytes) -> None:
        self.u32(len(b))
        self._parts.append(b)

    def raw(self, b: bytes) -> None:
        """Append pre-encoded bytes; caller owns the layout."""
        self._parts.append(b)

    def text(self, s: str) -> None:
        self.blob(s.encode())

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes) -> None:
        self._data = data
        self._pos = 0

    def _take(self, n: int) -> bytes:
        if self._pos + n > len(self._data):
            raise FormatError("truncated input")
        out = self._data[self._pos : self._pos + n]
        self._pos += n
        return out

    def u8(self) -> int:
        return struct.unpack("<B", self._take(1))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self._take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self._take(8))[0]

    def i64(self) -> int:
        return struct.unpack("<q", self._take(8))[0]

    def f64(self) -> float:
        return struct.unpack("<d", self._take(8))[0]

    def u128(self) -> int:
        return int.from_bytes(self._take(16), "little")

    def i128(self) -> int:
        return int.from_bytes(self._take(16), "little", signed=True)

    def blob(self) -> bytes:
        return self._take(self.u32())

    def text(self) -> str:
        return self.blob().decode()

    def done(self) -> bool:
        return self._pos == len(self._data)

    def expect_done(self) -> None:
        if not self.done():
            raise FormatError("trailing bytes after structure")
