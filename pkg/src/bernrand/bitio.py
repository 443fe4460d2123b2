"""Decoding and encoding bit sequences from text and bytes, plus windowing."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .measures import BitString

FORMATS = ("ascii01", "hex", "raw")


class DecodeError(ValueError):
    def __init__(self, offset: int, message: str):
        super().__init__(f"byte offset {offset}: {message}")
        self.offset = offset


_WHITESPACE = frozenset(b" \t\r\n")


def decode(data: bytes | str, fmt: str = "ascii01") -> BitString:
    """Bits from ``data``. Whitespace is ignored in the text formats.

    ``raw`` reads each byte most-significant bit first.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    if fmt == "ascii01":
        bits = []
        for i, b in enumerate(data):
            if b in _WHITESPACE:
                continue
            if b not in (0x30, 0x31):
                raise DecodeError(i, f"expected '0' or '1', got {bytes([b])!r}")
            bits.append(b - 0x30)
        return BitString(bits)
    if fmt == "hex":
        digits = []
        for i, b in enumerate(data):
            if b in _WHITESPACE:
                continue
            c = chr(b)
            if c not in "0123456789abcdefABCDEF":
                raise DecodeError(i, f"not a hex digit: {bytes([b])!r}")
            digits.append((i, int(c, 16)))
        if len(digits) % 2:
            raise DecodeError(digits[-1][0], "odd number of hex digits")
        bits = []
        for _, v in digits:
            bits.extend((v >> s) & 1 for s in (3, 2, 1, 0))
        return BitString(bits)
    if fmt == "raw":
        return BitString(b >> s & 1 for b in data for s in range(7, -1, -1))
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def encode(x: BitString, fmt: str = "ascii01") -> bytes:
    """Inverse of :func:`decode`. hex and raw need a length divisible by 8."""
    if fmt == "ascii01":
        return str(x).encode("ascii")
    if x.n % 8:
        raise ValueError(f"{fmt} encoding needs a multiple of 8 bits, got {x.n}")
    raw = bytes(int(str(x)[i : i + 8], 2) for i in range(0, x.n, 8))
    if fmt == "raw":
        return raw
    if fmt == "hex":
        return raw.hex().encode("ascii")
    raise ValueError(f"unknown format {fmt!r}")


@dataclass(frozen=True)
class Window:
    length: int
    stride: int

    def __post_init__(self):
        if self.length < 1 or self.stride < 1:
            raise ValueError("window length and stride must be positive")

    @classmethod
    def parse(cls, text: str) -> "Window":
        try:
            length, stride = (int(v) for v in text.split(":"))
        except ValueError:
            raise ValueError(f"window must be LENGTH:STRIDE, got {text!r}") from None
        return cls(length, stride)

    def count(self, total: int) -> int:
        """ceil((total - length) / stride) + 1; the last window may be short.

        With stride > length that formula can place a start past the end;
        such empty windows are dropped.
        """
        if self.length > total:
            raise ValueError(f"window length {self.length} exceeds input length {total}")
        return min(math.ceil((total - self.length) / self.stride) + 1, math.ceil(total / self.stride))

    def split(self, x: BitString) -> list[tuple[int, BitString]]:
        """(start offset, window) pairs in input order."""
        bits = x.bits
        return [
            (start, BitString(bits[start : start + self.length]))
            for start in (i * self.stride for i in range(self.count(x.n)))
        ]
