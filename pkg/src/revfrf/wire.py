"""Compact byte encodings shared by the message and file formats.

Selection vectors pack one bit per entry; split vectors pack two bits per
entry (00 zero, 01 plus one, 10 minus one).  All counts and lengths are
big-endian and fixed width.
"""

from __future__ import annotations

import struct

import numpy as np

__all__ = [
    "pack_bits",
    "unpack_bits",
    "pack_trits",
    "unpack_trits",
    "pack_u16",
    "pack_u32",
    "pack_f64",
    "read_u16",
    "read_u32",
    "read_f64",
]


def pack_bits(vec: np.ndarray) -> bytes:
    """0/1 vector -> 4-byte count + bit-packed payload."""
    vec = np.asarray(vec, dtype=np.uint8)
    return struct.pack(">I", len(vec)) + np.packbits(vec).tobytes()


def unpack_bits(buf: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    (n,) = struct.unpack_from(">I", buf, offset)
    offset += 4
    nbytes = (n + 7) // 8
    bits = np.unpackbits(np.frombuffer(buf[offset : offset + nbytes], dtype=np.uint8))[:n]
    return bits.astype(np.uint8), offset + nbytes


def pack_trits(vec: np.ndarray) -> bytes:
    """{-1, 0, 1} vector -> 4-byte count + 2-bit-packed payload."""
    vec = np.asarray(vec, dtype=np.int8)
    codes = np.zeros(len(vec), dtype=np.uint8)
    codes[vec == 1] = 1
    codes[vec == -1] = 2
    padded = np.zeros(((len(codes) + 3) // 4) * 4, dtype=np.uint8)
    padded[: len(codes)] = codes
    packed = (
        (padded[0::4] << 6) | (padded[1::4] << 4) | (padded[2::4] << 2) | padded[3::4]
    ).astype(np.uint8)
    return struct.pack(">I", len(vec)) + packed.tobytes()


def unpack_trits(buf: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    (n,) = struct.unpack_from(">I", buf, offset)
    offset += 4
    nbytes = (n + 3) // 4
    packed = np.frombuffer(buf[offset : offset + nbytes], dtype=np.uint8)
    codes = np.empty(nbytes * 4, dtype=np.uint8)
    codes[0::4] = packed >> 6
    codes[1::4] = (packed >> 4) & 3
    codes[2::4] = (packed >> 2) & 3
    codes[3::4] = packed & 3
    codes = codes[:n]
    out = np.zeros(n, dtype=np.int8)
    out[codes == 1] = 1
    out[codes == 2] = -1
    return out, offset + nbytes


def pack_u16(v: int) -> bytes:
    return struct.pack(">H", v)


def pack_u32(v: int) -> bytes:
    return struct.pack(">I", v)


def pack_f64(v: float) -> bytes:
    return struct.pack(">d", v)


def read_u16(buf: bytes, offset: int) -> tuple[int, int]:
    return struct.unpack_from(">H", buf, offset)[0], offset + 2


def read_u32(buf: bytes, offset: int) -> tuple[int, int]:
    return struct.unpack_from(">I", buf, offset)[0], offset + 4


def read_f64(buf: bytes, offset: int) -> tuple[float, int]:
    return struct.unpack_from(">d", buf, offset)[0], offset + 8
