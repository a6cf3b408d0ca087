"""Arbitrary-precision helpers, gmpy2-backed where it matters.

gmpy2 is roughly an order of magnitude faster than CPython's ``pow`` for
the 512-bit modular exponentiations that dominate protocol runtime, so it
is a hard dependency; everything still returns plain ``int`` so callers
never see mpz objects.
"""

from __future__ import annotations

import gmpy2

__all__ = ["powmod", "invert", "is_prime", "int_to_bytes", "int_from_bytes"]


def powmod(base: int, exp: int, mod: int) -> int:
    return int(gmpy2.powmod(base, exp, mod))


def invert(a: int, mod: int) -> int:
    """Modular inverse of ``a`` (mod ``mod``); raises ZeroDivisionError if none."""
    return int(gmpy2.invert(a, mod))


def is_prime(n: int) -> bool:
    return bool(gmpy2.is_prime(n))


def int_to_bytes(v: int) -> bytes:
    """Length-prefixed big-endian encoding: 4-byte length, then magnitude."""
    raw = v.to_bytes((v.bit_length() + 7) // 8 or 1, "big")
    return len(raw).to_bytes(4, "big") + raw


def int_from_bytes(buf: bytes, offset: int = 0) -> tuple[int, int]:
    """Decode one length-prefixed integer; returns (value, next offset)."""
    n = int.from_bytes(buf[offset : offset + 4], "big")
    start = offset + 4
    return int.from_bytes(buf[start : start + n], "big"), start + n
