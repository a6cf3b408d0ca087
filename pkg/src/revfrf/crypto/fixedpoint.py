"""Signed fixed-point codec over Z_N.

A real x is stored as round(x * 10^c) mod N.  Residues in [0, R1) decode
as positive values and residues in (N - R1, N] as negative ones; the wide
gap between the two ranges is what lets blinded comparison differences be
classified by bit length without ambiguity.
"""

from __future__ import annotations

from revfrf.errors import FixedPointRangeError
from revfrf.crypto.keys import PublicParams

__all__ = ["fixed_encode", "fixed_decode", "to_signed"]


def fixed_encode(x: float, params: PublicParams) -> int:
    """Encode a real into its fixed-point residue.

    Raises:
        FixedPointRangeError: if |round(x * 10^c)| reaches the range bound
            R1, i.e. the value cannot be represented (or compared) safely.
    """
    scaled = round(float(x) * 10**params.c)
    if abs(scaled) >= params.r1:
        raise FixedPointRangeError(
            "magnitude %g overflows the fixed-point range (R1 = 2^%d, c = %d)"
            % (x, params.r1_bits, params.c)
        )
    return scaled % params.n


def to_signed(raw: int, params: PublicParams) -> int:
    """Map a legal residue back to the signed integer round(x * 10^c)."""
    if 0 <= raw < params.r1:
        return raw
    if params.n - params.r1 < raw < params.n:
        return raw - params.n
    raise FixedPointRangeError(
        "residue %d lies outside both legal fixed-point ranges" % raw
    )


def fixed_decode(raw: int, params: PublicParams) -> float:
    """Decode a residue to a real, exact to 10^-c."""
    return to_signed(raw, params) / 10**params.c
