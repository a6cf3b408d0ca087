"""Fixed-point codec: formula anchor, signed ranges, roundtrip identity."""

import pytest
from hypothesis import given, strategies as st

from revfrf.errors import FixedPointRangeError
from revfrf.crypto.fixedpoint import fixed_decode, fixed_encode, to_signed


def test_encoding_formula_matches_definition():
    # The codec is round(x * 10^c) mod N; spot-check the published toy
    # instance 3.1415 with c=2 against modulus 13 by direct arithmetic.
    assert round(3.1415 * 10**2) == 314
    assert 314 % 13 == 2


def test_encode_known_values(k64):
    params = k64[0]  # c = 3
    assert fixed_encode(3.1415, params) == 3142  # nearest-integer rounding
    assert fixed_encode(0.0, params) == 0
    assert fixed_decode(0, params) == 0.0


def test_negative_maps_to_top_range(k64):
    params = k64[0]
    raw = fixed_encode(-1.5, params)
    assert raw == params.n - 1500
    assert fixed_decode(raw, params) == -1.5


def test_roundtrip_identity_over_grid(k64):
    params = k64[0]
    step = max(1, (params.r1 - 1) // 257)
    scaled = 10**params.c
    for k in range(-(params.r1 - 1), params.r1, step):
        x = k / scaled
        assert fixed_decode(fixed_encode(x, params), params) == pytest.approx(x, abs=10**-params.c)
    # both range boundaries and zero
    for k in (-(params.r1 - 1), 0, params.r1 - 1):
        assert fixed_decode(fixed_encode(k / scaled, params), params) == k / scaled


def test_overflow_raises(k64):
    params = k64[0]
    with pytest.raises(FixedPointRangeError):
        fixed_encode(params.r1 / 10**params.c, params)
    with pytest.raises(FixedPointRangeError):
        fixed_encode(-(params.r1) / 10**params.c, params)


def test_residue_outside_ranges_rejected(k64):
    params = k64[0]
    with pytest.raises(FixedPointRangeError):
        to_signed(params.r1, params)
    with pytest.raises(FixedPointRangeError):
        to_signed(params.n - params.r1, params)


@given(st.integers(min_value=-(2**15 - 1), max_value=2**15 - 1))
def test_roundtrip_property(k):
    from revfrf.crypto.keys import PublicParams

    params = PublicParams(n=(1 << 66) + 3, g=2, kappa=33, c=3, r1_bits=16)
    x = k / 10**params.c
    raw = fixed_encode(x, params)
    assert fixed_decode(raw, params) == pytest.approx(x, abs=10**-params.c)
    assert to_signed(raw, params) == k
