"""Key material: public parameters, per-party keys, split strong key.

Key generation follows the classic construction over a modulus N = pq with
p, q safe primes: a generator g = -a^{2N} mod N^2 of order lcm(p-1, q-1),
per-party weak keys sk drawn from [1, N/4] with h = g^sk, and a strong key
lambda = lcm(p-1, q-1) split into two additive shares satisfying

    lambda_1 + lambda_2 = 0 (mod lambda)   and   = 1 (mod N^2).

Raising any ciphertext component to lambda_1 + lambda_2 therefore kills the
g-part (whose order divides lambda) while fixing the (1 + mN) part, which
is what lets the two share holders jointly decrypt a ciphertext from any
key domain without ever learning each other's share.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from revfrf.errors import KeygenError, ValidationError
from revfrf.crypto.numeric import int_to_bytes, is_prime, powmod

__all__ = [
    "PublicParams",
    "PublicKey",
    "JointPublicKey",
    "KeyPair",
    "StrongKeyShares",
    "KeyFactory",
    "keygen",
    "keyset_from_primes",
]

# Production defaults: 512-bit primes give a 1024-bit modulus; six decimal
# digits of fixed-point precision.
DEFAULT_KAPPA = 512
DEFAULT_SCALE_DIGITS = 6

_PRIME_SEARCH_ATTEMPTS = 4_000_000


@dataclass(frozen=True)
class PublicParams:
    """Scheme-wide public parameters.

    Attributes:
        n: the modulus, a product of two distinct safe primes.
        g: generator modulo n^2 of order lcm(p-1, q-1).
        kappa: per-prime bit length used at generation time.
        c: fixed-point scale exponent (decimal digits of precision).
        r1_bits: bit length of the positive-range bound R1; plaintexts in
            [0, R1) are positive, (N - R1, N] are negative.
    """

    n: int
    g: int
    kappa: int
    c: int
    r1_bits: int

    def __post_init__(self) -> None:
        if self.r1_bits < 1:
            raise ValidationError("r1_bits must be at least 1")
        if 4 * self.r1_bits >= self.n.bit_length():
            raise ValidationError(
                "r1_bits %d too large for a %d-bit modulus (must stay below"
                " a quarter of the modulus bit length)"
                % (self.r1_bits, self.n.bit_length())
            )
        # Blinded comparison differences must not wrap past the half-bit
        # boundary that the comparison oracle tests.
        if self.blind_max * (4 * self.r1 - 3) >= 1 << (self.n.bit_length() // 2):
            raise ValidationError(
                "comparison range unsafe: blinding times the worst-case "
                "difference crosses the modulus midpoint"
            )

    @property
    def n_sq(self) -> int:
        return self.n * self.n

    @property
    def r1(self) -> int:
        """Positive-range bound: legal magnitudes are below 2**r1_bits."""
        return 1 << self.r1_bits

    @property
    def blind_max(self) -> int:
        """Largest comparison-blinding factor that cannot cause wraparound."""
        return max(1, (1 << max(1, self.n.bit_length() // 2 - self.r1_bits - 2)) - 1)

    def to_bytes(self) -> bytes:
        return (
            int_to_bytes(self.n)
            + int_to_bytes(self.g)
            + self.kappa.to_bytes(2, "big")
            + self.c.to_bytes(1, "big")
            + self.r1_bits.to_bytes(2, "big")
        )


@dataclass(frozen=True)
class PublicKey:
    """A single party's public key (N, g, h = g^sk)."""

    params: PublicParams
    owner: int
    h: int

    @property
    def owners(self) -> tuple[int, ...]:
        return (self.owner,)

    def combine(self, other: "PublicKey") -> "JointPublicKey":
        """Joint key under which decryption needs both weak keys."""
        return JointPublicKey(self, other)

    def to_bytes(self) -> bytes:
        return self.owner.to_bytes(2, "big") + int_to_bytes(self.h)


@dataclass(frozen=True)
class JointPublicKey:
    """Sum key pk_a + pk_b realized as h = h_a * h_b mod N^2."""

    a: PublicKey
    b: PublicKey
    h: int = field(init=False)

    def __post_init__(self) -> None:
        if self.a.params is not self.b.params and self.a.params != self.b.params:
            raise ValidationError("cannot combine keys from different parameter sets")
        object.__setattr__(self, "h", (self.a.h * self.b.h) % self.a.params.n_sq)

    @property
    def params(self) -> PublicParams:
        return self.a.params

    @property
    def owners(self) -> tuple[int, ...]:
        return (self.a.owner, self.b.owner)

    def component(self, owner: int) -> PublicKey:
        if self.a.owner == owner:
            return self.a
        if self.b.owner == owner:
            return self.b
        raise ValidationError("party %d is not part of this joint key" % owner)

    def other(self, owner: int) -> PublicKey:
        if self.a.owner == owner:
            return self.b
        if self.b.owner == owner:
            return self.a
        raise ValidationError("party %d is not part of this joint key" % owner)


@dataclass(frozen=True)
class KeyPair:
    """A party's key pair; ``sk`` is the weak private key in [1, N/4]."""

    pk: PublicKey
    sk: int

    @property
    def params(self) -> PublicParams:
        return self.pk.params

    @property
    def owner(self) -> int:
        return self.pk.owner

    def to_bytes(self) -> bytes:
        return self.pk.to_bytes() + int_to_bytes(self.sk)


@dataclass(frozen=True)
class StrongKeyShares:
    """The strong trapdoor lambda and its two additive shares."""

    lam: int
    lam1: int
    lam2: int

    def check(self, params: PublicParams) -> None:
        s = self.lam1 + self.lam2
        if s % self.lam != 0 or s % params.n_sq != 1:
            raise ValidationError("strong key shares violate the split congruences")


class KeyFactory:
    """Mints per-party key pairs from a deterministic stream.

    The same (parameters, seed) always yields the same sequence of key
    pairs; ``fork`` rewinds to the start of that sequence, so sessions
    sharing one keyset still mint identical keys on replay.
    """

    def __init__(self, params: PublicParams, seed: int):
        self.params = params
        self.seed = seed
        self._rng = random.Random(seed)

    def fork(self) -> "KeyFactory":
        return KeyFactory(self.params, self.seed)

    def new_keypair(self, owner: int) -> KeyPair:
        p = self.params
        sk = self._rng.randrange(1, max(2, p.n // 4))
        return KeyPair(PublicKey(p, owner, powmod(p.g, sk, p.n_sq)), sk)


def _find_safe_prime(kappa: int, rng: random.Random, budget: int) -> int:
    """Search for p = 2p' + 1 with both p' and p prime and p of kappa bits.

    The two top bits of p' are forced so that the product of two such
    primes always reaches the full 2*kappa bit length.
    """
    for _ in range(budget):
        pp = rng.getrandbits(kappa - 1) | (3 << (kappa - 3)) | 1
        if is_prime(pp) and is_prime(2 * pp + 1):
            return 2 * pp + 1
    raise KeygenError(
        "no safe prime of %d bits found within %d attempts" % (kappa, budget)
    )


def _choose_generator(n: int, lam: int, p: int, q: int, rng: random.Random) -> int:
    """Draw g = -a^{2N} until its multiplicative order is exactly lambda."""
    n_sq = n * n
    pp, qq = (p - 1) // 2, (q - 1) // 2
    for _ in range(128):
        a = rng.randrange(1, n_sq)
        g = (-powmod(a, 2 * n, n_sq)) % n_sq
        if powmod(g, lam, n_sq) != 1:
            continue
        if any(powmod(g, lam // f, n_sq) == 1 for f in (2, pp, qq)):
            continue
        return g
    raise KeygenError("failed to find a generator of full order")


def _split_strong_key(lam: int, n_sq: int, rng: random.Random) -> StrongKeyShares:
    # S = lam * (lam^{-1} mod N^2) is 0 mod lam and 1 mod N^2; any additive
    # split of S inherits both congruences.
    s = lam * powmod(lam, -1, n_sq)
    lam1 = rng.randrange(1, s)
    return StrongKeyShares(lam, lam1, s - lam1)


def keyset_from_primes(
    p: int,
    q: int,
    c: int,
    seed: int,
    r1_bits: int | None = None,
) -> tuple[PublicParams, KeyFactory, StrongKeyShares]:
    """Build a key set from explicitly supplied safe primes.

    Intended for tests that need a tiny modulus with exhaustively checkable
    plaintext space (e.g. p=7, q=11 giving N=77, lambda=30).
    """
    for v in (p, q):
        if not is_prime(v) or not is_prime((v - 1) // 2) or v % 4 != 3:
            raise ValidationError("%d is not a safe prime" % v)
    if p == q:
        raise ValidationError("p and q must be distinct")
    n = p * q
    lam = math.lcm(p - 1, q - 1)
    rng = random.Random(seed)
    g = _choose_generator(n, lam, p, q, rng)
    if r1_bits is None:
        r1_bits = max(1, n.bit_length() // 4 - 1)
    params = PublicParams(n=n, g=g, kappa=max(p.bit_length(), q.bit_length()), c=c, r1_bits=r1_bits)
    shares = _split_strong_key(lam, params.n_sq, rng)
    shares.check(params)
    return params, KeyFactory(params, rng.getrandbits(64)), shares


def keygen(
    kappa: int = DEFAULT_KAPPA,
    c: int = DEFAULT_SCALE_DIGITS,
    seed: int = 0,
    r1_bits: int | None = None,
    max_attempts: int = _PRIME_SEARCH_ATTEMPTS,
) -> tuple[PublicParams, KeyFactory, StrongKeyShares]:
    """Generate public parameters, a key-pair factory and the strong key split.

    Args:
        kappa: per-prime bit length; the modulus gets 2*kappa bits.
            Production use should keep the 512-bit default; small values
            are only for tests with exhaustible plaintext spaces.
        c: fixed-point scale exponent.
        seed: master seed; identical seeds reproduce identical key material.
        r1_bits: positive-range bound override (default: a quarter of the
            modulus bit length, minus one).
        max_attempts: prime-search budget before giving up loudly.

    Raises:
        KeygenError: if the prime search exhausts its budget.
    """
    if kappa < 8:
        raise ValidationError("kappa below 8 bits cannot yield two distinct safe primes"
                              " of equal length; build tiny test keys with"
                              " keyset_from_primes instead")
    rng = random.Random(seed)
    p = _find_safe_prime(kappa, rng, max_attempts)
    q = p
    while q == p:
        q = _find_safe_prime(kappa, rng, max_attempts)
    n = p * q
    lam = math.lcm(p - 1, q - 1)
    g = _choose_generator(n, lam, p, q, rng)
    if r1_bits is None:
        r1_bits = n.bit_length() // 4 - 1
    params = PublicParams(n=n, g=g, kappa=kappa, c=c, r1_bits=r1_bits)
    shares = _split_strong_key(lam, params.n_sq, rng)
    shares.check(params)
    return params, KeyFactory(params, rng.getrandbits(64)), shares
