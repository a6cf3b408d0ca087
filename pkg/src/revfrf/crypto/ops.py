"""The homomorphic primitives.

Encryption, re-encryption toward a joint domain, ciphertext refresh,
two-stage partial decryption, strong (share-based) decryption, ciphertext
algebra, and the two interactive primitives -- cross-domain addition and
secure less-than -- exposed both as pure compositions and as their
individual per-role steps so the federation layer can enact them as
message exchanges between the two share holders.

All randomness comes from caller-supplied ``random.Random`` streams.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from revfrf.errors import DecryptionError, KeyDomainError
from revfrf.crypto.ciphertext import Ciphertext
from revfrf.crypto.keys import JointPublicKey, KeyPair, PublicKey, PublicParams, StrongKeyShares
from revfrf.crypto.numeric import invert, powmod

__all__ = [
    "ho_enc",
    "weak_decrypt",
    "par_h_dec1",
    "par_h_dec2",
    "joint_decrypt",
    "strong_decrypt",
    "ho_re_enc",
    "ho_enc_ref",
    "ct_add",
    "ct_scale",
    "ct_negate",
    "ho_add_prepare",
    "ho_add_respond",
    "ho_add_finish",
    "ho_add",
    "ho_lt_prepare",
    "ho_lt_blind",
    "strong_share",
    "ho_lt_bit_respond",
    "ho_lt_finish",
    "ho_lt",
    "HoAddBundle",
    "HoAddState",
]


def _ell(x: int, n: int) -> int:
    """The decryption quotient L(x) = (x - 1) / N.

    The division must be exact; anything else means the ciphertext was
    decrypted with wrong key material or has been refreshed away, and we
    fail loudly rather than return garbage.
    """
    if (x - 1) % n != 0:
        raise DecryptionError("decryption residue is not congruent to 1 mod N")
    return (x - 1) // n


def ho_enc(pk: PublicKey | JointPublicKey, m: int, rng: random.Random) -> Ciphertext:
    """Encrypt m in Z_N under a (possibly joint) public key.

    C1 = h^r (1 + mN) mod N^2 and C2 = g^r mod N^2 with r drawn from
    [1, N/4].
    """
    p = pk.params
    if not 0 <= m < p.n:
        raise ValueError("plaintext must lie in Z_N")
    r = rng.randrange(1, max(2, p.n // 4))
    c1 = (powmod(pk.h, r, p.n_sq) * (1 + m * p.n)) % p.n_sq
    c2 = powmod(p.g, r, p.n_sq)
    return Ciphertext(c1, c2, pk, p)


def weak_decrypt(kp: KeyPair, ct: Ciphertext) -> int:
    """Decrypt a single-key ciphertext with its owner's weak key."""
    pk = ct.require_single()
    if pk.owner != kp.owner:
        raise KeyDomainError(
            "ciphertext is under party %d's key, not party %d's" % (pk.owner, kp.owner)
        )
    p = ct.params
    u = (ct.c1 * invert(powmod(ct.c2, kp.sk, p.n_sq), p.n_sq)) % p.n_sq
    return _ell(u, p.n) % p.n


def par_h_dec1(kp: KeyPair, ct: Ciphertext) -> Ciphertext:
    """First partial decryption stage: strip one key from a joint ciphertext.

    Wrong-key use is detectable only by domain tag; if the tag lies, the
    output is silently garbage (there is no plausibility check at this
    stage -- the final stage's exactness check is the backstop).
    """
    joint = ct.require_joint()
    remaining = joint.other(kp.owner)
    p = ct.params
    c1 = (ct.c1 * invert(powmod(ct.c2, kp.sk, p.n_sq), p.n_sq)) % p.n_sq
    return Ciphertext(c1, ct.c2, remaining, p)


def par_h_dec2(kp: KeyPair, ct: Ciphertext) -> int:
    """Second stage: a plain weak decryption of what stage one left."""
    return weak_decrypt(kp, ct)


def joint_decrypt(kp_first: KeyPair, kp_second: KeyPair, ct: Ciphertext) -> int:
    """Run both partial-decryption stages in order (test convenience)."""
    return par_h_dec2(kp_second, par_h_dec1(kp_first, ct))


def strong_decrypt(shares: StrongKeyShares, ct: Ciphertext) -> int:
    """Decrypt with both strong-key shares, regardless of key domain.

    Works even on refreshed ciphertexts: the shares' sum annihilates the
    generator part of C1 no matter what exponent is buried in it.  This is
    the test-only escrow path; no single protocol role holds both shares.
    """
    p = ct.params
    t = (powmod(ct.c1, shares.lam1, p.n_sq) * powmod(ct.c1, shares.lam2, p.n_sq)) % p.n_sq
    return _ell(t, p.n) % p.n


def ho_re_enc(kp: KeyPair, ct: Ciphertext) -> Ciphertext:
    """Re-encrypt a single-key ciphertext toward the joint domain.

    The re-encrypting party folds its own weak key into C1, after which
    full decryption needs both weak keys via the two partial stages.
    """
    pk = ct.require_single()
    p = ct.params
    c1 = (ct.c1 * powmod(ct.c2, kp.sk, p.n_sq)) % p.n_sq
    return Ciphertext(c1, ct.c2, pk.combine(kp.pk), p)


def ho_enc_ref(r_p: int, ct: Ciphertext) -> Ciphertext:
    """Refresh: fold an unknown random exponent into C1.

    The plaintext is unchanged algebraically but now sits in a domain whose
    "key" includes r_p, so the original owner's weak key no longer
    decrypts it.  Refreshes compose; the result is tagged opaque.
    """
    p = ct.params
    c1 = (ct.c1 * powmod(ct.c2, r_p, p.n_sq)) % p.n_sq
    return Ciphertext(c1, ct.c2, None, p)


def _same_key(ct1: Ciphertext, ct2: Ciphertext) -> None:
    if ct1.key is None or ct2.key is None:
        raise KeyDomainError("ciphertext algebra is undefined on opaque domains")
    if ct1.key.h != ct2.key.h or set(ct1.owners) != set(ct2.owners):
        raise KeyDomainError("ciphertext algebra requires matching key domains")


def ct_add(ct1: Ciphertext, ct2: Ciphertext) -> Ciphertext:
    """Componentwise product: adds the plaintexts under one shared key."""
    _same_key(ct1, ct2)
    n_sq = ct1.params.n_sq
    return Ciphertext((ct1.c1 * ct2.c1) % n_sq, (ct1.c2 * ct2.c2) % n_sq, ct1.key, ct1.params)


def ct_scale(ct: Ciphertext, k: int) -> Ciphertext:
    """Componentwise power: multiplies the plaintext by k mod N."""
    n_sq = ct.params.n_sq
    return Ciphertext(powmod(ct.c1, k, n_sq), powmod(ct.c2, k, n_sq), ct.key, ct.params)


def ct_negate(ct: Ciphertext) -> Ciphertext:
    """Exponent N-1 negates the plaintext."""
    return ct_scale(ct, ct.params.n - 1)


# ---------------------------------------------------------------------------
# Cross-domain addition.
#
# The first share holder masks both operands with fresh random values and
# partially strong-decrypts; the second share holder finishes the strong
# decryption, learns only the masked sum, and returns it encrypted under
# the joint key; the first share holder subtracts the masks homomorphically.
# Neither side ever sees an unmasked plaintext.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HoAddBundle:
    """What the lambda_1 holder sends over the wire: masked C1 components
    and its partial strong decryptions of them."""

    c1_a: int
    c1_b: int
    p1_a: int
    p1_b: int


@dataclass(frozen=True)
class HoAddState:
    """What the lambda_1 holder keeps private until the unmasking step."""

    alpha_sum: int
    joint: JointPublicKey


def ho_add_prepare(
    ct1: Ciphertext, ct2: Ciphertext, lam1: int, rng: random.Random
) -> tuple[HoAddBundle, HoAddState]:
    pk1 = ct1.require_single()
    pk2 = ct2.require_single()
    p = ct1.params
    a1 = rng.randrange(p.n)
    a2 = rng.randrange(p.n)
    masked1 = ct_add(ct1, ho_enc(pk1, a1, rng))
    masked2 = ct_add(ct2, ho_enc(pk2, a2, rng))
    bundle = HoAddBundle(
        c1_a=masked1.c1,
        c1_b=masked2.c1,
        p1_a=powmod(masked1.c1, lam1, p.n_sq),
        p1_b=powmod(masked2.c1, lam1, p.n_sq),
    )
    return bundle, HoAddState(alpha_sum=(a1 + a2) % p.n, joint=pk1.combine(pk2))


def ho_add_respond(
    bundle: HoAddBundle,
    lam2: int,
    joint: JointPublicKey,
    rng: random.Random,
) -> Ciphertext:
    p = joint.params
    masked_a = _ell((bundle.p1_a * powmod(bundle.c1_a, lam2, p.n_sq)) % p.n_sq, p.n) % p.n
    masked_b = _ell((bundle.p1_b * powmod(bundle.c1_b, lam2, p.n_sq)) % p.n_sq, p.n) % p.n
    return ho_enc(joint, (masked_a + masked_b) % p.n, rng)


def ho_add_finish(ct_masked_sum: Ciphertext, state: HoAddState, rng: random.Random) -> Ciphertext:
    mask_ct = ho_enc(state.joint, state.alpha_sum, rng)
    return ct_add(ct_masked_sum, ct_negate(mask_ct))


def ho_add(
    ct1: Ciphertext, ct2: Ciphertext, shares: StrongKeyShares, rng: random.Random
) -> Ciphertext:
    """Add two single-key ciphertexts from different key domains.

    Returns a ciphertext under the joint key of both owners; decryption
    then takes both owners' partial stages.
    """
    bundle, state = ho_add_prepare(ct1, ct2, shares.lam1, rng)
    ct_masked = ho_add_respond(bundle, shares.lam2, state.joint, rng)
    return ho_add_finish(ct_masked, state, rng)


# ---------------------------------------------------------------------------
# Secure less-than.
#
# Compare m1 < m2 by forming the difference of 2*m1 + 1 and 2*m2 (the +1
# breaks ties toward "not less"), blinding it with a bounded random factor,
# strong-decrypting the blinded value, and classifying its bit length:
# negative differences land just under N and keep a long bit length, while
# positive blinded differences stay below sqrt(N).  A coin decides which
# operand is subtracted from which, so the responder's view of the blinded
# value carries no information about the comparison direction; the coin
# flip is undone homomorphically afterwards.
# ---------------------------------------------------------------------------


def ho_lt_prepare(
    ct1: Ciphertext, ct2: Ciphertext, rng: random.Random, coin: int | None = None
) -> tuple[int, Ciphertext, Ciphertext]:
    """Build the HoAdd operands for a comparison; returns (coin, A, B).

    ``coin`` is normally drawn from the stream; tests may force it to
    exercise a specific branch.
    """
    pk1 = ct1.require_single()
    ct_a = ct_add(ct_scale(ct1, 2), ho_enc(pk1, 1, rng))  # [[2*m1 + 1]]
    ct_b = ct_scale(ct2, 2)  # [[2*m2]]
    if coin is None:
        coin = rng.randrange(2)
    if coin == 1:
        return coin, ct_a, ct_negate(ct_b)
    return coin, ct_b, ct_negate(ct_a)


def ho_lt_blind(ct_beta: Ciphertext, rng: random.Random) -> Ciphertext:
    p = ct_beta.params
    r = rng.randrange(1, p.blind_max + 1)
    return ct_scale(ct_beta, r)


def strong_share(c1: int, lam_i: int, params: PublicParams) -> int:
    """One holder's contribution to a strong decryption of C1."""
    return powmod(c1, lam_i, params.n_sq)


def ho_lt_bit_respond(
    c1: int,
    p1: int,
    lam2: int,
    params: PublicParams,
    out_key: JointPublicKey,
    rng: random.Random,
) -> Ciphertext:
    """Second share holder: recover the blinded difference, emit the bit.

    The blinded difference exceeds half the modulus bit length exactly when
    the underlying difference was negative.
    """
    blinded = _ell((p1 * powmod(c1, lam2, params.n_sq)) % params.n_sq, params.n) % params.n
    bit = 1 if 2 * blinded.bit_length() > params.n.bit_length() else 0
    return ho_enc(out_key, bit, rng)


def ho_lt_finish(ct_bit: Ciphertext, coin: int, rng: random.Random) -> Ciphertext:
    """Undo the coin flip: when the coin was 0 the bit is complemented."""
    if coin == 0:
        one = ho_enc(ct_bit.key, 1, rng)  # type: ignore[arg-type]
        return ct_add(one, ct_negate(ct_bit))
    return ct_bit


def ho_lt(
    ct1: Ciphertext,
    ct2: Ciphertext,
    shares: StrongKeyShares,
    cs_pk: PublicKey,
    partner_pk: PublicKey,
    rng: random.Random,
    coin: int | None = None,
) -> Ciphertext:
    """Compare two encrypted values; the result encrypts 1 iff m1 < m2.

    Equal plaintexts yield 0: the comparison is of 2*m1 + 1 against 2*m2,
    so ties resolve toward "greater or equal".  Operands must carry signed
    fixed-point values within the range bound R1; larger magnitudes would
    let the blinded difference wrap and misclassify.  The result lands
    under the joint key of ``cs_pk`` and ``partner_pk``.
    """
    coin, op_a, op_b = ho_lt_prepare(ct1, ct2, rng, coin)
    ct_beta = ho_add(op_a, op_b, shares, rng)
    blinded = ho_lt_blind(ct_beta, rng)
    p1 = strong_share(blinded.c1, shares.lam1, blinded.params)
    ct_bit = ho_lt_bit_respond(
        blinded.c1, p1, shares.lam2, blinded.params, cs_pk.combine(partner_pk), rng
    )
    return ho_lt_finish(ct_bit, coin, rng)
