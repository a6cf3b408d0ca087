"""Two-trapdoor additively homomorphic cryptosystem and fixed-point codec.

The scheme is a Paillier-style cryptosystem over Z_{N^2} with two kinds of
trapdoors: each party holds its own *weak* private key, and a master
*strong* key (the Carmichael value of the modulus) is split into two
additive shares held by the two server roles.  Ciphertexts encrypted under
different parties' keys can be added, compared, re-encrypted into a joint
domain, partially decrypted stage by stage, and re-randomized so that the
original key no longer decrypts them.
"""

from revfrf.crypto.keys import (
    KeyFactory,
    KeyPair,
    PublicKey,
    JointPublicKey,
    PublicParams,
    StrongKeyShares,
    keygen,
    keyset_from_primes,
)
from revfrf.crypto.ciphertext import Ciphertext, DOMAIN_SINGLE, DOMAIN_JOINT, DOMAIN_OPAQUE
from revfrf.crypto.fixedpoint import fixed_encode, fixed_decode, to_signed
from revfrf.crypto import ops

__all__ = [
    "KeyFactory",
    "KeyPair",
    "PublicKey",
    "JointPublicKey",
    "PublicParams",
    "StrongKeyShares",
    "keygen",
    "keyset_from_primes",
    "Ciphertext",
    "DOMAIN_SINGLE",
    "DOMAIN_JOINT",
    "DOMAIN_OPAQUE",
    "fixed_encode",
    "fixed_decode",
    "to_signed",
    "ops",
]
