"""Ciphertexts and their key-domain tags.

A ciphertext is a pair (C1, C2) of residues modulo N^2 together with the
key domain it is encrypted under: a single party's key, a joint key whose
decryption needs two weak keys in sequence, or -- after a refresh -- an
opaque domain no weak key decrypts.

Wire format: each component as a 4-byte big-endian length followed by the
big-endian magnitude bytes, then one domain-tag byte.  These serialized
sizes are what the transport ledger charges for ciphertext traffic.
"""

from __future__ import annotations

from dataclasses import dataclass

from revfrf.errors import KeyDomainError, ValidationError
from revfrf.crypto.keys import JointPublicKey, PublicKey, PublicParams
from revfrf.crypto.numeric import int_from_bytes, int_to_bytes

__all__ = ["Ciphertext", "DOMAIN_SINGLE", "DOMAIN_JOINT", "DOMAIN_OPAQUE"]

DOMAIN_SINGLE = 0
DOMAIN_JOINT = 1
DOMAIN_OPAQUE = 2


@dataclass(frozen=True)
class Ciphertext:
    """An encrypted value: components C1, C2 plus the key it lives under.

    ``key`` is the public key object (single or joint) for decryptable
    domains, or ``None`` once a refresh has pushed the plaintext into an
    unknown-key domain.
    """

    c1: int
    c2: int
    key: PublicKey | JointPublicKey | None
    params: PublicParams

    def __post_init__(self) -> None:
        if not (0 <= self.c1 < self.params.n_sq and 0 <= self.c2 < self.params.n_sq):
            raise ValidationError("ciphertext components out of Z_{N^2}")

    @property
    def domain(self) -> int:
        if self.key is None:
            return DOMAIN_OPAQUE
        if isinstance(self.key, JointPublicKey):
            return DOMAIN_JOINT
        return DOMAIN_SINGLE

    @property
    def owners(self) -> tuple[int, ...]:
        return () if self.key is None else self.key.owners

    def require_single(self) -> PublicKey:
        if self.domain != DOMAIN_SINGLE:
            raise KeyDomainError("operation requires a single-key ciphertext")
        return self.key  # type: ignore[return-value]

    def require_joint(self) -> JointPublicKey:
        if self.domain != DOMAIN_JOINT:
            raise KeyDomainError("operation requires a joint-key ciphertext")
        return self.key  # type: ignore[return-value]

    def to_bytes(self) -> bytes:
        return int_to_bytes(self.c1) + int_to_bytes(self.c2) + bytes([self.domain])

    @classmethod
    def from_bytes(
        cls,
        buf: bytes,
        params: PublicParams,
        key: PublicKey | JointPublicKey | None,
        offset: int = 0,
    ) -> tuple["Ciphertext", int]:
        """Decode one ciphertext; the caller supplies the key context.

        The wire carries only the domain tag, not the key itself, so the
        decoder checks that the supplied key matches the tag.
        """
        c1, offset = int_from_bytes(buf, offset)
        c2, offset = int_from_bytes(buf, offset)
        tag = buf[offset]
        ct = cls(c1, c2, key, params)
        if ct.domain != tag:
            raise KeyDomainError(
                "serialized domain tag %d does not match supplied key" % tag
            )
        return ct, offset + 1

    def byte_size(self) -> int:
        return len(self.to_bytes())
