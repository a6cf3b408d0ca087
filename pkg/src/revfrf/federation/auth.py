"""Revocation authentication: an abstract verified-token interface.

The protocols only need tokens that a verifier can check against the
issuing party; the concrete scheme is pluggable.  The default test-grade
implementation is a keyed hash over the party id and a context string,
with per-party secrets handed out at key setup and the corresponding
verification map held by the center server.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass

__all__ = ["RevocationRequest", "HmacTokenScheme"]


@dataclass(frozen=True)
class RevocationRequest:
    """A participant's signed request to leave the federation."""

    requester: int
    nonce: int
    token: bytes

    def context(self) -> str:
        return "revoke:%d:%d" % (self.requester, self.nonce)


class HmacTokenScheme:
    """Keyed-hash tokens; one secret per party, issued from a master key."""

    def __init__(self, master_key: bytes):
        self._master = master_key

    def party_secret(self, party: int) -> bytes:
        return hmac.digest(self._master, b"party:%d" % party, hashlib.sha256)

    @staticmethod
    def sign(secret: bytes, party: int, context: str) -> bytes:
        return hmac.digest(secret, b"%d|%s" % (party, context.encode()), hashlib.sha256)

    def verify(self, party: int, context: str, token: bytes) -> bool:
        expected = self.sign(self.party_secret(party), party, context)
        return hmac.compare_digest(expected, token)
