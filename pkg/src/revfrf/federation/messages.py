"""Protocol message tags, payload types and the legality schema.

Every payload knows how to serialize itself; the envelope (tag, sender,
receiver, length) lives in the transport layer.  The schema table pins
which payload type each tag carries and which roles may send it; the
constructor helper enforces it, and the message-audit tests re-check
recorded traffic against it.  By construction there is no payload type
that could carry raw feature values from a participant: everything a
participant emits is packed selection vectors, ciphertexts, or tokens.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from revfrf.errors import ProtocolError
from revfrf.crypto.ciphertext import Ciphertext
from revfrf.crypto.keys import JointPublicKey, KeyPair, PublicKey
from revfrf.crypto.numeric import int_to_bytes
from revfrf.federation.roles import Role, role_of
from revfrf.transport.bus import Message
from revfrf.wire import pack_bits, pack_f64, pack_trits, pack_u16, pack_u32

# Protocol tags.
KEY_ISSUE = 1
TRAIN_RECOMMEND = 2
TRAIN_VECTORS = 3
TRAIN_WINNER = 4
TRAIN_SPLIT = 5
PRED_REQUEST = 6
PRED_RESULT = 7
PARDEC1 = 8
PARDEC1_REPLY = 9
TEST_NODE = 10
TEST_BIT = 11
COMPARE = 12
COMPARE_RESULT = 13
HOADD = 14
HOADD_SUM = 15
HOLT_BIT = 16
HOLT_BIT_CT = 17
REVOKE_REQUEST = 18
REVOKE_ACK = 19
REFRESH_BATCH = 20
REFRESH_REPLY = 21
KEY_REVOKE = 22
KEY_REVOKE_ACK = 23
REMOVAL_NOTICE = 24


def _path_bytes(path: str) -> bytes:
    raw = path.encode()
    return pack_u16(len(raw)) + raw


@dataclass(frozen=True)
class KeyIssue:
    """Key material sent by the key center at setup."""

    keypair: KeyPair
    lam_share: int | None
    token_secret: bytes

    def encode(self) -> bytes:
        out = self.keypair.to_bytes()
        out += int_to_bytes(self.lam_share if self.lam_share is not None else 0)
        out += pack_u16(len(self.token_secret)) + self.token_secret
        return out


@dataclass(frozen=True)
class RecommendRequest:
    """Sample and feature selection vectors for one node expansion."""

    tree: int
    path: str
    mu: np.ndarray
    v: np.ndarray

    def encode(self) -> bytes:
        return pack_u16(self.tree) + _path_bytes(self.path) + pack_bits(self.mu) + pack_bits(self.v)


@dataclass(frozen=True)
class SplitVectorSet:
    """A participant's candidate split vectors, grouped per owned feature.

    Thresholds deliberately absent: only the {-1, 0, +1} vectors travel.
    """

    entries: tuple[tuple[int, tuple[np.ndarray, ...]], ...]

    def encode(self) -> bytes:
        out = pack_u16(len(self.entries))
        for feature_id, vectors in self.entries:
            out += pack_u32(feature_id) + pack_u16(len(vectors))
            for w in vectors:
                out += pack_trits(w)
        return out


@dataclass(frozen=True)
class WinnerRequest:
    """Ask the providing participant to upload one encrypted threshold."""

    tree: int
    path: str
    feature_id: int
    index: int

    def encode(self) -> bytes:
        return pack_u16(self.tree) + _path_bytes(self.path) + pack_u32(self.feature_id) + pack_u16(self.index)


@dataclass(frozen=True)
class EncryptedSplit:
    ct: Ciphertext
    token: bytes

    def encode(self) -> bytes:
        return self.ct.to_bytes() + pack_u16(len(self.token)) + self.token


@dataclass(frozen=True)
class PredictionRequest:
    """All feature dimensions, each encrypted under the requester's key."""

    cts: tuple[tuple[int, Ciphertext], ...]

    def encode(self) -> bytes:
        out = pack_u16(len(self.cts))
        for feature_id, ct in self.cts:
            out += pack_u32(feature_id) + ct.to_bytes()
        return out


@dataclass(frozen=True)
class PredictionResult:
    value: float

    def encode(self) -> bytes:
        return pack_f64(float(self.value))


@dataclass(frozen=True)
class CiphertextPayload:
    """A bare ciphertext (partial decryptions, comparison bits, ...)."""

    ct: Ciphertext
    requester: int = 0

    def encode(self) -> bytes:
        return pack_u16(self.requester) + self.ct.to_bytes()


@dataclass(frozen=True)
class TestNodeRequest:
    """Re-encrypted stored split handed to its provider for a local test
    comparison against the provider's own column value."""

    ct: Ciphertext
    row: int
    feature_id: int

    def encode(self) -> bytes:
        return self.ct.to_bytes() + pack_u32(self.row) + pack_u32(self.feature_id)


@dataclass(frozen=True)
class ComparePair:
    """Two ciphertexts whose order relation is requested."""

    ct_a: Ciphertext
    ct_b: Ciphertext
    partner: int

    def encode(self) -> bytes:
        return self.ct_a.to_bytes() + self.ct_b.to_bytes() + pack_u16(self.partner)


@dataclass(frozen=True)
class AddBundle:
    """Masked components and first-share partial decryptions for one
    cross-domain addition."""

    c1_a: int
    c1_b: int
    p1_a: int
    p1_b: int
    joint: JointPublicKey

    def encode(self) -> bytes:
        out = b"".join(int_to_bytes(v) for v in (self.c1_a, self.c1_b, self.p1_a, self.p1_b))
        return out + pack_u16(self.joint.owners[0]) + pack_u16(self.joint.owners[1])


@dataclass(frozen=True)
class BitRequest:
    """Blinded difference component plus first-share partial decryption."""

    c1: int
    p1: int
    out_key: JointPublicKey

    def encode(self) -> bytes:
        return int_to_bytes(self.c1) + int_to_bytes(self.p1) + pack_u16(self.out_key.owners[0]) + pack_u16(self.out_key.owners[1])


@dataclass(frozen=True)
class RevokeRequestPayload:
    requester: int
    nonce: int
    token: bytes
    level: int = 1

    def encode(self) -> bytes:
        return (
            pack_u16(self.requester)
            + pack_u32(self.nonce)
            + bytes([self.level])
            + pack_u16(len(self.token))
            + self.token
        )


@dataclass(frozen=True)
class Ack:
    ok: bool = True

    def encode(self) -> bytes:
        return bytes([1 if self.ok else 0])


@dataclass(frozen=True)
class CiphertextBatch:
    cts: tuple[Ciphertext, ...]

    def encode(self) -> bytes:
        return pack_u16(len(self.cts)) + b"".join(ct.to_bytes() for ct in self.cts)


@dataclass(frozen=True)
class PartyRef:
    party: int

    def encode(self) -> bytes:
        return pack_u16(self.party)


# tag -> (payload type, roles allowed to send it)
SCHEMA: dict[int, tuple[type, tuple[Role, ...]]] = {
    KEY_ISSUE: (KeyIssue, (Role.KGC,)),
    TRAIN_RECOMMEND: (RecommendRequest, (Role.CS,)),
    TRAIN_VECTORS: (SplitVectorSet, (Role.PARTICIPANT,)),
    TRAIN_WINNER: (WinnerRequest, (Role.CS,)),
    TRAIN_SPLIT: (EncryptedSplit, (Role.PARTICIPANT,)),
    PRED_REQUEST: (PredictionRequest, (Role.PARTICIPANT,)),
    PRED_RESULT: (PredictionResult, (Role.CS,)),
    PARDEC1: (CiphertextPayload, (Role.CS,)),
    PARDEC1_REPLY: (CiphertextPayload, (Role.PARTICIPANT,)),
    TEST_NODE: (TestNodeRequest, (Role.CS,)),
    TEST_BIT: (CiphertextPayload, (Role.PARTICIPANT,)),
    COMPARE: (ComparePair, (Role.PARTICIPANT,)),
    COMPARE_RESULT: (CiphertextPayload, (Role.CS,)),
    HOADD: (AddBundle, (Role.CS,)),
    HOADD_SUM: (CiphertextPayload, (Role.CC,)),
    HOLT_BIT: (BitRequest, (Role.CS,)),
    HOLT_BIT_CT: (CiphertextPayload, (Role.CC,)),
    REVOKE_REQUEST: (RevokeRequestPayload, (Role.PARTICIPANT,)),
    REVOKE_ACK: (Ack, (Role.CS,)),
    REFRESH_BATCH: (CiphertextBatch, (Role.CS,)),
    REFRESH_REPLY: (CiphertextBatch, (Role.CC,)),
    KEY_REVOKE: (PartyRef, (Role.CS,)),
    KEY_REVOKE_ACK: (Ack, (Role.KGC,)),
    REMOVAL_NOTICE: (PartyRef, (Role.CS,)),
}

# Payload types a participant may legally emit; none can carry plaintext
# reals (the audit tests assert recorded traffic stays inside this set).
PARTICIPANT_PAYLOAD_TYPES = tuple(
    payload for tag, (payload, roles) in SCHEMA.items() if Role.PARTICIPANT in roles
)


def make_message(sender: int, receiver: int, tag: int, payload) -> Message:
    """Build an envelope after checking schema legality."""
    expected_type, roles = SCHEMA[tag]
    if not isinstance(payload, expected_type):
        raise ProtocolError(
            "tag %d expects %s payload, got %s" % (tag, expected_type.__name__, type(payload).__name__)
        )
    if role_of(sender) not in roles:
        raise ProtocolError("role %s may not send tag %d" % (role_of(sender).name, tag))
    return Message(sender=sender, receiver=receiver, tag=tag, payload=payload)
