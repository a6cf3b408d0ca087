"""Party roles and well-known ids.

One center server (holds the labels and orchestrates), one computation
server (holds the second strong-key share and assists the heavy crypto),
one key generation center (trusted keygen only), and at least two normal
participants each owning one or more feature columns.
"""

from __future__ import annotations

from enum import IntEnum

CS_ID = 0
CC_ID = 1
KGC_ID = 2
FIRST_PARTICIPANT_ID = 3


class Role(IntEnum):
    CS = 0
    CC = 1
    KGC = 2
    PARTICIPANT = 3


def role_of(party_id: int) -> Role:
    if party_id == CS_ID:
        return Role.CS
    if party_id == CC_ID:
        return Role.CC
    if party_id == KGC_ID:
        return Role.KGC
    return Role.PARTICIPANT
