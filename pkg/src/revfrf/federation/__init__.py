"""The federated protocols: training, prediction, testing, revocation."""

from revfrf.federation.roles import CC_ID, CS_ID, KGC_ID, FIRST_PARTICIPANT_ID, Role
from revfrf.federation.auth import HmacTokenScheme, RevocationRequest
from revfrf.federation.session import FederationSession, SessionConfig

__all__ = [
    "CC_ID",
    "CS_ID",
    "KGC_ID",
    "FIRST_PARTICIPANT_ID",
    "Role",
    "HmacTokenScheme",
    "RevocationRequest",
    "FederationSession",
    "SessionConfig",
]
