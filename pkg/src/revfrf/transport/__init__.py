"""Deterministic in-memory transport with full cost accounting."""

from revfrf.transport.bus import Message, MessageBus, SimClock
from revfrf.transport.ledger import (
    CostLedger,
    CRYPTO_METRICS,
    STAGE_CONSTRUCTION,
    STAGE_PREDICTION,
    STAGE_REVOCATION,
)

__all__ = [
    "Message",
    "MessageBus",
    "SimClock",
    "CostLedger",
    "CRYPTO_METRICS",
    "STAGE_CONSTRUCTION",
    "STAGE_PREDICTION",
    "STAGE_REVOCATION",
]
