"""Per-party cost accounting.

The ledger is the empirical counterpart of the protocol cost analysis: it
counts, per pipeline stage and per party, every message enqueued, the
serialized bytes of those messages, and every protocol-level invocation of
a cryptographic primitive.  Primitive counts are charged at the protocol
layer (one HoLT per compared node, one ParHDec1 at the partner, one
ParHDec2 at the decrypter, ...); the exponentiations a primitive performs
internally are part of that primitive, not separate entries.
"""

from __future__ import annotations

import io
from collections import defaultdict

__all__ = [
    "CostLedger",
    "CRYPTO_METRICS",
    "STAGE_CONSTRUCTION",
    "STAGE_PREDICTION",
    "STAGE_REVOCATION",
]

STAGE_CONSTRUCTION = "construction"
STAGE_PREDICTION = "prediction"
STAGE_REVOCATION = "revocation"

CRYPTO_METRICS = ("HoEnc", "HReEnc", "HEncRef", "ParHDec1", "ParHDec2", "HoAdd", "HoLT")
_BASE_METRICS = ("messages_sent", "bytes_sent")


class CostLedger:
    """Monotone counters keyed by (stage, party, metric)."""

    def __init__(self) -> None:
        self._data: dict[tuple[str, int, str], int] = defaultdict(int)
        self.stage = STAGE_CONSTRUCTION

    def set_stage(self, stage: str) -> None:
        self.stage = stage

    def message(self, sender: int, nbytes: int) -> None:
        self._data[(self.stage, sender, "messages_sent")] += 1
        self._data[(self.stage, sender, "bytes_sent")] += nbytes

    def crypto(self, party: int, primitive: str, count: int = 1) -> None:
        if primitive not in CRYPTO_METRICS:
            raise ValueError("unknown crypto primitive %r" % primitive)
        self._data[(self.stage, party, primitive)] += count

    def total(self, metric: str, stage: str | None = None, party: int | None = None) -> int:
        return sum(
            v
            for (s, p, m), v in self._data.items()
            if m == metric and (stage is None or s == stage) and (party is None or p == party)
        )

    def rows(self) -> list[tuple[str, int, str, int]]:
        """Sorted (stage, party, metric, value) rows; deterministic."""
        return sorted((s, p, m, v) for (s, p, m), v in self._data.items())

    def snapshot(self) -> dict[tuple[str, int, str], int]:
        return dict(self._data)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("stage,party,metric,value\n")
        for stage, party, metric, value in self.rows():
            out.write("%s,%d,%s,%d\n" % (stage, party, metric, value))
        return out.getvalue()
