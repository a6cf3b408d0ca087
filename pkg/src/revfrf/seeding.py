"""Deterministic random-stream derivation.

Every randomized operation in the package draws from an explicit
``random.Random`` stream; nothing touches ambient entropy.  Independent
streams are derived from a master seed plus a tuple of string/int tags, so
two components that must make the same draws (the federated trainer and
the centralized reference trainer) can derive identical streams without
sharing generator state, and unrelated draws never perturb each other.
"""

from __future__ import annotations

import hashlib
import random

__all__ = ["derive_seed", "derive_rng"]


def derive_seed(master: int, *tags: int | str) -> int:
    """Hash a master seed and a tag tuple into a fresh 64-bit seed."""
    h = hashlib.sha256()
    h.update(str(int(master)).encode())
    for tag in tags:
        h.update(b"\x1f")
        h.update(str(tag).encode())
    return int.from_bytes(h.digest()[:8], "big")


def derive_rng(master: int, *tags: int | str) -> random.Random:
    """Return a ``random.Random`` seeded from :func:`derive_seed`."""
    return random.Random(derive_seed(master, *tags))
