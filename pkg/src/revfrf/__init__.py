"""Revocable federated random forests.

A library and deterministic multi-party simulator for building random
forests over vertically partitioned data, where every stored split is
encrypted under its provider's key and participants can be revoked, with
the affected subtrees destroyed and rebuilt without them.

Subpackages:

* :mod:`revfrf.crypto` -- the two-trapdoor additively homomorphic
  cryptosystem (per-party weak keys, split strong key) and the signed
  fixed-point codec.
* :mod:`revfrf.forest` -- plaintext random-decision-tree machinery and
  the centralized reference trainer used as a correctness oracle.
* :mod:`revfrf.federation` -- the training, prediction, testing and
  revocation protocols as message exchanges between party roles.
* :mod:`revfrf.transport` -- a deterministic in-memory message bus with
  full per-party cost accounting.
* :mod:`revfrf.harness` -- dataset ingestion, synthetic data, metrics
  and experiment sweeps.
* :mod:`revfrf.service` / :mod:`revfrf.cli` -- a FastAPI service
  wrapping the library plus a thin command line client.
"""

__version__ = "0.1.0"
