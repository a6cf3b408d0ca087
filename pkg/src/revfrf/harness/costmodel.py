"""Structural revocation Monte Carlo and ledger-grounded cost projection.

Revoking a participant destroys every subtree rooted at a node it
provided.  For complete binary trees this is cheap to simulate without
running any protocol: mark nodes as revoked, propagate destruction down,
count.  Two marking models are supported:

* ``per_node``: every internal node is independently revoked with
  probability n_d / 2^d_max -- the normalization the cost analysis uses,
  under which the expected destroyed count per tree is about
  d_max * n_d regardless of tree size.
* ``uniform_owner``: every internal node's provider is uniform over the
  participant set and one participant is revoked, so each node is hit
  with probability n_d / |UD|.

Ledger costs are projected from a real measured session: the construction
stage of an actual federated run gives bytes/messages/encryptions per
expanded node, and retraining-vs-rebuilding costs scale those per-node
constants by total versus destroyed node counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from revfrf.transport.ledger import STAGE_CONSTRUCTION

__all__ = [
    "expected_destroyed",
    "analytic_closed_form",
    "simulate_destroyed_counts",
    "NodeCostProbe",
    "probe_construction_cost",
    "MonteCarloReport",
    "revocation_monte_carlo",
]


def _hit_probability(model: str, d_max: int, n_parties: int, n_revoked: int) -> float:
    if model == "per_node":
        return n_revoked / float(1 << d_max)
    if model == "uniform_owner":
        return n_revoked / float(n_parties)
    raise ValueError("unknown model %r" % model)


def expected_destroyed(model: str, d_max: int, n_parties: int, n_revoked: int = 1) -> float:
    """Exact expected number of destroyed internal nodes per complete tree.

    A node at depth i is destroyed iff it or any of its i-1 proper
    ancestors is hit, so E = sum_i 2^(i-1) * (1 - (1-p)^i).
    """
    p = _hit_probability(model, d_max, n_parties, n_revoked)
    return float(sum((1 << (i - 1)) * (1.0 - (1.0 - p) ** i) for i in range(1, d_max + 1)))


def analytic_closed_form(d_max: int, n_revoked: int = 1, n_parties: int | None = None) -> float:
    """The textbook closed form d_max * n_d for the expected destroyed
    count, optionally rescaled to a 1/|UD| per-node ownership probability
    (which multiplies it by 2^d_max / |UD|).  No de-nesting correction in
    either variant."""
    base = float(d_max * n_revoked)
    if n_parties is None:
        return base
    return base * (1 << d_max) / n_parties


def simulate_destroyed_counts(
    n_forests: int,
    d_max: int,
    n_parties: int,
    model: str = "per_node",
    seed: int = 0,
    n_revoked: int = 1,
) -> np.ndarray:
    """Destroyed-internal-node counts for ``n_forests`` complete trees."""
    p = _hit_probability(model, d_max, n_parties, n_revoked)
    rng = np.random.default_rng(seed)
    counts = np.zeros(n_forests, dtype=np.int64)
    for k in range(n_forests):
        destroyed_above = np.zeros(1, dtype=bool)
        total = 0
        for depth in range(1, d_max + 1):
            width = 1 << (depth - 1)
            inherited = np.repeat(destroyed_above, 2)[:width] if depth > 1 else destroyed_above
            hit = rng.random(width) < p
            destroyed = inherited | hit
            total += int(destroyed.sum())
            destroyed_above = destroyed
        counts[k] = total
    return counts


@dataclass(frozen=True)
class NodeCostProbe:
    """Measured construction cost of one node expansion."""

    bytes_per_node: float
    messages_per_node: float
    hoenc_per_node: float


def probe_construction_cost(session) -> NodeCostProbe:
    """Per-expanded-node construction costs from a trained session's ledger."""
    internal = session.forest.internal_count()
    if internal == 0:
        raise ValueError("probe session trained no internal nodes")
    ledger = session.ledger
    return NodeCostProbe(
        bytes_per_node=ledger.total("bytes_sent", stage=STAGE_CONSTRUCTION) / internal,
        messages_per_node=ledger.total("messages_sent", stage=STAGE_CONSTRUCTION) / internal,
        hoenc_per_node=ledger.total("HoEnc", stage=STAGE_CONSTRUCTION) / internal,
    )


@dataclass(frozen=True)
class MonteCarloReport:
    model: str
    d_max: int
    n_parties: int
    n_forests: int
    total_internal: int
    total_nodes: int
    mean_destroyed: float
    std_destroyed: float
    expected_exact: float
    closed_form: float
    closed_form_scaled: float
    mean_destroyed_fraction: float
    retrain_bytes: float
    rebuild_bytes: float
    cost_ratio: float

    def three_sigma_consistent(self) -> bool:
        """Two-sided check of the empirical mean against the exact
        expectation of the simulated model at three standard errors."""
        if self.n_forests < 2 or self.std_destroyed == 0:
            return True
        stderr = self.std_destroyed / self.n_forests**0.5
        return abs(self.mean_destroyed - self.expected_exact) <= 3.0 * stderr


def revocation_monte_carlo(
    n_forests: int,
    d_max: int,
    n_parties: int,
    probe: NodeCostProbe,
    model: str = "per_node",
    seed: int = 0,
    n_revoked: int = 1,
) -> MonteCarloReport:
    counts = simulate_destroyed_counts(n_forests, d_max, n_parties, model, seed, n_revoked)
    total_internal = (1 << d_max) - 1
    total_nodes = (1 << (d_max + 1)) - 1
    mean = float(counts.mean())
    rebuild = mean * probe.bytes_per_node
    retrain = total_internal * probe.bytes_per_node
    return MonteCarloReport(
        model=model,
        d_max=d_max,
        n_parties=n_parties,
        n_forests=n_forests,
        total_internal=total_internal,
        total_nodes=total_nodes,
        mean_destroyed=mean,
        std_destroyed=float(counts.std(ddof=1)) if n_forests > 1 else 0.0,
        expected_exact=expected_destroyed(model, d_max, n_parties, n_revoked),
        closed_form=analytic_closed_form(d_max, n_revoked),
        closed_form_scaled=analytic_closed_form(d_max, n_revoked, n_parties),
        mean_destroyed_fraction=mean / total_nodes,
        retrain_bytes=retrain,
        rebuild_bytes=rebuild,
        cost_ratio=retrain / rebuild if rebuild else float("inf"),
    )
