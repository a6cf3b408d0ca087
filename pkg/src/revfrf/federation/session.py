"""Session wiring: keys, parties, bus, and the protocol entry points.

A session owns one federation: a center server holding the labels, a
computation server holding the second strong-key share, a key center, and
one participant per vertical data slice.  Drivers set the ledger stage so
costs are attributed to construction, prediction or revocation.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from revfrf.errors import ProtocolError, ValidationError
from revfrf.seeding import derive_seed
from revfrf.crypto import keygen, ops
from revfrf.crypto.fixedpoint import to_signed
from revfrf.crypto.keys import KeyFactory, PublicParams, StrongKeyShares
from revfrf.federation.auth import HmacTokenScheme
from revfrf.federation.parties import CenterServer, ComputationServer, KeyCenter, Participant
from revfrf.federation.roles import CC_ID, CS_ID, FIRST_PARTICIPANT_ID, KGC_ID
from revfrf.forest.tree import Forest, ForestParams
from revfrf.transport.bus import MessageBus
from revfrf.transport.ledger import (
    CostLedger,
    STAGE_CONSTRUCTION,
    STAGE_PREDICTION,
    STAGE_REVOCATION,
)

__all__ = ["SessionConfig", "FederationSession"]


@dataclass(frozen=True)
class SessionConfig:
    """Everything a federation run depends on, seeds included."""

    task: int
    t_max: int = 100
    d_max: int = 10
    varsigma: int = 8
    varrho: int = 32
    feature_subset_size: int | None = None
    bagging_fraction: float | None = None
    kappa: int = 512
    c: int = 6
    r1_bits: int | None = None
    seed: int = 0
    enable_escrow: bool = False
    trace: bool = False


class FederationSession:
    """One federation instance over vertically partitioned data.

    Args:
        config: hyperparameters and seeds.
        columns_by_participant: participant id -> {feature id -> column};
            participant ids must start at FIRST_PARTICIPANT_ID and the
            feature ids must partition range(n_features).
        labels: ground truths, held by the center server only.
        keyset: optional pre-built (params, factory, shares) triple; when
            absent the key center generates keys from the session seed.
    """

    def __init__(
        self,
        config: SessionConfig,
        columns_by_participant: dict[int, dict[int, np.ndarray]],
        labels: np.ndarray,
        keyset: tuple[PublicParams, KeyFactory, StrongKeyShares] | None = None,
    ) -> None:
        if len(columns_by_participant) < 2:
            raise ValidationError("a federation needs at least two participants")
        self.config = config
        self.seed = config.seed

        features = sorted(f for cols in columns_by_participant.values() for f in cols)
        if features != list(range(len(features))):
            raise ValidationError("feature ids must partition 0..n_features-1")
        n_rows = len(labels)
        for cols in columns_by_participant.values():
            for col in cols.values():
                if len(col) != n_rows:
                    raise ValidationError("column length does not match label count")

        self.forest_params = ForestParams(
            task=config.task,
            t_max=config.t_max,
            d_max=config.d_max,
            varsigma=config.varsigma,
            varrho=config.varrho,
            n_features=len(features),
            feature_subset_size=config.feature_subset_size,
            bagging_fraction=config.bagging_fraction,
        )

        if keyset is None:
            keyset = keygen(
                kappa=config.kappa,
                c=config.c,
                seed=derive_seed(config.seed, "keys"),
                r1_bits=config.r1_bits,
            )
        self.params, factory, self._shares = keyset
        self._factory = factory.fork()

        self.ledger = CostLedger()
        self.bus = MessageBus(ledger=self.ledger, seed=config.seed, trace=config.trace)
        self.token_scheme = HmacTokenScheme(
            derive_seed(config.seed, "tokens").to_bytes(8, "big")
        )
        self.keyring: dict[int, object] = {}
        self.graveyard: list = []
        self.train_mask: np.ndarray | None = None

        self.cs = CenterServer(CS_ID, self, labels)
        self.cc = ComputationServer(CC_ID, self)
        self.kgc = KeyCenter(KGC_ID, self)
        self.participants: dict[int, Participant] = {}
        self.feature_owner: dict[int, int] = {}
        for pid in sorted(columns_by_participant):
            if pid < FIRST_PARTICIPANT_ID:
                raise ValidationError(
                    "participant ids start at %d" % FIRST_PARTICIPANT_ID
                )
            self.participants[pid] = Participant(pid, self, columns_by_participant[pid])
            for f in columns_by_participant[pid]:
                self.feature_owner[f] = pid

        for party in self._all_parties():
            self.bus.register(party.id, party.handle)

        self.ledger.set_stage(STAGE_CONSTRUCTION)
        self.kgc.distribute_keys()

    # -- construction helpers --------------------------------------------------

    @classmethod
    def from_dataset(
        cls,
        config: SessionConfig,
        x: np.ndarray,
        y: np.ndarray,
        plan: dict[int, Iterable[int]],
        keyset=None,
    ) -> "FederationSession":
        """Build a session from a row-major matrix and a partition plan
        (participant id -> owned feature ids)."""
        x = np.asarray(x, dtype=float)
        columns = {
            pid: {int(f): x[:, int(f)] for f in feats} for pid, feats in plan.items()
        }
        return cls(config, columns, y, keyset=keyset)

    def _all_parties(self):
        return [self.cs, self.cc, self.kgc, *self.participants.values()]

    def party_ids(self) -> list[int]:
        return [CS_ID, CC_ID, *sorted(self.participants)]

    def active_participant_ids(self) -> list[int]:
        return [
            pid
            for pid in sorted(self.participants)
            if not self.participants[pid].revoked and self.participants[pid].available
        ]

    def training_participant_ids(self) -> list[int]:
        """Everyone not revoked.  Absent (unavailable) parties are still
        contacted during training and abort it loudly rather than being
        skipped -- no partial silent trees."""
        return [
            pid for pid in sorted(self.participants) if not self.participants[pid].revoked
        ]

    def mark_revoked(self, u_r: int) -> None:
        self.participants[u_r].revoked = True
        self.feature_owner = {
            f: p for f, p in self.feature_owner.items() if p != u_r
        }

    @property
    def owner_of(self) -> dict[int, int]:
        return dict(self.feature_owner)

    # -- protocol drivers -------------------------------------------------------

    def train(self) -> Forest:
        self.ledger.set_stage(STAGE_CONSTRUCTION)
        return self.cs.grow_forest(self.seed)

    def adopt_forest(self, forest: Forest) -> None:
        """Install a previously trained (loaded) forest into this session."""
        if forest.params.n_features != self.forest_params.n_features:
            raise ValidationError("forest feature count does not match session")
        self.cs.forest = forest

    def predict(self, requester: int, x: np.ndarray) -> float | int:
        """Full-dimension encrypted prediction on behalf of ``requester``."""
        self.ledger.set_stage(STAGE_PREDICTION)
        self.cs.observed_bits = []
        value = self.participants[requester].send_prediction_request(np.asarray(x, dtype=float))
        # Class ids ride the wire as f64; restore the integer type here.
        from revfrf.forest.scoring import TASK_CLASSIFICATION

        return int(value) if self.config.task == TASK_CLASSIFICATION else value

    def test(self, row: int) -> float | int:
        """Prediction over the vertically partitioned data for one row."""
        self.ledger.set_stage(STAGE_PREDICTION)
        self.cs.observed_bits = []
        return self.cs.run_test(row)

    def revoke(self, u_r: int, level: int = 1) -> bool:
        """Participant ``u_r`` asks to leave; returns acceptance."""
        if u_r not in self.participants:
            raise ValidationError("unknown participant %d" % u_r)
        if level not in (1, 2):
            raise ValidationError("revocation level must be 1 or 2")
        self.ledger.set_stage(STAGE_REVOCATION)
        return self.participants[u_r].send_revocation_request(level)

    @property
    def forest(self) -> Forest | None:
        return self.cs.forest

    # -- test-only escrow --------------------------------------------------------

    def escrow_decrypt_forest(self) -> Forest:
        """Decrypt every stored split with the strong key (both shares).

        A white-box hook for equivalence testing only; refuse unless the
        session was built with ``enable_escrow``.
        """
        if not self.config.enable_escrow:
            raise ProtocolError("escrow decryption is disabled for this session")
        if self.cs.forest is None:
            raise ProtocolError("no trained forest")
        forest = copy.deepcopy(self.cs.forest)
        for tree in forest.trees:
            for node in tree.walk():
                if not node.is_leaf:
                    raw = ops.strong_decrypt(self._shares, node.split_ct)
                    node.split_scaled = to_signed(raw, self.params)
        return forest
