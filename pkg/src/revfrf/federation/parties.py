"""The four party roles as message-driven state machines.

Each party consumes its inbox sequentially through a tag-dispatched
``handle`` method; the center server additionally owns the protocol
drivers (tree growth, prediction, testing, revocation), issuing nested
request/response exchanges over the bus.  Crypto primitive invocations
are charged to the ledger at the protocol level by whichever party the
protocol assigns the operation to.
"""

from __future__ import annotations

import random
from typing import TYPE_CHECKING

import numpy as np

from revfrf.errors import ProtocolError, ValidationError
from revfrf.seeding import derive_rng, derive_seed
from revfrf.crypto import ops
from revfrf.crypto.ciphertext import Ciphertext
from revfrf.crypto.fixedpoint import fixed_encode
from revfrf.crypto.keys import KeyPair, PublicKey
from revfrf.federation import messages as pm
from revfrf.federation.auth import HmacTokenScheme, RevocationRequest
from revfrf.federation.roles import CC_ID, CS_ID, KGC_ID, Role, role_of
from revfrf.forest.scoring import select_best_split
from revfrf.forest.splits import recommend_splits, sample_feature_subset
from revfrf.forest.tree import Forest, TreeNode, aggregate_outputs, leaf_weight
from revfrf.transport.bus import Message, MessageBus

if TYPE_CHECKING:
    from revfrf.federation.session import FederationSession


class Party:
    """Base role: id, key material, dispatch table."""

    role: Role

    def __init__(self, party_id: int, session: "FederationSession"):
        self.id = party_id
        self.role = role_of(party_id)
        self.session = session
        self.keypair: KeyPair | None = None
        self.token_secret: bytes = b""
        self.available = True
        self.rng: random.Random = derive_rng(session.seed, "party", party_id)
        self._dispatch = {}

    @property
    def bus(self) -> MessageBus:
        return self.session.bus

    def handle(self, msg: Message) -> Message | None:
        try:
            handler = self._dispatch[msg.tag]
        except KeyError:
            raise ProtocolError(
                "party %d (%s) cannot handle tag %d" % (self.id, self.role.name, msg.tag)
            ) from None
        return handler(msg)

    def _reply(self, msg: Message, tag: int, payload) -> Message:
        return pm.make_message(self.id, msg.sender, tag, payload)

    def _on_key_issue(self, msg: Message) -> None:
        issue: pm.KeyIssue = msg.payload
        self.keypair = issue.keypair
        self.token_secret = issue.token_secret
        return None


class Participant(Party):
    """A normal participant: owns feature columns, recommends splits,
    uploads encrypted winners, partially decrypts on request."""

    def __init__(self, party_id: int, session: "FederationSession", columns: dict[int, np.ndarray]):
        super().__init__(party_id, session)
        self.columns = {f: np.asarray(col, dtype=float) for f, col in columns.items()}
        self.revoked = False
        self.removed_peers: set[int] = set()
        # Candidate thresholds stay local, keyed by node, until a winner is
        # requested; only the split vectors ever leave.
        self._candidates: dict[tuple[int, str], dict[int, tuple[float, ...]]] = {}
        self._dispatch = {
            pm.KEY_ISSUE: self._on_key_issue,
            pm.TRAIN_RECOMMEND: self._on_recommend,
            pm.TRAIN_WINNER: self._on_winner,
            pm.PARDEC1: self._on_pardec1,
            pm.TEST_NODE: self._on_test_node,
            pm.REMOVAL_NOTICE: self._on_removal,
        }

    def _require_active(self) -> None:
        if self.revoked:
            raise ProtocolError("party %d has been revoked" % self.id)
        if not self.available:
            raise ProtocolError("party %d is unavailable" % self.id)

    def _on_recommend(self, msg: Message) -> Message | None:
        self._require_active()
        req: pm.RecommendRequest = msg.payload
        fp = self.session.forest_params
        entries = []
        local = {}
        for f in sorted(self.columns):
            if req.v[f]:
                rng = derive_rng(self.session.seed, "subs", req.tree, req.path, f)
                cand, vectors = recommend_splits(
                    self.columns[f], req.mu, fp.varrho, fp.varsigma, rng, f
                )
                local[f] = cand.thresholds
                entries.append((f, tuple(vectors)))
        if not entries:
            return None
        self._candidates[(req.tree, req.path)] = local
        return self._reply(msg, pm.TRAIN_VECTORS, pm.SplitVectorSet(tuple(entries)))

    def _on_winner(self, msg: Message) -> Message:
        self._require_active()
        req: pm.WinnerRequest = msg.payload
        threshold = self._candidates[(req.tree, req.path)][req.feature_id][req.index]
        m = fixed_encode(threshold, self.session.params)
        ct = ops.ho_enc(self.keypair.pk, m, self.rng)
        self.session.ledger.crypto(self.id, "HoEnc")
        token = HmacTokenScheme.sign(
            self.token_secret, self.id, "node:%d:%s" % (req.tree, req.path)
        )
        return self._reply(msg, pm.TRAIN_SPLIT, pm.EncryptedSplit(ct, token))

    def _on_pardec1(self, msg: Message) -> Message:
        self._require_active()
        ct = ops.par_h_dec1(self.keypair, msg.payload.ct)
        self.session.ledger.crypto(self.id, "ParHDec1")
        return self._reply(msg, pm.PARDEC1_REPLY, pm.CiphertextPayload(ct))

    def _on_test_node(self, msg: Message) -> Message:
        self._require_active()
        req: pm.TestNodeRequest = msg.payload
        ct_split_cs = ops.par_h_dec1(self.keypair, req.ct)
        self.session.ledger.crypto(self.id, "ParHDec1")
        x = float(self.columns[req.feature_id][req.row])
        ct_x = ops.ho_enc(self.keypair.pk, fixed_encode(x, self.session.params), self.rng)
        self.session.ledger.crypto(self.id, "HoEnc")
        compare = pm.make_message(
            self.id, CS_ID, pm.COMPARE, pm.ComparePair(ct_x, ct_split_cs, self.id)
        )
        result = self.bus.rpc(compare)
        ct_bit = ops.par_h_dec1(self.keypair, result.payload.ct)
        self.session.ledger.crypto(self.id, "ParHDec1")
        return self._reply(msg, pm.TEST_BIT, pm.CiphertextPayload(ct_bit))

    def _on_removal(self, msg: Message) -> None:
        self.removed_peers.add(msg.payload.party)
        return None

    def send_prediction_request(self, x: np.ndarray) -> float:
        """Encrypt a full-dimension request and submit it."""
        self._require_active()
        session = self.session
        if len(x) != session.forest_params.n_features:
            raise ValidationError(
                "prediction request must carry all %d feature dimensions"
                % session.forest_params.n_features
            )
        cts = []
        for f in range(len(x)):
            ct = ops.ho_enc(self.keypair.pk, fixed_encode(float(x[f]), session.params), self.rng)
            session.ledger.crypto(self.id, "HoEnc")
            cts.append((f, ct))
        msg = pm.make_message(self.id, CS_ID, pm.PRED_REQUEST, pm.PredictionRequest(tuple(cts)))
        reply = self.bus.rpc(msg)
        return reply.payload.value

    def send_revocation_request(self, level: int) -> bool:
        self._require_active()
        nonce = self.rng.randrange(1 << 31)
        token = HmacTokenScheme.sign(
            self.token_secret, self.id, RevocationRequest(self.id, nonce, b"").context()
        )
        payload = pm.RevokeRequestPayload(self.id, nonce, token, level)
        reply = self.bus.rpc(pm.make_message(self.id, CS_ID, pm.REVOKE_REQUEST, payload))
        return reply.payload.ok


class ComputationServer(Party):
    """Holds the second strong-key share; assists additions, comparisons
    and second-level ciphertext refreshes."""

    def __init__(self, party_id: int, session: "FederationSession"):
        super().__init__(party_id, session)
        self.lam2: int | None = None
        self._dispatch = {
            pm.KEY_ISSUE: self._on_key_issue,
            pm.HOADD: self._on_hoadd,
            pm.HOLT_BIT: self._on_holt_bit,
            pm.REFRESH_BATCH: self._on_refresh,
        }

    def _on_key_issue(self, msg: Message) -> None:
        super()._on_key_issue(msg)
        self.lam2 = msg.payload.lam_share
        return None

    def _on_hoadd(self, msg: Message) -> Message:
        b: pm.AddBundle = msg.payload
        bundle = ops.HoAddBundle(c1_a=b.c1_a, c1_b=b.c1_b, p1_a=b.p1_a, p1_b=b.p1_b)
        ct = ops.ho_add_respond(bundle, self.lam2, b.joint, self.rng)
        return self._reply(msg, pm.HOADD_SUM, pm.CiphertextPayload(ct))

    def _on_holt_bit(self, msg: Message) -> Message:
        b: pm.BitRequest = msg.payload
        ct = ops.ho_lt_bit_respond(b.c1, b.p1, self.lam2, self.session.params, b.out_key, self.rng)
        return self._reply(msg, pm.HOLT_BIT_CT, pm.CiphertextPayload(ct))

    def _on_refresh(self, msg: Message) -> Message:
        refreshed = []
        for ct in msg.payload.cts:
            r_d = self.rng.randrange(1, self.session.params.n)
            refreshed.append(ops.ho_enc_ref(r_d, ct))
            self.session.ledger.crypto(self.id, "HEncRef")
        return self._reply(msg, pm.REFRESH_REPLY, pm.CiphertextBatch(tuple(refreshed)))


class KeyCenter(Party):
    """Trusted key generation and revocation authority."""

    def __init__(self, party_id: int, session: "FederationSession"):
        super().__init__(party_id, session)
        self.revoked_keys: set[int] = set()
        self._dispatch = {pm.KEY_REVOKE: self._on_key_revoke}

    def distribute_keys(self) -> None:
        """Mint and deliver key material to every registered party."""
        session = self.session
        factory = session._factory
        scheme = session.token_scheme
        for pid in session.party_ids():
            kp = factory.new_keypair(pid)
            share = None
            if pid == CS_ID:
                share = session._shares.lam1
            elif pid == CC_ID:
                share = session._shares.lam2
            issue = pm.KeyIssue(kp, share, scheme.party_secret(pid))
            self.bus.rpc(pm.make_message(self.id, pid, pm.KEY_ISSUE, issue))
            session.keyring[pid] = kp.pk

    def _on_key_revoke(self, msg: Message) -> Message:
        self.revoked_keys.add(msg.payload.party)
        return self._reply(msg, pm.KEY_REVOKE_ACK, pm.Ack(True))


class CenterServer(Party):
    """Label holder and orchestrator of all four protocols."""

    def __init__(self, party_id: int, session: "FederationSession", labels: np.ndarray):
        super().__init__(party_id, session)
        self.labels = np.asarray(labels)
        self.lam1: int | None = None
        self.forest: Forest | None = None
        self.observed_bits: list[int] = []
        self._revocation_counter = 0
        self._dispatch = {
            pm.KEY_ISSUE: self._on_key_issue,
            pm.PRED_REQUEST: self._on_predict_request,
            pm.COMPARE: self._on_compare,
            pm.REVOKE_REQUEST: self._on_revoke_request,
        }

    def _on_key_issue(self, msg: Message) -> None:
        super()._on_key_issue(msg)
        self.lam1 = msg.payload.lam_share
        return None

    # -- secure comparison (driver side) ------------------------------------

    def _ho_lt(self, ct_a: Ciphertext, ct_b: Ciphertext, partner_pk: PublicKey) -> Ciphertext:
        """Run the comparison with the computation server's help.

        Returns the encrypted bit under the joint key of this server and
        ``partner_pk``; counts one HoLT invocation here.
        """
        coin, op_a, op_b = ops.ho_lt_prepare(ct_a, ct_b, self.rng)
        bundle, state = ops.ho_add_prepare(op_a, op_b, self.lam1, self.rng)
        add_req = pm.AddBundle(bundle.c1_a, bundle.c1_b, bundle.p1_a, bundle.p1_b, state.joint)
        reply = self.bus.rpc(pm.make_message(self.id, CC_ID, pm.HOADD, add_req))
        ct_beta = ops.ho_add_finish(reply.payload.ct, state, self.rng)
        blinded = ops.ho_lt_blind(ct_beta, self.rng)
        p1 = ops.strong_share(blinded.c1, self.lam1, self.session.params)
        out_key = self.keypair.pk.combine(partner_pk)
        bit_req = pm.BitRequest(blinded.c1, p1, out_key)
        reply = self.bus.rpc(pm.make_message(self.id, CC_ID, pm.HOLT_BIT, bit_req))
        self.session.ledger.crypto(self.id, "HoLT")
        return ops.ho_lt_finish(reply.payload.ct, coin, self.rng)

    def _decrypt_bit(self, ct_joint: Ciphertext, provider: int, requester: int) -> int:
        """Provider strips its key, we finish, and observe one routing bit."""
        if provider not in self.session.active_participant_ids():
            raise ProtocolError("provider %d unavailable; prediction aborts" % provider)
        msg = pm.make_message(self.id, provider, pm.PARDEC1, pm.CiphertextPayload(ct_joint, requester))
        reply = self.bus.rpc(msg)
        bit = ops.par_h_dec2(self.keypair, reply.payload.ct)
        self.session.ledger.crypto(self.id, "ParHDec2")
        if bit not in (0, 1):
            raise ProtocolError("comparison decrypted to a non-bit value")
        self.observed_bits.append(bit)
        return bit

    # -- federated tree growth ----------------------------------------------

    def grow_forest(self, master: int) -> Forest:
        from revfrf.forest.reference import root_selection

        fp = self.session.forest_params
        all_features = tuple(sorted(self.session.feature_owner))
        global_weight = leaf_weight(self.labels, fp.task)
        trees = []
        for t in range(fp.t_max):
            mu0 = root_selection(len(self.labels), fp, master, t, self.session.train_mask)
            trees.append(self._expand(master, t, "", mu0, all_features, 1, global_weight))
        self.forest = Forest(params=fp, trees=trees)
        return self.forest

    def _expand(
        self,
        master: int,
        tree: int,
        path: str,
        mu: np.ndarray,
        features: tuple[int, ...],
        depth: int,
        parent_weight,
        mark_rebuilt: bool = False,
    ) -> TreeNode:
        fp = self.session.forest_params
        has_rows = bool(mu.any())
        weight = leaf_weight(self.labels[mu == 1], fp.task) if has_rows else parent_weight
        if depth > fp.d_max or not features or not has_rows:
            return TreeNode(depth=depth, mu=mu, leaf_value=weight, rebuilt=mark_rebuilt)

        subset = sample_feature_subset(
            features, derive_rng(master, "fsub", tree, path), fp.feature_subset_size
        )
        v = np.zeros(fp.n_features, dtype=np.uint8)
        v[list(subset)] = 1
        req = pm.RecommendRequest(tree, path, mu, v)

        candidates = []
        for pid in self.session.training_participant_ids():
            reply = self.bus.rpc(pm.make_message(self.id, pid, pm.TRAIN_RECOMMEND, req))
            if reply is None:
                continue
            for feature_id, vectors in reply.payload.entries:
                for i, w in enumerate(vectors):
                    candidates.append((pid, feature_id, i, w))

        best = select_best_split(candidates, self.labels, fp.task)
        if best is None:
            return TreeNode(depth=depth, mu=mu, leaf_value=weight, rebuilt=mark_rebuilt)

        win = pm.WinnerRequest(tree, path, best.feature_id, best.index)
        reply = self.bus.rpc(pm.make_message(self.id, best.participant, pm.TRAIN_WINNER, win))
        split: pm.EncryptedSplit = reply.payload

        remaining = tuple(f for f in features if f != best.feature_id)
        node = TreeNode(
            depth=depth,
            mu=mu,
            split_ct=split.ct,
            feature_id=best.feature_id,
            provider=best.participant,
            auth_token=split.token,
            w0=best.w,
            remaining_features=remaining,
            rebuilt=mark_rebuilt,
        )
        node.left = self._expand(
            master, tree, path + "L", (best.w == -1).astype(np.uint8),
            remaining, depth + 1, weight, mark_rebuilt,
        )
        node.right = self._expand(
            master, tree, path + "R", (best.w == 1).astype(np.uint8),
            remaining, depth + 1, weight, mark_rebuilt,
        )
        return node

    # -- prediction and testing ----------------------------------------------

    def _on_predict_request(self, msg: Message) -> Message:
        if self.forest is None:
            raise ProtocolError("no trained forest")
        cts = dict(msg.payload.cts)
        if len(cts) != self.session.forest_params.n_features:
            raise ValidationError("prediction request is missing feature dimensions")
        results = [self._ft_predict(t, cts, msg.sender) for t in self.forest.trees]
        value = aggregate_outputs(results, self.forest.params.task)
        return self._reply(msg, pm.PRED_RESULT, pm.PredictionResult(float(value)))

    def _ft_predict(self, node: TreeNode, cts: dict[int, Ciphertext], requester: int):
        while not node.is_leaf:
            ct_l = self._ho_lt(cts[node.feature_id], node.split_ct, self.session.keyring[node.provider])
            bit = self._decrypt_bit(ct_l, node.provider, requester)
            node = node.left if bit == 1 else node.right
        return node.leaf_value

    def run_test(self, row: int) -> float | int:
        """Prediction over the vertically partitioned training/testing data:
        every comparison is evaluated at the feature's owner."""
        if self.forest is None or not self.forest.trees:
            raise ProtocolError("no trained forest")
        results = [self._ft_test(t, row) for t in self.forest.trees]
        return aggregate_outputs(results, self.forest.params.task)

    def _ft_test(self, node: TreeNode, row: int):
        while not node.is_leaf:
            if node.provider not in self.session.active_participant_ids():
                raise ProtocolError("provider %d unavailable; testing aborts" % node.provider)
            ct_joint = ops.ho_re_enc(self.keypair, node.split_ct)
            self.session.ledger.crypto(self.id, "HReEnc")
            req = pm.TestNodeRequest(ct_joint, row, node.feature_id)
            reply = self.bus.rpc(pm.make_message(self.id, node.provider, pm.TEST_NODE, req))
            bit = ops.par_h_dec2(self.keypair, reply.payload.ct)
            self.session.ledger.crypto(self.id, "ParHDec2")
            if bit not in (0, 1):
                raise ProtocolError("comparison decrypted to a non-bit value")
            self.observed_bits.append(bit)
            node = node.left if bit == 1 else node.right
        return node.leaf_value

    def _on_compare(self, msg: Message) -> Message:
        pair: pm.ComparePair = msg.payload
        partner_pk = self.session.keyring[pair.partner]
        ct_l = self._ho_lt(pair.ct_a, pair.ct_b, partner_pk)
        return self._reply(msg, pm.COMPARE_RESULT, pm.CiphertextPayload(ct_l))

    # -- revocation -----------------------------------------------------------

    def _on_revoke_request(self, msg: Message) -> Message:
        payload: pm.RevokeRequestPayload = msg.payload
        req = RevocationRequest(payload.requester, payload.nonce, payload.token)
        if not self.session.token_scheme.verify(req.requester, req.context(), req.token):
            return self._reply(msg, pm.REVOKE_ACK, pm.Ack(False))
        self._revoke(req.requester, payload.level)
        return self._reply(msg, pm.REVOKE_ACK, pm.Ack(True))

    def _revoke(self, u_r: int, level: int) -> None:
        session = self.session
        session.mark_revoked(u_r)
        master = derive_seed(session.seed, "revoc", self._revocation_counter)
        self._revocation_counter += 1
        destroyed: list[Ciphertext] = []
        for ti, tree in enumerate(self.forest.trees):
            self.forest.trees[ti] = self._revoke_walk(master, ti, tree, "", u_r, destroyed)
        for tree in self.forest.trees:
            for node in tree.walk():
                node.rebuilt = False
        if level >= 2 and destroyed:
            batch = pm.CiphertextBatch(tuple(destroyed))
            reply = self.bus.rpc(pm.make_message(self.id, CC_ID, pm.REFRESH_BATCH, batch))
            refreshed = []
            for ct in reply.payload.cts:
                r_d2 = self.rng.randrange(1, session.params.n)
                refreshed.append(ops.ho_enc_ref(r_d2, ct))
                self.session.ledger.crypto(self.id, "HEncRef")
            session.graveyard.extend(refreshed)
        self.bus.rpc(pm.make_message(self.id, KGC_ID, pm.KEY_REVOKE, pm.PartyRef(u_r)))
        for pid in session.active_participant_ids():
            self.bus.rpc(pm.make_message(self.id, pid, pm.REMOVAL_NOTICE, pm.PartyRef(u_r)))

    def _revoke_walk(
        self,
        master: int,
        tree_idx: int,
        node: TreeNode,
        path: str,
        u_r: int,
        destroyed: list[Ciphertext],
    ) -> TreeNode:
        if node.is_leaf:
            return node
        if node.provider == u_r and not node.rebuilt:
            for n in node.walk():
                if not n.is_leaf:
                    destroyed.append(n.split_ct)
            fp = self.session.forest_params
            features = tuple(
                f for f in node.remaining_features if f in self.session.feature_owner
            )
            fallback = (
                leaf_weight(self.labels[node.mu == 1], fp.task)
                if node.mu.any()
                else leaf_weight(self.labels, fp.task)
            )
            return self._expand(
                master, tree_idx, path, node.mu, features, node.depth, fallback,
                mark_rebuilt=True,
            )
        node.left = self._revoke_walk(master, tree_idx, node.left, path + "L", u_r, destroyed)
        node.right = self._revoke_walk(master, tree_idx, node.right, path + "R", u_r, destroyed)
        return node
