"""Encrypted prediction and vertically-partitioned testing."""

import numpy as np
import pytest

from revfrf.errors import ProtocolError, ValidationError
from revfrf.federation import messages as pm
from revfrf.federation.roles import CS_ID
from revfrf.forest.tree import predict_plaintext, walk_plaintext
from tests.conftest import make_session
from tests.helpers import path_length


@pytest.fixture(scope="module")
def trained(k64):
    session, data, plan = make_session(
        k64, task=1, rows=80, features=5, participants=2, t_max=4, d_max=3, seed=23,
    )
    session.train()
    return session, data, session.escrow_decrypt_forest()


def test_prediction_matches_plaintext_walk(trained):
    session, data, escrow = trained
    requester = 3
    for i in range(0, 30, 3):
        expected = predict_plaintext(escrow, data.x[i], session.params)
        assert session.predict(requester, data.x[i]) == expected


def test_observed_bits_equal_path_lengths(trained):
    session, data, escrow = trained
    x = data.x[7]
    total_path = sum(path_length(t, x, session.params) for t in escrow.trees)
    session.predict(3, x)
    bits = session.cs.observed_bits
    assert len(bits) == total_path
    assert set(bits) <= {0, 1}
    assert session.ledger.total("HoLT", stage="prediction") >= total_path


def test_per_node_crypto_counts(k64):
    session, data, _plan = make_session(
        k64, rows=40, features=4, participants=2, t_max=1, d_max=2, seed=41,
    )
    session.train()
    escrow = session.escrow_decrypt_forest()
    x = data.x[3]
    d = path_length(escrow.trees[0], x, session.params)
    session.predict(3, x)
    ledger = session.ledger
    assert ledger.total("HoLT", stage="prediction", party=CS_ID) == d
    assert ledger.total("ParHDec2", stage="prediction", party=CS_ID) == d
    total_pardec1 = sum(
        ledger.total("ParHDec1", stage="prediction", party=pid)
        for pid in session.participants
    )
    assert total_pardec1 == d


def test_request_at_threshold_routes_right(trained):
    session, data, escrow = trained
    root = escrow.trees[0]
    assert not root.is_leaf
    x = data.x[0].copy()
    x[root.feature_id] = root.split_scaled / 10**session.params.c
    expected = walk_plaintext(root, x, session.params)
    # at equality the plaintext walk itself goes right;白-box check both
    xs = root.split_scaled
    right_walk = walk_plaintext(root.right, x, session.params) if not root.right.is_leaf else root.right.leaf_value
    assert expected == right_walk
    # and the encrypted walk agrees on the full forest
    assert session.predict(3, x) == predict_plaintext(escrow, x, session.params)


def test_missing_dimension_rejected_before_walk(trained, k64):
    session, data, _escrow = trained
    with pytest.raises(ValidationError):
        session.predict(3, data.x[0][:-1])
    # a crafted wire request with a missing dimension is rejected by CS
    from revfrf.crypto import ops
    from revfrf.crypto.fixedpoint import fixed_encode

    p = session.participants[3]
    short = tuple(
        (f, ops.ho_enc(p.keypair.pk, fixed_encode(1.0, session.params), p.rng))
        for f in range(session.forest_params.n_features - 1)
    )
    holt_before = session.ledger.total("HoLT", stage="prediction")
    with pytest.raises(ValidationError):
        session.bus.rpc(
            pm.make_message(3, CS_ID, pm.PRED_REQUEST, pm.PredictionRequest(short))
        )
    assert session.ledger.total("HoLT", stage="prediction") == holt_before


def test_depth_zero_forest_returns_leaf(k64):
    session, data, _plan = make_session(k64, rows=40, features=4, participants=2,
                                        t_max=2, d_max=0, seed=5)
    session.train()
    majority = session.forest.trees[0].leaf_value
    assert session.predict(3, data.x[0]) == majority
    assert session.cs.observed_bits == []


def test_frf_test_agrees_with_predict_on_assembled_row(trained):
    session, data, _escrow = trained
    for i in (1, 4, 9, 15):
        assert session.test(i) == session.predict(3, data.x[i])


def test_frf_test_reproduces_training_partition_side(k64):
    session, data, _plan = make_session(
        k64, task=1, rows=50, features=4, participants=2, t_max=1, d_max=1, seed=19,
    )
    session.train()
    escrow = session.escrow_decrypt_forest()
    root = escrow.trees[0]
    assert not root.is_leaf
    threshold = root.split_scaled / 10**session.params.c
    checked = 0
    for row in np.flatnonzero(root.mu):
        value = data.x[row, root.feature_id]
        if value == threshold:
            continue  # training uses <=, prediction uses <; skip exact ties
        side = root.left if value <= threshold else root.right
        if root.w0[row] == 0:
            continue
        assert session.test(int(row)) == side.leaf_value
        checked += 1
    assert checked >= 10


def test_empty_forest_errors(k64):
    session, data, _plan = make_session(k64, seed=3)
    with pytest.raises(ProtocolError):
        session.test(0)
    with pytest.raises(ProtocolError):
        session.predict(3, data.x[0])


def test_unavailable_provider_aborts_prediction(trained):
    session, data, _escrow = trained
    providers = session.forest.providers()
    victim = sorted(providers)[0]
    session.participants[victim].available = False
    try:
        with pytest.raises(ProtocolError):
            for i in range(10):
                session.predict(3 if victim != 3 else 4, data.x[i])
    finally:
        session.participants[victim].available = True


def test_frf_test_counts_hreenc_per_node(k64):
    session, data, _plan = make_session(
        k64, rows=40, features=4, participants=2, t_max=1, d_max=2, seed=41,
    )
    session.train()
    escrow = session.escrow_decrypt_forest()
    d = path_length(escrow.trees[0], data.x[6], session.params)
    session.test(6)
    assert session.ledger.total("HReEnc", stage="prediction", party=CS_ID) == d
    # the provider partially decrypts twice per node: split and bit
    total_pardec1 = sum(
        session.ledger.total("ParHDec1", stage="prediction", party=pid)
        for pid in session.participants
    )
    assert total_pardec1 == 2 * d


def test_out_of_range_request_rejected_before_any_message(trained):
    from revfrf.errors import FixedPointRangeError

    session, data, _escrow = trained
    x = data.x[0].copy()
    x[0] = session.params.r1 / 10**session.params.c + 1  # beyond the range bound
    msgs_before = session.ledger.total("messages_sent", stage="prediction")
    with pytest.raises(FixedPointRangeError):
        session.predict(3, x)
    assert session.ledger.total("messages_sent", stage="prediction") == msgs_before
