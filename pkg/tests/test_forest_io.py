"""Forest binary file format."""

import numpy as np
import pytest

from revfrf.errors import ValidationError
from revfrf.forest.forest_io import load_forest, save_forest
from tests.conftest import make_session


@pytest.fixture(scope="module")
def trained(k64):
    session, data, plan = make_session(k64, t_max=3, d_max=3, seed=33)
    session.train()
    return session, data


def test_roundtrip_preserves_structure(trained, tmp_path):
    session, _data = trained
    path = tmp_path / "forest.bin"
    nbytes = save_forest(session.forest, path)
    assert nbytes == path.stat().st_size
    loaded = load_forest(path, session.params, lambda pid: session.keyring[pid])
    assert loaded.params == session.forest.params
    assert len(loaded.trees) == len(session.forest.trees)
    for a, b in zip(session.forest.trees, loaded.trees):
        for na, nb in zip(a.walk(), b.walk()):
            assert na.is_leaf == nb.is_leaf
            assert na.depth == nb.depth
            if na.is_leaf:
                assert float(na.leaf_value) == nb.leaf_value
            else:
                assert (na.split_ct.c1, na.split_ct.c2) == (nb.split_ct.c1, nb.split_ct.c2)
                assert na.provider == nb.provider
                assert na.feature_id == nb.feature_id
                assert na.auth_token == nb.auth_token
                assert np.array_equal(na.mu, nb.mu)
                assert np.array_equal(na.w0, nb.w0)
                assert na.remaining_features == nb.remaining_features


def test_loaded_forest_predicts_identically(trained, tmp_path):
    session, data = trained
    path = tmp_path / "forest.bin"
    save_forest(session.forest, path)
    loaded = load_forest(path, session.params, lambda pid: session.keyring[pid])
    before = [session.test(i) for i in range(4)]
    session.adopt_forest(loaded)
    after = [session.test(i) for i in range(4)]
    assert before == after


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOPE" + bytes(32))
    with pytest.raises(ValidationError):
        load_forest(path, None, lambda pid: None)


def test_plaintext_forest_not_serializable(trained, tmp_path, k64):
    session, data = trained
    esc = session.escrow_decrypt_forest()
    for tree in esc.trees:
        for node in tree.walk():
            node.split_ct = None
    with pytest.raises(ValidationError):
        save_forest(esc, tmp_path / "x.bin")
