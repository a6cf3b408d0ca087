"""Versioned binary forest files.

Layout: a fixed header (magic, version, task and hyperparameters) followed
by each tree as a pre-order stream of node records.  Internal records
embed the encrypted split in the ciphertext wire format; every internal
node has exactly two children, so pre-order with a leaf/internal tag byte
reconstructs the shape unambiguously.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Callable

import numpy as np

from revfrf.errors import ValidationError
from revfrf.crypto.ciphertext import Ciphertext
from revfrf.crypto.keys import PublicKey, PublicParams
from revfrf.wire import (
    pack_bits,
    pack_f64,
    pack_trits,
    pack_u16,
    pack_u32,
    read_f64,
    read_u16,
    read_u32,
    unpack_bits,
    unpack_trits,
)
from revfrf.forest.tree import Forest, ForestParams, TreeNode

__all__ = ["save_forest", "load_forest", "MAGIC", "FORMAT_VERSION"]

MAGIC = b"RVFF"
FORMAT_VERSION = 1

_LEAF = 0
_INTERNAL = 1


def _encode_node(node: TreeNode, out: bytearray) -> None:
    if node.is_leaf:
        out.append(_LEAF)
        out += pack_u16(node.depth)
        out += pack_f64(float(node.leaf_value))
        return
    if node.split_ct is None:
        raise ValidationError("only forests with encrypted splits are serializable")
    out.append(_INTERNAL)
    out += pack_u16(node.depth)
    out += node.split_ct.to_bytes()
    out += pack_u16(node.provider)
    out += pack_u32(node.feature_id)
    out += pack_u16(len(node.auth_token))
    out += node.auth_token
    out += pack_bits(node.mu)
    out += pack_trits(node.w0)
    out += pack_u32(len(node.remaining_features))
    for f in node.remaining_features:
        out += pack_u32(f)
    _encode_node(node.left, out)
    _encode_node(node.right, out)


def save_forest(forest: Forest, path: str | Path) -> int:
    """Write a trained (encrypted) forest; returns the byte count."""
    p = forest.params
    out = bytearray()
    out += MAGIC
    out += pack_u16(FORMAT_VERSION)
    out.append(p.task)
    out += pack_u16(p.t_max)
    out += pack_u16(p.d_max)
    out += pack_u16(p.varsigma)
    out += pack_u32(p.varrho)
    out += pack_u32(p.n_features)
    out += struct.pack(">h", -1 if p.feature_subset_size is None else p.feature_subset_size)
    out += pack_f64(float("nan") if p.bagging_fraction is None else p.bagging_fraction)
    out += pack_u32(len(forest.trees))
    for tree in forest.trees:
        _encode_node(tree, out)
    Path(path).write_bytes(bytes(out))
    return len(out)


def _decode_node(
    buf: bytes, offset: int, params: PublicParams, pk_of: Callable[[int], PublicKey]
) -> tuple[TreeNode, int]:
    tag = buf[offset]
    offset += 1
    depth, offset = read_u16(buf, offset)
    if tag == _LEAF:
        value, offset = read_f64(buf, offset)
        return TreeNode(depth=depth, mu=np.zeros(0, dtype=np.uint8), leaf_value=value), offset
    # Ciphertext bytes carry only a domain tag; decode in two passes so the
    # provider id (stored right after) can supply the key.
    probe_offset = offset
    from revfrf.crypto.numeric import int_from_bytes

    _, probe_offset = int_from_bytes(buf, probe_offset)
    _, probe_offset = int_from_bytes(buf, probe_offset)
    probe_offset += 1
    provider, _ = read_u16(buf, probe_offset)
    ct, offset = Ciphertext.from_bytes(buf, params, pk_of(provider), offset)
    _, offset = read_u16(buf, offset)  # provider, already read
    feature_id, offset = read_u32(buf, offset)
    token_len, offset = read_u16(buf, offset)
    token = buf[offset : offset + token_len]
    offset += token_len
    mu, offset = unpack_bits(buf, offset)
    w0, offset = unpack_trits(buf, offset)
    n_rem, offset = read_u32(buf, offset)
    remaining = []
    for _ in range(n_rem):
        f, offset = read_u32(buf, offset)
        remaining.append(f)
    node = TreeNode(
        depth=depth,
        mu=mu,
        split_ct=ct,
        feature_id=feature_id,
        provider=provider,
        auth_token=bytes(token),
        w0=w0,
        remaining_features=tuple(remaining),
    )
    node.left, offset = _decode_node(buf, offset, params, pk_of)
    node.right, offset = _decode_node(buf, offset, params, pk_of)
    return node, offset


def load_forest(
    path: str | Path, params: PublicParams, pk_of: Callable[[int], PublicKey]
) -> Forest:
    """Read a forest file; ``pk_of`` resolves provider ids to public keys
    so the decoded ciphertexts regain their key context."""
    buf = Path(path).read_bytes()
    if buf[:4] != MAGIC:
        raise ValidationError("not a forest file (bad magic)")
    offset = 4
    version, offset = read_u16(buf, offset)
    if version != FORMAT_VERSION:
        raise ValidationError("unsupported forest file version %d" % version)
    task = buf[offset]
    offset += 1
    t_max, offset = read_u16(buf, offset)
    d_max, offset = read_u16(buf, offset)
    varsigma, offset = read_u16(buf, offset)
    varrho, offset = read_u32(buf, offset)
    n_features, offset = read_u32(buf, offset)
    (subset,) = struct.unpack_from(">h", buf, offset)
    offset += 2
    bagging, offset = read_f64(buf, offset)
    n_trees, offset = read_u32(buf, offset)
    fparams = ForestParams(
        task=task,
        t_max=t_max,
        d_max=d_max,
        varsigma=varsigma,
        varrho=varrho,
        n_features=n_features,
        feature_subset_size=None if subset < 0 else subset,
        bagging_fraction=None if np.isnan(bagging) else bagging,
    )
    trees = []
    for _ in range(n_trees):
        tree, offset = _decode_node(buf, offset, params, pk_of)
        trees.append(tree)
    return Forest(params=fparams, trees=trees)
