"""Homomorphism spot-checks at the full production modulus size."""

import random

import pytest

from revfrf.crypto import keygen, ops
from revfrf.crypto.numeric import invert, powmod


@pytest.fixture(scope="module")
def production_keys():
    return keygen(kappa=512, c=6, seed=424242)


def test_production_modulus_shape(production_keys):
    params, _factory, shares = production_keys
    assert params.n.bit_length() == 1024
    assert params.r1_bits == 255
    s = shares.lam1 + shares.lam2
    assert s % shares.lam == 0 and s % params.n_sq == 1


def test_additivity_10k_random_cases(production_keys):
    params, factory, _shares = production_keys
    kp = factory.fork().new_keypair(3)
    rng = random.Random(11)
    n, n_sq = params.n, params.n_sq

    # Pool of fresh encryptions with their decryption denominators
    # precomputed (c2^sk); each sampled pair is then decrypted through the
    # standard formula u = C1 * (C2^sk)^-1 without redundant powmods.
    pool = []
    for _ in range(500):
        m = rng.randrange(n)
        ct = ops.ho_enc(kp.pk, m, rng)
        pool.append((m, ct, powmod(ct.c2, kp.sk, n_sq)))

    failures = 0
    for _ in range(10_000):
        (m1, ct1, d1) = pool[rng.randrange(len(pool))]
        (m2, ct2, d2) = pool[rng.randrange(len(pool))]
        c1 = (ct1.c1 * ct2.c1) % n_sq
        u = (c1 * invert((d1 * d2) % n_sq, n_sq)) % n_sq
        assert (u - 1) % n == 0
        if ((u - 1) // n) % n != (m1 + m2) % n:
            failures += 1
    assert failures == 0


def test_negation_at_production_size(production_keys):
    params, factory, _shares = production_keys
    kp = factory.fork().new_keypair(3)
    rng = random.Random(12)
    for _ in range(20):
        m = rng.randrange(params.n)
        ct = ops.ho_enc(kp.pk, m, rng)
        assert ops.weak_decrypt(kp, ops.ct_negate(ct)) == (-m) % params.n
