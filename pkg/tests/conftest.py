"""Shared fixtures: cached key sets at several sizes, session builders,
and a terminal summary that prints one line per acceptance criterion."""

from __future__ import annotations

import random

import numpy as np
import pytest

from revfrf.crypto import keygen, keyset_from_primes
from revfrf.federation.session import FederationSession, SessionConfig
from revfrf.harness.dataset import PartitionPlan, synth_dataset

# Exhaustively checkable toy modulus from the classic (7, 11) safe-prime pair.
TOY_P, TOY_Q = 7, 11


@pytest.fixture(scope="session")
def toy77():
    return keyset_from_primes(TOY_P, TOY_Q, c=2, seed=1, r1_bits=1)


@pytest.fixture(scope="session")
def toy_cmp():
    # 13-bit modulus with a [-7, 7] signed comparison range.
    return keyset_from_primes(59, 83, c=0, seed=2, r1_bits=3)


@pytest.fixture(scope="session")
def k64():
    return keygen(kappa=32, c=3, seed=101)


@pytest.fixture(scope="session")
def k128():
    return keygen(kappa=64, c=4, seed=102)


@pytest.fixture(scope="session")
def k256():
    # The "256-bit toy production" size used by the heavier criteria.
    return keygen(kappa=128, c=6, seed=103)


def fresh_keypairs(keyset, *owners):
    _params, factory, _shares = keyset
    fork = factory.fork()
    return [fork.new_keypair(o) for o in owners]


def make_session(
    keyset,
    task=1,
    rows=80,
    features=6,
    participants=3,
    seed=21,
    data_seed=3,
    informative=(0,),
    noise=0.0,
    **cfg,
):
    data = synth_dataset(rows, features, task=task, seed=data_seed,
                         informative=informative, noise=noise)
    plan = PartitionPlan.round_robin(features, participants)
    config = SessionConfig(
        task=task,
        t_max=cfg.pop("t_max", 4),
        d_max=cfg.pop("d_max", 3),
        varsigma=cfg.pop("varsigma", 4),
        varrho=cfg.pop("varrho", 16),
        kappa=keyset[0].kappa,
        c=keyset[0].c,
        seed=seed,
        enable_escrow=cfg.pop("enable_escrow", True),
        trace=cfg.pop("trace", False),
        **cfg,
    )
    session = FederationSession.from_dataset(config, data.x, data.y, plan.owners, keyset=keyset)
    return session, data, plan


def rng_for_test(seed=0):
    return random.Random(seed)


# --- acceptance reporting ----------------------------------------------------

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance.py" in str(report.nodeid):
        _acceptance_results.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in sorted(_acceptance_results):
        terminalreporter.write_line("%s: %s" % (name, outcome.upper()))
