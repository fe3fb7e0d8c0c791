"""Shared test oracles, kept independent of the library's engines."""

import itertools
import math

import pytest


def brute_force_expected_shares(share_fn, probs):
    """Exact expected shares by looping over every indicator outcome.

    Pure-python oracle: ``share_fn`` maps a 0/1 tuple to ``n+1`` shares, and
    the result is ``sum over outcomes of Pr[outcome] * shares``. Kept separate
    from the chunked vectorized engine it is used to check.
    """
    n = len(probs)
    means = [0.0] * (n + 1)
    for outcome in itertools.product((0, 1), repeat=n):
        pr = 1.0
        for b, p in zip(outcome, probs):
            pr *= p if b else 1.0 - p
        shares = share_fn(outcome)
        for a in range(n + 1):
            means[a] += pr * shares[a]
    return means


def uniform_tontine_shares(outcome):
    """Oracle share map for equal claiming units: 1/k to each claimant."""
    k = sum(outcome)
    if k == 0:
        return [0.0] * len(outcome) + [1.0]
    return [b / k for b in outcome] + [0.0]


def assert_close_seq(actual, expected, abs_tol=0.0, rel_tol=0.0):
    assert len(actual) == len(expected)
    for a, e in zip(actual, expected):
        assert math.isclose(a, e, rel_tol=rel_tol, abs_tol=abs_tol), (
            f"{tuple(actual)} != {tuple(expected)} (first offender {a} vs {e})"
        )


@pytest.fixture
def tmp_out(tmp_path):
    out = tmp_path / "out"
    return out
