import hashlib
import json
import os

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from chaincomplexity.nxt import (
    GENESIS_BASE_TARGET,
    MAX_BASE_TARGET,
    BaseTargetState,
    ForgingAccount,
    NxtConstants,
    UnreachableTargetError,
    account_target,
    can_forge,
    compute_hit,
    effective_balance,
    forge_wait_time,
    load_constants,
    make_account,
    nxt_complexity,
    retarget_base,
)

from sha256_reference import sha256 as ref_sha256

ZERO = bytes(32)


def ref_hit(key, sig):
    digest = ref_sha256(key + sig)
    for _ in range(7):
        digest = ref_sha256(digest)
    return int.from_bytes(digest[:8], "little")


# -- hits ---------------------------------------------------------------------

def test_hit_zero_vector():
    # frozen from the straight-line reference implementation
    assert ref_hit(ZERO, ZERO) == 12690508933859859715
    assert compute_hit(ZERO, ZERO) == 12690508933859859715


def test_hit_sequential_vector():
    key, sig = bytes(range(32)), bytes(range(32, 64))
    assert compute_hit(key, sig) == ref_hit(key, sig) == 1300309949666159349


@settings(max_examples=25, deadline=None)
@given(st.binary(min_size=32, max_size=32), st.binary(min_size=32, max_size=32))
def test_hit_matches_reference(key, sig):
    hit = compute_hit(key, sig)
    assert hit == ref_hit(key, sig)
    assert hit == compute_hit(key, sig)
    assert 0 <= hit < 2**64


@pytest.mark.parametrize("key, sig", [(bytes(31), ZERO), (ZERO, bytes(33)), (b"", b"")])
def test_hit_lengths(key, sig):
    with pytest.raises(ValueError):
        compute_hit(key, sig)


def test_hit_uniformity():
    sig = hashlib.sha256(b"uniformity").digest()
    n = 100_000
    hits = np.array([compute_hit(hashlib.sha256(i.to_bytes(4, "little")).digest(), sig)
                     for i in range(n)], dtype=float) / 2.0**64
    statistic, _ = stats.kstest(hits, "uniform")
    critical = stats.kstwo.ppf(0.99, n)
    assert statistic < critical


# -- targets --------------------------------------------------------------------

def test_account_target_examples():
    assert account_target(GENESIS_BASE_TARGET, 0, 1000) == 0
    assert account_target(GENESIS_BASE_TARGET, 60, 0) == 0
    assert account_target(GENESIS_BASE_TARGET, 60, 1000) == pytest.approx(9.223372038e12, rel=1e-12)
    assert account_target(5.0, 7, 2000) == 2 * account_target(5.0, 7, 1000)


def test_account_target_optional_cap():
    assert account_target(GENESIS_BASE_TARGET, 10**6, 10**9, cap=MAX_BASE_TARGET) == MAX_BASE_TARGET
    with pytest.raises(ValueError):
        account_target(-1.0, 1, 1)


def test_can_forge_is_strict():
    assert not can_forge(100, 100)
    assert can_forge(100, 101)
    assert not can_forge(2**64 - 1, 2.0**64 / 120)


def test_wait_time_examples():
    assert forge_wait_time(0, GENESIS_BASE_TARGET, 1000) == 1
    product = GENESIS_BASE_TARGET * 60 * 1000
    assert forge_wait_time(int(product) - 1, GENESIS_BASE_TARGET, 1000) == 60


def test_wait_time_unreachable_with_cap():
    with pytest.raises(UnreachableTargetError):
        forge_wait_time(2**64 - 1, GENESIS_BASE_TARGET, 1000, cap=2.0**64 / 120)
    assert forge_wait_time(10, 1.0, 1.0, cap=20.0) == 11


@settings(max_examples=1000, deadline=None)
@given(st.integers(min_value=0, max_value=2**64 - 1),
       st.floats(min_value=1.0, max_value=1e12),
       st.integers(min_value=1000, max_value=10**9))
def test_wait_time_boundary(hit, base_target, balance):
    s = forge_wait_time(hit, base_target, balance)
    assert can_forge(hit, account_target(base_target, s, balance))
    assert not can_forge(hit, account_target(base_target, s - 1, balance))


@given(st.integers(min_value=0, max_value=2**64 - 1),
       st.floats(min_value=1.0, max_value=1e10),
       st.integers(min_value=1000, max_value=10**8))
def test_wait_time_monotone_in_balance(hit, base_target, balance):
    assert forge_wait_time(hit, base_target, 2 * balance) <= forge_wait_time(hit, base_target, balance)


def test_eligibility_brute_force():
    # the eligible set at second S is {k : Tb*S*B_k > H_k}, and richer accounts
    # with the same hit are eligible whenever poorer ones are
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 65))
        hits = [int(h) for h in rng.integers(0, 2**63, size=n, dtype=np.uint64) * 2]
        balances = [int(b) for b in rng.integers(1000, 10**8, size=n)]
        bt = float(rng.uniform(1e5, 1e9))
        waits = [forge_wait_time(h, bt, b) for h, b in zip(hits, balances)]
        for s in sorted(set(waits))[:5] + [1, max(waits)]:
            eligible = {k for k in range(n) if bt * s * balances[k] > hits[k]}
            assert eligible == {k for k in range(n) if waits[k] <= s}
    for hit in (0, 10**12, 2**63):
        for b1 in (1000, 5000, 10**6):
            for b2 in (1000, 3000, 10**5):
                if b1 <= b2:
                    continue
                for s in (1, 30, 60, 3600):
                    if can_forge(hit, account_target(GENESIS_BASE_TARGET, s, b2)):
                        assert can_forge(hit, account_target(GENESIS_BASE_TARGET, s, b1))


# -- effective balance ----------------------------------------------------------

def test_effective_balance_examples():
    assert effective_balance(make_account("a", 999), 5000) == 0
    assert effective_balance(make_account("b", 1000, [(1000, 0)]), 1440) == 1000
    assert effective_balance(make_account("b", 1000, [(1000, 1)]), 1440) == 0
    mixed = make_account("c", 5000, [(2000, 4998)])
    assert effective_balance(mixed, 5000) == 3000
    assert effective_balance(mixed, 4998 + 1440) == 5000


def test_effective_balance_bounded_by_stake():
    acct = make_account("d", 123456, [(1000, 10), (2000, 20)])
    for h in (0, 100, 1449, 1450, 1460, 5000):
        assert 0 <= effective_balance(acct, h) <= acct.stake_nxt


def test_account_validation():
    with pytest.raises(ValueError):
        ForgingAccount("x", bytes(31), 1000)
    with pytest.raises(ValueError):
        ForgingAccount("x", ZERO, -1)
    with pytest.raises(ValueError):
        ForgingAccount("x", ZERO, 1000.5)
    with pytest.raises(ValueError):
        ForgingAccount("x", ZERO, 1000, ((2000, 0),))
    assert ForgingAccount("x", ZERO, 1000.0).stake_nxt == 1000


# -- retargeting ----------------------------------------------------------------

def state(times, base=GENESIS_BASE_TARGET, **kw):
    c = NxtConstants(**kw)
    return BaseTargetState(base, base, tuple(times), c)


@pytest.mark.parametrize("rule", ["asymmetric", "symmetric"])
def test_retarget_fixed_point(rule):
    assert retarget_base(state([60, 60, 60], rule=rule)).base_target == GENESIS_BASE_TARGET
    assert retarget_base(state([30, 60, 90], rule=rule)).base_target == GENESIS_BASE_TARGET


@pytest.mark.parametrize("rule", ["asymmetric", "symmetric"])
def test_retarget_direction(rule):
    c = NxtConstants(rule=rule)
    slow = retarget_base(state([90, 90, 90], rule=rule))
    assert GENESIS_BASE_TARGET < slow.base_target <= GENESIS_BASE_TARGET * c.maxratio
    assert slow.prev_base_target == GENESIS_BASE_TARGET
    fast = retarget_base(state([20, 20, 20], rule=rule))
    assert GENESIS_BASE_TARGET * c.minratio <= fast.base_target < GENESIS_BASE_TARGET


def test_retarget_floor_with_extreme_gamma():
    out = retarget_base(state([10, 10, 10], gamma=10.0))
    assert out.base_target == GENESIS_BASE_TARGET / 2


def test_retarget_ceiling():
    near = MAX_BASE_TARGET * 0.99
    assert retarget_base(state([500] * 3, base=near)).base_target == MAX_BASE_TARGET


def test_retarget_needs_history():
    with pytest.raises(ValueError):
        retarget_base(state([60, 60]))
    with pytest.raises(ValueError):
        retarget_base(state([60, 0, 60]))


@given(st.lists(st.integers(min_value=1, max_value=10_000), min_size=1, max_size=200),
       st.floats(min_value=0.01, max_value=50), st.sampled_from(["asymmetric", "symmetric"]))
def test_clamp_safety(times, gamma, rule):
    s = BaseTargetState.genesis(NxtConstants(gamma=gamma, rule=rule))
    for t in times:
        nxt = s.after_block(t)
        assert nxt.base_target >= s.base_target / 2
        assert nxt.base_target <= MAX_BASE_TARGET
        s = nxt


# -- constants file ------------------------------------------------------------

def test_bundled_constants():
    c = load_constants()
    assert c == NxtConstants()
    assert c.maxratio == 67 / 60 and c.minratio == 53 / 60 and c.gamma == 0.64


def test_constants_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"gamma": 0.5, "maxratio": "7/6", "rule": "symmetric"}))
    c = load_constants(path)
    assert c.gamma == 0.5 and c.maxratio == 7 / 6 and c.rule == "symmetric"
    path.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ValueError):
        load_constants(path)


# -- complexity ---------------------------------------------------------------------

def test_nxt_complexity():
    assert nxt_complexity(60) == pytest.approx(0.122, rel=5e-3)
    assert nxt_complexity(2) == 1.0
    # mpmath binary entropy at p = 1/600
    assert nxt_complexity(600) == pytest.approx(0.017783851361743189, rel=1e-14)
    with pytest.raises(ValueError):
        nxt_complexity(0)
