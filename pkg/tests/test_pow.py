from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from chaincomplexity.entropy import binary_shannon_entropy
from chaincomplexity.pow import (
    MAX_TARGET,
    CurrencyParams,
    Protocol,
    broadcast_probability,
    difficulty_to_target,
    expected_hashes_per_block,
    pow_complexity,
)


def btc(hashrate=2.78e19, block_time=600):
    return CurrencyParams("Bitcoin", Protocol.POW, block_time, hashrate)


def test_max_target_layout():
    raw = MAX_TARGET.to_bytes(32, "big")
    assert raw[:4] == b"\x00" * 4
    assert raw[4:6] == b"\xff\xff"
    assert raw[6:] == b"\x00" * 26
    assert MAX_TARGET < 2**224


def test_params_validation():
    with pytest.raises(ValueError):
        btc(hashrate=0)
    with pytest.raises(ValueError):
        btc(block_time=-1)
    with pytest.raises(ValueError):
        CurrencyParams("x", "PoW", 2, 0.1)  # fewer than one trial per block
    assert CurrencyParams("x", "hybrid", 2, 1).protocol is Protocol.HYBRID


def test_broadcast_probability_bitcoin():
    # mpmath: 1/(2.78e19 * 600)
    assert broadcast_probability(btc()) == pytest.approx(5.99520383693e-23, rel=1e-11)


def test_broadcast_probability_nxt():
    assert broadcast_probability(CurrencyParams("NXT", "PoS", 60, 1.0)) == 1 / 60


def test_broadcast_probability_intro():
    assert broadcast_probability(btc(4.27e18)) == pytest.approx(3.9e-22, rel=1e-2)


@given(st.floats(min_value=1.0, max_value=1e6))
def test_scaling_law(k):
    base = btc(1e12)
    scaled = btc(1e12 * k)
    assert broadcast_probability(scaled) == pytest.approx(broadcast_probability(base) / k, rel=1e-12)


@pytest.mark.parametrize("hashrate, block_time, printed", [
    (2.78e19, 600, 4.51e-21),
    (2.77e14, 15, 1.28e-14),
    (3.50e07, 600, 1.70e-09),
])
def test_pow_complexity_rows(hashrate, block_time, printed):
    assert pow_complexity(btc(hashrate, block_time)) == pytest.approx(printed, rel=5e-3)


@given(st.floats(min_value=1.0, max_value=1e22), st.floats(min_value=1.0, max_value=3600))
def test_consistency(hashrate, block_time):
    p = btc(hashrate, block_time)
    assert pow_complexity(p) == binary_shannon_entropy(broadcast_probability(p))


def test_difficulty_to_target_examples():
    assert difficulty_to_target(1) == MAX_TARGET
    assert difficulty_to_target(2) == MAX_TARGET // 2
    assert difficulty_to_target(2**64) == MAX_TARGET >> 64
    assert difficulty_to_target(1.5) == (MAX_TARGET * 2) // 3
    assert difficulty_to_target(Fraction(7, 3)) == (MAX_TARGET * 3) // 7


@pytest.mark.parametrize("bad", [0, 0.5, -3])
def test_difficulty_domain(bad):
    with pytest.raises(ValueError):
        difficulty_to_target(bad)
    with pytest.raises(ValueError):
        expected_hashes_per_block(bad)


@given(st.floats(min_value=1.0, max_value=1e30), st.floats(min_value=1.001, max_value=1e3))
def test_target_monotone(d, factor):
    assert difficulty_to_target(d * factor) < difficulty_to_target(d)
    assert expected_hashes_per_block(d * factor) > expected_hashes_per_block(d)


def test_expected_hashes_difficulty_one():
    # mpmath: 2**256 / (0xFFFF * 2**208)
    assert expected_hashes_per_block(1) == pytest.approx(4295032833.000015259, rel=1e-15)


def test_expected_hashes_linear():
    assert expected_hashes_per_block(2) == pytest.approx(2 * expected_hashes_per_block(1), rel=1e-12)
    assert expected_hashes_per_block(1e12) == pytest.approx(
        1e12 * expected_hashes_per_block(1), rel=1e-12)


def test_expected_hashes_crosscheck_intro():
    trials = 4.27e18 * 600  # ~2.56e21 hashes per block
    d = trials / expected_hashes_per_block(1)
    assert expected_hashes_per_block(d) == pytest.approx(2.56e21, rel=1e-2)
    assert 1 / expected_hashes_per_block(d) == pytest.approx(3.9e-22, rel=1e-2)


@given(st.floats(min_value=1.0, max_value=1e40))
def test_inverse_consistency(d):
    target = difficulty_to_target(d)
    per_trial = mpmath.mpf(target) / mpmath.mpf(2) ** 256
    assert 1 / expected_hashes_per_block(d) == pytest.approx(float(per_trial), rel=1e-9)
