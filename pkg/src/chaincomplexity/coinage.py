"""
Coin-age proof of stake (PPCoin-style hybrid minting).

Coin age is amount times holding period, in coin-days.  A coinstake spends
an output and consumes its age; the stake kernel must hash below a target
that scales with the coin-days it consumes, so old or large outputs find
kernels sooner.  Kernel search is one hash per unspent output per second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .pow import CurrencyParams, pow_complexity

__all__ = [
    "SECONDS_PER_DAY",
    "CoinstakeRecord",
    "WalletOutput",
    "coin_age",
    "consume_coin_age",
    "continuous_retarget",
    "expected_kernel_time",
    "hybrid_complexity",
    "kernel_target",
    "output_coin_age",
]

SECONDS_PER_DAY = 86400.0


def coin_age(amount: float, holding_days: float) -> float:
    """Coin-days accumulated by ``amount`` coins held for ``holding_days``."""
    if amount < 0 or holding_days < 0:
        raise ValueError(f"amount and holding period must be non-negative, got {amount}, {holding_days}")
    return amount * holding_days


@dataclass
class WalletOutput:
    """An unspent output.  ``received_at`` is a timestamp in seconds."""

    amount: float
    received_at: float = 0.0
    owner: str = ""
    spent: bool = False

    def __post_init__(self):
        if not self.amount > 0:
            raise ValueError(f"output amount must be positive, got {self.amount!r}")


def output_coin_age(output: WalletOutput, now: float, whole_days: bool = False) -> float:
    """Coin-days held by ``output`` at time ``now``.

    Age accrues continuously; ``whole_days=True`` truncates the holding
    period to completed days.
    """
    if now < output.received_at:
        raise ValueError("now precedes the output's receipt")
    days = (now - output.received_at) / SECONDS_PER_DAY
    if whole_days:
        days = math.floor(days)
    return coin_age(output.amount, days)


@dataclass(frozen=True)
class CoinstakeRecord:
    consumed_coin_days: float
    owner: str
    block_height: int
    successor: WalletOutput


def consume_coin_age(output: WalletOutput, now: float, block_height: int = 0,
                     whole_days: bool = False) -> CoinstakeRecord:
    """Spend ``output`` in a coinstake, consuming all of its coin age.

    The coins come back as a fresh output received at ``now``, so their age
    restarts at zero.  ``output`` is marked spent.
    """
    if output.spent:
        raise ValueError("output already spent")
    age = output_coin_age(output, now, whole_days)
    output.spent = True
    successor = WalletOutput(output.amount, now, output.owner)
    return CoinstakeRecord(age, output.owner, block_height, successor)


def kernel_target(base_target_per_coinday: float, consumed: float) -> float:
    """Kernel hash target: ``base_target_per_coinday * coin_days``.

    Zero coin age gives a zero target, so the output cannot mint.
    """
    if not base_target_per_coinday > 0:
        raise ValueError("base target per coin-day must be positive")
    if consumed < 0:
        raise ValueError("coin age must be non-negative")
    return base_target_per_coinday * consumed


def expected_kernel_time(consumed: float, reference: tuple[float, float]) -> float:
    """Expected time to a kernel, scaled inversely from a reference output.

    ``reference`` is ``(coin_age, time)`` for an output at the same
    difficulty.  100 coin-years expecting a kernel in 2 days means
    200 coin-years expect one in 1 day.
    """
    ref_age, ref_time = reference
    if not consumed > 0 or not ref_age > 0 or not ref_time > 0:
        raise ValueError("coin ages and reference time must be positive")
    return ref_time * ref_age / consumed


def continuous_retarget(prev_target: float, observed_rate: float, desired_rate: float,
                        window: float = 10.0, max_step: float = 1.1) -> float:
    """Nudge a target toward the desired block rate, every block.

    The target moves by ``((window - 1) + 2 * desired/observed) / (window + 1)``,
    an exponential moving adjustment with fixed point ``observed == desired``.
    Each step's ratio is clamped to ``[1/max_step, max_step]``.
    """
    if not (prev_target > 0 and observed_rate > 0 and desired_rate > 0):
        raise ValueError("target and rates must be positive")
    if window < 1 or max_step < 1:
        raise ValueError("window and max_step must be at least 1")
    step = ((window - 1) + 2 * desired_rate / observed_rate) / (window + 1)
    step = min(max(step, 1 / max_step), max_step)
    return prev_target * step


def hybrid_complexity(params: CurrencyParams) -> float:
    """Same two-state computation as PoW, from the published hash rate."""
    return pow_complexity(params)
