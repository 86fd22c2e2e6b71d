"""Analytic proof-of-work model: broadcast probability and hash targets."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .entropy import EpsilonMachine, binary_shannon_entropy

__all__ = [
    "MAX_TARGET",
    "CurrencyParams",
    "Protocol",
    "broadcast_probability",
    "difficulty_to_target",
    "expected_hashes_per_block",
    "pow_complexity",
    "pow_machine",
]

# Difficulty-1 target: 0xFFFF in bytes 4-5 of the 32-byte big-endian value,
# zeros elsewhere, i.e. 0x00000000FFFF0000...0000 (just under 2**224).
MAX_TARGET = 0xFFFF << 208
HASH_SPACE = 1 << 256


class Protocol(str, enum.Enum):
    POW = "PoW"
    POS = "PoS"
    HYBRID = "Hybrid"

    @classmethod
    def parse(cls, text: str) -> "Protocol":
        key = text.strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown protocol {text!r}; expected PoW, PoS or Hybrid")


@dataclass(frozen=True)
class CurrencyParams:
    """One currency row: block time in seconds, hash rate in hashes/second."""

    name: str
    protocol: Protocol
    block_time: float
    hashrate: float

    def __post_init__(self):
        if not isinstance(self.protocol, Protocol):
            object.__setattr__(self, "protocol", Protocol.parse(str(self.protocol)))
        for field in ("block_time", "hashrate"):
            value = float(getattr(self, field))
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{self.name}: {field} must be positive, got {value!r}")
            object.__setattr__(self, field, value)
        if self.trials_per_block < 1:
            raise ValueError(
                f"{self.name}: hashrate * block_time = {self.trials_per_block!r} "
                "is below one trial per block")

    @property
    def trials_per_block(self) -> float:
        return self.hashrate * self.block_time


def broadcast_probability(params: CurrencyParams) -> float:
    """Probability that a given hash trial yields a block, ``1/(H*T)``."""
    return 1.0 / params.trials_per_block


def pow_machine(params: CurrencyParams) -> EpsilonMachine:
    return EpsilonMachine.two_state(broadcast_probability(params), ("mining", "broadcasting"))


def pow_complexity(params: CurrencyParams) -> float:
    """Complexity in bits of the mining/broadcasting machine for ``params``."""
    return binary_shannon_entropy(broadcast_probability(params))


def _check_difficulty(difficulty) -> Fraction:
    d = Fraction(difficulty)
    if d < 1:
        raise ValueError(f"difficulty must be >= 1, got {difficulty!r}")
    return d


def difficulty_to_target(difficulty) -> int:
    """Hash target for ``difficulty``: ``floor(MAX_TARGET / difficulty)``.

    ``difficulty`` may be an int, float or Fraction; the division is exact.
    """
    d = _check_difficulty(difficulty)
    return (MAX_TARGET * d.denominator) // d.numerator


def expected_hashes_per_block(difficulty) -> float:
    """Mean number of uniform 256-bit hashes needed to land below the target."""
    return HASH_SPACE / difficulty_to_target(difficulty)
