"""
Nxt-style proof-of-stake forging.

Each account derives a 64-bit *hit* from its public key and the current
generation signature.  Its target ``base_target * seconds * balance`` grows
every second after the last block; the account may forge once the target
exceeds the hit.  The network-wide base target is retargeted after every
block so that blocks arrive every 60 s on average.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from numbers import Integral
from pathlib import Path

from .entropy import binary_shannon_entropy

__all__ = [
    "GENESIS_BASE_TARGET",
    "MAX_BASE_TARGET",
    "BaseTargetState",
    "ForgingAccount",
    "NxtConstants",
    "UnreachableTargetError",
    "account_target",
    "can_forge",
    "compute_hit",
    "effective_balance",
    "forge_wait_time",
    "load_constants",
    "make_account",
    "next_generation_signature",
    "nxt_complexity",
    "retarget_base",
]

GENESIS_BASE_TARGET = 153722867.3
#: 2**64 / (2 * 60), i.e. the genesis base target times the 1e9 NXT supply
MAX_BASE_TARGET = 2.0**64 / 120
HIT_ROUNDS = 8
MIN_FORGING_BALANCE = 1000
REQUIRED_CONFIRMATIONS = 1440
KEY_SIZE = 32


class UnreachableTargetError(ValueError):
    """The capped target can never exceed the hit."""


# -- configuration ----------------------------------------------------------

def _ratio(value) -> float:
    # JSON cannot hold 67/60 exactly, so "a/b" strings are accepted
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


@dataclass(frozen=True)
class NxtConstants:
    """Retargeting and protocol constants.

    ``rule="asymmetric"`` raises the base target by the full clamped ratio
    when blocks are slow and lowers it by ``gamma`` times the deviation when
    they are fast.  ``rule="symmetric"`` blends both directions by ``gamma``;
    it settles several percent above the target block time because the clamp
    truncates the long upper tail of block intervals.
    """

    maxratio: float = 67 / 60
    minratio: float = 53 / 60
    gamma: float = 0.64
    block_time: float = 60.0
    genesis_base_target: float = GENESIS_BASE_TARGET
    max_base_target: float = MAX_BASE_TARGET
    rule: str = "asymmetric"

    def __post_init__(self):
        if not 0 < self.minratio <= 1 <= self.maxratio:
            raise ValueError(
                f"need 0 < minratio <= 1 <= maxratio, got {self.minratio}, {self.maxratio}")
        if self.gamma <= 0 or self.block_time <= 0:
            raise ValueError("gamma and block_time must be positive")
        if not 0 < self.genesis_base_target <= self.max_base_target:
            raise ValueError("genesis base target must be in (0, max_base_target]")
        if self.rule not in ("asymmetric", "symmetric"):
            raise ValueError(f"unknown retarget rule {self.rule!r}")

    @classmethod
    def from_mapping(cls, data: dict) -> "NxtConstants":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown Nxt constants: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            kwargs[key] = value if key == "rule" else _ratio(value)
        return cls(**kwargs)


def load_constants(path: str | Path | None = None) -> NxtConstants:
    """Read constants from a JSON file; ``None`` loads the bundled defaults."""
    if path is None:
        text = resources.files("chaincomplexity.data").joinpath("nxt_defaults.json").read_text()
    else:
        text = Path(path).read_text()
    data = json.loads(text)
    data.pop("_doc", None)
    return NxtConstants.from_mapping(data)


# -- accounts -----------------------------------------------------------------

@dataclass(frozen=True)
class ForgingAccount:
    """An account with a whole-NXT stake.

    ``receipts`` lists recent incoming ``(amount, height)`` pairs; any part
    of the stake not covered by a receipt is treated as long confirmed.
    """

    label: str
    public_key: bytes
    stake_nxt: int
    receipts: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if len(self.public_key) != KEY_SIZE:
            raise ValueError(f"{self.label}: public key must be {KEY_SIZE} bytes")
        stake = self.stake_nxt
        if not isinstance(stake, Integral):
            if isinstance(stake, float) and stake.is_integer():
                stake = int(stake)
            else:
                raise ValueError(f"{self.label}: stake must be whole NXT, got {stake!r}")
        if stake < 0:
            raise ValueError(f"{self.label}: negative stake")
        receipts = tuple((int(a), int(h)) for a, h in self.receipts)
        if any(a <= 0 for a, _ in receipts) or sum(a for a, _ in receipts) > stake:
            raise ValueError(f"{self.label}: receipts must be positive and within the stake")
        object.__setattr__(self, "public_key", bytes(self.public_key))
        object.__setattr__(self, "stake_nxt", int(stake))
        object.__setattr__(self, "receipts", receipts)


def make_account(label: str, stake_nxt: int, receipts=()) -> ForgingAccount:
    """Account whose public key is SHA-256 of its label (handy for scenarios)."""
    key = hashlib.sha256(label.encode("utf-8")).digest()
    return ForgingAccount(label, key, stake_nxt, tuple(receipts))


def effective_balance(account: ForgingAccount, height: int) -> int:
    """Stake confirmed at least 1440 blocks before ``height``; 0 below 1000 NXT."""
    pending = sum(a for a, h in account.receipts if height - h < REQUIRED_CONFIRMATIONS)
    qualifying = account.stake_nxt - pending
    return qualifying if qualifying >= MIN_FORGING_BALANCE else 0


# -- forging ------------------------------------------------------------------

def compute_hit(public_key: bytes, generation_signature: bytes) -> int:
    """Hit of an account on top of a block.

    SHA-256 of ``public_key || generation_signature``, re-hashed until eight
    applications in total; the first 8 bytes of the last digest are read as
    a little-endian unsigned integer.
    """
    if len(public_key) != KEY_SIZE or len(generation_signature) != KEY_SIZE:
        raise ValueError("public key and generation signature must be 32 bytes each")
    digest = hashlib.sha256(bytes(public_key) + bytes(generation_signature)).digest()
    for _ in range(HIT_ROUNDS - 1):
        digest = hashlib.sha256(digest).digest()
    return int.from_bytes(digest[:8], "little")


def next_generation_signature(forger_key: bytes, generation_signature: bytes) -> bytes:
    return hashlib.sha256(bytes(forger_key) + bytes(generation_signature)).digest()


def account_target(base_target: float, seconds_elapsed: float, effective_balance: float,
                   cap: float | None = None) -> float:
    """``base_target * seconds_elapsed * effective_balance``.

    The protocol bounds the base target instead of this product, so no cap
    is applied unless ``cap`` is given.
    """
    if base_target < 0 or seconds_elapsed < 0 or effective_balance < 0:
        raise ValueError("account_target inputs must be non-negative")
    target = base_target * seconds_elapsed * effective_balance
    if cap is not None:
        target = min(target, cap)
    return target


def can_forge(hit: int, target: float) -> bool:
    return target > hit


def forge_wait_time(hit: int, base_target: float, balance: float,
                    cap: float | None = None) -> int:
    """Smallest whole second at which the account's target exceeds ``hit``."""
    if base_target <= 0 or balance <= 0:
        raise ValueError("base_target and balance must be positive")
    if cap is not None and not can_forge(hit, cap):
        raise UnreachableTargetError(f"cap {cap!r} never exceeds hit {hit}")
    s = max(1, math.floor(hit / (base_target * balance)) + 1)
    # the float estimate can be off by one either way near the boundary
    while not can_forge(hit, account_target(base_target, s, balance, cap)):
        s += 1
    while s > 1 and can_forge(hit, account_target(base_target, s - 1, balance, cap)):
        s -= 1
    return s


# -- base target --------------------------------------------------------------

@dataclass(frozen=True)
class BaseTargetState:
    base_target: float
    prev_base_target: float
    recent_block_times: tuple[float, ...]
    constants: NxtConstants = field(default_factory=NxtConstants)

    def __post_init__(self):
        if not 0 < self.base_target <= self.constants.max_base_target:
            raise ValueError(f"base target {self.base_target!r} out of range")
        if self.prev_base_target <= 0:
            raise ValueError("previous base target must be positive")
        object.__setattr__(self, "recent_block_times",
                           tuple(float(t) for t in self.recent_block_times))

    @classmethod
    def genesis(cls, constants: NxtConstants | None = None) -> "BaseTargetState":
        c = constants or NxtConstants()
        return cls(c.genesis_base_target, c.genesis_base_target, (c.block_time,) * 3, c)

    @property
    def average_block_time(self) -> float:
        return sum(self.recent_block_times) / len(self.recent_block_times)

    def after_block(self, seconds: float) -> "BaseTargetState":
        """Record a new block interval, then retarget."""
        history = (self.recent_block_times + (float(seconds),))[-3:]
        return retarget_base(replace(self, recent_block_times=history))


def retarget_base(state: BaseTargetState) -> BaseTargetState:
    """Next base target from the current one and the last three block times.

    Slow blocks raise the base target (forging gets easier), fast blocks
    lower it, and the target block time is a fixed point.  The result is
    floored at half the current value and capped at ``max_base_target``.
    """
    times = state.recent_block_times
    if len(times) != 3 or any(t <= 0 for t in times):
        raise ValueError(f"need three positive recent block times, got {times}")
    c = state.constants
    prev = state.base_target
    ratio = state.average_block_time / c.block_time
    if c.rule == "symmetric":
        clamped = min(max(ratio, c.minratio), c.maxratio)
        new = prev * (1 + c.gamma * (clamped - 1))
    elif ratio > 1:
        new = prev * min(ratio, c.maxratio)
    else:
        new = prev * (1 - c.gamma * (1 - max(ratio, c.minratio)))
    new = min(max(new, prev / 2), c.max_base_target)
    return replace(state, base_target=new, prev_base_target=prev)


def nxt_complexity(block_time: float) -> float:
    """Complexity of the per-second targeting/broadcasting machine."""
    if not block_time > 0:
        raise ValueError(f"block_time must be positive, got {block_time!r}")
    return binary_shannon_entropy(1.0 / block_time)
