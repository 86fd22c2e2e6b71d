"""
Seeded discrete-event simulation of block production.

All three simulators tick in whole seconds and report how many seconds the
two-state machine spent in each state, which is what
:func:`empirical_complexity` turns back into bits.  A run is a pure function
of its inputs and seed: randomness comes from a single PCG64 generator
(``numpy.random.default_rng(seed)``), and Nxt hits come from SHA-256 alone.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .coinage import SECONDS_PER_DAY, WalletOutput, consume_coin_age, kernel_target
from .entropy import EpsilonMachine, statistical_complexity
from .nxt import (
    BaseTargetState,
    ForgingAccount,
    NxtConstants,
    REQUIRED_CONFIRMATIONS,
    compute_hit,
    effective_balance,
    forge_wait_time,
    next_generation_signature,
)
from .pow import HASH_SPACE, CurrencyParams, broadcast_probability

__all__ = [
    "MAX_BLOCK_TXS",
    "BlockTrace",
    "CandidateBlock",
    "EmptyReportError",
    "KernelEvent",
    "LedgerState",
    "NoForgerError",
    "SimulationConfigError",
    "SimulationReport",
    "apply_block",
    "calibrate_coinday_target",
    "empirical_complexity",
    "resolve_fork",
    "simulate_coinage_kernel",
    "simulate_nxt_forging",
    "simulate_pow",
    "stake_share_estimate",
]

MAX_BLOCK_TXS = 255
BROADCAST = "broadcasting"


class SimulationConfigError(ValueError):
    pass


class NoForgerError(RuntimeError):
    """No account has a positive effective balance."""


class EmptyReportError(ValueError):
    pass


# -- ledger -------------------------------------------------------------------

@dataclass(frozen=True)
class CandidateBlock:
    forger: str
    forger_key: bytes
    height: int
    tx_count: int
    difficulty_contribution: float
    timestamp: int
    hit: int = 0
    fees: int = 0

    def __post_init__(self):
        if not 0 <= self.tx_count <= MAX_BLOCK_TXS:
            raise ValueError(f"tx_count {self.tx_count} outside [0, {MAX_BLOCK_TXS}]")
        if not self.difficulty_contribution > 0:
            raise ValueError("difficulty contribution must be positive")


@dataclass(frozen=True)
class LedgerState:
    height: int
    balances: tuple[tuple[str, int], ...]
    cumulative_difficulty: float
    generation_signature: bytes
    timestamp: int = 0

    def balance(self, label: str) -> int:
        return dict(self.balances)[label]


def apply_block(state: LedgerState, block: CandidateBlock) -> LedgerState:
    """Ledger after ``block``: the state-transition function of the chain."""
    if block.height != state.height + 1:
        raise ValueError(f"block height {block.height} does not extend {state.height}")
    balances = tuple((label, amount + block.fees if label == block.forger else amount)
                     for label, amount in state.balances)
    return LedgerState(
        height=block.height,
        balances=balances,
        cumulative_difficulty=state.cumulative_difficulty + block.difficulty_contribution,
        generation_signature=next_generation_signature(block.forger_key,
                                                       state.generation_signature),
        timestamp=block.timestamp,
    )


def resolve_fork(parent: LedgerState, candidates: Sequence[CandidateBlock]) -> CandidateBlock:
    """Pick the candidate whose chain has the highest cumulative difficulty.

    Ties go to the lowest hit, then the lowest forger label, so every
    observer picks the same block whatever order candidates arrive in.
    """
    if not candidates:
        raise ValueError("no candidate blocks")
    return min(candidates, key=lambda b: (-(parent.cumulative_difficulty
                                            + b.difficulty_contribution), b.hit, b.forger))


# -- report -------------------------------------------------------------------

@dataclass(frozen=True)
class KernelEvent:
    owner: str
    output: int
    time: int
    coin_days: float
    wait: int


@dataclass(frozen=True)
class BlockTrace:
    """What the Nxt simulator saw while choosing one block."""

    height: int
    start: int
    base_target: float
    generation_signature: str
    balances: dict[str, int]
    hits: dict[str, int]
    wait: int
    candidates: tuple[str, ...]
    winner: str


@dataclass(frozen=True)
class SimulationReport:
    kind: str
    seed: int
    duration: int
    block_intervals: tuple[int, ...]
    state_occupancy: dict[str, int]
    wins_per_account: dict[str, int]
    fork_events: int = 0
    kernel_attempts: int = 0
    kernel_events: tuple[KernelEvent, ...] = ()
    trace: tuple[BlockTrace, ...] = ()

    @property
    def blocks(self) -> int:
        return len(self.block_intervals)

    def mean_interval(self, warmup: int = 0) -> float:
        tail = self.block_intervals[warmup:]
        if not tail:
            raise EmptyReportError("no blocks after warm-up")
        return sum(tail) / len(tail)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["block_intervals"] = list(self.block_intervals)
        out["kernel_events"] = [asdict(e) for e in self.kernel_events]
        out["trace"] = [dict(asdict(t), candidates=list(t.candidates)) for t in self.trace]
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationReport":
        return cls(
            kind=data["kind"],
            seed=data["seed"],
            duration=data["duration"],
            block_intervals=tuple(data["block_intervals"]),
            state_occupancy=dict(data["state_occupancy"]),
            wins_per_account=dict(data["wins_per_account"]),
            fork_events=data.get("fork_events", 0),
            kernel_attempts=data.get("kernel_attempts", 0),
            kernel_events=tuple(KernelEvent(**e) for e in data.get("kernel_events", ())),
            trace=tuple(BlockTrace(**dict(t, candidates=tuple(t["candidates"])))
                        for t in data.get("trace", ())),
        )


def _check_run(duration, seed) -> int:
    if int(duration) != duration or duration <= 0:
        raise SimulationConfigError(f"duration must be a positive whole number of seconds, got {duration!r}")
    if int(seed) != seed or seed < 0:
        raise SimulationConfigError(f"seed must be a non-negative integer, got {seed!r}")
    return int(duration)


# -- proof of work ------------------------------------------------------------

def simulate_pow(params: CurrencyParams, duration: int, seed: int,
                 batch: int = 4096) -> SimulationReport:
    """Mine for ``duration`` one-second ticks.

    Each tick aggregates ``hashrate`` trials that each succeed with
    ``1/(hashrate*block_time)``, so a tick succeeds with
    ``1 - (1 - q)**hashrate``.  Intervals are drawn as geometric variates,
    which is the same process as tick-by-tick Bernoulli draws.
    """
    duration = _check_run(duration, seed)
    if duration < 10 * params.block_time:
        raise SimulationConfigError(
            f"duration {duration} s is shorter than 10 block times ({params.block_time} s)")
    q = broadcast_probability(params)
    p_tick = -math.expm1(params.hashrate * math.log1p(-q))
    if not 0 < p_tick <= 1:
        raise SimulationConfigError(f"per-tick success probability {p_tick!r} is unusable")
    rng = np.random.default_rng(seed)
    intervals: list[int] = []
    elapsed = 0
    while True:
        draws = rng.geometric(p_tick, size=batch)
        ends = elapsed + np.cumsum(draws)
        fit = int(np.searchsorted(ends, duration, side="right"))
        intervals.extend(int(d) for d in draws[:fit])
        if fit < batch:
            break
        elapsed = int(ends[-1])
    blocks = len(intervals)
    return SimulationReport(
        kind="pow",
        seed=int(seed),
        duration=duration,
        block_intervals=tuple(intervals),
        state_occupancy={"mining": duration - blocks, BROADCAST: blocks},
        wins_per_account={params.name: blocks},
    )


# -- Nxt forging ----------------------------------------------------------------

def _genesis_signature(seed: int) -> bytes:
    return hashlib.sha256(b"genesis" + int(seed).to_bytes(8, "little")).digest()


def _credit(account: ForgingAccount, fees: int, height: int) -> ForgingAccount:
    receipts = tuple(r for r in account.receipts if height - r[1] < REQUIRED_CONFIRMATIONS)
    return replace(account, stake_nxt=account.stake_nxt + fees,
                   receipts=receipts + ((fees, height),))


def simulate_nxt_forging(accounts: Sequence[ForgingAccount], duration: int, seed: int,
                         constants: NxtConstants | None = None, tx_rate: float = 0.2,
                         fee_per_tx: int = 0, trace: bool = False) -> SimulationReport:
    """Forge blocks with Nxt's hit/target race for ``duration`` seconds.

    On top of each block every account with a positive effective balance
    computes its hit once.  The block arrives at the first second ``S`` at
    which some target ``base_target * S * balance`` exceeds its hit; every
    account crossing at that second broadcasts a candidate and
    :func:`resolve_fork` picks the winner.  The base target is retargeted
    after each block.  Transactions arrive as a Poisson stream of
    ``tx_rate`` per second and blocks take at most 255 of them.

    The seed fixes the genesis generation signature and the transaction
    stream.
    """
    duration = _check_run(duration, seed)
    accounts = list(accounts)
    labels = [a.label for a in accounts]
    if not accounts or len(set(labels)) != len(labels):
        raise SimulationConfigError("need at least one account, with unique labels")
    if tx_rate < 0 or fee_per_tx < 0:
        raise SimulationConfigError("tx_rate and fee_per_tx must be non-negative")

    rng = np.random.default_rng(seed)
    target = BaseTargetState.genesis(constants)
    ledger = LedgerState(0, tuple((a.label, a.stake_nxt) for a in accounts), 0.0,
                         _genesis_signature(seed))
    index = {label: i for i, label in enumerate(labels)}
    intervals: list[int] = []
    wins = Counter({label: 0 for label in labels})
    traces: list[BlockTrace] = []
    forks = 0
    pending = 0
    now = 0

    while True:
        height = ledger.height
        balances = {a.label: effective_balance(a, height) for a in accounts}
        forgers = [a for a in accounts if balances[a.label] > 0]
        if not forgers:
            raise NoForgerError(f"no account can forge at height {height}")
        bt = target.base_target
        hits = {a.label: compute_hit(a.public_key, ledger.generation_signature) for a in forgers}
        waits = {a.label: forge_wait_time(hits[a.label], bt, balances[a.label]) for a in forgers}
        wait = min(waits.values())
        if now + wait > duration:
            break
        now += wait
        pending += int(rng.poisson(tx_rate * wait))
        tx_count = min(pending, MAX_BLOCK_TXS)
        candidates = [
            CandidateBlock(a.label, a.public_key, height + 1, tx_count, 1.0 / bt, now,
                           hits[a.label], tx_count * fee_per_tx)
            for a in forgers if waits[a.label] == wait
        ]
        winner = resolve_fork(ledger, candidates)
        if trace:
            traces.append(BlockTrace(height, now - wait, bt, ledger.generation_signature.hex(),
                                     balances, hits, wait, tuple(b.forger for b in candidates),
                                     winner.forger))
        forks += len(candidates) > 1
        pending -= winner.tx_count
        ledger = apply_block(ledger, winner)
        if winner.fees:
            i = index[winner.forger]
            accounts[i] = _credit(accounts[i], winner.fees, ledger.height)
        intervals.append(wait)
        wins[winner.forger] += 1
        target = target.after_block(wait)

    blocks = len(intervals)
    return SimulationReport(
        kind="nxt",
        seed=int(seed),
        duration=duration,
        block_intervals=tuple(intervals),
        state_occupancy={"targeting": duration - blocks, BROADCAST: blocks},
        wins_per_account=dict(wins),
        fork_events=forks,
        trace=tuple(traces),
    )


# -- coin-age kernels ---------------------------------------------------------

def _ages(amounts, received, now, whole_days):
    days = np.maximum(now - received, 0.0) / SECONDS_PER_DAY
    if whole_days:
        days = np.floor(days)
    return amounts * days


def calibrate_coinday_target(outputs: Sequence[WalletOutput], block_time: float,
                             now: float = 0.0) -> float:
    """Kernel target per coin-day giving one kernel per ``block_time`` at ``now``."""
    live = [o for o in outputs if not o.spent]
    total = sum(o.amount * max(now - o.received_at, 0.0) / SECONDS_PER_DAY for o in live)
    if not total > 0 or not block_time > 0:
        raise SimulationConfigError("calibration needs positive coin age and block time")
    return HASH_SPACE / (block_time * total)


def simulate_coinage_kernel(outputs: Sequence[WalletOutput], duration: int, seed: int,
                            target_per_coinday: float | None = None,
                            block_time: float = 600.0,
                            whole_days: bool = False) -> SimulationReport:
    """Search for stake kernels, one hash per unspent output per second.

    At second ``t`` each unspent output hashes once and succeeds with
    probability ``kernel_target(target_per_coinday, age) / 2**256``.  A
    success mints a block, consumes the output's coin age and replaces it
    with a fresh output of the same amount.  Kernels found in the same
    second all mint; this models kernel search, not chain selection.

    Outputs are timestamped relative to the start of the run (negative
    ``received_at`` means already aged).  When ``target_per_coinday`` is not
    given it is calibrated so the initial outputs find one kernel per
    ``block_time`` seconds.  Input outputs are not modified.
    """
    duration = _check_run(duration, seed)
    live = [(i, o) for i, o in enumerate(outputs) if not o.spent]
    if not live:
        raise SimulationConfigError("need at least one unspent output")
    if target_per_coinday is None:
        target_per_coinday = calibrate_coinday_target([o for _, o in live], block_time)
    kernel_target(target_per_coinday, 0.0)  # validates the scale

    rng = np.random.default_rng(seed)
    n = len(live)
    amounts = np.array([o.amount for _, o in live], dtype=float)
    received = np.array([o.received_at for _, o in live], dtype=float)
    search_start = np.zeros(n)
    owners = [o.owner for _, o in live]
    # working copies; callers' outputs keep their state
    working = [WalletOutput(o.amount, o.received_at, o.owner) for _, o in live]
    scale = target_per_coinday / HASH_SPACE

    events: list[KernelEvent] = []
    intervals: list[int] = []
    wins = Counter({o: 0 for o in owners})
    broadcast_ticks = 0
    last_block = 0
    for t in range(1, duration + 1):
        ages = _ages(amounts, received, float(t), whole_days)
        hit = rng.random(n) < np.minimum(ages * scale, 1.0)
        if not hit.any():
            continue
        broadcast_ticks += 1
        for k in np.flatnonzero(hit):
            record = consume_coin_age(working[k], float(t), len(intervals) + 1, whole_days)
            events.append(KernelEvent(owners[k], live[k][0], t, record.consumed_coin_days,
                                      t - int(search_start[k])))
            working[k] = record.successor
            received[k] = t
            search_start[k] = t
            intervals.append(t - last_block)
            last_block = t
            wins[owners[k]] += 1

    return SimulationReport(
        kind="coinage",
        seed=int(seed),
        duration=duration,
        block_intervals=tuple(intervals),
        state_occupancy={"searching": duration - broadcast_ticks, BROADCAST: broadcast_ticks},
        wins_per_account=dict(wins),
        kernel_attempts=n * duration,
        kernel_events=tuple(events),
    )


# -- estimators -----------------------------------------------------------------

def empirical_complexity(report: SimulationReport) -> float:
    """Complexity in bits of the measured state occupancy."""
    if sum(report.state_occupancy.values()) <= 0:
        raise EmptyReportError("report has no simulated time")
    return statistical_complexity(EpsilonMachine.from_counts(report.state_occupancy))


def stake_share_estimate(report: SimulationReport,
                         accounts: Sequence[ForgingAccount]) -> dict[str, float]:
    """Fraction of blocks won by each account."""
    labels = {a.label for a in accounts}
    if labels != set(report.wins_per_account):
        raise ValueError(f"accounts {sorted(labels)} do not match the simulated set "
                         f"{sorted(report.wins_per_account)}")
    total = sum(report.wins_per_account.values())
    if total == 0:
        raise EmptyReportError("no blocks were produced")
    return {a.label: report.wins_per_account[a.label] / total for a in accounts}
