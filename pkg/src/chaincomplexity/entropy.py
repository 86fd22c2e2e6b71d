"""
Statistical complexity of finite-state block-production machines.

The complexity of a machine is the Shannon entropy (in bits) of its
stationary state occupancy.  Blockchain machines sit in one state almost
all of the time, so the interesting regime is a broadcast probability of
order 1e-22, where ``1 - p`` rounds to exactly 1.0 in double precision.
The ``(1 - p) log(1 - p)`` term is therefore never formed from ``1 - p``
directly for small ``p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "EpsilonMachine",
    "InvalidMachineError",
    "binary_shannon_entropy",
    "pade_log1m",
    "stable_one_minus_term",
    "statistical_complexity",
]

LN2 = math.log(2.0)

#: below this the (1-p) term is evaluated from its power series in p
SERIES_THRESHOLD = 1e-3
#: occupancy must sum to one within this absolute tolerance
NORMALIZATION_TOL = 1e-12


class InvalidMachineError(ValueError):
    """Occupancy that is negative, empty, or does not normalize."""


def _check_probability(p) -> float:
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise ValueError(f"probability must be a real number, got {p!r}") from None
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")
    return p


def pade_log1m(x: float) -> float:
    """Padé approximant of ``ln(1 - x)``: ``-x (6 - x) / (6 - 4x)``.

    Returned exactly as the rational formula gives it (natural log).  The
    relative error grows like ``x**3 / 36``, so it is only meant for
    ``x << 1``.  Divide by ``ln 2`` for bits.
    """
    x = float(x)
    if math.isnan(x) or x < 0.0 or x >= 1.0:
        raise ValueError(f"pade_log1m needs 0 <= x < 1, got {x!r}")
    return -x * (6.0 - x) / (6.0 - 4.0 * x)


def _one_minus_series(p: float) -> float:
    # -(1-p) ln(1-p) = p - sum_{k>=2} p**k / (k (k-1)); p < 1e-3 so k <= 7 is
    # far below double precision.
    acc = 0.0
    pk = p
    for k in range(2, 8):
        pk *= p
        acc += pk / (k * (k - 1))
    return p - acc


def stable_one_minus_term(p: float) -> float:
    """Return ``-(1 - p) * log2(1 - p)`` without rounding ``1 - p`` to 1.

    Small ``p`` goes through the power series of the term, which is exact to
    double precision for ``p < 1e-3``; larger ``p`` uses ``log1p``.
    """
    p = _check_probability(p)
    if p == 0.0 or p == 1.0:
        return 0.0
    if p < SERIES_THRESHOLD:
        return _one_minus_series(p) / LN2
    return -(1.0 - p) * math.log1p(-p) / LN2


def _plogp(p: float) -> float:
    # -p log2 p with 0 log 0 = 0
    if p == 0.0:
        return 0.0
    return -p * math.log2(p)


def binary_shannon_entropy(p: float) -> float:
    """Entropy in bits of a two-state machine with occupancy ``(1 - p, p)``.

    Parameters
    ----------
    p : float
        Probability of either state, in [0, 1].

    Returns
    -------
    float
        ``-(1-p) log2(1-p) - p log2 p``, accurate to ~1e-15 relative even
        when ``p`` is far below machine epsilon.

    Examples
    --------
    >>> binary_shannon_entropy(0.5)
    1.0
    >>> f"{binary_shannon_entropy(3.9e-22):.3g}"
    '2.83e-20'
    """
    p = _check_probability(p)
    if p > 0.5:
        p = 1.0 - p  # exact for p in [0.5, 1]
    return _plogp(p) + stable_one_minus_term(p)


@dataclass(frozen=True)
class EpsilonMachine:
    """Named states with their stationary occupancy probabilities.

    Occupancy within ``NORMALIZATION_TOL`` of summing to one is renormalized;
    anything further off is rejected.
    """

    states: tuple[str, ...]
    occupancy: tuple[float, ...]

    def __post_init__(self):
        states = tuple(self.states)
        occ = tuple(float(p) for p in self.occupancy)
        if not states:
            raise InvalidMachineError("a machine needs at least one state")
        if len(states) != len(occ):
            raise InvalidMachineError(
                f"{len(states)} states but {len(occ)} occupancy values")
        if len(set(states)) != len(states):
            raise InvalidMachineError(f"duplicate state labels in {states}")
        if any(math.isnan(p) or p < 0.0 for p in occ):
            raise InvalidMachineError(f"occupancy must be non-negative: {occ}")
        total = math.fsum(occ)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidMachineError(
                f"occupancy sums to {total!r}, not 1 within {NORMALIZATION_TOL}")
        if total != 1.0:
            occ = tuple(p / total for p in occ)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "occupancy", occ)

    @classmethod
    def two_state(cls, p: float, states: Sequence[str] = ("idle", "broadcast")):
        """Machine that leaves its first state with probability ``p``."""
        p = _check_probability(p)
        return cls(tuple(states), (1.0 - p, p))

    @classmethod
    def from_counts(cls, counts: dict[str, float]):
        """Normalize raw occupancy counts (e.g. seconds per state)."""
        total = math.fsum(counts.values())
        if total <= 0:
            raise InvalidMachineError("counts must have a positive total")
        return cls(tuple(counts), tuple(c / total for c in counts.values()))

    def probability(self, state: str) -> float:
        return self.occupancy[self.states.index(state)]


def statistical_complexity(machine: EpsilonMachine) -> float:
    """Shannon entropy in bits of ``machine``'s state occupancy.

    At most one state can hold more than half the mass.  Its term is
    evaluated from the summed mass of the other states, which keeps
    near-deterministic machines accurate; for two states this is the same
    arithmetic as :func:`binary_shannon_entropy`.
    """
    occ = machine.occupancy
    big = max(range(len(occ)), key=occ.__getitem__)
    if occ[big] <= 0.5:
        return math.fsum(_plogp(p) for p in occ)
    rest = [p for i, p in enumerate(occ) if i != big]
    if len(rest) == 1:
        return binary_shannon_entropy(rest[0])
    return stable_one_minus_term(min(math.fsum(rest), 1.0)) + math.fsum(
        _plogp(p) for p in rest)
