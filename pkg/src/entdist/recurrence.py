"""Two-copy recurrence protocols for the symmetric source family.

The baseline protocol measures pairs of copies with the parity projectors
{|00><00| + |11><11|, |01><01| + |10><10|}: matching odd results leave a
perfect Bell pair, everything else is discarded.  The improved variant
keeps the matching-even branch as well, whose post-measurement state is
back in the source family with a new mixing weight, and feeds it into
another round.
"""

from __future__ import annotations

from dataclasses import dataclass


def two_copy_map(p: float) -> float:
    """Mixing weight of the surviving state after a matching-even result:
    p' = p^2 / (p^2 + 2 (1-p)^2).  p = 2/3 is a fixed point."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    return p * p / (p * p + 2.0 * (1.0 - p) ** 2)


@dataclass(frozen=True)
class RecurrenceState:
    """Mixing weight of the survivors after ``depth`` recurrence rounds."""

    p: float
    depth: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.depth < 0:
            raise ValueError(f"depth must be non-negative, got {self.depth}")

    def step(self) -> "RecurrenceState":
        return RecurrenceState(two_copy_map(self.p), self.depth + 1)


def original_two_copy_rate(p: float) -> float:
    """Ebits per pair keeping only the matching-odd branch.

    That branch occurs with probability p^2/2 and converts two input pairs
    into one Bell pair, so the rate is p^2/4.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return p * p / 4.0


def improved_recurrence_rate(p: float, tail_tolerance: float = 1e-12) -> float:
    """Ebits per pair when matching-even survivors are re-distilled.

    Per round, two pairs at mixing weight q give one Bell pair with
    probability q^2/2 and one surviving pair at two_copy_map(q) with
    probability q^2/2 + (1-q)^2, so

        R(q) = [ q^2/2 + (q^2/2 + (1-q)^2) * R(q') ] / 2.

    Evaluated by running the q-sequence forward and truncating once the
    accumulated per-pair survival weight drops below ``tail_tolerance``
    (the discarded tail is worth at most 1 ebit per surviving pair, so the
    result is a lower bound within tail_tolerance of the limit).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if tail_tolerance <= 0.0:
        raise ValueError("tail_tolerance must be positive")
    total = 0.0
    weight = 1.0  # surviving pairs per original input pair
    q = p
    while weight >= tail_tolerance:
        success = q * q / 2.0
        survive = success + (1.0 - q) ** 2
        total += weight * success / 2.0
        weight *= survive / 2.0
        if weight == 0.0:
            break
        q = two_copy_map(q)
    return total
