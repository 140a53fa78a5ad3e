"""Optimal distillation rates for measured blocks and whole protocols.

After a block of ``level`` pairs is measured with results (a, b), the
parties either share a maximally entangled state (a + b = level), a
separable state (a = 0 or b = 0 short of full weight), or a mixed
entangled state on which they choose between two continuations: run the
one-way hashing protocol on many identically measured blocks, or bisect
the block, re-measure both halves, and recurse.  The optimal value
R(level, a, b) of that choice satisfies

    R = max{ hashing_rate,  E_split[ R(left half) + R(right half) ] }

and is filled bottom-up into a :class:`RateTable`.  The table is pure
combinatorics -- the source parameters only enter through the outcome
distribution of the very first measurement -- so one table per block size
serves every source.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .numerics import LN2, binary_entropy, is_power_of_two, log_binomial, pure_block_yield
from .states import (
    BlockOutcome,
    SourceState,
    exact_outcome_probability,
    log_conditional_weight,
    outcome_probability,
    split_distribution,
)

#: Block sizes above this refuse to build unless explicitly allowed.
DEFAULT_MAX_LEVEL = 128

#: Hard ceiling on the exact-rational expectation backend.
EXACT_BACKEND_MAX_N = 16


class Decision(enum.Enum):
    """What the parties do with a measured block."""

    TERMINAL = "terminal"    # a + b = level: already maximally entangled
    SEPARABLE = "separable"  # a = 0 or b = 0 short of full weight: worthless
    HASH = "hash"            # run one-way hashing across identical blocks
    SPLIT = "split"          # bisect and re-measure both halves


_DEC_CODES = {d: i for i, d in enumerate(Decision)}
_DEC_FROM_CODE = {i: d for d, i in _DEC_CODES.items()}
_INVALID = -1


class PolicyEntry(NamedTuple):
    outcome: BlockOutcome
    decision: Decision
    rate: float


def alice_entropy(n: int, a: int) -> float:
    """Entropy of Alice's marginal after result a: log2 C(n, a) bits."""
    return log_binomial(n, a) / LN2


def bob_entropy(n: int, b: int) -> float:
    """Entropy of Bob's marginal after result b: log2 C(n, b) bits."""
    return log_binomial(n, b) / LN2


def joint_entropy(n: int, a: int, b: int) -> float:
    """Entropy of the shared post-measurement state: log2 C(n, a+b) bits."""
    if a < 0 or b < 0 or a + b > n:
        raise ValueError(f"invalid outcome (n={n}, a={a}, b={b})")
    return log_binomial(n, a + b) / LN2


def hashing_rate(n: int, a: int, b: int) -> float:
    """Ebits per block from one-way hashing a measured block; may be negative.

    The better communication direction gives
    log2 max{C(n, a), C(n, b)} - log2 C(n, a+b).
    """
    if a < 0 or b < 0 or a + b > n:
        raise ValueError(f"invalid outcome (n={n}, a={a}, b={b})")
    local = max(log_binomial(n, a), log_binomial(n, b))
    return (local - log_binomial(n, a + b)) / LN2


def _reversed_slice(start: int, stop: int) -> slice:
    """Slice yielding start, start-1, ..., stop (inclusive), stop >= 0."""
    return slice(start, stop - 1 if stop > 0 else None, -1)


class RateTable:
    """Memoized optimal block rates R(level, a, b) with their decisions.

    Levels 1, 2, 4, ..., max_level are filled bottom-up, so lookups never
    recurse.  The table is immutable after construction and safe for
    concurrent reads.  Rates are stored per block (ebits), symmetric under
    swapping a and b, non-negative everywhere, with terminal states pinned
    to log2 C(level, a) and separable states to 0.
    """

    def __init__(self, max_level: int, use_hashing: bool = True,
                 allow_large: bool = False):
        if not is_power_of_two(max_level):
            raise ValueError(f"block size must be a power of two, got {max_level}")
        if max_level > DEFAULT_MAX_LEVEL and not allow_large:
            raise ValueError(
                f"block size {max_level} above default cap {DEFAULT_MAX_LEVEL}; "
                "pass allow_large=True to build anyway"
            )
        self.max_level = max_level
        self.use_hashing = use_hashing
        self._rates: dict[int, np.ndarray] = {}
        self._decisions: dict[int, np.ndarray] = {}
        self._log_weights: dict[int, np.ndarray] = {}
        self._fast: dict[int, tuple[list, list]] = {}
        level = 1
        while level <= max_level:
            self._build_level(level)
            level *= 2

    # -- construction ------------------------------------------------------

    def _build_level(self, level: int) -> None:
        size = level + 1
        rates = np.zeros((size, size))
        decisions = np.full((size, size), _INVALID, dtype=np.int8)
        log_w = np.full((size, size), -np.inf)
        for a in range(size):
            for b in range(size - a):
                log_w[a, b] = log_conditional_weight(level, a, b)

        term = _DEC_CODES[Decision.TERMINAL]
        sep = _DEC_CODES[Decision.SEPARABLE]
        for a in range(size):
            # exploit R(level, a, b) = R(level, b, a): fill b >= a, mirror
            for b in range(a, size - a):
                if a + b == level:
                    rates[a, b] = log_binomial(level, a) / LN2
                    decisions[a, b] = term
                elif a == 0:  # b == 0 implies a == 0 here since b >= a
                    decisions[a, b] = sep
                else:
                    rate, dec = self._choose(level, a, b, log_w[a, b])
                    rates[a, b] = rate
                    decisions[a, b] = dec
                rates[b, a] = rates[a, b]
                decisions[b, a] = decisions[a, b]
        self._rates[level] = rates
        self._decisions[level] = decisions
        self._log_weights[level] = log_w

    def _choose(self, level: int, a: int, b: int, parent_log_w: float) -> tuple[float, int]:
        split_val = self._split_value(level, a, b, parent_log_w)
        if self.use_hashing:
            hash_val = hashing_rate(level, a, b)
            if hash_val > split_val:  # ties break to SPLIT
                return max(hash_val, 0.0), _DEC_CODES[Decision.HASH]
        return max(split_val, 0.0), _DEC_CODES[Decision.SPLIT]

    def _split_value(self, level: int, a: int, b: int, parent_log_w: float) -> float:
        """Expected sum of half-block rates under the bisection distribution."""
        half = level // 2
        r_half = self._rates[half]
        lw_half = self._log_weights[half]
        a_lo, a_hi = max(0, a - half), min(a, half)
        b_lo, b_hi = max(0, b - half), min(b, half)
        rows = slice(a_lo, a_hi + 1)
        cols = slice(b_lo, b_hi + 1)
        rows_c = _reversed_slice(a - a_lo, a - a_hi)
        cols_c = _reversed_slice(b - b_lo, b - b_hi)
        # invalid (a'+b' > half) combinations carry -inf log-weight -> 0
        log_w = lw_half[rows, cols] + lw_half[rows_c, cols_c] - parent_log_w
        vals = r_half[rows, cols] + r_half[rows_c, cols_c]
        return float(np.sum(np.exp(log_w) * vals))

    # -- lookups -----------------------------------------------------------

    def _check(self, level: int, a: int, b: int) -> None:
        if level not in self._rates:
            raise ValueError(f"level {level} not in table (max {self.max_level})")
        if a < 0 or b < 0 or a + b > level:
            raise ValueError(f"invalid outcome (n={level}, a={a}, b={b})")

    def rate(self, level: int, a: int, b: int) -> float:
        self._check(level, a, b)
        return float(self._rates[level][a, b])

    def decision(self, level: int, a: int, b: int) -> Decision:
        self._check(level, a, b)
        return _DEC_FROM_CODE[int(self._decisions[level][a, b])]

    def items(self) -> Iterator[tuple[tuple[int, int, int], tuple[float, Decision]]]:
        level = 1
        while level <= self.max_level:
            rates = self._rates[level]
            decisions = self._decisions[level]
            for a in range(level + 1):
                for b in range(level + 1 - a):
                    yield (level, a, b), (float(rates[a, b]),
                                          _DEC_FROM_CODE[int(decisions[a, b])])
            level *= 2

    def fast_lookup(self, level: int) -> tuple[list, list]:
        """Plain-list view of one level for tight sampling loops."""
        view = self._fast.get(level)
        if view is None:
            self._check(level, 0, 0)
            view = (self._rates[level].tolist(), self._decisions[level].tolist())
            self._fast[level] = view
        return view


_TABLE_CACHE: dict[tuple[int, bool], RateTable] = {}


def get_rate_table(max_level: int, use_hashing: bool = True,
                   allow_large: bool = False) -> RateTable:
    """Shared immutable RateTable for (max_level, use_hashing), built once."""
    key = (max_level, use_hashing)
    table = _TABLE_CACHE.get(key)
    if table is None:
        table = RateTable(max_level, use_hashing, allow_large=allow_large)
        _TABLE_CACHE[key] = table
    return table


def block_rate(level: int, a: int, b: int, memo: RateTable | None = None) -> float:
    """Optimal ebits per block for a measured block; memoized in ``memo``."""
    table = memo if memo is not None else get_rate_table(level)
    return table.rate(level, a, b)


def _expected_rate(source: SourceState, n: int, use_hashing: bool,
                   allow_large: bool = False) -> float:
    if not is_power_of_two(n) or n < 2:
        raise ValueError(f"block size must be a power of two >= 2, got {n}")
    table = get_rate_table(n, use_hashing, allow_large=allow_large)
    terms = (
        outcome_probability(source, n, a, b) * table.rate(n, a, b)
        for a in range(n + 1)
        for b in range(n + 1 - a)
    )
    return math.fsum(terms) / n


def protocol_rate(source: SourceState, n: int, *, allow_large: bool = False) -> float:
    """Ebits per input pair of the full bisection + hashing protocol.

    The expectation of the optimal block rate over the first measurement's
    outcome distribution, per pair.
    """
    return _expected_rate(source, n, use_hashing=True, allow_large=allow_large)


def bisection_only_rate(source: SourceState, n: int, *, allow_large: bool = False) -> float:
    """Protocol rate with the hashing branch disabled (bisection all the way)."""
    return _expected_rate(source, n, use_hashing=False, allow_large=allow_large)


def protocol_rate_exact(p: Fraction, alpha2: Fraction, n: int,
                        use_hashing: bool = True) -> float:
    """Protocol rate with exactly computed rational outcome weights.

    Cross-check path for rational sources: each outcome probability is a
    Fraction, so only the block rates and the final sum are floating point.
    Limited to n <= 16 (factorial growth of the rationals).
    """
    if n > EXACT_BACKEND_MAX_N:
        raise ValueError(f"exact backend supports n <= {EXACT_BACKEND_MAX_N}, got {n}")
    if not is_power_of_two(n) or n < 2:
        raise ValueError(f"block size must be a power of two >= 2, got {n}")
    table = get_rate_table(n, use_hashing)
    terms = (
        float(exact_outcome_probability(p, alpha2, n, a, b)) * table.rate(n, a, b)
        for a in range(n + 1)
        for b in range(n + 1 - a)
    )
    return math.fsum(terms) / n


def closed_form_bisection_rate(p: float, n: int) -> float:
    """Bisection-only rate of the symmetric family in closed form.

    With n = 2^m the cascade yields, per pair,
    sum_{l=1..m} p^(2^l) [Y(2^l) - Y(2^(l-1))] where Y is the pure-block
    yield.  Valid for alpha2 = 1/2.
    """
    if not is_power_of_two(n):
        raise ValueError(f"block size must be a power of two, got {n}")
    total = 0.0
    block = 2
    prev_yield = 0.0
    while block <= n:
        cur_yield = pure_block_yield(block)
        total += p ** block * (cur_yield - prev_yield)
        prev_yield = cur_yield
        block *= 2
    return total


def raw_hashing_rate(p: float) -> float:
    """Coherent information of the unmeasured symmetric source, clamped at 0.

    The joint state has spectrum {p, 1-p} and Bob's marginal {p/2, 1-p/2},
    so one-way hashing on raw pairs yields max{h(p/2) - h(p), 0} ebits per
    pair.  The spectra are verified against the dense pair matrix in tests.
    """
    return max(binary_entropy(p / 2.0) - binary_entropy(p), 0.0)


def extract_policy(source: SourceState, n: int, *,
                   use_hashing: bool = True) -> list[PolicyEntry]:
    """All block states the cascade can reach, with their decisions and rates.

    The first measurement makes every level-n outcome reachable; deeper
    levels are reached only through SPLIT decisions.  Decisions are source
    independent; the source argument is validated for interface symmetry
    with the rate functions.  Ordering: level descending, then a, then b.
    """
    if not isinstance(source, SourceState):
        raise TypeError("source must be a SourceState")
    table = get_rate_table(n, use_hashing)
    entries: list[PolicyEntry] = []
    level = n
    reachable = {(a, b) for a in range(n + 1) for b in range(n + 1 - a)}
    while level >= 1 and reachable:
        children: set[tuple[int, int]] = set()
        for a, b in sorted(reachable):
            decision = table.decision(level, a, b)
            entries.append(
                PolicyEntry(BlockOutcome(level, a, b), decision,
                            table.rate(level, a, b))
            )
            if decision is Decision.SPLIT:
                for split, _ in split_distribution(level, a, b):
                    children.add((split.left_a, split.left_b))
                    children.add((split.right_a, split.right_b))
        reachable = children
        level //= 2
    return entries
