"""Source-state family and measurement-outcome distributions.

The input family is a two-parameter mixture: with weight p the pair is in
the pure entangled state sqrt(alpha2)|10> + sqrt(1-alpha2)|01>, and with
weight 1-p in the orthogonal product state |00>.  Both parties measure the
Hamming weight of their halves of an n-pair block; this module provides the
exact joint distribution of those results, the conditional distribution of
half-block results when a block is bisected, samplers for both, and a dense
density-matrix oracle that validates the combinatorics for tiny blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .numerics import (
    LN2,
    exact_binomial,
    is_power_of_two,
    log_binomial,
)

_SLACK = 1e-12


def _unit_interval(name: str, x: float) -> float:
    if x < -_SLACK or x > 1.0 + _SLACK:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return min(max(float(x), 0.0), 1.0)


@dataclass(frozen=True)
class SourceState:
    """Mixture weight ``p`` of the entangled component and its Schmidt weight ``alpha2``.

    ``alpha2 = 0.5`` is the symmetric (maximally entangled) case.
    """

    p: float
    alpha2: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "p", _unit_interval("p", self.p))
        object.__setattr__(self, "alpha2", _unit_interval("alpha2", self.alpha2))

    @property
    def beta2(self) -> float:
        return 1.0 - self.alpha2


@dataclass(frozen=True)
class BlockOutcome:
    """Hamming-weight measurement record for an n-pair block.

    ``a`` is Alice's result, ``b`` Bob's.  Outcomes with a + b > n are
    unreachable (the product component contributes 0s on both sides) and
    are rejected rather than carried with probability zero.
    """

    n: int
    a: int
    b: int

    def __post_init__(self):
        if not is_power_of_two(self.n):
            raise ValueError(f"block size must be a power of two, got {self.n}")
        if self.a < 0 or self.b < 0 or self.a + self.b > self.n:
            raise ValueError(f"invalid outcome (n={self.n}, a={self.a}, b={self.b})")


class SplitOutcome(NamedTuple):
    """Weights of the two half-blocks after bisecting a measured block."""

    left_a: int
    left_b: int
    right_a: int
    right_b: int


class MeasuredBlock(NamedTuple):
    """Dense-oracle record: outcome probability and post-measurement rank.

    ``rank`` is the rank of Alice's reduced post-measurement state (the
    Schmidt rank when the post-measurement state is pure, i.e. for
    full-weight outcomes).
    """

    probability: float
    rank: int


def log_conditional_weight(n: int, a: int, b: int) -> float:
    """ln of the combinatorial outcome weight C(n, a+b) C(a+b, a) 2^-(a+b)."""
    if a < 0 or b < 0 or a + b > n:
        raise ValueError(f"invalid outcome (n={n}, a={a}, b={b})")
    k = a + b
    return log_binomial(n, k) + log_binomial(k, a) - k * LN2


def conditional_weight(n: int, a: int, b: int) -> float:
    """Source-independent combinatorial factor of the outcome probability."""
    return math.exp(log_conditional_weight(n, a, b))


def outcome_probability(source: SourceState, n: int, a: int, b: int) -> float:
    """Probability that measuring an n-pair block yields results (a, b).

    Equals p^(a+b) (1-p)^(n-a-b) C(n, a+b) C(a+b, a) alpha2^a beta2^b;
    evaluated in log space.  For alpha2 = 1/2 the last three factors
    collapse to the symmetric weight C(n, a+b) C(a+b, a) 2^-(a+b).
    """
    k = a + b
    lw = log_conditional_weight(n, a, b) + k * LN2  # strip the 2^-k
    for base, exponent in (
        (source.p, k),
        (1.0 - source.p, n - k),
        (source.alpha2, a),
        (source.beta2, b),
    ):
        if exponent > 0:
            if base == 0.0:
                return 0.0
            lw += exponent * math.log(base)
    return math.exp(lw)


def split_distribution(n: int, a: int, b: int) -> list[tuple[SplitOutcome, float]]:
    """Conditional distribution of half-block results given a block result.

    Bisecting a block with result (a, b) and re-measuring both halves gives
    left-half results (a', b') with probability

        w(n/2, a', b') * w(n/2, a-a', b-b') / w(n, a, b),

    where w is the combinatorial weight.  The source parameters cancel in
    the ratio, so the distribution depends only on (n, a, b).  Enumerates
    exactly the outcomes with non-zero probability; the probabilities sum
    to 1.
    """
    if n < 2:
        raise ValueError("cannot split a single pair")
    if a < 0 or b < 0 or a + b > n:
        raise ValueError(f"invalid outcome (n={n}, a={a}, b={b})")
    half = n // 2
    parent = log_conditional_weight(n, a, b)
    k = a + b
    out = []
    for a_left in range(max(0, a - half), min(a, half) + 1):
        b_lo = max(0, k - a_left - half)
        b_hi = min(b, half - a_left)
        for b_left in range(b_lo, b_hi + 1):
            a_right = a - a_left
            b_right = b - b_left
            lw = (
                log_conditional_weight(half, a_left, b_left)
                + log_conditional_weight(half, a_right, b_right)
                - parent
            )
            out.append((SplitOutcome(a_left, b_left, a_right, b_right), math.exp(lw)))
    return out


def sample_outcome(source: SourceState, n: int, rng: np.random.Generator) -> BlockOutcome:
    """Draw one block measurement result from the exact outcome distribution.

    Factorizes as k ~ Binomial(n, p) entangled pairs, then a ~ Binomial(k,
    alpha2) of them giving Alice a 1; the product of the two binomial pmfs
    is algebraically identical to outcome_probability.
    """
    if not is_power_of_two(n):
        raise ValueError(f"block size must be a power of two, got {n}")
    k = int(rng.binomial(n, source.p))
    a = int(rng.binomial(k, source.alpha2)) if k else 0
    return BlockOutcome(n, a, k - a)


def sample_split(n: int, a: int, b: int, rng: np.random.Generator) -> SplitOutcome:
    """Draw one bisection result from split_distribution.

    Two-stage hypergeometric factorization: the number of entangled pairs
    landing in the left half is hypergeometric (population n, successes
    a+b, draws n/2), and the number of those giving Alice a 1 is
    hypergeometric within the entangled pairs.  Equivalence with the
    weight-ratio formula is property-tested, not assumed.
    """
    if n < 2:
        raise ValueError("cannot split a single pair")
    if a < 0 or b < 0 or a + b > n:
        raise ValueError(f"invalid outcome (n={n}, a={a}, b={b})")
    half = n // 2
    k = a + b
    k_left = int(rng.hypergeometric(k, n - k, half)) if k else 0
    if k_left == 0:
        a_left = 0
    elif a == 0:
        a_left = 0
    elif b == 0:
        a_left = k_left
    else:
        a_left = int(rng.hypergeometric(a, b, k_left))
    b_left = k_left - a_left
    return SplitOutcome(a_left, b_left, a - a_left, b - b_left)


# ---------------------------------------------------------------------------
# Exact-rational backend (cross-check oracle for small n and rational p)

def exact_conditional_weight(n: int, a: int, b: int) -> Fraction:
    if a < 0 or b < 0 or a + b > n:
        raise ValueError(f"invalid outcome (n={n}, a={a}, b={b})")
    k = a + b
    return Fraction(exact_binomial(n, k) * exact_binomial(k, a), 2 ** k)


def exact_outcome_probability(
    p: Fraction, alpha2: Fraction, n: int, a: int, b: int
) -> Fraction:
    """Rational outcome probability; exact for rational p and alpha2."""
    k = a + b
    if a < 0 or b < 0 or k > n:
        raise ValueError(f"invalid outcome (n={n}, a={a}, b={b})")
    return (
        p ** k
        * (1 - p) ** (n - k)
        * exact_binomial(n, k)
        * exact_binomial(k, a)
        * alpha2 ** a
        * (1 - alpha2) ** b
    )


def exact_split_probability(
    n: int, a: int, b: int, a_left: int, b_left: int
) -> Fraction:
    """Rational split probability for the left-half result (a_left, b_left)."""
    return (
        exact_conditional_weight(n // 2, a_left, b_left)
        * exact_conditional_weight(n // 2, a - a_left, b - b_left)
        / exact_conditional_weight(n, a, b)
    )


# ---------------------------------------------------------------------------
# Dense-matrix oracle (n <= 4)

def pair_density_matrix(source: SourceState) -> np.ndarray:
    """4x4 density matrix of one pair, basis |00>, |01>, |10>, |11>.

    First tensor factor is Alice's qubit, second is Bob's; amplitudes are
    taken real and non-negative (phases are a local unitary away).
    """
    psi = np.array([0.0, math.sqrt(source.beta2), math.sqrt(source.alpha2), 0.0])
    rho = source.p * np.outer(psi, psi)
    rho[0, 0] += 1.0 - source.p
    return rho


def _party_patterns(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Alice and Bob bit patterns of every basis index of n pairs.

    Basis ordering: pairs left to right, (Alice qubit, Bob qubit) within
    each pair, so index = sum_j 4^(n-1-j) * (2*A_j + B_j).
    """
    idx = np.arange(4 ** n)
    alice = np.zeros_like(idx)
    bob = np.zeros_like(idx)
    for j in range(n):
        pair = (idx >> (2 * (n - 1 - j))) & 3
        shift = n - 1 - j
        alice |= (pair >> 1) << shift
        bob |= (pair & 1) << shift
    return alice, bob


def _popcount(values: np.ndarray) -> np.ndarray:
    return np.array([bin(int(v)).count("1") for v in values])


def _alice_reduced_rank(sub: np.ndarray, alice_pat: np.ndarray,
                        bob_pat: np.ndarray, n: int) -> int:
    """Rank of Alice's marginal of the (unnormalized) projected block."""
    reduced = np.zeros((2 ** n, 2 ** n))
    for r, (pa_r, pb_r) in enumerate(zip(alice_pat, bob_pat)):
        cols = np.flatnonzero(bob_pat == pb_r)
        reduced[pa_r, alice_pat[cols]] += sub[r, cols]
    return int(np.linalg.matrix_rank(reduced, tol=1e-10))


def brute_force_outcome_probs(
    source: SourceState, n: int
) -> dict[BlockOutcome, MeasuredBlock]:
    """Outcome probabilities from the explicit 4^n x 4^n density matrix.

    Builds the n-fold tensor power of the pair state, applies each pair of
    Hamming-weight projectors, and reads the probability off the trace.
    Also reports the local rank of each post-measurement state; for
    full-weight outcomes (a + b = n) the state is pure and the local rank
    is its Schmidt rank C(n, a).  Refused above n = 4.
    """
    if n not in (1, 2, 4):
        raise ValueError(f"dense oracle supports n in {{1, 2, 4}}, got {n}")
    rho = pair_density_matrix(source)
    full = rho
    for _ in range(n - 1):
        full = np.kron(full, rho)
    alice_pat, bob_pat = _party_patterns(n)
    alice_w = _popcount(alice_pat)
    bob_w = _popcount(bob_pat)
    table: dict[BlockOutcome, MeasuredBlock] = {}
    for a in range(n + 1):
        for b in range(n + 1 - a):
            mask = np.flatnonzero((alice_w == a) & (bob_w == b))
            sub = full[np.ix_(mask, mask)]
            prob = float(np.trace(sub))
            if prob > 1e-12:
                rank = _alice_reduced_rank(sub / prob, alice_pat[mask],
                                           bob_pat[mask], n)
            else:
                rank = 0
            table[BlockOutcome(n, a, b)] = MeasuredBlock(prob, rank)
    return table
