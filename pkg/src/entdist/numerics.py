"""Log-space combinatorics and entropy primitives.

Every probability in the measurement cascade is a product of binomials
(which overflow float64 around C(1030, 515)) and powers of p (which
underflow long before that), so all weights are carried as natural
logarithms and exponentiated only at the point of use.  A rational
backend built on :mod:`fractions` serves as an exact cross-check for
small blocks and rational parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

LN2 = math.log(2.0)

#: Largest block size the log-factorial table supports.
MAX_N = 4096

_LOG_FACTORIAL = np.array([math.lgamma(i + 1.0) for i in range(MAX_N + 1)])

#: Alias for the exact-rational backend type.  Instances are always
#: reduced with a positive denominator (guaranteed by fractions.Fraction);
#: probability range is enforced by :func:`exact_probability`.
ExactProbability = Fraction


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def log_binomial(n: int, k: int) -> float:
    """Natural log of the binomial coefficient C(n, k).

    Looked up from a precomputed log-factorial table; relative error of
    exp(log_binomial(n, k)) stays below 1e-12 through n = 128.
    """
    if n < 0 or k < 0:
        raise ValueError(f"binomial arguments must be non-negative, got ({n}, {k})")
    if k > n:
        raise ValueError(f"binomial requires k <= n, got ({n}, {k})")
    if n > MAX_N:
        raise ValueError(f"binomial table covers n <= {MAX_N}, got {n}")
    return float(_LOG_FACTORIAL[n] - _LOG_FACTORIAL[k] - _LOG_FACTORIAL[n - k])


def exact_binomial(n: int, k: int) -> int:
    """Big-integer C(n, k) with the same domain checks as log_binomial."""
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"binomial requires 0 <= k <= n, got ({n}, {k})")
    return math.comb(n, k)


def exact_probability(numerator: int, denominator: int) -> Fraction:
    """Reduced rational probability; rejects values outside [0, 1]."""
    value = Fraction(numerator, denominator)
    if value < 0 or value > 1:
        raise ValueError(f"probability {value} outside [0, 1]")
    return value


def log_add(x: float, y: float) -> float:
    """log(exp(x) + exp(y)) without underflow, valid for |x - y| >> 700."""
    if x == -math.inf:
        return y
    if y == -math.inf:
        return x
    hi, lo = (x, y) if x >= y else (y, x)
    return hi + math.log1p(math.exp(lo - hi))


@dataclass(frozen=True)
class LogWeight:
    """A non-negative weight stored as its natural logarithm.

    Addition and multiplication act on the underlying weights, not the
    logs; zero weight is represented by -inf.
    """

    value: float

    @classmethod
    def from_probability(cls, p: float) -> "LogWeight":
        if p < 0.0:
            raise ValueError(f"weight must be non-negative, got {p}")
        return cls(-math.inf if p == 0.0 else math.log(p))

    def __add__(self, other: "LogWeight") -> "LogWeight":
        return LogWeight(log_add(self.value, other.value))

    def __mul__(self, other: "LogWeight") -> "LogWeight":
        return LogWeight(self.value + other.value)

    def probability(self) -> float:
        """The weight itself; rejects values above 1 beyond accumulation slack."""
        p = math.exp(self.value)
        if p > 1.0 + 1e-12:
            raise ValueError(f"log-weight {self.value} is not a probability")
        return min(p, 1.0)


def binary_entropy(x: float) -> float:
    """Binary entropy h(x) in bits, with h(0) = h(1) = 0 by continuity."""
    if x < -1e-12 or x > 1.0 + 1e-12:
        raise ValueError(f"binary_entropy argument {x} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    return -(x * math.log(x) + (1.0 - x) * math.log1p(-x)) / LN2


def pure_block_yield(block_size: int) -> float:
    """Expected ebits per pair from measuring a block of pure entangled pairs.

    A block of ``block_size`` perfect pairs measured in the Hamming-weight
    basis collapses to a maximally entangled state of rank C(block_size, k)
    with probability C(block_size, k) / 2**block_size, so the per-pair yield
    is the average of log2 C(block_size, k) over that distribution.
    """
    if not is_power_of_two(block_size) or block_size > MAX_N:
        raise ValueError(f"block size must be a power of two <= {MAX_N}, got {block_size}")
    if block_size == 1:
        return 0.0
    shift = block_size * LN2
    total = 0.0
    for k in range(block_size + 1):
        lb = log_binomial(block_size, k)
        total += math.exp(lb - shift) * (lb / LN2)
    return total / block_size
