"""Stochastic simulation of the measurement cascade under the optimal policy.

Each trial measures one fresh block, then follows the rate table's
decisions: terminal states credit their exact yield, hashing states credit
the asymptotic hashing expectation (simulating the hashing inner loop is
out of scope), separable states credit nothing, and split states sample a
bisection result and recurse into both halves.  The mean per-pair yield is
an unbiased estimate of the exact protocol rate.

Reproducibility contract: trial i always uses the random substream derived
from (seed, i), so results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .rates import Decision, RateTable, _DEC_CODES, get_rate_table
from .states import SourceState, sample_outcome, sample_split

_SPLIT_CODE = _DEC_CODES[Decision.SPLIT]
_CODE_TO_DECISION = {code: d for d, code in _DEC_CODES.items()}


@dataclass(frozen=True)
class TrialResult:
    """Credited ebits of one simulated block, optionally with its decision path."""

    yield_ebits: float
    decision_trace: tuple[tuple[int, int, int, Decision], ...] | None = None


@dataclass(frozen=True)
class EstimateReport:
    mean: float      # ebits per pair
    stderr: float    # sample standard deviation / sqrt(trials)
    trials: int
    seed: int


def simulate_block(source: SourceState, n: int, policy: RateTable,
                   rng: np.random.Generator, *,
                   record_trace: bool = False) -> TrialResult:
    """Measure one n-pair block and run the cascade it prescribes."""
    if n > policy.max_level:
        raise ValueError(
            f"policy table covers levels up to {policy.max_level}, got n={n}")
    first = sample_outcome(source, n, rng)
    trace: list[tuple[int, int, int, Decision]] | None = [] if record_trace else None
    total = _walk(first.n, first.a, first.b, policy, rng, trace)
    return TrialResult(total, tuple(trace) if record_trace else None)


def _walk(level: int, a: int, b: int, policy: RateTable,
          rng: np.random.Generator, trace) -> float:
    rates, decisions = policy.fast_lookup(level)
    code = decisions[a][b]
    if trace is not None:
        trace.append((level, a, b, _CODE_TO_DECISION[code]))
    if code != _SPLIT_CODE:
        # TERMINAL and HASH credit exactly the tabulated rate; SEPARABLE is 0
        return rates[a][b]
    left_a, left_b, right_a, right_b = sample_split(level, a, b, rng)
    half = level // 2
    return (_walk(half, left_a, left_b, policy, rng, trace)
            + _walk(half, right_a, right_b, policy, rng, trace))


def estimate_rate(source: SourceState, n: int, trials: int, seed: int, *,
                  threads: int = 1, policy: RateTable | None = None) -> EstimateReport:
    """Monte Carlo estimate of the protocol rate in ebits per pair.

    Deterministic given (source, n, trials, seed); ``threads`` only
    partitions the trial range, never the substream assignment.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    table = policy if policy is not None else get_rate_table(n)
    per_pair = np.empty(trials)

    def run(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            rng = np.random.default_rng((seed, i))
            per_pair[i] = simulate_block(source, n, table, rng).yield_ebits / n

    if threads <= 1:
        run(0, trials)
    else:
        chunk = -(-trials // threads)
        bounds = [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda span: run(*span), bounds))

    mean = float(np.mean(per_pair))
    stderr = float(np.std(per_pair, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return EstimateReport(mean=mean, stderr=stderr, trials=trials, seed=seed)
