"""Distillation rates for mixtures of a pure entangled state and an
orthogonal product state, via Hamming-weight measurements, bisection, and
one-way hashing, plus the derived amplitude-damping capacity bound."""

from .channel import (
    AmplitudeDampingChannel,
    ChannelPoint,
    OracleConvergenceError,
    channel_output_state,
    q2_lower_bound,
    ree_oracle,
    ree_upper_bound,
)
from .montecarlo import EstimateReport, TrialResult, estimate_rate, simulate_block
from .numerics import (
    LogWeight,
    binary_entropy,
    exact_binomial,
    log_add,
    log_binomial,
    pure_block_yield,
)
from .rates import (
    Decision,
    PolicyEntry,
    RateTable,
    alice_entropy,
    bisection_only_rate,
    block_rate,
    bob_entropy,
    closed_form_bisection_rate,
    extract_policy,
    get_rate_table,
    hashing_rate,
    joint_entropy,
    protocol_rate,
    protocol_rate_exact,
    raw_hashing_rate,
)
from .recurrence import (
    RecurrenceState,
    improved_recurrence_rate,
    original_two_copy_rate,
    two_copy_map,
)
from .states import (
    BlockOutcome,
    SourceState,
    SplitOutcome,
    brute_force_outcome_probs,
    conditional_weight,
    outcome_probability,
    pair_density_matrix,
    sample_outcome,
    sample_split,
    split_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeDampingChannel",
    "BlockOutcome",
    "ChannelPoint",
    "Decision",
    "EstimateReport",
    "LogWeight",
    "OracleConvergenceError",
    "PolicyEntry",
    "RateTable",
    "RecurrenceState",
    "SourceState",
    "SplitOutcome",
    "TrialResult",
    "alice_entropy",
    "binary_entropy",
    "bisection_only_rate",
    "block_rate",
    "bob_entropy",
    "brute_force_outcome_probs",
    "channel_output_state",
    "closed_form_bisection_rate",
    "conditional_weight",
    "estimate_rate",
    "exact_binomial",
    "extract_policy",
    "get_rate_table",
    "hashing_rate",
    "improved_recurrence_rate",
    "joint_entropy",
    "log_add",
    "log_binomial",
    "original_two_copy_rate",
    "outcome_probability",
    "pair_density_matrix",
    "protocol_rate",
    "protocol_rate_exact",
    "pure_block_yield",
    "q2_lower_bound",
    "raw_hashing_rate",
    "ree_oracle",
    "ree_upper_bound",
    "sample_outcome",
    "sample_split",
    "simulate_block",
    "split_distribution",
    "two_copy_map",
]
