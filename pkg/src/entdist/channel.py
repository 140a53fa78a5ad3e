"""Capacity and entanglement bounds around the distillation protocol.

Sending Bob's half of a pure state a'|10> + b'|01> through the amplitude
damping channel lands exactly in the two-parameter source family, so the
protocol rate maximized over the input Schmidt weight is a lower bound on
the channel's two-way-assisted quantum capacity.  The relative entropy of
entanglement of the symmetric family upper-bounds every distillation rate;
its closed form is gated behind a numerical minimization oracle over
separable states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import is_power_of_two
from .rates import protocol_rate
from .states import SourceState, pair_density_matrix


class OracleConvergenceError(RuntimeError):
    """No optimization start of a numerical oracle reached a stable value."""


@dataclass(frozen=True)
class AmplitudeDampingChannel:
    """Amplitude damping with *amplitude* parameter gamma.

    Kraus operators |0><0| + sqrt(1 - gamma^2)|1><1| and gamma|0><1|, so
    the probability of decaying |1> -> |0> is gamma^2 (note: much of the
    literature calls that probability itself gamma).
    """

    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")

    def kraus_operators(self) -> tuple[np.ndarray, np.ndarray]:
        g = self.gamma
        e0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - g * g)]])
        e1 = np.array([[0.0, g], [0.0, 0.0]])
        return e0, e1

    def apply_to_second_qubit(self, rho: np.ndarray) -> np.ndarray:
        """Act on the second tensor factor of a two-qubit density matrix."""
        if rho.shape != (4, 4):
            raise ValueError(f"expected a 4x4 density matrix, got {rho.shape}")
        out = np.zeros_like(rho)
        eye = np.eye(2)
        for e in self.kraus_operators():
            k = np.kron(eye, e)
            out += k @ rho @ k.conj().T
        return out


@dataclass(frozen=True)
class ChannelPoint:
    """One point of the capacity lower-bound curve."""

    gamma: float
    best_alpha2: float
    rate: float


def channel_output_state(gamma: float, alpha2_in: float) -> SourceState:
    """Source-family parameters after damping Bob's half of a pure input.

    The no-decay Kraus branch leaves sqrt(alpha2_in)|10> +
    sqrt(1-alpha2_in) sqrt(1-gamma^2)|01> with weight
    p = 1 - gamma^2 (1 - alpha2_in); the decay branch collapses to |00>
    with the remaining weight.  Renormalizing the first branch gives
    alpha2 = alpha2_in / p.  Fully damped vacuum output (p = 0) takes
    alpha2 = 1 by convention; the downstream rate is 0 either way.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    if not 0.0 <= alpha2_in <= 1.0:
        raise ValueError(f"alpha2_in must lie in [0, 1], got {alpha2_in}")
    p = 1.0 - gamma * gamma * (1.0 - alpha2_in)
    if p == 0.0:
        return SourceState(0.0, 1.0)
    return SourceState(p, min(alpha2_in / p, 1.0))


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_maximize(f, lo: float, hi: float, x_tol: float = 1e-6):
    """Maximize a unimodal f on [lo, hi]; returns (x, f(x))."""
    c = hi - (hi - lo) * _INV_PHI
    d = lo + (hi - lo) * _INV_PHI
    fc, fd = f(c), f(d)
    while hi - lo > x_tol:
        if fc < fd:
            lo, c, fc = c, d, fd
            d = lo + (hi - lo) * _INV_PHI
            fd = f(d)
        else:
            hi, d, fd = d, c, fc
            c = hi - (hi - lo) * _INV_PHI
            fc = f(c)
    x = 0.5 * (lo + hi)
    return x, f(x)


def q2_lower_bound(gamma: float, n: int, *, grid_points: int = 21,
                   x_tol: float = 1e-6) -> ChannelPoint:
    """Best protocol rate over pure channel inputs: a two-way capacity bound.

    Scans the input Schmidt weight on a uniform grid, then refines around
    the best grid point by golden-section search (the objective is
    piecewise smooth with no available gradient).
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    if not is_power_of_two(n) or n < 2 or n > 64:
        raise ValueError(f"block size must be a power of two in [2, 64], got {n}")

    def f(x: float) -> float:
        return protocol_rate(channel_output_state(gamma, x), n)

    xs = np.linspace(0.0, 1.0, grid_points)
    vals = [f(float(x)) for x in xs]
    i = int(np.argmax(vals))
    best_x, best_v = float(xs[i]), vals[i]
    x, v = golden_section_maximize(
        f, float(xs[max(i - 1, 0)]), float(xs[min(i + 1, grid_points - 1)]), x_tol
    )
    if v > best_v:
        best_x, best_v = x, v
    return ChannelPoint(gamma, best_x, best_v)


def ree_upper_bound(p: float) -> float:
    """Relative entropy of entanglement of the symmetric source family.

    Closed form (p - 2) log2(1 - p/2) + (1 - p) log2(1 - p); an upper
    bound on the distillable entanglement, hence on every protocol rate.
    Its agreement with :func:`ree_oracle` is part of the acceptance suite;
    the formula is only presented because that validation passes.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    first = (p - 2.0) * math.log2(1.0 - p / 2.0) if p < 2.0 else 0.0
    second = (1.0 - p) * math.log2(1.0 - p) if p < 1.0 else 0.0
    return first + second


def ree_oracle(p: float, *, components: int = 16, starts: int = 6,
               seed: int = 1789, adam_steps: int = 1400,
               lbfgs_steps: int = 120) -> float:
    """Relative entropy of entanglement by direct separable minimization.

    Minimizes Tr rho (log2 rho - log2 sigma) over sigma written as a convex
    mixture of ``components`` product pure states, each start running Adam
    followed by an L-BFGS polish on a fresh random parameterization.  Every
    iterate is a feasible separable state, so the running minimum is always
    a valid upper bound on the true value; for two qubits the separable set
    is exactly the positive-partial-transpose set and the objective is
    convex in sigma, so multi-start local search reaches ~1e-4 accuracy.

    Raises OracleConvergenceError if no start settles on a stable value.
    """
    import torch  # heavyweight; only the oracle needs it

    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rho_np = pair_density_matrix(SourceState(p, 0.5))
    rho = torch.tensor(rho_np, dtype=torch.complex128)
    spectrum = np.linalg.eigvalsh(rho_np)
    neg_entropy = float(sum(lam * math.log2(lam) for lam in spectrum if lam > 1e-15))

    def objective(alice_r, bob_r, logits):
        alice = torch.view_as_complex(alice_r)
        bob = torch.view_as_complex(bob_r)
        alice = alice / torch.linalg.vector_norm(alice, dim=1, keepdim=True)
        bob = bob / torch.linalg.vector_norm(bob, dim=1, keepdim=True)
        vecs = (alice.unsqueeze(2) * bob.unsqueeze(1)).reshape(components, 4)
        weights = torch.nn.functional.softmax(logits, dim=0).to(vecs.dtype)
        sigma = torch.einsum("k,ki,kj->ij", weights, vecs, vecs.conj())
        sigma = 0.5 * (sigma + sigma.conj().T)
        lam, basis = torch.linalg.eigh(sigma)
        lam = torch.clamp(lam.real, min=1e-16)
        overlaps = torch.einsum("ji,jk,ki->i", basis.conj(), rho, basis).real
        return neg_entropy - torch.sum(overlaps * torch.log2(lam))

    finals: list[float] = []
    plateaued = False
    for start in range(starts):
        gen = torch.Generator().manual_seed(seed + 7919 * start)
        alice_r = torch.randn(components, 2, 2, generator=gen,
                              dtype=torch.float64, requires_grad=True)
        bob_r = torch.randn(components, 2, 2, generator=gen,
                            dtype=torch.float64, requires_grad=True)
        logits = torch.randn(components, generator=gen,
                             dtype=torch.float64, requires_grad=True)
        params = [alice_r, bob_r, logits]

        opt = torch.optim.Adam(params, lr=0.08)
        scheduler = torch.optim.lr_scheduler.StepLR(
            opt, step_size=max(adam_steps // 4, 1), gamma=0.3)
        run_best = math.inf
        diverged = False
        for _ in range(adam_steps):
            opt.zero_grad()
            loss = objective(*params)
            if not torch.isfinite(loss):
                diverged = True
                break
            run_best = min(run_best, float(loss.detach()))
            loss.backward()
            opt.step()
            scheduler.step()
        if diverged:
            continue

        pre_polish = run_best
        polisher = torch.optim.LBFGS(
            params, max_iter=lbfgs_steps, tolerance_grad=1e-12,
            tolerance_change=1e-14, line_search_fn="strong_wolfe")

        def closure():
            polisher.zero_grad()
            loss = objective(*params)
            if torch.isfinite(loss):
                loss.backward()
            return loss

        try:
            final = polisher.step(closure)
            if torch.isfinite(final):
                run_best = min(run_best, float(final.detach()))
        except RuntimeError:
            pass  # line-search failure: keep the Adam value

        if pre_polish - run_best < 1e-6:
            plateaued = True  # polish found no further descent: stable
        finals.append(run_best)

    finals.sort()
    # stable if some start plateaued, or two independent starts agree
    consensus = len(finals) >= 2 and finals[1] - finals[0] < 1e-5
    if not finals or not (plateaued or consensus):
        raise OracleConvergenceError(
            f"separable-minimization oracle failed to stabilize at p={p} "
            f"({starts} starts, finals {finals})"
        )
    return max(finals[0], 0.0)
