import math

import numpy as np
import pytest

from entdist.channel import (
    AmplitudeDampingChannel,
    ChannelPoint,
    channel_output_state,
    golden_section_maximize,
    q2_lower_bound,
    ree_oracle,
    ree_upper_bound,
)
from entdist.numerics import pure_block_yield
from entdist.rates import protocol_rate, raw_hashing_rate
from entdist.states import SourceState, pair_density_matrix

FIG_GRID = [i / 20 for i in range(1, 20)]


class TestKraus:
    def test_completeness(self):
        for gamma in (0.0, 0.17, 0.5, 0.83, 1.0):
            e0, e1 = AmplitudeDampingChannel(gamma).kraus_operators()
            total = e0.T @ e0 + e1.T @ e1
            assert np.abs(total - np.eye(2)).max() <= 1e-15

    def test_decay_element(self):
        _, e1 = AmplitudeDampingChannel(0.4).kraus_operators()
        assert e1[0, 1] == 0.4  # |1> -> |0> amplitude is gamma itself
        with pytest.raises(ValueError):
            AmplitudeDampingChannel(1.2)


class TestChannelOutputState:
    def test_identity_channel(self):
        for a2 in (0.0, 0.3, 1.0):
            out = channel_output_state(0.0, a2)
            assert out.p == 1.0
            assert out.alpha2 == pytest.approx(a2, abs=1e-15)

    def test_full_damping(self):
        out = channel_output_state(1.0, 0.5)
        assert out.p == pytest.approx(0.5, abs=1e-15)
        assert out.alpha2 == 1.0

    def test_hand_value(self):
        out = channel_output_state(0.6, 0.5)
        assert out.p == pytest.approx(0.82, abs=1e-15)
        assert out.alpha2 == pytest.approx(0.5 / 0.82, abs=1e-15)

    def test_vacuum_edge(self):
        out = channel_output_state(1.0, 0.0)
        assert out.p == 0.0
        assert out.alpha2 == 1.0

    def test_against_dense_channel_action(self):
        # damping Bob's half of the pure input must land exactly on the
        # claimed family member, branch weights included
        rng = np.random.default_rng(31)
        for gamma, a2_in in rng.random((20, 2)):
            gamma, a2_in = float(gamma), float(a2_in)
            channel = AmplitudeDampingChannel(gamma)
            pure_in = pair_density_matrix(SourceState(1.0, a2_in))
            sent = channel.apply_to_second_qubit(pure_in)
            predicted = channel_output_state(gamma, a2_in)
            expect = pair_density_matrix(predicted)
            assert np.abs(sent - expect).max() <= 1e-12
            e0, e1 = channel.kraus_operators()
            k0, k1 = np.kron(np.eye(2), e0), np.kron(np.eye(2), e1)
            w0 = float(np.trace(k0 @ pure_in @ k0.T))
            w1 = float(np.trace(k1 @ pure_in @ k1.T))
            assert w0 + w1 == pytest.approx(1.0, abs=1e-12)
            assert w0 == pytest.approx(predicted.p, abs=1e-12)


class TestGoldenSection:
    def test_quadratic_peak(self):
        x, fx = golden_section_maximize(lambda x: -(x - 0.37) ** 2, 0.0, 1.0)
        assert x == pytest.approx(0.37, abs=1e-5)
        assert fx == pytest.approx(0.0, abs=1e-9)


class TestQ2LowerBound:
    def test_fully_damped_is_zero(self):
        point = q2_lower_bound(1.0, 16)
        assert point.rate == pytest.approx(0.0, abs=1e-12)

    def test_noiseless_achieves_pure_block_yield(self):
        point = q2_lower_bound(0.0, 4)
        assert point.rate >= pure_block_yield(4) - 1e-12
        assert point.best_alpha2 == pytest.approx(0.5, abs=1e-3)

    def test_monotone_in_gamma(self):
        rates = [q2_lower_bound(g / 10, 32).rate for g in range(11)]
        for lo, hi in zip(rates, rates[1:]):
            assert hi <= lo + 1e-9

    def test_returns_channel_point(self):
        point = q2_lower_bound(0.3, 8)
        assert isinstance(point, ChannelPoint)
        assert 0.0 <= point.best_alpha2 <= 1.0
        assert 0.0 <= point.rate <= 1.0
        # the reported maximum is a real achievable value
        assert point.rate == pytest.approx(
            protocol_rate(channel_output_state(0.3, point.best_alpha2), 8), rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            q2_lower_bound(0.5, 128)
        with pytest.raises(ValueError):
            q2_lower_bound(-0.1, 16)


class TestReeUpperBound:
    def test_endpoints_exact(self):
        assert ree_upper_bound(0.0) == 0.0
        assert ree_upper_bound(1.0) == 1.0

    def test_hand_value(self):
        assert ree_upper_bound(2 / 3) == pytest.approx(0.251629, abs=5e-7)

    def test_bounds_rates_on_grid(self):
        for p in FIG_GRID:
            ree = ree_upper_bound(p)
            assert ree >= protocol_rate(SourceState(p), 64) - 1e-9
            assert ree >= raw_hashing_rate(p) - 1e-9

    def test_domain(self):
        with pytest.raises(ValueError):
            ree_upper_bound(1.5)


class TestReeOracle:
    # full closed-form agreement at the four benchmark mixing weights is
    # exercised by the acceptance suite; keep the unit checks light

    def test_product_state(self):
        value = ree_oracle(0.0, starts=3, adam_steps=1200, lbfgs_steps=100)
        assert abs(value) <= 1e-6

    def test_pure_bell_state(self):
        value = ree_oracle(1.0, starts=2, adam_steps=700, lbfgs_steps=80)
        assert value == pytest.approx(1.0, abs=1e-3)

    def test_matches_closed_form_at_benchmark_point(self):
        value = ree_oracle(2 / 3, starts=3, adam_steps=800, lbfgs_steps=80)
        assert value == pytest.approx(ree_upper_bound(2 / 3), abs=1e-4)
