import math

import numpy as np
import pytest

from poolshare import (
    Anchor,
    BernoulliModel,
    BernoulliSampler,
    ConstantSampler,
    DegenerateProbabilityError,
    IndependentLossSampler,
    InvestmentVector,
    Mode,
    OrderStatisticRule,
    ProportionalRule,
    TontineRule,
    centralized_benchmark,
    compare_active_passive,
    convergence_experiment,
    expected_shares_enumeration,
    simulate_payouts,
    solve_fair_linear,
)

from conftest import assert_close_seq


def uniform_rule(n):
    return TontineRule((1.0,) * (n + 1))


class TestSimulatePayouts:
    def test_constant_admin_branch(self):
        stats = simulate_payouts(
            InvestmentVector((1, 1, 1)), ProportionalRule(), ConstantSampler((0.0, 0.0)),
            n_paths=500, seed=0,
        )
        assert stats.mean_payouts == (0.0, 0.0, 3.0)
        assert stats.admin_takes_all == 500
        assert stats.allocation_violations == 0
        assert stats.exclusivity_violations == 0

    def test_constant_proportional(self):
        stats = simulate_payouts(
            InvestmentVector((1, 1, 3)), ProportionalRule(), ConstantSampler((2.0, 3.0)),
            n_paths=200, seed=0,
        )
        assert_close_seq(stats.mean_payouts, (2.0, 3.0, 0.0), abs_tol=1e-12)
        assert stats.std_payouts == (0.0, 0.0, 0.0)

    def test_fair_scheme_recovers_investments(self):
        inv = InvestmentVector((4.5, 4.5, 3))
        stats = simulate_payouts(
            inv, uniform_rule(2), BernoulliSampler((0.5, 0.5)), n_paths=100_000, seed=7,
        )
        for mean, std, invested in zip(stats.mean_payouts, stats.std_payouts, inv.amounts):
            stderr = std / math.sqrt(stats.n_paths)
            assert abs(mean - invested) <= 4 * stderr

    def test_passive_mode(self):
        inv = InvestmentVector((1, 1, 0), Mode.PASSIVE)
        stats = simulate_payouts(
            inv, uniform_rule(2), BernoulliSampler((0.5, 0.5)), n_paths=50_000, seed=3,
        )
        assert stats.mean_payouts[-1] == 0.0
        assert stats.allocation_violations == 0
        # equal passive investments are fair: means near 1
        for mean, std in zip(stats.mean_payouts[:2], stats.std_payouts[:2]):
            assert abs(mean - 1.0) <= 4 * std / math.sqrt(stats.n_paths)

    def test_audit_flag_recorded(self):
        stats = simulate_payouts(
            InvestmentVector((1, 1, 1)), uniform_rule(2), BernoulliSampler((0.5, 0.5)),
            n_paths=100, seed=0, audit=False,
        )
        assert not stats.audit_enabled
        assert stats.allocation_violations == 0

    def test_deterministic_across_workers(self):
        common = dict(
            inv=InvestmentVector((1, 2, 3, 1)),
            rule=uniform_rule(3),
            sampler=BernoulliSampler((0.2, 0.5, 0.8)),
            n_paths=70_001,
            seed=123,
        )
        a = simulate_payouts(**common, n_workers=1)
        b = simulate_payouts(**common, n_workers=4)
        assert a == b

    def test_loss_sampler_with_atom(self):
        sampler = IndependentLossSampler("lognormal", n=3, zero_prob=0.4, seed=9)
        stats = simulate_payouts(
            InvestmentVector((1, 1, 1, 1)), ProportionalRule(), sampler, n_paths=20_000,
        )
        assert stats.allocation_violations == 0
        assert stats.exclusivity_violations == 0
        assert stats.admin_takes_all > 0  # zero_prob**3 of the paths


class TestCentralizedBenchmark:
    def test_survivor_payout(self):
        assert centralized_benchmark(1.0, 0.5, 1) == 2.0

    def test_non_survivor(self):
        assert centralized_benchmark(1.0, 0.5, 0) == 0.0

    def test_certain_event_returns_premium(self):
        assert centralized_benchmark(1.0, 1.0, 1) == 1.0

    def test_vectorized(self):
        np.testing.assert_array_equal(
            centralized_benchmark(2.0, 0.5, [0, 1, 1]), [0.0, 4.0, 4.0]
        )

    def test_zero_probability(self):
        with pytest.raises(DegenerateProbabilityError):
            centralized_benchmark(1.0, 0.0, 1)


class TestConvergenceExperiment:
    def test_single_participant_gap_is_zero(self):
        # a one-person fair pool IS the centralized contract
        rows = convergence_experiment(0.5, 1.0, [1], n_paths=5_000, seed=0, mode=Mode.ACTIVE)
        assert rows[0].mean_abs_gap == 0.0
        assert rows[0].stderr == 0.0

    @pytest.mark.parametrize("mode", [Mode.ACTIVE, Mode.PASSIVE])
    def test_gap_decreases(self, mode):
        rows = convergence_experiment(0.5, 1.0, [10, 100, 1000], 20_000, seed=4, mode=mode)
        gaps = [r.mean_abs_gap for r in rows]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_admin_exact_value(self):
        rows = convergence_experiment(0.5, 1.0, [2, 50], 1_000, seed=1, mode=Mode.ACTIVE)
        for row in rows:
            qn = 0.5**row.n
            fund = row.n * 1.0 / (1 - qn)
            assert row.admin_mean_exact == pytest.approx(fund * qn, rel=1e-12)
        # at n = 50 the fair admin stake is far below the participant total
        assert rows[1].admin_mean_exact < 1e-10 * 50

    def test_passive_admin_zero(self):
        rows = convergence_experiment(0.5, 1.0, [5], 2_000, seed=2, mode=Mode.PASSIVE)
        assert rows[0].admin_mean == 0.0
        assert rows[0].admin_mean_exact == 0.0

    def test_deterministic(self):
        a = convergence_experiment(0.3, 2.0, [5, 10], 10_000, seed=11)
        b = convergence_experiment(0.3, 2.0, [5, 10], 10_000, seed=11)
        assert a == b

    def test_validation(self):
        with pytest.raises(DegenerateProbabilityError):
            convergence_experiment(1.0, 1.0, [2], 100, seed=0)
        with pytest.raises(Exception):
            convergence_experiment(0.5, 1.0, [10, 5], 100, seed=0)


class TestCompareActivePassive:
    def test_fair_scheme_columns_coincide(self):
        model = BernoulliModel((0.5, 0.5))
        exp = expected_shares_enumeration(uniform_rule(2), model)
        inv = solve_fair_linear(exp, Anchor.total_all(12))
        report = compare_active_passive(inv, uniform_rule(2), model)
        assert report.coincide
        for row in report.rows:
            assert row.expected_active == pytest.approx(row.expected_passive, abs=1e-10)
            assert row.expected_active == pytest.approx(row.investment, abs=1e-10)

    def test_unfair_difference_formula(self):
        model = BernoulliModel((0.5, 0.5))
        inv = InvestmentVector((1, 2, 3))
        report = compare_active_passive(inv, uniform_rule(2), model)
        exp = expected_shares_enumeration(uniform_rule(2), model)
        assert not report.coincide
        for row, pi_i, mean in zip(report.rows, inv.participants, exp.participant_means):
            expected_diff = inv.admin * mean - pi_i * exp.admin_mean
            assert row.difference == pytest.approx(expected_diff, abs=1e-12)

    def test_zero_admin_refund_gap(self):
        # with a zero admin stake the passive refund raises every participant's
        # expectation by pi_i * E[P_admin]; the columns cannot coincide
        model = BernoulliModel((0.5, 0.5))
        exp = expected_shares_enumeration(uniform_rule(2), model)
        report = compare_active_passive(InvestmentVector((1, 2, 0)), uniform_rule(2), model)
        for row, pi_i in zip(report.rows, (1.0, 2.0)):
            assert row.difference == pytest.approx(-pi_i * exp.admin_mean, abs=1e-15)

    def test_monte_carlo_method(self):
        model = BernoulliModel((0.5, 0.5))
        report = compare_active_passive(
            InvestmentVector((4.5, 4.5, 3)), uniform_rule(2), model,
            method="monte_carlo", n_samples=50_000, seed=6,
        )
        assert report.method == "monte_carlo"
        exact = compare_active_passive(InvestmentVector((4.5, 4.5, 3)), uniform_rule(2), model)
        for got, want in zip(report.rows, exact.rows):
            assert got.expected_active == pytest.approx(want.expected_active, rel=0.02)


class TestRuleMix:
    @pytest.mark.parametrize("rule_cls", [ProportionalRule, OrderStatisticRule])
    @pytest.mark.parametrize("mode", [Mode.ACTIVE, Mode.PASSIVE])
    def test_loss_rules_audit_clean(self, rule_cls, mode):
        amounts = (1.0, 2.0, 0.5, 0.0) if mode is Mode.PASSIVE else (1.0, 2.0, 0.5, 1.5)
        inv = InvestmentVector(amounts, mode)
        sampler = IndependentLossSampler("exponential", n=3, zero_prob=0.3, seed=13)
        stats = simulate_payouts(inv, rule_cls(), sampler, n_paths=30_000)
        assert stats.allocation_violations == 0
        assert stats.exclusivity_violations == 0
