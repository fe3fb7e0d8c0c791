import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poolshare import (
    BernoulliModel,
    BernoulliSampler,
    ConstantSampler,
    CustomRule,
    ExpectationReport,
    InsufficientSamplesError,
    ParticipantIndexError,
    ProbabilityRangeError,
    ProportionalRule,
    ScenarioMismatchError,
    DegenerateProbabilityError,
    TontineRule,
    TooManyParticipantsError,
    TwoParticipantBetaRule,
    expected_share_joint_counts,
    expected_share_uniform_units,
    expected_shares_enumeration,
    expected_shares_monte_carlo,
    homogeneous_expected_shares,
    poisson_binomial_pmf,
    uniform_tontine_expectations,
)

from conftest import assert_close_seq, brute_force_expected_shares, uniform_tontine_shares


def uniform_rule(n):
    return TontineRule((1.0,) * (n + 1))


class TestBernoulliModel:
    def test_degenerate_flags(self):
        assert BernoulliModel((1.0, 0.5)).degenerate
        assert BernoulliModel((0.0, 0.0)).degenerate
        assert not BernoulliModel((0.5, 0.5)).degenerate

    def test_admin_probability(self):
        assert BernoulliModel((0.5, 0.25)).admin_probability == 0.5 * 0.75

    def test_range(self):
        with pytest.raises(ProbabilityRangeError):
            BernoulliModel((0.5, 1.5))


class TestPoissonBinomial:
    def test_empty(self):
        np.testing.assert_array_equal(poisson_binomial_pmf(()), [1.0])

    def test_fair_coin_pair(self):
        np.testing.assert_allclose(poisson_binomial_pmf((0.5, 0.5)), [0.25, 0.5, 0.25], atol=1e-16)

    def test_coin_and_die(self):
        # hand convolution: (1-p1)(1-p2), p1(1-p2)+p2(1-p1), p1 p2
        np.testing.assert_allclose(
            poisson_binomial_pmf((0.5, 1 / 6)), [5 / 12, 0.5, 1 / 12], atol=1e-16
        )

    def test_out_of_range(self):
        with pytest.raises(ProbabilityRangeError):
            poisson_binomial_pmf((0.5, -0.1))

    @given(probs=st.lists(st.floats(0, 1), max_size=40))
    def test_pmf_sums_to_one(self, probs):
        pmf = poisson_binomial_pmf(probs)
        assert abs(pmf.sum() - 1.0) <= 1e-12
        assert pmf.min() >= 0.0


class TestEnumeration:
    def test_uniform_pair(self):
        # frozen from the brute-force oracle below
        report = expected_shares_enumeration(uniform_rule(2), BernoulliModel((0.5, 0.5)))
        oracle = brute_force_expected_shares(uniform_tontine_shares, (0.5, 0.5))
        assert oracle == [0.375, 0.375, 0.25]
        assert_close_seq(report.means, (0.375, 0.375, 0.25), abs_tol=1e-15)
        assert report.method == "enumeration"

    @given(
        p1=st.floats(0.01, 0.99), p2=st.floats(0.01, 0.99), beta=st.floats(0.0, 1.0)
    )
    def test_two_participant_split_formula(self, p1, p2, beta):
        # E[P_1] = p1 (q2 + beta p2): direct event-table expectation
        report = expected_shares_enumeration(TwoParticipantBetaRule(beta), BernoulliModel((p1, p2)))
        q1, q2 = 1 - p1, 1 - p2
        assert math.isclose(report.means[0], p1 * (q2 + beta * p2), abs_tol=1e-14)
        assert math.isclose(report.means[1], p2 * (q1 + (1 - beta) * p1), abs_tol=1e-14)
        assert math.isclose(report.means[2], q1 * q2, abs_tol=1e-14)

    def test_degenerate_model_computable(self):
        report = expected_shares_enumeration(uniform_rule(2), BernoulliModel((1.0, 1.0)))
        assert report.means[-1] == 0.0
        assert BernoulliModel((1.0, 1.0)).degenerate

    def test_too_many_participants(self):
        with pytest.raises(TooManyParticipantsError):
            expected_shares_enumeration(uniform_rule(26), BernoulliModel((0.5,) * 26))

    def test_loss_rule_rejected(self):
        with pytest.raises(ScenarioMismatchError):
            expected_shares_enumeration(ProportionalRule(), BernoulliModel((0.5, 0.5)))

    @given(
        probs=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=6),
        data=st.data(),
    )
    @settings(max_examples=50, deadline=None)
    def test_matches_brute_force_oracle(self, probs, data):
        n = len(probs)
        units = data.draw(st.lists(st.floats(0.1, 10.0), min_size=n + 1, max_size=n + 1))
        rule = TontineRule(tuple(units))

        def oracle_shares(outcome):
            k = math.fsum(u * b for u, b in zip(units, outcome))
            if k == 0:
                return [0.0] * n + [1.0]
            return [u * b / k for u, b in zip(units, outcome)] + [0.0]

        oracle = brute_force_expected_shares(oracle_shares, probs)
        report = expected_shares_enumeration(rule, BernoulliModel(tuple(probs)))
        assert_close_seq(report.means, oracle, abs_tol=1e-13)

    @given(probs=st.lists(st.floats(0.01, 0.99), min_size=1, max_size=10), data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_admin_mean_is_product_of_complements(self, probs, data):
        n = len(probs)
        units = data.draw(st.lists(st.floats(0.1, 10.0), min_size=n + 1, max_size=n + 1))
        report = expected_shares_enumeration(TontineRule(tuple(units)), BernoulliModel(tuple(probs)))
        expected = math.prod(1 - p for p in probs)
        assert math.isclose(report.means[-1], expected, rel_tol=1e-12, abs_tol=1e-15)
        assert 0.0 < report.means[-1] < 1.0  # non-degenerate model


class TestClosedForms:
    def test_uniform_units_pair(self):
        model = BernoulliModel((0.5, 0.5))
        assert math.isclose(expected_share_uniform_units(model, 0), 0.375, abs_tol=1e-15)

    def test_single_participant(self):
        assert expected_share_uniform_units(BernoulliModel((0.7,)), 0) == 0.7
        assert expected_share_joint_counts(BernoulliModel((0.3,)), 0) == 0.3

    def test_three_homogeneous(self):
        model = BernoulliModel((0.5, 0.5, 0.5))
        assert math.isclose(expected_share_uniform_units(model, 0), (1 - 0.125) / 3, abs_tol=1e-15)

    def test_joint_counts_pair(self):
        assert math.isclose(
            expected_share_joint_counts(BernoulliModel((0.5, 0.5)), 0), 0.375, abs_tol=1e-15
        )

    def test_joint_counts_coin_die(self):
        # enumeration over 4 outcomes: (1/6)(1/2) + (1/2)(1/12)
        model = BernoulliModel((0.5, 1 / 6))
        assert math.isclose(expected_share_joint_counts(model, 1), 0.125, abs_tol=1e-15)

    def test_index_out_of_range(self):
        with pytest.raises(ParticipantIndexError):
            expected_share_uniform_units(BernoulliModel((0.5,)), 1)
        with pytest.raises(ParticipantIndexError):
            expected_share_joint_counts(BernoulliModel((0.5,)), -1)

    @given(probs=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=15))
    @settings(max_examples=40, deadline=None)
    def test_three_routes_agree(self, probs):
        model = BernoulliModel(tuple(probs))
        enum = expected_shares_enumeration(uniform_rule(model.n), model)
        for i in range(model.n):
            a = expected_share_uniform_units(model, i)
            b = expected_share_joint_counts(model, i)
            assert abs(a - b) <= 1e-12
            assert abs(a - enum.means[i]) <= 1e-12

    def test_report_form(self):
        model = BernoulliModel((0.2, 0.7, 0.5))
        report = uniform_tontine_expectations(model)
        enum = expected_shares_enumeration(uniform_rule(3), model)
        assert report.method == "closed_form"
        assert_close_seq(report.means, enum.means, abs_tol=1e-13)


class TestHomogeneous:
    @pytest.mark.parametrize(
        "n,q,expected",
        [
            (1, 0.5, (0.5, 0.5)),
            (2, 0.5, (0.375, 0.25)),
            (10, 0.5, ((1 - 2**-10) / 10, 2**-10)),
        ],
    )
    def test_examples(self, n, q, expected):
        assert homogeneous_expected_shares(n, q) == expected

    def test_cross_check_enumeration(self):
        part, admin = homogeneous_expected_shares(10, 0.5)
        report = expected_shares_enumeration(uniform_rule(10), BernoulliModel((0.5,) * 10))
        assert all(abs(m - part) <= 5e-15 for m in report.means[:-1])
        assert abs(report.means[-1] - admin) <= 5e-15

    @pytest.mark.parametrize("q", [0.0, 1.0])
    def test_degenerate(self, q):
        with pytest.raises(DegenerateProbabilityError):
            homogeneous_expected_shares(3, q)


class TestMonteCarlo:
    def test_constant_loss_scenario(self):
        sampler = ConstantSampler((1.0, 1.0))
        report = expected_shares_monte_carlo(ProportionalRule(), sampler, 100, seed=0)
        assert report.means == (0.5, 0.5, 0.0)
        assert report.stderr == (0.0, 0.0, 0.0)

    def test_constant_zero_losses(self):
        sampler = ConstantSampler((0.0, 0.0))
        report = expected_shares_monte_carlo(ProportionalRule(), sampler, 100, seed=0)
        assert report.means == (0.0, 0.0, 1.0)

    def test_within_four_stderr_of_enumeration(self):
        sampler = BernoulliSampler((0.5, 0.5))
        report = expected_shares_monte_carlo(uniform_rule(2), sampler, 200_000, seed=11)
        for mean, se, exact in zip(report.means, report.stderr, (0.375, 0.375, 0.25)):
            assert abs(mean - exact) <= 4 * se

    def test_error_decreases_with_samples(self):
        # deterministic under the pinned seed
        exact = np.array([0.375, 0.375, 0.25])
        sampler = BernoulliSampler((0.5, 0.5))
        errs = []
        for n_samples in (10**4, 10**5, 10**6):
            report = expected_shares_monte_carlo(uniform_rule(2), sampler, n_samples, seed=42)
            errs.append(np.max(np.abs(np.asarray(report.means) - exact)))
            for mean, se, e in zip(report.means, report.stderr, exact):
                assert abs(mean - e) <= 4 * se
        assert errs[0] > errs[1] > errs[2]

    def test_deterministic_across_workers(self):
        sampler = BernoulliSampler((0.3, 0.6, 0.9))
        kwargs = dict(rule=uniform_rule(3), sampler=sampler, n_samples=150_001, seed=99)
        solo = expected_shares_monte_carlo(**kwargs, n_workers=1)
        quad = expected_shares_monte_carlo(**kwargs, n_workers=4)
        assert solo.means == quad.means
        assert solo.stderr == quad.stderr

    def test_seed_falls_back_to_sampler(self):
        sampler = BernoulliSampler((0.5, 0.5), seed=5)
        a = expected_shares_monte_carlo(uniform_rule(2), sampler, 1000)
        b = expected_shares_monte_carlo(uniform_rule(2), sampler, 1000, seed=5)
        assert a.means == b.means
        assert a.seed == 5

    def test_requires_some_seed(self):
        sampler = BernoulliSampler((0.5, 0.5))
        with pytest.raises(Exception, match="seed"):
            expected_shares_monte_carlo(uniform_rule(2), sampler, 1000)

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSamplesError):
            expected_shares_monte_carlo(uniform_rule(2), BernoulliSampler((0.5, 0.5)), 1, seed=0)

    def test_kind_mismatch(self):
        with pytest.raises(ScenarioMismatchError):
            expected_shares_monte_carlo(ProportionalRule(), BernoulliSampler((0.5, 0.5)), 100, seed=0)

    def test_metadata_recorded(self):
        report = expected_shares_monte_carlo(
            uniform_rule(2), BernoulliSampler((0.5, 0.5)), 1000, seed=3
        )
        assert report.generator.startswith("numpy.random.PCG64")
        assert report.chunk_size is not None
        assert report.samples == 1000

    def test_custom_rule_loops_through_validation(self):
        rule = CustomRule(lambda s: uniform_tontine_shares(s.indicators))
        sampler = BernoulliSampler((0.5, 0.5))
        report = expected_shares_monte_carlo(rule, sampler, 4096, seed=1)
        mirror = expected_shares_monte_carlo(uniform_rule(2), sampler, 4096, seed=1)
        assert_close_seq(report.means, mirror.means, abs_tol=1e-15)


class TestExpectationReport:
    def test_rejects_bad_sum(self):
        with pytest.raises(Exception):
            ExpectationReport(means=(0.5, 0.4, 0.2), method="enumeration")

    def test_rejects_out_of_range_mean(self):
        with pytest.raises(ProbabilityRangeError):
            ExpectationReport(means=(1.2, -0.2, 0.0), method="enumeration")
