import math

import pytest
from hypothesis import given, strategies as st

from poolshare import (
    DimensionMismatchError,
    ExclusivityError,
    InvestmentVector,
    Mode,
    ModeMismatchError,
    NegativeShareError,
    NonPositiveScaleError,
    RelativeShareVector,
    ShareSumError,
    ValidationError,
    payouts_active,
    payouts_passive,
    scale_investments,
    validate_shares,
)

from conftest import assert_close_seq


class TestValidateShares:
    def test_admin_takes_all(self):
        assert validate_shares((0, 0, 1)).shares == (0.0, 0.0, 1.0)

    def test_participants_split(self):
        assert validate_shares((0.4, 0.6, 0)).shares == (0.4, 0.6, 0.0)

    def test_sum_not_one(self):
        with pytest.raises(ShareSumError):
            validate_shares((0.5, 0.5, 0.5))

    def test_negative_share(self):
        with pytest.raises(NegativeShareError):
            validate_shares((1.2, -0.2, 0.0))

    def test_all_zero_needs_admin_one(self):
        # the all-zero map is an exclusivity violation, not a sum problem
        with pytest.raises(ExclusivityError):
            validate_shares((0.0, 0.0, 0.0))

    def test_admin_positive_alongside_participants(self):
        with pytest.raises(ExclusivityError):
            validate_shares((0.5, 0.4, 0.1))

    def test_too_short(self):
        with pytest.raises(DimensionMismatchError):
            validate_shares((1.0,))

    def test_non_finite(self):
        with pytest.raises(ValidationError):
            validate_shares((float("nan"), 0.0, 1.0))


class TestInvestmentVector:
    def test_basic(self):
        inv = InvestmentVector((1, 2, 1))
        assert inv.n == 2
        assert inv.total == 4.0
        assert inv.participant_total == 3.0
        assert inv.admin == 1.0

    def test_needs_positive_participant(self):
        with pytest.raises(ValidationError):
            InvestmentVector((0, 0, 5))

    def test_passive_rejects_admin_investment(self):
        with pytest.raises(ModeMismatchError):
            InvestmentVector((1, 1, 1), Mode.PASSIVE)

    def test_negative_amount(self):
        with pytest.raises(ValidationError):
            InvestmentVector((1, -1, 0))


class TestPayoutsActive:
    def test_admin_takes_total(self):
        w = payouts_active(InvestmentVector((4, 4, 4)), validate_shares((0, 0, 1)))
        assert w.payouts == (0.0, 0.0, 12.0)

    def test_split(self):
        w = payouts_active(InvestmentVector((1, 2, 1)), validate_shares((0.25, 0.75, 0)))
        assert w.payouts == (1.0, 3.0, 0.0)

    def test_both_survive_split(self):
        w = payouts_active(InvestmentVector((11, 3, 10)), validate_shares((0.5, 0.5, 0)))
        assert w.payouts == (12.0, 12.0, 0.0)

    def test_mode_mismatch(self):
        inv = InvestmentVector((1, 1, 0), Mode.PASSIVE)
        with pytest.raises(ModeMismatchError):
            payouts_active(inv, validate_shares((1, 0, 0)))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            payouts_active(InvestmentVector((1, 1, 1, 1)), validate_shares((1, 0, 0)))


class TestPayoutsPassive:
    def test_refund_branch(self):
        w = payouts_passive(InvestmentVector((1, 1, 0), Mode.PASSIVE), validate_shares((0, 0, 1)))
        assert w.payouts == (1.0, 1.0, 0.0)

    def test_even_split(self):
        w = payouts_passive(InvestmentVector((1, 1, 0), Mode.PASSIVE), validate_shares((0.5, 0.5, 0)))
        assert w.payouts == (1.0, 1.0, 0.0)

    def test_sole_claimant(self):
        w = payouts_passive(InvestmentVector((3, 1, 0), Mode.PASSIVE), validate_shares((1, 0, 0)))
        assert w.payouts == (4.0, 0.0, 0.0)

    def test_mode_mismatch(self):
        with pytest.raises(ModeMismatchError):
            payouts_passive(InvestmentVector((1, 1, 1)), validate_shares((1, 0, 0)))


class TestScaleInvestments:
    @pytest.mark.parametrize(
        "amounts,c,expected",
        [((1, 2, 1), 1, (1, 2, 1)), ((1, 2, 1), 3, (3, 6, 3)), ((0, 1, 0), 0.5, (0, 0.5, 0))],
    )
    def test_examples(self, amounts, c, expected):
        scaled = scale_investments(InvestmentVector(amounts), c)
        assert scaled.amounts == tuple(float(e) for e in expected)

    @pytest.mark.parametrize("c", [0.0, -1.0, float("nan")])
    def test_rejects_non_positive(self, c):
        with pytest.raises(NonPositiveScaleError):
            scale_investments(InvestmentVector((1, 2, 1)), c)

    def test_mode_preserved(self):
        inv = InvestmentVector((1, 1, 0), Mode.PASSIVE)
        assert scale_investments(inv, 2.0).mode is Mode.PASSIVE


# --- property tests -----------------------------------------------------------

amounts_strategy = st.lists(
    st.floats(0.0, 1e6, allow_nan=False), min_size=2, max_size=8
).filter(lambda xs: any(a > 0 for a in xs[:-1]))


@st.composite
def share_vectors(draw, n=None):
    """Random members of the valid share set: admin branch or normalized weights."""
    if n is None:
        n = draw(st.integers(1, 7))
    if draw(st.booleans()):
        return RelativeShareVector((0.0,) * n + (1.0,))
    weights = draw(
        st.lists(st.floats(0.0, 1e3, allow_nan=False), min_size=n, max_size=n).filter(
            lambda xs: sum(xs) > 1e-9
        )
    )
    total = math.fsum(weights)
    return RelativeShareVector(tuple(w / total for w in weights) + (0.0,))


@given(amounts=amounts_strategy, data=st.data())
def test_full_allocation_active(amounts, data):
    inv = InvestmentVector(tuple(amounts))
    p = data.draw(share_vectors(n=inv.n))
    w = payouts_active(inv, p)
    assert math.isclose(w.total, inv.total, rel_tol=1e-12, abs_tol=1e-12)


@given(amounts=amounts_strategy, data=st.data())
def test_full_allocation_passive(amounts, data):
    inv = InvestmentVector(tuple(amounts[:-1]) + (0.0,), Mode.PASSIVE)
    p = data.draw(share_vectors(n=inv.n))
    w = payouts_passive(inv, p)
    assert w.payouts[-1] == 0.0
    assert math.isclose(
        math.fsum(w.payouts[:-1]), inv.participant_total, rel_tol=1e-12, abs_tol=1e-12
    )


@given(amounts=amounts_strategy, data=st.data())
def test_mutual_exclusivity_pathwise(amounts, data):
    inv = InvestmentVector(tuple(amounts))
    p = data.draw(share_vectors(n=inv.n))
    w = payouts_active(inv, p)
    if w.admin > 0.0:
        assert all(x == 0.0 for x in w.payouts[:-1])
    if any(x > 0.0 for x in w.payouts[:-1]):
        assert w.admin == 0.0


@given(amounts=amounts_strategy, c=st.floats(1e-3, 1e3, allow_nan=False), data=st.data())
def test_scaling_commutes_with_payouts(amounts, c, data):
    inv = InvestmentVector(tuple(amounts))
    p = data.draw(share_vectors(n=inv.n))
    direct = payouts_active(scale_investments(inv, c), p).payouts
    scaled = [c * x for x in payouts_active(inv, p).payouts]
    assert_close_seq(direct, scaled, rel_tol=1e-12, abs_tol=1e-9)
