"""Actuarial fairness: checks, anchored linear solvers, and a fixed-point solver.

A scheme is actuarially fair for an agent when their time-0 investment equals
their expected time-1 payout. With an active administrator the residuals are

    r_i = pi_i - (sum of all investments) * E[P_i],        i = 1..n+1,

and with a passive administrator

    r_i = pi_i - [(participants' total) * E[P_i] + pi_i * E[P_admin]],  i = 1..n,

the administrator being trivially fair (invests nothing, receives nothing).

Fair investment vectors are determined only up to a positive factor, so every
solver requires an explicit :class:`Anchor` fixing the scale: the total of all
investments, the participants' total, or the administrator's investment
(plus, for the passive two-participant closed form, the first participant's
investment). For scale-indifferent rules, those whose shares are unchanged
when all investments are rescaled by a common factor, fairness is closed
under positive scaling.

Rules whose claiming units read the investments (units equal to the
investments, or investments deflated by event probability) make the fairness
conditions a fixed-point problem; :func:`solve_fair_fixed_point` solves it by
damped iteration with exact enumeration inside each step.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence, Union

import numpy as np

from .core import InvestmentVector, Mode
from .errors import (
    AnchorInfeasibleError,
    DegenerateProbabilityError,
    DimensionMismatchError,
    InfeasibleBetaError,
    ModeMismatchError,
    NoConvergenceError,
    NonPositiveUnitError,
    PoolShareError,
    ValidationError,
)
from .expectation import (
    BernoulliModel,
    ExpectationReport,
    MAX_ENUMERATION_PARTICIPANTS,
    expected_shares_enumeration,
    outcome_table,
)
from .rules import (
    INVESTMENT_DEPENDENT_STRATEGIES,
    Rule,
    TontineRule,
    UnitStrategy,
    resolve_units,
)

logger = logging.getLogger(__name__)

#: Default fairness tolerance, relative to the scheme's investment scale.
DEFAULT_FAIR_TOL = 1e-9


class AnchorKind(Enum):
    """Which quantity pins down the scale of a fair investment vector."""

    TOTAL_ALL = "total_all"
    PARTICIPANTS_TOTAL = "participants_total"
    ADMIN_INVESTMENT = "admin_investment"
    #: Fix the first participant's investment; accepted only by the passive
    #: two-participant closed form.
    FIRST_PARTICIPANT = "first_participant"


@dataclass(frozen=True)
class Anchor:
    """A positive scale target for a fairness solve."""

    kind: AnchorKind
    value: float

    def __post_init__(self) -> None:
        v = float(self.value)
        if not math.isfinite(v) or v <= 0.0:
            raise ValidationError(f"anchor value must be positive, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def total_all(cls, value: float) -> "Anchor":
        return cls(AnchorKind.TOTAL_ALL, value)

    @classmethod
    def participants_total(cls, value: float) -> "Anchor":
        return cls(AnchorKind.PARTICIPANTS_TOTAL, value)

    @classmethod
    def admin_investment(cls, value: float) -> "Anchor":
        return cls(AnchorKind.ADMIN_INVESTMENT, value)

    @classmethod
    def first_participant(cls, value: float) -> "Anchor":
        return cls(AnchorKind.FIRST_PARTICIPANT, value)


@dataclass(frozen=True)
class SolverSettings:
    """Damped fixed-point iteration controls."""

    tolerance: float = 1e-10
    max_iterations: int = 10_000
    damping: float = 0.5

    def __post_init__(self) -> None:
        if not self.tolerance > 0.0:
            raise ValidationError(f"tolerance must be positive, got {self.tolerance!r}")
        if not 0.0 < self.damping <= 1.0:
            raise ValidationError(f"damping must lie in (0, 1], got {self.damping!r}")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be at least 1")


@dataclass(frozen=True)
class FairnessReport:
    """Per-agent residuals ``pi_i - E[W_i]`` with a verdict at tolerance.

    ``tolerance`` is the absolute threshold actually applied (the check
    functions scale their relative tolerance by the scheme's investment
    total); ``max_abs_residual`` ranges over the checked agents only: all
    agents in active mode, participants only in passive mode.
    """

    residuals: tuple[float, ...]
    max_abs_residual: float
    fair: bool
    mode: Mode
    tolerance: float


@dataclass(frozen=True)
class EquivalenceReport:
    """Both sides of the active/passive fairness equivalence.

    ``equivalent`` states that 'participants fair under the active scheme'
    and 'participants fair under the passive scheme with the same
    investments AND the administrator's active investment fair' received the
    same verdict.
    """

    equivalent: bool
    participants_fair_active: bool
    passive_side_fair: bool
    residuals_active: tuple[float, ...]
    residuals_passive: tuple[float, ...]
    admin_residual: float
    tolerance: float


def _check_expectations(inv: InvestmentVector, expectations: ExpectationReport) -> None:
    if len(inv.amounts) != len(expectations.means):
        raise DimensionMismatchError(
            f"investments cover {len(inv.amounts)} agents, expectations cover {len(expectations.means)}"
        )


def check_fair_active(inv: InvestmentVector, expectations: ExpectationReport,
                      tolerance: float = DEFAULT_FAIR_TOL) -> FairnessReport:
    """Fairness residuals of an active scheme for all ``n+1`` agents.

    Args:
        tolerance: relative to the total investment; the report records the
            absolute threshold used.
    """
    if inv.mode is not Mode.ACTIVE:
        raise ModeMismatchError("check_fair_active requires an active-mode investment vector")
    _check_expectations(inv, expectations)
    total = inv.total
    residuals = tuple(a - total * m for a, m in zip(inv.amounts, expectations.means))
    abs_tol = float(tolerance) * total
    worst = max(abs(r) for r in residuals)
    return FairnessReport(residuals, worst, worst <= abs_tol, Mode.ACTIVE, abs_tol)


def check_fair_passive(inv: InvestmentVector, expectations: ExpectationReport,
                       tolerance: float = DEFAULT_FAIR_TOL) -> FairnessReport:
    """Fairness residuals of a passive scheme for the ``n`` participants.

    The administrator's residual is identically zero and is excluded from the
    verdict.
    """
    if inv.mode is not Mode.PASSIVE:
        raise ModeMismatchError("check_fair_passive requires a passive-mode investment vector")
    _check_expectations(inv, expectations)
    pooled = inv.participant_total
    admin_mean = expectations.admin_mean
    residuals = tuple(
        a - (pooled * m + a * admin_mean)
        for a, m in zip(inv.participants, expectations.participant_means)
    )
    abs_tol = float(tolerance) * pooled
    worst = max(abs(r) for r in residuals)
    return FairnessReport(residuals + (0.0,), worst, worst <= abs_tol, Mode.PASSIVE, abs_tol)


def _fair_amounts(means: np.ndarray, anchor: Anchor, mode: Mode) -> np.ndarray:
    """Anchored fair investments from fixed expected shares (vector form)."""
    admin_mean = float(means[-1])
    claim_prob = 1.0 - admin_mean  # probability some participant claims
    if anchor.kind is AnchorKind.TOTAL_ALL:
        if mode is Mode.PASSIVE:
            raise AnchorInfeasibleError(
                "a passive scheme has no total-of-all-agents scale; anchor the participants' total"
            )
        if admin_mean >= 1.0:
            raise DegenerateProbabilityError("participants never claim; fairness is ill-posed")
        return anchor.value * means
    if anchor.kind is AnchorKind.PARTICIPANTS_TOTAL:
        if claim_prob <= 0.0:
            raise DegenerateProbabilityError(
                "participants never claim; the participants' total cannot anchor a fair vector"
            )
        amounts = anchor.value * means / claim_prob
        if mode is Mode.PASSIVE:
            amounts = amounts.copy()
            amounts[-1] = 0.0
        return amounts
    if anchor.kind is AnchorKind.ADMIN_INVESTMENT:
        if mode is Mode.PASSIVE:
            raise AnchorInfeasibleError("a passive administrator invests nothing; cannot anchor on it")
        if admin_mean <= 0.0:
            raise AnchorInfeasibleError(
                "the administrator's expected share is zero; cannot anchor on their investment"
            )
        if admin_mean >= 1.0:
            raise DegenerateProbabilityError("participants never claim; fairness is ill-posed")
        return anchor.value * means / admin_mean
    raise AnchorInfeasibleError(f"anchor kind {anchor.kind.value!r} is not accepted by this solver")


def solve_fair_linear(expectations: ExpectationReport, anchor: Anchor,
                      mode: Mode = Mode.ACTIVE) -> InvestmentVector:
    """Fair investments for a rule whose shares do not depend on investments.

    Active mode accepts all three scale anchors; passive mode accepts only
    the participants' total. The returned vector is verified against the
    corresponding check before it is handed back.

    Raises:
        DegenerateProbabilityError: the admin-takes-all probability is 0 or 1
            where the anchor formula divides by it.
        AnchorInfeasibleError: anchor kind not available for this mode, or
            anchoring on a zero administrator share.
    """
    means = np.asarray(expectations.means)
    amounts = _fair_amounts(means, anchor, mode)
    inv = InvestmentVector(tuple(float(a) for a in amounts), mode)
    check = check_fair_active if mode is Mode.ACTIVE else check_fair_passive
    report = check(inv, expectations, tolerance=1e-7)
    if not report.fair:
        raise PoolShareError(
            f"solved vector failed verification (max residual {report.max_abs_residual:g})"
        )
    return inv


RuleFamily = Union[UnitStrategy, Callable[[InvestmentVector], Rule]]


def solve_fair_fixed_point(
    rule_family: RuleFamily,
    model: BernoulliModel,
    anchor: Anchor,
    settings: SolverSettings | None = None,
) -> InvestmentVector:
    """Fair investments for an investment-dependent rule (active administrator).

    Iterates ``pi <- (1 - d) * pi + d * fair(E[P[pi]])`` with the expectations
    computed by exact enumeration and the iterate renormalized to the anchor
    after every step; stops when the relative sup-norm change drops below the
    settings tolerance. The result must pass :func:`check_fair_active` at ten
    times that tolerance, otherwise :class:`NoConvergenceError` is raised.

    Args:
        rule_family: a :class:`UnitStrategy` (units re-resolved from the
            current iterate each step) or a callable mapping an investment
            vector to a rule over indicator scenarios.
        model: non-degenerate independent event probabilities.
        anchor: scale target (total, participants' total, or administrator).

    Raises:
        DegenerateProbabilityError: the model is degenerate.
        NoConvergenceError: iteration budget exhausted or verification failed.
    """
    settings = settings or SolverSettings()
    if model.degenerate:
        raise DegenerateProbabilityError(
            "fairness solving requires 0 < Pr[no participant claims] < 1"
        )
    if anchor.kind is AnchorKind.FIRST_PARTICIPANT:
        raise AnchorInfeasibleError("the fixed-point solver accepts only the three scale anchors")
    n = model.n

    means_of = _means_evaluator(rule_family, model)

    # Start uniform, with the administrator's slot set by one enumeration pass.
    pi = np.ones(n + 1)
    first = means_of(pi)
    admin_mean = first[-1]
    pi[-1] = n * admin_mean / (1.0 - admin_mean)
    pi = _renormalize(pi, anchor)

    d = settings.damping
    last_change = math.inf
    for iteration in range(1, settings.max_iterations + 1):
        means = means_of(pi)
        target = _fair_amounts(means, anchor, Mode.ACTIVE)
        new = _renormalize((1.0 - d) * pi + d * target, anchor)
        last_change = float(np.max(np.abs(new - pi)) / np.max(np.abs(pi)))
        pi = new
        if last_change <= settings.tolerance:
            logger.debug("fixed point converged in %d iterations (change %.3e)", iteration, last_change)
            break
    else:
        last = check_fair_active(
            InvestmentVector(tuple(float(a) for a in pi), Mode.ACTIVE),
            ExpectationReport(means=tuple(means_of(pi)), method="enumeration"),
        )
        raise NoConvergenceError(
            f"no convergence after {settings.max_iterations} iterations "
            f"(last relative change {last_change:.3e}, "
            f"last max residual {last.max_abs_residual:.3e})",
            iterations=settings.max_iterations,
            last_change=last_change,
            max_abs_residual=last.max_abs_residual,
        )

    inv = InvestmentVector(tuple(float(a) for a in pi), Mode.ACTIVE)
    final = ExpectationReport(means=tuple(means_of(pi)), method="enumeration")
    report = check_fair_active(inv, final, tolerance=10.0 * settings.tolerance)
    if not report.fair:
        raise NoConvergenceError(
            f"iterate converged but fails the fairness check "
            f"(max residual {report.max_abs_residual:.3e} > {report.tolerance:.3e})",
            iterations=iteration,
            last_change=last_change,
            max_abs_residual=report.max_abs_residual,
        )
    return inv


def _renormalize(pi: np.ndarray, anchor: Anchor) -> np.ndarray:
    if anchor.kind is AnchorKind.TOTAL_ALL:
        current = pi.sum()
    elif anchor.kind is AnchorKind.PARTICIPANTS_TOTAL:
        current = pi[:-1].sum()
    else:  # ADMIN_INVESTMENT
        current = pi[-1]
    if current <= 0.0:
        raise NoConvergenceError("iterate lost positivity of the anchored quantity")
    return pi * (anchor.value / current)


def _means_evaluator(rule_family: RuleFamily,
                     model: BernoulliModel) -> Callable[[np.ndarray], np.ndarray]:
    """Expected shares of the current iterate, by exact enumeration."""
    if isinstance(rule_family, UnitStrategy) and model.n <= 20:
        # Small pools: precompute the outcome table once, re-weight each step.
        bits, probs = outcome_table(model)
        admin_rows = bits.sum(axis=1) == 0.0
        admin_mass = probs[admin_rows].sum()
        strategy = rule_family
        p = np.asarray(model.probs)

        def units_for(pi: np.ndarray) -> np.ndarray:
            if strategy is UnitStrategy.TAVIN:
                return pi[:-1]
            if strategy is UnitStrategy.DHAENE_MILEVSKY:
                return pi[:-1] / p
            if strategy is UnitStrategy.DENUIT_ROBERT:
                return np.ones(model.n)
            return 1.0 / p  # INVERSE_PROBABILITY

        def means(pi: np.ndarray) -> np.ndarray:
            f = units_for(pi)
            if np.any(f <= 0.0) or not np.all(np.isfinite(f)):
                raise NonPositiveUnitError("iterate produced non-positive claiming units")
            weights = bits * f
            claiming = weights.sum(axis=1)
            shares = weights / np.where(admin_rows, 1.0, claiming)[:, None]
            out = np.empty(model.n + 1)
            out[:-1] = probs @ shares
            out[-1] = admin_mass
            return out

        return means

    if model.n > MAX_ENUMERATION_PARTICIPANTS:
        raise ValidationError(
            f"fixed-point solving enumerates 2^n outcomes; n={model.n} exceeds "
            f"{MAX_ENUMERATION_PARTICIPANTS}"
        )

    def rule_for(pi: np.ndarray) -> Rule:
        inv = InvestmentVector(tuple(float(a) for a in pi), Mode.ACTIVE)
        if isinstance(rule_family, UnitStrategy):
            return TontineRule(resolve_units(rule_family, inv, model))
        return rule_family(inv)

    def means(pi: np.ndarray) -> np.ndarray:
        report = expected_shares_enumeration(rule_for(pi), model)
        return np.asarray(report.means)

    return means


# --- two-participant tontine closed forms ----------------------------------------


def _validate_two_participant(p1: float, p2: float, beta: float) -> None:
    for p in (p1, p2):
        if not 0.0 < p < 1.0:
            raise DegenerateProbabilityError(
                f"event probabilities must lie strictly in (0, 1), got {p!r}"
            )
    if not 0.0 <= beta <= 1.0:
        raise ValidationError(f"beta must lie in [0, 1], got {beta!r}")


def two_participant_expectations(p1: float, p2: float, beta: float) -> ExpectationReport:
    """Exact expected shares of the two-participant tontine.

    ``E[P_1] = p1 (q2 + beta p2)``, ``E[P_2] = p2 (q1 + (1-beta) p1)``,
    ``E[P_admin] = q1 q2``.
    """
    _validate_two_participant(p1, p2, beta)
    q1, q2 = 1.0 - p1, 1.0 - p2
    means = (p1 * (q2 + beta * p2), p2 * (q1 + (1.0 - beta) * p1), q1 * q2)
    return ExpectationReport(means=means, method="closed_form")


def two_participant_tontine_fair(p1: float, p2: float, beta: float, anchor: Anchor,
                                 mode: Mode = Mode.ACTIVE) -> InvestmentVector:
    """Closed-form fair investments for the two-participant tontine.

    Active mode supports the three scale anchors; passive mode supports the
    participants' total or fixing the first participant's investment.

    Raises:
        DegenerateProbabilityError: an event probability is 0 or 1.
        AnchorInfeasibleError: anchor kind not available for the mode.
    """
    expectations = two_participant_expectations(p1, p2, beta)
    e1, e2, _ = expectations.means
    if mode is Mode.PASSIVE and anchor.kind is AnchorKind.FIRST_PARTICIPANT:
        pi1 = anchor.value
        inv = InvestmentVector((pi1, pi1 * e2 / e1, 0.0), Mode.PASSIVE)
        if not check_fair_passive(inv, expectations, tolerance=1e-7).fair:
            raise PoolShareError("solved vector failed verification")
        return inv
    if mode is Mode.ACTIVE and anchor.kind is AnchorKind.FIRST_PARTICIPANT:
        raise AnchorInfeasibleError(
            "fixing the first participant is supported for the passive scheme only"
        )
    return solve_fair_linear(expectations, anchor, mode)


def beta_from_units(f1: float, f2: float) -> float:
    """Both-survive split implied by two claiming units: ``f1 / (f1 + f2)``."""
    f1, f2 = float(f1), float(f2)
    if not (math.isfinite(f1) and math.isfinite(f2)) or f1 <= 0.0 or f2 <= 0.0:
        raise NonPositiveUnitError(f"units must be positive, got ({f1!r}, {f2!r})")
    return f1 / (f1 + f2)


def beta_from_investments(p1: float, p2: float, pi1: float, pi2: float) -> float:
    """Back-solve the both-survive split that makes given investments fair.

    Inverts the two-participant fairness ratio ``pi1 / pi2 = E[P_1] / E[P_2]``
    for ``beta``. Not every investment pair admits a split in [0, 1]; outside
    that range the choice is infeasible.

    Raises:
        InfeasibleBetaError: the implied split falls outside [0, 1].
        DegenerateProbabilityError: an event probability is 0 or 1.
    """
    _validate_two_participant(p1, p2, 0.5)
    pi1, pi2 = float(pi1), float(pi2)
    if pi1 < 0.0 or pi2 < 0.0 or pi1 + pi2 <= 0.0:
        raise ValidationError("investments must be non-negative with a positive total")
    q2 = 1.0 - p2
    beta = (pi1 * p2 - pi2 * p1 * q2) / (p1 * p2 * (pi1 + pi2))
    if not 0.0 <= beta <= 1.0:
        raise InfeasibleBetaError(
            f"investments ({pi1:g}, {pi2:g}) imply a both-survive split of {beta:g}, outside [0, 1]"
        )
    return beta


def active_passive_equivalence(inv_active: InvestmentVector,
                               expectations: ExpectationReport,
                               tolerance: float = DEFAULT_FAIR_TOL) -> EquivalenceReport:
    """Check the two equivalent fairness statements for a fixed share rule.

    Statement (a): the participants are fair under the active scheme.
    Statement (b): the participants are fair under the passive scheme built
    from the same participant investments, AND the administrator's active
    investment equals their expected active payout.

    Both statements are evaluated at the same absolute tolerance (relative
    ``tolerance`` scaled by the active total); the report flags whether the
    verdicts agree, which they must for exact expectations.
    """
    if inv_active.mode is not Mode.ACTIVE:
        raise ModeMismatchError("equivalence starts from an active-mode investment vector")
    _check_expectations(inv_active, expectations)
    total = inv_active.total
    pooled = inv_active.participant_total
    admin_mean = expectations.admin_mean
    abs_tol = float(tolerance) * total

    residuals_active = tuple(
        a - total * m for a, m in zip(inv_active.participants, expectations.participant_means)
    )
    residuals_passive = tuple(
        a - (pooled * m + a * admin_mean)
        for a, m in zip(inv_active.participants, expectations.participant_means)
    )
    admin_residual = inv_active.admin - total * admin_mean

    side_a = max(abs(r) for r in residuals_active) <= abs_tol
    side_b = (
        max(abs(r) for r in residuals_passive) <= abs_tol
        and abs(admin_residual) <= abs_tol
    )
    return EquivalenceReport(
        equivalent=side_a == side_b,
        participants_fair_active=side_a,
        passive_side_fair=side_b,
        residuals_active=residuals_active,
        residuals_passive=residuals_passive,
        admin_residual=admin_residual,
        tolerance=abs_tol,
    )
