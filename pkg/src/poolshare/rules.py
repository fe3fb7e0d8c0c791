"""Relative-compensation rules: maps from a time-1 scenario to fund shares.

A rule turns what was observed at time 1 (a vector of non-negative losses,
or a vector of binary event indicators) into a valid relative-share
vector over the ``n`` participants plus the administrator. Built-in rules:

* :class:`ProportionalRule`: each participant's share is their loss divided
  by total losses; the administrator takes everything when all losses vanish.
* :class:`OrderStatisticRule`: participant ``i`` receives the share of the
  ``i``-th smallest loss (participants are assumed pre-ordered by decreasing
  risk-bearing capacity; index equals rank).
* :class:`TontineRule`: the fund is split proportionally to surviving
  claiming units ``f_i * I_i``; the administrator claims only when every
  participant's indicator is zero.
* :class:`TwoParticipantBetaRule`: the two-participant tontine parametrized
  by the both-survive split ``beta``.
* :class:`CustomRule`: a user map, re-validated on every evaluation.

Unit vectors for tontine rules come from :func:`resolve_units`: proportional
to investments, investments deflated by event probability, uniform, or
inverse-probability; an explicit positive vector passes straight through.

Rules are immutable and evaluation is pure; custom rule callables must be
side-effect-free (documented contract, not enforced).
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Callable, ClassVar, Literal, Sequence, Union

import numpy as np

from .core import InvestmentVector, RelativeShareVector, validate_shares
from .errors import (
    DimensionMismatchError,
    NegativeLossError,
    NonPositiveUnitError,
    ValidationError,
    ZeroProbabilityError,
)

if TYPE_CHECKING:
    from .expectation import BernoulliModel

ScenarioKind = Literal["loss", "indicator"]


@dataclass(frozen=True)
class LossScenario:
    """Observed non-negative losses of the ``n`` participants."""

    losses: tuple[float, ...]

    def __post_init__(self) -> None:
        losses = tuple(float(x) for x in self.losses)
        object.__setattr__(self, "losses", losses)
        if not losses:
            raise DimensionMismatchError("a loss scenario needs at least one participant")
        for x in losses:
            if not math.isfinite(x) or x < 0.0:
                raise NegativeLossError(f"losses must be finite and non-negative, got {x!r}")

    @property
    def n(self) -> int:
        return len(self.losses)


@dataclass(frozen=True)
class IndicatorScenario:
    """Binary event indicators of the ``n`` participants (1 = event occurred)."""

    indicators: tuple[int, ...]

    def __post_init__(self) -> None:
        raw = tuple(self.indicators)
        if not raw:
            raise DimensionMismatchError("an indicator scenario needs at least one participant")
        cleaned = []
        for x in raw:
            v = int(x)
            if v != x or v not in (0, 1):
                raise ValidationError(f"indicators must be exactly 0 or 1, got {x!r}")
            cleaned.append(v)
        object.__setattr__(self, "indicators", tuple(cleaned))

    @property
    def n(self) -> int:
        return len(self.indicators)


Scenario = Union[LossScenario, IndicatorScenario]


class Rule(abc.ABC):
    """A mapping from scenarios to relative-share vectors."""

    #: Which scenario type this rule consumes.
    scenario_kind: ClassVar[ScenarioKind]

    @abc.abstractmethod
    def shares(self, scenario: Scenario) -> RelativeShareVector:
        """Evaluate the rule on one scenario."""

    def shares_matrix(self, scenarios: np.ndarray) -> np.ndarray:
        """Evaluate the rule row-wise on an ``(m, n)`` scenario matrix.

        Returns an ``(m, n+1)`` matrix of shares. The default implementation
        loops through :meth:`shares` (validating every row); vectorized rules
        override it.
        """
        scenarios = np.asarray(scenarios, dtype=float)
        wrap = LossScenario if self.scenario_kind == "loss" else IndicatorScenario
        rows = [self.shares(wrap(tuple(row))).shares for row in scenarios]
        return np.asarray(rows, dtype=float)


def _extended_proportions(values: np.ndarray) -> np.ndarray:
    """Shares proportional to rows of ``values``, admin flag on all-zero rows."""
    m, n = values.shape
    totals = values.sum(axis=1)
    admin = totals == 0.0
    out = np.zeros((m, n + 1))
    safe = np.where(admin, 1.0, totals)
    out[:, :n] = values / safe[:, None]
    out[admin, :n] = 0.0
    out[admin, n] = 1.0
    return out


class ProportionalRule(Rule):
    """Share the fund in proportion to observed losses.

    A synthetic administrator claim of 1 is inserted when every participant
    loss is zero, so the denominator is never zero and the administrator
    receives the whole fund exactly on the all-zero event.
    """

    scenario_kind: ClassVar[ScenarioKind] = "loss"

    def shares(self, scenario: LossScenario) -> RelativeShareVector:
        x = scenario.losses
        total = math.fsum(x)
        if total == 0.0:
            return RelativeShareVector((0.0,) * len(x) + (1.0,))
        return RelativeShareVector(tuple(v / total for v in x) + (0.0,))

    def shares_matrix(self, scenarios: np.ndarray) -> np.ndarray:
        losses = np.asarray(scenarios, dtype=float)
        if losses.min(initial=0.0) < 0.0:
            raise NegativeLossError("losses must be non-negative")
        return _extended_proportions(losses)


class OrderStatisticRule(Rule):
    """Give participant ``i`` the share of the ``i``-th smallest loss.

    Losses are sorted ascending (stable), so the participant listed first is
    matched with the smallest loss. On the all-zero event the administrator
    takes the fund, as in :class:`ProportionalRule`.
    """

    scenario_kind: ClassVar[ScenarioKind] = "loss"

    def shares(self, scenario: LossScenario) -> RelativeShareVector:
        ordered = LossScenario(tuple(sorted(scenario.losses)))
        return ProportionalRule().shares(ordered)

    def shares_matrix(self, scenarios: np.ndarray) -> np.ndarray:
        losses = np.asarray(scenarios, dtype=float)
        if losses.min(initial=0.0) < 0.0:
            raise NegativeLossError("losses must be non-negative")
        return _extended_proportions(np.sort(losses, axis=1, kind="stable"))


class TontineRule(Rule):
    """Split the fund proportionally to surviving claiming units.

    Args:
        units: ``n+1`` strictly positive claiming units; the last entry
            belongs to the administrator. The administrator's unit never
            influences any share (it cancels on the admin-takes-all event)
            but must be positive.
    """

    scenario_kind: ClassVar[ScenarioKind] = "indicator"

    def __init__(self, units: Sequence[float]):
        units = tuple(float(f) for f in units)
        if len(units) < 2:
            raise DimensionMismatchError("need units for at least one participant plus the administrator")
        for f in units:
            if not math.isfinite(f) or f <= 0.0:
                raise NonPositiveUnitError(f"claiming units must be positive, got {f!r}")
        self.units = units

    def shares(self, scenario: IndicatorScenario) -> RelativeShareVector:
        ind = scenario.indicators
        if len(ind) + 1 != len(self.units):
            raise DimensionMismatchError(
                f"rule has {len(self.units)} units, scenario has {len(ind)} participants"
            )
        weights = [f * i for f, i in zip(self.units, ind)]
        claiming = math.fsum(weights)
        if claiming == 0.0:
            return RelativeShareVector((0.0,) * len(ind) + (1.0,))
        return RelativeShareVector(tuple(w / claiming for w in weights) + (0.0,))

    def shares_matrix(self, scenarios: np.ndarray) -> np.ndarray:
        ind = np.asarray(scenarios, dtype=float)
        m, n = ind.shape
        if n + 1 != len(self.units):
            raise DimensionMismatchError(
                f"rule has {len(self.units)} units, scenarios have {n} participants"
            )
        weights = ind * np.asarray(self.units[:-1])
        claiming = weights.sum(axis=1)
        admin = claiming == 0.0
        out = np.zeros((m, n + 1))
        out[:, :n] = weights / np.where(admin, 1.0, claiming)[:, None]
        out[admin, n] = 1.0
        return out


class TwoParticipantBetaRule(Rule):
    """Two-participant tontine with a both-survive split ``beta`` in [0, 1].

    Sole survivor takes the fund; both surviving split it ``beta : 1 - beta``;
    the administrator takes it when neither survives. Equivalent to a
    :class:`TontineRule` with units ``(beta, 1-beta, c)`` whenever
    ``0 < beta < 1``, but also admits the boundary values.
    """

    scenario_kind: ClassVar[ScenarioKind] = "indicator"

    def __init__(self, beta: float):
        beta = float(beta)
        if not 0.0 <= beta <= 1.0:
            raise ValidationError(f"beta must lie in [0, 1], got {beta!r}")
        self.beta = beta

    def shares(self, scenario: IndicatorScenario) -> RelativeShareVector:
        if scenario.n != 2:
            raise DimensionMismatchError("this rule is defined for exactly two participants")
        i1, i2 = scenario.indicators
        if i1 and i2:
            return RelativeShareVector((self.beta, 1.0 - self.beta, 0.0))
        if i1:
            return RelativeShareVector((1.0, 0.0, 0.0))
        if i2:
            return RelativeShareVector((0.0, 1.0, 0.0))
        return RelativeShareVector((0.0, 0.0, 1.0))

    def shares_matrix(self, scenarios: np.ndarray) -> np.ndarray:
        ind = np.asarray(scenarios, dtype=float)
        m, n = ind.shape
        if n != 2:
            raise DimensionMismatchError("this rule is defined for exactly two participants")
        i1, i2 = ind[:, 0] > 0, ind[:, 1] > 0
        out = np.zeros((m, 3))
        both = i1 & i2
        out[both, 0] = self.beta
        out[both, 1] = 1.0 - self.beta
        out[i1 & ~i2, 0] = 1.0
        out[~i1 & i2, 1] = 1.0
        out[~i1 & ~i2, 2] = 1.0
        return out


class CustomRule(Rule):
    """Wrap a user-supplied scenario-to-shares map with runtime validation.

    The map must return ``n+1`` shares forming a valid relative-share vector
    for every admissible scenario; this cannot be proven globally, so every
    evaluation is validated and failures are tagged with the offending
    scenario.
    """

    def __init__(self, fn: Callable[[Scenario], Sequence[float]],
                 scenario_kind: ScenarioKind = "indicator"):
        if scenario_kind not in ("loss", "indicator"):
            raise ValidationError(f"unknown scenario kind {scenario_kind!r}")
        self.fn = fn
        self.scenario_kind = scenario_kind  # type: ignore[misc]

    def shares(self, scenario: Scenario) -> RelativeShareVector:
        raw = self.fn(scenario)
        try:
            return validate_shares(tuple(raw))
        except ValidationError as exc:
            raise type(exc)(f"{exc} (scenario: {scenario})") from exc


class UnitStrategy(Enum):
    """Named recipes for the claiming units of a tontine rule."""

    #: ``f_i = pi_i / p_i``: units proportional to investment, deflated by
    #: the event probability.
    DHAENE_MILEVSKY = "dhaene_milevsky"
    #: ``f_i = pi_i``: units equal to the investments.
    TAVIN = "tavin"
    #: ``f_i = 1``: uniform units.
    DENUIT_ROBERT = "denuit_robert"
    #: ``f_i = 1 / p_i``.
    INVERSE_PROBABILITY = "inverse_probability"


#: Strategies whose resolved units change when investments are rescaled.
INVESTMENT_DEPENDENT_STRATEGIES = frozenset(
    {UnitStrategy.DHAENE_MILEVSKY, UnitStrategy.TAVIN}
)


def _admin_unit(inv: InvestmentVector | None) -> float:
    # The administrator's unit cancels out of every share, so any positive
    # value is equivalent; fall back to 1 when the admin invests nothing.
    if inv is not None and inv.admin > 0.0:
        return inv.admin
    return 1.0


def resolve_units(
    strategy: UnitStrategy | Sequence[float],
    inv: InvestmentVector | None = None,
    model: "BernoulliModel | None" = None,
) -> tuple[float, ...]:
    """Resolve a unit strategy into ``n+1`` strictly positive claiming units.

    Args:
        strategy: a :class:`UnitStrategy` member, or an explicit sequence of
            ``n+1`` positive units (passed through after a positivity check).
        inv: required by the investment-based strategies.
        model: event-probability model, required where units divide by ``p_i``.

    Raises:
        ZeroProbabilityError: a strategy divides by ``p_i = 0``.
        NonPositiveUnitError: a resolved unit is not strictly positive.
        ValidationError: a required input is missing.
    """
    if not isinstance(strategy, UnitStrategy):
        units = tuple(float(f) for f in strategy)
        for f in units:
            if not math.isfinite(f) or f <= 0.0:
                raise NonPositiveUnitError(f"explicit units must be positive, got {f!r}")
        return units

    if strategy is UnitStrategy.DENUIT_ROBERT:
        n = model.n if model is not None else (inv.n if inv is not None else None)
        if n is None:
            raise ValidationError("uniform units need a model or investments to fix the pool size")
        return (1.0,) * (n + 1)

    if strategy is UnitStrategy.TAVIN:
        if inv is None:
            raise ValidationError("investment-proportional units need the investment vector")
        for a in inv.participants:
            if a <= 0.0:
                raise NonPositiveUnitError(
                    "investment-proportional units need every participant investment positive"
                )
        return inv.participants + (_admin_unit(inv),)

    if strategy is UnitStrategy.DHAENE_MILEVSKY:
        if inv is None or model is None:
            raise ValidationError("probability-deflated units need investments and a model")
        if inv.n != model.n:
            raise DimensionMismatchError(
                f"investments have {inv.n} participants, model has {model.n}"
            )
        units = []
        for a, p in zip(inv.participants, model.probs):
            if p == 0.0:
                raise ZeroProbabilityError("cannot divide an investment by a zero probability")
            if a <= 0.0:
                raise NonPositiveUnitError(
                    "probability-deflated units need every participant investment positive"
                )
            units.append(a / p)
        return tuple(units) + (_admin_unit(inv),)

    # UnitStrategy.INVERSE_PROBABILITY
    if model is None:
        raise ValidationError("inverse-probability units need a model")
    units = []
    for p in model.probs:
        if p == 0.0:
            raise ZeroProbabilityError("cannot invert a zero probability")
        units.append(1.0 / p)
    return tuple(units) + (1.0,)


# --- free-function forms of the rule evaluations ------------------------------


def proportional_rule(scenario: LossScenario) -> RelativeShareVector:
    """Evaluate the loss-proportional rule on one scenario."""
    return ProportionalRule().shares(scenario)


def order_statistic_rule(scenario: LossScenario) -> RelativeShareVector:
    """Evaluate the order-statistic rule on one scenario."""
    return OrderStatisticRule().shares(scenario)


def tontine_rule(units: Sequence[float], scenario: IndicatorScenario) -> RelativeShareVector:
    """Evaluate the claiming-units rule for the given units on one scenario."""
    return TontineRule(units).shares(scenario)


def custom_rule_validate(rule: CustomRule, scenario: Scenario) -> RelativeShareVector:
    """Apply a custom rule and enforce share validity for this scenario."""
    return rule.shares(scenario)
