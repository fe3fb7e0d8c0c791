"""Compensation-based risk sharing.

A pool of participants (plus one administrator) funds an endowment at time 0
and splits it at time 1 according to a relative-compensation rule. This
package provides the scheme mechanics (:mod:`poolshare.core`), the standard
rules (:mod:`poolshare.rules`), exact and Monte Carlo expected-share engines
(:mod:`poolshare.expectation`), actuarial-fairness checks and solvers
(:mod:`poolshare.fairness`), pathwise simulation and the centralized-insurance
convergence experiments (:mod:`poolshare.simulate`), and a scenario-file CLI
(:mod:`poolshare.cli`).
"""

from .core import (
    CompensationVector,
    InvestmentVector,
    Mode,
    RelativeShareVector,
    payouts_active,
    payouts_passive,
    scale_investments,
    validate_shares,
)
from .errors import (
    AnchorInfeasibleError,
    ConfigError,
    DegenerateProbabilityError,
    DimensionMismatchError,
    ExclusivityError,
    InfeasibleBetaError,
    InsufficientSamplesError,
    ModeMismatchError,
    NegativeLossError,
    NegativeShareError,
    NoConvergenceError,
    NonPositiveScaleError,
    NonPositiveUnitError,
    ParticipantIndexError,
    PoolShareError,
    ProbabilityRangeError,
    ScenarioMismatchError,
    ShareSumError,
    TooManyParticipantsError,
    ValidationError,
    ZeroProbabilityError,
)
from .expectation import (
    BernoulliModel,
    BernoulliSampler,
    ConstantSampler,
    ExpectationReport,
    FunctionSampler,
    IndependentLossSampler,
    ScenarioSampler,
    expected_share_joint_counts,
    expected_share_uniform_units,
    expected_shares_enumeration,
    expected_shares_monte_carlo,
    homogeneous_expected_shares,
    poisson_binomial_pmf,
    uniform_tontine_expectations,
)
from .fairness import (
    Anchor,
    AnchorKind,
    EquivalenceReport,
    FairnessReport,
    SolverSettings,
    active_passive_equivalence,
    beta_from_investments,
    beta_from_units,
    check_fair_active,
    check_fair_passive,
    solve_fair_fixed_point,
    solve_fair_linear,
    two_participant_expectations,
    two_participant_tontine_fair,
)
from .rules import (
    CustomRule,
    IndicatorScenario,
    LossScenario,
    OrderStatisticRule,
    ProportionalRule,
    Rule,
    TontineRule,
    TwoParticipantBetaRule,
    UnitStrategy,
    custom_rule_validate,
    order_statistic_rule,
    proportional_rule,
    resolve_units,
    tontine_rule,
)
from .simulate import (
    ComparisonReport,
    ComparisonRow,
    ConvergenceRow,
    PathStats,
    centralized_benchmark,
    compare_active_passive,
    convergence_experiment,
    simulate_payouts,
)

__version__ = "0.1.0"

__all__ = [
    "Anchor",
    "AnchorKind",
    "AnchorInfeasibleError",
    "BernoulliModel",
    "BernoulliSampler",
    "ComparisonReport",
    "ComparisonRow",
    "CompensationVector",
    "ConfigError",
    "ConstantSampler",
    "ConvergenceRow",
    "CustomRule",
    "DegenerateProbabilityError",
    "DimensionMismatchError",
    "EquivalenceReport",
    "ExclusivityError",
    "ExpectationReport",
    "FairnessReport",
    "FunctionSampler",
    "IndependentLossSampler",
    "IndicatorScenario",
    "InfeasibleBetaError",
    "InsufficientSamplesError",
    "InvestmentVector",
    "LossScenario",
    "Mode",
    "ModeMismatchError",
    "NegativeLossError",
    "NegativeShareError",
    "NoConvergenceError",
    "NonPositiveScaleError",
    "NonPositiveUnitError",
    "OrderStatisticRule",
    "ParticipantIndexError",
    "PathStats",
    "PoolShareError",
    "ProbabilityRangeError",
    "ProportionalRule",
    "RelativeShareVector",
    "Rule",
    "ScenarioMismatchError",
    "ScenarioSampler",
    "ShareSumError",
    "SolverSettings",
    "TontineRule",
    "TooManyParticipantsError",
    "TwoParticipantBetaRule",
    "UnitStrategy",
    "ValidationError",
    "ZeroProbabilityError",
    "active_passive_equivalence",
    "beta_from_investments",
    "beta_from_units",
    "centralized_benchmark",
    "check_fair_active",
    "check_fair_passive",
    "compare_active_passive",
    "convergence_experiment",
    "custom_rule_validate",
    "expected_share_joint_counts",
    "expected_share_uniform_units",
    "expected_shares_enumeration",
    "expected_shares_monte_carlo",
    "homogeneous_expected_shares",
    "order_statistic_rule",
    "payouts_active",
    "payouts_passive",
    "poisson_binomial_pmf",
    "proportional_rule",
    "resolve_units",
    "scale_investments",
    "simulate_payouts",
    "solve_fair_fixed_point",
    "solve_fair_linear",
    "tontine_rule",
    "two_participant_expectations",
    "two_participant_tontine_fair",
    "uniform_tontine_expectations",
    "validate_shares",
]
