"""Semantic exception hierarchy for the poolshare library.

Every error raised by the public API derives from :class:`PoolShareError`,
so callers can catch one base class. Input-contract violations additionally
derive from :class:`ValidationError` (itself a ``ValueError``).
"""

from __future__ import annotations


class PoolShareError(Exception):
    """Base error for this library."""


class ValidationError(PoolShareError, ValueError):
    """Inputs violate a documented contract (domain, shape, type)."""


# --- relative-share vectors -------------------------------------------------


class NegativeShareError(ValidationError):
    """A relative share is negative."""


class ShareSumError(ValidationError):
    """Relative shares do not sum to 1 within tolerance."""


class ExclusivityError(ValidationError):
    """The administrator share is inconsistent with the participant shares.

    The administrator share must be 1 exactly when every participant share
    is zero, and 0 otherwise. Also raised by simulation audits when a
    realized path violates mutual exclusivity.
    """


class DimensionMismatchError(ValidationError):
    """Vector lengths disagree, or a vector is too short."""


class ModeMismatchError(ValidationError):
    """An operation received a scheme in the wrong administrator mode."""


class NonPositiveScaleError(ValidationError):
    """Scaling factor must be strictly positive."""


# --- rules and scenarios ----------------------------------------------------


class NegativeLossError(ValidationError):
    """A loss amount is negative."""


class NonPositiveUnitError(ValidationError):
    """A protection unit (claiming weight) is zero or negative."""


class ZeroProbabilityError(ValidationError):
    """A unit strategy divides by an event probability that is zero."""


# --- probability models and expectation engines ------------------------------


class ProbabilityRangeError(ValidationError):
    """A probability lies outside [0, 1]."""


class ParticipantIndexError(PoolShareError, IndexError):
    """Participant index out of range."""


class TooManyParticipantsError(ValidationError):
    """Pool too large for exhaustive enumeration (2^n outcomes)."""


class ScenarioMismatchError(ValidationError):
    """Rule and scenario/sampler kinds disagree (loss vs indicator)."""


class InsufficientSamplesError(ValidationError):
    """Monte Carlo requires at least two samples."""


class DegenerateProbabilityError(PoolShareError):
    """The admin-takes-all event has probability 0 or 1.

    Such models violate the standing assumption that both 'some participant
    claims' and 'no participant claims' have positive probability; fairness
    solving on them is ill-posed.
    """


# --- fairness solvers ---------------------------------------------------------


class AnchorInfeasibleError(PoolShareError):
    """The requested anchor cannot pin down a fair vector for this scheme."""


class NoConvergenceError(PoolShareError):
    """Fixed-point iteration stopped without meeting its tolerance.

    Attributes:
        iterations: number of iterations performed.
        last_change: final relative sup-norm update size.
        max_abs_residual: fairness residual of the last iterate, if available.
    """

    def __init__(self, message: str, *, iterations: int = 0,
                 last_change: float = float("nan"),
                 max_abs_residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.last_change = last_change
        self.max_abs_residual = max_abs_residual


class InfeasibleBetaError(PoolShareError):
    """Back-solved both-survive share falls outside [0, 1]."""


# --- CLI ----------------------------------------------------------------------


class ConfigError(PoolShareError):
    """A scenario configuration file is malformed or incomplete."""
