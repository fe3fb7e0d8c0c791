"""Expected relative shares: exact engines and seeded Monte Carlo.

Three routes to ``E[P_i]``:

* :func:`expected_shares_enumeration`: exact sum over all ``2^n`` indicator
  outcomes of an independent Bernoulli model (pools up to 25 participants).
* Closed forms for the uniform-units tontine:
  :func:`expected_share_joint_counts` sums ``(1/k) * Pr[I_i=1, S=k]`` over the
  claimant count ``k``, and :func:`expected_share_uniform_units` factors the
  joint probability through a Poisson-binomial pmf of the other participants.
  Both must agree with enumeration to near machine precision.
  :func:`homogeneous_expected_shares` specializes to i.i.d. indicators, where
  the participant mean is ``(1 - q^n) / n`` and the administrator mean ``q^n``.
* :func:`expected_shares_monte_carlo`: seeded, chunked sampling for arbitrary
  rules and loss distributions. Chunk sub-seeds derive deterministically from
  the master seed and the chunk index, and chunk results are combined in chunk
  order, so the estimate is bit-identical for a fixed seed regardless of the
  number of workers.
"""

from __future__ import annotations

import abc
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, ClassVar, Literal, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateProbabilityError,
    DimensionMismatchError,
    InsufficientSamplesError,
    ParticipantIndexError,
    ProbabilityRangeError,
    ScenarioMismatchError,
    TooManyParticipantsError,
    ValidationError,
)
from .rules import Rule, ScenarioKind

#: Enumeration cap: 2^25 outcomes is the largest pool walked exhaustively.
MAX_ENUMERATION_PARTICIPANTS = 25

#: Outcomes per enumeration chunk and samples per Monte Carlo chunk.
ENUMERATION_CHUNK = 1 << 16
MONTE_CARLO_CHUNK = 1 << 15

#: Identifier and version of the bit generator behind ``numpy.random.default_rng``.
GENERATOR_NAME = f"numpy.random.PCG64 (numpy {np.__version__})"


@dataclass(frozen=True)
class BernoulliModel:
    """Independent event probabilities ``p_i`` for the ``n`` participants.

    The model is *degenerate* when the admin-takes-all probability
    ``prod(1 - p_i)`` is exactly 0 or 1, i.e. some ``p_i = 1`` or every
    ``p_i = 0``. Degenerate models remain computable by the expectation
    engines but are rejected by the fairness solvers.
    """

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise DimensionMismatchError("a model needs at least one participant")
        for p in probs:
            if not math.isfinite(p) or not 0.0 <= p <= 1.0:
                raise ProbabilityRangeError(f"probabilities must lie in [0, 1], got {p!r}")

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def complements(self) -> tuple[float, ...]:
        """``q_i = 1 - p_i``."""
        return tuple(1.0 - p for p in self.probs)

    @property
    def admin_probability(self) -> float:
        """Probability that no participant claims: ``prod(q_i)``."""
        out = 1.0
        for q in self.complements:
            out *= q
        return out

    @property
    def degenerate(self) -> bool:
        return any(p == 1.0 for p in self.probs) or all(p == 0.0 for p in self.probs)


@dataclass(frozen=True)
class ExpectationReport:
    """Per-agent expected shares plus provenance of the computation.

    ``means`` covers all ``n+1`` agents (administrator last) and sums to 1:
    within 1e-10 for the exact methods, within ``max(4 * max stderr, 1e-9)``
    for Monte Carlo.
    """

    means: tuple[float, ...]
    method: Literal["enumeration", "closed_form", "monte_carlo"]
    stderr: tuple[float, ...] | None = None
    samples: int | None = None
    seed: int | None = None
    generator: str | None = None
    chunk_size: int | None = None

    def __post_init__(self) -> None:
        means = tuple(float(m) for m in self.means)
        object.__setattr__(self, "means", means)
        if self.stderr is not None:
            object.__setattr__(self, "stderr", tuple(float(s) for s in self.stderr))
        if len(means) < 2:
            raise DimensionMismatchError("a report covers at least one participant plus the administrator")
        for m in means:
            if not -1e-12 <= m <= 1.0 + 1e-12:
                raise ProbabilityRangeError(f"expected shares must lie in [0, 1], got {m!r}")
        total = math.fsum(means)
        if self.method == "monte_carlo":
            worst = max(self.stderr) if self.stderr else 0.0
            tol = max(4.0 * worst, 1e-9)
        else:
            tol = 1e-10
        if abs(total - 1.0) > tol:
            raise ValidationError(f"expected shares sum to {total!r}, expected 1 (tol {tol})")

    @property
    def n(self) -> int:
        return len(self.means) - 1

    @property
    def admin_mean(self) -> float:
        return self.means[-1]

    @property
    def participant_means(self) -> tuple[float, ...]:
        return self.means[:-1]


# --- scenario samplers ---------------------------------------------------------


class ScenarioSampler(abc.ABC):
    """A distribution over time-1 scenarios, drawn with a caller-supplied rng.

    Samplers are stateless distribution specs; determinism comes from the
    seeded generators the engines construct per chunk. ``seed`` is only a
    default used when a consuming operation receives no explicit seed.
    """

    kind: ClassVar[ScenarioKind]
    n: int
    seed: int | None

    @abc.abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw a ``(size, n)`` scenario matrix."""


class BernoulliSampler(ScenarioSampler):
    """Independent binary indicators with per-participant probabilities."""

    kind: ClassVar[ScenarioKind] = "indicator"

    def __init__(self, probs: Sequence[float] | BernoulliModel, seed: int | None = None):
        model = probs if isinstance(probs, BernoulliModel) else BernoulliModel(tuple(probs))
        self.model = model
        self.n = model.n
        self.seed = seed
        self._p = np.asarray(model.probs)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return (rng.random((size, self.n)) < self._p).astype(float)


class ConstantSampler(ScenarioSampler):
    """Always emits the same scenario; handy for audits and oracles."""

    def __init__(self, values: Sequence[float], kind: ScenarioKind = "loss",
                 seed: int | None = None):
        if kind not in ("loss", "indicator"):
            raise ValidationError(f"unknown scenario kind {kind!r}")
        self.kind = kind  # type: ignore[misc]
        self.values = tuple(float(v) for v in values)
        self.n = len(self.values)
        self.seed = seed

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.tile(np.asarray(self.values), (size, 1))


class IndependentLossSampler(ScenarioSampler):
    """I.i.d. non-negative losses from a named marginal, with an optional atom at zero.

    Supported marginals and parameters:
        ``lognormal`` (mean, sigma), ``exponential`` (scale),
        ``gamma`` (shape, scale), ``uniform`` (low, high).

    ``zero_prob`` independently replaces each loss by 0 with that probability,
    which gives the all-zero event positive mass (needed for the
    administrator branch of loss-based rules to be reachable).
    """

    kind: ClassVar[ScenarioKind] = "loss"

    _DRAWS: Mapping[str, Callable[..., np.ndarray]] = {
        "lognormal": lambda rng, size, mean=0.0, sigma=1.0: rng.lognormal(mean, sigma, size),
        "exponential": lambda rng, size, scale=1.0: rng.exponential(scale, size),
        "gamma": lambda rng, size, shape=2.0, scale=1.0: rng.gamma(shape, scale, size),
        "uniform": lambda rng, size, low=0.0, high=1.0: rng.uniform(low, high, size),
    }

    def __init__(self, distribution: str, n: int, params: Mapping[str, float] | None = None,
                 zero_prob: float = 0.0, seed: int | None = None):
        if distribution not in self._DRAWS:
            raise ValidationError(
                f"unknown loss distribution {distribution!r}; choose from {sorted(self._DRAWS)}"
            )
        if n < 1:
            raise DimensionMismatchError("need at least one participant")
        if not 0.0 <= zero_prob <= 1.0:
            raise ProbabilityRangeError(f"zero_prob must lie in [0, 1], got {zero_prob!r}")
        self.distribution = distribution
        self.params = dict(params or {})
        self.n = int(n)
        self.zero_prob = float(zero_prob)
        self.seed = seed

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        draws = self._DRAWS[self.distribution](rng, (size, self.n), **self.params)
        draws = np.abs(np.asarray(draws, dtype=float))
        if self.zero_prob > 0.0:
            draws[rng.random((size, self.n)) < self.zero_prob] = 0.0
        return draws


class FunctionSampler(ScenarioSampler):
    """Adapt an arbitrary ``(rng, size) -> (size, n)`` draw function.

    Supports joint (dependent) scenario distributions that the built-in
    samplers do not cover.
    """

    def __init__(self, fn: Callable[[np.random.Generator, int], np.ndarray], n: int,
                 kind: ScenarioKind = "loss", seed: int | None = None):
        if kind not in ("loss", "indicator"):
            raise ValidationError(f"unknown scenario kind {kind!r}")
        self.fn = fn
        self.n = int(n)
        self.kind = kind  # type: ignore[misc]
        self.seed = seed

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.asarray(self.fn(rng, size), dtype=float)
        if out.shape != (size, self.n):
            raise DimensionMismatchError(
                f"sampler returned shape {out.shape}, expected {(size, self.n)}"
            )
        return out


def chunk_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic per-chunk generator derived from a master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def resolve_seed(seed: int | None, sampler: ScenarioSampler) -> int:
    """Pick the effective seed: explicit argument wins over the sampler default."""
    if seed is None and sampler.seed is not None:
        seed = sampler.seed
    if seed is None:
        raise ValidationError("a seed is required: pass one explicitly or set it on the sampler")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


# --- exact engines --------------------------------------------------------------


def outcome_bits(indices: np.ndarray, n: int) -> np.ndarray:
    """Binary indicator rows for the given outcome indices (bit ``j`` = participant ``j``)."""
    return ((indices[:, None] >> np.arange(n, dtype=np.uint64)) & 1).astype(float)


def outcome_table(model: BernoulliModel) -> tuple[np.ndarray, np.ndarray]:
    """All ``2^n`` indicator rows and their probabilities (small pools only)."""
    n = model.n
    if n > 20:
        raise TooManyParticipantsError(f"full outcome table limited to 20 participants, got {n}")
    idx = np.arange(1 << n, dtype=np.uint64)
    bits = outcome_bits(idx, n)
    p = np.asarray(model.probs)
    probs = np.prod(np.where(bits == 1.0, p, 1.0 - p), axis=1)
    return bits, probs


def expected_shares_enumeration(rule: Rule, model: BernoulliModel,
                                chunk_size: int = ENUMERATION_CHUNK) -> ExpectationReport:
    """Exact expected shares by summing over all ``2^n`` indicator outcomes.

    Args:
        rule: a rule consuming indicator scenarios.
        model: independent event probabilities; at most 25 participants.

    Raises:
        TooManyParticipantsError: more than 25 participants.
        ScenarioMismatchError: the rule consumes loss scenarios.
    """
    if rule.scenario_kind != "indicator":
        raise ScenarioMismatchError("enumeration requires a rule over indicator scenarios")
    n = model.n
    if n > MAX_ENUMERATION_PARTICIPANTS:
        raise TooManyParticipantsError(
            f"enumeration walks 2^n outcomes; n={n} exceeds the cap of {MAX_ENUMERATION_PARTICIPANTS}"
        )
    p = np.asarray(model.probs)
    q = 1.0 - p
    total_outcomes = 1 << n
    means = np.zeros(n + 1)
    for start in range(0, total_outcomes, chunk_size):
        idx = np.arange(start, min(start + chunk_size, total_outcomes), dtype=np.uint64)
        bits = outcome_bits(idx, n)
        probs = np.prod(np.where(bits == 1.0, p, q), axis=1)
        means += probs @ rule.shares_matrix(bits)
    return ExpectationReport(means=tuple(means), method="enumeration")


def poisson_binomial_pmf(probs: Sequence[float]) -> np.ndarray:
    """Exact pmf of a sum of independent Bernoulli variables.

    Dynamic-programming convolution, one variable at a time; O(n^2) and exact
    up to float rounding (the pmf sums to 1 within 1e-12).

    Returns:
        Array of length ``len(probs) + 1``; entry ``k`` is ``Pr[S = k]``.
    """
    ps = [float(p) for p in probs]
    for p in ps:
        if not math.isfinite(p) or not 0.0 <= p <= 1.0:
            raise ProbabilityRangeError(f"probabilities must lie in [0, 1], got {p!r}")
    pmf = np.zeros(len(ps) + 1)
    pmf[0] = 1.0
    for k, p in enumerate(ps):
        head = pmf[: k + 1].copy()
        pmf[: k + 1] = head * (1.0 - p)
        pmf[1 : k + 2] += head * p
    return pmf


def _check_participant(model: BernoulliModel, i: int) -> None:
    if not 0 <= i < model.n:
        raise ParticipantIndexError(f"participant index {i} out of range for n={model.n}")


def expected_share_uniform_units(model: BernoulliModel, i: int) -> float:
    """Expected share of participant ``i`` under the uniform-units tontine.

    Factors the claimant count through a Poisson-binomial pmf of the other
    participants: ``p_i * sum_k (1/k) * Pr[sum_{j != i} I_j = k - 1]``.
    """
    _check_participant(model, i)
    others = model.probs[:i] + model.probs[i + 1 :]
    pmf = poisson_binomial_pmf(others)
    acc = math.fsum(pmf[k - 1] / k for k in range(1, model.n + 1))
    return model.probs[i] * acc


def expected_share_joint_counts(model: BernoulliModel, i: int) -> float:
    """Expected share of participant ``i`` via joint claimant-count probabilities.

    Evaluates ``sum_k (1/k) * Pr[I_i = 1, sum_j I_j = k]`` directly: the joint
    distribution is built by a count-tracking convolution with participant
    ``i``'s indicator clamped to 1. Must agree with
    :func:`expected_share_uniform_units` to 1e-12.
    """
    _check_participant(model, i)
    n = model.n
    joint = np.zeros(n + 1)
    joint[1] = model.probs[i]  # participant i claims; count starts at 1
    for j, p in enumerate(model.probs):
        if j == i:
            continue
        head = joint.copy()
        joint = head * (1.0 - p)
        joint[1:] += head[:-1] * p
    return math.fsum(joint[k] / k for k in range(1, n + 1))


def uniform_tontine_expectations(model: BernoulliModel) -> ExpectationReport:
    """Closed-form expected shares of every agent under uniform units.

    Participants via :func:`expected_share_uniform_units`; the administrator's
    mean equals the probability that nobody claims.
    """
    means = [expected_share_uniform_units(model, i) for i in range(model.n)]
    means.append(model.admin_probability)
    return ExpectationReport(means=tuple(means), method="closed_form")


def homogeneous_expected_shares(n: int, q: float) -> tuple[float, float]:
    """Expected shares in the i.i.d. uniform-units pool.

    Args:
        n: number of participants.
        q: common probability that a participant does *not* claim; must be
            strictly inside (0, 1).

    Returns:
        ``(participant_mean, admin_mean)`` = ``((1 - q^n) / n, q^n)``.

    Raises:
        DegenerateProbabilityError: ``q`` is 0 or 1.
    """
    if n < 1:
        raise DimensionMismatchError("need at least one participant")
    q = float(q)
    if not 0.0 < q < 1.0:
        raise DegenerateProbabilityError(f"q must lie strictly in (0, 1), got {q!r}")
    qn = q**n
    return (1.0 - qn) / n, qn


# --- Monte Carlo ------------------------------------------------------------------


def expected_shares_monte_carlo(
    rule: Rule,
    sampler: ScenarioSampler,
    n_samples: int,
    seed: int | None = None,
    *,
    n_workers: int = 1,
    chunk_size: int = MONTE_CARLO_CHUNK,
) -> ExpectationReport:
    """Estimate expected shares by seeded simulation.

    Samples are drawn in fixed-size chunks; chunk ``c`` uses a generator
    spawned from ``(seed, c)``, and chunk partial sums are combined in chunk
    order with compensated summation. The estimate is therefore reproducible
    bit-for-bit for a fixed ``(seed, chunk_size)`` at any worker count.

    Args:
        rule: rule matching the sampler's scenario kind.
        sampler: scenario distribution.
        n_samples: at least 2 (standard errors need a variance estimate).
        seed: master seed; falls back to ``sampler.seed``.
        n_workers: chunks evaluated concurrently (thread pool).
        chunk_size: samples per chunk; recorded in the report.

    Returns:
        Report with per-agent means and standard errors
        (sample standard deviation / sqrt(n_samples)).
    """
    if n_samples < 2:
        raise InsufficientSamplesError(f"need at least 2 samples, got {n_samples}")
    if rule.scenario_kind != sampler.kind:
        raise ScenarioMismatchError(
            f"rule consumes {rule.scenario_kind!r} scenarios, sampler draws {sampler.kind!r}"
        )
    seed = resolve_seed(seed, sampler)
    n_agents = sampler.n + 1

    sizes = _chunk_sizes(n_samples, chunk_size)

    def eval_chunk(c: int) -> tuple[np.ndarray, np.ndarray]:
        rng = chunk_rng(seed, c)
        shares = rule.shares_matrix(sampler.sample(rng, sizes[c]))
        return shares.sum(axis=0), (shares * shares).sum(axis=0)

    partials = _map_chunks(eval_chunk, len(sizes), n_workers)
    sums, sumsq = _combine_moments(partials, n_agents)

    means = sums / n_samples
    variance = np.maximum(sumsq - n_samples * means * means, 0.0) / (n_samples - 1)
    stderr = np.sqrt(variance / n_samples)
    return ExpectationReport(
        means=tuple(means),
        method="monte_carlo",
        stderr=tuple(stderr),
        samples=n_samples,
        seed=seed,
        generator=GENERATOR_NAME,
        chunk_size=chunk_size,
    )


def _chunk_sizes(total: int, chunk_size: int) -> list[int]:
    if chunk_size < 1:
        raise ValidationError(f"chunk_size must be positive, got {chunk_size}")
    sizes = [chunk_size] * (total // chunk_size)
    if total % chunk_size:
        sizes.append(total % chunk_size)
    return sizes


def _map_chunks(fn: Callable[[int], tuple[np.ndarray, np.ndarray]], n_chunks: int,
                n_workers: int) -> list[tuple[np.ndarray, np.ndarray]]:
    if n_workers <= 1 or n_chunks <= 1:
        return [fn(c) for c in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, range(n_chunks)))


def _combine_moments(partials: Sequence[tuple[np.ndarray, np.ndarray]],
                     n_agents: int) -> tuple[np.ndarray, np.ndarray]:
    # fsum over per-chunk partials, in chunk order: worker-count independent.
    sums = np.array([math.fsum(p[0][a] for p in partials) for a in range(n_agents)])
    sumsq = np.array([math.fsum(p[1][a] for p in partials) for a in range(n_agents)])
    return sums, sumsq
