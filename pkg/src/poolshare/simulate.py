"""Pathwise payout simulation, audits, and convergence to centralized insurance.

:func:`simulate_payouts` realizes a scheme path by path (draw a scenario,
evaluate the rule, pay out per the administrator mode) while auditing the
full-allocation identity and mutual exclusivity on every path. Draws are
chunked with sub-seeds derived from the master seed and the chunk index, and
chunk aggregates are combined in chunk order with compensated summation, so
results are bit-identical for a fixed seed at any worker count.

:func:`convergence_experiment` reproduces the homogeneous-pool comparison
against buying individual coverage at the pure premium: participant ``i`` of a
fair pool of size ``n`` receives a payout that approaches the centralized
payout ``(pi / p) * I_i`` as the pool grows, and (active mode) the fair
administrator stake collapses geometrically. The experiment reports the
estimated mean absolute gap per pool size.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import ALLOCATION_REL_TOL, InvestmentVector, Mode
from .errors import (
    DegenerateProbabilityError,
    DimensionMismatchError,
    ScenarioMismatchError,
    ValidationError,
)
from .expectation import (
    BernoulliModel,
    BernoulliSampler,
    ExpectationReport,
    GENERATOR_NAME,
    MAX_ENUMERATION_PARTICIPANTS,
    ScenarioSampler,
    chunk_rng,
    expected_shares_enumeration,
    expected_shares_monte_carlo,
    resolve_seed,
)
from .rules import Rule

SIMULATION_CHUNK = 1 << 15
CONVERGENCE_CHUNK = 1 << 16


@dataclass(frozen=True)
class PathStats:
    """Aggregates of a pathwise simulation.

    ``allocation_violations`` and ``exclusivity_violations`` count audited
    paths that broke the full-allocation identity (beyond 1e-12 relative) or
    mutual exclusivity; both must be zero for correct rules.
    """

    mean_payouts: tuple[float, ...]
    std_payouts: tuple[float, ...]
    admin_takes_all: int
    n_paths: int
    seed: int
    allocation_violations: int
    exclusivity_violations: int
    audit_enabled: bool
    chunk_size: int
    generator: str = GENERATOR_NAME

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean_payouts", tuple(float(m) for m in self.mean_payouts))
        object.__setattr__(self, "std_payouts", tuple(float(s) for s in self.std_payouts))


@dataclass(frozen=True)
class ConvergenceRow:
    """One pool size of a convergence experiment.

    ``mean_abs_gap`` estimates the mean absolute difference between a
    participant's pool payout and the centralized payout for the same
    investment; ``admin_mean`` is the simulated administrator payout mean
    (zero in passive mode) and ``admin_mean_exact`` its analytic value.
    """

    n: int
    mean_abs_gap: float
    stderr: float
    admin_mean: float
    admin_mean_exact: float
    n_paths: int
    seed: int


@dataclass(frozen=True)
class ComparisonRow:
    """One participant of an active-vs-passive expected payout comparison."""

    agent: int
    investment: float
    expected_active: float
    expected_passive: float
    difference: float


@dataclass(frozen=True)
class ComparisonReport:
    """Expected payouts of each participant under both administrator modes.

    ``coincide`` is true when every participant's two expectations agree at
    tolerance, which must hold whenever the active scheme is fair.
    """

    rows: tuple[ComparisonRow, ...]
    coincide: bool
    method: Literal["enumeration", "monte_carlo"]
    expectations: ExpectationReport
    tolerance: float


def simulate_payouts(
    inv: InvestmentVector,
    rule: Rule,
    sampler: ScenarioSampler,
    n_paths: int,
    seed: int | None = None,
    *,
    audit: bool = True,
    n_workers: int = 1,
    chunk_size: int = SIMULATION_CHUNK,
) -> PathStats:
    """Simulate scheme payouts and audit the scheme invariants on every path.

    Args:
        inv: investments; the administrator mode selects the payout formula.
        rule: rule matching the sampler's scenario kind.
        sampler: scenario distribution.
        n_paths: number of paths, at least 1.
        seed: master seed (falls back to the sampler default).
        audit: when False, skips the per-path allocation/exclusivity audits
            (recorded in the result); simulation output is unchanged.
        n_workers: chunks evaluated concurrently.

    Returns:
        :class:`PathStats` with per-agent payout means and standard
        deviations, the count of administrator-takes-all paths, and audit
        counters.
    """
    if n_paths < 1:
        raise ValidationError(f"need at least one path, got {n_paths}")
    if rule.scenario_kind != sampler.kind:
        raise ScenarioMismatchError(
            f"rule consumes {rule.scenario_kind!r} scenarios, sampler draws {sampler.kind!r}"
        )
    if sampler.n != inv.n:
        raise DimensionMismatchError(
            f"sampler draws {sampler.n} participants, investments have {inv.n}"
        )
    seed = resolve_seed(seed, sampler)
    n = inv.n
    amounts = np.asarray(inv.amounts)
    active = inv.mode is Mode.ACTIVE
    fund = inv.total if active else inv.participant_total

    sizes = [chunk_size] * (n_paths // chunk_size)
    if n_paths % chunk_size:
        sizes.append(n_paths % chunk_size)

    def eval_chunk(c: int):
        rng = chunk_rng(seed, c)
        shares = rule.shares_matrix(sampler.sample(rng, sizes[c]))
        if active:
            payouts = fund * shares
        else:
            payouts = np.empty_like(shares)
            payouts[:, :n] = fund * shares[:, :n] + amounts[:n] * shares[:, [n]]
            payouts[:, n] = 0.0
        admin_all = int((shares[:, n] > 0.0).sum())
        alloc_bad = excl_bad = 0
        if audit:
            paid = payouts.sum(axis=1) if active else payouts[:, :n].sum(axis=1)
            alloc_bad = int((np.abs(paid - fund) > ALLOCATION_REL_TOL * fund).sum())
            excl_bad = int(((shares[:, n] > 0.0) & (shares[:, :n].sum(axis=1) > 0.0)).sum())
        return payouts.sum(axis=0), (payouts * payouts).sum(axis=0), admin_all, alloc_bad, excl_bad

    if n_workers <= 1 or len(sizes) <= 1:
        partials = [eval_chunk(c) for c in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            partials = list(pool.map(eval_chunk, range(len(sizes))))

    sums = np.array([math.fsum(p[0][a] for p in partials) for a in range(n + 1)])
    sumsq = np.array([math.fsum(p[1][a] for p in partials) for a in range(n + 1)])
    means = sums / n_paths
    if n_paths > 1:
        variance = np.maximum(sumsq - n_paths * means * means, 0.0) / (n_paths - 1)
    else:
        variance = np.zeros(n + 1)
    return PathStats(
        mean_payouts=tuple(means),
        std_payouts=tuple(np.sqrt(variance)),
        admin_takes_all=sum(p[2] for p in partials),
        n_paths=n_paths,
        seed=seed,
        allocation_violations=sum(p[3] for p in partials),
        exclusivity_violations=sum(p[4] for p in partials),
        audit_enabled=audit,
        chunk_size=chunk_size,
        generator=GENERATOR_NAME,
    )


def centralized_benchmark(pi: float, p: float, indicators) -> np.ndarray | float:
    """Payout of individually bought coverage at the pure premium.

    A person paying premium ``pi`` for an event with probability ``p``
    receives ``(pi / p) * I``, an actuarially fair payout by construction.

    Args:
        indicators: scalar or array of 0/1 event indicators.

    Raises:
        DegenerateProbabilityError: ``p`` is zero (no finite pure-premium payout).
    """
    p = float(p)
    if not 0.0 < p <= 1.0:
        raise DegenerateProbabilityError(f"event probability must lie in (0, 1], got {p!r}")
    ind = np.asarray(indicators, dtype=float)
    out = (float(pi) / p) * ind
    return float(out) if out.ndim == 0 else out


def convergence_experiment(
    p: float,
    investment: float,
    pool_sizes: Sequence[int],
    n_paths: int,
    seed: int,
    mode: Mode = Mode.ACTIVE,
    *,
    chunk_size: int = CONVERGENCE_CHUNK,
) -> list[ConvergenceRow]:
    """Gap between a fair homogeneous pool and centralized coverage, per pool size.

    For each size ``n`` the fair uniform-units scheme is built analytically
    (equal participant investments; active administrator stake
    ``n * investment * q^n / (1 - q^n)``, zero in passive mode) and simulated
    by drawing participant 1's indicator and the claimant count among the
    other ``n - 1`` participants, an exact reduction in the i.i.d. setting.
    Each row reports the estimated ``E|W_1(n) - (investment / p) * I_1|``.

    Args:
        p: common event probability, strictly inside (0, 1).
        investment: common participant investment, positive.
        pool_sizes: strictly increasing positive pool sizes.

    Raises:
        DegenerateProbabilityError: ``p`` is 0 or 1.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DegenerateProbabilityError(f"event probability must lie strictly in (0, 1), got {p!r}")
    investment = float(investment)
    if investment <= 0.0:
        raise ValidationError(f"investment must be positive, got {investment!r}")
    sizes = [int(n) for n in pool_sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])) or sizes[0] < 1:
        raise ValidationError("pool_sizes must be strictly increasing positive integers")
    if n_paths < 2:
        raise ValidationError("need at least two paths per pool size")

    q = 1.0 - p
    benchmark = investment / p
    rows: list[ConvergenceRow] = []
    for k, n in enumerate(sizes):
        qn = q**n
        if mode is Mode.ACTIVE:
            fund = n * investment / (1.0 - qn)  # participants' total plus fair admin stake
            admin_exact = fund * qn
        else:
            fund = n * investment
            admin_exact = 0.0

        gap_sums: list[float] = []
        gap_sumsqs: list[float] = []
        admin_sums: list[float] = []
        done = 0
        c = 0
        while done < n_paths:
            m = min(chunk_size, n_paths - done)
            rng = chunk_rng(seed, k, c)
            i1 = rng.random(m) < p
            others = rng.binomial(n - 1, p, m) if n > 1 else np.zeros(m, dtype=np.int64)
            claimants = i1 + others
            w1 = np.where(i1, fund / np.maximum(claimants, 1), 0.0)
            nobody = claimants == 0
            if mode is Mode.ACTIVE:
                admin = np.where(nobody, fund, 0.0)
            else:
                admin = np.zeros(m)
                w1 = w1 + np.where(nobody, investment, 0.0)  # refund branch
            gap = np.abs(w1 - benchmark * i1)
            gap_sums.append(gap.sum())
            gap_sumsqs.append((gap * gap).sum())
            admin_sums.append(admin.sum())
            done += m
            c += 1

        gap_mean = math.fsum(gap_sums) / n_paths
        var = max(math.fsum(gap_sumsqs) - n_paths * gap_mean * gap_mean, 0.0) / (n_paths - 1)
        rows.append(
            ConvergenceRow(
                n=n,
                mean_abs_gap=gap_mean,
                stderr=math.sqrt(var / n_paths),
                admin_mean=math.fsum(admin_sums) / n_paths,
                admin_mean_exact=admin_exact,
                n_paths=n_paths,
                seed=seed,
            )
        )
    return rows


def compare_active_passive(
    inv_active: InvestmentVector,
    rule: Rule,
    model: BernoulliModel | None = None,
    *,
    method: Literal["auto", "enumeration", "monte_carlo"] = "auto",
    sampler: ScenarioSampler | None = None,
    n_samples: int = 1_000_000,
    seed: int | None = None,
    tolerance: float = 1e-9,
) -> ComparisonReport:
    """Expected payouts of each participant under both administrator modes.

    The passive column reuses the same participant investments with a zero
    administrator stake. Per participant the two columns differ by exactly
    ``pi_admin * E[P_i] - pi_i * E[P_admin]``, which vanishes (the columns
    coincide) whenever the active scheme is fair.

    Args:
        method: ``enumeration`` (default for indicator rules with at most 25
            participants and a model), or ``monte_carlo`` (needs a sampler or
            a model to build one, plus a seed).
        tolerance: relative coincidence threshold, scaled by the active total.
    """
    if inv_active.mode is not Mode.ACTIVE:
        raise ValidationError("the comparison starts from an active-mode investment vector")
    expectations = _comparison_expectations(
        inv_active, rule, model, method, sampler, n_samples, seed
    )
    total = inv_active.total
    pooled = inv_active.participant_total
    admin_mean = expectations.admin_mean
    rows = []
    for i, (a, m) in enumerate(zip(inv_active.participants, expectations.participant_means)):
        exp_active = total * m
        exp_passive = pooled * m + a * admin_mean
        rows.append(ComparisonRow(i, a, exp_active, exp_passive, exp_active - exp_passive))
    abs_tol = tolerance * total
    return ComparisonReport(
        rows=tuple(rows),
        coincide=all(abs(r.difference) <= abs_tol for r in rows),
        method=expectations.method,  # type: ignore[arg-type]
        expectations=expectations,
        tolerance=abs_tol,
    )


def _comparison_expectations(inv, rule, model, method, sampler, n_samples, seed):
    if method == "auto":
        exact_ok = (
            rule.scenario_kind == "indicator"
            and model is not None
            and model.n <= MAX_ENUMERATION_PARTICIPANTS
        )
        method = "enumeration" if exact_ok else "monte_carlo"
    if method == "enumeration":
        if model is None:
            raise ValidationError("enumeration needs a probability model")
        return expected_shares_enumeration(rule, model)
    if sampler is None:
        if model is None:
            raise ValidationError("Monte Carlo needs a sampler or a model to build one")
        sampler = BernoulliSampler(model)
    return expected_shares_monte_carlo(rule, sampler, n_samples, seed)
