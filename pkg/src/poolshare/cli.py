"""Scenario-file-driven command line: build schemes, solve and check fairness,
simulate, and run convergence experiments.

One JSON scenario config per invocation; results land in ``<out>/report.json``
(full metadata, deterministic apart from the timestamp) and ``<out>/table.csv``.

Commands: ``expect``, ``solve-fair``, ``check-fair``, ``simulate``,
``converge``, ``compare``. Exit codes: 0 ok/fair, 1 unfair, 2 config error,
3 computation error, 4 solver failure.

Numeric config values accept exact fractions as strings (``"1/6"``) anywhere a
number is expected. Unknown config keys are rejected. The ``POOLSHARE_LOG``
environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import subprocess
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import __version__
from .core import InvestmentVector, Mode
from .errors import (
    AnchorInfeasibleError,
    ConfigError,
    DegenerateProbabilityError,
    NoConvergenceError,
    PoolShareError,
)
from .expectation import (
    BernoulliModel,
    BernoulliSampler,
    ConstantSampler,
    ExpectationReport,
    GENERATOR_NAME,
    IndependentLossSampler,
    MAX_ENUMERATION_PARTICIPANTS,
    MONTE_CARLO_CHUNK,
    ScenarioSampler,
    expected_shares_enumeration,
    expected_shares_monte_carlo,
    uniform_tontine_expectations,
)
from .fairness import (
    Anchor,
    AnchorKind,
    FairnessReport,
    SolverSettings,
    check_fair_active,
    check_fair_passive,
    solve_fair_fixed_point,
    solve_fair_linear,
    two_participant_expectations,
)
from .rules import (
    CustomRule,
    OrderStatisticRule,
    ProportionalRule,
    Rule,
    TontineRule,
    TwoParticipantBetaRule,
    UnitStrategy,
    resolve_units,
)
from .simulate import (
    CONVERGENCE_CHUNK,
    compare_active_passive,
    convergence_experiment,
    simulate_payouts,
)

logger = logging.getLogger(__name__)

FAIRNESS_CSV_HEADER = ["agent", "investment", "expected_share", "expected_payout", "residual"]
CONVERGENCE_CSV_HEADER = ["n", "mean_abs_gap", "stderr", "admin_mean"]

_STRATEGY_NAMES = {
    "uniform": UnitStrategy.DENUIT_ROBERT,
    "denuit_robert": UnitStrategy.DENUIT_ROBERT,
    "tavin": UnitStrategy.TAVIN,
    "dhaene_milevsky": UnitStrategy.DHAENE_MILEVSKY,
    "inverse_probability": UnitStrategy.INVERSE_PROBABILITY,
}

_ANCHOR_NAMES = {
    "total_all": AnchorKind.TOTAL_ALL,
    "participants_total": AnchorKind.PARTICIPANTS_TOTAL,
    "admin_investment": AnchorKind.ADMIN_INVESTMENT,
    "first_participant": AnchorKind.FIRST_PARTICIPANT,
}


# --- config parsing -----------------------------------------------------------


def _num(value: Any, where: str) -> float:
    """Parse a config number; strings go through Fraction for exact rationals."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{where}: cannot parse number {value!r}") from exc
    raise ConfigError(f"{where}: expected a number, got {type(value).__name__}")


def _num_list(value: Any, where: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where}: expected a non-empty list of numbers")
    return [_num(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer")
    return value


def _section(value: Any, where: str, allowed: set[str], required: set[str] = frozenset()) -> dict:
    if not isinstance(value, Mapping):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(value) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}")
    missing = required - set(value)
    if missing:
        raise ConfigError(f"{where}: missing required keys {sorted(missing)}")
    return dict(value)


_RUN_KEYS = {
    "n_samples", "n_paths", "pool_sizes", "tolerance", "seed", "method",
    "p", "investment", "solver_tolerance", "max_iterations", "damping",
}


@dataclasses.dataclass
class ScenarioConfig:
    """Parsed scenario file: mode, rule spec, model/sampler, investments, anchor, run."""

    mode: Mode
    rule_spec: dict | None
    model: BernoulliModel | None
    sampler: ScenarioSampler | None
    investments: list[float] | None
    anchor: Anchor | None
    n_samples: int
    n_paths: int
    pool_sizes: list[int]
    tolerance: float
    seed: int | None
    method: str
    p: float | None
    investment: float | None
    solver: SolverSettings


def load_config(path: str | Path) -> ScenarioConfig:
    """Load and schema-validate a scenario JSON file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: Any) -> ScenarioConfig:
    top = _section(raw, "config", {"mode", "rule", "model", "investments", "anchor", "run"})

    mode_name = top.get("mode", "active")
    if mode_name not in ("active", "passive"):
        raise ConfigError(f"mode: expected 'active' or 'passive', got {mode_name!r}")
    mode = Mode(mode_name)

    rule_spec = _parse_rule_spec(top.get("rule"))
    model, sampler = _parse_model(top.get("model"))

    investments = None
    if "investments" in top:
        investments = _num_list(top["investments"], "investments")

    anchor = None
    if "anchor" in top:
        a = _section(top["anchor"], "anchor", {"kind", "value"}, {"kind", "value"})
        kind = _ANCHOR_NAMES.get(a["kind"])
        if kind is None:
            raise ConfigError(f"anchor.kind: unknown kind {a['kind']!r}; allowed: {sorted(_ANCHOR_NAMES)}")
        try:
            anchor = Anchor(kind, _num(a["value"], "anchor.value"))
        except PoolShareError as exc:
            raise ConfigError(f"anchor: {exc}") from exc

    run = _section(top.get("run", {}), "run", _RUN_KEYS)
    pool_sizes = [
        _int(v, f"run.pool_sizes[{i}]") for i, v in enumerate(run.get("pool_sizes", []))
    ]
    try:
        solver = SolverSettings(
            tolerance=_num(run.get("solver_tolerance", 1e-10), "run.solver_tolerance"),
            max_iterations=_int(run.get("max_iterations", 10_000), "run.max_iterations"),
            damping=_num(run.get("damping", 0.5), "run.damping"),
        )
    except PoolShareError as exc:
        raise ConfigError(f"run: {exc}") from exc

    return ScenarioConfig(
        mode=mode,
        rule_spec=rule_spec,
        model=model,
        sampler=sampler,
        investments=investments,
        anchor=anchor,
        n_samples=_int(run.get("n_samples", 1_000_000), "run.n_samples"),
        n_paths=_int(run.get("n_paths", 100_000), "run.n_paths"),
        pool_sizes=pool_sizes,
        tolerance=_num(run.get("tolerance", 1e-9), "run.tolerance"),
        seed=_int(run["seed"], "run.seed") if "seed" in run else None,
        method=str(run.get("method", "auto")),
        p=_num(run["p"], "run.p") if "p" in run else None,
        investment=_num(run["investment"], "run.investment") if "investment" in run else None,
        solver=solver,
    )


def _parse_rule_spec(raw: Any) -> dict | None:
    if raw is None:
        return None
    spec = _section(
        raw, "rule", {"kind", "strategy", "units", "beta", "scenario", "table"}, {"kind"}
    )
    kind = spec["kind"]
    if kind in ("proportional", "order_statistic"):
        extra = set(spec) - {"kind"}
        if extra:
            raise ConfigError(f"rule: {kind!r} takes no parameters, got {sorted(extra)}")
        return {"kind": kind}
    if kind == "tontine":
        given = [k for k in ("strategy", "units", "beta") if k in spec]
        if len(given) != 1:
            raise ConfigError("rule: a tontine needs exactly one of 'strategy', 'units', 'beta'")
        out: dict[str, Any] = {"kind": "tontine"}
        if "strategy" in spec:
            strategy = _STRATEGY_NAMES.get(spec["strategy"])
            if strategy is None:
                raise ConfigError(
                    f"rule.strategy: unknown strategy {spec['strategy']!r}; "
                    f"allowed: {sorted(_STRATEGY_NAMES)}"
                )
            out["strategy"] = strategy
        elif "units" in spec:
            out["units"] = _num_list(spec["units"], "rule.units")
        else:
            out["beta"] = _num(spec["beta"], "rule.beta")
        return out
    if kind == "custom_table":
        rows = spec.get("table")
        if not isinstance(rows, list) or not rows:
            raise ConfigError("rule.table: expected a non-empty list of entries")
        table: dict[tuple[int, ...], tuple[float, ...]] = {}
        for i, row in enumerate(rows):
            entry = _section(row, f"rule.table[{i}]", {"indicators", "shares"},
                             {"indicators", "shares"})
            key = tuple(_int(v, f"rule.table[{i}].indicators") for v in entry["indicators"])
            table[key] = tuple(_num_list(entry["shares"], f"rule.table[{i}].shares"))
        return {"kind": "custom_table", "table": table}
    raise ConfigError(
        f"rule.kind: unknown kind {kind!r}; allowed: proportional, order_statistic, "
        "tontine, custom_table"
    )


def _parse_model(raw: Any) -> tuple[BernoulliModel | None, ScenarioSampler | None]:
    if raw is None:
        return None, None
    head = _section(
        raw, "model",
        {"kind", "probs", "distribution", "n", "params", "zero_prob", "seed", "values", "scenario"},
        {"kind"},
    )
    kind = head["kind"]
    try:
        if kind == "bernoulli":
            probs = _num_list(head.get("probs"), "model.probs")
            model = BernoulliModel(tuple(probs))
            seed = _int(head["seed"], "model.seed") if "seed" in head else None
            return model, BernoulliSampler(model, seed=seed)
        if kind == "sampler":
            params = head.get("params", {})
            if not isinstance(params, Mapping):
                raise ConfigError("model.params: expected an object")
            sampler = IndependentLossSampler(
                distribution=str(head.get("distribution", "")),
                n=_int(head.get("n", 0), "model.n"),
                params={k: _num(v, f"model.params.{k}") for k, v in params.items()},
                zero_prob=_num(head.get("zero_prob", 0.0), "model.zero_prob"),
                seed=_int(head["seed"], "model.seed") if "seed" in head else None,
            )
            return None, sampler
        if kind == "constant":
            values = _num_list(head.get("values"), "model.values")
            scenario = head.get("scenario", "loss")
            sampler = ConstantSampler(
                values, kind=scenario,
                seed=_int(head["seed"], "model.seed") if "seed" in head else None,
            )
            return None, sampler
    except PoolShareError as exc:
        raise ConfigError(f"model: {exc}") from exc
    raise ConfigError(f"model.kind: unknown kind {kind!r}; allowed: bernoulli, sampler, constant")


# --- rule construction ----------------------------------------------------------


def _pool_size(config: ScenarioConfig) -> int:
    if config.model is not None:
        return config.model.n
    if config.sampler is not None:
        return config.sampler.n
    if config.investments is not None:
        return len(config.investments) - 1
    raise ConfigError("cannot infer the pool size: provide a model, sampler, or investments")


def _strategy_of(config: ScenarioConfig) -> UnitStrategy | None:
    if config.rule_spec and config.rule_spec.get("kind") == "tontine":
        return config.rule_spec.get("strategy")
    return None


def build_rule(config: ScenarioConfig, inv: InvestmentVector | None = None) -> Rule:
    """Construct the configured rule; investment-based units need ``inv``."""
    spec = config.rule_spec
    if spec is None:
        raise ConfigError("this command needs a 'rule' section")
    kind = spec["kind"]
    if kind == "proportional":
        return ProportionalRule()
    if kind == "order_statistic":
        return OrderStatisticRule()
    if kind == "custom_table":
        table: dict = spec["table"]

        def lookup(scenario):
            key = tuple(scenario.indicators)
            if key not in table:
                raise PoolShareError(f"custom table has no entry for scenario {key}")
            return table[key]

        return CustomRule(lookup, scenario_kind="indicator")
    # tontine
    if "beta" in spec:
        if _pool_size(config) != 2:
            raise ConfigError("rule.beta: the both-survive split needs exactly two participants")
        return TwoParticipantBetaRule(spec["beta"])
    if "units" in spec:
        return TontineRule(spec["units"])
    strategy: UnitStrategy = spec["strategy"]
    if strategy in (UnitStrategy.TAVIN, UnitStrategy.DHAENE_MILEVSKY) and inv is None:
        raise ConfigError(
            f"rule.strategy {strategy.value!r} reads the investments; provide 'investments' "
            "or use solve-fair (fixed point)"
        )
    return TontineRule(resolve_units(strategy, inv, config.model))


def _investments(config: ScenarioConfig) -> InvestmentVector:
    if config.investments is None:
        raise ConfigError("this command needs explicit 'investments'")
    try:
        return InvestmentVector(tuple(config.investments), config.mode)
    except PoolShareError as exc:
        raise ConfigError(f"investments: {exc}") from exc


# --- expectations dispatch --------------------------------------------------------


def _closed_form(config: ScenarioConfig, rule: Rule) -> ExpectationReport:
    if isinstance(rule, TwoParticipantBetaRule) and config.model is not None:
        p1, p2 = config.model.probs
        return two_participant_expectations(p1, p2, rule.beta)
    uniform = isinstance(rule, TontineRule) and len(set(rule.units[:-1])) == 1
    if uniform and config.model is not None:
        return uniform_tontine_expectations(config.model)
    raise PoolShareError(
        "closed-form expectations cover uniform-units tontines and the two-participant split rule"
    )


def compute_expectations(config: ScenarioConfig, rule: Rule, seed: int | None,
                         threads: int) -> ExpectationReport:
    method = config.method
    if method == "auto":
        exact_ok = (
            rule.scenario_kind == "indicator"
            and config.model is not None
            and config.model.n <= MAX_ENUMERATION_PARTICIPANTS
        )
        method = "enumeration" if exact_ok else "monte_carlo"
    if method == "enumeration":
        if config.model is None:
            raise ConfigError("method 'enumeration' needs a bernoulli model")
        return expected_shares_enumeration(rule, config.model)
    if method == "closed_form":
        return _closed_form(config, rule)
    if method == "monte_carlo":
        if config.sampler is None:
            raise ConfigError("method 'monte_carlo' needs a model or sampler")
        if seed is None:
            raise ConfigError("method 'monte_carlo' needs a seed (run.seed, model.seed, or --seed)")
        return expected_shares_monte_carlo(
            rule, config.sampler, config.n_samples, seed, n_workers=threads
        )
    raise ConfigError(f"run.method: unknown method {method!r}")


# --- output writing ----------------------------------------------------------------


def _build_id() -> str:
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=here, capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except OSError:
        pass
    return f"poolshare-{__version__}"


def _metadata(seed: int | None, threads: int, chunk_size: int | None) -> dict:
    return {
        "seed": seed,
        "generator": GENERATOR_NAME,
        "chunk_size": chunk_size,
        "threads": threads,
        "build": _build_id(),
    }


def write_outputs(out_dir: str | Path, report: dict,
                  table: Sequence[Mapping[str, Any]] | None = None,
                  header: Sequence[str] | None = None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = dict(report)
    payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    (out / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if table is not None:
        with (out / "table.csv").open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(header or table[0].keys()))
            writer.writeheader()
            writer.writerows(table)


def _fairness_table(inv: InvestmentVector, expectations: ExpectationReport,
                    report: FairnessReport) -> list[dict]:
    rows = []
    for i, (a, m, r) in enumerate(zip(inv.amounts, expectations.means, report.residuals)):
        # expected payout = investment minus residual, in every mode
        rows.append({
            "agent": i,
            "investment": repr(a),
            "expected_share": repr(m),
            "expected_payout": repr(a - r),
            "residual": repr(r),
        })
    return rows


def _report_dict(obj) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _report_dict(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, Mode):
        return obj.value
    if isinstance(obj, (list, tuple)):
        return [_report_dict(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _report_dict(v) for k, v in obj.items()}
    return obj


# --- commands -----------------------------------------------------------------------


def cmd_expect(config: ScenarioConfig, args) -> int:
    rule = build_rule(config, _optional_investments(config))
    seed = _effective_seed(args, config)
    expectations = compute_expectations(config, rule, seed, args.threads)
    table = [
        {"agent": i, "expected_share": repr(m),
         "stderr": repr(expectations.stderr[i]) if expectations.stderr else ""}
        for i, m in enumerate(expectations.means)
    ]
    write_outputs(args.out, {
        "command": "expect",
        "expectation": _report_dict(expectations),
        "metadata": _metadata(expectations.seed, args.threads, expectations.chunk_size),
    }, table, ["agent", "expected_share", "stderr"])
    return 0


def cmd_check_fair(config: ScenarioConfig, args) -> int:
    inv = _investments(config)
    rule = build_rule(config, inv)
    seed = _effective_seed(args, config)
    expectations = compute_expectations(config, rule, seed, args.threads)
    check = check_fair_active if config.mode is Mode.ACTIVE else check_fair_passive
    report = check(inv, expectations, tolerance=config.tolerance)
    write_outputs(args.out, {
        "command": "check-fair",
        "investments": list(inv.amounts),
        "mode": inv.mode.value,
        "fairness": _report_dict(report),
        "expectation": _report_dict(expectations),
        "metadata": _metadata(expectations.seed if expectations.seed is not None else seed,
                              args.threads, expectations.chunk_size),
    }, _fairness_table(inv, expectations, report), FAIRNESS_CSV_HEADER)
    return 0 if report.fair else 1


def cmd_solve_fair(config: ScenarioConfig, args) -> int:
    if config.anchor is None:
        raise ConfigError("solve-fair needs an 'anchor' section")
    seed = _effective_seed(args, config)
    strategy = _strategy_of(config)
    if strategy in (UnitStrategy.TAVIN, UnitStrategy.DHAENE_MILEVSKY):
        if config.model is None:
            raise ConfigError("the fixed-point solver needs a bernoulli model")
        if config.mode is not Mode.ACTIVE:
            raise ConfigError("investment-dependent rules are solved with an active administrator")
        inv = solve_fair_fixed_point(strategy, config.model, config.anchor, config.solver)
        rule = TontineRule(resolve_units(strategy, inv, config.model))
        expectations = expected_shares_enumeration(rule, config.model)
        solver_method = "fixed_point"
    else:
        rule = build_rule(config)
        expectations = compute_expectations(config, rule, seed, args.threads)
        inv = solve_fair_linear(expectations, config.anchor, config.mode)
        solver_method = "linear"
    check = check_fair_active if config.mode is Mode.ACTIVE else check_fair_passive
    verification = check(inv, expectations, tolerance=config.tolerance)
    write_outputs(args.out, {
        "command": "solve-fair",
        "solver": solver_method,
        "anchor": {"kind": config.anchor.kind.value, "value": config.anchor.value},
        "investments": list(inv.amounts),
        "mode": inv.mode.value,
        "fairness": _report_dict(verification),
        "expectation": _report_dict(expectations),
        "metadata": _metadata(seed, args.threads, expectations.chunk_size),
    }, _fairness_table(inv, expectations, verification), FAIRNESS_CSV_HEADER)
    return 0


def cmd_simulate(config: ScenarioConfig, args) -> int:
    inv = _investments(config)
    rule = build_rule(config, inv)
    if config.sampler is None:
        raise ConfigError("simulate needs a model or sampler")
    seed = _effective_seed(args, config)
    if seed is None:
        raise ConfigError("simulate needs a seed (run.seed, model.seed, or --seed)")
    stats = simulate_payouts(
        inv, rule, config.sampler, config.n_paths, seed,
        audit=not args.no_audit, n_workers=args.threads,
    )
    table = [
        {"agent": i, "mean_payout": repr(m), "std_payout": repr(s)}
        for i, (m, s) in enumerate(zip(stats.mean_payouts, stats.std_payouts))
    ]
    write_outputs(args.out, {
        "command": "simulate",
        "investments": list(inv.amounts),
        "mode": inv.mode.value,
        "stats": _report_dict(stats),
        "metadata": _metadata(stats.seed, args.threads, stats.chunk_size),
    }, table, ["agent", "mean_payout", "std_payout"])
    return 0


def cmd_converge(config: ScenarioConfig, args) -> int:
    if config.p is None or config.investment is None:
        raise ConfigError("converge needs 'run.p' and 'run.investment'")
    if not config.pool_sizes:
        raise ConfigError("converge needs 'run.pool_sizes'")
    seed = _effective_seed(args, config)
    if seed is None:
        raise ConfigError("converge needs a seed (run.seed or --seed)")
    rows = convergence_experiment(
        config.p, config.investment, config.pool_sizes, config.n_paths, seed, config.mode
    )
    table = [
        {"n": r.n, "mean_abs_gap": repr(r.mean_abs_gap), "stderr": repr(r.stderr),
         "admin_mean": repr(r.admin_mean)}
        for r in rows
    ]
    write_outputs(args.out, {
        "command": "converge",
        "mode": config.mode.value,
        "p": config.p,
        "investment": config.investment,
        "rows": [_report_dict(r) for r in rows],
        "metadata": _metadata(seed, args.threads, CONVERGENCE_CHUNK),
    }, table, CONVERGENCE_CSV_HEADER)
    return 0


def cmd_compare(config: ScenarioConfig, args) -> int:
    inv = _investments(config)
    rule = build_rule(config, inv)
    seed = _effective_seed(args, config)
    method = "auto" if config.method in ("auto", "closed_form") else config.method
    report = compare_active_passive(
        inv, rule, config.model, method=method, sampler=config.sampler,
        n_samples=config.n_samples, seed=seed, tolerance=config.tolerance,
    )
    table = [
        {"agent": r.agent, "investment": repr(r.investment),
         "expected_active": repr(r.expected_active),
         "expected_passive": repr(r.expected_passive),
         "difference": repr(r.difference)}
        for r in report.rows
    ]
    write_outputs(args.out, {
        "command": "compare",
        "investments": list(inv.amounts),
        "comparison": _report_dict(report),
        "metadata": _metadata(report.expectations.seed if report.expectations.seed is not None
                              else seed, args.threads, report.expectations.chunk_size),
    }, table, ["agent", "investment", "expected_active", "expected_passive", "difference"])
    return 0


def _optional_investments(config: ScenarioConfig) -> InvestmentVector | None:
    if config.investments is None:
        return None
    return _investments(config)


def _effective_seed(args, config: ScenarioConfig) -> int | None:
    if args.seed is not None:
        return args.seed
    if config.seed is not None:
        return config.seed
    if config.sampler is not None and config.sampler.seed is not None:
        return config.sampler.seed
    return None


_COMMANDS = {
    "expect": cmd_expect,
    "solve-fair": cmd_solve_fair,
    "check-fair": cmd_check_fair,
    "simulate": cmd_simulate,
    "converge": cmd_converge,
    "compare": cmd_compare,
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poolshare",
        description="Compensation-based risk sharing: expectations, fairness, simulation.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="scenario JSON file")
    parser.add_argument("--out", required=True, help="output directory (report.json, table.csv)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sampling")
    parser.add_argument("--no-audit", action="store_true", help="skip per-path payout audits")
    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("POOLSHARE_LOG", "").upper()
    if level_name:
        level = getattr(logging, level_name, logging.INFO)
        logging.basicConfig(level=level)
        logging.getLogger("poolshare").setLevel(level)


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    _configure_logging()
    args = _parser().parse_args(argv)
    try:
        config = load_config(args.config)
        code = _COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NoConvergenceError, DegenerateProbabilityError, AnchorInfeasibleError) as exc:
        if args.command == "solve-fair":
            diagnostics = {"command": args.command, "error": str(exc),
                           "error_type": type(exc).__name__}
            if isinstance(exc, NoConvergenceError):
                diagnostics["iterations"] = exc.iterations
                diagnostics["last_change"] = exc.last_change
                diagnostics["max_abs_residual"] = exc.max_abs_residual
            write_outputs(args.out, diagnostics)
            print(f"solver failure: {exc}", file=sys.stderr)
            return 4
        print(f"computation error: {exc}", file=sys.stderr)
        return 3
    except PoolShareError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 3
    return code


if __name__ == "__main__":
    sys.exit(main())
