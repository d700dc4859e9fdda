"""Batch command-line pipeline: generate → calibrate → simulate → evaluate.

Subcommands hand off through files (dataset → model → report tables) so
each stage is independently runnable and scriptable.  Exit codes: 0 on
success, 1 for validation/usage problems, 2 when the equilibrium solver
fails to converge.  All outputs are written atomically; input files are
never modified.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from .calibration import calibrate_fleet, verify_calibration
from .data_io import (
    DEFAULT_PARTICIPATION,
    generate_synthetic_fleet,
    load_cost_index,
    load_fleet,
    load_model,
    save_model,
    save_results,
    write_fleet,
    zero_profit_rescale,
    _atomic_write_text,
)
from .errors import PmpFleetError, SolverError, ValidationError
from .scenarios import PolicyScenario, predict_observed_year, run_policy, sensitivity_sweep
from .stats import evaluate_predictions, wilcoxon_signed_rank
from .types import GlobalAssumptions

__all__ = ["main", "entrypoint"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; 2 is reserved for solver
    # failures here, so usage problems are rerouted to exit code 1.
    def error(self, message):
        raise _UsageError(message)


def _add_assumption_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eta", type=float, default=0.5, help="supply elasticity (default 0.5)")
    p.add_argument(
        "--sigma", type=float, default=0.17, help="input substitution elasticity (default 0.17)"
    )
    p.add_argument(
        "--no-zero-profit-rescale",
        action="store_true",
        help="keep loss-making records as observed instead of rescaling them to zero profit",
    )


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--target",
        action="append",
        default=None,
        metavar="TARGET",
        help="target whose catch limit changes (repeat with matching --delta)",
    )
    p.add_argument(
        "--delta",
        action="append",
        type=float,
        default=None,
        metavar="PCT",
        help="percent catch-limit change for the matching --target (e.g. -10)",
    )
    p.add_argument(
        "--price-factor",
        action="append",
        default=None,
        metavar="INPUT=FACTOR",
        help="multiplicative input price change, e.g. fuel=1.25 (repeatable)",
    )
    p.add_argument("--name", default=None, help="scenario name (default derived from the changes)")


def _build_scenario(args) -> PolicyScenario:
    targets = args.target or []
    deltas = args.delta or []
    if len(targets) != len(deltas):
        raise ValidationError(
            f"--target and --delta must be paired; got {len(targets)} target(s) and {len(deltas)} delta(s)"
        )
    changes = {}
    for t, d in zip(targets, deltas):
        if t in changes:
            raise ValidationError(f"target {t!r} listed twice")
        changes[t] = d
    factors = None
    if args.price_factor:
        factors = {}
        for item in args.price_factor:
            name, sep, value = item.partition("=")
            if not sep:
                raise ValidationError(f"--price-factor expects INPUT=FACTOR, got {item!r}")
            try:
                factors[name] = float(value)
            except ValueError as exc:
                raise ValidationError(f"--price-factor {item!r}: {exc}") from exc
    name = args.name
    if name is None:
        parts = [f"{t}{d:+g}%" for t, d in changes.items()]
        if factors:
            parts += [f"{i}x{f:g}" for i, f in factors.items()]
        name = "acl " + ", ".join(parts) if parts else "baseline"
    return PolicyScenario(name=name, acl_changes_pct=changes, price_factors=factors)


def _load_records(args) -> list:
    records = load_fleet(args.data)
    if not args.no_zero_profit_rescale:
        records = [zero_profit_rescale(r) for r in records]
    return records


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_data(args) -> int:
    frame = generate_synthetic_fleet(args.seed, args.vessels)
    metadata = {
        "base_year": args.base_year,
        "eta": 0.5,
        "sigma": 0.17,
        "seed": args.seed,
        "n_vessels": args.vessels,
        "participation": DEFAULT_PARTICIPATION,
        "distributions": {
            "input_expenditures": "log-normal, per-target reference-fleet moments",
            "price_premium": "truncated normal(0.6, 0.35) on [-1, 2]",
            "price_bycatch": "log-normal(mean 0.7, sd 0.3)",
            "catch": "revenue multiple of expenditure, ~95% profitable",
        },
    }
    write_fleet(frame, args.out, metadata)
    print(f"wrote {len(frame)} records for {args.vessels} vessel(s) to {args.out}")
    return 0


def cmd_calibrate(args) -> int:
    records = _load_records(args)
    assumptions = GlobalAssumptions(eta=args.eta, sigma=args.sigma)
    print(
        f"assumptions: eta={assumptions.eta:g} -> delta={assumptions.delta:.12g}, "
        f"sigma={assumptions.sigma:g} -> rho={assumptions.rho:.12g}"
    )
    model = calibrate_fleet(records, assumptions)
    report = verify_calibration(model)
    save_model(model, args.out_model)
    print(f"wrote model to {args.out_model}")
    if args.report:
        save_results(report, args.report, args.format)
        print(f"wrote calibration report to {args.report}")
    for line in report.summary_lines():
        print(line)
    return 0


def cmd_policy(args) -> int:
    model = load_model(args.model)
    scenario = _build_scenario(args)
    report = run_policy(model, scenario)
    save_results(report, args.out, args.format)
    print(f"scenario {scenario.name!r}: wrote report to {args.out}")
    for row in report.targets.itertuples(index=False):
        state = "binding" if row.binding else "slack"
        print(
            f"{row.target}: limit {row.acl_lb:,.0f} lb, catch {row.catch_lb:,.0f} lb "
            f"({row.change_pct:+.3f}% vs base), multiplier {row.multiplier:.4f} $/lb [{state}]"
        )
    return 0


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    observed = load_fleet(args.observed)
    factors = None
    if args.cost_index:
        factors = load_cost_index(args.cost_index).factors_for(args.year, model.input_ids)
    comparison = predict_observed_year(model, observed, factors)
    table = comparison.table.copy()
    table.insert(0, "year", args.year)

    def _targets_plus_all():
        seen = dict.fromkeys(table["target"])
        yield from seen
        yield "(all)"

    eval_rows, wil_rows = [], []
    for t in _targets_plus_all():
        sub = table if t == "(all)" else table[table["target"] == t]
        obs_c = sub["observed_catch_lb"].to_numpy()
        pred_c = sub["predicted_catch_lb"].to_numpy()
        try:
            res = evaluate_predictions(pred_c, obs_c)
            eval_rows.append(
                {"year": args.year, "target": t, "n": res.n, "r": res.r, "r_squared": res.r_squared}
            )
        except ValidationError:
            eval_rows.append(
                {"year": args.year, "target": t, "n": len(sub), "r": np.nan, "r_squared": np.nan}
            )
        quantities = [("catch_lb", obs_c, pred_c)] + [
            (i, sub[f"observed_{i}"].to_numpy(), sub[f"predicted_{i}"].to_numpy())
            for i in model.input_ids
        ]
        for qname, obs_q, pred_q in quantities:
            base = {"year": args.year, "target": t, "quantity": qname}
            try:
                w = wilcoxon_signed_rank(obs_q, pred_q)
                wil_rows.append(
                    {
                        **base,
                        "n": w.n,
                        "statistic": w.statistic,
                        "p_value": w.p_value,
                        "median_observed_minus_predicted": w.median_difference,
                        "method": w.method,
                    }
                )
            except ValidationError:
                wil_rows.append(
                    {
                        **base,
                        "n": 0,
                        "statistic": np.nan,
                        "p_value": np.nan,
                        "median_observed_minus_predicted": np.nan,
                        "method": "undefined",
                    }
                )

    out_dir = Path(args.out_dir)
    evaluation = pd.DataFrame(eval_rows)
    wilcoxon = pd.DataFrame(wil_rows)
    _atomic_write_text(out_dir / "comparison.csv", table.to_csv(index=False, lineterminator="\n"))
    _atomic_write_text(out_dir / "evaluation.csv", evaluation.to_csv(index=False, lineterminator="\n"))
    _atomic_write_text(out_dir / "wilcoxon.csv", wilcoxon.to_csv(index=False, lineterminator="\n"))
    print(
        f"year {args.year}: matched {comparison.n_matched} record(s) "
        f"({comparison.n_observed_only} observed-only, {comparison.n_model_only} model-only skipped)"
    )
    for row in evaluation.itertuples(index=False):
        print(f"{row.target}: n={row.n} r={row.r:.4f} r^2={row.r_squared:.4f}")
    print(f"wrote comparison/evaluation/wilcoxon tables to {out_dir}")
    return 0


def cmd_sensitivity(args) -> int:
    records = _load_records(args)
    scenario = _build_scenario(args)
    result = sensitivity_sweep(records, scenario, args.eta_grid, args.sigma_grid)
    save_results(result, args.out, args.format)
    n_cells = len(args.eta_grid) * len(args.sigma_grid)
    print(
        f"sweep {scenario.name!r}: {n_cells - len(result.failures)}/{n_cells} cells ok; "
        f"wrote table to {args.out}"
    )
    for (eta, sigma), reason in sorted(result.failures.items()):
        print(f"cell eta={eta:g} sigma={sigma:g} failed: {reason}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------


def _grid(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("grid must contain at least one value")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pmpfleet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a deterministic synthetic fleet dataset")
    p.add_argument("--seed", type=int, required=True, help="random seed (identical seed, identical file)")
    p.add_argument("--vessels", type=int, default=128, help="number of vessels (default 128)")
    p.add_argument("--base-year", type=int, default=2012, help="base-year label for metadata")
    p.add_argument("--out", default="fleet.csv", help="output dataset path")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("calibrate", help="calibrate a fleet model from a base-year dataset")
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--out-model", required=True, help="output model file (JSON)")
    p.add_argument("--report", default=None, help="optional calibration-report output path")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="report format")
    _add_assumption_flags(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("policy", help="simulate catch-limit changes on a calibrated model")
    p.add_argument("--model", required=True, help="calibrated model file")
    p.add_argument("--out", required=True, help="output report path")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="report format")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_policy)

    p = sub.add_parser("evaluate", help="predict an observed year and score the predictions")
    p.add_argument("--model", required=True, help="calibrated model file")
    p.add_argument("--observed", required=True, help="observed-year dataset file")
    p.add_argument("--year", type=int, required=True, help="observed year (for cost index and labels)")
    p.add_argument("--cost-index", default=None, help="cost index JSON file (omit for no adjustment)")
    p.add_argument("--out-dir", required=True, help="directory for comparison/evaluation/wilcoxon tables")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sensitivity", help="re-run calibration and a scenario across an elasticity grid")
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--eta-grid", type=_grid, default=[0.3, 0.5, 0.8], help="comma-separated eta values")
    p.add_argument(
        "--sigma-grid", type=_grid, default=[0.05, 0.17, 0.5], help="comma-separated sigma values"
    )
    p.add_argument("--out", required=True, help="output table path")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p.add_argument(
        "--no-zero-profit-rescale",
        action="store_true",
        help="keep loss-making records as observed",
    )
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_sensitivity)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    except PmpFleetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())
