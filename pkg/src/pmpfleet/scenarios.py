"""Policy scenarios on a calibrated fleet: catch-limit changes, input
price changes, robustness sweeps, and out-of-year prediction.

A scenario scales each target's catch limit by a percentage relative to
the base year and may adjust input prices by per-category factors.  The
report compares every record's simulated catch with its base-year value,
since calibration reproduces the base year this is the policy effect.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from .calibration import calibrate_fleet, verify_calibration
from .equilibrium import EquilibriumSolution, solve_equilibrium
from .errors import PmpFleetError
from .types import FleetModel, GlobalAssumptions, VesselTargetRecord
from .validation import require

__all__ = [
    "PolicyScenario",
    "ScenarioReport",
    "SWEEP_TABLE_DTYPES",
    "SweepResult",
    "YearComparison",
    "scaled_acls",
    "run_policy",
    "sensitivity_sweep",
    "predict_observed_year",
]

# Calibration-quality gates reused wherever a fitted model must prove it
# reproduces its base year before being trusted for simulation.
VERIFY_INPUT_TOL_PCT = 1e-8
VERIFY_OUTPUT_TOL_PCT = 1e-6
VERIFY_FOC_TOL = 1e-10


@dataclass(frozen=True)
class PolicyScenario:
    """A named what-if: percent catch-limit changes, optional price factors.

    ``acl_changes_pct`` maps targets to percent changes relative to the
    base year (``-19.0`` cuts the limit by 19%); omitted targets keep
    their base limit.  ``price_factors`` maps input categories to
    multiplicative price changes (``{"fuel": 1.25}`` raises fuel prices
    25%); omitted categories keep base prices.
    """

    name: str
    acl_changes_pct: Mapping[str, float] = field(default_factory=dict)
    price_factors: Mapping[str, float] | None = None

    def __post_init__(self) -> None:
        require(isinstance(self.name, str) and self.name.strip(), "scenario name must be non-empty")
        object.__setattr__(self, "acl_changes_pct", dict(self.acl_changes_pct))
        for t, pct in self.acl_changes_pct.items():
            require(np.isfinite(pct), f"catch-limit change for {t!r} must be finite")
            require(pct > -100.0, f"catch-limit change for {t!r} must keep the limit positive, got {pct}%")
        if self.price_factors is not None:
            object.__setattr__(self, "price_factors", dict(self.price_factors))
            for i, f in self.price_factors.items():
                require(np.isfinite(f) and f > 0.0, f"price factor for {i!r} must be positive, got {f}")


def scaled_acls(model: FleetModel, scenario: PolicyScenario) -> dict[str, float]:
    """Catch limits in pounds implied by the scenario's percent changes."""
    unknown = sorted(set(scenario.acl_changes_pct) - set(model.targets))
    require(not unknown, f"scenario changes catch limits of unknown targets: {unknown}")
    out = {}
    for t in model.targets:
        pct = scenario.acl_changes_pct.get(t, 0.0)
        out[t] = model.base_acl[t] * (1.0 + pct / 100.0)
    return out


@dataclass(frozen=True, eq=False)
class ScenarioReport:
    """Outcome of one policy run.

    ``vessels``: one row per record with base vs simulated catch, percent
    change, spending and profit.  ``targets``: one row per target with the
    limit, the equilibrium multiplier and aggregate catch.  ``summary``:
    distribution of vessel-level percent catch changes per target plus a
    pooled ``(all)`` row.
    """

    scenario: PolicyScenario
    vessels: pd.DataFrame
    targets: pd.DataFrame
    summary: pd.DataFrame
    #: The raw equilibrium behind the tables; not persisted, so a report
    #: loaded from disk carries None here.  Equality covers the scenario
    #: and the three tables only.
    solution: EquilibriumSolution | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScenarioReport):
            return NotImplemented
        return (
            self.scenario == other.scenario
            and self.vessels.equals(other.vessels)
            and self.targets.equals(other.targets)
            and self.summary.equals(other.summary)
        )


def _change_pct(new: float | np.ndarray, base: float | np.ndarray) -> float | np.ndarray:
    return (np.asarray(new) / np.asarray(base) - 1.0) * 100.0


def _distribution_rows(vessels: pd.DataFrame) -> pd.DataFrame:
    def describe(label: str, values: pd.Series) -> dict:
        v = values.to_numpy(dtype=float)
        return {
            "target": label,
            "n": int(v.size),
            "mean_pct": float(np.mean(v)),
            "sd_pct": float(np.std(v, ddof=1)) if v.size > 1 else 0.0,
            "min_pct": float(np.min(v)),
            "p25_pct": float(np.percentile(v, 25)),
            "median_pct": float(np.median(v)),
            "p75_pct": float(np.percentile(v, 75)),
            "max_pct": float(np.max(v)),
        }

    rows = [describe(t, g["change_pct"]) for t, g in vessels.groupby("target", sort=False)]
    rows.append(describe("(all)", vessels["change_pct"]))
    return pd.DataFrame(rows)


def run_policy(model: FleetModel, scenario: PolicyScenario) -> ScenarioReport:
    """Solve the fleet under a scenario and tabulate vessel-level effects."""
    acls = scaled_acls(model, scenario)
    solution = solve_equilibrium(model, acls, scenario.price_factors)
    factors = solution.input_price_factors

    rows = []
    for r in model.records:
        alloc = solution.allocations[r.key]
        rows.append(
            {
                "vessel_id": r.vessel_id,
                "target": r.target,
                "base_catch_lb": r.catch_lb,
                "catch_lb": alloc.output,
                "change_pct": float(_change_pct(alloc.output, r.catch_lb)),
                "base_expenditure": r.expenditure,
                "expenditure": float((r.prices * factors) @ alloc.input_levels),
                "profit": alloc.profit,
            }
        )
    vessels = pd.DataFrame(rows)

    trows = []
    for t in model.targets:
        base_total = model.base_acl[t]
        trows.append(
            {
                "target": t,
                "base_acl_lb": base_total,
                "acl_lb": solution.acls[t],
                "multiplier": solution.multipliers[t],
                "catch_lb": solution.aggregates[t],
                "binding": solution.binding[t],
                "change_pct": float(_change_pct(solution.aggregates[t], base_total)),
            }
        )
    return ScenarioReport(
        scenario=scenario,
        vessels=vessels,
        targets=pd.DataFrame(trows),
        summary=_distribution_rows(vessels),
        solution=solution,
    )


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Grid of calibration + policy outcomes across elasticity assumptions.

    ``table`` has one row per (eta, sigma, target); ``failures`` maps grid
    cells that could not be calibrated, verified or solved to the reason.
    """

    table: pd.DataFrame
    failures: dict[tuple[float, float], str]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SweepResult):
            return NotImplemented
        return self.table.equals(other.table) and self.failures == other.failures

    @property
    def ok(self) -> bool:
        return not self.failures


#: Column schema of :attr:`SweepResult.table`; also applied when the
#: table is re-read from disk so empty sweeps round-trip with dtypes.
SWEEP_TABLE_DTYPES: dict[str, str] = {
    "eta": "float64",
    "sigma": "float64",
    "delta": "float64",
    "rho": "float64",
    "target": "object",
    "shadow_value": "float64",
    "acl_lb": "float64",
    "multiplier": "float64",
    "catch_lb": "float64",
    "aggregate_change_pct": "float64",
    "mean_vessel_change_pct": "float64",
    "max_input_error_pct": "float64",
    "max_foc_residual": "float64",
}


def sensitivity_sweep(
    records: Iterable[VesselTargetRecord],
    scenario: PolicyScenario,
    eta_grid: Sequence[float],
    sigma_grid: Sequence[float],
) -> SweepResult:
    """Re-calibrate and re-run a scenario across an elasticity grid.

    Every cell must pass the base-year reproduction gates before its
    policy outcome is recorded; cells that fail land in ``failures``
    instead of crashing the sweep.
    """
    recs = tuple(records)
    require(len(eta_grid) > 0 and len(sigma_grid) > 0, "elasticity grids must be non-empty")
    rows = []
    failures: dict[tuple[float, float], str] = {}
    for eta in eta_grid:
        for sigma in sigma_grid:
            cell = (float(eta), float(sigma))
            try:
                assumptions = GlobalAssumptions(eta=eta, sigma=sigma)
                model = calibrate_fleet(recs, assumptions)
                check = verify_calibration(model)
                problems = []
                if check.max_input_error_pct > VERIFY_INPUT_TOL_PCT:
                    problems.append(f"input reproduction error {check.max_input_error_pct:.3e}%")
                if check.max_output_error_pct > VERIFY_OUTPUT_TOL_PCT:
                    problems.append(f"output reproduction error {check.max_output_error_pct:.3e}%")
                if check.max_foc_residual > VERIFY_FOC_TOL:
                    problems.append(f"first-order residual {check.max_foc_residual:.3e}")
                if problems:
                    failures[cell] = "; ".join(problems)
                    continue
                report = run_policy(model, scenario)
            except PmpFleetError as exc:
                failures[cell] = str(exc)
                continue
            for trow in report.targets.itertuples(index=False):
                mean_pct = float(
                    report.vessels.loc[report.vessels["target"] == trow.target, "change_pct"].mean()
                )
                rows.append(
                    {
                        "eta": cell[0],
                        "sigma": cell[1],
                        "delta": assumptions.delta,
                        "rho": assumptions.rho,
                        "target": trow.target,
                        "shadow_value": model.shadow_values[trow.target],
                        "acl_lb": trow.acl_lb,
                        "multiplier": trow.multiplier,
                        "catch_lb": trow.catch_lb,
                        "aggregate_change_pct": trow.change_pct,
                        "mean_vessel_change_pct": mean_pct,
                        "max_input_error_pct": check.max_input_error_pct,
                        "max_foc_residual": check.max_foc_residual,
                    }
                )
    table = pd.DataFrame(rows, columns=list(SWEEP_TABLE_DTYPES)).astype(SWEEP_TABLE_DTYPES)
    return SweepResult(table=table, failures=failures)


@dataclass(frozen=True, eq=False)
class YearComparison:
    """Model predictions lined up against another year's observations.

    ``table`` has one row per vessel/target present in both the model and
    the observed year: observed vs predicted catch, then observed vs
    predicted spending per input category (columns ``observed_<input>``
    and ``predicted_<input>``).
    """

    table: pd.DataFrame
    acls: dict[str, float]
    n_matched: int
    n_observed_only: int
    n_model_only: int


def predict_observed_year(
    model: FleetModel,
    observed: Iterable[VesselTargetRecord],
    price_factors: Mapping[str, float] | Sequence[float] | None = None,
) -> YearComparison:
    """Simulate a later year and pair predictions with its observations.

    The simulation holds the calibrated technology fixed, restricts the
    fleet to vessel/target pairs active in both years, sets each target's
    catch limit to the observed total of those pairs, optionally adjusts
    input prices, and solves.  Pairs only present in one of the two years
    are counted but excluded.
    """
    obs = {r.key: r for r in observed}
    require(obs, "no observed records")
    matched = [r for r in model.records if r.key in obs]
    require(
        matched,
        "no overlap between the calibrated fleet and the observed year; cannot evaluate",
    )
    targets: dict[str, None] = {}
    for r in matched:
        targets.setdefault(r.target, None)
    acls = {
        t: float(np.sum([obs[r.key].catch_lb for r in matched if r.target == t])) for t in targets
    }
    sub = FleetModel(
        assumptions=model.assumptions,
        records=tuple(matched),
        params={r.key: model.params_for(r) for r in matched},
        shadow_values={t: model.shadow_values[t] for t in targets},
        base_acl={t: float(np.sum([r.catch_lb for r in matched if r.target == t])) for t in targets},
    )
    solution = solve_equilibrium(sub, acls, price_factors)
    factors = solution.input_price_factors

    rows = []
    for r in matched:
        o = obs[r.key]
        alloc = solution.allocations[r.key]
        row = {
            "vessel_id": r.vessel_id,
            "target": r.target,
            "observed_catch_lb": o.catch_lb,
            "predicted_catch_lb": alloc.output,
        }
        pred_spend = alloc.input_levels * (r.prices * factors)
        obs_spend = o.input_levels * o.prices
        for j, input_id in enumerate(model.input_ids):
            row[f"observed_{input_id}"] = float(obs_spend[j])
            row[f"predicted_{input_id}"] = float(pred_spend[j])
        rows.append(row)
    return YearComparison(
        table=pd.DataFrame(rows),
        acls=acls,
        n_matched=len(matched),
        n_observed_only=len(obs) - len(matched),
        n_model_only=len(model.records) - len(matched),
    )
