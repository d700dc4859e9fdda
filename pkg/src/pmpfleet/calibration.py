"""Exact calibration of the fleet model from one base year of data.

The calibration inverts the first-order conditions of each vessel's
constrained profit maximization so that the observed year is exactly
optimal under the fitted model:

1. share weights: ``beta_j`` proportional to ``c_j * x_j**(1-rho)``
   (zero-level inputs get zero weight);
2. scale: ``alpha`` chosen so the technology reproduces observed catch at
   observed input levels;
3. per-target shadow value of the catch constraint: the least-squares
   slope, across the target's records, of ``E_i - delta*p_i*q_i`` on
   ``delta*q_i`` — equivalently the value that shrinks the catch-weighted
   unobserved per-pound residuals toward zero;
4. per-record unobserved value: the residual that makes the observed
   expenditure/catch ratio satisfy the first-order condition exactly,
   ``mu_i = E_i/(delta*q_i) - p_i - shadow``.

``verify_calibration`` then re-solves the fleet equilibrium at base-year
catch totals and reports how closely the observed year is reproduced.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from .equilibrium import solve_equilibrium
from .errors import ValidationError
from .production import CesParams, marginal_products
from .types import FleetModel, GlobalAssumptions, VesselTargetRecord
from .validation import as_float_array, check_positive, require

__all__ = [
    "calibrate_shares",
    "calibrate_scale",
    "calibrate_lambda",
    "calibrate_mu",
    "calibrate_fleet",
    "verify_calibration",
    "CalibrationReport",
]


def calibrate_shares(
    input_levels: np.ndarray | Sequence[float],
    input_prices: np.ndarray | Sequence[float],
    rho: float,
) -> np.ndarray:
    """Share weights that make the observed bundle cost-minimizing.

    Cost minimization requires ``beta_j / beta_k = (c_j/c_k) *
    (x_j/x_k)**(1-rho)`` for any two purchased inputs, so the weights are
    ``c_j * x_j**(1-rho)`` normalized to sum to one.  Inputs with zero
    observed level get zero weight (the vessel does not use them).
    """
    x = as_float_array(input_levels, "input_levels")
    c = as_float_array(input_prices, "input_prices", length=x.size)
    require(np.all(x >= 0.0), "input_levels must be non-negative")
    require(np.all(c > 0.0), "input_prices must be positive")
    require(rho < 1.0, f"rho must be < 1, got {rho}")
    pos = x > 0.0
    require(np.any(pos), "cannot calibrate shares from an all-zero input bundle")
    # Scale by the largest level before exponentiating: 1 - rho can exceed 5
    # for low substitutability, and raw dollar levels would overflow.
    m = float(x[pos].max())
    w = np.zeros_like(x)
    w[pos] = c[pos] * (x[pos] / m) ** (1.0 - rho)
    beta = w / w.sum()
    return beta


def calibrate_scale(
    catch_lb: float,
    input_levels: np.ndarray | Sequence[float],
    beta: np.ndarray,
    rho: float,
    delta: float,
) -> float:
    """Technology scale that reproduces observed catch at observed inputs."""
    q = check_positive(catch_lb, "catch_lb")
    x = as_float_array(input_levels, "input_levels")
    b = as_float_array(beta, "beta", length=x.size)
    a = b > 0.0
    require(np.any(a), "beta has no positive entries")
    require(np.all(x[a] > 0.0), "inputs with positive share weight must have positive levels")
    if rho == 0.0:
        index = float(np.exp(np.sum(b[a] * np.log(x[a]))))
    else:
        index = float(np.sum(b[a] * x[a] ** rho) ** (1.0 / rho))
    return q / index**delta


def calibrate_lambda(
    prices: np.ndarray | Sequence[float],
    catches: np.ndarray | Sequence[float],
    expenditures: np.ndarray | Sequence[float],
    delta: float,
) -> float:
    """Per-pound shadow value of one target's base-year catch constraint.

    Each record ties its expenditure to its effective catch value through
    ``E_i = delta * q_i * (p_i + mu_i + shadow)``.  With the per-record
    residuals ``mu_i`` free, the shadow value is identified as the
    least-squares fit of ``E_i - delta*p_i*q_i`` against ``delta*q_i``
    through the origin, which minimizes ``sum((delta*q_i*mu_i)**2)``.
    A negative result means fleet marginal profit at the constraint is
    positive, i.e. the constraint binds.
    """
    p = as_float_array(prices, "prices")
    q = as_float_array(catches, "catches", length=p.size)
    e = as_float_array(expenditures, "expenditures", length=p.size)
    require(p.size > 0, "need at least one record per target")
    require(np.all(q > 0.0), "catches must be positive")
    num = float(np.sum(delta * q * (e - delta * p * q)))
    den = float(np.sum((delta * q) ** 2))
    return num / den


def calibrate_mu(record: VesselTargetRecord, shadow_value: float, delta: float) -> float:
    """Unobserved per-pound value making the record's behavior optimal.

    Solves the record's first-order condition for the residual:
    ``mu = E/(delta*q) - p - shadow_value``.  The resulting effective
    price ``p + mu + shadow_value`` equals ``E/(delta*q)`` and is always
    positive for a record with positive expenditure.
    """
    return record.expenditure / (delta * record.catch_lb) - record.price - shadow_value


def calibrate_fleet(
    records: Iterable[VesselTargetRecord],
    assumptions: GlobalAssumptions | None = None,
) -> FleetModel:
    """Calibrate every record and assemble the fleet model.

    Groups records by target (first-appearance order), fits one shadow
    value per target, then per-record share weights, scale and unobserved
    value.  Raises ``ValidationError`` naming the offending record when a
    record cannot be calibrated.
    """
    assumptions = assumptions or GlobalAssumptions()
    recs = tuple(records)
    require(len(recs) > 0, "no records to calibrate")
    keys = [r.key for r in recs]
    dupes = {k for k in keys if keys.count(k) > 1}
    require(not dupes, f"duplicate vessel/target records: {sorted(dupes)}")
    ids = recs[0].input_ids
    for r in recs:
        require(
            r.input_ids == ids,
            f"record {r.vessel_id}/{r.target} uses input categories {r.input_ids}, expected {ids}",
        )

    delta, rho = assumptions.delta, assumptions.rho
    targets: dict[str, list[VesselTargetRecord]] = {}
    for r in recs:
        targets.setdefault(r.target, []).append(r)

    shadow_values: dict[str, float] = {}
    base_acl: dict[str, float] = {}
    for t, group in targets.items():
        shadow_values[t] = calibrate_lambda(
            [r.price for r in group],
            [r.catch_lb for r in group],
            [r.expenditure for r in group],
            delta,
        )
        base_acl[t] = float(np.sum([r.catch_lb for r in group]))

    params: dict[tuple[str, str], CesParams] = {}
    for r in recs:
        try:
            beta = calibrate_shares(r.input_levels, r.prices, rho)
            alpha = calibrate_scale(r.catch_lb, r.input_levels, beta, rho, delta)
            mu = calibrate_mu(r, shadow_values[r.target], delta)
            params[r.key] = CesParams(alpha=alpha, beta=beta, delta=delta, rho=rho, unobserved_value=mu)
        except ValidationError as exc:
            raise ValidationError(f"record {r.vessel_id}/{r.target}: {exc}") from exc

    return FleetModel(
        assumptions=assumptions,
        records=recs,
        params=params,
        shadow_values=shadow_values,
        base_acl=base_acl,
    )


@dataclass(frozen=True, eq=False)
class CalibrationReport:
    """Reproduction diagnostics from re-solving the fleet at base totals.

    ``records`` has one row per vessel/target with the worst relative
    input-level error, the catch error (both in percent) and the largest
    first-order-condition residual at observed levels.  ``targets`` has
    one row per target with its shadow value, the equilibrium multiplier
    and the aggregate catch against the base total.
    """

    records: pd.DataFrame
    targets: pd.DataFrame

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CalibrationReport):
            return NotImplemented
        return self.records.equals(other.records) and self.targets.equals(other.targets)

    @property
    def max_input_error_pct(self) -> float:
        return float(self.records["input_error_pct"].max())

    @property
    def max_output_error_pct(self) -> float:
        return float(self.records["output_error_pct"].max())

    @property
    def max_foc_residual(self) -> float:
        return float(self.records["foc_residual"].max())

    def summary_lines(self) -> list[str]:
        lines = [
            f"records: {len(self.records)}  targets: {len(self.targets)}",
            f"max input reproduction error:  {self.max_input_error_pct:.3e} %",
            f"max output reproduction error: {self.max_output_error_pct:.3e} %",
            f"max first-order residual:      {self.max_foc_residual:.3e}",
        ]
        for row in self.targets.itertuples(index=False):
            lines.append(
                f"{row.target}: shadow value {row.shadow_value:+.4f} $/lb "
                f"(mean composed price {row.mean_price:.2f} $/lb), "
                f"base catch {row.base_acl_lb:,.0f} lb over {row.n_records} records"
            )
        return lines


def verify_calibration(model: FleetModel) -> CalibrationReport:
    """Check that the calibrated equilibrium reproduces the base year.

    Re-solves the constrained fleet problem at the base-year catch totals
    and compares every record's equilibrium input bundle and catch with
    the data the model was fitted to.  Also evaluates the first-order
    conditions at the observed bundles.
    """
    solution = solve_equilibrium(model, model.base_acl)
    rows = []
    for r in model.records:
        p = model.params_for(r)
        alloc = solution.allocations[r.key]
        x_obs, x_mod = r.input_levels, alloc.input_levels
        used = x_obs > 0.0
        input_err = float(np.max(np.abs(x_mod[used] - x_obs[used]) / x_obs[used])) * 100.0
        if np.any(~used) and float(np.max(np.abs(x_mod[~used]))) > 0.0:
            # An unused input must stay unused: its share weight is zero.
            input_err = np.inf
        output_err = abs(alloc.output - r.catch_lb) / r.catch_lb * 100.0
        effective = r.price + p.unobserved_value + model.shadow_values[r.target]
        foc = effective * marginal_products(p, x_obs) - r.prices
        foc_res = float(np.max(np.abs(foc[p.active])))
        rows.append(
            {
                "vessel_id": r.vessel_id,
                "target": r.target,
                "catch_lb": r.catch_lb,
                "modeled_catch_lb": alloc.output,
                "output_error_pct": output_err,
                "input_error_pct": input_err,
                "foc_residual": foc_res,
                "alpha": p.alpha,
                "unobserved_value": p.unobserved_value,
            }
        )
    records = pd.DataFrame(rows)

    trows = []
    for t in model.targets:
        acl = model.base_acl[t]
        agg = solution.aggregates[t]
        group = model.records_for(t)
        trows.append(
            {
                "target": t,
                "n_records": len(group),
                "shadow_value": model.shadow_values[t],
                "multiplier": solution.multipliers[t],
                "mean_price": float(np.mean([r.price for r in group])),
                "base_acl_lb": acl,
                "modeled_catch_lb": agg,
                "acl_error_pct": abs(agg - acl) / acl * 100.0,
            }
        )
    return CalibrationReport(records=records, targets=pd.DataFrame(trows))
