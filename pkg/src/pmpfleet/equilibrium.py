"""Fleet equilibrium under per-target catch limits.

Vessels maximize profit taking prices as given; a fleet-wide catch limit
(annual catch limit, ACL) per target couples them.  At the optimum every
target has a single multiplier ``theta >= 0`` — the per-pound charge that
makes aggregate profit-maximizing supply fit inside the limit:

* each record produces where marginal cost equals its effective price
  ``price + unobserved_value - theta`` (zero output if that is not
  positive);
* complementary slackness: ``theta == 0`` when the limit does not bind,
  otherwise aggregate supply equals the limit.

Because aggregate supply is continuous and strictly decreasing in
``theta`` wherever it is positive, each target's multiplier is found by
bisection between 0 and the largest effective value in the fleet.

A model calibrated with a *positive* shadow value for some target would
need a negative charge (a subsidy) to reproduce the base year; that means
the base-year limit was not binding, the simulation has no constrained
margin to move, and ``solve_equilibrium`` refuses with a validation error
rather than silently extrapolating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import SolverError, ValidationError
from .production import CesParams, cost_scale, min_cost_inputs, output_at_price
from .types import FleetModel, VesselTargetRecord
from .validation import require

__all__ = [
    "Allocation",
    "EquilibriumSolution",
    "effective_price",
    "aggregate_supply",
    "solve_target_multiplier",
    "solve_equilibrium",
]

#: Relative tolerance on |aggregate supply - limit| for a binding target.
DEFAULT_REL_TOL = 1e-9
DEFAULT_MAX_ITER = 200


def effective_price(record: VesselTargetRecord, params: CesParams, multiplier: float) -> float:
    """Per-pound value the record actually faces under charge ``multiplier``."""
    return record.price + params.unobserved_value - multiplier


@dataclass(frozen=True, eq=False)
class Allocation:
    """One record's equilibrium choice: input bundle, catch, profit."""

    input_levels: np.ndarray
    output: float
    profit: float

    def __post_init__(self) -> None:
        arr = np.array(self.input_levels, dtype=float, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "input_levels", arr)


@dataclass(frozen=True, eq=False)
class EquilibriumSolution:
    """Fleet-wide equilibrium at given catch limits.

    ``multipliers`` maps each target to its per-pound charge,
    ``aggregates`` to total fleet catch, ``binding`` to whether the limit
    binds (positive multiplier).  ``input_price_factors`` echoes the input
    price adjustment the solve used (ones when none), aligned with the
    model's input categories.
    """

    allocations: Mapping[tuple[str, str], Allocation]
    multipliers: Mapping[str, float]
    aggregates: Mapping[str, float]
    acls: Mapping[str, float]
    binding: Mapping[str, bool]
    input_price_factors: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "allocations", dict(self.allocations))
        object.__setattr__(self, "multipliers", dict(self.multipliers))
        object.__setattr__(self, "aggregates", dict(self.aggregates))
        object.__setattr__(self, "acls", dict(self.acls))
        object.__setattr__(self, "binding", dict(self.binding))
        arr = np.array(self.input_price_factors, dtype=float, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "input_price_factors", arr)

    @property
    def total_profit(self) -> float:
        return float(sum(a.profit for a in self.allocations.values()))


def _resolve_price_factors(
    model: FleetModel, price_factors: Mapping[str, float] | Sequence[float] | None
) -> np.ndarray:
    """Normalize a per-input price adjustment to an array in input order."""
    ids = model.input_ids
    if price_factors is None:
        return np.ones(len(ids))
    if isinstance(price_factors, Mapping):
        unknown = sorted(set(price_factors) - set(ids))
        require(not unknown, f"unknown input categories in price factors: {unknown}")
        out = np.array([float(price_factors.get(i, 1.0)) for i in ids])
    else:
        out = np.asarray(price_factors, dtype=float)
        require(out.shape == (len(ids),), f"price factors must have length {len(ids)}")
    require(np.all(np.isfinite(out)) and np.all(out > 0.0), "price factors must be positive and finite")
    return out


class _TargetSystem:
    """Per-target arrays reused across bisection steps."""

    def __init__(self, model: FleetModel, target: str, factors: np.ndarray):
        self.records = model.records_for(target)
        require(self.records, f"model has no records for target {target!r}")
        self.params = [model.params_for(r) for r in self.records]
        self.delta = model.assumptions.delta
        self.prices = [r.prices * factors for r in self.records]
        self.values = np.array([r.price + p.unobserved_value for r, p in zip(self.records, self.params)])
        self.k = np.array([cost_scale(p, c) for p, c in zip(self.params, self.prices)])

    def outputs(self, multiplier: float) -> np.ndarray:
        net = self.values - multiplier
        y = np.zeros_like(net)
        live = net > 0.0
        if np.any(live):
            y[live] = output_at_price(net[live], self.k[live], self.delta)
        return y

    def supply(self, multiplier: float) -> float:
        return float(self.outputs(multiplier).sum())


def aggregate_supply(
    model: FleetModel,
    target: str,
    multiplier: float,
    price_factors: Mapping[str, float] | Sequence[float] | None = None,
) -> float:
    """Total profit-maximizing catch on ``target`` at a given charge."""
    require(multiplier >= 0.0, f"multiplier must be non-negative, got {multiplier}")
    factors = _resolve_price_factors(model, price_factors)
    return _TargetSystem(model, target, factors).supply(multiplier)


def _bisect_multiplier(
    system: _TargetSystem, target: str, acl: float, rel_tol: float, max_iter: int
) -> float:
    if system.supply(0.0) <= acl:
        return 0.0
    lo, hi = 0.0, float(system.values.max())
    # supply(lo) > acl >= supply(hi) = 0 from here on
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break  # bracket has collapsed to adjacent floats
        if system.supply(mid) > acl:
            lo = mid
        else:
            hi = mid
    candidates = [(abs(system.supply(m) - acl), m) for m in (lo, hi)]
    gap, best = min(candidates)
    if gap > rel_tol * acl:
        raise SolverError(
            f"catch-limit multiplier for {target!r} did not converge: "
            f"bracket [{lo:.17g}, {hi:.17g}], limit {acl:.17g}, "
            f"residual {gap:.3e} exceeds {rel_tol:.1e} relative after {max_iter} iterations"
        )
    return best


def solve_target_multiplier(
    model: FleetModel,
    target: str,
    acl: float,
    price_factors: Mapping[str, float] | Sequence[float] | None = None,
    *,
    rel_tol: float = DEFAULT_REL_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> float:
    """Charge per pound that keeps aggregate supply within the limit.

    Returns 0 when the limit does not bind (including ``acl = inf``);
    otherwise the positive multiplier at which aggregate supply equals
    ``acl`` to within ``rel_tol`` relative.  Raises ``SolverError`` if the
    bisection cannot reach that tolerance within ``max_iter`` steps.
    """
    require(not math.isnan(acl) and acl > 0.0, f"catch limit for {target!r} must be positive, got {acl}")
    factors = _resolve_price_factors(model, price_factors)
    system = _TargetSystem(model, target, factors)
    return _bisect_multiplier(system, target, float(acl), rel_tol, max_iter)


def solve_equilibrium(
    model: FleetModel,
    acls: Mapping[str, float] | None = None,
    price_factors: Mapping[str, float] | Sequence[float] | None = None,
    *,
    rel_tol: float = DEFAULT_REL_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EquilibriumSolution:
    """Solve the constrained fleet problem, one target at a time.

    ``acls`` maps targets to catch limits in pounds; omitted targets use
    the model's base-year totals.  Returns the per-record allocations and
    per-target multipliers.  Raises ``ValidationError`` if any calibrated
    shadow value is positive (see module docstring) or if a limit is not
    positive; ``SolverError`` if a multiplier cannot be bracketed to
    tolerance.
    """
    for t in model.targets:
        sv = model.shadow_values[t]
        if sv > 0.0:
            raise ValidationError(
                f"target {t!r} was calibrated with a positive shadow value ({sv:.6g} $/lb): "
                "its base-year catch limit did not bind, so constrained policy simulation "
                "is not defined for this fleet"
            )
    limits = dict(model.base_acl)
    if acls is not None:
        unknown = sorted(set(acls) - set(model.targets))
        require(not unknown, f"catch limits given for unknown targets: {unknown}")
        limits.update({t: float(v) for t, v in acls.items()})
    for t, v in limits.items():
        require(not math.isnan(v) and v > 0.0, f"catch limit for {t!r} must be positive, got {v}")

    factors = _resolve_price_factors(model, price_factors)
    allocations: dict[tuple[str, str], Allocation] = {}
    multipliers: dict[str, float] = {}
    aggregates: dict[str, float] = {}
    binding: dict[str, bool] = {}
    for t in model.targets:
        system = _TargetSystem(model, t, factors)
        theta = _bisect_multiplier(system, t, limits[t], rel_tol, max_iter)
        outputs = system.outputs(theta)
        for r, p, c, y in zip(system.records, system.params, system.prices, outputs):
            x = min_cost_inputs(p, float(y), c)
            profit = (r.price + p.unobserved_value) * float(y) - float(c @ x)
            allocations[r.key] = Allocation(input_levels=x, output=float(y), profit=profit)
        multipliers[t] = theta
        aggregates[t] = float(outputs.sum())
        binding[t] = theta > 0.0

    return EquilibriumSolution(
        allocations=allocations,
        multipliers=multipliers,
        aggregates=aggregates,
        acls=limits,
        binding=binding,
        input_price_factors=factors,
    )
