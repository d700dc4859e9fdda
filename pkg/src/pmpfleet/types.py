"""Core data types: observed records, global assumptions, calibrated model.

All types are immutable after construction (frozen dataclasses with
read-only array fields), so a calibrated model can be shared freely across
scenario runs and threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ValidationError
from .production import CesParams, delta_from_eta, rho_from_sigma
from .validation import check_finite_scalar, check_positive, frozen_array, require

__all__ = [
    "DEFAULT_INPUTS",
    "DEFAULT_TARGETS",
    "VesselTargetRecord",
    "GlobalAssumptions",
    "FleetModel",
    "compose_price",
]

#: Input categories of the reference dataset, in column order.  Levels are
#: annual expenditures in dollars, so the base-year price of each input is 1.
DEFAULT_INPUTS: tuple[str, ...] = ("fuel", "captain_pay", "crew_pay", "bait", "other", "gear")

#: Target stocks of the reference fishery.  Any other non-empty string is
#: accepted as a target identifier.
DEFAULT_TARGETS: tuple[str, ...] = ("WCPO", "EPO", "SF")


@dataclass(frozen=True, eq=False)
class VesselTargetRecord:
    """One vessel's observed base-year activity on one target stock.

    ``input_levels`` are annual input quantities in the units that make
    ``input_prices`` (default: all ones, i.e. dollar expenditures) the
    matching per-unit prices.  The per-pound value of catch is the sum of
    the market price, a vessel-specific dockside premium, and the value of
    retained bycatch landed per pound of target catch.
    """

    vessel_id: str
    target: str
    catch_lb: float
    price_base: float
    price_premium: float
    price_bycatch: float
    input_levels: np.ndarray
    input_ids: tuple[str, ...] = DEFAULT_INPUTS
    input_prices: np.ndarray | None = None
    hooks: float | None = None

    def __post_init__(self) -> None:
        require(isinstance(self.vessel_id, str) and self.vessel_id != "", "vessel_id must be a non-empty string")
        require(isinstance(self.target, str) and self.target != "", "target must be a non-empty string")
        object.__setattr__(self, "input_ids", tuple(str(i) for i in self.input_ids))
        require(len(set(self.input_ids)) == len(self.input_ids), "input_ids must be unique")
        n = len(self.input_ids)
        require(n > 0, "record must have at least one input")
        levels = frozen_array(self.input_levels, "input_levels", length=n)
        require(np.all(levels >= 0.0), f"input_levels must be non-negative for {self.vessel_id}/{self.target}")
        require(np.any(levels > 0.0), f"record {self.vessel_id}/{self.target} has no positive input level")
        object.__setattr__(self, "input_levels", levels)
        if self.input_prices is not None:
            prices = frozen_array(self.input_prices, "input_prices", length=n)
            require(np.all(prices > 0.0), f"input_prices must be positive for {self.vessel_id}/{self.target}")
            object.__setattr__(self, "input_prices", prices)
        object.__setattr__(self, "catch_lb", check_positive(self.catch_lb, "catch_lb"))
        object.__setattr__(self, "price_base", check_finite_scalar(self.price_base, "price_base"))
        object.__setattr__(self, "price_premium", check_finite_scalar(self.price_premium, "price_premium"))
        object.__setattr__(self, "price_bycatch", check_finite_scalar(self.price_bycatch, "price_bycatch"))
        if self.hooks is not None:
            object.__setattr__(self, "hooks", check_positive(self.hooks, "hooks"))
        compose_price(self)  # rejects a non-positive composed value

    @property
    def key(self) -> tuple[str, str]:
        return (self.vessel_id, self.target)

    @property
    def price(self) -> float:
        """Composed per-pound value of catch (see :func:`compose_price`)."""
        return compose_price(self)

    @property
    def prices(self) -> np.ndarray:
        """Per-unit input prices; ones when levels are dollar expenditures."""
        if self.input_prices is None:
            return np.ones(len(self.input_ids))
        return np.asarray(self.input_prices)

    @property
    def expenditure(self) -> float:
        """Total observed spending on inputs, ``prices @ input_levels``."""
        return float(self.prices @ self.input_levels)

    @property
    def revenue(self) -> float:
        """Observed catch valued at the composed price."""
        return self.price * self.catch_lb


def compose_price(record: VesselTargetRecord) -> float:
    """Observable per-pound value: base price + premium + bycatch value.

    The composed value must be positive for the record to describe a
    rational operation; a non-positive value raises ``ValidationError``.
    """
    total = record.price_base + record.price_premium + record.price_bycatch
    if not (total > 0.0 and np.isfinite(total)):
        raise ValidationError(
            f"composed catch value for {record.vessel_id}/{record.target} must be positive, "
            f"got {record.price_base} + {record.price_premium} + {record.price_bycatch} = {total}"
        )
    return float(total)


@dataclass(frozen=True)
class GlobalAssumptions:
    """Fleet-wide behavioral elasticities fixed before calibration.

    ``eta`` is the per-vessel price elasticity of supply, ``sigma`` the
    elasticity of substitution between inputs.  Both must be positive;
    ``sigma == 1`` selects the Cobb-Douglas limit.
    """

    eta: float = 0.5
    sigma: float = 0.17

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta", check_positive(self.eta, "eta"))
        object.__setattr__(self, "sigma", check_positive(self.sigma, "sigma"))

    @property
    def delta(self) -> float:
        return delta_from_eta(self.eta)

    @property
    def rho(self) -> float:
        return rho_from_sigma(self.sigma)


@dataclass(frozen=True, eq=False)
class FleetModel:
    """A calibrated fleet: records, per-record technologies, per-target values.

    ``shadow_values`` holds the calibrated per-pound shadow value of each
    target's base-year catch constraint (non-positive when the constraint
    binds); ``base_acl`` the base-year fleet catch per target, which the
    calibrated equilibrium reproduces.
    """

    assumptions: GlobalAssumptions
    records: tuple[VesselTargetRecord, ...]
    params: Mapping[tuple[str, str], CesParams]
    shadow_values: Mapping[str, float]
    base_acl: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        require(len(self.records) > 0, "a fleet model needs at least one record")
        keys = [r.key for r in self.records]
        require(len(set(keys)) == len(keys), "duplicate vessel/target records in fleet")
        ids = self.records[0].input_ids
        require(
            all(r.input_ids == ids for r in self.records),
            "all records in a fleet must share the same input categories",
        )
        missing = [k for k in keys if k not in self.params]
        require(not missing, f"missing calibrated parameters for records: {missing}")
        for t in self.targets:
            require(t in self.shadow_values, f"missing shadow value for target {t!r}")
            require(t in self.base_acl, f"missing base catch total for target {t!r}")
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "shadow_values", dict(self.shadow_values))
        object.__setattr__(self, "base_acl", dict(self.base_acl))

    @property
    def input_ids(self) -> tuple[str, ...]:
        return self.records[0].input_ids

    @property
    def targets(self) -> tuple[str, ...]:
        """Targets in first-appearance order (stable across runs)."""
        seen: dict[str, None] = {}
        for r in self.records:
            seen.setdefault(r.target, None)
        return tuple(seen)

    @property
    def vessel_ids(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for r in self.records:
            seen.setdefault(r.vessel_id, None)
        return tuple(seen)

    def records_for(self, target: str) -> tuple[VesselTargetRecord, ...]:
        return tuple(r for r in self.records if r.target == target)

    def params_for(self, record: VesselTargetRecord) -> CesParams:
        return self.params[record.key]
