"""File schemas, preprocessing transforms, and the synthetic fleet generator.

Dataset files are delimited tables (CSV with a mandatory header), one row
per vessel/target.  Base columns::

    vessel_id, target, catch_lb, price_base, price_premium, price_bycatch
    [, hooks]

Every remaining column is an input-expenditure category in dollars (the
default set is fuel, captain_pay, crew_pay, bait, other, gear).  A JSON
sidecar ``<name>.meta.json`` carries the assumptions, base-year label and
provenance.  See ``docs/file_formats.md`` for column-by-column data
dictionaries of every file this package reads or writes.

Floating-point fidelity: CSV files are written with shortest round-trip
formatting and read back with round-trip parsing, so save→load is exact;
JSON documents are exact by construction.
"""

from __future__ import annotations

import json
import os
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from .calibration import CalibrationReport
from .errors import PmpFleetError, ValidationError
from .production import CesParams
from .scenarios import SWEEP_TABLE_DTYPES, PolicyScenario, ScenarioReport, SweepResult
from .types import DEFAULT_INPUTS, DEFAULT_TARGETS, FleetModel, GlobalAssumptions, VesselTargetRecord
from .validation import require

__all__ = [
    "BASE_COLUMNS",
    "CostIndexTable",
    "load_fleet",
    "load_fleet_metadata",
    "records_from_frame",
    "write_fleet",
    "fleet_to_frame",
    "zero_profit_rescale",
    "scale_inputs_by_hooks",
    "adjust_input_costs",
    "generate_synthetic_fleet",
    "load_cost_index",
    "save_cost_index",
    "save_model",
    "load_model",
    "save_results",
    "load_calibration_report",
    "load_scenario_report",
    "load_sweep_result",
]

BASE_COLUMNS: tuple[str, ...] = (
    "vessel_id",
    "target",
    "catch_lb",
    "price_base",
    "price_premium",
    "price_bycatch",
)

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# atomic writes


def _atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise PmpFleetError(f"cannot write {path}: {exc}") from exc


def _write_frame(frame: pd.DataFrame, path: Path) -> None:
    _atomic_write_text(path, frame.to_csv(index=False, lineterminator="\n"))


def _read_frame(path: Path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"file not found: {path}")
    try:
        return pd.read_csv(path, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ValidationError(f"{path}: cannot parse as a delimited table: {exc}") from exc


def _write_json(payload: dict, path: Path) -> None:
    _atomic_write_text(path, json.dumps(payload, indent=2, allow_nan=False) + "\n")


def _read_json(path: Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"file not found: {path}")
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from exc


def _sibling(path: Path, tag: str) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.{tag}{path.suffix}")


def _meta_path(path: Path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.meta.json")


# ---------------------------------------------------------------------------
# cost index


@dataclass(frozen=True, eq=False)
class CostIndexTable:
    """Per-year multiplicative input-price adjustment factors.

    ``factors[year][input_id]`` scales that category's price/expenditure
    relative to the base year; categories not listed default to 1.  The
    base year itself must have factor 1 everywhere.
    """

    base_year: int
    factors: Mapping[int, Mapping[str, float]]

    def __post_init__(self) -> None:
        norm: dict[int, dict[str, float]] = {}
        for year, by_input in dict(self.factors).items():
            y = int(year)
            norm[y] = {}
            for input_id, f in dict(by_input).items():
                f = float(f)
                require(
                    np.isfinite(f) and f > 0.0,
                    f"cost index factor for {input_id!r} in {y} must be positive, got {f}",
                )
                norm[y][str(input_id)] = f
        base = norm.get(int(self.base_year), {})
        off = {k: v for k, v in base.items() if v != 1.0}
        require(not off, f"base year {self.base_year} must have unit factors, got {off}")
        object.__setattr__(self, "base_year", int(self.base_year))
        object.__setattr__(self, "factors", norm)

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.factors) | {self.base_year}))

    def factors_for(self, year: int, input_ids: Sequence[str]) -> dict[str, float]:
        """Factor per input category for ``year`` (1.0 where unlisted)."""
        year = int(year)
        if year not in self.factors and year != self.base_year:
            raise ValidationError(
                f"year {year} not present in the cost index (known years: {list(self.years)})"
            )
        by_input = self.factors.get(year, {})
        unknown = sorted(set(by_input) - set(input_ids))
        require(not unknown, f"cost index lists unknown input categories for {year}: {unknown}")
        return {i: by_input.get(i, 1.0) for i in input_ids}

    def factor(self, year: int, input_id: str) -> float:
        return self.factors_for(year, [input_id])[input_id]

    def to_dict(self) -> dict:
        return {
            "base_year": self.base_year,
            "factors": {str(y): dict(v) for y, v in sorted(self.factors.items())},
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "CostIndexTable":
        require("base_year" in payload, "cost index document must carry 'base_year'")
        return cls(
            base_year=payload["base_year"],
            factors={int(y): v for y, v in dict(payload.get("factors", {})).items()},
        )


def load_cost_index(path: str | Path) -> CostIndexTable:
    return CostIndexTable.from_dict(_read_json(Path(path)))


def save_cost_index(table: CostIndexTable, path: str | Path) -> None:
    _write_json(table.to_dict(), Path(path))


# ---------------------------------------------------------------------------
# dataset loading / writing


def load_fleet(
    path: str | Path,
    *,
    input_ids: Sequence[str] | None = None,
    drop_zero_catch: bool = True,
) -> list[VesselTargetRecord]:
    """Load and validate a dataset file into typed records.

    Rows are numbered from 1 (first data row below the header).  All
    validation problems are collected and raised together, each tagged
    with its row and column.  Rows with zero catch cannot be calibrated
    and are dropped with a warning (or rejected when
    ``drop_zero_catch=False``).
    """
    path = Path(path)
    return records_from_frame(
        _read_frame(path), input_ids=input_ids, drop_zero_catch=drop_zero_catch, origin=str(path)
    )


def records_from_frame(
    frame: pd.DataFrame,
    *,
    input_ids: Sequence[str] | None = None,
    drop_zero_catch: bool = True,
    origin: str = "dataset",
) -> list[VesselTargetRecord]:
    """Validate a dataset table already in memory (see :func:`load_fleet`)."""
    missing = [c for c in BASE_COLUMNS if c not in frame.columns]
    if missing:
        raise ValidationError(f"{origin}: missing required columns: {missing}")
    frame = frame.reset_index(drop=True)
    input_cols = [c for c in frame.columns if c not in BASE_COLUMNS and c != "hooks"]
    if input_ids is not None:
        require(
            list(input_cols) == list(input_ids),
            f"{origin}: input columns {input_cols} do not match expected {list(input_ids)}",
        )
    if not input_cols:
        raise ValidationError(f"{origin}: no input-expenditure columns found")

    problems: list[str] = []

    def bad(row: int, column: str, message: str) -> None:
        problems.append(f"row {row}, column {column!r}: {message}")

    numeric_cols = ["catch_lb", "price_base", "price_premium", "price_bycatch", *input_cols]
    numeric = {}
    for col in numeric_cols + (["hooks"] if "hooks" in frame.columns else []):
        numeric[col] = pd.to_numeric(frame[col], errors="coerce")
    for col in numeric_cols:
        for idx in frame.index[numeric[col].isna()]:
            raw = frame.at[idx, col]
            msg = "missing value" if pd.isna(raw) else f"not numeric: {raw!r}"
            bad(idx + 1, col, msg)

    keys: dict[tuple[str, str], int] = {}
    records: list[VesselTargetRecord] = []
    dropped = 0
    for idx in frame.index:
        row = idx + 1
        vessel = frame.at[idx, "vessel_id"]
        target = frame.at[idx, "target"]
        if pd.isna(vessel) or str(vessel).strip() == "":
            bad(row, "vessel_id", "missing vessel id")
            continue
        if pd.isna(target) or str(target).strip() == "":
            bad(row, "target", "missing target")
            continue
        key = (str(vessel), str(target))
        if key in keys:
            bad(row, "vessel_id", f"duplicate vessel/target pair {key} (first seen at row {keys[key]})")
            continue
        keys[key] = row
        if any(pd.isna(numeric[c].iat[idx]) for c in numeric_cols):
            continue  # cell-level problems already recorded
        catch = float(numeric["catch_lb"].iat[idx])
        if catch < 0:
            bad(row, "catch_lb", f"negative catch {catch}")
            continue
        if catch == 0:
            if drop_zero_catch:
                dropped += 1
                continue
            bad(row, "catch_lb", "zero catch cannot be calibrated")
            continue
        levels = np.array([float(numeric[c].iat[idx]) for c in input_cols])
        neg = [c for c, v in zip(input_cols, levels) if v < 0]
        if neg:
            bad(row, neg[0], "negative input expenditure")
            continue
        if not np.any(levels > 0):
            bad(row, input_cols[0], "no positive input expenditure in row")
            continue
        hooks = None
        if "hooks" in frame.columns and not pd.isna(numeric["hooks"].iat[idx]):
            hooks = float(numeric["hooks"].iat[idx])
            if hooks <= 0:
                bad(row, "hooks", f"hooks must be positive, got {hooks}")
                continue
        try:
            records.append(
                VesselTargetRecord(
                    vessel_id=key[0],
                    target=key[1],
                    catch_lb=catch,
                    price_base=float(numeric["price_base"].iat[idx]),
                    price_premium=float(numeric["price_premium"].iat[idx]),
                    price_bycatch=float(numeric["price_bycatch"].iat[idx]),
                    input_levels=levels,
                    input_ids=tuple(input_cols),
                    hooks=hooks,
                )
            )
        except ValidationError as exc:
            bad(row, "vessel_id", str(exc))

    if problems:
        listing = "\n  ".join(problems)
        raise ValidationError(f"{origin}: {len(problems)} problem(s):\n  {listing}")
    if dropped:
        warnings.warn(
            f"{origin}: dropped {dropped} record(s) with zero catch (cannot be calibrated)",
            stacklevel=2,
        )
    require(records, f"{origin}: no usable records")
    return records


def load_fleet_metadata(path: str | Path) -> dict | None:
    """Sidecar metadata for a dataset file, or None if absent."""
    meta = _meta_path(Path(path))
    if not meta.exists():
        return None
    return _read_json(meta)


def fleet_to_frame(records: Iterable[VesselTargetRecord]) -> pd.DataFrame:
    """Canonical dataset table for a list of records.

    Dataset files store dollar expenditures (unit input prices); records
    carrying explicit non-unit prices (e.g. hook-scaled) are refused
    rather than silently flattened back to dollars.
    """
    recs = list(records)
    require(recs, "no records to write")
    ids = recs[0].input_ids
    rows = []
    for r in recs:
        require(r.input_ids == ids, "records disagree on input categories")
        require(
            r.input_prices is None,
            f"record {r.vessel_id}/{r.target} has explicit input prices; "
            "dataset files store plain dollar expenditures",
        )
        row = {
            "vessel_id": r.vessel_id,
            "target": r.target,
            "catch_lb": r.catch_lb,
            "price_base": r.price_base,
            "price_premium": r.price_premium,
            "price_bycatch": r.price_bycatch,
            "hooks": r.hooks if r.hooks is not None else np.nan,
            **{i: float(v) for i, v in zip(ids, r.input_levels)},
        }
        rows.append(row)
    return pd.DataFrame(rows, columns=[*BASE_COLUMNS, "hooks", *ids])


def write_fleet(
    fleet: pd.DataFrame | Iterable[VesselTargetRecord],
    path: str | Path,
    metadata: Mapping | None = None,
) -> None:
    """Write a dataset file (and metadata sidecar) atomically."""
    frame = fleet if isinstance(fleet, pd.DataFrame) else fleet_to_frame(fleet)
    path = Path(path)
    _write_frame(frame, path)
    if metadata is not None:
        _write_json({"schema_version": SCHEMA_VERSION, **dict(metadata)}, _meta_path(path))


# ---------------------------------------------------------------------------
# preprocessing transforms


def _replace_levels(
    record: VesselTargetRecord,
    levels: np.ndarray,
    prices: np.ndarray | None,
) -> VesselTargetRecord:
    return VesselTargetRecord(
        vessel_id=record.vessel_id,
        target=record.target,
        catch_lb=record.catch_lb,
        price_base=record.price_base,
        price_premium=record.price_premium,
        price_bycatch=record.price_bycatch,
        input_levels=levels,
        input_ids=record.input_ids,
        input_prices=prices,
        hooks=record.hooks,
    )


def zero_profit_rescale(record: VesselTargetRecord) -> VesselTargetRecord:
    """Scale a loss-making record's spending down to zero observed profit.

    If expenditure exceeds revenue, all input levels are scaled by
    revenue/expenditure (preserving the input mix) so that observed profit
    is exactly zero; profitable records pass through unchanged.  The data
    behind the reference fleet applies this to the handful of vessels
    whose recorded costs exceed their revenue.
    """
    revenue = record.revenue
    expenditure = record.expenditure
    if expenditure <= revenue:
        return record
    scale = revenue / expenditure
    return _replace_levels(record, record.input_levels * scale, record.input_prices)


def scale_inputs_by_hooks(record: VesselTargetRecord) -> VesselTargetRecord:
    """Express input use per hook deployed, keeping expenditures intact.

    Levels become dollars-per-hook and every input price becomes the hook
    count, so ``price * level`` reproduces each original expenditure
    bit-for-bit where representable.  Records without a hook count pass
    through unchanged with a warning.
    """
    if record.hooks is None:
        warnings.warn(
            f"record {record.vessel_id}/{record.target} has no hook count; left unscaled",
            stacklevel=2,
        )
        return record
    hooks = float(record.hooks)
    base_prices = record.prices
    return _replace_levels(record, record.input_levels / hooks, base_prices * hooks)


def adjust_input_costs(
    records: Iterable[VesselTargetRecord],
    table: CostIndexTable,
    year: int,
) -> list[VesselTargetRecord]:
    """Scale each input category's expenditure by its factor for ``year``.

    Unlisted categories are unchanged; an unknown year is an error.
    """
    recs = list(records)
    require(recs, "no records to adjust")
    by_input = table.factors_for(year, recs[0].input_ids)
    factors = np.array([by_input[i] for i in recs[0].input_ids])
    return [_replace_levels(r, r.input_levels * factors, r.input_prices) for r in recs]


# ---------------------------------------------------------------------------
# synthetic fleet generator

# Annual input-expenditure moments (mean, SD, dollars) per target for the
# reference longline fleet's base year; drawn log-normal to match the
# heavy right skew of the reference fleet's spending.
EXPENDITURE_MOMENTS: dict[str, dict[str, tuple[float, float]]] = {
    "WCPO": {
        "fuel": (154_045.0, 62_542.0),
        "captain_pay": (75_700.0, 47_061.0),
        "crew_pay": (47_255.0, 46_103.0),
        "bait": (48_722.0, 17_761.0),
        "other": (31_477.0, 12_796.0),
        "gear": (19_346.0, 8_583.0),
    },
    "EPO": {
        "fuel": (27_134.0, 31_917.0),
        "captain_pay": (13_623.0, 18_167.0),
        "crew_pay": (7_245.0, 12_246.0),
        "bait": (7_928.0, 8_635.0),
        "other": (5_029.0, 5_652.0),
        "gear": (3_160.0, 3_479.0),
    },
    "SF": {
        "fuel": (16_318.0, 44_331.0),
        "captain_pay": (6_962.0, 19_937.0),
        "crew_pay": (1_978.0, 6_192.0),
        "bait": (4_013.0, 10_787.0),
        "other": (3_195.0, 8_844.0),
        "gear": (2_062.0, 5_618.0),
    },
}

#: Fleet-average ex-vessel price per pound: bigeye for both ocean areas,
#: swordfish for SF.
BASE_PRICES: dict[str, float] = {"WCPO": 7.99, "EPO": 7.99, "SF": 4.30}

#: Fraction of vessels active per target (active-vessel counts of the
#: reference year: 127/94/17 of 128).
DEFAULT_PARTICIPATION: dict[str, float] = {"WCPO": 127 / 128, "EPO": 94 / 128, "SF": 17 / 128}

# Revenue/expenditure multiple for ordinary vessels.  Kept above the
# largest 1/delta on the supported elasticity sweep range (eta >= 0.3
# gives 1/delta <= 4.33) so every target's base-year catch constraint
# calibrates as binding under any sweep cell; about 5% of records are
# drawn as money-losers instead, mirroring the handful of such vessels in
# the reference data.
REVENUE_MULTIPLE_RANGE = (4.6, 5.8)
LOSS_MULTIPLE_RANGE = (0.85, 0.98)
LOSS_RATE = 0.05


def _truncated_normal(rng: np.random.Generator, loc: float, scale: float, lo: float, hi: float) -> float:
    for _ in range(1000):
        v = rng.normal(loc, scale)
        if lo <= v <= hi:
            return float(v)
    return float(np.clip(loc, lo, hi))  # pragma: no cover - pathological bounds


def _lognormal(rng: np.random.Generator, mean: float, sd: float) -> float:
    var_ln = np.log1p((sd / mean) ** 2)
    mu_ln = np.log(mean) - 0.5 * var_ln
    return float(rng.lognormal(mu_ln, np.sqrt(var_ln)))


def generate_synthetic_fleet(
    seed: int,
    n_vessels: int = 128,
    participation: Mapping[str, float] | None = None,
) -> pd.DataFrame:
    """Deterministic stand-in for the confidential vessel data.

    Expenditures and catches are log-normal with per-target moments from
    the reference fleet's base year; price premiums truncated normal; the
    revenue/expenditure multiple keeps roughly 95% of records profitable.
    Every vessel participates in at least one target.  Identical
    ``(seed, n_vessels, participation)`` yield identical tables.
    """
    require(int(n_vessels) >= 1, f"n_vessels must be >= 1, got {n_vessels}")
    n_vessels = int(n_vessels)
    rates = dict(DEFAULT_PARTICIPATION if participation is None else participation)
    for t, p in rates.items():
        require(t in EXPENDITURE_MOMENTS, f"no moment table for target {t!r}")
        require(0.0 <= p <= 1.0, f"participation rate for {t!r} must be in [0, 1], got {p}")
    targets = [t for t in DEFAULT_TARGETS if t in rates]
    require(targets, "participation must cover at least one known target")

    rng = np.random.default_rng(int(seed))
    width = max(3, len(str(n_vessels)))
    rows = []
    for v in range(1, n_vessels + 1):
        vessel_id = f"V{v:0{width}d}"
        active = {t: bool(rng.random() < rates[t]) for t in targets}
        if not any(active.values()):
            active[targets[0]] = True
        for t in targets:
            if not active[t]:
                continue
            moments = EXPENDITURE_MOMENTS[t]
            spend = {i: _lognormal(rng, *moments[i]) for i in DEFAULT_INPUTS}
            total = sum(spend.values())
            premium = _truncated_normal(rng, 0.6, 0.35, -1.0, 2.0)
            bycatch = _lognormal(rng, 0.7, 0.3)
            price = BASE_PRICES[t] + premium + bycatch
            if rng.random() < LOSS_RATE:
                multiple = rng.uniform(*LOSS_MULTIPLE_RANGE)
            else:
                multiple = rng.uniform(*REVENUE_MULTIPLE_RANGE)
            catch = multiple * total / price
            hooks = float(np.rint(total / rng.uniform(1.5, 2.5)))
            rows.append(
                {
                    "vessel_id": vessel_id,
                    "target": t,
                    "catch_lb": catch,
                    "price_base": BASE_PRICES[t],
                    "price_premium": premium,
                    "price_bycatch": bycatch,
                    "hooks": max(hooks, 1.0),
                    **spend,
                }
            )
    return pd.DataFrame(rows, columns=[*BASE_COLUMNS, "hooks", *DEFAULT_INPUTS])


# ---------------------------------------------------------------------------
# model persistence


def save_model(model: FleetModel, path: str | Path) -> None:
    """Persist a calibrated fleet model as a JSON document."""
    payload = {
        "kind": "fleet_model",
        "schema_version": SCHEMA_VERSION,
        "assumptions": {"eta": model.assumptions.eta, "sigma": model.assumptions.sigma},
        "input_ids": list(model.input_ids),
        "shadow_values": dict(model.shadow_values),
        "base_acl": dict(model.base_acl),
        "records": [
            {
                "vessel_id": r.vessel_id,
                "target": r.target,
                "catch_lb": r.catch_lb,
                "price_base": r.price_base,
                "price_premium": r.price_premium,
                "price_bycatch": r.price_bycatch,
                "input_levels": [float(v) for v in r.input_levels],
                "input_prices": None if r.input_prices is None else [float(v) for v in r.input_prices],
                "hooks": r.hooks,
            }
            for r in model.records
        ],
        "params": [
            {
                "vessel_id": k[0],
                "target": k[1],
                "alpha": p.alpha,
                "beta": [float(v) for v in p.beta],
                "delta": p.delta,
                "rho": p.rho,
                "unobserved_value": p.unobserved_value,
            }
            for k, p in ((r.key, model.params_for(r)) for r in model.records)
        ],
    }
    _write_json(payload, Path(path))


def load_model(path: str | Path) -> FleetModel:
    payload = _read_json(Path(path))
    if payload.get("kind") != "fleet_model":
        raise ValidationError(f"{path}: not a fleet model file (kind={payload.get('kind')!r})")
    ids = tuple(payload["input_ids"])
    records = tuple(
        VesselTargetRecord(
            vessel_id=r["vessel_id"],
            target=r["target"],
            catch_lb=r["catch_lb"],
            price_base=r["price_base"],
            price_premium=r["price_premium"],
            price_bycatch=r["price_bycatch"],
            input_levels=np.array(r["input_levels"], dtype=float),
            input_ids=ids,
            input_prices=None if r["input_prices"] is None else np.array(r["input_prices"], dtype=float),
            hooks=r["hooks"],
        )
        for r in payload["records"]
    )
    params = {
        (p["vessel_id"], p["target"]): CesParams(
            alpha=p["alpha"],
            beta=np.array(p["beta"], dtype=float),
            delta=p["delta"],
            rho=p["rho"],
            unobserved_value=p["unobserved_value"],
        )
        for p in payload["params"]
    }
    return FleetModel(
        assumptions=GlobalAssumptions(**payload["assumptions"]),
        records=records,
        params=params,
        shadow_values=payload["shadow_values"],
        base_acl=payload["base_acl"],
    )


# ---------------------------------------------------------------------------
# report persistence

CALIBRATION_RECORD_DTYPES: dict[str, str] = {
    "vessel_id": "object",
    "target": "object",
    "catch_lb": "float64",
    "modeled_catch_lb": "float64",
    "output_error_pct": "float64",
    "input_error_pct": "float64",
    "foc_residual": "float64",
    "alpha": "float64",
    "unobserved_value": "float64",
}

CALIBRATION_TARGET_DTYPES: dict[str, str] = {
    "target": "object",
    "n_records": "int64",
    "shadow_value": "float64",
    "multiplier": "float64",
    "mean_price": "float64",
    "base_acl_lb": "float64",
    "modeled_catch_lb": "float64",
    "acl_error_pct": "float64",
}

SCENARIO_VESSEL_DTYPES: dict[str, str] = {
    "vessel_id": "object",
    "target": "object",
    "base_catch_lb": "float64",
    "catch_lb": "float64",
    "change_pct": "float64",
    "base_expenditure": "float64",
    "expenditure": "float64",
    "profit": "float64",
}

SCENARIO_TARGET_DTYPES: dict[str, str] = {
    "target": "object",
    "base_acl_lb": "float64",
    "acl_lb": "float64",
    "multiplier": "float64",
    "catch_lb": "float64",
    "binding": "bool",
    "change_pct": "float64",
}

SCENARIO_SUMMARY_DTYPES: dict[str, str] = {
    "target": "object",
    "n": "int64",
    "mean_pct": "float64",
    "sd_pct": "float64",
    "min_pct": "float64",
    "p25_pct": "float64",
    "median_pct": "float64",
    "p75_pct": "float64",
    "max_pct": "float64",
}

_FORMATS = ("csv", "json")


def _check_format(format: str) -> str:
    require(format in _FORMATS, f"unknown format {format!r}; expected one of {list(_FORMATS)}")
    return format


def _frame_to_payload(frame: pd.DataFrame) -> dict:
    return {col: [_json_cell(v) for v in frame[col]] for col in frame.columns}


def _json_cell(value):
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


def _frame_from_payload(payload: Mapping, dtypes: Mapping[str, str]) -> pd.DataFrame:
    frame = pd.DataFrame({col: payload.get(col, []) for col in dtypes})
    return _apply_dtypes(frame, dtypes)


def _apply_dtypes(frame: pd.DataFrame, dtypes: Mapping[str, str]) -> pd.DataFrame:
    missing = [c for c in dtypes if c not in frame.columns]
    require(not missing, f"report table missing columns: {missing}")
    return frame[list(dtypes)].astype(dict(dtypes))


def save_results(
    report: CalibrationReport | ScenarioReport | SweepResult,
    path: str | Path,
    format: str = "csv",
) -> None:
    """Write a report to disk in ``csv`` or ``json`` form.

    CSV keeps the main table at ``path`` with companion tables alongside
    (``<stem>.targets.csv`` etc.); JSON stores the whole report in one
    document.  Either form loads back equal to what was saved.
    """
    format = _check_format(format)
    path = Path(path)
    if isinstance(report, CalibrationReport):
        if format == "csv":
            _write_frame(report.records, path)
            _write_frame(report.targets, _sibling(path, "targets"))
        else:
            _write_json(
                {
                    "kind": "calibration_report",
                    "records": _frame_to_payload(report.records),
                    "targets": _frame_to_payload(report.targets),
                },
                path,
            )
    elif isinstance(report, ScenarioReport):
        scenario = {
            "name": report.scenario.name,
            "acl_changes_pct": dict(report.scenario.acl_changes_pct),
            "price_factors": None
            if report.scenario.price_factors is None
            else dict(report.scenario.price_factors),
        }
        if format == "csv":
            _write_frame(report.vessels, path)
            _write_frame(report.targets, _sibling(path, "targets"))
            _write_frame(report.summary, _sibling(path, "summary"))
            _write_json({"kind": "policy_scenario", **scenario}, _sibling(path, "scenario").with_suffix(".json"))
        else:
            _write_json(
                {
                    "kind": "scenario_report",
                    "scenario": scenario,
                    "vessels": _frame_to_payload(report.vessels),
                    "targets": _frame_to_payload(report.targets),
                    "summary": _frame_to_payload(report.summary),
                },
                path,
            )
    elif isinstance(report, SweepResult):
        failures = [
            {"eta": eta, "sigma": sigma, "reason": reason}
            for (eta, sigma), reason in sorted(report.failures.items())
        ]
        if format == "csv":
            _write_frame(report.table, path)
            _write_json(
                {"kind": "sweep_failures", "failures": failures},
                _sibling(path, "failures").with_suffix(".json"),
            )
        else:
            _write_json(
                {
                    "kind": "sensitivity_sweep",
                    "table": _frame_to_payload(report.table),
                    "failures": failures,
                },
                path,
            )
    else:
        raise ValidationError(f"cannot save object of type {type(report).__name__}")


def load_calibration_report(path: str | Path, format: str = "csv") -> CalibrationReport:
    format = _check_format(format)
    path = Path(path)
    if format == "csv":
        records = _apply_dtypes(_read_frame(path), CALIBRATION_RECORD_DTYPES)
        targets = _apply_dtypes(_read_frame(_sibling(path, "targets")), CALIBRATION_TARGET_DTYPES)
    else:
        payload = _read_json(path)
        require(payload.get("kind") == "calibration_report", f"{path}: not a calibration report")
        records = _frame_from_payload(payload["records"], CALIBRATION_RECORD_DTYPES)
        targets = _frame_from_payload(payload["targets"], CALIBRATION_TARGET_DTYPES)
    return CalibrationReport(records=records, targets=targets)


def _scenario_from_payload(payload: Mapping) -> PolicyScenario:
    return PolicyScenario(
        name=payload["name"],
        acl_changes_pct=payload.get("acl_changes_pct", {}),
        price_factors=payload.get("price_factors"),
    )


def load_scenario_report(path: str | Path, format: str = "csv") -> ScenarioReport:
    format = _check_format(format)
    path = Path(path)
    if format == "csv":
        vessels = _apply_dtypes(_read_frame(path), SCENARIO_VESSEL_DTYPES)
        targets = _apply_dtypes(_read_frame(_sibling(path, "targets")), SCENARIO_TARGET_DTYPES)
        summary = _apply_dtypes(_read_frame(_sibling(path, "summary")), SCENARIO_SUMMARY_DTYPES)
        scen = _read_json(_sibling(path, "scenario").with_suffix(".json"))
        scenario = _scenario_from_payload(scen)
    else:
        payload = _read_json(path)
        require(payload.get("kind") == "scenario_report", f"{path}: not a scenario report")
        vessels = _frame_from_payload(payload["vessels"], SCENARIO_VESSEL_DTYPES)
        targets = _frame_from_payload(payload["targets"], SCENARIO_TARGET_DTYPES)
        summary = _frame_from_payload(payload["summary"], SCENARIO_SUMMARY_DTYPES)
        scenario = _scenario_from_payload(payload["scenario"])
    return ScenarioReport(scenario=scenario, vessels=vessels, targets=targets, summary=summary, solution=None)


def load_sweep_result(path: str | Path, format: str = "csv") -> SweepResult:
    format = _check_format(format)
    path = Path(path)
    if format == "csv":
        table = _apply_dtypes(_read_frame(path), SWEEP_TABLE_DTYPES)
        fail_path = _sibling(path, "failures").with_suffix(".json")
        failures_raw = _read_json(fail_path)["failures"] if fail_path.exists() else []
    else:
        payload = _read_json(path)
        require(payload.get("kind") == "sensitivity_sweep", f"{path}: not a sweep result")
        table = _frame_from_payload(payload["table"], SWEEP_TABLE_DTYPES)
        failures_raw = payload.get("failures", [])
    failures = {(f["eta"], f["sigma"]): f["reason"] for f in failures_raw}
    return SweepResult(table=table, failures=failures)
