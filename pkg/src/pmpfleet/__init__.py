"""Fleet-level production-model calibration and catch-limit policy simulation.

The pipeline: observe one base year of vessel/target records, calibrate a
CES technology and valuation residuals so constrained profit maximization
exactly reproduces that year, then re-solve under changed catch limits or
input prices to simulate policy, and score predictions against later
observed years.
"""

from .calibration import (
    CalibrationReport,
    calibrate_fleet,
    calibrate_lambda,
    calibrate_mu,
    calibrate_scale,
    calibrate_shares,
    verify_calibration,
)
from .data_io import (
    CostIndexTable,
    adjust_input_costs,
    fleet_to_frame,
    generate_synthetic_fleet,
    load_calibration_report,
    load_cost_index,
    load_fleet,
    load_fleet_metadata,
    load_model,
    load_scenario_report,
    load_sweep_result,
    records_from_frame,
    save_cost_index,
    save_model,
    save_results,
    scale_inputs_by_hooks,
    write_fleet,
    zero_profit_rescale,
)
from .equilibrium import (
    Allocation,
    EquilibriumSolution,
    aggregate_supply,
    effective_price,
    solve_equilibrium,
    solve_target_multiplier,
)
from .errors import PmpFleetError, SolverError, ValidationError
from .estimator import FleetCalibrator
from .production import (
    CesParams,
    cost_scale,
    delta_from_eta,
    marginal_cost,
    marginal_product,
    marginal_products,
    min_cost_inputs,
    optimal_output,
    output_at_price,
    production,
    production_cost,
    rho_from_sigma,
)
from .scenarios import (
    PolicyScenario,
    ScenarioReport,
    SweepResult,
    YearComparison,
    predict_observed_year,
    run_policy,
    scaled_acls,
    sensitivity_sweep,
)
from .stats import EvaluationResult, WilcoxonResult, evaluate_predictions, wilcoxon_signed_rank
from .types import (
    DEFAULT_INPUTS,
    DEFAULT_TARGETS,
    FleetModel,
    GlobalAssumptions,
    VesselTargetRecord,
    compose_price,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "CalibrationReport",
    "CesParams",
    "CostIndexTable",
    "DEFAULT_INPUTS",
    "DEFAULT_TARGETS",
    "EquilibriumSolution",
    "EvaluationResult",
    "FleetCalibrator",
    "FleetModel",
    "GlobalAssumptions",
    "PmpFleetError",
    "PolicyScenario",
    "ScenarioReport",
    "SolverError",
    "SweepResult",
    "ValidationError",
    "VesselTargetRecord",
    "WilcoxonResult",
    "YearComparison",
    "adjust_input_costs",
    "aggregate_supply",
    "calibrate_fleet",
    "calibrate_lambda",
    "calibrate_mu",
    "calibrate_scale",
    "calibrate_shares",
    "compose_price",
    "cost_scale",
    "delta_from_eta",
    "effective_price",
    "evaluate_predictions",
    "fleet_to_frame",
    "generate_synthetic_fleet",
    "load_calibration_report",
    "load_cost_index",
    "load_fleet",
    "load_fleet_metadata",
    "load_model",
    "load_scenario_report",
    "load_sweep_result",
    "marginal_cost",
    "marginal_product",
    "marginal_products",
    "min_cost_inputs",
    "optimal_output",
    "output_at_price",
    "predict_observed_year",
    "production",
    "production_cost",
    "records_from_frame",
    "rho_from_sigma",
    "run_policy",
    "save_cost_index",
    "save_model",
    "save_results",
    "scale_inputs_by_hooks",
    "scaled_acls",
    "sensitivity_sweep",
    "solve_equilibrium",
    "solve_target_multiplier",
    "verify_calibration",
    "wilcoxon_signed_rank",
    "write_fleet",
    "zero_profit_rescale",
]
