"""Scikit-learn-style facade over the calibrate/solve pipeline.

``FleetCalibrator`` follows the estimator protocol — constructor keyword
parameters stored verbatim, ``fit`` producing trailing-underscore
attributes, ``get_params``/``set_params``/cloning via ``BaseEstimator`` —
so it drops into tooling that expects that shape.  The data, however, are
structured fleet records rather than a numeric design matrix: ``fit``
accepts a dataset table (see :mod:`pmpfleet.data_io`) or a list of
:class:`~pmpfleet.types.VesselTargetRecord`, and ``predict`` returns the
equilibrium catch per fitted record under given catch limits.  A
``transform`` step is deliberately absent; calibration has no meaningful
feature-space mapping.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .calibration import calibrate_fleet, verify_calibration
from .data_io import records_from_frame, zero_profit_rescale
from .equilibrium import EquilibriumSolution, solve_equilibrium
from .scenarios import PolicyScenario, ScenarioReport, run_policy
from .stats import EvaluationResult, evaluate_predictions
from .types import GlobalAssumptions, VesselTargetRecord

__all__ = ["FleetCalibrator"]


class FleetCalibrator(BaseEstimator):
    """Calibrate a fleet model from base-year records; predict under limits.

    Parameters
    ----------
    eta : float, default 0.5
        Assumed per-vessel supply elasticity.
    sigma : float, default 0.17
        Assumed elasticity of substitution between inputs.
    rescale_zero_profit : bool, default True
        Scale loss-making records' spending down to zero profit before
        calibrating, mirroring the reference data preparation.
    drop_zero_catch : bool, default True
        When fitting from a table, drop rows with zero catch (with a
        warning) instead of failing.

    Attributes (after ``fit``)
    --------------------------
    model_ : FleetModel
        The calibrated fleet.
    report_ : CalibrationReport
        Base-year reproduction diagnostics.
    records_ : tuple[VesselTargetRecord, ...]
        The records actually calibrated, in prediction order.
    shadow_values_ : dict[str, float]
        Calibrated per-target shadow values (non-positive when binding).
    """

    def __init__(
        self,
        eta: float = 0.5,
        sigma: float = 0.17,
        rescale_zero_profit: bool = True,
        drop_zero_catch: bool = True,
    ):
        self.eta = eta
        self.sigma = sigma
        self.rescale_zero_profit = rescale_zero_profit
        self.drop_zero_catch = drop_zero_catch

    # ------------------------------------------------------------------

    def _coerce_records(self, X) -> list[VesselTargetRecord]:
        if isinstance(X, pd.DataFrame):
            return records_from_frame(
                X, drop_zero_catch=self.drop_zero_catch, origin="fit data"
            )
        records = list(X)
        for r in records:
            if not isinstance(r, VesselTargetRecord):
                raise TypeError(
                    "fit expects a dataset DataFrame or an iterable of "
                    f"VesselTargetRecord, got element of type {type(r).__name__}"
                )
        return records

    def fit(self, X, y=None) -> "FleetCalibrator":
        """Calibrate from base-year data.

        ``X`` is a dataset table or an iterable of records; ``y`` is
        ignored (present for estimator-API compatibility).
        """
        records = self._coerce_records(X)
        if self.rescale_zero_profit:
            records = [zero_profit_rescale(r) for r in records]
        assumptions = GlobalAssumptions(eta=self.eta, sigma=self.sigma)
        self.model_ = calibrate_fleet(records, assumptions)
        self.report_ = verify_calibration(self.model_)
        self.records_ = self.model_.records
        self.shadow_values_ = dict(self.model_.shadow_values)
        self.base_acl_ = dict(self.model_.base_acl)
        self.n_records_ = len(self.records_)
        return self

    # ------------------------------------------------------------------

    def simulate(
        self,
        acls: Mapping[str, float] | None = None,
        price_factors: Mapping[str, float] | Sequence[float] | None = None,
    ) -> EquilibriumSolution:
        """Full equilibrium under the given catch limits (base when None)."""
        check_is_fitted(self, "model_")
        return solve_equilibrium(self.model_, acls, price_factors)

    def predict(
        self,
        acls: Mapping[str, float] | None = None,
        price_factors: Mapping[str, float] | Sequence[float] | None = None,
    ) -> np.ndarray:
        """Equilibrium catch (pounds) per fitted record, in ``records_`` order."""
        solution = self.simulate(acls, price_factors)
        return np.array([solution.allocations[r.key].output for r in self.records_])

    def run_scenario(self, scenario: PolicyScenario) -> ScenarioReport:
        check_is_fitted(self, "model_")
        return run_policy(self.model_, scenario)

    def score(self, X=None, y=None) -> float:
        """Base-year reproduction quality as R² of predicted vs observed catch.

        A correctly calibrated model scores 1.0 to floating-point noise.
        ``X``/``y`` are ignored; the score is against the fitted base year.
        """
        result = self.evaluate_base()
        return result.r_squared

    def evaluate_base(self) -> EvaluationResult:
        check_is_fitted(self, "model_")
        predicted = self.predict()
        observed = np.array([r.catch_lb for r in self.records_])
        return evaluate_predictions(predicted, observed)
