from __future__ import annotations

import numpy as np
import pytest

import pmpfleet as pf


def make_record(
    vessel="V001",
    target="WCPO",
    catch=10_000.0,
    price_base=7.99,
    premium=0.5,
    bycatch=0.3,
    levels=(150_000.0, 75_000.0, 47_000.0, 48_000.0, 31_000.0, 19_000.0),
    hooks=200_000.0,
    input_prices=None,
):
    return pf.VesselTargetRecord(
        vessel_id=vessel,
        target=target,
        catch_lb=catch,
        price_base=price_base,
        price_premium=premium,
        price_bycatch=bycatch,
        input_levels=np.asarray(levels, dtype=float),
        input_prices=None if input_prices is None else np.asarray(input_prices, dtype=float),
        hooks=hooks,
    )


def make_params(alpha=2.0, beta=(0.6, 0.4), delta=1 / 3, rho=None, mu=0.0):
    if rho is None:
        rho = pf.rho_from_sigma(0.17)
    return pf.CesParams(
        alpha=alpha, beta=np.asarray(beta, dtype=float), delta=delta, rho=rho, unobserved_value=mu
    )


def synthetic_records(seed=42, n=128, rescale=True):
    frame = pf.generate_synthetic_fleet(seed, n)
    records = pf.records_from_frame(frame)
    if rescale:
        records = [pf.zero_profit_rescale(r) for r in records]
    return records


@pytest.fixture(scope="session")
def fleet_records():
    return synthetic_records()


@pytest.fixture(scope="session")
def fleet_model(fleet_records):
    return pf.calibrate_fleet(fleet_records, pf.GlobalAssumptions())


@pytest.fixture(scope="session")
def small_model():
    return pf.calibrate_fleet(synthetic_records(seed=7, n=6), pf.GlobalAssumptions())
