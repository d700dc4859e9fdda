from __future__ import annotations

import numpy as np
import pytest

import pmpfleet as pf
from pmpfleet import ValidationError

from conftest import make_record, synthetic_records
from oracles import grid_lambda, lambda_objective


class TestShares:
    def test_equal_levels_equal_shares(self):
        beta = pf.calibrate_shares(np.full(6, 30_000.0), np.ones(6), pf.rho_from_sigma(0.17))
        assert beta == pytest.approx(np.full(6, 1 / 6), rel=1e-12)

    def test_two_to_one_with_rho_minus_one(self):
        beta = pf.calibrate_shares([2.0, 1.0], [1.0, 1.0], rho=-1.0)
        assert beta == pytest.approx([0.8, 0.2], rel=1e-13)  # weights go as level^2

    def test_shares_sum_to_one(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = rng.integers(2, 8)
            x = rng.uniform(10.0, 1e6, size=n)
            c = rng.uniform(0.5, 3.0, size=n)
            beta = pf.calibrate_shares(x, c, rho=float(rng.uniform(-20.0, 0.9)))
            assert float(beta.sum()) == pytest.approx(1.0, abs=1e-12)
            assert np.all(beta > 0)

    def test_zero_level_gets_zero_share(self):
        beta = pf.calibrate_shares([5.0, 0.0, 3.0], np.ones(3), rho=-2.0)
        assert beta[1] == 0.0
        assert float(beta.sum()) == pytest.approx(1.0, abs=1e-15)

    def test_all_zero_rejected(self):
        with pytest.raises(ValidationError):
            pf.calibrate_shares([0.0, 0.0], [1.0, 1.0], rho=-1.0)

    def test_makes_observed_bundle_cost_minimizing(self):
        x = np.array([120_000.0, 45_000.0, 8_000.0])
        c = np.array([1.0, 1.0, 2.0])
        rho = pf.rho_from_sigma(0.17)
        beta = pf.calibrate_shares(x, c, rho)
        p = pf.CesParams(alpha=1.0, beta=beta, delta=1 / 3, rho=rho)
        mp = pf.marginal_products(p, x)
        ratios = mp / c
        assert ratios == pytest.approx(np.full(3, ratios[0]), rel=1e-10)


class TestScale:
    def test_single_input_inversion(self):
        assert pf.calibrate_scale(2.0, [8.0], np.array([1.0]), rho=-1.0, delta=1 / 3) == pytest.approx(
            1.0, rel=1e-14
        )

    def test_round_trip(self):
        rng = np.random.default_rng(9)
        rho = pf.rho_from_sigma(0.17)
        for _ in range(50):
            n = rng.integers(2, 7)
            x = rng.uniform(1e3, 1e6, size=n)
            c = np.ones(n)
            q = float(rng.uniform(1e3, 1e7))
            beta = pf.calibrate_shares(x, c, rho)
            alpha = pf.calibrate_scale(q, x, beta, rho, delta=1 / 3)
            p = pf.CesParams(alpha=alpha, beta=beta, delta=1 / 3, rho=rho)
            assert pf.production(p, x) == pytest.approx(q, rel=1e-12)

    def test_zero_catch_rejected(self):
        with pytest.raises(ValidationError):
            pf.calibrate_scale(0.0, [8.0], np.array([1.0]), rho=-1.0, delta=1 / 3)


class TestLambda:
    def test_single_record_exact_fit(self):
        lam = pf.calibrate_lambda([8.0], [10_000.0], [60_000.0], delta=1 / 3)
        assert lam == pytest.approx(10.0, rel=1e-12)
        assert lambda_objective(lam, [8.0], [10_000.0], [60_000.0], 1 / 3) == pytest.approx(0.0, abs=1e-12)

    def test_duplication_invariance(self):
        p, q, e = [8.0, 6.5], [1e4, 2e4], [5e4, 9e4]
        lam1 = pf.calibrate_lambda(p, q, e, delta=1 / 3)
        lam2 = pf.calibrate_lambda(p * 2, q * 2, e * 2, delta=1 / 3)
        assert lam2 == pytest.approx(lam1, rel=1e-14)

    def test_valuation_homogeneity(self):
        p = np.array([8.0, 6.5, 9.1])
        q = np.array([1e4, 3e4, 2e4])
        e = np.array([5e4, 1.1e5, 8e4])
        lam = pf.calibrate_lambda(p, q, e, delta=1 / 3)
        lam_scaled = pf.calibrate_lambda(3.0 * p, q, 3.0 * e, delta=1 / 3)
        assert lam_scaled == pytest.approx(3.0 * lam, rel=1e-12)

    def test_grid_never_beats_closed_form(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            n = rng.integers(1, 6)
            p = rng.uniform(4.0, 12.0, size=n)
            q = rng.uniform(1e3, 1e5, size=n)
            e = rng.uniform(1e4, 5e5, size=n)
            lam = pf.calibrate_lambda(p, q, e, delta=1 / 3)
            lam_grid, obj_grid = grid_lambda(p, q, e, delta=1 / 3)
            assert lambda_objective(lam, p, q, e, 1 / 3) <= obj_grid + 1e-9
            if -50.0 < lam < 50.0:
                assert lam == pytest.approx(lam_grid, abs=1e-3)

    def test_stationarity(self):
        p = np.array([8.0, 6.5])
        q = np.array([1e4, 3e4])
        e = np.array([5e4, 1.1e5])
        lam = pf.calibrate_lambda(p, q, e, delta=1 / 3)
        h = 1e-6
        up = lambda_objective(lam + h, p, q, e, 1 / 3)
        dn = lambda_objective(lam - h, p, q, e, 1 / 3)
        mid = lambda_objective(lam, p, q, e, 1 / 3)
        assert mid <= up and mid <= dn

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            pf.calibrate_lambda([], [], [], delta=1 / 3)


class TestMu:
    def test_euler_identity_example(self):
        r = make_record(price_base=8.0, premium=0.0, bycatch=0.0, catch=10_000.0,
                        levels=(60_000.0,) + (0.0,) * 5)
        mu = pf.calibrate_mu(r, shadow_value=-7.70, delta=1 / 3)
        assert mu == pytest.approx(17.70, rel=1e-12)

    def test_zero_residual_case(self):
        r = make_record(price_base=9.0, premium=0.0, bycatch=0.0, catch=10_000.0,
                        levels=(30_000.0,) + (0.0,) * 5)
        # expenditure = p * q * delta and no shadow value -> no residual
        assert pf.calibrate_mu(r, shadow_value=0.0, delta=1 / 3) == pytest.approx(0.0, abs=1e-12)


class TestCalibrateFleet:
    def test_foc_holds_exactly(self, fleet_model):
        for r in fleet_model.records[:25]:
            p = fleet_model.params_for(r)
            price = r.price + p.unobserved_value + fleet_model.shadow_values[r.target]
            residual = price * pf.marginal_products(p, r.input_levels) - r.prices
            assert float(np.max(np.abs(residual[p.active]))) < 1e-10

    def test_base_acl_is_total_catch(self, fleet_model):
        for t in fleet_model.targets:
            total = float(np.sum([r.catch_lb for r in fleet_model.records_for(t)]))
            assert fleet_model.base_acl[t] == total

    def test_reproduces_catch(self, fleet_model):
        for r in fleet_model.records[:25]:
            p = fleet_model.params_for(r)
            assert pf.production(p, r.input_levels) == pytest.approx(r.catch_lb, rel=1e-12)

    def test_single_record_fleet(self):
        model = pf.calibrate_fleet([make_record(catch=200_000.0)], pf.GlobalAssumptions())
        report = pf.verify_calibration(model)
        assert report.max_output_error_pct < 1e-6
        assert report.max_input_error_pct < 1e-8

    def test_duplicate_keys_rejected(self):
        with pytest.raises(ValidationError, match="duplicate"):
            pf.calibrate_fleet([make_record(), make_record()], pf.GlobalAssumptions())

    def test_mixed_input_sets_rejected(self):
        a = make_record()
        b = pf.VesselTargetRecord(
            vessel_id="V002", target="WCPO", catch_lb=5_000.0, price_base=7.99,
            price_premium=0.1, price_bycatch=0.2, input_levels=np.array([1.0, 2.0]),
            input_ids=("fuel", "bait"),
        )
        with pytest.raises(ValidationError, match="input categories"):
            pf.calibrate_fleet([a, b], pf.GlobalAssumptions())

    def test_cobb_douglas_assumptions(self):
        records = synthetic_records(seed=3, n=10)
        model = pf.calibrate_fleet(records, pf.GlobalAssumptions(eta=0.5, sigma=1.0))
        assert model.assumptions.rho == 0.0
        report = pf.verify_calibration(model)
        assert report.max_output_error_pct < 1e-6
        assert report.max_input_error_pct < 1e-8


class TestVerify:
    def test_fresh_fleet_reproduces(self, fleet_model):
        report = pf.verify_calibration(fleet_model)
        assert report.max_input_error_pct < 1e-8
        assert report.max_output_error_pct < 1e-6
        assert report.max_foc_residual < 1e-10
        assert set(report.targets["target"]) == set(fleet_model.targets)
        assert len(report.records) == len(fleet_model.records)

    def test_perturbed_alpha_isolated(self, small_model):
        bad_key = small_model.records[0].key
        params = dict(small_model.params)
        orig = params[bad_key]
        params[bad_key] = pf.CesParams(
            alpha=orig.alpha * 1.01, beta=orig.beta, delta=orig.delta, rho=orig.rho,
            unobserved_value=orig.unobserved_value,
        )
        tampered = pf.FleetModel(
            assumptions=small_model.assumptions,
            records=small_model.records,
            params=params,
            shadow_values=small_model.shadow_values,
            base_acl=small_model.base_acl,
        )
        report = pf.verify_calibration(tampered)
        frame = report.records.set_index(["vessel_id", "target"])
        bad_row = frame.loc[bad_key]
        assert bad_row["foc_residual"] > 1e-4
        clean = frame.drop(index=bad_key)
        same_target = clean[clean.index.get_level_values(1) == bad_key[1]]
        assert bad_row["foc_residual"] > 10 * same_target["foc_residual"].max()

    def test_recalibration_idempotent(self, small_model):
        solution = pf.solve_equilibrium(small_model, small_model.base_acl)
        resimulated = []
        for r in small_model.records:
            alloc = solution.allocations[r.key]
            resimulated.append(
                pf.VesselTargetRecord(
                    vessel_id=r.vessel_id, target=r.target, catch_lb=alloc.output,
                    price_base=r.price_base, price_premium=r.price_premium,
                    price_bycatch=r.price_bycatch, input_levels=alloc.input_levels,
                    input_ids=r.input_ids, hooks=r.hooks,
                )
            )
        again = pf.calibrate_fleet(resimulated, small_model.assumptions)
        for r in small_model.records:
            a = small_model.params_for(r)
            b = again.params[r.key]
            assert b.alpha == pytest.approx(a.alpha, rel=1e-6)
            assert b.beta == pytest.approx(a.beta, rel=1e-6)
            assert b.unobserved_value == pytest.approx(a.unobserved_value, rel=1e-6)
        for t in small_model.targets:
            assert again.shadow_values[t] == pytest.approx(small_model.shadow_values[t], rel=1e-6)
