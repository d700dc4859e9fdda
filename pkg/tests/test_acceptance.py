"""Release gate: ten numbered end-to-end checks.

Each test prints a single ``ACCEPTANCE <n>: PASS/FAIL`` line (visible with
``pytest -s``) and fails the run when its criterion is not met.  Numbered
test names keep the criteria in order in verbose listings.
"""
from __future__ import annotations

import time

import numpy as np
import pytest

import pmpfleet as pf
from pmpfleet import PolicyScenario

from conftest import make_record, synthetic_records
from oracles import (
    central_difference_gradient,
    grid_best_profit,
    regression_r_squared,
    wilcoxon_brute,
)


def _verdict(num: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {num} failed: {detail}"


@pytest.fixture(scope="module")
def base_fleet():
    records = synthetic_records(seed=42, n=128)
    return records, pf.calibrate_fleet(records, pf.GlobalAssumptions())


def test_01_calibration_reproduction():
    records = synthetic_records(seed=42, n=128)
    start = time.perf_counter()
    model = pf.calibrate_fleet(records, pf.GlobalAssumptions())
    report = pf.verify_calibration(model)
    elapsed = time.perf_counter() - start
    ok = (
        len(records) >= 128
        and report.max_input_error_pct < 1e-8
        and report.max_output_error_pct < 1e-6
        and elapsed < 1.0
    )
    _verdict(
        1,
        ok,
        f"{len(records)} records; max input error {report.max_input_error_pct:.2e}% "
        f"(< 1e-8%), max output error {report.max_output_error_pct:.2e}% (< 1e-6%), "
        f"{elapsed:.3f} s (< 1 s)",
    )


def test_02_assumption_constants():
    delta = pf.delta_from_eta(0.5)
    rho = pf.rho_from_sigma(0.17)
    ok = abs(delta - 1.0 / 3.0) <= 1e-12 and abs(rho - (-4.8823529412)) <= 1e-9
    _verdict(2, ok, f"delta(0.5) = {delta!r} (1/3 ± 1e-12); rho(0.17) = {rho!r} (−4.8823529412 ± 1e-9)")


def test_03_supply_law(base_fleet):
    _, model = base_fleet
    worst = 0.0
    checked = 0
    for r in model.records[:100]:
        params = model.params_for(r)
        k_cost = pf.cost_scale(params)
        base_price = r.price + params.unobserved_value + model.shadow_values[r.target]
        y_base = pf.output_at_price(base_price, k_cost, params.delta)
        for k in (0.5, 2.0, 4.0):
            ratio = pf.output_at_price(k * base_price, k_cost, params.delta) / y_base
            worst = max(worst, abs(ratio / k**0.5 - 1.0))
        checked += 1
    ok = checked == 100 and worst < 1e-8
    _verdict(3, ok, f"y*(kP)/y*(P) vs k^0.5 on {checked} vessels, k in {{0.5,2,4}}: max rel dev {worst:.2e} (< 1e-8)")


def test_04_kkt_suite():
    rng = np.random.default_rng(2024)
    instances = 0
    seed = 0
    worst_gap = worst_slack = 0.0
    while instances < 50 and seed < 200:
        seed += 1
        frame = pf.generate_synthetic_fleet(seed=seed, n_vessels=int(rng.integers(2, 11)))
        records = [pf.zero_profit_rescale(r) for r in pf.records_from_frame(frame)]
        model = pf.calibrate_fleet(records, pf.GlobalAssumptions())
        if any(v > 0.0 for v in model.shadow_values.values()):
            continue  # base limit not binding: outside the solver's contract
        acls = {t: float(rng.uniform(0.5, 1.2)) * v for t, v in model.base_acl.items()}
        solution = pf.solve_equilibrium(model, acls)
        for t in model.targets:
            theta = solution.multipliers[t]
            assert theta >= 0.0
            gap = acls[t] - solution.aggregates[t]
            assert gap >= -1e-9 * acls[t]  # never exceeds the limit
            if solution.binding[t]:
                worst_gap = max(worst_gap, abs(gap) / acls[t])
            worst_slack = max(worst_slack, theta * abs(gap) / acls[t])
        instances += 1

    # profit dominance against the lattice oracle on tiny instances
    dominance_ok = True
    for n, steps, lattice_seed in ((2, 201, 101), (3, 81, 202)):
        records = []
        lattice_rng = np.random.default_rng(lattice_seed)
        for i in range(n):
            levels = lattice_rng.uniform(20_000.0, 150_000.0, size=6)
            price = 7.99 + 0.5 + 0.3
            catch = float(lattice_rng.uniform(4.6, 5.8)) * levels.sum() / price
            records.append(make_record(vessel=f"G{i}", catch=catch, levels=tuple(levels)))
        model = pf.calibrate_fleet(records, pf.GlobalAssumptions())
        target = model.targets[0]
        acl = 0.7 * model.base_acl[target]
        solution = pf.solve_equilibrium(model, {target: acl})
        values = [r.price + model.params_for(r).unobserved_value for r in model.records]
        scales = [pf.cost_scale(model.params_for(r)) for r in model.records]
        best = grid_best_profit(
            values, scales, 1.0 / model.assumptions.delta, acl,
            [1.5 * r.catch_lb for r in model.records], steps,
        )
        solver_profit = sum(a.profit for a in solution.allocations.values())
        dominance_ok &= solver_profit >= best - 1e-9 * abs(best)
        dominance_ok &= best >= solver_profit * (1.0 - 1e-3)

    ok = instances == 50 and worst_gap < 1e-9 and worst_slack < 1e-6 and dominance_ok
    _verdict(
        4,
        ok,
        f"{instances} instances: theta >= 0, max feasibility gap {worst_gap:.2e} rel (< 1e-9), "
        f"max compl. slackness {worst_slack:.2e} (< 1e-6); grid-oracle dominance on 2- and 3-vessel instances: "
        f"{'yes' if dominance_ok else 'no'}",
    )


def test_05_policy_simulation(base_fleet):
    _, model = base_fleet
    plus = pf.run_policy(model, PolicyScenario(name="up", acl_changes_pct={"WCPO": 10.0}))
    minus = pf.run_policy(model, PolicyScenario(name="down", acl_changes_pct={"WCPO": -10.0}))
    row_plus = plus.targets.set_index("target").loc["WCPO"]
    row_minus = minus.targets.set_index("target").loc["WCPO"]
    exact = (
        bool(row_plus["binding"])
        and bool(row_minus["binding"])
        and abs(row_plus["change_pct"] - 10.0) < 1e-6
        and abs(row_minus["change_pct"] + 10.0) < 1e-6
    )
    p = plus.vessels[plus.vessels["target"] == "WCPO"].set_index("vessel_id")["change_pct"]
    m = minus.vessels[minus.vessels["target"] == "WCPO"].set_index("vessel_id")["change_pct"]
    cv_plus = float(p.std(ddof=1)) / abs(float(p.mean()))
    cv_minus = float(m.std(ddof=1)) / abs(float(m.mean()))
    mirrored = (
        p.sort_values(ascending=False).index.tolist() == m.sort_values(ascending=True).index.tolist()
    )

    clones = [make_record(vessel=f"C{i:02d}", catch=200_000.0) for i in range(8)]
    clone_model = pf.calibrate_fleet(clones, pf.GlobalAssumptions())
    clone_run = pf.run_policy(clone_model, PolicyScenario(name="down", acl_changes_pct={"WCPO": -10.0}))
    clone_spread = float(clone_run.vessels["change_pct"].std(ddof=1))

    ok = exact and cv_plus > 0.0 and cv_minus > 0.0 and mirrored and clone_spread == 0.0
    _verdict(
        5,
        ok,
        f"aggregate {row_plus['change_pct']:+.6f}%/{row_minus['change_pct']:+.6f}% (binding), "
        f"CV {cv_plus:.3f}/{cv_minus:.3f} (> 0), mirrored vessel ordering: {mirrored}, "
        f"clone-fleet spread {clone_spread} (= 0)",
    )


def _random_params(rng: np.random.Generator) -> pf.CesParams:
    n = int(rng.integers(2, 7))
    beta = rng.dirichlet(np.full(n, 2.0))
    beta = np.clip(beta, 0.02, None)
    beta = beta / beta.sum()
    rho = float(rng.choice([pf.rho_from_sigma(0.17), -1.0, 0.0, 0.5]))
    return pf.CesParams(alpha=float(rng.uniform(0.5, 3.0)), beta=beta, delta=1 / 3, rho=rho)


def test_06_gradient_checks():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        params = _random_params(rng)
        x = rng.uniform(0.5, 3.0, size=params.n_inputs)
        analytic = pf.marginal_products(params, x)
        numeric = central_difference_gradient(params, x)
        denom = np.maximum(np.abs(numeric), 1e-12)
        worst = max(worst, float(np.max(np.abs(analytic - numeric) / denom)))
    ok = worst < 1e-5
    _verdict(6, ok, f"marginal products vs central differences, 1000 points: max rel error {worst:.2e} (< 1e-5)")


def test_07_euler_and_cost_homogeneity():
    rng = np.random.default_rng(11)
    worst_euler = 0.0
    for _ in range(1000):
        params = _random_params(rng)
        x = rng.uniform(0.5, 3.0, size=params.n_inputs)
        lhs = float(x @ pf.marginal_products(params, x))
        rhs = params.delta * pf.production(params, x)
        worst_euler = max(worst_euler, abs(lhs / rhs - 1.0))
    worst_cost = 0.0
    for _ in range(200):
        params = _random_params(rng)
        y = float(rng.uniform(0.5, 50.0))
        c2, c1 = pf.production_cost(params, 2.0 * y), pf.production_cost(params, y)
        worst_cost = max(worst_cost, abs(c2 / (8.0 * c1) - 1.0))
    ok = worst_euler < 1e-10 and worst_cost < 1e-8
    _verdict(
        7,
        ok,
        f"Euler identity max rel dev {worst_euler:.2e} (< 1e-10, 1000 points); "
        f"C(2y)=8·C(y) max rel dev {worst_cost:.2e} (< 1e-8)",
    )


def test_08_statistics_oracles():
    res5 = pf.wilcoxon_signed_rank([1.0, 2.0, 0.5, 3.0, 1.5])
    canonical = res5.statistic == 15.0 and abs(res5.p_value - 0.0625) < 1e-12

    enum_ok = True
    rng = np.random.default_rng(3)
    n_fixtures = 0
    for n in range(2, 11):
        for tie_decimals in (None, 1):
            diffs = rng.normal(scale=2.0, size=n)
            if tie_decimals is not None:
                diffs = np.round(diffs, tie_decimals)
                diffs = diffs[diffs != 0.0]
                if diffs.size < 2:
                    continue
            ours = pf.wilcoxon_signed_rank(diffs, method="exact")
            stat, p = wilcoxon_brute(diffs)
            enum_ok &= abs(ours.statistic - stat) < 1e-9 and abs(ours.p_value - p) < 1e-12
            n_fixtures += 1

    approx_ok = True
    for trial in range(5):
        diffs = np.random.default_rng(100 + trial).normal(loc=0.3, size=20)
        exact = pf.wilcoxon_signed_rank(diffs, method="exact").p_value
        approx = pf.wilcoxon_signed_rank(diffs, method="approx").p_value
        approx_ok &= abs(exact - approx) < 0.01

    r2_ok = True
    rng2 = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng2.integers(3, 50))
        obs = rng2.normal(size=n)
        pred = 0.7 * obs + rng2.normal(scale=0.4, size=n)
        ours = pf.evaluate_predictions(pred, obs).r_squared
        oracle = regression_r_squared(pred, obs)
        r2_ok &= abs(ours - oracle) < 1e-9 + 1e-9 * abs(oracle)

    ok = canonical and enum_ok and approx_ok and r2_ok
    _verdict(
        8,
        ok,
        f"n=5 all-positive (W={res5.statistic:g}, p={res5.p_value:g}); exact matches 2^n enumeration on "
        f"{n_fixtures} fixtures (n ≤ 10); approx within 0.01 of exact at n=20; R²=r² on 100 vectors",
    )


def test_09_sensitivity_sweep(base_fleet):
    records, _ = base_fleet
    start = time.perf_counter()
    sweep = pf.sensitivity_sweep(
        records, PolicyScenario(name="baseline"), [0.3, 0.5, 0.8], [0.05, 0.17, 0.5]
    )
    elapsed = time.perf_counter() - start
    cells = sweep.table.groupby(["eta", "sigma"]).ngroups
    worst_err = float(sweep.table["max_input_error_pct"].max())
    ok = sweep.ok and cells == 9 and worst_err < 1e-6 and elapsed < 30.0
    _verdict(
        9,
        ok,
        f"3×3 grid: {cells}/9 cells ok, worst round-trip error {worst_err:.2e}% (< 1e-6%), "
        f"{elapsed:.1f} s (< 30 s)",
    )


def test_10_determinism_and_round_trips(tmp_path, base_fleet):
    records, model = base_fleet
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    pf.write_fleet(pf.generate_synthetic_fleet(seed=42, n_vessels=16), a, metadata={"seed": 42})
    pf.write_fleet(pf.generate_synthetic_fleet(seed=42, n_vessels=16), b, metadata={"seed": 42})
    bytes_ok = (
        a.read_bytes() == b.read_bytes()
        and (tmp_path / "a.meta.json").read_bytes() == (tmp_path / "b.meta.json").read_bytes()
    )

    checks: dict[str, bool] = {}

    fleet_path = tmp_path / "fleet.csv"
    pf.write_fleet(pf.fleet_to_frame(records), fleet_path, metadata={"base_year": 2012})
    reloaded = pf.load_fleet(fleet_path)
    checks["dataset"] = len(reloaded) == len(records) and all(
        x.key == y.key and x.catch_lb == y.catch_lb and np.array_equal(x.input_levels, y.input_levels)
        for x, y in zip(reloaded, records)
    )
    checks["metadata"] = pf.load_fleet_metadata(fleet_path)["base_year"] == 2012

    index = pf.CostIndexTable(base_year=2012, factors={2013: {"fuel": 1.25, "bait": 0.9}})
    pf.save_cost_index(index, tmp_path / "index.json")
    again = pf.load_cost_index(tmp_path / "index.json")
    checks["cost index"] = again.base_year == index.base_year and again.factors == index.factors

    pf.save_model(model, tmp_path / "model.json")
    model_back = pf.load_model(tmp_path / "model.json")
    checks["model"] = (
        model_back.shadow_values == model.shadow_values
        and model_back.base_acl == model.base_acl
        and all(
            np.array_equal(model_back.params[r.key].beta, model.params_for(r).beta)
            and model_back.params[r.key].alpha == model.params_for(r).alpha
            for r in model.records
        )
    )

    calibration = pf.verify_calibration(model)
    scenario_report = pf.run_policy(model, PolicyScenario(name="cut", acl_changes_pct={"WCPO": -10.0}))
    sweep = pf.sensitivity_sweep(records[:30], PolicyScenario(name="baseline"), [0.5], [0.17])
    for fmt in ("csv", "json"):
        path = tmp_path / f"calibration.{fmt}"
        pf.save_results(calibration, path, format=fmt)
        checks[f"calibration report ({fmt})"] = pf.load_calibration_report(path, format=fmt) == calibration
        path = tmp_path / f"scenario.{fmt}"
        pf.save_results(scenario_report, path, format=fmt)
        checks[f"scenario report ({fmt})"] = pf.load_scenario_report(path, format=fmt) == scenario_report
        path = tmp_path / f"sweep.{fmt}"
        pf.save_results(sweep, path, format=fmt)
        checks[f"sweep ({fmt})"] = pf.load_sweep_result(path, format=fmt) == sweep

    failed = [name for name, good in checks.items() if not good]
    ok = bytes_ok and not failed
    _verdict(
        10,
        ok,
        f"same-seed datasets byte-identical: {bytes_ok}; save→load identity for "
        f"{len(checks)} artifact types" + (f"; failed: {failed}" if failed else ""),
    )
