"""Acceptance suite: one test, and one summary line, per criterion."""

import math

import numpy as np

from hybridgrid.cli import main
from hybridgrid.components import BatterySpec, FuelSpec, battery_charge_eff, battery_discharge_eff
from hybridgrid.dispatch import (
    STRATEGIES,
    ComponentCatalog,
    HourlyRecord,
    SystemConfiguration,
    balance_residuals,
    simulate_year,
)
from hybridgrid.economics import co2_mass, crf, npc_from_cashflows, real_interest
from hybridgrid.load import DEFAULT_APPLIANCES, synthesize_load
from hybridgrid.optimizer import Axis, Evaluation, Feasibility, SearchSpace, enumerate_space, optimize
from hybridgrid.resource import WeibullParams, fit_weibull, weibull_cdf
from hybridgrid.thermal import HotWaterSpec, annual_demand, heater_energy

CAT = ComponentCatalog()
REFERENCE_SYSTEM = SystemConfiguration(600, 4, (100, 300, 500), 5, 500, "combined")
DIESEL_ONLY = SystemConfiguration(0, 0, (100, 300, 500), 0, 0, "load_following")
SOC = HourlyRecord._fields.index("soc_end")


def test_criterion_1_formula_oracles(verdict):
    eta = math.sqrt(0.96)
    spec = BatterySpec(round_trip_eff=0.96)
    verdict(1, "closed-form oracles", {
        "crf(0.06, 25)": abs(crf(0.06, 25) - 0.078227) <= 1e-6,
        "real_interest(0.08, 0.03)": abs(real_interest(0.08, 0.03) - 0.048544) <= 1e-6,
        "weibull_cdf(c)": abs(float(weibull_cdf(6.0, WeibullParams(2.0, 6.0))) - 0.632121) <= 1e-6,
        "sqrt(0.96) split": abs(battery_charge_eff(spec) * battery_discharge_eff(spec) - 0.96) <= 1e-12
        and abs(battery_charge_eff(spec) - eta) <= 1e-12,
        "heater 1000 kg x 10 C": abs(heater_energy(1000, 35, 25) - 11.611) <= 1e-3,
    })


def test_criterion_2_weibull_round_trip(verdict):
    rng = np.random.default_rng(2024)
    samples = 6.0 * rng.weibull(2.0, 100_000)
    p = fit_weibull(samples)
    verdict(2, "Weibull fit recovers k=2, c=6 from 1e5 samples", {
        "k within 2%": abs(p.k / 2.0 - 1) <= 0.02,
        "c within 2%": abs(p.c / 6.0 - 1) <= 0.02,
    })


def random_configs(n, seed):
    rng = np.random.default_rng(seed)
    space = SearchSpace()
    pick = lambda axis: float(rng.choice(axis.values()))  # noqa: E731
    return [
        SystemConfiguration(pick(space.pv_kw), int(pick(space.wind_count)),
                            tuple(pick(a) for a in space.gen_kw), int(pick(space.battery_strings)),
                            pick(space.converter_kw), str(rng.choice(STRATEGIES)))
        for _ in range(n)
    ]


def test_criterion_3_energy_balance(verdict, penang_year, resort_load):
    hot = HotWaterSpec()
    min_soc = CAT.battery.min_soc
    worst = 0.0
    records = 0
    soc_ok = True
    for cfg in random_configs(100, seed=3):
        sim = simulate_year(cfg, CAT, penang_year, resort_load, hot_water=hot, keep_records=True)
        worst = max(worst, float(np.max(np.abs(balance_residuals(sim.records)))))
        records += len(sim.records)
        soc = sim.records[:, SOC]
        floor = min_soc if cfg.battery_strings > 0 else 0.0
        soc_ok &= bool(np.all(soc >= floor - 1e-12) and np.all(soc <= 1 + 1e-12))
    verdict(3, f"hourly balance over {records} records, max residual {worst:.2e} kWh", {
        "876000 records": records == 876_000,
        "balance within 1e-6 kWh": worst <= 1e-6,
        "SOC within bounds": soc_ok,
    })


def test_criterion_4_diversion_demand(verdict):
    spec = HotWaterSpec(guests_per_day=250, liters_per_guest_day=200)
    mwh = annual_demand(spec) / 1000
    verdict(4, f"250 guests/day hot-water demand {mwh:.2f} MWh/yr", {
        "delta T 19.5 C": abs(spec.t_f - spec.t_in - 19.5) < 1e-12,
        "413.2 MWh +/- 0.5%": abs(mwh / 413.2 - 1) <= 0.005,
    })


def test_criterion_5_load_calibration(verdict):
    load = synthesize_load(DEFAULT_APPLIANCES, seed=5, calibrate_to_targets=True)
    verdict(5, f"calibrated load {load.daily_mean:.3f} kWh/day, peak {load.peak:.3f} kW", {
        "daily mean 19072 +/- 1": abs(load.daily_mean - 19_072) <= 1,
        "peak 2068 +/- 1": abs(load.peak - 2068) <= 1,
    })


def point(v):
    return Axis(v, v, 1)


def test_criterion_6_optimizer_brute_force(verdict, penang_year, resort_load):
    space = SearchSpace(pv_kw=Axis(0, 600, 300), wind_count=Axis(0, 4, 2),
                        gen_kw=(point(500), point(500), Axis(0, 500, 500)),
                        battery_strings=Axis(0, 5, 5), converter_kw=point(500),
                        strategies=("load_following", "cycle_charging"))
    ev = Evaluation(penang_year, resort_load, CAT, hot_water=HotWaterSpec(),
                    feasibility=Feasibility(0.05))
    ranked = optimize(space, ev)
    # independent exhaustive pass
    npcs = []
    for cfg in enumerate_space(space):
        sim = simulate_year(cfg, ev.catalog, ev.resources, ev.load, ev.params, ev.hot_water)
        if sim.load_served > 0 and sim.unmet_fraction <= 0.05:
            npcs.append(npc_from_cashflows(cfg, sim, ev.catalog, ev.economics).npc)
    feasible = [r for r in ranked if r.feasible]
    keys = [(r.economics.npc, r.economics.co2_kg_yr, r.configuration.sort_key()) for r in feasible]
    verdict(6, f"rank 1 of {space.count} configurations equals brute-force minimum", {
        "space <= 200": space.count <= 200,
        "rank 1 NPC is exhaustive minimum": bool(npcs) and feasible[0].economics.npc == min(npcs),
        "feasible count agrees": len(feasible) == len(npcs),
        "strict total order": all(a < b for a, b in zip(keys, keys[1:])),
        "ranks consecutive": [r.rank for r in ranked] == list(range(1, len(ranked) + 1)),
        "infeasible ranked last": all(not r.feasible for r in ranked[len(feasible):]),
    })


def test_criterion_7_reference_system_bands(verdict, penang_year, resort_load):
    hybrid = simulate_year(REFERENCE_SYSTEM, CAT, penang_year, resort_load, hot_water=HotWaterSpec())
    diesel = simulate_year(DIESEL_ONLY, CAT, penang_year, resort_load, hot_water=HotWaterSpec())
    fuel = CAT.generator.fuel
    ratio = co2_mass(hybrid.fuel_total, fuel) / co2_mass(diesel.fuel_total, fuel)
    rf, ee = hybrid.renewable_fraction, hybrid.excess_fraction
    verdict(7, f"reference system RF {100 * rf:.1f} %, excess {100 * ee:.2f} % of production, "
               f"CO2 ratio to diesel-only {ratio:.3f}", {
        "RF in [20%, 45%]": 0.20 <= rf <= 0.45,
        "excess in [5%, 15%]": 0.05 <= ee <= 0.15,
        "CO2 < 0.6 x diesel-only": ratio < 0.6,
    })


def test_criterion_8_co2_per_litre(verdict):
    # by hand: 36.4 MJ/L = 36.4e-6 TJ/L; x 20 t C/TJ x 0.99 oxidised; x 44/12 for CO2; t -> kg
    by_hand = 36.4e-6 * 20 * 0.99 * (44.0 / 12.0) * 1000
    got = co2_mass(1.0, FuelSpec())
    verdict(8, f"diesel CO2 {got:.4f} kg/L (by hand {by_hand:.4f})", {
        "hand chain 2.64 +/- 2%": abs(by_hand / 2.64 - 1) <= 0.02,
        "library 2.64 +/- 2%": abs(got / 2.64 - 1) <= 0.02,
        "library agrees with hand chain": abs(got / by_hand - 1) <= 1e-3,
    })


TOY = """\
seed: 9
feasibility: {max_unmet_fraction: 0.05}
search:
  pv_kw: {min: 0, max: 600, step: 600}
  wind_count: {min: 0, max: 4, step: 4}
  gen_kw:
  - {min: 500, max: 500, step: 1}
  - {min: 500, max: 500, step: 1}
  - {min: 0, max: 500, step: 500}
  battery_strings: {min: 0, max: 5, step: 5}
  converter_kw: {min: 500, max: 500, step: 1}
  strategies: [combined]
sensitivity:
  solar: {min: 3.8, max: 4.6, step: 0.8}
  wind: {min: 4.2, max: 4.2, step: 1}
"""


def test_criterion_9_determinism(verdict, tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text(TOY)
    runs = {
        "simulate": (["simulate", "--trace"], ["trace.csv", "report.json"]),
        "optimize": (["optimize"], ["ranked.csv", "utilization.csv"]),
        "sensitivity": (["sensitivity"], ["sensitivity.csv"]),
    }
    checks = {}
    for command, (argv, files) in runs.items():
        outputs = []
        for tag, jobs in (("a", 1), ("b", 1), ("c", 3)):
            out = tmp_path / f"{command}-{tag}"
            extra = ["--jobs", str(jobs)] if command != "simulate" else []
            rc = main(argv + [str(cfg), "--output-dir", str(out)] + extra)
            checks[f"{command} run {tag} exit 0"] = rc == 0
            outputs.append([(out / f).read_bytes() for f in files + ["manifest.json"]])
        checks[f"{command} byte-identical across repeats and --jobs"] = \
            outputs[0] == outputs[1] == outputs[2]
    verdict(9, "repeated commands give byte-identical outputs across --jobs", checks)
