"""Net present cost, levelized cost of energy and CO2 emissions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .components import FuelSpec
from .dispatch import ComponentCatalog, SimulationResult, SystemConfiguration

CO2_PER_C = 3.667  # mass ratio CO2 / C, 44.01 / 12.011 rounded
COST_ITEMS = ("capital", "replacement", "om", "fuel", "salvage")


@dataclass(frozen=True)
class EconomicParams:
    nominal_interest: float = 0.08
    inflation: float = 0.04
    project_lifetime_yr: int = 25
    include_salvage: bool = True
    carbon_penalty_per_t: float = 0.0  # $/t CO2

    def __post_init__(self):
        if 1.0 + self.inflation <= 0:
            raise ValueError("economics.inflation must exceed -1")
        if self.project_lifetime_yr < 1 or int(self.project_lifetime_yr) != self.project_lifetime_yr:
            raise ValueError("economics.project_lifetime_yr must be an integer >= 1")
        if self.carbon_penalty_per_t < 0:
            raise ValueError("economics.carbon_penalty_per_t must be non-negative")
        if self.real_interest <= -1:
            raise ValueError("economics: real interest rate must exceed -1")

    @property
    def real_interest(self) -> float:
        return real_interest(self.nominal_interest, self.inflation)


def real_interest(nominal: float, inflation: float) -> float:
    """Real discount rate ``(i' - f) / (1 + f)``."""
    if 1.0 + inflation <= 0:
        raise ValueError("inflation must exceed -1")
    return (nominal - inflation) / (1.0 + inflation)


def crf(i: float, n: float) -> float:
    """Capital recovery factor; tends to ``1/n`` as ``i`` goes to zero."""
    if n < 1:
        raise ValueError("crf needs n >= 1")
    if i <= -1:
        raise ValueError("crf needs i > -1")
    if i == 0:
        return 1.0 / n
    # i / (1 - (1+i)^-n), written to avoid cancellation for small i
    return i / -math.expm1(-n * math.log1p(i))


def present_value_annuity(i: float, n: float) -> float:
    """Present value of 1 paid at the end of each of ``n`` years."""
    return 1.0 / crf(i, n)


def discount(i: float, t: float) -> float:
    return (1.0 + i) ** (-t)


def co2_mass(fuel_l: float, fuel: FuelSpec) -> float:
    """CO2 emitted by burning ``fuel_l`` litres, kg."""
    if fuel_l < 0:
        raise ValueError("fuel volume must be non-negative")
    tonnes = CO2_PER_C * fuel_l * fuel.heating_value * fuel.carbon_emission_factor * 1e-6 * fuel.oxidized_fraction
    return tonnes * 1000.0


def component_flows(capital: float, replacement: float, life_yr: float, annual_om: float,
                    annual_fuel: float, econ: EconomicParams) -> dict:
    """Present value of one component's cash flows over the project.

    Capital is spent at year 0 and renewed at each whole multiple of
    ``life_yr`` before the horizon. Whatever life the last unit has left at
    the horizon is credited back linearly as salvage (a negative entry).
    ``life_yr`` may be ``inf`` for a component that never wears out.
    """
    if life_yr <= 0:
        raise ValueError("component life must be positive")
    i = econ.real_interest
    n = econ.project_lifetime_yr
    repl = 0.0
    last = 0.0
    if math.isfinite(life_yr):
        k = 1
        while k * life_yr < n - 1e-9:
            last = k * life_yr
            repl += replacement * discount(i, last)
            k += 1
    salvage = 0.0
    if econ.include_salvage and (capital > 0 or replacement > 0):
        remaining = 1.0 if not math.isfinite(life_yr) else max(life_yr - (n - last), 0.0) / life_yr
        basis = replacement if last > 0 else capital
        salvage = -basis * remaining * discount(i, n)
    annuity = present_value_annuity(i, n)
    return {
        "capital": capital,
        "replacement": repl,
        "om": annual_om * annuity,
        "fuel": annual_fuel * annuity,
        "salvage": salvage,
    }


@dataclass(frozen=True)
class EconomicSummary:
    npc: float
    annualized: float
    coe: float
    co2_kg_yr: float
    breakdown: dict = field(default_factory=dict)

    def totals(self) -> dict:
        return {item: sum(c[item] for c in self.breakdown.values()) for item in COST_ITEMS}

    def to_dict(self) -> dict:
        return {
            "npc": self.npc,
            "annualized": self.annualized,
            "coe": self.coe,
            "co2_kg_yr": self.co2_kg_yr,
            "totals": self.totals(),
            "breakdown": self.breakdown,
        }


def npc_from_cashflows(config: SystemConfiguration, sim: SimulationResult,
                       catalog: ComponentCatalog = ComponentCatalog(),
                       econ: EconomicParams = EconomicParams()) -> EconomicSummary:
    """Cost the simulated year over the project horizon.

    Battery life comes from lifetime throughput, generator life from run
    hours, the rest from calendar lifetimes. Every year repeats the simulated
    one.
    """
    if sim.load_served <= 0:
        raise ValueError("cost of energy is undefined when no load is served")
    inf = math.inf
    parts = {}

    pv = catalog.pv
    parts["pv"] = component_flows(
        pv.capital_per_kw * config.pv_kw, pv.replacement_per_kw * config.pv_kw, pv.lifetime_yr,
        pv.om_per_kw_yr * config.pv_kw, 0.0, econ)

    w = catalog.wind
    parts["wind"] = component_flows(
        w.capital * config.wind_count, w.replacement * config.wind_count, w.lifetime_yr,
        w.om_per_yr * config.wind_count, 0.0, econ)

    g = catalog.generator
    for n, (kw, hours, kwh) in enumerate(zip(config.gen_kw, sim.gen_hours, sim.gen_kwh), start=1):
        # the fuel curve is linear, so annual fuel follows from hours and energy
        litres = g.fuel_curve_intercept * kw * hours + g.fuel_curve_slope * kwh if kw > 0 else 0.0
        life = g.lifetime_hours / hours if hours > 0 else inf
        parts[f"generator{n}"] = component_flows(
            g.capital_per_kw * kw, g.replacement_per_kw * kw, life,
            g.om_per_hr * hours, litres * g.fuel.price_per_l, econ)

    b = catalog.battery
    units = config.battery_strings * b.batteries_per_string
    life = units * b.lifetime_throughput_kwh / sim.battery_throughput if sim.battery_throughput > 0 else inf
    parts["battery"] = component_flows(
        b.capital_per_unit * units, b.replacement_per_unit * units, life,
        b.om_per_unit_yr * units, 0.0, econ)

    c = catalog.converter
    parts["converter"] = component_flows(
        c.capital_per_kw * config.converter_kw, c.replacement_per_kw * config.converter_kw,
        c.lifetime_yr, c.om_per_kw_yr * config.converter_kw, 0.0, econ)

    co2 = co2_mass(sim.fuel_total, g.fuel)
    if econ.carbon_penalty_per_t > 0:
        parts["emissions"] = component_flows(0.0, 0.0, inf, co2 / 1000.0 * econ.carbon_penalty_per_t,
                                             0.0, econ)

    npc = sum(sum(v.values()) for v in parts.values())
    annualized = npc * crf(econ.real_interest, econ.project_lifetime_yr)
    return EconomicSummary(npc, annualized, annualized / sim.load_served, co2, parts)
