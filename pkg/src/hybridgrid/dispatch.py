"""Hour-by-hour dispatch of a PV/wind/diesel/battery system with a diversion load.

Bus layout: PV and the battery sit on a DC bus, wind, the generators, the
load and the water heater on the AC bus. One bidirectional converter joins
them and carries the net DC/AC exchange of each hour.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import HOURS_PER_YEAR
from .components import (
    BatterySpec,
    ConverterSpec,
    GeneratorSpec,
    PvSpec,
    WindTurbineSpec,
    bank_capacity,
    battery_charge_eff,
    battery_discharge_eff,
    generator_fuel,
    pv_power,
    wind_power,
)
from .thermal import DiversionLedger, HotWaterSpec, absorb, annual_demand

STRATEGIES = ("load_following", "cycle_charging", "generator_order", "combined")
N_GENERATORS = 3
EPS = 1e-9


@dataclass(frozen=True)
class SystemConfiguration:
    """One candidate sizing."""

    pv_kw: float = 0.0
    wind_count: int = 0
    gen_kw: tuple = (0.0, 0.0, 0.0)
    battery_strings: int = 0
    converter_kw: float = 0.0
    strategy: str = "load_following"

    def __post_init__(self):
        gens = tuple(float(g) for g in self.gen_kw)
        if len(gens) != N_GENERATORS:
            raise ValueError(f"gen_kw needs {N_GENERATORS} ratings, got {len(gens)}")
        object.__setattr__(self, "gen_kw", gens)
        if self.pv_kw < 0 or self.converter_kw < 0 or min(gens) < 0:
            raise ValueError("sizes must be non-negative")
        if self.wind_count < 0 or self.battery_strings < 0:
            raise ValueError("wind_count and battery_strings must be non-negative")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown dispatch strategy {self.strategy!r}; choose from {STRATEGIES}")

    def sort_key(self) -> tuple:
        return (self.pv_kw, self.wind_count, self.gen_kw, self.battery_strings,
                self.converter_kw, STRATEGIES.index(self.strategy))

    @property
    def architecture(self) -> str:
        """Component families present, e.g. ``"PV/Wind/Diesel/Battery"``."""
        parts = []
        if self.pv_kw > 0:
            parts.append("PV")
        if self.wind_count > 0:
            parts.append("Wind")
        if any(g > 0 for g in self.gen_kw):
            parts.append("Diesel")
        if self.battery_strings > 0:
            parts.append("Battery")
        return "/".join(parts) if parts else "None"


@dataclass(frozen=True)
class ComponentCatalog:
    """Per-unit technical and cost data shared by every configuration."""

    pv: PvSpec = PvSpec()
    wind: WindTurbineSpec = WindTurbineSpec()
    generator: GeneratorSpec = GeneratorSpec()
    battery: BatterySpec = BatterySpec()
    converter: ConverterSpec = ConverterSpec()


@dataclass(frozen=True)
class DispatchParams:
    reserve_pv_fraction: float = 0.30
    reserve_wind_fraction: float = 0.50
    cc_setpoint_soc: float = 0.80
    initial_soc: float = 1.0

    def __post_init__(self):
        if self.reserve_pv_fraction < 0 or self.reserve_wind_fraction < 0:
            raise ValueError("reserve fractions must be non-negative")
        if not 0 <= self.cc_setpoint_soc <= 1 or not 0 <= self.initial_soc <= 1:
            raise ValueError("cc_setpoint_soc and initial_soc must lie in [0, 1]")


@dataclass(frozen=True)
class DispatchState:
    soc: float
    gen_hours: tuple = (0.0, 0.0, 0.0)
    gen_on: tuple = (False, False, False)
    hour_index: int = 0
    tank_kwh: float = 0.0


class HourlyRecord(NamedTuple):
    pv_kw: float
    wind_kw: float
    gen1_kw: float
    gen2_kw: float
    gen3_kw: float
    load_kw: float
    batt_charge_kw: float
    batt_discharge_kw: float
    diverted_kw: float
    dumped_kw: float
    converter_loss_kw: float
    unmet_kw: float
    fuel_l: float
    soc_end: float

    @property
    def gen_kw(self) -> tuple:
        return (self.gen1_kw, self.gen2_kw, self.gen3_kw)

    @property
    def load_served(self) -> float:
        return self.load_kw - self.unmet_kw

    def balance_residual(self) -> float:
        """Sources minus sinks for the hour, kWh; zero when the books close."""
        sources = self.pv_kw + self.wind_kw + self.gen1_kw + self.gen2_kw + self.gen3_kw + self.batt_discharge_kw
        sinks = (self.load_served + self.batt_charge_kw + self.diverted_kw + self.dumped_kw
                 + self.converter_loss_kw)
        return sources - sinks


TRACE_COLUMNS = ("hour",) + HourlyRecord._fields


@dataclass(frozen=True, eq=False)
class SimulationResult:
    pv_kwh: float
    wind_kwh: float
    gen_kwh: tuple
    load_kwh: float
    load_served: float
    excess_total: float
    excess_diverted: float
    excess_dumped: float
    fuel_total: float
    gen_hours: tuple
    renewable_fraction: float
    unmet_load: float
    battery_throughput: float
    battery_charge_kwh: float
    battery_discharge_kwh: float
    converter_loss: float
    initial_soc: float
    final_soc: float
    diversion: DiversionLedger
    records: np.ndarray | None = field(default=None, repr=False)

    @property
    def total_production(self) -> float:
        return self.pv_kwh + self.wind_kwh + sum(self.gen_kwh)

    @property
    def unmet_fraction(self) -> float:
        return self.unmet_load / self.load_kwh if self.load_kwh > 0 else 0.0

    @property
    def excess_fraction(self) -> float:
        total = self.total_production
        return self.excess_total / total if total > 0 else 0.0

    def hourly_records(self) -> list[HourlyRecord]:
        if self.records is None:
            raise ValueError("simulation was run without keeping records")
        return [HourlyRecord(*map(float, row)) for row in self.records]

    def summary(self) -> dict:
        total = self.total_production
        share = (lambda x: x / total if total > 0 else 0.0)
        return {
            "pv_kwh": self.pv_kwh,
            "wind_kwh": self.wind_kwh,
            "gen_kwh": list(self.gen_kwh),
            "total_production_kwh": total,
            "production_share": {
                "pv": share(self.pv_kwh),
                "wind": share(self.wind_kwh),
                "gen": [share(g) for g in self.gen_kwh],
            },
            "load_kwh": self.load_kwh,
            "load_served_kwh": self.load_served,
            "unmet_load_kwh": self.unmet_load,
            "unmet_fraction": self.unmet_fraction,
            "excess_total_kwh": self.excess_total,
            "excess_diverted_kwh": self.excess_diverted,
            "excess_dumped_kwh": self.excess_dumped,
            "excess_fraction": self.excess_fraction,
            "fuel_l": self.fuel_total,
            "gen_hours": list(self.gen_hours),
            "renewable_fraction": self.renewable_fraction,
            "battery_throughput_kwh": self.battery_throughput,
            "battery_charge_kwh": self.battery_charge_kwh,
            "battery_discharge_kwh": self.battery_discharge_kwh,
            "converter_loss_kwh": self.converter_loss,
            "initial_soc": self.initial_soc,
            "final_soc": self.final_soc,
        }


# --- generator commitment -------------------------------------------------


class _Unit(NamedTuple):
    index: int
    rated: float
    min_kw: float
    fixed_cost: float  # $/h while running, excluding output-proportional fuel


def _split_output(units: Sequence[_Unit], total: float) -> dict:
    """Share ``total`` kW among units: each at its minimum, the rest by headroom."""
    mins = sum(u.min_kw for u in units)
    head = sum(u.rated - u.min_kw for u in units)
    extra = total - mins
    out = {}
    for u in units:
        share = (u.rated - u.min_kw) / head if head > 0 else 0.0
        out[u.index] = u.min_kw + extra * share
    return out


class GeneratorFleet:
    """Commitment logic for up to three generators."""

    def __init__(self, specs: Sequence[GeneratorSpec]):
        self.specs = tuple(specs)
        units = []
        for i, s in enumerate(self.specs):
            if s.rated_kw > 0:
                fixed = (s.fuel.price_per_l * s.fuel_curve_intercept * s.rated_kw + s.om_per_hr
                         + s.replacement_per_kw * s.rated_kw / s.lifetime_hours)
                units.append(_Unit(i, s.rated_kw, s.min_load_kw, fixed))
        self.units = tuple(units)
        self.capacity = sum(u.rated for u in units)
        subsets = []
        for r in range(1, len(units) + 1):
            for combo in itertools.combinations(units, r):
                subsets.append(combo)
        self.subsets = tuple(subsets)
        # priority list: ascending rating, index breaks ties
        ordered = sorted(units, key=lambda u: (u.rated, u.index))
        self.priority_prefixes = tuple(tuple(ordered[: r + 1]) for r in range(len(ordered)))
        self.all_units = tuple(units)

    def marginal_fuel_cost(self, index: int) -> float:
        s = self.specs[index]
        return s.fuel.price_per_l * s.fuel_curve_slope

    def hourly_cost(self, units: Sequence[_Unit], total: float) -> float:
        cost = sum(u.fixed_cost for u in units)
        if units:
            out = _split_output(units, total)
            cost += sum(self.marginal_fuel_cost(i) * p for i, p in out.items())
        return cost

    def _choose(self, need: float, net_load: float, candidates) -> tuple:
        best = None
        for units in candidates:
            cap = sum(u.rated for u in units)
            if cap + EPS < need:
                continue
            mins = sum(u.min_kw for u in units)
            total = min(max(net_load, mins), cap)
            key = (self.hourly_cost(units, total), cap, tuple(u.index for u in units))
            if best is None or key < best[0]:
                best = (key, units)
        return best[1] if best is not None else self.all_units

    def must_run(self, reserve: float, strategy: str) -> tuple:
        """Units held online at minimum load purely to cover ``reserve`` kW."""
        outputs = [0.0] * len(self.specs)
        if reserve <= EPS or not self.units:
            return tuple(outputs)
        if strategy == "generator_order":
            units = next((p for p in self.priority_prefixes
                          if sum(u.rated for u in p) + EPS >= reserve), self.all_units)
        else:
            units = self._choose(reserve, 0.0, self.subsets)
        for u in units:
            outputs[u.index] = u.min_kw
        return tuple(outputs)

    def commit(self, net_load: float, strategy: str, *, reserve: float = 0.0,
               charge_acceptance: float = 0.0, store_value: float = 0.0,
               wear_per_kwh: float = 0.0) -> tuple[tuple, float]:
        """Choose units and outputs for ``net_load`` kW.

        ``reserve`` is extra online capacity the units must hold;
        ``charge_acceptance`` is how much AC power the battery could absorb
        toward its cycle-charging setpoint. ``store_value`` converts one AC kWh
        charged now into the AC kWh it later returns, and ``wear_per_kwh``
        prices that cycling; both only matter for combined dispatch.

        Returns ``(outputs, shortfall)`` with one output per generator slot.
        """
        outputs = [0.0] * len(self.specs)
        if net_load <= EPS or not self.units:
            return tuple(outputs), max(net_load, 0.0) if not self.units else 0.0
        need = net_load + reserve
        if strategy == "generator_order":
            units = next((p for p in self.priority_prefixes
                          if sum(u.rated for u in p) + EPS >= need), self.all_units)
        else:
            units = self._choose(need, net_load, self.subsets)
        cap = sum(u.rated for u in units)
        mins = sum(u.min_kw for u in units)
        total = min(max(net_load, mins), cap)
        if strategy == "cycle_charging":
            total = min(max(net_load + charge_acceptance, mins), cap)
        elif strategy == "combined" and charge_acceptance > EPS:
            cc_total = min(max(net_load + charge_acceptance, mins), cap)
            extra = cc_total - total
            if extra > EPS:
                lf_cost = self.hourly_cost(units, total)
                cc_cost = self.hourly_cost(units, cc_total) + wear_per_kwh * extra
                avg_cost = lf_cost / total if total > 0 else 0.0
                if cc_cost - avg_cost * extra * store_value < lf_cost:
                    total = cc_total
        for i, p in _split_output(units, total).items():
            outputs[i] = p
        return tuple(outputs), max(net_load - cap, 0.0)


def commit_generators(net_load: float, specs: Sequence[GeneratorSpec], strategy: str,
                      state: DispatchState | None = None, **kwargs) -> tuple[tuple, float]:
    """Standalone commitment for one hour; see :meth:`GeneratorFleet.commit`."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown dispatch strategy {strategy!r}")
    return GeneratorFleet(specs).commit(net_load, strategy, **kwargs)


# --- the hourly step --------------------------------------------------------


class Dispatcher:
    """Precomputed constants for stepping one configuration through a year."""

    def __init__(self, system: SystemConfiguration, catalog: ComponentCatalog,
                 params: DispatchParams = DispatchParams(),
                 hot_water: HotWaterSpec | None = None):
        self.system = system
        self.params = params
        bat = catalog.battery
        self.battery = bat
        self.capacity = bank_capacity(bat, system.battery_strings)
        self.eta_c = battery_charge_eff(bat)
        self.eta_d = battery_discharge_eff(bat)
        self.min_soc = bat.min_soc if self.capacity > 0 else 0.0
        self.p_batt = bat.max_c_rate * self.capacity
        self.conv_rated = system.converter_kw
        self.eta_conv = catalog.converter.efficiency
        self.gen_specs = tuple(
            replace(catalog.generator, rated_kw=kw) for kw in system.gen_kw
        )
        self.fleet = GeneratorFleet(self.gen_specs)
        self.strategy = system.strategy
        self.wear_per_kwh = bat.replacement_per_unit / bat.lifetime_throughput_kwh
        self.store_value = self.eta_conv * bat.round_trip_eff * self.eta_conv
        hw = hot_water if hot_water is not None else HotWaterSpec(guests_per_day=0.0)
        self.hot_water = hw.resolved(system.converter_kw)
        self.draw = self.hot_water.hourly_draw_kwh()

    def initial_state(self) -> DispatchState:
        soc = self.params.initial_soc if self.capacity > 0 else 0.0
        return DispatchState(soc=max(soc, self.min_soc), tank_kwh=self.hot_water.tank_capacity_kwh)

    def step(self, state: DispatchState, pv_dc: float, wind_ac: float, load: float):
        eta = self.eta_conv
        rated = self.conv_rated
        cap = self.capacity
        soc = state.soc
        if cap > 0:
            ch_max = max(min(self.p_batt, (1.0 - soc) * cap / self.eta_c), 0.0)
            dis_max = max(min(self.p_batt, (soc - self.min_soc) * cap * self.eta_d), 0.0)
        else:
            ch_max = dis_max = 0.0

        wind_used = min(wind_ac, load)
        wind_sur = wind_ac - wind_used
        resid = load - wind_used
        pv_ac = min(pv_dc * eta, rated, resid)
        pv_sur = max(pv_dc - pv_ac / eta, 0.0) if eta > 0 else pv_dc
        resid -= pv_ac

        ch = dis = diverted = 0.0
        gens = (0.0,) * N_GENERATORS
        unmet = 0.0
        tank = state.tank_kwh
        draw = self.draw[state.hour_index % 24]

        spill = 0.0
        if resid <= EPS:
            resid = 0.0
            # renewables alone carry the load; the reserve decides whether
            # generators must still idle at minimum load
            reserve = self.params.reserve_pv_fraction * pv_ac + self.params.reserve_wind_fraction * wind_used
            batt_res = min(dis_max * eta, max(rated - pv_ac, 0.0))
            if self.fleet.units and reserve > batt_res + EPS:
                gens = self.fleet.must_run(reserve - batt_res, self.strategy)
                g = sum(gens)
                spill = max(g - load, 0.0)
                wind_used = min(wind_ac, load - g + spill)
                wind_sur = wind_ac - wind_used
                pv_ac = min(pv_dc * eta, rated, load - g + spill - wind_used)
                pv_sur = max(pv_dc - pv_ac / eta, 0.0)
            ch_pv = min(pv_sur, ch_max)
            pv_sur -= ch_pv
            ch = ch_pv
            rect_in = 0.0
            room = ch_max - ch_pv
            if wind_sur > EPS and room > EPS:
                ch_w = min(room, rated, wind_sur * eta)
                rect_in = ch_w / eta
                wind_sur = max(wind_sur - rect_in, 0.0)
                ch += ch_w
            inv_room = rated - pv_ac if rect_in == 0.0 else 0.0
            pv_offer = max(min(pv_sur * eta, inv_room), 0.0)
            offered = wind_sur + pv_offer
            absorbed, tank = absorb(offered, tank, self.hot_water, draw)
            from_wind = min(absorbed, wind_sur)
            wind_sur -= from_wind
            pv_sur = max(pv_sur - (absorbed - from_wind) / eta, 0.0)
            diverted = absorbed
        else:
            tank = max(tank - draw, 0.0)
            ch_pv = min(pv_sur, ch_max)
            pv_sur -= ch_pv
            ch = ch_pv
            batt_ac = min(dis_max * eta, max(rated - pv_ac, 0.0)) if ch_pv <= EPS else 0.0
            reserve = self.params.reserve_pv_fraction * pv_ac + self.params.reserve_wind_fraction * wind_used
            if batt_ac + EPS >= resid + reserve or not self.fleet.units:
                served_b = min(batt_ac, resid)
                dis = served_b / eta if served_b > 0 else 0.0
                unmet = resid - served_b
            else:
                # AC power the battery can take on its way to the setpoint
                pv_dc_ac = pv_ac / eta if eta > 0 else 0.0
                room = max(ch_max - ch_pv, 0.0)
                y_cc = min(room, max(self.params.cc_setpoint_soc - soc, 0.0) * cap / self.eta_c)
                y_cc = min(y_cc, pv_dc_ac + rated)
                accept = self._ac_for_charge(y_cc, pv_dc_ac)
                gens, shortfall = self.fleet.commit(
                    resid, self.strategy,
                    reserve=max(reserve - batt_ac, 0.0),
                    charge_acceptance=accept,
                    store_value=self.store_value,
                    wear_per_kwh=self.wear_per_kwh,
                )
                if shortfall > EPS:
                    served_b = min(batt_ac, shortfall)
                    dis = served_b / eta if served_b > 0 else 0.0
                    unmet = shortfall - served_b
                surplus = sum(gens) - resid
                if surplus > EPS:
                    y_max = min(room, pv_dc_ac + rated)
                    take = min(surplus, self._ac_for_charge(y_max, pv_dc_ac))
                    y = self._charge_for_ac(take, pv_dc_ac)
                    ch += y
                    # generator output the battery cannot take is spilled
                    spill = surplus - take
            resid = 0.0

        dumped = max(pv_sur + wind_sur + spill, 0.0)
        net_dc = pv_dc - pv_sur + dis - ch
        if net_dc >= 0:
            conv_loss = net_dc * (1.0 - eta)
        else:
            conv_loss = -net_dc * (1.0 / eta - 1.0)

        if cap > 0:
            soc = soc + (ch * self.eta_c - dis / self.eta_d) / cap
            soc = min(max(soc, self.min_soc), 1.0)
        fuel = 0.0
        on = []
        hours = list(state.gen_hours)
        for i, (spec, p) in enumerate(zip(self.gen_specs, gens)):
            running = p > EPS
            on.append(running)
            if running:
                fuel += generator_fuel(spec, p)
                hours[i] += 1.0
        rec = HourlyRecord(pv_dc, wind_ac, gens[0], gens[1], gens[2], load, ch, dis, diverted,
                           dumped, conv_loss, unmet, fuel, soc)
        new_state = DispatchState(soc, tuple(hours), tuple(on), state.hour_index + 1, tank)
        return new_state, rec

    def _ac_for_charge(self, y: float, pv_dc_ac: float) -> float:
        """AC power needed to put ``y`` kW into the battery terminals.

        The first ``pv_dc_ac`` kW come from PV that would otherwise have been
        inverted (costing ``eta`` AC per kW); the rest is rectified.
        """
        eta = self.eta_conv
        direct = min(y, pv_dc_ac)
        return direct * eta + max(y - pv_dc_ac, 0.0) / eta

    def _charge_for_ac(self, ac: float, pv_dc_ac: float) -> float:
        eta = self.eta_conv
        if ac <= pv_dc_ac * eta:
            return ac / eta
        return pv_dc_ac + (ac - pv_dc_ac * eta) * eta


def step(state: DispatchState, system: SystemConfiguration, catalog: ComponentCatalog,
         ghi: float, wind_speed: float, ambient: float, load: float,
         params: DispatchParams = DispatchParams(), hot_water: HotWaterSpec | None = None):
    """Advance one hour from raw resource values. Convenience wrapper around
    :class:`Dispatcher` for single-step checks."""
    d = Dispatcher(system, catalog, params, hot_water)
    pv = float(pv_power(_sized_pv(catalog.pv, system.pv_kw), ghi, ambient))
    wind = system.wind_count * float(wind_power(catalog.wind, wind_speed))
    return d.step(state, pv, wind, load)


def _sized_pv(spec: PvSpec, kw: float) -> PvSpec:
    return replace(spec, rated_kw=kw)


def production_series(system: SystemConfiguration, catalog: ComponentCatalog, resources) -> tuple:
    """Hourly PV (DC) and wind (AC) output for the configuration, kW."""
    pv = pv_power(_sized_pv(catalog.pv, system.pv_kw), resources.ghi, resources.ambient_temp)
    wind = system.wind_count * wind_power(catalog.wind, resources.wind_speed)
    return np.asarray(pv, dtype=float), np.asarray(wind, dtype=float)


def simulate_year(system: SystemConfiguration, catalog: ComponentCatalog, resources, load,
                  params: DispatchParams = DispatchParams(), hot_water: HotWaterSpec | None = None,
                  keep_records: bool = False) -> SimulationResult:
    """Run all 8760 hours and total the energy ledger.

    ``load`` is a :class:`~hybridgrid.load.LoadProfile` or an array of kW.
    Renewable fraction is ``1 - generator output / total production``.
    """
    demand = np.asarray(getattr(load, "demand", load), dtype=float)
    if demand.shape != (HOURS_PER_YEAR,):
        raise ValueError(f"load must have {HOURS_PER_YEAR} hourly values")
    pv, wind = production_series(system, catalog, resources)
    d = Dispatcher(system, catalog, params, hot_water)
    state = d.initial_state()
    init_soc = state.soc
    rows = []
    for h in range(HOURS_PER_YEAR):
        state, rec = d.step(state, float(pv[h]), float(wind[h]), float(demand[h]))
        rows.append(rec)
    arr = np.array(rows, dtype=float)
    col = {name: arr[:, i] for i, name in enumerate(HourlyRecord._fields)}

    gen_kwh = tuple(float(col[f"gen{i + 1}_kw"].sum()) for i in range(N_GENERATORS))
    pv_kwh = float(col["pv_kw"].sum())
    wind_kwh = float(col["wind_kw"].sum())
    total = pv_kwh + wind_kwh + sum(gen_kwh)
    rf = 1.0 - sum(gen_kwh) / total if total > 0 else 0.0
    unmet = float(col["unmet_kw"].sum())
    load_kwh = float(demand.sum())
    diverted = float(col["diverted_kw"].sum())
    dumped = float(col["dumped_kw"].sum())
    charge = float(col["batt_charge_kw"].sum())
    ledger = DiversionLedger.from_totals(
        annual_demand(d.hot_water), diverted + dumped, diverted
    )
    return SimulationResult(
        pv_kwh=pv_kwh,
        wind_kwh=wind_kwh,
        gen_kwh=gen_kwh,
        load_kwh=load_kwh,
        load_served=load_kwh - unmet,
        excess_total=diverted + dumped,
        excess_diverted=diverted,
        excess_dumped=dumped,
        fuel_total=float(col["fuel_l"].sum()),
        gen_hours=tuple(state.gen_hours),
        renewable_fraction=min(max(rf, 0.0), 1.0),
        unmet_load=unmet,
        battery_throughput=charge * d.eta_c,
        battery_charge_kwh=charge,
        battery_discharge_kwh=float(col["batt_discharge_kw"].sum()),
        converter_loss=float(col["converter_loss_kw"].sum()),
        initial_soc=init_soc,
        final_soc=state.soc,
        diversion=ledger,
        records=arr if keep_records else None,
    )


def balance_residuals(records: np.ndarray) -> np.ndarray:
    """Per-hour sources minus sinks for a record array, kWh."""
    c = {name: records[:, i] for i, name in enumerate(HourlyRecord._fields)}
    sources = c["pv_kw"] + c["wind_kw"] + c["gen1_kw"] + c["gen2_kw"] + c["gen3_kw"] + c["batt_discharge_kw"]
    sinks = (c["load_kw"] - c["unmet_kw"] + c["batt_charge_kw"] + c["diverted_kw"] + c["dumped_kw"]
             + c["converter_loss_kw"])
    return sources - sinks


def write_trace_csv(result: SimulationResult, path) -> None:
    if result.records is None:
        raise ValueError("simulation was run without keeping records")
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for h, row in enumerate(result.records):
            writer.writerow([h] + [f"{float(x):.6f}" for x in row])
