"""Component specifications and their power, fuel and efficiency models."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

STC_IRRADIANCE = 1.0  # kW/m2
STC_CELL_TEMP = 25.0


@dataclass(frozen=True)
class PvSpec:
    rated_kw: float = 1.0
    derating: float = 0.80
    temp_coeff: float = -0.005  # 1/C
    noct: float = 47.0
    v_oc: float = 40.0
    i_sc: float = 8.0
    fill_factor: float = 0.75
    p_in: float = 1600.0  # W on the module at STC
    capital_per_kw: float = 2000.0
    replacement_per_kw: float = 2000.0
    om_per_kw_yr: float = 10.0
    lifetime_yr: float = 25.0

    def __post_init__(self):
        if not 0 < self.derating <= 1:
            raise ValueError("pv.derating must lie in (0, 1]")
        if self.rated_kw < 0:
            raise ValueError("pv.rated_kw must be non-negative")
        if not 0 < self.fill_factor <= 1:
            raise ValueError("pv.fill_factor must lie in (0, 1]")
        if self.lifetime_yr <= 0:
            raise ValueError("pv.lifetime_yr must be positive")


@dataclass(frozen=True)
class WindTurbineSpec:
    rated_kw: float = 250.0
    cut_in: float = 3.5
    rated_speed: float = 8.4
    cut_out: float = 18.0
    hub_height: float = 50.0
    lifetime_yr: float = 20.0
    capital: float = 375_000.0
    replacement: float = 262_500.0
    om_per_yr: float = 7_500.0
    # Optional tabulated curve, ((speed m/s, kW), ...); replaces the cubic ramp.
    power_curve: tuple = ()

    def __post_init__(self):
        if not 0 < self.cut_in < self.rated_speed < self.cut_out:
            raise ValueError("wind turbine needs 0 < cut_in < rated_speed < cut_out")
        if self.rated_kw < 0 or self.lifetime_yr <= 0:
            raise ValueError("wind turbine rated_kw must be >= 0 and lifetime_yr > 0")
        if self.power_curve:
            speeds = [p[0] for p in self.power_curve]
            if any(b <= a for a, b in zip(speeds, speeds[1:])):
                raise ValueError("wind power_curve speeds must be strictly increasing")


@dataclass(frozen=True)
class FuelSpec:
    heating_value: float = 36.4  # MJ/L
    carbon_emission_factor: float = 20.0  # t C/TJ
    oxidized_fraction: float = 0.99
    price_per_l: float = 1.20

    def __post_init__(self):
        if min(self.heating_value, self.carbon_emission_factor, self.oxidized_fraction, self.price_per_l) < 0:
            raise ValueError("fuel parameters must be non-negative")
        if self.oxidized_fraction > 1:
            raise ValueError("fuel.oxidized_fraction must not exceed 1")


@dataclass(frozen=True)
class GeneratorSpec:
    rated_kw: float = 0.0
    min_load_ratio: float = 0.25
    lifetime_hours: float = 15_000.0
    fuel: FuelSpec = FuelSpec()
    fuel_curve_intercept: float = 0.085  # L/h per rated kW
    fuel_curve_slope: float = 0.246  # L/h per output kW
    capital_per_kw: float = 220.0
    replacement_per_kw: float = 200.0
    om_per_hr: float = 0.03

    def __post_init__(self):
        if not 0 <= self.min_load_ratio < 1:
            raise ValueError("generator.min_load_ratio must lie in [0, 1)")
        if self.lifetime_hours <= 0:
            raise ValueError("generator.lifetime_hours must be positive")
        if self.rated_kw < 0:
            raise ValueError("generator.rated_kw must be non-negative")
        if self.fuel_curve_intercept < 0 or self.fuel_curve_slope <= 0:
            raise ValueError("generator fuel curve needs intercept >= 0 and slope > 0")

    @property
    def min_load_kw(self) -> float:
        return self.min_load_ratio * self.rated_kw


@dataclass(frozen=True)
class BatterySpec:
    nominal_v: float = 6.0
    capacity_ah: float = 1231.0
    round_trip_eff: float = 0.96
    lifetime_throughput_kwh: float = 9300.0  # per battery
    min_soc: float = 0.30
    batteries_per_string: int = 40
    max_c_rate: float = 0.2  # 1/h, applies to both charge and discharge
    capital_per_unit: float = 1200.0
    replacement_per_unit: float = 1170.0
    om_per_unit_yr: float = 10.0

    def __post_init__(self):
        if not 0 < self.round_trip_eff <= 1:
            raise ValueError("battery.round_trip_eff must lie in (0, 1]")
        if not 0 <= self.min_soc < 1:
            raise ValueError("battery.min_soc must lie in [0, 1)")
        if self.batteries_per_string < 1:
            raise ValueError("battery.batteries_per_string must be at least 1")
        if self.max_c_rate <= 0 or self.lifetime_throughput_kwh <= 0:
            raise ValueError("battery.max_c_rate and lifetime_throughput_kwh must be positive")

    @property
    def unit_kwh(self) -> float:
        return self.nominal_v * self.capacity_ah / 1000.0


@dataclass(frozen=True)
class ConverterSpec:
    rated_kw: float = 0.0
    efficiency: float = 0.95
    lifetime_yr: float = 15.0
    capital_per_kw: float = 890.0
    replacement_per_kw: float = 800.0
    om_per_kw_yr: float = 10.0

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise ValueError("converter.efficiency must lie in (0, 1]")
        if self.rated_kw < 0 or self.lifetime_yr <= 0:
            raise ValueError("converter rated_kw must be >= 0 and lifetime_yr > 0")


def cell_temperature(spec: PvSpec, ghi, ambient):
    """NOCT cell temperature: ambient plus (NOCT - 20)/0.8 C per kW/m2."""
    return np.asarray(ambient, dtype=float) + (spec.noct - 20.0) / 0.8 * np.asarray(ghi, dtype=float)


def pv_power(spec: PvSpec, ghi, ambient, cell_temp=None):
    """DC output of the array, kW.

    ``cell_temp`` overrides the NOCT estimate when given. Works elementwise on
    arrays. Output is clamped at zero.
    """
    g = np.asarray(ghi, dtype=float)
    if np.any(g < 0):
        raise ValueError("irradiance must be non-negative")
    tc = cell_temperature(spec, g, ambient) if cell_temp is None else np.asarray(cell_temp, dtype=float)
    p = spec.rated_kw * spec.derating * (g / STC_IRRADIANCE) * (1.0 + spec.temp_coeff * (tc - STC_CELL_TEMP))
    p = np.clip(p, 0.0, None)
    return float(p) if p.ndim == 0 else p


def pv_cell_efficiency(v_oc: float, i_sc: float, ff: float, p_in: float) -> float:
    """Cell conversion efficiency from open-circuit voltage, short-circuit
    current, fill factor and incident power (W)."""
    if p_in <= 0:
        raise ValueError("input power must be positive")
    return v_oc * i_sc * ff / p_in


def wind_power(spec: WindTurbineSpec, v):
    """Output of one turbine at hub wind speed ``v``, kW.

    Zero below cut-in and at or above cut-out, rated between rated speed and
    cut-out, and a cubic ramp ``rated * (v^3 - vci^3) / (vr^3 - vci^3)`` in
    between unless a tabulated curve is configured.
    """
    arr = np.asarray(v, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("wind speed must be finite and non-negative")
    if spec.power_curve:
        xs = [p[0] for p in spec.power_curve]
        ys = [p[1] for p in spec.power_curve]
        p = np.interp(arr, xs, ys, left=0.0, right=0.0)
    else:
        vci3 = spec.cut_in**3
        ramp = spec.rated_kw * (arr**3 - vci3) / (spec.rated_speed**3 - vci3)
        p = np.where(arr < spec.rated_speed, ramp, spec.rated_kw)
    p = np.where((arr < spec.cut_in) | (arr >= spec.cut_out), 0.0, p)
    p = np.clip(p, 0.0, None)
    return float(p) if p.ndim == 0 else p


def generator_fuel(spec: GeneratorSpec, output: float, dt: float = 1.0) -> float:
    """Fuel burned in ``dt`` hours at ``output`` kW, litres."""
    tol = 1e-9 * max(spec.rated_kw, 1.0)
    if output < -tol or output > spec.rated_kw + tol:
        raise ValueError(f"generator output {output} kW outside [0, {spec.rated_kw}]")
    if output <= tol:
        return 0.0
    if output < spec.min_load_kw - tol:
        raise ValueError(
            f"generator output {output} kW below minimum load {spec.min_load_kw} kW"
        )
    return (spec.fuel_curve_intercept * spec.rated_kw + spec.fuel_curve_slope * output) * dt


def battery_charge_eff(spec: BatterySpec) -> float:
    return math.sqrt(spec.round_trip_eff)


def battery_discharge_eff(spec: BatterySpec) -> float:
    return math.sqrt(spec.round_trip_eff)


def bank_capacity(spec: BatterySpec, strings: int) -> float:
    """Nominal bank energy, kWh."""
    if strings < 0:
        raise ValueError("battery strings must be non-negative")
    return strings * spec.batteries_per_string * spec.nominal_v * spec.capacity_ah / 1000.0


def convert(power: float, spec: ConverterSpec, direction: str = "dc->ac") -> tuple[float, float]:
    """Pass power through the converter.

    Returns ``(output_kw, curtailed_input_kw)``: input beyond what the rating
    can deliver is not converted and comes back as curtailed. Inversion and
    rectification share one rating.
    """
    if direction not in ("dc->ac", "ac->dc"):
        raise ValueError(f"unknown converter direction {direction!r}")
    if power < 0:
        raise ValueError("converter input must be non-negative")
    max_in = spec.rated_kw / spec.efficiency
    used = min(power, max_in)
    return used * spec.efficiency, power - used
