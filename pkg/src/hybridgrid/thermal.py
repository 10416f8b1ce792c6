"""Electric water heater with storage tank used as the diversion load."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import DAYS_PER_YEAR

KJ_PER_KWH = 3600.0

# Share of the day's hot water drawn in each hour (morning and evening peaks).
DEFAULT_DRAW_PROFILE = (
    0.5, 0.3, 0.2, 0.2, 0.3, 1.5, 4.5, 6.0, 5.0, 3.0, 2.0, 1.5,
    1.5, 1.5, 1.5, 1.5, 2.0, 3.0, 5.0, 6.0, 5.0, 3.5, 2.0, 1.0,
)


def heater_energy(mass_kg: float, t_f: float, t_in: float, s_w: float = 4.18) -> float:
    """Energy to heat ``mass_kg`` of water from ``t_in`` to ``t_f``, kWh.

    ``s_w`` is the specific heat in kJ/kg/C.
    """
    if t_f < t_in:
        raise ValueError(f"final temperature {t_f} C is below inlet temperature {t_in} C")
    if mass_kg < 0 or s_w < 0:
        raise ValueError("mass and specific heat must be non-negative")
    return mass_kg * s_w * (t_f - t_in) / KJ_PER_KWH


@dataclass(frozen=True)
class HotWaterSpec:
    liters_per_guest_day: float = 200.0
    guests_per_day: float = 250.0
    t_in: float = 25.0
    t_f: float = 44.5
    specific_heat: float = 4.18
    tank_capacity_kwh: float | None = None  # None: one day of demand
    heater_power_kw: float | None = None  # None: converter rating
    draw_profile: tuple = DEFAULT_DRAW_PROFILE

    def __post_init__(self):
        if self.t_f < self.t_in:
            raise ValueError("hot_water.t_f must be >= hot_water.t_in")
        for name in ("liters_per_guest_day", "guests_per_day", "specific_heat"):
            if getattr(self, name) < 0:
                raise ValueError(f"hot_water.{name} must be non-negative")
        for name in ("tank_capacity_kwh", "heater_power_kw"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"hot_water.{name} must be non-negative")
        w = np.asarray(self.draw_profile, dtype=float)
        if w.shape != (24,) or np.any(w < 0) or w.sum() <= 0:
            raise ValueError("hot_water.draw_profile needs 24 non-negative weights, not all zero")

    @property
    def daily_demand_kwh(self) -> float:
        # 1 L of water is taken as 1 kg
        mass = self.guests_per_day * self.liters_per_guest_day
        return heater_energy(mass, self.t_f, self.t_in, self.specific_heat)

    def hourly_draw_kwh(self) -> np.ndarray:
        w = np.asarray(self.draw_profile, dtype=float)
        return self.daily_demand_kwh * w / w.sum()

    def resolved(self, converter_kw: float) -> "HotWaterSpec":
        """Fill in the default tank size and heater power."""
        tank = self.daily_demand_kwh if self.tank_capacity_kwh is None else self.tank_capacity_kwh
        heater = converter_kw if self.heater_power_kw is None else self.heater_power_kw
        return replace(self, tank_capacity_kwh=tank, heater_power_kw=heater)


def annual_demand(spec: HotWaterSpec) -> float:
    """Yearly water-heating energy, kWh."""
    return spec.daily_demand_kwh * DAYS_PER_YEAR


def absorb(offered_kw: float, tank_state: float, spec: HotWaterSpec, draw_kwh: float,
           dt: float = 1.0) -> tuple[float, float]:
    """One hour of the diversion tank.

    The hour's hot-water draw leaves the tank first, then the heater takes
    ``min(offered, heater power, tank headroom)``. ``spec`` must be resolved.

    Returns ``(absorbed_kw, new_tank_kwh)``.
    """
    if offered_kw < 0:
        raise ValueError("offered power must be non-negative")
    cap = spec.tank_capacity_kwh
    heater = spec.heater_power_kw
    if cap is None or heater is None:
        raise ValueError("hot-water spec must be resolved before use")
    level = max(tank_state - draw_kwh, 0.0)
    absorbed = min(offered_kw, heater, (cap - level) / dt)
    absorbed = max(absorbed, 0.0)
    return absorbed, min(level + absorbed * dt, cap)


@dataclass(frozen=True)
class DiversionLedger:
    demand_kwh_yr: float
    offered_kwh_yr: float
    absorbed_kwh_yr: float
    spilled_kwh_yr: float
    utilization: float

    @classmethod
    def from_totals(cls, demand: float, offered: float, absorbed: float) -> "DiversionLedger":
        util = absorbed / offered if offered > 0 else 0.0
        return cls(demand, offered, absorbed, max(offered - absorbed, 0.0), util)


def demand_curve(spec: HotWaterSpec, guests) -> np.ndarray:
    """Annual heating demand (kWh) for each guest count in ``guests``."""
    return np.array([annual_demand(replace(spec, guests_per_day=float(g))) for g in guests])
