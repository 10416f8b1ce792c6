"""Resort electrical load: appliance inventory to an 8760-hour profile."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import DAYS_IN_MONTH, DAYS_PER_YEAR, HOURS_PER_YEAR

RESORT_DAILY_KWH = 19072.0
RESORT_PEAK_KW = 2068.0
APPLIANCE_CSV_HEADER = ("name", "count", "hours_per_day", "rated_power_w")
LOAD_CSV_HEADER = ("hour", "load_kw")

# Evening-peaked hotel day, hour 0 first. Relative weights only.
HOTEL_SHAPE = (
    0.85, 0.75, 0.68, 0.62, 0.62, 0.66, 0.80, 1.00, 1.05, 0.95, 0.90, 0.95,
    1.05, 1.05, 1.00, 0.95, 0.95, 1.05, 1.25, 1.45, 1.55, 1.50, 1.30, 1.05,
)
PEAK_HALFWIDTH = 2


@dataclass(frozen=True)
class Appliance:
    name: str
    count: int
    hours_per_day: float
    rated_power: float  # W

    def __post_init__(self):
        object.__setattr__(self, "hours_per_day", float(self.hours_per_day))
        object.__setattr__(self, "rated_power", float(self.rated_power))
        if self.count < 0 or int(self.count) != self.count:
            raise ValueError(f"{self.name}: count must be a non-negative integer")
        if not 0 <= self.hours_per_day <= 24:
            raise ValueError(f"{self.name}: hours_per_day must lie in [0, 24]")
        if self.rated_power < 0:
            raise ValueError(f"{self.name}: rated_power must be non-negative")


# Resort inventory with the two repeated rows (refrigerator, printer) kept once.
DEFAULT_APPLIANCES = (
    Appliance("Air conditioner", 400, 15, 1400),
    Appliance("Television", 282, 7, 175),
    Appliance("Light", 1000, 17, 30),
    Appliance("Lamp", 620, 8, 20),
    Appliance("Bulb", 60, 10, 45),
    Appliance("Stereopticon", 3, 6, 250),
    Appliance("Slide projector", 3, 6, 320),
    Appliance("Microphone", 7, 4, 15),
    Appliance("Refrigerator", 320, 15, 450),
    Appliance("Hair straightener", 312, 5, 2500),
    Appliance("Coffee maker", 312, 5, 1500),
    Appliance("Fan", 600, 10, 80),
    Appliance("Microwave oven", 7, 7, 3000),
    Appliance("PC", 6, 15, 120),
    Appliance("Laptop", 5, 15, 80),
    Appliance("Printer", 5, 5, 100),
)


def appliance_daily_energy(a: Appliance) -> float:
    """Daily energy of one inventory line, kWh/day."""
    return a.count * a.hours_per_day * a.rated_power / 1000.0


@dataclass(frozen=True, eq=False)
class LoadProfile:
    demand: np.ndarray  # kW, one value per hour

    def __post_init__(self):
        arr = np.array(self.demand, dtype=float)
        if arr.shape != (HOURS_PER_YEAR,):
            raise ValueError(f"load profile must have {HOURS_PER_YEAR} values, got {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("load demand must be finite and non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "demand", arr)

    @property
    def daily_mean(self) -> float:
        return float(self.demand.sum()) / DAYS_PER_YEAR

    @property
    def peak(self) -> float:
        return float(self.demand.max())

    @property
    def annual_kwh(self) -> float:
        return float(self.demand.sum())


def _affine_compress(profile: LoadProfile, target_mean: float, peak_kw: float) -> LoadProfile:
    mean = float(profile.demand.mean())
    a = (peak_kw - target_mean) / (profile.peak - mean)
    b = target_mean - a * mean
    return LoadProfile(np.clip(a * profile.demand + b, 0.0, None))


def calibrate(profile: LoadProfile, daily_kwh: float, peak_kw: float,
              halfwidth: int = PEAK_HALFWIDTH) -> LoadProfile:
    """Map a profile onto a target daily mean and annual peak.

    Two parameters are solved exactly: a uniform scale ``s`` and the height
    ``beta`` of a triangular bump centred on the busiest hour,
    ``new = s * (old + beta * bump)``. Both stay non-negative, so the result
    does too. If the scaled profile already peaks above the target, the bump
    would be negative and a global affine compression (slope below one,
    positive offset) is used instead.
    """
    target_mean = daily_kwh / 24.0
    if daily_kwh <= 0 or peak_kw < target_mean:
        raise ValueError("calibration needs daily_kwh > 0 and peak_kw >= daily_kwh / 24")
    d = profile.demand
    total = float(d.sum())
    if total <= 0:
        raise ValueError("cannot calibrate an all-zero profile")
    if math.isclose(peak_kw, target_mean):
        return LoadProfile(np.full(HOURS_PER_YEAR, target_mean))

    h = int(np.argmax(d))
    offsets = np.arange(-halfwidth, halfwidth + 1)
    bump = np.zeros(HOURS_PER_YEAR)
    idx = h + offsets
    keep = (idx >= 0) & (idx < HOURS_PER_YEAR)
    bump[idx[keep]] = 1.0 - np.abs(offsets[keep]) / (halfwidth + 1)

    target_total = daily_kwh * DAYS_PER_YEAR
    w = float(bump.sum())
    s = (target_total - peak_kw * w) / (total - d[h] * w)
    if s <= 0:
        raise ValueError("peak target too large for the requested daily energy")
    beta = peak_kw / s - d[h]
    if beta < 0:
        return _affine_compress(profile, target_mean, peak_kw)
    return LoadProfile(s * (d + beta * bump))


def synthesize_load(
    appliances: Sequence[Appliance],
    shape: Sequence[float] = HOTEL_SHAPE,
    variability: float = 0.05,
    seed: int = 0,
    *,
    monthly_factors: Sequence[float] | None = None,
    calibrate_to_targets: bool = False,
    target_daily_kwh: float = RESORT_DAILY_KWH,
    target_peak_kw: float = RESORT_PEAK_KW,
) -> LoadProfile:
    """Spread the inventory's daily energy over a year of hours.

    Every day repeats ``shape`` scaled by a seeded factor drawn from
    ``uniform(1 - variability, 1 + variability)`` times its month's factor. The
    day factors are normalised to average one, so before calibration the
    profile's daily mean equals the inventory total exactly.
    """
    w = np.asarray(shape, dtype=float)
    if w.shape != (24,):
        raise ValueError(f"hourly shape needs 24 weights, got {w.size}")
    if np.any(w < 0) or not np.all(np.isfinite(w)) or w.sum() <= 0:
        raise ValueError("hourly shape weights must be finite, non-negative and not all zero")
    if not 0 <= variability < 1:
        raise ValueError("variability must lie in [0, 1)")
    months = np.repeat(np.arange(12), DAYS_IN_MONTH)
    if monthly_factors is None:
        mf = np.ones(12)
    else:
        mf = np.asarray(monthly_factors, dtype=float)
        if mf.shape != (12,) or np.any(mf < 0) or mf.sum() <= 0:
            raise ValueError("monthly_factors needs 12 non-negative values, not all zero")

    rng = np.random.default_rng(seed)
    day = rng.uniform(1.0 - variability, 1.0 + variability, DAYS_PER_YEAR) * mf[months]
    day = day / day.mean()

    daily_energy = sum(appliance_daily_energy(a) for a in appliances)
    demand = np.outer(day * daily_energy, w / w.sum()).ravel()
    profile = LoadProfile(demand)
    if calibrate_to_targets:
        profile = calibrate(profile, target_daily_kwh, target_peak_kw)
    return profile


def read_appliances_csv(path) -> list[Appliance]:
    path = Path(path)
    out = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != APPLIANCE_CSV_HEADER:
            raise ValueError(f"{path}: line 1: expected header {','.join(APPLIANCE_CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"{path}: line {lineno}: expected 4 fields, got {len(row)}")
            try:
                out.append(Appliance(row[0].strip(), int(row[1]), float(row[2]), float(row[3])))
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
    return out


def write_appliances_csv(appliances: Sequence[Appliance], path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(APPLIANCE_CSV_HEADER)
        for a in appliances:
            writer.writerow([a.name, a.count, a.hours_per_day, a.rated_power])


def read_load_csv(path) -> LoadProfile:
    path = Path(path)
    values = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != LOAD_CSV_HEADER:
            raise ValueError(f"{path}: line 1: expected header {','.join(LOAD_CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
            try:
                hour, kw = int(row[0]), float(row[1])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            if hour != lineno - 2:
                raise ValueError(f"{path}: line {lineno}: hour {hour} out of sequence")
            if not math.isfinite(kw) or kw < 0:
                raise ValueError(f"{path}: line {lineno}: load must be finite and non-negative")
            values.append(kw)
    if len(values) != HOURS_PER_YEAR:
        raise ValueError(f"{path}: expected {HOURS_PER_YEAR} data rows, got {len(values)}")
    return LoadProfile(np.array(values))


def write_load_csv(profile: LoadProfile, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LOAD_CSV_HEADER)
        for h, kw in enumerate(profile.demand):
            writer.writerow([h, repr(float(kw))])
