"""Solar and wind resource series, Weibull statistics of wind speed."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import gamma, ndtr

from . import DAYS_IN_MONTH, HOURS_PER_YEAR

DEFAULT_AIR_DENSITY = 1.225
DAYLIGHT_START = 6
DAYLIGHT_END = 18
RESOURCE_CSV_HEADER = ("hour", "ghi_kw_m2", "wind_m_s", "temp_c")

# Twelve monthly wind means (m/s) recovered from the published monthly (k, c)
# pairs as c * Gamma(1 + 1/k); the April shape "706" is read as 7.06.
PENANG_MONTHLY_WIND = (6.21, 5.73, 3.69, 3.89, 2.85, 4.91, 3.04, 4.24, 3.05, 2.86, 5.71, 4.25)
PENANG_DAILY_GHI = 4.20
PENANG_DAILY_GHI_ALT = 4.02


class DegenerateSampleError(ValueError):
    """Raised when a wind sample has zero spread and no Weibull shape exists."""


def month_of_hour() -> np.ndarray:
    """Month index (0-11) for each hour of a non-leap year."""
    return np.repeat(np.arange(12), np.asarray(DAYS_IN_MONTH) * 24)


@dataclass(frozen=True)
class WeibullParams:
    k: float
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"Weibull shape k must be finite and > 0, got {self.k}")
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"Weibull scale c must be finite and > 0, got {self.c}")


@dataclass(frozen=True)
class WindSampleStats:
    mean: float
    std_dev: float
    v_mp: float
    v_max_e: float
    power_density: float


def _check_speed(v):
    arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("wind speed must be finite")
    if np.any(arr < 0):
        raise ValueError("wind speed must be non-negative")
    return arr


def weibull_pdf(v, p: WeibullParams):
    """Weibull probability density of wind speed ``v`` (per m/s).

    Accepts a scalar or an array; returns the same shape.
    """
    arr = _check_speed(v)
    x = arr / p.c
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (p.k / p.c) * np.power(x, p.k - 1.0) * np.exp(-np.power(x, p.k))
    if np.ndim(out) == 0:
        return float(out)
    return out


def weibull_cdf(v, p: WeibullParams):
    """Probability that the wind speed does not exceed ``v``."""
    arr = _check_speed(v)
    out = -np.expm1(-np.power(arr / p.c, p.k))
    if np.ndim(out) == 0:
        return float(out)
    return out


def fit_weibull(samples: Sequence[float]) -> WeibullParams:
    """Fit Weibull parameters by the empirical standard-deviation method.

    The shape comes from ``k = (sigma / mean) ** -1.086`` and the scale is set
    so that the distribution mean equals the sample mean,
    ``c = mean / Gamma(1 + 1/k)``.

    Parameters
    ----------
    samples : array-like
        Wind speeds in m/s, at least two, all non-negative.

    Raises
    ------
    ValueError
        Empty, non-finite or negative input, or a non-positive mean.
    DegenerateSampleError
        The samples have zero standard deviation.
    """
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size < 2:
        raise ValueError("need at least two wind speed samples")
    _check_speed(arr)
    mean = float(arr.mean())
    if mean <= 0:
        raise ValueError("sample mean wind speed must be positive")
    sigma = float(arr.std(ddof=1))
    if sigma == 0:
        raise DegenerateSampleError("wind samples are constant; Weibull shape undefined")
    k = (sigma / mean) ** -1.086
    c = mean / float(gamma(1.0 + 1.0 / k))
    return WeibullParams(k=k, c=c)


def wind_stats(p: WeibullParams, air_density: float = DEFAULT_AIR_DENSITY) -> WindSampleStats:
    """Mean, spread, characteristic speeds and power density for a Weibull fit."""
    if air_density <= 0:
        raise ValueError("air density must be positive")
    k, c = p.k, p.c
    g1 = float(gamma(1.0 + 1.0 / k))
    g2 = float(gamma(1.0 + 2.0 / k))
    mean = c * g1
    std = c * math.sqrt(max(g2 - g1 * g1, 0.0))
    v_mp = c * ((k - 1.0) / k) ** (1.0 / k) if k > 1 else 0.0
    v_max_e = c * ((k + 2.0) / k) ** (1.0 / k)
    density = 0.5 * air_density * c**3 * float(gamma(1.0 + 3.0 / k))
    return WindSampleStats(mean=mean, std_dev=std, v_mp=v_mp, v_max_e=v_max_e, power_density=density)


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ResourceYear:
    """One year of hourly irradiance (kW/m2), wind speed (m/s) and temperature (C)."""

    ghi: np.ndarray
    wind_speed: np.ndarray
    ambient_temp: np.ndarray
    anemometer_height: float = 50.0
    air_density: float = DEFAULT_AIR_DENSITY
    monthly_weibull: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for name in ("ghi", "wind_speed", "ambient_temp"):
            arr = _readonly(getattr(self, name))
            if arr.shape != (HOURS_PER_YEAR,):
                raise ValueError(f"{name} must have exactly {HOURS_PER_YEAR} values, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            object.__setattr__(self, name, arr)
        if np.any(self.ghi < 0):
            raise ValueError("ghi must be non-negative")
        if np.any(self.wind_speed < 0):
            raise ValueError("wind_speed must be non-negative")
        if self.air_density <= 0:
            raise ValueError("air_density must be positive")

    @property
    def daily_ghi_mean(self) -> float:
        """Annual mean daily insolation, kWh/m2/day."""
        return float(self.ghi.sum()) / (HOURS_PER_YEAR / 24)

    @property
    def wind_mean(self) -> float:
        return float(self.wind_speed.mean())

    def monthly_ghi_means(self) -> np.ndarray:
        months = month_of_hour()
        sums = np.bincount(months, weights=self.ghi, minlength=12)
        return sums / np.asarray(DAYS_IN_MONTH)

    def monthly_wind_means(self) -> np.ndarray:
        months = month_of_hour()
        sums = np.bincount(months, weights=self.wind_speed, minlength=12)
        return sums / (np.asarray(DAYS_IN_MONTH) * 24)

    def rescaled(self, daily_ghi: float | None = None, wind_mean: float | None = None) -> "ResourceYear":
        """Copy with irradiance and/or wind scaled to new annual means."""
        ghi = self.ghi
        wind = self.wind_speed
        if daily_ghi is not None:
            if daily_ghi < 0:
                raise ValueError("target daily GHI must be non-negative")
            cur = self.daily_ghi_mean
            if cur == 0 and daily_ghi > 0:
                raise ValueError("cannot rescale an all-zero irradiance series")
            ghi = ghi * (daily_ghi / cur) if cur > 0 else ghi
        if wind_mean is not None:
            if wind_mean < 0:
                raise ValueError("target wind mean must be non-negative")
            cur = self.wind_mean
            if cur == 0 and wind_mean > 0:
                raise ValueError("cannot rescale an all-zero wind series")
            wind = wind * (wind_mean / cur) if cur > 0 else wind
        return ResourceYear(ghi, wind, self.ambient_temp, self.anemometer_height, self.air_density)


def diurnal_ghi_weights() -> np.ndarray:
    """Half-sine daylight weights (24 values summing to 1), zero outside 06:00-18:00."""
    hours = np.arange(24) + 0.5
    w = np.sin(np.pi * (hours - DAYLIGHT_START) / (DAYLIGHT_END - DAYLIGHT_START))
    w[(hours < DAYLIGHT_START) | (hours > DAYLIGHT_END)] = 0.0
    w = np.clip(w, 0.0, None)
    return w / w.sum()


def synthesize_resource_year(
    monthly_ghi_means: Sequence[float],
    monthly_wind_means: Sequence[float],
    seed: int,
    *,
    wind_shape: float = 2.0,
    wind_autocorrelation: float = 0.85,
    wind_diurnal_strength: float = 0.0,
    wind_peak_hour: int = 15,
    ghi_noise: float = 0.0,
    mean_temp_c: float = 27.0,
    temp_swing_c: float = 4.0,
    anemometer_height: float = 50.0,
    air_density: float = DEFAULT_AIR_DENSITY,
) -> ResourceYear:
    """Build a deterministic synthetic year from twelve monthly means.

    Irradiance follows a half-sine between 06:00 and 18:00 whose area equals
    the day's insolation (kWh/m2/day). With ``ghi_noise > 0`` each day gets a
    seeded multiplicative factor, after which every month is renormalised to
    its target. Wind is drawn hour by hour from Weibull(``wind_shape``, c) by
    inverse CDF and rescaled so each month hits its mean exactly. The uniform
    stream feeding the inverse CDF comes from a seeded Gaussian AR(1) process
    with lag-one correlation ``wind_autocorrelation`` mapped through the
    normal CDF, so hourly speeds persist without changing their marginal
    distribution. ``wind_diurnal_strength`` optionally imposes a cosine daily
    cycle peaking at ``wind_peak_hour``.
    """
    ghi_m = np.asarray(monthly_ghi_means, dtype=float)
    wind_m = np.asarray(monthly_wind_means, dtype=float)
    for name, arr in (("monthly_ghi_means", ghi_m), ("monthly_wind_means", wind_m)):
        if arr.shape != (12,):
            raise ValueError(f"{name} needs 12 values, got {arr.size}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError(f"{name} must be finite and non-negative")
    if wind_shape <= 0:
        raise ValueError("wind_shape must be positive")
    if ghi_noise < 0:
        raise ValueError("ghi_noise must be non-negative")
    if not 0 <= wind_autocorrelation < 1:
        raise ValueError("wind_autocorrelation must lie in [0, 1)")
    if not 0 <= wind_diurnal_strength < 1:
        raise ValueError("wind_diurnal_strength must lie in [0, 1)")

    ghi_rng, wind_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    days = np.asarray(DAYS_IN_MONTH)
    day_month = np.repeat(np.arange(12), days)

    daily = ghi_m[day_month]
    if ghi_noise > 0:
        factor = np.clip(1.0 + ghi_noise * ghi_rng.standard_normal(day_month.size), 0.0, None)
        daily = daily * factor
        for m in range(12):
            sel = day_month == m
            total = daily[sel].sum()
            if total > 0:
                daily[sel] *= ghi_m[m] * days[m] / total
            else:
                daily[sel] = ghi_m[m]
    ghi = np.outer(daily, diurnal_ghi_weights()).ravel()

    months = month_of_hour()
    eps = wind_rng.standard_normal(HOURS_PER_YEAR)
    z = np.empty(HOURS_PER_YEAR)
    z[0] = eps[0]
    rho = wind_autocorrelation
    scale = math.sqrt(1.0 - rho * rho)
    for h in range(1, HOURS_PER_YEAR):
        z[h] = rho * z[h - 1] + scale * eps[h]
    u = np.clip(ndtr(z), 1e-12, 1.0 - 1e-12)
    hour_of_day = np.arange(HOURS_PER_YEAR) % 24
    diurnal = 1.0 + wind_diurnal_strength * np.cos(2 * np.pi * (hour_of_day - wind_peak_hour) / 24)
    wind = np.zeros(HOURS_PER_YEAR)
    g = float(gamma(1.0 + 1.0 / wind_shape))
    weibulls = []
    for m in range(12):
        sel = months == m
        if wind_m[m] == 0:
            continue
        c = wind_m[m] / g
        weibulls.append(WeibullParams(wind_shape, c))
        draws = c * np.power(-np.log1p(-u[sel]), 1.0 / wind_shape) * diurnal[sel]
        wind[sel] = draws * (wind_m[m] / draws.mean())

    temp = mean_temp_c + temp_swing_c * np.sin(2 * np.pi * (hour_of_day - 8) / 24)
    return ResourceYear(
        ghi=ghi,
        wind_speed=wind,
        ambient_temp=temp,
        anemometer_height=anemometer_height,
        air_density=air_density,
        monthly_weibull=tuple(weibulls),
    )


def read_resource_csv(path, *, anemometer_height: float = 50.0,
                      air_density: float = DEFAULT_AIR_DENSITY) -> ResourceYear:
    """Load a resource year from ``hour,ghi_kw_m2,wind_m_s,temp_c`` CSV.

    Any malformed row raises ``ValueError`` naming the file and line number.
    """
    path = Path(path)
    ghi, wind, temp = [], [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != RESOURCE_CSV_HEADER:
            raise ValueError(f"{path}: line 1: expected header {','.join(RESOURCE_CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ValueError(f"{path}: line {lineno}: expected 4 fields, got {len(row)}")
            try:
                hour = int(row[0])
                g, w, t = (float(x) for x in row[1:])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            if hour != lineno - 2:
                raise ValueError(f"{path}: line {lineno}: hour {hour} out of sequence (expected {lineno - 2})")
            if not all(math.isfinite(x) for x in (g, w, t)):
                raise ValueError(f"{path}: line {lineno}: non-finite value")
            if g < 0 or w < 0:
                raise ValueError(f"{path}: line {lineno}: negative irradiance or wind speed")
            ghi.append(g)
            wind.append(w)
            temp.append(t)
    if len(ghi) != HOURS_PER_YEAR:
        raise ValueError(f"{path}: expected {HOURS_PER_YEAR} data rows, got {len(ghi)}")
    return ResourceYear(np.array(ghi), np.array(wind), np.array(temp),
                        anemometer_height=anemometer_height, air_density=air_density)


def write_resource_csv(resource: ResourceYear, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESOURCE_CSV_HEADER)
        for h in range(HOURS_PER_YEAR):
            writer.writerow([h, repr(float(resource.ghi[h])), repr(float(resource.wind_speed[h])),
                             repr(float(resource.ambient_temp[h]))])
