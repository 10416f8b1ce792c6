"""Hourly simulation and enumerative sizing of islanded PV/wind/diesel/battery
microgrids with a hot-water diversion load."""

__version__ = "0.1.0"

HOURS_PER_YEAR = 8760
DAYS_PER_YEAR = 365
DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)
