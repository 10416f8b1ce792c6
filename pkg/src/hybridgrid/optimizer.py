"""Exhaustive and sampled sizing search, NPC ranking and sensitivity maps."""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from scipy.stats import qmc

from .dispatch import (
    STRATEGIES,
    ComponentCatalog,
    DispatchParams,
    SimulationResult,
    SystemConfiguration,
    simulate_year,
)
from .economics import EconomicParams, EconomicSummary, npc_from_cashflows
from .thermal import HotWaterSpec

RANKED_CSV_HEADER = ("rank", "pv_kw", "wind_n", "gen1_kw", "gen2_kw", "gen3_kw", "batteries",
                     "conv_kw", "dispatch", "coe", "npc", "rf_pct", "ee_mwh")
UTILIZATION_CSV_HEADER = ("rank", "pv_kwh", "wind_kwh", "gen1_kwh", "gen2_kwh", "gen3_kwh",
                          "gen1_hours", "gen2_hours", "gen3_hours", "gen1_share_pct",
                          "gen2_share_pct", "gen3_share_pct", "fuel_l", "co2_kg_yr")
SENSITIVITY_CSV_HEADER = ("solar", "wind", "winner_label")
INFEASIBLE_LABEL = "Infeasible"


@dataclass(frozen=True)
class Axis:
    """Inclusive grid ``min, min + step, ..., <= max``."""

    min: float
    max: float
    step: float = 1.0

    def __post_init__(self):
        for name in ("min", "max", "step"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (math.isfinite(self.min) and math.isfinite(self.max) and math.isfinite(self.step)):
            raise ValueError("axis bounds must be finite")
        if self.min > self.max:
            raise ValueError(f"axis min {self.min} exceeds max {self.max}")
        if self.step <= 0:
            raise ValueError("axis step must be positive")

    def values(self) -> tuple:
        n = int(math.floor((self.max - self.min) / self.step + 1e-9)) + 1
        return tuple(round(self.min + k * self.step, 10) for k in range(n))

    def __len__(self) -> int:
        return len(self.values())

    def doubled(self) -> "Axis":
        return Axis(self.min, self.max, self.step * 2)


@dataclass(frozen=True)
class SearchSpace:
    pv_kw: Axis = Axis(0, 1000, 50)
    wind_count: Axis = Axis(0, 8, 1)
    gen_kw: tuple = (Axis(0, 500, 50),) * 3
    battery_strings: Axis = Axis(0, 10, 1)
    converter_kw: Axis = Axis(0, 1000, 100)
    strategies: tuple = STRATEGIES

    def __post_init__(self):
        if len(self.gen_kw) != 3:
            raise ValueError("search.gen_kw needs three axes")
        if not self.strategies:
            raise ValueError("search.strategies must not be empty")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise ValueError(f"search.strategies: unknown strategy {s!r}")
        for name, ax in (("wind_count", self.wind_count), ("battery_strings", self.battery_strings)):
            if ax.min < 0 or any(v != int(v) for v in ax.values()):
                raise ValueError(f"search.{name} must cover non-negative integers")
        if self.pv_kw.min < 0 or self.converter_kw.min < 0 or min(a.min for a in self.gen_kw) < 0:
            raise ValueError("search axes must be non-negative")

    def axes(self) -> tuple:
        return (self.pv_kw.values(), self.wind_count.values(), *(a.values() for a in self.gen_kw),
                self.battery_strings.values(), self.converter_kw.values(), tuple(self.strategies))

    @property
    def count(self) -> int:
        return math.prod(len(a) for a in self.axes())

    def coarse(self) -> "SearchSpace":
        """Every numeric axis with its step doubled."""
        return SearchSpace(self.pv_kw.doubled(), self.wind_count.doubled(),
                           tuple(a.doubled() for a in self.gen_kw), self.battery_strings.doubled(),
                           self.converter_kw.doubled(), self.strategies)


def _make(point) -> SystemConfiguration:
    pv, wind, g1, g2, g3, batt, conv, strategy = point
    return SystemConfiguration(float(pv), int(wind), (g1, g2, g3), int(batt), float(conv), strategy)


def enumerate_space(space: SearchSpace) -> Iterator[SystemConfiguration]:
    """All configurations in lexicographic axis order."""
    for point in itertools.product(*space.axes()):
        yield _make(point)


def sample_space(space: SearchSpace, n: int, seed: int) -> list[SystemConfiguration]:
    """Latin-hypercube sample of ``n`` grid points, duplicates dropped,
    returned in enumeration order."""
    if n < 1:
        raise ValueError("sample size must be at least 1")
    axes = space.axes()
    u = qmc.LatinHypercube(d=len(axes), seed=np.random.default_rng(seed)).random(n)
    picked = set()
    for row in u:
        idx = tuple(min(int(x * len(a)), len(a) - 1) for x, a in zip(row, axes))
        picked.add(idx)
    return [_make(tuple(a[i] for a, i in zip(axes, idx))) for idx in sorted(picked)]


@dataclass(frozen=True)
class Feasibility:
    max_unmet_fraction: float = 0.0

    def __post_init__(self):
        if not 0 <= self.max_unmet_fraction <= 1:
            raise ValueError("feasibility.max_unmet_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class Evaluation:
    """Everything needed to simulate and cost a configuration."""

    resources: object
    load: object
    catalog: ComponentCatalog = ComponentCatalog()
    params: DispatchParams = DispatchParams()
    hot_water: HotWaterSpec | None = None
    economics: EconomicParams = EconomicParams()
    feasibility: Feasibility = Feasibility()


@dataclass(frozen=True)
class RankedResult:
    rank: int | None
    configuration: SystemConfiguration
    simulation: SimulationResult
    economics: EconomicSummary | None
    feasible: bool
    reason: str = ""

    def sort_key(self) -> tuple:
        return (self.economics.npc, self.economics.co2_kg_yr, self.configuration.sort_key())


def evaluate(config: SystemConfiguration, ev: Evaluation) -> RankedResult:
    """Simulate and cost one configuration, judging feasibility."""
    sim = simulate_year(config, ev.catalog, ev.resources, ev.load, ev.params, ev.hot_water)
    if sim.load_served <= 0:
        return RankedResult(None, config, sim, None, False, "no load served")
    econ = npc_from_cashflows(config, sim, ev.catalog, ev.economics)
    limit = ev.feasibility.max_unmet_fraction
    if sim.unmet_fraction > limit + 1e-12:
        reason = f"unmet fraction {sim.unmet_fraction:.6f} exceeds {limit:g}"
        return RankedResult(None, config, sim, econ, False, reason)
    return RankedResult(None, config, sim, econ, True)


_WORKER_EVAL: Evaluation | None = None


def _init_worker(ev: Evaluation) -> None:
    global _WORKER_EVAL
    _WORKER_EVAL = ev


def _worker(config: SystemConfiguration) -> RankedResult:
    return evaluate(config, _WORKER_EVAL)


def evaluate_all(configs: Sequence[SystemConfiguration], ev: Evaluation, jobs: int = 1) -> list[RankedResult]:
    """Evaluate in input order; ``jobs > 1`` spreads the work over processes."""
    configs = list(configs)
    if jobs <= 1 or len(configs) < 2:
        return [evaluate(c, ev) for c in configs]
    jobs = min(jobs, len(configs))
    chunk = max(1, len(configs) // (jobs * 8))
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(ev,)) as pool:
        return list(pool.map(_worker, configs, chunksize=chunk))


def rank(results: Sequence[RankedResult]) -> list[RankedResult]:
    """Feasible results by (NPC, CO2, configuration) with ranks 1.., then
    infeasible ones in their original order without a rank."""
    feasible = sorted((r for r in results if r.feasible), key=RankedResult.sort_key)
    ranked = [RankedResult(k, r.configuration, r.simulation, r.economics, True, r.reason)
              for k, r in enumerate(feasible, start=1)]
    return ranked + [r for r in results if not r.feasible]


def optimize(configs: Sequence[SystemConfiguration], ev: Evaluation, jobs: int = 1) -> list[RankedResult]:
    """Simulate every configuration and rank the feasible ones by NPC.

    An empty feasible set is a normal outcome: every entry comes back with
    ``feasible=False`` and a reason.
    """
    if isinstance(configs, SearchSpace):
        configs = list(enumerate_space(configs))
    if not configs:
        raise ValueError("search space is empty")
    return rank(evaluate_all(configs, ev, jobs))


def winner(results: Sequence[RankedResult]) -> RankedResult | None:
    return results[0] if results and results[0].feasible else None


@dataclass(frozen=True)
class SensitivityMap:
    solar: tuple
    wind: tuple
    labels: tuple  # labels[i][j] for solar[i], wind[j]
    winners: tuple = field(default=(), repr=False)
    violations: tuple = ()  # (solar, wind) cells where wind left the winner again

    def cells(self) -> list[tuple]:
        return [(s, w, self.labels[i][j]) for i, s in enumerate(self.solar) for j, w in enumerate(self.wind)]


def sensitivity(configs: Sequence[SystemConfiguration], ev: Evaluation, solar_values: Sequence[float],
                wind_values: Sequence[float], jobs: int = 1) -> SensitivityMap:
    """Winning architecture for each (annual solar, annual wind) cell.

    The base resource year is rescaled to each cell's means before the
    search runs. Cells where wind drops out of the winner after appearing at
    a lower wind speed (same solar) are reported, not treated as errors.
    """
    if not len(solar_values) or not len(wind_values):
        raise ValueError("sensitivity axes must not be empty")
    configs = list(configs)
    labels, winners, violations = [], [], []
    for s in solar_values:
        row_l, row_w = [], []
        seen_wind = False
        for w in wind_values:
            cell_ev = replace(ev, resources=ev.resources.rescaled(daily_ghi=s, wind_mean=w))
            best = winner(optimize(configs, cell_ev, jobs))
            label = best.configuration.architecture if best else INFEASIBLE_LABEL
            has_wind = best is not None and best.configuration.wind_count > 0
            if seen_wind and not has_wind:
                violations.append((s, w))
            seen_wind = seen_wind or has_wind
            row_l.append(label)
            row_w.append(best)
        labels.append(tuple(row_l))
        winners.append(tuple(row_w))
    return SensitivityMap(tuple(solar_values), tuple(wind_values), tuple(labels), tuple(winners),
                          tuple(violations))


def _fmt(x: float, digits: int) -> str:
    return f"{x:.{digits}f}"


def write_ranked_csv(results: Sequence[RankedResult], path, batteries_per_string: int = 40) -> int:
    """Feasible rows only; returns the row count."""
    rows = 0
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RANKED_CSV_HEADER)
        for r in results:
            if not r.feasible:
                continue
            c, s, e = r.configuration, r.simulation, r.economics
            writer.writerow([
                r.rank, _fmt(c.pv_kw, 1), c.wind_count, *(_fmt(g, 1) for g in c.gen_kw),
                c.battery_strings * batteries_per_string, _fmt(c.converter_kw, 1), c.strategy,
                _fmt(e.coe, 6), _fmt(e.npc, 2), _fmt(100 * s.renewable_fraction, 4),
                _fmt(s.excess_total / 1000, 4),
            ])
            rows += 1
    return rows


def write_utilization_csv(results: Sequence[RankedResult], path) -> None:
    """Per-source production, generator run hours and emissions of ranked rows."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(UTILIZATION_CSV_HEADER)
        for r in results:
            if not r.feasible:
                continue
            s = r.simulation
            total = s.total_production
            shares = [100 * g / total if total > 0 else 0.0 for g in s.gen_kwh]
            writer.writerow([
                r.rank, _fmt(s.pv_kwh, 3), _fmt(s.wind_kwh, 3), *(_fmt(g, 3) for g in s.gen_kwh),
                *(_fmt(h, 0) for h in s.gen_hours), *(_fmt(x, 4) for x in shares),
                _fmt(s.fuel_total, 3), _fmt(r.economics.co2_kg_yr, 3),
            ])


def write_sensitivity_csv(smap: SensitivityMap, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SENSITIVITY_CSV_HEADER)
        for s, w, label in smap.cells():
            writer.writerow([_fmt(s, 2), _fmt(w, 2), label])
