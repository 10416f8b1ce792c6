"""Command-line entry point: ``hybridgrid {simulate,optimize,sensitivity,dump-defaults}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    RunConfig,
    build_evaluation,
    config_hash,
    dump_config,
    load_config,
    parse_config,
    apply_overrides,
    to_plain,
)
from .dispatch import balance_residuals, simulate_year, write_trace_csv
from .economics import npc_from_cashflows
from .optimizer import (
    enumerate_space,
    optimize,
    sample_space,
    sensitivity,
    write_ranked_csv,
    write_sensitivity_csv,
    write_utilization_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
BALANCE_TOL = 1e-6  # kWh per hour


def _load(args) -> tuple[RunConfig, Path | None]:
    overrides = list(args.set or [])
    if getattr(args, "seed", None) is not None:
        overrides.append(f"seed={args.seed}")
    if args.config is None:
        cfg = parse_config(apply_overrides({"seed": RunConfig().seed}, overrides))
        base = None
    else:
        cfg = load_config(args.config, overrides)
        base = Path(args.config).parent
    if args.output_dir is not None:
        cfg = replace(cfg, output_dir=args.output_dir)
    return cfg, base


def _out_dir(cfg: RunConfig, base: Path | None) -> Path:
    out = Path(cfg.output_dir)
    if not out.is_absolute() and base is not None:
        out = base / out
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _manifest(out: Path, command: str, cfg: RunConfig, **extra) -> None:
    _write_json(out / "manifest.json", {
        "command": command,
        "version": __version__,
        "config_sha256": config_hash(cfg),
        "seed": cfg.seed,
        **extra,
    })


def _candidates(cfg: RunConfig, args) -> list:
    space = cfg.search.coarse() if args.coarse else cfg.search
    print(f"search space: {space.count} configurations")
    if args.sample:
        configs = sample_space(space, args.sample, cfg.seed)
        print(f"sampled {len(configs)} distinct configurations (seed {cfg.seed})")
        return configs
    return list(enumerate_space(space))


def cmd_simulate(args) -> int:
    cfg, base = _load(args)
    ev = build_evaluation(cfg, base)
    out = _out_dir(cfg, base)
    system = cfg.system
    sim = simulate_year(system, ev.catalog, ev.resources, ev.load, ev.params, ev.hot_water,
                        keep_records=True)
    econ = npc_from_cashflows(system, sim, ev.catalog, ev.economics)
    worst = float(np.max(np.abs(balance_residuals(sim.records))))
    status = "PASS" if worst <= BALANCE_TOL else "FAIL"
    _write_json(out / "report.json", {
        "configuration": to_plain(system),
        "architecture": system.architecture,
        "simulation": sim.summary(),
        "economics": econ.to_dict(),
        "diversion": to_plain(sim.diversion),
        "energy_balance": {"max_residual_kwh": worst, "status": status},
    })
    if args.trace:
        write_trace_csv(sim, out / "trace.csv")
    _manifest(out, "simulate", cfg, trace=bool(args.trace))
    print(f"architecture: {system.architecture} ({system.strategy})")
    print(f"renewable fraction: {100 * sim.renewable_fraction:.2f} %")
    print(f"excess electricity: {sim.excess_total / 1000:.2f} MWh/yr "
          f"({100 * sim.excess_fraction:.2f} % of production), diverted {sim.excess_diverted / 1000:.2f} MWh")
    print(f"unmet load: {100 * sim.unmet_fraction:.3f} %")
    print(f"fuel: {sim.fuel_total:.0f} L/yr, CO2: {econ.co2_kg_yr:.0f} kg/yr")
    print(f"NPC: {econ.npc:,.0f} $, COE: {econ.coe:.4f} $/kWh")
    print(f"energy balance: {status} (max residual {worst:.3g} kWh)")
    print(f"report written to {out / 'report.json'}")
    return EXIT_OK if status == "PASS" else EXIT_RUNTIME


def _print_top(results, n: int = 10) -> None:
    cols = f"{'rank':>4} {'pv_kw':>7} {'wind':>4} {'gens_kw':>17} {'batt':>5} {'conv':>6} {'dispatch':>15} " \
           f"{'coe':>8} {'npc':>14} {'rf%':>6} {'ee_mwh':>9}"
    print(cols)
    for r in results[:n]:
        if not r.feasible:
            break
        c, s, e = r.configuration, r.simulation, r.economics
        gens = "/".join(f"{g:g}" for g in c.gen_kw)
        print(f"{r.rank:>4} {c.pv_kw:>7g} {c.wind_count:>4} {gens:>17} {c.battery_strings * 40:>5} "
              f"{c.converter_kw:>6g} {c.strategy:>15} {e.coe:>8.4f} {e.npc:>14,.0f} "
              f"{100 * s.renewable_fraction:>6.2f} {s.excess_total / 1000:>9.2f}")


def cmd_optimize(args) -> int:
    cfg, base = _load(args)
    ev = build_evaluation(cfg, base)
    out = _out_dir(cfg, base)
    configs = _candidates(cfg, args)
    results = optimize(configs, ev, jobs=args.jobs)
    rows = write_ranked_csv(results, out / "ranked.csv", cfg.components.battery.batteries_per_string)
    write_utilization_csv(results, out / "utilization.csv")
    _manifest(out, "optimize", cfg, sample=args.sample, coarse=bool(args.coarse),
              evaluated=len(configs), feasible=rows)
    print(f"{rows} feasible of {len(configs)} evaluated")
    if rows == 0:
        print("no feasible configuration; relax feasibility.max_unmet_fraction or widen the search")
    else:
        _print_top(results)
    print(f"ranking written to {out / 'ranked.csv'}")
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    cfg, base = _load(args)
    ev = build_evaluation(cfg, base)
    out = _out_dir(cfg, base)
    configs = _candidates(cfg, args)
    solar = cfg.sensitivity.solar.values()
    wind = cfg.sensitivity.wind.values()
    smap = sensitivity(configs, ev, solar, wind, jobs=args.jobs)
    write_sensitivity_csv(smap, out / "sensitivity.csv")
    _manifest(out, "sensitivity", cfg, sample=args.sample, coarse=bool(args.coarse),
              evaluated=len(configs), cells=len(solar) * len(wind))
    width = max(len(l) for row in smap.labels for l in row)
    print("solar \\ wind  " + " ".join(f"{w:>{width}.2f}" for w in wind))
    for s, row in zip(solar, smap.labels):
        print(f"{s:>12.2f}  " + " ".join(f"{l:>{width}}" for l in row))
    for s, w in smap.violations:
        print(f"note: wind leaves the winning system at solar {s:.2f}, wind {w:.2f}")
    print(f"map written to {out / 'sensitivity.csv'}")
    return EXIT_OK


def cmd_dump_defaults(args) -> int:
    text = dump_config(RunConfig())
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridgrid", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", nargs="?", help="YAML run configuration (defaults if omitted)")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config value, e.g. system.pv_kw=400 (repeatable)")
        sp.add_argument("--output-dir", help="write outputs here instead of output_dir")
        sp.add_argument("--seed", type=int, help="override the config seed")

    def search(sp):
        sp.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
        sp.add_argument("--sample", type=int, metavar="N", help="Latin-hypercube sample of N grid points")
        sp.add_argument("--coarse", action="store_true", help="double every search-axis step")

    sp = sub.add_parser("simulate", help="simulate config.system for one year")
    common(sp)
    sp.add_argument("--trace", action="store_true", help="also write the 8760-hour trace.csv")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("optimize", help="rank the search space by net present cost")
    common(sp)
    search(sp)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("sensitivity", help="winning architecture over solar and wind means")
    common(sp)
    search(sp)
    sp.set_defaults(func=cmd_sensitivity)

    sp = sub.add_parser("dump-defaults", help="print the default configuration")
    sp.add_argument("-o", "--output", help="write to this file instead of standard output")
    sp.set_defaults(func=cmd_dump_defaults)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
