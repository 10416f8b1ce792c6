"""YAML run configuration: parsing, validation, defaults and overrides."""

from __future__ import annotations

import hashlib
import json
import typing
from dataclasses import MISSING, dataclass, fields, is_dataclass, replace
from pathlib import Path

import yaml

from .dispatch import ComponentCatalog, DispatchParams, SystemConfiguration
from .economics import EconomicParams
from .load import (
    DEFAULT_APPLIANCES,
    HOTEL_SHAPE,
    RESORT_DAILY_KWH,
    RESORT_PEAK_KW,
    Appliance,
    LoadProfile,
    read_appliances_csv,
    read_load_csv,
    synthesize_load,
)
from .optimizer import Axis, Evaluation, Feasibility, SearchSpace
from .resource import PENANG_DAILY_GHI, PENANG_MONTHLY_WIND, ResourceYear, read_resource_csv, synthesize_resource_year
from .thermal import HotWaterSpec


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field path."""


@dataclass(frozen=True)
class SynthesisSpec:
    monthly_ghi: tuple = (PENANG_DAILY_GHI,) * 12  # kWh/m2/day
    monthly_wind: tuple = PENANG_MONTHLY_WIND  # m/s
    wind_shape: float = 2.0
    wind_autocorrelation: float = 0.85
    wind_diurnal_strength: float = 0.0
    wind_peak_hour: int = 15
    ghi_noise: float = 0.0
    mean_temp_c: float = 27.0
    temp_swing_c: float = 4.0
    anemometer_height: float = 50.0
    air_density: float = 1.225

    def __post_init__(self):
        for name in ("monthly_ghi", "monthly_wind"):
            v = getattr(self, name)
            if len(v) != 12:
                raise ValueError(f"{name} needs 12 values, got {len(v)}")
            if min(v) < 0:
                raise ValueError(f"{name} values must be non-negative")


@dataclass(frozen=True)
class ResourceSource:
    csv: str | None = None
    synthesis: SynthesisSpec | None = SynthesisSpec()

    def __post_init__(self):
        if (self.csv is None) == (self.synthesis is None):
            raise ValueError("give exactly one of csv and synthesis")


@dataclass(frozen=True)
class InventorySpec:
    appliances_csv: str | None = None
    appliances: tuple = DEFAULT_APPLIANCES
    shape: tuple = HOTEL_SHAPE
    variability: float = 0.05
    monthly_factors: tuple = (1.0,) * 12
    calibrate_to_targets: bool = True
    target_daily_kwh: float = RESORT_DAILY_KWH
    target_peak_kw: float = RESORT_PEAK_KW


@dataclass(frozen=True)
class LoadSource:
    csv: str | None = None
    inventory: InventorySpec | None = InventorySpec()

    def __post_init__(self):
        if (self.csv is None) == (self.inventory is None):
            raise ValueError("give exactly one of csv and inventory")


@dataclass(frozen=True)
class SensitivitySpec:
    solar: Axis = Axis(3.0, 5.0, 0.4)  # kWh/m2/day
    wind: Axis = Axis(2.0, 4.0, 0.4)  # m/s


REFERENCE_SYSTEM = SystemConfiguration(600.0, 4, (100.0, 300.0, 500.0), 5, 500.0, "combined")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 1
    output_dir: str = "out"
    resources: ResourceSource = ResourceSource()
    load: LoadSource = LoadSource()
    components: ComponentCatalog = ComponentCatalog()
    dispatch: DispatchParams = DispatchParams()
    hot_water: HotWaterSpec = HotWaterSpec()
    economics: EconomicParams = EconomicParams()
    system: SystemConfiguration = REFERENCE_SYSTEM
    search: SearchSpace = SearchSpace()
    feasibility: Feasibility = Feasibility()
    sensitivity: SensitivitySpec = SensitivitySpec()


# --- dict <-> dataclass -----------------------------------------------------


def to_plain(obj):
    """Nested dataclasses and tuples as YAML-ready dicts and lists."""
    if is_dataclass(obj):
        return {f.name: to_plain(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, (tuple, list)):
        return [to_plain(x) for x in obj]
    return obj


def _scalar(kind, value, path):
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true or false, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return int(value)
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    raise ConfigError(f"{path}: unsupported field type")


def _sequence(default: tuple, value, path):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{path}: expected a list, got {value!r}")
    proto = default[0] if default else None
    out = []
    for k, item in enumerate(value):
        p = f"{path}[{k}]"
        if is_dataclass(proto):
            # list items stand alone: fields without a default must be given
            if isinstance(item, dict):
                for f in fields(proto):
                    if f.default is MISSING and f.default_factory is MISSING and f.name not in item:
                        raise ConfigError(f"{p}.{f.name}: value required")
            out.append(_build(proto, item, p))
        elif isinstance(proto, str):
            out.append(_scalar(str, item, p))
        elif proto is None:
            # untyped nested numbers, e.g. a tabulated power curve
            out.append(tuple(_scalar(float, x, f"{p}[{j}]") for j, x in enumerate(item))
                       if isinstance(item, (list, tuple)) else _scalar(float, item, p))
        else:
            out.append(_scalar(float, item, p))
    return tuple(out)


def _coerce(hint, default, value, path):
    args = typing.get_args(hint)
    optional = type(None) in args
    if value is None:
        if optional or default is None:
            return None
        raise ConfigError(f"{path}: value required")
    base = next((a for a in args if a is not type(None)), hint) if args else hint
    if is_dataclass(base):
        return _build(default if default is not None else base(), value, path)
    if base is tuple or isinstance(default, tuple):
        return _sequence(default or (), value, path)
    return _scalar(base, value, path)


def _build(default, data, path):
    """Overlay ``data`` on the dataclass instance ``default``."""
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(data).__name__}")
    cls = type(default)
    hints = typing.get_type_hints(cls)
    names = {f.name for f in fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigError(f"{path}.{key}: unknown key" if path else f"{key}: unknown key")
    kwargs = {}
    for key, value in data.items():
        p = f"{path}.{key}" if path else key
        kwargs[key] = _coerce(hints[key], getattr(default, key), value, p)
    try:
        return replace(default, **kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path or 'config'}: {exc}") from None


def _either(data: dict, key: str, a: str, b: str) -> dict:
    # naming one source switches the other off unless both are named
    block = data.get(key)
    if isinstance(block, dict) and (a in block) != (b in block):
        block = dict(block)
        block.setdefault(a, None)
        block.setdefault(b, None)
        data = {**data, key: block}
    return data


def parse_config(data) -> RunConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a mapping")
    data = _either(data, "resources", "csv", "synthesis")
    data = _either(data, "load", "csv", "inventory")
    cfg = _build(RunConfig(), data, "")
    if "seed" not in data and (cfg.resources.synthesis is not None or cfg.load.inventory is not None):
        raise ConfigError("seed: required when resources or load are synthesized")
    return cfg


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``key.sub=value`` strings; values are read as YAML scalars."""
    data = json.loads(json.dumps(data if data is not None else {}))
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"--set {item!r}: expected key=value")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        node = data
        for part in parts[:-1]:
            nxt = node.get(part)
            if not isinstance(nxt, dict):
                nxt = {}
                node[part] = nxt
            node = nxt
        node[parts[-1]] = yaml.safe_load(raw)
    return data


def load_config(path, overrides=()) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return parse_config(apply_overrides(data, overrides))


HEADER = """\
# Hybrid microgrid run configuration.
# Units: kW, kWh, m/s, kWh/m2/day, C, $. Battery sizes count 40-unit strings.
# resources: give either csv (hour,ghi_kw_m2,wind_m_s,temp_c) or synthesis.
# load: give either csv (hour,load_kw) or inventory.
# Relative paths are resolved against this file's directory.
"""


def dump_config(cfg: RunConfig) -> str:
    return HEADER + yaml.safe_dump(to_plain(cfg), sort_keys=False, default_flow_style=None, width=100)


def config_hash(cfg: RunConfig) -> str:
    """Digest of every setting that affects results (the output directory does not)."""
    plain = to_plain(cfg)
    plain.pop("output_dir")
    blob = json.dumps(plain, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# --- building the run inputs -------------------------------------------------


def _resolve(p: str, base_dir) -> Path:
    path = Path(p)
    return path if path.is_absolute() or base_dir is None else Path(base_dir) / path


def build_resources(cfg: RunConfig, base_dir=None) -> ResourceYear:
    src = cfg.resources
    if src.csv is not None:
        path = _resolve(src.csv, base_dir)
        if not path.exists():
            raise ConfigError(f"resources.csv: file not found: {path}")
        return read_resource_csv(path)
    s = src.synthesis
    return synthesize_resource_year(
        s.monthly_ghi, s.monthly_wind, cfg.seed,
        wind_shape=s.wind_shape, wind_autocorrelation=s.wind_autocorrelation,
        wind_diurnal_strength=s.wind_diurnal_strength, wind_peak_hour=s.wind_peak_hour,
        ghi_noise=s.ghi_noise, mean_temp_c=s.mean_temp_c, temp_swing_c=s.temp_swing_c,
        anemometer_height=s.anemometer_height, air_density=s.air_density,
    )


def build_load(cfg: RunConfig, base_dir=None) -> LoadProfile:
    src = cfg.load
    if src.csv is not None:
        path = _resolve(src.csv, base_dir)
        if not path.exists():
            raise ConfigError(f"load.csv: file not found: {path}")
        return read_load_csv(path)
    inv = src.inventory
    appliances: tuple[Appliance, ...] = inv.appliances
    if inv.appliances_csv is not None:
        path = _resolve(inv.appliances_csv, base_dir)
        if not path.exists():
            raise ConfigError(f"load.inventory.appliances_csv: file not found: {path}")
        appliances = tuple(read_appliances_csv(path))
    return synthesize_load(
        appliances, inv.shape, inv.variability, cfg.seed, monthly_factors=inv.monthly_factors,
        calibrate_to_targets=inv.calibrate_to_targets, target_daily_kwh=inv.target_daily_kwh,
        target_peak_kw=inv.target_peak_kw,
    )


def build_evaluation(cfg: RunConfig, base_dir=None) -> Evaluation:
    return Evaluation(
        resources=build_resources(cfg, base_dir),
        load=build_load(cfg, base_dir),
        catalog=cfg.components,
        params=cfg.dispatch,
        hot_water=cfg.hot_water,
        economics=cfg.economics,
        feasibility=cfg.feasibility,
    )


__all__ = [
    "ConfigError", "RunConfig", "SynthesisSpec", "ResourceSource", "InventorySpec", "LoadSource",
    "SensitivitySpec", "REFERENCE_SYSTEM", "parse_config", "load_config", "apply_overrides",
    "dump_config", "config_hash", "to_plain", "build_resources", "build_load", "build_evaluation",
]
